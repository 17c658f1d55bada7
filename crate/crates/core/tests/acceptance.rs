//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its wall time and limit; the process exits non-zero on any failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{all_matrices, gf, normalized, rng, Q};
use glpres::harness::{
    enumerate_preservers, expected_preservers, run_dieudonne, run_onto, run_span, verify_theorem1, CampaignConfig,
};
use glpres::lattice;
use glpres::mpoly::generic_det;
use glpres::{
    Budget, DivisionAlgebraSpec, FieldSpec, MPoly, MatEndo, Matrix, MatrixSubspace, PreservationVerdict, Preset,
    PreserverClassification, Scalar,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn enumeration_matches(field: FieldSpec, jobs: usize, allow_large: bool) -> Outcome {
    let mut cfg = CampaignConfig::new(field, 2);
    cfg.jobs = jobs;
    cfg.allow_large = allow_large;
    let e = enumerate_preservers(&cfg).map_err(e2s)?;
    let want = expected_preservers(&e.tables);
    let found: BTreeSet<u64> = e.preservers.iter().copied().collect();
    let union: BTreeSet<u64> = want.frobenius.union(&want.pinch).copied().collect();
    let r = &e.report;
    ensure(found == union, || format!("scan found {} maps, constructive set has {}", found.len(), union.len()))?;
    ensure(r.anomalies.is_empty(), || format!("anomalies: {:?}", r.anomalies))?;
    ensure(r.total_maps as u128 == e.tables.total_maps(), || format!("scanned {} maps", r.total_maps))?;
    Ok(format!(
        "{} maps, {} preservers = {} bijective + {} singular",
        r.total_maps, r.preserver_count, r.bijective_count, r.singular_count
    ))
}

fn criterion_1() -> Outcome {
    let detail = enumeration_matches(gf(2), 0, false)?;
    ensure(detail.starts_with("65536 maps, 144 preservers = 72 bijective + 72 singular"), || detail.clone())?;
    Ok(detail)
}

fn criterion_2() -> Outcome {
    let r = verify_theorem1(&CampaignConfig::new(gf(2), 2)).map_err(e2s)?;
    ensure(r.mode == "exhaustive" && r.maps_checked == 65536, || format!("{} over {} maps", r.mode, r.maps_checked))?;
    ensure(r.image_equals_gl == 72 && r.preimage_equals_gl == 72 && r.bijective_preservers == 72, || {
        format!("{} / {} / {}", r.image_equals_gl, r.preimage_equals_gl, r.bijective_preservers)
    })?;
    ensure(r.sets_coincide && r.anomalies.is_empty(), || format!("anomalies: {:?}", r.anomalies))?;
    Ok("f(GL) = GL and f^-1(GL) = GL each pick out the same 72 maps".into())
}

fn criterion_3() -> Outcome {
    let r = run_dieudonne(&CampaignConfig::new(gf(2), 2)).map_err(e2s)?;
    ensure(r.total_subspaces == 67, || format!("{} subspaces", r.total_subspaces))?;
    ensure(r.max_singular_dim == 2, || format!("singular subspace of dim {}", r.max_singular_dim))?;
    ensure((r.maximal_singular, r.kernel_type, r.image_type) == (6, 3, 3), || {
        format!("{} maximal: {} kernel, {} image", r.maximal_singular, r.kernel_type, r.image_type)
    })?;
    ensure(r.anomalies.is_empty(), || format!("anomalies: {:?}", r.anomalies))?;
    Ok("67 subspaces, 6 maximal singular (3 kernel, 3 image)".into())
}

fn frobenius_trials(f: FieldSpec, n: usize, trials: usize, bound: i64, seed: u64) -> Result<(), String> {
    let b = Budget::default().with_limit(1 << 12).with_samples(64);
    let mut r = rng(seed);
    for trial in 0..trials {
        let p = Matrix::random_invertible(f, n, &mut r, bound);
        let q = Matrix::random_invertible(f, n, &mut r, bound);
        let twisted = r.gen_bool(0.5);
        let build = if twisted { MatEndo::build_v } else { MatEndo::build_u };
        let map = build(&p, &q).map_err(e2s)?;
        let c = map.classify(&b).map_err(e2s)?;
        let (ph, qh) = match (&c, twisted) {
            (PreserverClassification::FrobeniusDirect { p, q }, false) | (PreserverClassification::FrobeniusTwisted { p, q }, true) => (p, q),
            _ => return Err(format!("{f} n={n} trial {trial}: got {} for twisted = {twisted}", c.tag())),
        };
        ensure(ph.first_nonzero().map(|(_, s)| s.is_one()) == Some(true), || format!("{f} n={n}: P not normalized"))?;
        ensure(build(ph, qh).map_err(e2s)? == map, || format!("{f} n={n} trial {trial}: reconstruction differs"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    for (k, f) in [gf(2), gf(3), gf(5)].into_iter().enumerate() {
        for n in [2, 3] {
            frobenius_trials(f, n, 1000, 0, 40 + 2 * k as u64 + n as u64)?;
        }
    }
    for n in [2, 3] {
        frobenius_trials(Q, n, 100, 5, 90 + n as u64)?;
    }
    Ok("6000 finite-field and 200 rational maps recovered exactly".into())
}

fn preset_space(f: FieldSpec, preset: &Preset) -> Result<MatrixSubspace, String> {
    DivisionAlgebraSpec::preset(preset, f, &Budget::default()).and_then(|a| a.to_subspace()).map_err(e2s)
}

fn criterion_5() -> Outcome {
    let presets = [
        (gf(2), Preset::parse("companion", gf(2), Some("x^2 + x + 1")).map_err(e2s)?),
        (gf(3), Preset::parse("companion", gf(3), Some("x^2 + 1")).map_err(e2s)?),
        (Q, Preset::parse("companion", Q, Some("x^3 - 2")).map_err(e2s)?),
        (Q, Preset::GaussianPair),
        (Q, Preset::HamiltonQuaternions),
    ];
    let b = Budget::default().with_samples(64);
    let mut r = rng(5);
    for (f, preset) in &presets {
        let v = preset_space(*f, preset)?;
        let n = v.n();
        for trial in 0..100 {
            let a = Matrix::random_invertible(*f, n, &mut r, 3);
            let x = loop {
                let x = Matrix::random(*f, n, 1, &mut r, 4);
                if !x.is_zero() {
                    break x;
                }
            };
            let twisted = r.gen_bool(0.5);
            let map = MatEndo::build_pinch(&v, &a, &x, twisted).map_err(e2s)?;
            let c = map.classify(&b).map_err(e2s)?;
            let d = match (&c, twisted) {
                (PreserverClassification::PinchDirect(d), false) | (PreserverClassification::PinchTwisted(d), true) => d,
                _ => return Err(format!("{preset} trial {trial}: got {} for twisted = {twisted}", c.tag())),
            };
            ensure(d.x == normalized(&x), || format!("{preset} trial {trial}: X not recovered"))?;
            ensure(d.v == v && map.image().map_err(e2s)? == v, || format!("{preset} trial {trial}: image differs"))?;
            ensure(c.reconstruct().map_err(e2s)?.as_ref() == Some(&map), || format!("{preset} trial {trial}: reconstruction differs"))?;
        }
    }
    Ok("500 pinch maps recovered exactly".into())
}

fn planes(f: FieldSpec) -> Vec<MatrixSubspace> {
    let p = f.modulus().unwrap();
    let mut out = Vec::new();
    lattice::for_each_subspace(p, 4, 2, |rows| {
        if lattice::is_nonsingular_span(rows, 2, 2, p) {
            out.push(lattice::subspace_from_rows(f, 2, rows).unwrap());
        }
    });
    out
}

fn bridge(v: &MatrixSubspace) -> Result<(), String> {
    let alg = DivisionAlgebraSpec::from_subspace(v).map_err(e2s)?;
    let back = alg.to_subspace().map_err(e2s)?;
    ensure(&back == v, || "to_subspace(from_subspace(V)) differs from V".into())?;
    let again = DivisionAlgebraSpec::from_subspace(&back).map_err(e2s)?;
    ensure(again.constants() == alg.constants(), || "structure constants changed".into())
}

fn criterion_6() -> Outcome {
    let f2 = planes(gf(2));
    ensure(f2.len() == 2, || format!("{} planes over GF(2)", f2.len()))?;
    for v in f2.iter().chain(planes(gf(3)).iter()) {
        bridge(v)?;
    }
    let presets = [
        (gf(2), Preset::parse("companion", gf(2), Some("x^3 + x + 1")).map_err(e2s)?),
        (gf(3), Preset::parse("companion", gf(3), Some("x^2 + 1")).map_err(e2s)?),
        (Q, Preset::parse("companion", Q, Some("x^3 - 2")).map_err(e2s)?),
        (Q, Preset::GaussianPair),
        (Q, Preset::HamiltonQuaternions),
        (Q, Preset::Octonions),
    ];
    for (f, preset) in &presets {
        bridge(&preset_space(*f, preset)?)?;
    }
    let b = Budget::default();
    let mut division = 0;
    for f in [gf(2), gf(3)] {
        let p = f.modulus().unwrap() as u64;
        let elems: Vec<Scalar> = f.elements().collect();
        let nonzero: Vec<Vec<Scalar>> = elems
            .iter()
            .flat_map(|a| elems.iter().map(move |c| vec![a.clone(), c.clone()]))
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
        for code in 0..p.pow(8) {
            let mut rest = code;
            let mut c = vec![vec![vec![f.zero(); 2]; 2]; 2];
            for x in c.iter_mut().flatten().flatten() {
                *x = f.int((rest % p) as i64);
                rest /= p;
            }
            let alg = DivisionAlgebraSpec::new(f, 2, c).map_err(e2s)?;
            if nonzero.iter().all(|v| alg.left_mult(v).map(|m| m.is_invertible()).unwrap_or(false)) {
                division += 1;
                ensure(alg.right_mults_invertible(&b).map_err(e2s)?, || format!("{f} algebra {code}: a right multiplication is singular"))?;
            }
        }
    }
    Ok(format!("bridge exact on all planes and presets; {division} left-division algebras are right-division"))
}

/// Symbolic Leibniz expansion of det(sum x_k B_k).
fn leibniz_form(basis: &[Matrix]) -> MPoly {
    let n = basis[0].rows();
    let f = basis[0].field();
    let entry = |i, j| MPoly::linear(f, &basis.iter().map(|b| b.get(i, j).clone()).collect::<Vec<_>>());
    let mut total = MPoly::zero(f, basis.len());
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut term = MPoly::constant(f.int(if inversions % 2 == 0 { 1 } else { -1 }), basis.len());
        for (i, &j) in p.iter().enumerate() {
            term = term.mul(&entry(i, j));
        }
        total = total.add(&term);
    });
    total
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, visit);
        p.swap(k, i);
    }
}

fn criterion_7() -> Outcome {
    let alg = DivisionAlgebraSpec::preset(&Preset::HamiltonQuaternions, Q, &Budget::default()).map_err(e2s)?;
    let mults = alg.left_mults();
    let norm = (0..4).fold(MPoly::zero(Q, 4), |acc, i| acc.add(&MPoly::var(Q, 4, i).pow(2)));
    let want = norm.pow(2);
    ensure(leibniz_form(&mults) == want, || "Leibniz expansion differs from (x1^2+x2^2+x3^2+x4^2)^2".into())?;
    ensure(generic_det(&mults, 1 << 20).map_err(e2s)? == want, || "determinant form differs".into())?;
    let v = alg.to_subspace().map_err(e2s)?;
    let map = MatEndo::build_pinch(&v, &Matrix::identity(Q, 4), &Matrix::basis_vector(Q, 4, 0), false).map_err(e2s)?;
    match map.preserves_gl(&Budget::default().with_samples(100_000)).map_err(e2s)? {
        PreservationVerdict::SampledPass(k) if k >= 100_000 => Ok(format!("{} terms match; {k} sampled checks passed", want.num_terms())),
        other => Err(format!("pinch verdict {other:?}")),
    }
}

fn criterion_8() -> Outcome {
    let cases = [(gf(2), 2), (gf(2), 3), (gf(3), 2), (gf(3), 3)];
    let r = run_span(&cases, &Budget::default()).map_err(e2s)?;
    ensure(r.cases.iter().all(|c| c.spans) && r.anomalies.is_empty(), || format!("anomalies: {:?}", r.anomalies))?;
    for (f, n) in [(gf(2), 2), (gf(3), 2)] {
        let gl: Vec<Matrix> = all_matrices(f, n).into_iter().filter(Matrix::is_invertible).collect();
        let stacked = Matrix::from_fn(f, gl.len(), n * n, |r, c| gl[r].vec().get(c, 0).clone());
        ensure(stacked.rank() == n * n, || format!("GL_{n}({f}) spans rank {}", stacked.rank()))?;
    }
    Ok("GL_n spans M_n for n, q in {2, 3}".into())
}

fn criterion_9() -> Outcome {
    let cfg = CampaignConfig::new(gf(2), 2);
    let e = enumerate_preservers(&cfg).map_err(e2s)?;
    let r = run_onto(&cfg, &e).map_err(e2s)?;
    ensure((r.preservers, r.vectors, r.failures) == (144, 3, 0) && r.anomalies.is_empty(), || {
        format!("{} preservers x {} vectors, {} failures", r.preservers, r.vectors, r.failures)
    })?;
    Ok(format!("{} checks, no failures", r.checks))
}

fn criterion_10() -> Outcome {
    let detail = enumeration_matches(gf(3), 8, true)?;
    ensure(detail.starts_with("43046721 maps, 9216 preservers"), || detail.clone())?;
    Ok(detail)
}

fn main() {
    let criteria: [(fn() -> Outcome, &str, u64); 10] = [
        (criterion_1, "GF(2) enumeration matches the constructive set", 30),
        (criterion_2, "image and preimage characterizations coincide", 60),
        (criterion_3, "singular subspace lattice over GF(2)", 1),
        (criterion_4, "Frobenius round trip", 120),
        (criterion_5, "pinch round trip", 120),
        (criterion_6, "division algebra bridge and left/right bijectivity", 60),
        (criterion_7, "quaternion determinant and sampled preservation", 120),
        (criterion_8, "invertible matrices span", 1),
        (criterion_9, "column surjectivity of preservers", 1),
        (criterion_10, "GF(3) enumeration matches the constructive set", 1800),
    ];
    let mut failed = 0;
    for (k, (run, name, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= Duration::from_secs(*limit) => ("PASS", d),
            Ok(d) => ("FAIL", format!("over time limit; {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status}: {name} ({:.2} s, limit {limit} s): {detail}", k + 1, took.as_secs_f64());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
