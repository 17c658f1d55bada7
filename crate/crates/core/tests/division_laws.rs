mod common;

use common::{gf, rng, Q};
use glpres::lattice;
use glpres::{
    Budget, DivisionAlgebraSpec, DivisionVerdict, FieldSpec, FullNonsingularVerdict, MatEndo, Matrix, MatrixSubspace,
    PreservationVerdict, Preset, Scalar,
};
use proptest::prelude::*;

fn presets() -> Vec<(FieldSpec, Preset)> {
    vec![
        (gf(2), Preset::parse("companion", gf(2), Some("x^2 + x + 1")).unwrap()),
        (gf(2), Preset::parse("companion", gf(2), Some("x^3 + x + 1")).unwrap()),
        (gf(3), Preset::parse("companion", gf(3), Some("x^2 + 1")).unwrap()),
        (gf(5), Preset::parse("companion", gf(5), Some("x^2 + 2")).unwrap()),
        (Q, Preset::parse("companion", Q, Some("x^3 - 2")).unwrap()),
        (Q, Preset::parse("companion", Q, Some("x^2 + x + 1")).unwrap()),
        (Q, Preset::GaussianPair),
        (Q, Preset::HamiltonQuaternions),
        (Q, Preset::Octonions),
    ]
}

fn full_nonsingular_planes(f: FieldSpec) -> Vec<MatrixSubspace> {
    let p = f.modulus().unwrap();
    let mut out = Vec::new();
    lattice::for_each_subspace(p, 4, 2, |rows| {
        if lattice::is_nonsingular_span(rows, 2, 2, p) {
            out.push(lattice::subspace_from_rows(f, 2, rows).unwrap());
        }
    });
    out
}

#[test]
fn bridge_round_trips_on_every_plane() {
    let b = Budget::default();
    for (f, expected) in [(gf(2), 2), (gf(3), 18)] {
        let planes = full_nonsingular_planes(f);
        assert_eq!(planes.len(), expected);
        for v in planes {
            let alg = DivisionAlgebraSpec::from_subspace(&v).unwrap();
            let back = alg.to_subspace().unwrap();
            assert_eq!(back, v);
            assert_eq!(DivisionAlgebraSpec::from_subspace(&back).unwrap().constants(), alg.constants());
            assert!(matches!(alg.is_division(&b).unwrap(), DivisionVerdict::Division(_)));
        }
    }
}

#[test]
fn bridge_round_trips_on_presets() {
    let b = Budget::default();
    for (f, preset) in presets() {
        let alg = DivisionAlgebraSpec::preset(&preset, f, &b).unwrap();
        let v = alg.to_subspace().unwrap();
        assert_eq!(v.dim(), alg.n());
        let again = DivisionAlgebraSpec::from_subspace(&v).unwrap();
        assert_eq!(again.constants(), alg.constants(), "{preset}");
        assert_eq!(again.to_subspace().unwrap(), v);
        // the certificate travels with the subspace
        let verdict = v.is_full_nonsingular(&b).unwrap();
        assert!(verdict.is_verified(), "{preset}: {verdict:?}");
        if f == Q {
            let bare = MatrixSubspace::from_basis(Q, v.n(), v.basis()).unwrap();
            assert!(bare.is_full_nonsingular(&b).unwrap().is_verified(), "{preset} without attached certificate");
        }
    }
}

/// Structure constants for code `c` of a 2-dimensional algebra over GF(p).
fn algebra_from_code(f: FieldSpec, mut code: u64) -> DivisionAlgebraSpec {
    let p = f.modulus().unwrap() as u64;
    let mut c = vec![vec![vec![f.zero(); 2]; 2]; 2];
    for row in c.iter_mut() {
        for col in row.iter_mut() {
            for x in col.iter_mut() {
                *x = f.int((code % p) as i64);
                code /= p;
            }
        }
    }
    DivisionAlgebraSpec::new(f, 2, c).unwrap()
}

fn all_left_mults_invertible(alg: &DivisionAlgebraSpec) -> bool {
    let f = alg.field();
    let elems: Vec<Scalar> = f.elements().collect();
    let ok = elems
        .iter()
        .flat_map(|a| elems.iter().map(move |b| vec![a.clone(), b.clone()]))
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .all(|v| alg.left_mult(&v).unwrap().is_invertible());
    ok
}

#[test]
fn left_bijectivity_forces_right_bijectivity() {
    let b = Budget::default();
    for (f, expected) in [(gf(2), 12u64), (gf(3), 864)] {
        let p = f.modulus().unwrap() as u64;
        let mut division = 0;
        for code in 0..p.pow(8) {
            let alg = algebra_from_code(f, code);
            if all_left_mults_invertible(&alg) {
                division += 1;
                assert!(alg.right_mults_invertible(&b).unwrap(), "{f} code {code}");
            }
        }
        // one algebra per ordered basis of each full non-singular plane
        let bases_per_plane = (p * p - 1) * (p * p - p);
        assert_eq!(division, full_nonsingular_planes(f).len() as u64 * bases_per_plane);
        assert_eq!(division, expected);
    }
}

#[test]
fn zero_divisors_are_verified() {
    let b = Budget::default();
    let mut r = rng(8);
    let mut found = 0;
    for f in [gf(2), gf(3), gf(5), Q] {
        for n in 2..4 {
            for _ in 0..40 {
                let mats: Vec<Matrix> = (0..n).map(|_| Matrix::random(f, n, n, &mut r, 2)).collect();
                let alg = match DivisionAlgebraSpec::from_left_mults(f, &mats) {
                    Ok(a) => a,
                    Err(_) => continue,
                };
                if let DivisionVerdict::NotDivision { witness, annihilated } = alg.is_division(&b).unwrap() {
                    assert!(witness.iter().any(|x| !x.is_zero()));
                    assert!(annihilated.iter().any(|x| !x.is_zero()));
                    assert!(alg.multiply(&witness, &annihilated).unwrap().iter().all(Scalar::is_zero));
                    found += 1;
                }
            }
        }
    }
    assert!(found > 100);
}

#[test]
fn split_quadratic_is_not_a_division_algebra() {
    // x^2 - 2 has the root 3 in GF(7)
    let f = gf(7);
    let c = Matrix::from_ints(f, &[&[0, 2], &[1, 0]]);
    let alg = DivisionAlgebraSpec::from_left_mults(f, &[Matrix::identity(f, 2), c]).unwrap();
    let DivisionVerdict::NotDivision { witness, annihilated } = alg.is_division(&Budget::default()).unwrap() else { panic!() };
    assert!(alg.multiply(&witness, &annihilated).unwrap().iter().all(Scalar::is_zero));
    assert!(DivisionAlgebraSpec::preset(&Preset::parse("companion", f, Some("x^2 - 2")).unwrap(), f, &Budget::default()).is_err());
}

#[test]
fn preset_pinch_maps_preserve_invertibility() {
    let b = Budget::default().with_samples(10_000);
    let mut r = rng(9);
    for (f, preset) in presets() {
        let v = DivisionAlgebraSpec::preset(&preset, f, &b).unwrap().to_subspace().unwrap();
        let n = v.n();
        if n == 8 {
            continue;
        }
        let a = Matrix::random_invertible(f, n, &mut r, 3);
        let x = Matrix::basis_vector(f, n, n - 1);
        for twisted in [false, true] {
            let map = MatEndo::build_pinch(&v, &a, &x, twisted).unwrap();
            match map.preserves_gl(&b).unwrap() {
                PreservationVerdict::ExhaustivePass(_) => assert!(f.is_finite()),
                PreservationVerdict::SampledPass(k) => assert!(!f.is_finite() && k >= 10_000),
                PreservationVerdict::Refuted(m) => panic!("{preset}: {m}"),
            }
        }
    }
}

#[test]
fn octonion_pinch_samples() {
    let b = Budget::default().with_samples(300);
    let alg = DivisionAlgebraSpec::preset(&Preset::Octonions, Q, &b).unwrap();
    let v = alg.to_subspace().unwrap();
    let map = MatEndo::build_pinch(&v, &Matrix::identity(Q, 8), &Matrix::basis_vector(Q, 8, 0), false).unwrap();
    assert_eq!(map.preserves_gl(&b).unwrap(), PreservationVerdict::SampledPass(300));
    let x = vec![Q.int(1), Q.int(2), Q.int(0), Q.int(-1), Q.int(0), Q.int(0), Q.int(3), Q.int(1)];
    let y = vec![Q.int(0), Q.int(1), Q.int(1), Q.int(0), Q.int(-2), Q.int(0), Q.int(0), Q.int(1)];
    // octonion norms multiply
    let norm = |v: &[Scalar]| v.iter().fold(Q.zero(), |acc, t| &acc + &(t * t));
    assert_eq!(norm(&alg.multiply(&x, &y).unwrap()), &norm(&x) * &norm(&y));
}

#[test]
fn unsupported_presets() {
    let b = Budget::default();
    assert!(DivisionAlgebraSpec::preset(&Preset::HamiltonQuaternions, gf(3), &b).is_err());
    assert!(DivisionAlgebraSpec::preset(&Preset::GaussianPair, gf(5), &b).is_err());
    assert!(DivisionAlgebraSpec::preset(&Preset::GaussianPair, gf(3), &b).is_ok());
    assert!(Preset::parse("sedenions", Q, None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn left_multiplication_is_bilinear(seed in any::<u64>(), k in 0usize..4) {
        let (f, preset) = presets().swap_remove([4, 6, 7, 8][k]);
        let alg = DivisionAlgebraSpec::preset(&preset, f, &Budget::default()).unwrap();
        let mut r = rng(seed);
        let n = alg.n();
        let x = Matrix::random(f, n, 1, &mut r, 5).to_vector();
        let y = Matrix::random(f, n, 1, &mut r, 5).to_vector();
        let z = Matrix::random(f, n, 1, &mut r, 5).to_vector();
        let sum: Vec<Scalar> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
        let lhs = alg.multiply(&x, &sum).unwrap();
        let rhs: Vec<Scalar> = alg.multiply(&x, &y).unwrap().iter().zip(alg.multiply(&x, &z).unwrap()).map(|(a, b)| a + &b).collect();
        prop_assert_eq!(lhs, rhs);
        let yv = Matrix::column(f, y.clone()).unwrap();
        prop_assert_eq!(alg.left_mult(&x).unwrap().mul(&yv).unwrap().to_vector(), alg.multiply(&x, &y).unwrap());
        prop_assert_eq!(alg.right_mult(&y).unwrap().mul(&Matrix::column(f, x.clone()).unwrap()).unwrap().to_vector(), alg.multiply(&x, &y).unwrap());
        if !x.iter().all(Scalar::is_zero) {
            prop_assert!(alg.left_mult(&x).unwrap().is_invertible());
        }
    }
}

#[test]
fn rational_verdicts_never_claim_division_without_proof() {
    let b = Budget::default().with_samples(50);
    // x^2 + 1 scaled: span{I, J} with a redundant-looking basis still certifies
    let j = Matrix::from_ints(Q, &[&[0, -1], &[1, 0]]);
    let v = MatrixSubspace::from_basis(Q, 2, &[Matrix::identity(Q, 2).add(&j).unwrap(), j.scale(&Q.int(3)).unwrap()]).unwrap();
    assert!(v.is_full_nonsingular(&b).unwrap().is_verified());
    // a subspace of symmetric matrices: det(sI + tS) with S = diag(1, -1) vanishes at s = t
    let s = Matrix::from_ints(Q, &[&[1, 0], &[0, -1]]);
    let w = MatrixSubspace::from_basis(Q, 2, &[Matrix::identity(Q, 2), s]).unwrap();
    assert!(matches!(w.is_full_nonsingular(&b).unwrap(), FullNonsingularVerdict::Refuted(_)));
}
