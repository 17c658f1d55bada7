mod common;

use common::{gf, normalized, rng, Q};
use glpres::preserver::normalize_pair;
use glpres::{
    Budget, DivisionAlgebraSpec, FieldSpec, MatEndo, Matrix, MatrixSubspace, PreservationVerdict, Preset,
    PreserverClassification,
};
use proptest::prelude::*;
use rand::Rng;

fn field_of(code: u64) -> FieldSpec {
    if code == 0 {
        Q
    } else {
        gf(code)
    }
}

fn bound(f: FieldSpec) -> i64 {
    if f.is_finite() {
        0
    } else {
        5
    }
}

fn budget() -> Budget {
    Budget::default().with_samples(200)
}

#[test]
fn frobenius_maps_act_as_stated() {
    let mut r = rng(1);
    for f in [gf(5), Q] {
        for n in [2, 3] {
            let p = Matrix::random_invertible(f, n, &mut r, 5);
            let q = Matrix::random_invertible(f, n, &mut r, 5);
            let m = Matrix::random(f, n, n, &mut r, 5);
            assert_eq!(MatEndo::build_u(&p, &q).unwrap().apply(&m).unwrap(), p.mul(&m).unwrap().mul(&q).unwrap());
            assert_eq!(MatEndo::build_v(&p, &q).unwrap().apply(&m).unwrap(), p.mul(&m.transpose()).unwrap().mul(&q).unwrap());
        }
    }
}

#[test]
fn group_law_on_random_compositions() {
    let mut r = rng(2);
    for f in [gf(5), Q] {
        for n in [2, 3] {
            for _ in 0..50 {
                let [p1, q1, p2, q2] = [0; 4].map(|_| Matrix::random_invertible(f, n, &mut r, 4));
                let lhs = MatEndo::build_u(&p1, &q1).unwrap().compose(&MatEndo::build_u(&p2, &q2).unwrap()).unwrap();
                let rhs = MatEndo::build_u(&p1.mul(&p2).unwrap(), &q2.mul(&q1).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
            let t = MatEndo::build_v(&Matrix::identity(f, n), &Matrix::identity(f, n)).unwrap();
            assert_eq!(t.compose(&t).unwrap(), MatEndo::identity(f, n));
            assert_eq!(t, MatEndo::transpose_map(f, n));
        }
    }
}

fn check_frobenius_round_trip(f: FieldSpec, n: usize, seed: u64, twisted: bool) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let p = Matrix::random_invertible(f, n, &mut r, bound(f));
    let q = Matrix::random_invertible(f, n, &mut r, bound(f));
    let build = if twisted { MatEndo::build_v } else { MatEndo::build_u };
    let map = build(&p, &q).unwrap();
    let c = map.classify(&budget()).unwrap();
    let (ph, qh) = match (&c, twisted) {
        (PreserverClassification::FrobeniusDirect { p, q }, false) | (PreserverClassification::FrobeniusTwisted { p, q }, true) => (p, q),
        _ => return Err(TestCaseError::fail(format!("{c:?} for twisted = {twisted}"))),
    };
    prop_assert!(ph.first_nonzero().unwrap().1.is_one());
    prop_assert_eq!(&build(ph, qh).unwrap(), &map);
    prop_assert_eq!(c.reconstruct().unwrap().unwrap(), map);
    let (pn, qn) = normalize_pair(&p, &q).unwrap();
    prop_assert_eq!((&pn, &qn), (ph, qh));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_round_trip(seed in any::<u64>(), code in prop::sample::select(vec![2u64, 3, 5, 0]), n in 2usize..4, twisted in any::<bool>()) {
        check_frobenius_round_trip(field_of(code), n, seed, twisted)?;
    }

    #[test]
    fn scalar_invariance(seed in any::<u64>(), code in prop::sample::select(vec![3u64, 5, 7, 0]), n in 2usize..4) {
        let f = field_of(code);
        let mut r = rng(seed);
        let p = Matrix::random_invertible(f, n, &mut r, bound(f));
        let q = Matrix::random_invertible(f, n, &mut r, bound(f));
        let lambda = loop {
            let l = glpres::Scalar::random(f, &mut r, 9);
            if !l.is_zero() {
                break l;
            }
        };
        let scaled = MatEndo::build_u(&p.scale(&lambda).unwrap(), &q.scale(&lambda.inv().unwrap()).unwrap()).unwrap();
        prop_assert_eq!(&scaled, &MatEndo::build_u(&p, &q).unwrap());
        prop_assert_eq!(scaled.classify(&budget()).unwrap(), MatEndo::build_u(&p, &q).unwrap().classify(&budget()).unwrap());
    }

    #[test]
    fn pinch_kernel_law(seed in any::<u64>(), preset in 0usize..5, twisted in any::<bool>()) {
        let (f, v) = preset_subspace(preset);
        let mut r = rng(seed);
        let a = Matrix::random_invertible(f, v.n(), &mut r, 3);
        let x = random_nonzero(f, v.n(), &mut r);
        let map = MatEndo::build_pinch(&v, &a, &x, twisted).unwrap();
        let expected = if twisted { MatrixSubspace::make_lh(&x) } else { MatrixSubspace::make_ld(&x) }.unwrap();
        prop_assert_eq!(map.kernel().unwrap(), expected);
        prop_assert_eq!(map.image().unwrap(), v);
        prop_assert_eq!(map.rank(), map.n());
    }
}

/// The full non-singular subspaces behind the presets.
pub fn preset_subspace(k: usize) -> (FieldSpec, MatrixSubspace) {
    let b = Budget::default();
    let (f, preset) = match k {
        0 => (gf(2), Preset::parse("companion", gf(2), Some("x^2 + x + 1")).unwrap()),
        1 => (gf(3), Preset::parse("companion", gf(3), Some("x^2 + 1")).unwrap()),
        2 => (Q, Preset::parse("companion", Q, Some("x^3 - 2")).unwrap()),
        3 => (Q, Preset::GaussianPair),
        _ => (Q, Preset::HamiltonQuaternions),
    };
    (f, DivisionAlgebraSpec::preset(&preset, f, &b).unwrap().to_subspace().unwrap())
}

pub fn random_nonzero(f: FieldSpec, n: usize, r: &mut impl Rng) -> Matrix {
    loop {
        let x = Matrix::random(f, n, 1, r, 4);
        if !x.is_zero() {
            return x;
        }
    }
}

#[test]
fn pinch_round_trip_over_presets() {
    let mut r = rng(5);
    for k in 0..5 {
        let (f, v) = preset_subspace(k);
        let n = v.n();
        for trial in 0..20 {
            let twisted = trial % 2 == 1;
            let a = Matrix::random_invertible(f, n, &mut r, 3);
            let x = random_nonzero(f, n, &mut r);
            let map = MatEndo::build_pinch(&v, &a, &x, twisted).unwrap();
            let c = map.classify(&budget()).unwrap();
            let d = match (&c, twisted) {
                (PreserverClassification::PinchDirect(d), false) | (PreserverClassification::PinchTwisted(d), true) => d,
                _ => panic!("preset {k}: {c:?}"),
            };
            assert_eq!(d.x, normalized(&x));
            assert_eq!(d.v, v);
            assert!(d.vstatus.is_verified(), "preset {k}: {:?}", d.vstatus);
            assert_eq!(c.reconstruct().unwrap().unwrap(), map);
        }
    }
}

#[test]
fn non_preservers_carry_checked_witnesses() {
    let mut r = rng(6);
    let mut seen = 0;
    for _ in 0..200 {
        let f = gf(2);
        let op = Matrix::random(f, 4, 4, &mut r, 0);
        let map = MatEndo::new(f, 2, op).unwrap();
        let report = map.classify_report(&Budget::default()).unwrap();
        match (&report.classification, &report.preservation) {
            (PreserverClassification::NotPreserver { witness }, PreservationVerdict::Refuted(w)) => {
                assert_eq!(witness, w);
                assert!(witness.is_invertible());
                assert!(!map.apply(witness).unwrap().is_invertible());
                seen += 1;
            }
            (c, PreservationVerdict::ExhaustivePass(6)) => assert!(c.reconstruct().unwrap().unwrap() == map),
            other => panic!("{other:?}"),
        }
    }
    assert!(seen > 150);
}

#[test]
fn rational_maps_are_never_claimed_exhaustive() {
    let j = Matrix::from_ints(Q, &[&[0, -1], &[1, 0]]);
    let v = MatrixSubspace::from_basis(Q, 2, &[Matrix::identity(Q, 2), j]).unwrap();
    let map = MatEndo::build_pinch(&v, &Matrix::identity(Q, 2), &Matrix::basis_vector(Q, 2, 0), false).unwrap();
    let report = map.classify_report(&budget()).unwrap();
    assert!(matches!(report.preservation, PreservationVerdict::SampledPass(200)));
    // (a, c; b, d) -> (a, -b; b, a)
    let m = Matrix::from_ints(Q, &[&[2, 7], &[5, 9]]);
    assert_eq!(map.apply(&m).unwrap(), Matrix::from_ints(Q, &[&[2, -5], &[5, 2]]));
}

#[test]
fn singular_subspace_pinch_is_refuted() {
    // span{I, C} with x^2 - x splits: contains the singular idempotent C
    let f = Q;
    let c = Matrix::from_ints(f, &[&[1, 0], &[0, 0]]);
    let v = MatrixSubspace::from_basis(f, 2, &[Matrix::identity(f, 2), c]).unwrap();
    let map = MatEndo::build_pinch(&v, &Matrix::identity(f, 2), &Matrix::basis_vector(f, 2, 0), false).unwrap();
    match map.classify(&budget()).unwrap() {
        PreserverClassification::NotPreserver { witness } => {
            assert!(witness.is_invertible());
            assert!(!map.apply(&witness).unwrap().is_invertible());
        }
        other => panic!("{other:?}"),
    }
}
