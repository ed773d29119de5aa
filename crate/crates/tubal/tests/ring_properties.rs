//! Ring-level properties of the tube product across the whole catalog:
//! ring axioms, closure, the *-ring laws, weak inverses, the partial order,
//! and the canonical isomorphism.

mod common;

use common::{rel_diff, rng};
use num_complex::Complex64;
use proptest::prelude::*;
use tubal::linalg::CMatrix;
use tubal::{
    canonical_transform, catalog_specs, isomorphism_to_canonical, make_transform, random_tube,
    validate_transform, Tube, TransformKind, TransformSpec, DEFAULT_TOL,
};

const TOL: f64 = 1e-10;

fn check_ring_axioms(name: &str, spec: &TransformSpec, trials: usize) {
    let mut rng = rng(0xA0);
    let n = spec.n();
    let e = spec.unit();
    for _ in 0..trials {
        let a = random_tube(&mut rng, n);
        let b = random_tube(&mut rng, n);
        let c = random_tube(&mut rng, n);

        let ab = spec.star(&a, &b).unwrap();
        let ba = spec.star(&b, &a).unwrap();
        assert!(rel_diff(&ab, &ba) < TOL, "{name}: commutativity");

        let abc1 = spec.star(&ab, &c).unwrap();
        let abc2 = spec.star(&a, &spec.star(&b, &c).unwrap()).unwrap();
        assert!(rel_diff(&abc1, &abc2) < TOL, "{name}: associativity");

        let lhs = spec.star(&a, &b.add(&c)).unwrap();
        let rhs = spec.star(&a, &b).unwrap().add(&spec.star(&a, &c).unwrap());
        assert!(rel_diff(&lhs, &rhs) < TOL, "{name}: left distributivity");
        let lhs = spec.star(&a.add(&b), &c).unwrap();
        let rhs = spec.star(&a, &c).unwrap().add(&spec.star(&b, &c).unwrap());
        assert!(rel_diff(&lhs, &rhs) < TOL, "{name}: right distributivity");

        let ea = spec.star(&e, &a).unwrap();
        assert!(rel_diff(&ea, &a) < TOL, "{name}: unit law");
    }
}

#[test]
fn ring_axioms_across_catalog() {
    for (name, spec) in catalog_specs(8) {
        check_ring_axioms(&name, &spec, 20);
    }
}

#[test]
fn conjugation_is_a_star_ring_map() {
    let mut rng = rng(0xA1);
    for (name, spec) in catalog_specs(6) {
        let n = spec.n();
        let e = spec.unit();
        let ec = spec.conjugate(&e).unwrap();
        assert!(rel_diff(&ec, &e) < TOL, "{name}: unit self-conjugate");
        for _ in 0..20 {
            let a = random_tube(&mut rng, n);
            let b = random_tube(&mut rng, n);

            let sum_conj = spec.conjugate(&a.add(&b)).unwrap();
            let conj_sum = spec.conjugate(&a).unwrap().add(&spec.conjugate(&b).unwrap());
            assert!(rel_diff(&sum_conj, &conj_sum) < TOL, "{name}: additivity");

            let prod_conj = spec.conjugate(&spec.star(&a, &b).unwrap()).unwrap();
            let conj_prod = spec
                .star(&spec.conjugate(&b).unwrap(), &spec.conjugate(&a).unwrap())
                .unwrap();
            assert!(rel_diff(&prod_conj, &conj_prod) < TOL, "{name}: product rule");

            let twice = spec.conjugate(&spec.conjugate(&a).unwrap()).unwrap();
            assert!(rel_diff(&twice, &a) < TOL, "{name}: involution");
        }
    }
}

#[test]
fn real_like_rings_have_identity_conjugation() {
    let mut rng = rng(0xA2);
    for (name, spec) in catalog_specs(8) {
        if spec.realness() != spec.n() {
            continue;
        }
        for _ in 0..20 {
            let a = random_tube(&mut rng, spec.n());
            let ac = spec.conjugate(&a).unwrap();
            assert!(rel_diff(&ac, &a) < TOL, "{name}");
        }
    }
}

#[test]
fn weak_inverse_quadruple() {
    let mut rng = rng(0xA3);
    for (name, spec) in catalog_specs(6) {
        let n = spec.n();
        for _ in 0..25 {
            let a = random_tube(&mut rng, n);
            let w = spec.weak_inverse(&a);

            let awa = spec.star(&spec.star(&a, &w).unwrap(), &a).unwrap();
            assert!(rel_diff(&awa, &a) < TOL, "{name}: a w a = a");

            let waw = spec.star(&spec.star(&w, &a).unwrap(), &w).unwrap();
            assert!(rel_diff(&waw, &w) < TOL, "{name}: w a w = w");

            let aw = spec.star(&a, &w).unwrap();
            let aw_conj = spec.conjugate(&aw).unwrap();
            assert!(rel_diff(&aw_conj, &aw) < TOL, "{name}: (a w)* = a w");

            let wa = spec.star(&w, &a).unwrap();
            let wa_conj = spec.conjugate(&wa).unwrap();
            assert!(rel_diff(&wa_conj, &wa) < TOL, "{name}: (w a)* = w a");
        }
    }
}

#[test]
fn closure_fails_for_invalid_row_structure() {
    // rows complex but not conjugate to each other: rejected by validation,
    // and the raw product formula indeed leaves the reals
    let i = Complex64::new(0.0, 1.0);
    let m = CMatrix::from_rows(&[
        vec![Complex64::ONE, i],
        vec![Complex64::new(2.0, 0.0), i],
    ]);
    assert!(validate_transform(m.clone(), DEFAULT_TOL).is_err());

    let m_inv = m.inverse().unwrap();
    let mut rng = rng(0xA4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = random_tube(&mut rng, 2);
        let b = random_tube(&mut rng, 2);
        let to_c = |t: &Tube| -> Vec<Complex64> {
            t.as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect()
        };
        let ah = m.matvec(&to_c(&a));
        let bh = m.matvec(&to_c(&b));
        let prod: Vec<Complex64> = ah.iter().zip(&bh).map(|(x, y)| x * y).collect();
        let raw = m_inv.matvec(&prod);
        worst = worst.max(raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
    }
    assert!(worst > 1e-6, "raw product stayed real: {worst}");
}

#[test]
fn partial_order_antisymmetry_and_transitivity() {
    let mut rng = rng(0xA5);
    for (name, spec) in catalog_specs(5) {
        let n = spec.n();
        for _ in 0..40 {
            let a = random_tube(&mut rng, n);
            let b = random_tube(&mut rng, n);
            let c = random_tube(&mut rng, n);
            if spec.leq(&a, &b) && spec.leq(&b, &a) {
                let scale = 1.0 + a.max_abs().max(b.max_abs());
                assert!(a.max_abs_diff(&b) <= 1e-6 * scale, "{name}: antisymmetry");
            }
            if spec.leq(&a, &b) && spec.leq(&b, &c) {
                assert!(spec.leq(&a, &c), "{name}: transitivity");
            }
        }
        // construct a comparable pair: a <= a + d where the transform of d
        // is nonnegative; conjugate-paired entries must match for d to be
        // a real tube
        let mut nonneg = vec![Complex64::ZERO; n];
        for class in spec.row_classes() {
            match *class {
                tubal::RowClass::Real(j) => nonneg[j] = Complex64::new(0.5 + j as f64, 0.0),
                tubal::RowClass::ConjPair(j, k) => {
                    let v = Complex64::new(1.0 + j as f64, 0.0);
                    nonneg[j] = v;
                    nonneg[k] = v;
                }
            }
        }
        let d = spec.apply_inverse(&nonneg).unwrap();
        let a = random_tube(&mut rng, n);
        assert!(spec.leq(&a, &a.add(&d)), "{name}: constructed pair");
    }
}

#[test]
fn canonical_isomorphism_is_a_ring_homomorphism() {
    let mut rng = rng(0xA6);
    for (name, spec) in catalog_specs(6) {
        let n = spec.n();
        let target = canonical_transform(n, spec.realness()).unwrap();
        assert_eq!(spec.realness(), target.realness(), "{name}: realness preserved");
        let iso = isomorphism_to_canonical(&spec).unwrap();
        let map = |t: &Tube| Tube::new(iso.matvec(t.as_slice()));
        for _ in 0..25 {
            let a = random_tube(&mut rng, n);
            let b = random_tube(&mut rng, n);

            let lhs = map(&spec.star(&a, &b).unwrap());
            let rhs = target.star(&map(&a), &map(&b)).unwrap();
            assert!(rel_diff(&lhs, &rhs) < TOL, "{name}: product homomorphism");

            let lhs = map(&spec.conjugate(&a).unwrap());
            let rhs = target.conjugate(&map(&a)).unwrap();
            assert!(rel_diff(&lhs, &rhs) < TOL, "{name}: conjugation compatible");
        }
    }
}

/// A random valid transform: a few real rows plus conjugate pairs of random
/// complex rows, redrawn until invertible. This is the shape of user-supplied
/// `file:` transforms, beyond the well-conditioned catalog.
fn random_valid_transform(
    rng: &mut rand_chacha::ChaCha8Rng,
    realness: usize,
    n: usize,
) -> TransformSpec {
    use rand::Rng;
    assert_eq!((n - realness) % 2, 0);
    loop {
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for _ in 0..realness {
            rows.push((0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect());
        }
        while rows.len() < n {
            let row: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            rows.push(row.clone());
            rows.push(row.iter().map(|z| z.conj()).collect());
        }
        match validate_transform(CMatrix::from_rows(&rows), 1e-9) {
            Ok(spec) => return spec,
            Err(_) => continue, // singular draw; try again
        }
    }
}

#[test]
fn random_transforms_behave_like_the_catalog() {
    let mut rng = rng(0xA7);
    for (n, realness) in [(3usize, 1usize), (4, 2), (5, 3), (6, 0), (7, 1)] {
        let spec = random_valid_transform(&mut rng, realness, n);
        assert_eq!(spec.realness(), realness);
        check_ring_axioms("random", &spec, 10);

        // weak inverses and conjugation still behave
        let a = random_tube(&mut rng, n);
        let w = spec.weak_inverse(&a);
        let awa = spec.star(&spec.star(&a, &w).unwrap(), &a).unwrap();
        assert!(rel_diff(&awa, &a) < 1e-9, "n={n}");
        let back = spec.conjugate(&spec.conjugate(&a).unwrap()).unwrap();
        assert!(rel_diff(&back, &a) < 1e-9, "n={n}");

        // the canonical isomorphism works off-catalog too
        let iso = isomorphism_to_canonical(&spec).unwrap();
        let target = canonical_transform(n, realness).unwrap();
        let map = |t: &Tube| Tube::new(iso.matvec(t.as_slice()));
        let b = random_tube(&mut rng, n);
        let lhs = map(&spec.star(&a, &b).unwrap());
        let rhs = target.star(&map(&a), &map(&b)).unwrap();
        assert!(rel_diff(&lhs, &rhs) < 1e-8, "n={n}: homomorphism");

        // decomposition round trip under a generic (non-unitary) transform
        let t = tubal::random_tensor(&mut rng, 4, 3, n);
        let f = tubal::tsvd(&spec, &t).unwrap();
        let full = tubal::truncate_rank(&spec, &f, 3).unwrap();
        let rel = tubal::frobenius_norm(&full.sub(&t)) / tubal::frobenius_norm(&t);
        assert!(rel < 1e-9, "n={n}: reconstruction {rel}");
        assert!(
            tubal::tail_error_rank(&spec, &f, 1).is_err(),
            "generic transforms have no closed-form tail"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn star_closed_and_commutative_on_arbitrary_tubes(
        raw_a in prop::collection::vec(-100.0f64..100.0, 4),
        raw_b in prop::collection::vec(-100.0f64..100.0, 4),
    ) {
        let spec = make_transform(TransformKind::Dft, 4).unwrap();
        let a = Tube::new(raw_a);
        let b = Tube::new(raw_b);
        let ab = spec.star(&a, &b).unwrap(); // closure: result is real
        let ba = spec.star(&b, &a).unwrap();
        prop_assert!(rel_diff(&ab, &ba) < 1e-9);
    }

    #[test]
    fn leq_reflexive_on_arbitrary_tubes(
        raw in prop::collection::vec(-100.0f64..100.0, 5),
    ) {
        let spec = canonical_transform(5, 3).unwrap();
        let a = Tube::new(raw);
        prop_assert!(spec.leq(&a, &a));
    }
}
