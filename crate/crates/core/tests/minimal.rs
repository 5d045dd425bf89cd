use proptest::prelude::*;
use quivmod::exactmat::{Field, Matrix};
use quivmod::minimal::{
    embed_j, fingerprint, gk_action, invariants, normalize, GkElement, MinimalInvariants, MinimalPoint, MonadPoint,
};
use quivmod::sample::{random_gk, random_invertible, random_matrix, sample_minimal};
use quivmod::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_ints(&Field::Rational, rows)
}

#[test]
fn invariant_examples() {
    assert_eq!(
        invariants(2, 2, 1, 0).unwrap(),
        MinimalInvariants { c_m: 0, nonempty: true, k: [0, 2, 1, 1], moduli_dim: 2 }
    );
    for n in 1..4 {
        for r in 1..5 {
            let inv = invariants(n, r, 0, 0).unwrap();
            assert_eq!((inv.c_m, inv.k, inv.moduli_dim), (0, [0, 0, 0, r as i64], 0));
        }
    }
    let inv = invariants(3, 4, 2, -4).unwrap();
    assert_eq!(inv.c_m, -3);
    assert!(!inv.nonempty);
    assert!(matches!(invariants(2, 2, 2, 0), Err(Error::NormalizationError(_))));
}

/// At `c = C_m` the dimension formula collapses to `n a (r - a)`.
#[test]
fn minimal_dimension_matches_cotangent_grassmannians() {
    for n in 1..=6usize {
        for r in 2..=8usize {
            for a in 1..r {
                let c_m = invariants(n, r, a, 0).unwrap().c_m;
                let inv = invariants(n, r, a, c_m).unwrap();
                assert!(inv.nonempty);
                assert_eq!(inv.k[0], 0);
                assert_eq!(inv.moduli_dim, (n * a * (r - a)) as i64);
            }
        }
    }
}

#[test]
fn embed_j_examples() {
    let pt = MinimalPoint::new(2, 2, 1, vec![q(&[vec![5]])], Matrix::identity(&Field::Rational, 2)).unwrap();
    let mp = embed_j(&pt);
    assert_eq!(mp.xi, q(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![-1, 0], vec![0, 1]]));
    assert_eq!(mp.beta10, q(&[vec![1, 0]]));
    assert_eq!(mp.beta11, q(&[vec![0, 1]]));
    assert!(mp.beta2[..=2].iter().all(Matrix::is_zero));
    assert_eq!(mp.beta2[3], q(&[vec![5]]));
    assert!(mp.framing_product().is_zero());
    assert!(mp.check_membership());

    let theta = q(&[vec![2, 1], vec![1, 1]]);
    let pt = MinimalPoint::new(1, 2, 1, vec![], theta.clone()).unwrap();
    assert_eq!(embed_j(&pt).xi, theta.inverse().unwrap());
    let pt = MinimalPoint::new(3, 2, 0, vec![Matrix::zeros(&Field::Rational, 0, 2); 2], theta.clone()).unwrap();
    let mp = embed_j(&pt);
    assert_eq!(mp.beta10.shape(), (0, 0));
    assert_eq!(mp.xi, theta.inverse().unwrap());
}

#[test]
fn membership_failures() {
    let pt = MinimalPoint::new(2, 2, 1, vec![q(&[vec![5]])], Matrix::identity(&Field::Rational, 2)).unwrap();
    let mp = embed_j(&pt);
    let bumped = MonadPoint { xi: mp.xi.with_entry(0, 1, Field::Rational.from_i64(1)), ..mp.clone() };
    assert!(!bumped.framing_product().is_zero());
    assert!(!bumped.check_membership());
    assert!(matches!(normalize(&bumped), Err(Error::NotInPk(_))));

    let no_b10 = MonadPoint { beta10: Matrix::zeros(&Field::Rational, 1, 2), ..mp.clone() };
    assert!(!no_b10.build_phi().0.is_invertible());
    assert!(!no_b10.check_membership());

    let pt1 = MinimalPoint::new(1, 2, 1, vec![], Matrix::identity(&Field::Rational, 2)).unwrap();
    let singular = MonadPoint { xi: q(&[vec![1, 1], vec![1, 1]]), ..embed_j(&pt1) };
    assert!(!singular.check_membership());
}

#[test]
fn gk_action_examples() {
    let f = Field::Rational;
    let pt = MinimalPoint::new(3, 3, 1, vec![q(&[vec![1, 2]]), q(&[vec![0, -1]])], Matrix::identity(&f, 3)).unwrap();
    let mp = embed_j(&pt);
    assert_eq!(gk_action(&GkElement::identity(&f, 3, 3, 1), &mp).unwrap(), mp);

    let mut g = GkElement::identity(&f, 3, 3, 1);
    g.psi12[1] = Matrix::from_ints(&f, &[vec![1, 0], vec![0, 0], vec![2, -1]]);
    let moved = gk_action(&g, &mp).unwrap();
    assert_eq!((&moved.beta10, &moved.beta11), (&mp.beta10, &mp.beta11));
    assert_eq!(moved.beta2[4], mp.beta2[4]);
    assert_ne!(moved.beta2[..4], mp.beta2[..4]);
    assert_ne!(moved.xi, mp.xi);
    assert!(moved.check_membership());

    let mut bad = GkElement::identity(&f, 3, 3, 1);
    bad.chi = Matrix::zeros(&f, 2, 2);
    assert_eq!(gk_action(&bad, &mp).unwrap_err(), Error::SingularGroupElement);
    let mut bad = GkElement::identity(&f, 3, 3, 1);
    bad.psi12.pop();
    assert!(matches!(gk_action(&bad, &mp), Err(Error::GroupShapeError(_))));
}

#[test]
fn membership_is_invariant_under_gk() {
    let f = Field::Rational;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..500 {
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=3);
        let a = rng.gen_range(0..r);
        let mp = embed_j(&sample_minimal(&f, n, r, a, &mut rng).unwrap());
        let g = random_gk(&f, n, r, a, &mut rng);
        assert!(gk_action(&g, &mp).unwrap().check_membership());
    }
}

#[test]
fn normalize_fixes_j_images_and_recovers_scrambled_points() {
    let f = Field::Rational;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=4 {
        for r in 1..=4 {
            for a in 0..r {
                let pt = sample_minimal(&f, n, r, a, &mut rng).unwrap();
                let mp = embed_j(&pt);
                assert_eq!(normalize(&mp).unwrap(), pt);
                let g = random_gk(&f, n, r, a, &mut rng);
                let back = normalize(&gk_action(&g, &mp).unwrap()).unwrap();
                assert_eq!(fingerprint(&back), fingerprint(&pt), "n={n} r={r} a={a}");
            }
        }
    }
}

#[test]
fn normalize_over_a_prime_field() {
    let f = Field::prime(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let pt = sample_minimal(&f, 3, 3, 1, &mut rng).unwrap();
        let g = random_gk(&f, 3, 3, 1, &mut rng);
        let back = normalize(&gk_action(&g, &embed_j(&pt)).unwrap()).unwrap();
        assert_eq!(fingerprint(&back), fingerprint(&pt));
    }
}

#[test]
fn fingerprint_examples() {
    let f = Field::Rational;
    let b = vec![q(&[vec![4, -1]])];
    let pt = MinimalPoint::new(2, 3, 1, b.clone(), Matrix::identity(&f, 3)).unwrap();
    let fp = fingerprint(&pt);
    assert_eq!(fp.pivots, vec![0]);
    assert_eq!(fp.b, b);

    // Same column span, first column rescaled by 2: b is rescaled to compensate.
    let theta = q(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    let other = MinimalPoint::new(2, 3, 1, vec![q(&[vec![2, -1]])], theta).unwrap();
    assert_eq!(fingerprint(&other).b, vec![q(&[vec![4, -2]])]);

    let shifted = MinimalPoint::new(2, 3, 1, b.clone(), q(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]])).unwrap();
    assert_ne!(fingerprint(&shifted), fp);
    assert_eq!(fingerprint(&shifted).pivots, vec![1]);

    let pt0 = MinimalPoint::new(2, 2, 0, vec![Matrix::zeros(&f, 0, 2)], Matrix::identity(&f, 2)).unwrap();
    let fp0 = fingerprint(&pt0);
    assert!(fp0.pivots.is_empty() && fp0.b.is_empty());
}

#[test]
fn json_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pt = sample_minimal(&Field::Rational, 3, 4, 2, &mut rng).unwrap();
    assert_eq!(MinimalPoint::from_json(&pt.to_json()).unwrap(), pt);
    let mp = embed_j(&pt);
    assert_eq!(MonadPoint::from_json(&mp.to_json()).unwrap(), mp);
    let g = random_gk(&Field::Rational, 3, 4, 2, &mut rng);
    assert_eq!(GkElement::from_json(&g.to_json()).unwrap(), g);
}

fn random_parabolic(f: &Field, r: usize, a: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let top = Matrix::hstack(&[&random_invertible(f, a, rng), &random_matrix(f, a, r - a, rng)]).unwrap();
    let bottom = Matrix::hstack(&[&Matrix::zeros(f, r - a, a), &random_invertible(f, r - a, rng)]).unwrap();
    Matrix::vstack(&[&top, &bottom]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scrambled_orbits_keep_their_fingerprint(seed in 0u64..1_000_000, n in 2usize..5, r in 2usize..5) {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(1..r);
        let pt = sample_minimal(&f, n, r, a, &mut rng).unwrap();
        let mp = gk_action(&random_gk(&f, n, r, a, &mut rng), &embed_j(&pt)).unwrap();
        prop_assert!(mp.check_membership());
        prop_assert_eq!(fingerprint(&normalize(&mp).unwrap()), fingerprint(&pt));
    }

    #[test]
    fn fingerprint_is_parabolic_invariant(seed in 0u64..1_000_000, n in 1usize..4, r in 2usize..6) {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(1..r);
        let pt = sample_minimal(&f, n, r, a, &mut rng).unwrap();
        let g = random_parabolic(&f, r, a, &mut rng);
        prop_assert_eq!(fingerprint(&pt.parabolic_action(&g).unwrap()), fingerprint(&pt));
    }

    #[test]
    fn distinct_spans_give_distinct_fingerprints(seed in 0u64..1_000_000, r in 2usize..5) {
        let f = Field::Rational;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(1..r);
        let p1 = sample_minimal(&f, 2, r, a, &mut rng).unwrap();
        let p2 = sample_minimal(&f, 2, r, a, &mut rng).unwrap();
        let span = |p: &MinimalPoint| quivmod::exactmat::Subspace::column_span(&p.theta.submatrix(0, 0, r, a));
        if span(&p1) != span(&p2) {
            prop_assert_ne!(fingerprint(&p1), fingerprint(&p2));
        }
    }
}
