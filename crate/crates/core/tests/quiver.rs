use std::collections::{BTreeMap, HashMap};

use num::{BigRational, Zero};
use proptest::prelude::*;
use quivmod::adhm_p2::{p2_quiver, AdhmP2};
use quivmod::exactmat::{Field, Matrix};
use quivmod::quiver::{moment_relations, nakajima_dim, roots_and_regularity, Arrow, DeriveKind, GaussRat, Quiver, Relation};
use quivmod::repstab::{check_relations, Representation};
use quivmod::Error;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn labels(q: &Quiver) -> Vec<String> {
    q.arrows().iter().map(|a| a.label.clone()).collect()
}

fn map(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn derived_quiver_examples() {
    let jf = Quiver::jordan().framed();
    assert_eq!(jf.vertices().len(), 2);
    assert_eq!(labels(&jf), vec!["B", "d_0"]);

    let a1 = Quiver::a_type(1);
    assert_eq!(a1.double(), a1);

    let fd = a1.framed().double();
    assert_eq!(fd.vertices(), &["0".to_string(), "0'".to_string()]);
    assert_eq!(labels(&fd), vec!["d_0", "d_0*"]);

    assert_eq!(labels(&p2_quiver()), vec!["B", "d_0", "B*", "d_0*"]);
}

#[test]
fn unknown_vertices_are_rejected() {
    let q = Quiver::jordan();
    let bad = DeriveKind::Gf { p: map(&[("7", 1)]), q: BTreeMap::new() };
    assert!(matches!(q.derive(&bad), Err(Error::VertexError(_))));
    let bad = DeriveKind::Gf { p: map(&[("0", 0)]), q: BTreeMap::new() };
    assert!(matches!(q.derive(&bad), Err(Error::VertexError(_))));
    assert!(matches!(q.crawley_boevey(&map(&[("x", 1)])), Err(Error::VertexError(_))));
}

#[test]
fn gf_and_cb_arrow_counts() {
    let a2 = Quiver::a_type(2);
    let p = map(&[("0", 2), ("1", 1)]);
    let qq = map(&[("0", 1), ("1", 3)]);
    let gf = a2.gf(&p, &qq).unwrap();
    let w = map(&[("0'", 2), ("1'", 1)]);
    let cb = gf.crawley_boevey(&w).unwrap();
    for (v, wv, pv, qv) in [("0", 2, 2, 1), ("1", 1, 1, 3)] {
        let to_inf = cb.arrows().iter().filter(|a| a.src == v && a.tgt == "inf").count();
        let from_inf = cb.arrows().iter().filter(|a| a.src == "inf" && a.tgt == v).count();
        assert_eq!(to_inf, wv * pv, "arrows {v} -> inf");
        assert_eq!(from_inf, wv * qv, "arrows inf -> {v}");
    }
    let direct = a2.derive(&DeriveKind::Cb { w: map(&[("0", 2), ("1", 1)]), p, q: qq }).unwrap();
    assert_eq!(direct, cb);
}

#[test]
fn cartan_examples() {
    assert_eq!(Quiver::jordan().cartan_matrix(), vec![vec![0]]);
    assert_eq!(Quiver::a_type(1).cartan_matrix(), vec![vec![2]]);
    assert_eq!(Quiver::a_type(2).cartan_matrix(), vec![vec![2, -1], vec![-1, 2]]);
}

#[test]
fn roots_examples() {
    let a1 = Quiver::a_type(1);
    let (roots, regular) = roots_and_regularity(&a1, &[3], &[GaussRat::zero()], &[rat(1)]).unwrap();
    assert_eq!(roots, vec![vec![1]]);
    assert!(regular);
    let (roots, regular) = roots_and_regularity(&Quiver::jordan(), &[2], &[GaussRat::zero()], &[rat(0)]).unwrap();
    assert_eq!(roots, vec![vec![1], vec![2]]);
    assert!(!regular);
}

#[test]
fn dimension_examples() {
    for c in 0..6 {
        for r in 1..6 {
            assert_eq!(nakajima_dim(&Quiver::jordan(), &[c], &[r]).unwrap(), 2 * (r * c) as i64);
            assert_eq!(nakajima_dim(&Quiver::a_type(1), &[c], &[r]).unwrap(), 2 * c as i64 * (r as i64 - c as i64));
        }
    }
    assert_eq!(nakajima_dim(&Quiver::a_type(3), &[0, 0, 0], &[1, 2, 0]).unwrap(), 0);
    assert_eq!(nakajima_dim(&Quiver::jordan(), &[2], &[0]), Err(Error::WZero));
}

#[test]
fn moment_relation_examples() {
    let rels = moment_relations(&Quiver::a_type(1), &[]).unwrap();
    assert_eq!(rels.len(), 1);
    assert_eq!(rels[0].terms, vec![(rat(1), vec!["d_0*".to_string(), "d_0".to_string()])]);

    let rels = moment_relations(&Quiver::a_type(2), &[rat(2), rat(-1)]).unwrap();
    assert_eq!(rels.len(), 2);
    assert!(rels[0].terms.contains(&(rat(-1), vec!["x0*".into(), "x0".into()])));
    assert!(rels[0].terms.contains(&(rat(-2), vec![])));
    assert!(rels[1].terms.contains(&(rat(1), vec!["x0".into(), "x0*".into()])));
    assert!(rels[1].terms.contains(&(rat(1), vec![])));
    let fd = Quiver::a_type(2).framed().double();
    for r in &rels {
        r.validate(&fd).unwrap();
    }
}

/// The Jordan moment relation evaluates to `[B1, B2] + i j`.
#[test]
fn jordan_moment_relation_is_the_adhm_equation() {
    let f = Field::Rational;
    let rels = moment_relations(&Quiver::jordan(), &[]).unwrap();
    let b1 = Matrix::from_ints(&f, &[vec![0, 1], vec![0, 0]]);
    let b2 = Matrix::from_ints(&f, &[vec![1, 2], vec![3, -1]]);
    let i = Matrix::from_ints(&f, &[vec![1], vec![2]]);
    let j = Matrix::from_ints(&f, &[vec![0, 5]]);
    let d = AdhmP2::new(1, 2, b1, b2, i, j).unwrap();
    let res = check_relations(&d.to_representation(), &rels).unwrap();
    assert_eq!(res, vec![d.moment_residual()]);
}

#[test]
fn json_round_trips() {
    let q = Quiver::a_type(3).framed().double();
    assert_eq!(Quiver::from_json(&q.to_json()).unwrap(), q);
    for r in moment_relations(&Quiver::a_type(3), &[rat(1), rat(0), rat(-3)]).unwrap() {
        assert_eq!(Relation::from_json(&r.to_json()).unwrap(), r);
    }
    assert_eq!(Quiver::from_json(&serde_json::json!("jordan")).unwrap(), Quiver::jordan());
}

#[test]
fn zero_relations_vanish_on_zero_representation() {
    let q = Quiver::a_type(3);
    let fd = q.framed().double();
    let dims: HashMap<String, usize> = fd.vertices().iter().map(|v| (v.clone(), 2)).collect();
    let rep = Representation::from_named(fd, Field::Rational, &dims, &HashMap::new()).unwrap();
    let res = check_relations(&rep, &moment_relations(&q, &[]).unwrap()).unwrap();
    assert!(res.iter().all(Matrix::is_zero));
}

fn random_quiver() -> impl Strategy<Value = Quiver> {
    (1usize..5).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..7).prop_map(move |edges| {
            let vertices = (0..n).map(|i| i.to_string()).collect();
            let arrows = edges
                .iter()
                .enumerate()
                .map(|(k, (s, t))| Arrow::new(&format!("x{k}"), &s.to_string(), &t.to_string()))
                .collect();
            Quiver::new(vertices, arrows).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cartan_is_symmetric_with_loop_diagonal(q in random_quiver()) {
        let c = q.cartan_matrix();
        for (i, v) in q.vertices().iter().enumerate() {
            let loops = q.arrows().iter().filter(|a| &a.src == v && &a.tgt == v).count() as i64;
            prop_assert_eq!(c[i][i], 2 - 2 * loops);
            for j in 0..c.len() {
                prop_assert_eq!(c[i][j], c[j][i]);
            }
        }
    }

    #[test]
    fn double_doubles_arrows(q in random_quiver()) {
        prop_assert_eq!(q.double().arrows().len(), 2 * q.arrows().len());
        prop_assert_eq!(q.double().cartan_matrix(), {
            // Doubling doubles every off-diagonal adjacency count.
            let c = q.cartan_matrix();
            c.iter().map(|row| row.iter().map(|x| 2 * x).collect::<Vec<_>>()).enumerate()
                .map(|(i, mut row)| { row[i] -= 2; row }).collect::<Vec<_>>()
        });
    }

    #[test]
    fn nakajima_dim_is_permutation_invariant(
        q in random_quiver(),
        seed in prop::collection::vec(0usize..4, 8),
        shift in 0usize..24,
    ) {
        let n = q.vertices().len();
        let v: Vec<usize> = seed[..n].to_vec();
        let mut w: Vec<usize> = seed[4..4 + n].to_vec();
        w[0] += 1;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(shift % n);
        let verts: Vec<String> = perm.iter().map(|&i| q.vertices()[i].clone()).collect();
        let pq = Quiver::new(verts, q.arrows().to_vec()).unwrap();
        let pv: Vec<usize> = perm.iter().map(|&i| v[i]).collect();
        let pw: Vec<usize> = perm.iter().map(|&i| w[i]).collect();
        prop_assert_eq!(nakajima_dim(&q, &v, &w).unwrap(), nakajima_dim(&pq, &pv, &pw).unwrap());
    }

    #[test]
    fn moment_relations_validate(q in random_quiver()) {
        let lambda: Vec<BigRational> = (0..q.vertices().len()).map(|i| rat(i as i64 - 1)).collect();
        let fd = q.framed().double();
        for r in moment_relations(&q, &lambda).unwrap() {
            prop_assert!(r.validate(&fd).is_ok());
            prop_assert!(r.terms.iter().all(|(c, _)| !c.is_zero()));
        }
    }
}
