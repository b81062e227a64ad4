use freemon::graph::{Biarity, Truncation, Variant};
use freemon::product::{boxtimes, unit_bimodule, SBimodule};
use std::sync::Arc;

fn b(m: usize, n: usize) -> Biarity {
    Biarity::new(m, n)
}

fn gens(t: Truncation, list: &[(usize, usize)]) -> Arc<SBimodule> {
    let mut m = SBimodule::zero(t);
    for &(o, i) in list {
        m = m.with_trivial(b(o, i), 1).unwrap();
    }
    Arc::new(m)
}

#[test]
fn unit_dims() {
    let t = Truncation::new(3, 3, 2);
    let i = unit_bimodule(t);
    assert_eq!(i.dim(b(1, 1)), 1);
    assert_eq!(i.dim(b(2, 1)), 0);
    let i = Arc::new(i);
    let ii = boxtimes(&i, &i, Variant::Properad, t).unwrap();
    assert_eq!(ii.dims(), i.dims());
}

#[test]
fn unit_laws_on_dims() {
    let t = Truncation::new(3, 3, 2);
    let p = gens(t, &[(1, 2), (2, 1)]);
    let i = Arc::new(unit_bimodule(t));
    for v in Variant::ALL {
        let left = boxtimes(&i, &p, v, t).unwrap();
        let right = boxtimes(&p, &i, v, t).unwrap();
        for bi in t.biarities() {
            let want = if v.allows_biarity(bi) { p.dim(bi) } else { 0 };
            assert_eq!(left.dim(bi), want, "{v} {bi}");
            assert_eq!(right.dim(bi), want, "{v} {bi}");
        }
    }
}

#[test]
fn square_of_binary_generator() {
    let t = Truncation::new(4, 4, 3);
    let p = gens(t, &[(1, 2)]);
    // Without a (1,1) component the lower level cannot pass the third leg.
    assert_eq!(boxtimes(&p, &p, Variant::Properad, t).unwrap().dim(b(1, 3)), 0);
    // With the unit adjoined: x grafted on top of (x, strand), three choices
    // of the leg that bypasses the lower vertex.
    let i = Arc::new(unit_bimodule(t));
    let plus = Arc::new(i.direct_sum(&p).unwrap());
    assert_eq!(boxtimes(&plus, &plus, Variant::Properad, t).unwrap().dim(b(1, 3)), 3);
}

#[test]
fn parallel_edges_need_properad() {
    let t = Truncation::new(3, 3, 2);
    let q = gens(t, &[(2, 1)]);
    let p = gens(t, &[(1, 2)]);
    // Q on top: a (2,1) vertex above a (1,2) vertex cannot close up; the
    // double edge needs the (2,1) vertex below.
    assert_eq!(boxtimes(&p, &q, Variant::Properad, t).unwrap().dim(b(1, 1)), 1);
    assert_eq!(boxtimes(&p, &q, Variant::Dioperad, t).unwrap().dim(b(1, 1)), 0);
}

use freemon::graph::{LeveledGraph, Vertex};
use freemon::linalg::{int, BasedSpace, LinMap, Scalar, SparseVec};
use freemon::perm::{BimoduleComponent, Representation};
use freemon::product::{
    boxtimes_map, homogeneous_decomposition, lemmas, level_product, multilinear_part, SBimoduleMap,
};
use freemon::Error;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn plus(m: &Arc<SBimodule>) -> Arc<SBimodule> {
    Arc::new(unit_bimodule(m.truncation()).direct_sum(m).unwrap())
}

/// `count` weight-1 generators at (1,1), trivial actions.
fn unary(t: Truncation, count: usize) -> Arc<SBimodule> {
    Arc::new(SBimodule::zero(t).with_trivial(b(1, 1), count).unwrap())
}

fn matrix_map(m: &Arc<SBimodule>, rows: &[Vec<i64>]) -> SBimoduleMap {
    let s = m.space(b(1, 1));
    let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let mut maps = BTreeMap::new();
    maps.insert(b(1, 1), LinMap::from_rows(s.clone(), s, &rows).unwrap());
    SBimoduleMap::new(m.clone(), m.clone(), maps).unwrap()
}

#[test]
fn boxtimes_map_identities() {
    let t = Truncation::new(3, 3, 2);
    let p = plus(&gens(t, &[(1, 2), (2, 1)]));
    let id = SBimoduleMap::identity(p.clone());
    for v in Variant::ALL {
        let sq = boxtimes_map(&id, &id, v, t).unwrap();
        assert!(sq.same_matrices(&SBimoduleMap::identity(sq.domain().clone())), "{v}");
        let z = boxtimes_map(&SBimoduleMap::zero(p.clone(), p.clone()), &id, v, t).unwrap();
        assert!(z.is_zero(), "{v}");
    }
}

#[test]
fn ambient_truncation_is_enforced() {
    let t = Truncation::new(2, 2, 2);
    let m = SBimodule::zero(t).with_trivial(b(1, 3), 1);
    assert!(matches!(m, Err(Error::TruncationExceeded(_))));
    let big = gens(Truncation::new(3, 3, 2), &[(1, 3)]);
    assert!(matches!(boxtimes(&big, &big, Variant::Properad, t), Err(Error::TruncationExceeded(_))));
}

#[test]
fn associativity_of_dimension_tables() {
    let t = Truncation::new(3, 3, 3);
    let p = plus(&gens(t, &[(1, 2), (2, 1)]));
    for v in Variant::ALL {
        let pp = boxtimes(&p, &p, v, t).unwrap().bimodule;
        let left = boxtimes(&pp, &p, v, t).unwrap();
        let right = boxtimes(&p, &pp, v, t).unwrap();
        let three = level_product(vec![p.clone(), p.clone(), p.clone()], v, t).unwrap();
        for bi in t.biarities() {
            assert_eq!(left.dim(bi), right.dim(bi), "{v} {bi}");
            if v != Variant::HalfProp {
                // half-prop products are not the three-level graphs; only compare the bracketings
                assert_eq!(left.dim(bi), three.dim(bi), "{v} {bi}");
            }
        }
    }
}

#[test]
fn genus_one_square_only_for_properads() {
    let t = Truncation::new(3, 3, 2);
    let q = gens(t, &[(2, 1)]);
    let p = gens(t, &[(1, 2)]);
    assert_eq!(boxtimes(&q, &p, Variant::Properad, t).unwrap().dim(b(1, 1)), 0);
    // the splitting vertex below has two outputs and the merging one above two inputs
    assert_eq!(boxtimes(&p, &q, Variant::HalfProp, t).unwrap().dim(b(1, 1)), 0);
}

#[test]
fn twists_fix_classes() {
    let t = Truncation::new(3, 1, 2);
    let v = Arc::new(SBimodule::zero(t).with_regular(2).unwrap());
    let p = plus(&v);
    let sq = boxtimes(&p, &p, Variant::Operad, t).unwrap();
    let right = p.component(b(1, 2)).unwrap().right.generator(0).clone();
    let mut checked = 0;
    for bi in t.biarities() {
        for (g, deco) in sq.space.raw_elements(bi) {
            for (k, (_, _, vx)) in g.vertices().enumerate() {
                if vx.biarity != b(1, 2) {
                    continue;
                }
                let twisted = g.twist_inputs(k, 0);
                let moved = right.column(deco[k]).entries()[0].0;
                let mut d2 = deco.to_vec();
                d2[k] = moved;
                assert_eq!(
                    sq.space.project_graph(&twisted, deco).unwrap(),
                    sq.space.project_graph(g, &d2).unwrap()
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

#[test]
fn multilinear_examples() {
    let t = Truncation::new(3, 3, 2);
    let i = Arc::new(unit_bimodule(t));
    let x = gens(t, &[(1, 2)]);
    let zero = Arc::new(SBimodule::zero(t));
    let all = multilinear_part(&i, &x, &zero, &i, Variant::Properad, t).unwrap();
    for bi in t.biarities() {
        assert_eq!(all.dim(bi), all.ambient.dim(bi));
    }
    let none = multilinear_part(&i, &zero, &x, &i, Variant::Properad, t).unwrap();
    assert!(t.biarities().into_iter().all(|bi| none.dim(bi) == 0));
    let one = multilinear_part(&i, &x, &x, &i, Variant::Properad, t).unwrap();
    assert_eq!(one.dim(b(1, 2)), 1);
    assert_eq!(one.ambient.dim(b(1, 2)), 2);
}

#[test]
fn homogeneous_examples() {
    let t = Truncation::new(3, 3, 2);
    let i = Arc::new(unit_bimodule(t));
    let zero = Arc::new(SBimodule::zero(t));
    let h = homogeneous_decomposition(&i, &i, &zero, Variant::Properad, t).unwrap();
    assert!(h.pieces.keys().all(|&n| n == 0));

    // B = I ⊕ X, A = I ⊕ X, middle X: the weight-2 tree at (1,3) needs exactly one middle vertex
    let x = gens(t, &[(1, 2)]);
    let px = plus(&x);
    let h = homogeneous_decomposition(&px, &px, &x, Variant::Properad, t).unwrap();
    assert_eq!(h.dim(1, b(1, 3)), h.total.dim(b(1, 3)));
    assert_eq!(h.dim(2, b(1, 3)), 0);
    let h = homogeneous_decomposition(&i, &i, &x, Variant::Properad, t).unwrap();
    assert_eq!(h.dim(1, b(1, 2)), 1);
}

#[test]
fn boxtimes_map_not_surjective_for_non_epi() {
    // negative control for the epimorphism suite: a rank-deficient map stays deficient
    let t = Truncation::new(1, 1, 2);
    let u = plus(&unary(t, 2));
    let f = matrix_map(&u, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 0]]);
    let ff = boxtimes_map(&f, &f, Variant::Properad, t).unwrap();
    assert!(!ff.is_surjective());
    let g = matrix_map(&u, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]);
    assert!(boxtimes_map(&g, &g, Variant::Properad, t).unwrap().is_surjective());
}

#[test]
fn lemma_suites_pass() {
    for o in lemmas::all(11, 10).unwrap() {
        assert!(o.passed(), "{} {:?}", o.name, o.failures);
        assert_eq!(o.instances, 10);
    }
}

/// Coefficient of `(q', p')` in `(f ⊠ g)(q, p)` on stacked unary vertices is `f[q'][q] g[p'][p]`.
fn check_kronecker(f_rows: &[Vec<i64>], g_rows: &[Vec<i64>]) -> std::result::Result<(), TestCaseError> {
    let t = Truncation::new(1, 1, 2);
    let u = unary(t, 2);
    let f = matrix_map(&u, f_rows);
    let g = matrix_map(&u, g_rows);
    let fg = boxtimes_map(&f, &g, Variant::Properad, t).unwrap();
    let sq = boxtimes(&u, &u, Variant::Properad, t).unwrap();
    let chain = LeveledGraph::new(
        vec![vec![Vertex::node(b(1, 1))], vec![Vertex::node(b(1, 1))]],
        vec![vec![0], vec![0], vec![0]],
    )
    .unwrap();
    for p in 0..2 {
        for q in 0..2 {
            let col = fg.apply(b(1, 1), &sq.space.project_graph(&chain, &[p, q]).unwrap());
            let mut expect = SparseVec::new();
            for p2 in 0..2 {
                for q2 in 0..2 {
                    let c = int(f_rows[q2][q] * g_rows[p2][p]);
                    expect = expect.add_scaled(&c, &sq.space.project_graph(&chain, &[p2, q2]).unwrap());
                }
            }
            prop_assert_eq!(col, expect);
        }
    }
    Ok(())
}

fn square(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn boxtimes_map_is_kronecker(f in square(2), g in square(2)) {
        check_kronecker(&f, &g)?;
    }

    #[test]
    fn boxtimes_map_is_functorial(f in square(3), g in square(3), h in square(3), k in square(3)) {
        let t = Truncation::new(1, 1, 2);
        let u = plus(&unary(t, 2));
        let (f, g, h, k) = (matrix_map(&u, &f), matrix_map(&u, &g), matrix_map(&u, &h), matrix_map(&u, &k));
        let v = Variant::Properad;
        let lhs = boxtimes_map(&f, &g, v, t).unwrap().compose(&boxtimes_map(&h, &k, v, t).unwrap()).unwrap();
        let rhs = boxtimes_map(&f.compose(&h).unwrap(), &g.compose(&k).unwrap(), v, t).unwrap();
        prop_assert!(lhs.same_matrices(&rhs));
    }

    #[test]
    fn lemma_suites_on_random_seeds(seed in 0u64..10_000) {
        for o in lemmas::all(seed, 2).unwrap() {
            prop_assert!(o.passed(), "{} {:?}", o.name, o.failures);
        }
    }
}

#[test]
fn sign_component_is_valid() {
    let s = BasedSpace::indexed(1);
    let sign = Representation::new(2, s.clone(), vec![LinMap::identity(&s).scale(&int(-1))]).unwrap();
    let c = BimoduleComponent { biarity: b(1, 2), space: s.clone(), left: Representation::trivial(1, &s), right: sign };
    let mut m = SBimodule::zero(Truncation::new(4, 1, 3));
    m.insert(c, vec![1]).unwrap();
    let m = Arc::new(m);
    // antisymmetric binary: x(x(a,b),c) classes at (1,3) survive the twists
    let sq = boxtimes(&m, &plus(&m), Variant::Operad, m.truncation()).unwrap();
    assert_eq!(sq.dim(b(1, 3)), 3);
}
