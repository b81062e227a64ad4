use freemon::free::{tau, AugmentedObject, LevelPower, TildeQuotient};
use freemon::graph::{Biarity, Truncation, Variant};
use freemon::product::SBimodule;
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

fn tilde(aug: &AugmentedObject, n: usize, v: Variant) -> TildeQuotient {
    let p = LevelPower::new(aug, n, v, 0).unwrap();
    TildeQuotient::new(aug, p).unwrap()
}

#[test]
fn level_two_at_binary() {
    let t = Truncation::new(4, 4, 3);
    let aug = AugmentedObject::new(gens(t, &[(1, 2)])).unwrap();
    let q = tilde(&aug, 2, Variant::Properad);
    assert_eq!(q.power.dim(b(1, 2)), 2);
    assert_eq!(q.relations(b(1, 2)).unwrap().dim(), 1);
    assert_eq!(q.dim(b(1, 2)), 1);
    let t2 = tau(&aug, &q.power).unwrap();
    assert_eq!(t2.rank(b(1, 2)), 1);
    assert_eq!(t2.image_of(b(1, 2), 0).nnz(), 2);
}

#[test]
fn low_levels_have_no_relations() {
    let t = Truncation::new(3, 3, 2);
    let aug = AugmentedObject::new(gens(t, &[(1, 2), (2, 1)])).unwrap();
    for n in 0..2 {
        let q = tilde(&aug, n, Variant::Properad);
        for bb in t.biarities() {
            assert_eq!(q.dim(bb), q.power.dim(bb));
        }
    }
    let q1 = tilde(&aug, 1, Variant::Properad);
    assert_eq!(q1.bimodule().dims(), aug.plus.dims());
}


use freemon::free::{
    archive, associative, compare_constructions, counit, evaluate, forget_map, free_extension, free_map,
    is_monoid_morphism, verify_monoid, DirectFree, FreeMonoid, Monoid, MonoidPresentation,
};
use freemon::graph::LeveledGraph;
use freemon::linalg::{int, BasedSpace, Echelon, LinMap, SparseVec};
use freemon::perm::{BimoduleComponent, Representation};
use freemon::product::{unit_bimodule, SBimoduleMap};
use freemon::Error;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn free(t: Truncation, list: &[(usize, usize)], v: Variant) -> FreeMonoid {
    FreeMonoid::new(&gens(t, list), v).unwrap()
}

fn row(f: &FreeMonoid, max: usize) -> Vec<usize> {
    (1..=max).map(|n| f.dim(b(1, n))).collect()
}

fn is_identity(m: &SBimoduleMap) -> bool {
    m.same_matrices(&SBimoduleMap::identity(m.domain().clone()))
}

#[test]
fn tilde_pieces_stabilize_from_level_w() {
    let t = Truncation::new(4, 1, 3);
    let aug = AugmentedObject::new(gens(t, &[(1, 2)])).unwrap();
    let qs: Vec<_> = (0..=4).map(|n| tilde(&aug, n, Variant::Operad)).collect();
    // weight-w part at (1, w+1): the free operad count, reached at n = w and then constant
    let expect = [1, 1, 3, 15];
    for w in 0..=3u32 {
        let bi = b(1, w as usize + 1);
        for n in w as usize..=4 {
            assert_eq!(qs[n].weight_part(bi, w).len(), expect[w as usize], "n={n} w={w}");
        }
    }
}

#[test]
fn eta_tilde_independent_of_insertion_point() {
    let t = Truncation::new(3, 3, 2);
    let aug = AugmentedObject::new(gens(t, &[(1, 2), (2, 1)])).unwrap();
    for n in 1..=2 {
        let (q, next) = (tilde(&aug, n, Variant::Properad), tilde(&aug, n + 1, Variant::Properad));
        let first = q.eta_tilde(0, &next).unwrap();
        for i in 1..=n {
            assert!(q.eta_tilde(i, &next).unwrap().same_matrices(&first), "n={n} i={i}");
        }
    }
}

#[test]
fn tau_rank() {
    let t = Truncation::new(3, 3, 2);
    let zero = AugmentedObject::new(Arc::new(SBimodule::zero(t))).unwrap();
    let p = LevelPower::new(&zero, 2, Variant::Properad, 0).unwrap();
    assert!(tau(&zero, &p).unwrap().is_zero());

    let aug = AugmentedObject::new(gens(t, &[(1, 2), (2, 1), (2, 2)])).unwrap();
    let p = LevelPower::new(&aug, 2, Variant::Properad, 0).unwrap();
    let tv = tau(&aug, &p).unwrap();
    let total: usize = aug.base.support().map(|bi| tv.rank(bi)).sum();
    assert_eq!(total, 3);
}

#[test]
fn free_on_zero_is_unit() {
    let t = Truncation::default();
    let f = FreeMonoid::new(&SBimodule::zero(t), Variant::Properad).unwrap();
    assert_eq!(f.bimodule().dims(), unit_bimodule(t).dims());
    assert!(verify_monoid(&f).unwrap().passed());
}

#[test]
fn free_operad_on_binary_generator() {
    let f = free(Truncation::new(4, 1, 3), &[(1, 2)], Variant::Operad);
    assert_eq!(row(&f, 4), vec![1, 1, 3, 15]);
    assert_eq!(f.dim_weight(b(1, 1), 0), 1);
    assert_eq!(f.dim_weight(b(1, 2), 1), 1);
    assert!(f.stability_report().iter().all(|s| s.is_isomorphism()));
}

#[test]
fn free_operad_on_regular_generator() {
    let v = SBimodule::zero(Truncation::new(4, 1, 3)).with_regular(2).unwrap();
    let f = FreeMonoid::new(&v, Variant::Operad).unwrap();
    assert_eq!(row(&f, 4), vec![1, 2, 12, 120]);
}

#[test]
fn genus_one_class_by_variant() {
    let t = Truncation::new(3, 3, 2);
    let expect = [
        (Variant::Properad, 1, 5),
        (Variant::Dioperad, 0, 5),
        (Variant::HalfProp, 0, 1),
    ];
    for (v, at11, at22) in expect {
        let f = free(t, &[(1, 2), (2, 1)], v);
        assert_eq!(f.dim_weight(b(1, 1), 2), at11, "{v}");
        assert_eq!(f.dim_weight(b(2, 2), 2), at22, "{v}");
    }
}

#[test]
fn half_prop_keeps_only_merge_then_split() {
    // at (2,2) weight 2: the cobinary above the binary survives, the four
    // binary-above-cobinary composites join two multi-port vertices and do not
    let t = Truncation::new(2, 2, 2);
    let di = free(t, &[(1, 2), (2, 1)], Variant::Dioperad);
    let half = free(t, &[(1, 2), (2, 1)], Variant::HalfProp);
    assert_eq!(di.dim_weight(b(2, 2), 2), 5);
    assert_eq!(half.dim_weight(b(2, 2), 2), 1);
    assert_eq!(half.dim_weight(b(1, 1), 2), 0);
}

#[test]
fn weight_one_is_generators() {
    let t = Truncation::new(3, 3, 2);
    let v = gens(t, &[(1, 2), (2, 1), (2, 2)]);
    let f = FreeMonoid::new(&v, Variant::Properad).unwrap();
    let u = f.unit_map().unwrap();
    for bi in v.support() {
        assert_eq!(f.dim_weight(bi, 1), v.dim(bi));
        assert_eq!(u.rank(bi), v.dim(bi));
    }
    assert!(u.is_injective());
    assert!(f.epsilon().unwrap().compose(&u).unwrap().is_zero());
    let eps_eta = f.epsilon().unwrap().compose(&f.eta().unwrap()).unwrap();
    assert!(is_identity(&eps_eta));
}

#[test]
fn operad_rejects_multiple_outputs() {
    let t = Truncation::new(3, 3, 2);
    assert!(matches!(
        FreeMonoid::new(&gens(t, &[(2, 1)]), Variant::Operad),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn monoid_axioms_for_fixtures() {
    let cases = [
        (Truncation::new(4, 1, 3), vec![(1, 2)], Variant::Operad),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::Properad),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::Dioperad),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::HalfProp),
    ];
    for (t, g, v) in cases {
        let f = free(t, &g, v);
        let r = verify_monoid(&f).unwrap();
        assert!(r.passed(), "{v} {r:?}");
        assert!(r.checked > 0);
        let d = DirectFree::new(&gens(t, &g), v).unwrap();
        assert!(verify_monoid(&d).unwrap().passed(), "{v} direct");
    }
}

#[test]
fn mu_is_weight_graded() {
    let f = free(Truncation::new(3, 3, 2), &[(1, 2), (2, 1)], Variant::Properad);
    let sq = f.square().unwrap();
    let mu = f.mu().unwrap();
    for bi in f.bimodule().truncation().biarities() {
        for e in 0..sq.dim(bi) {
            let (g, d) = sq.space.representative(bi, e);
            let w: u32 = g.vertices().zip(d).map(|((_, _, v), &x)| f.locate(v.biarity, x).0).sum();
            for (k, _) in mu.image_of(bi, e).entries() {
                assert_eq!(f.locate(bi, *k).0, w);
            }
        }
    }
}

#[test]
fn augmentation_is_a_morphism() {
    let t = Truncation::new(3, 3, 2);
    let f = free(t, &[(1, 2), (2, 1)], Variant::Properad);
    let i = unit_monoid(t);
    let eps = f.epsilon().unwrap();
    assert!(is_monoid_morphism(&eps, &f, &i).unwrap());
    for bi in t.biarities() {
        let positive = (0..f.dim(bi)).filter(|&k| f.locate(bi, k).0 > 0).count();
        assert_eq!(f.dim(bi) - eps.rank(bi), positive);
    }
}

fn unit_monoid(t: Truncation) -> MonoidPresentation {
    MonoidPresentation::from_graph_fn(Arc::new(unit_bimodule(t)), Variant::Properad, SparseVec::unit(0), |_, _| {
        Ok(SparseVec::unit(0))
    })
    .unwrap()
}

#[test]
fn weight_one_generates() {
    let cases = [
        (Truncation::new(4, 1, 3), vec![(1, 2)], Variant::Operad),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::Properad),
    ];
    for (t, g, v) in cases {
        let f = free(t, &g, v);
        let sq = f.square().unwrap();
        let mu = f.mu().unwrap();
        for bi in t.biarities() {
            for w in 2..=t.max_weight {
                let target: Vec<usize> = (0..f.dim(bi)).filter(|&k| f.locate(bi, k).0 == w).collect();
                if target.is_empty() {
                    continue;
                }
                let images: Vec<SparseVec> = (0..sq.dim(bi))
                    .filter(|&e| {
                        let (g, d) = sq.space.representative(bi, e);
                        g.vertices().zip(d).all(|((_, _, vx), &x)| f.locate(vx.biarity, x).0 < w)
                    })
                    .map(|e| mu.image_of(bi, e))
                    .collect();
                let span = Echelon::from_vectors(f.dim(bi), &images);
                assert!(target.iter().all(|&k| span.contains(&SparseVec::unit(k))), "{v} {bi} w={w}");
            }
        }
    }
}

#[test]
fn associative_monoids() {
    let t = Truncation::new(4, 1, 3);
    for regular in [false, true] {
        let m = associative(t, regular).unwrap();
        assert!(verify_monoid(&m).unwrap().passed(), "regular={regular}");
        let dims: Vec<usize> = (1..=4).map(|n| m.bimodule().dim(b(1, n))).collect();
        assert_eq!(dims, if regular { vec![1, 2, 6, 24] } else { vec![1, 1, 1, 1] });
    }
    let bad = associative(t, false).unwrap().corrupted(b(1, 3), &int(2)).unwrap();
    let r = verify_monoid(&bad).unwrap();
    assert_eq!(r.first_failure(), Some(("associativity", b(1, 3))));
    assert!(matches!(bad.verified(), Err(Error::NotAMonoid(_))));
}

#[test]
fn counit_collapses_onto_unit_monoid() {
    let t = Truncation::new(2, 2, 2);
    let i = unit_monoid(t);
    let fi = FreeMonoid::new(i.bimodule(), Variant::Properad).unwrap();
    let c = counit(&fi, &i).unwrap();
    for k in 0..fi.dim(b(1, 1)) {
        assert_eq!(c.image_of(b(1, 1), k), SparseVec::unit(0));
    }
    assert!(is_monoid_morphism(&c, &fi, &i).unwrap());
}

#[test]
fn counit_on_trees() {
    let t = Truncation::new(4, 1, 3);
    let m = associative(t, false).unwrap();
    let fm = FreeMonoid::new(m.bimodule(), Variant::Operad).unwrap();
    let c = counit(&fm, &m).unwrap();
    // every basis element at (1,3) evaluates to the one element there
    for k in 0..fm.dim(b(1, 3)) {
        assert_eq!(c.image_of(b(1, 3), k), SparseVec::unit(0));
    }
}

#[test]
fn evaluation_ignores_leveling() {
    let t = Truncation::new(3, 1, 2);
    let m = associative(t, true).unwrap();
    let sq = m.square().unwrap();
    for bi in t.biarities() {
        for e in 0..sq.dim(bi) {
            let (g, d) = sq.space.representative(bi, e);
            let direct = evaluate(&m, g, d).unwrap();
            for pos in 0..=g.num_levels() {
                let (g2, range) = g.insert_unit_level(pos);
                let mut d2 = d[..range.start].to_vec();
                d2.extend(std::iter::repeat(0).take(range.len()));
                d2.extend_from_slice(&d[range.start..]);
                assert_eq!(evaluate(&m, &g2, &d2).unwrap(), direct, "{bi} {e} at {pos}");
            }
        }
    }
}

#[test]
fn triangle_identities() {
    let t = Truncation::new(3, 1, 2);
    let fv = free(t, &[(1, 2)], Variant::Operad);
    let ffv = FreeMonoid::new(fv.bimodule(), Variant::Operad).unwrap();
    let fu = free_map(&fv, &fv.unit_map().unwrap(), &ffv).unwrap();
    let c = counit(&ffv, &fv).unwrap();
    assert!(is_identity(&c.compose(&fu).unwrap()));

    for regular in [false, true] {
        let m = associative(t, regular).unwrap();
        let fm = FreeMonoid::new(m.bimodule(), Variant::Operad).unwrap();
        let cm = counit(&fm, &m).unwrap();
        assert!(is_identity(&cm.compose(&fm.unit_map().unwrap()).unwrap()), "regular={regular}");
        assert!(is_monoid_morphism(&cm, &fm, &m).unwrap());
    }
}

#[test]
fn binary_extends_to_associative() {
    let t = Truncation::new(4, 1, 3);
    let fv = free(t, &[(1, 2)], Variant::Operad);
    let m = associative(t, false).unwrap();
    let f = SBimoduleMap::from_fn(fv.generators().clone(), m.bimodule().clone(), |_, _| Ok(SparseVec::unit(0))).unwrap();
    let ext = free_extension(&fv, &f, &m).unwrap();
    assert!(ext.compose(&fv.unit_map().unwrap()).unwrap().same_matrices(&f));
    assert!(is_monoid_morphism(&ext, &fv, &m).unwrap());
    let rows = ext.at(b(1, 3)).to_rows();
    assert_eq!(rows, vec![vec![int(1), int(1), int(1)]]);
    let zero = free_extension(&fv, &SBimoduleMap::zero(f.domain().clone(), f.codomain().clone()), &m).unwrap();
    for bi in t.biarities() {
        for k in 0..fv.dim(bi) {
            let expect = if fv.locate(bi, k).0 == 0 { SparseVec::unit(0) } else { SparseVec::new() };
            assert_eq!(zero.image_of(bi, k), expect);
        }
    }
}

#[test]
fn extension_checks_equivariance() {
    let t = Truncation::new(3, 1, 2);
    let fv = free(t, &[(1, 2)], Variant::Operad);
    let m = associative(t, true).unwrap();
    let f = SBimoduleMap::from_fn(fv.generators().clone(), m.bimodule().clone(), |_, _| Ok(SparseVec::unit(0))).unwrap();
    assert!(matches!(free_extension(&fv, &f, &m), Err(Error::NotEquivariant(_))));
}

/// `V` = regular `S_2` generator at (1,2) plus a trivial one at (1,3).
fn mixed_generators(t: Truncation) -> Arc<SBimodule> {
    Arc::new(SBimodule::zero(t).with_regular(2).unwrap().with_trivial(b(1, 3), 1).unwrap())
}

/// Equivariant `V → Assoc_reg`: `a + b·s` on the regular part, `c·Σσ` on the trivial one.
fn random_map(v: &Arc<SBimodule>, m: &MonoidPresentation, a: i64, bb: i64, c: i64) -> SBimoduleMap {
    let reg = m.bimodule().space(b(1, 2));
    let swap = v.component(b(1, 2)).unwrap().right.generator(0).clone();
    let mut maps = BTreeMap::new();
    let id = LinMap::identity(&reg);
    maps.insert(b(1, 2), id.scale(&int(a)).add(&swap.scale(&int(bb))).unwrap());
    let s3 = m.bimodule().space(b(1, 3));
    let all = SparseVec::from_dense(&vec![int(c); s3.dim()]);
    maps.insert(b(1, 3), LinMap::from_columns(v.space(b(1, 3)), s3, vec![all]).unwrap());
    SBimoduleMap::new(v.clone(), m.bimodule().clone(), maps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn free_extension_restricts_to_f(a in -3i64..=3, bb in -3i64..=3, c in -3i64..=3) {
        let t = Truncation::new(3, 1, 2);
        let v = mixed_generators(t);
        let m = associative(t, true).unwrap();
        let fv = FreeMonoid::new(&v, Variant::Operad).unwrap();
        let f = random_map(&v, &m, a, bb, c);
        f.check_equivariant().unwrap();
        let ext = free_extension(&fv, &f, &m).unwrap();
        prop_assert!(ext.compose(&fv.unit_map().unwrap()).unwrap().same_matrices(&f));
        prop_assert!(is_monoid_morphism(&ext, &fv, &m).unwrap());
    }
}

#[test]
fn constructions_agree() {
    let cases: Vec<(Truncation, Vec<(usize, usize)>, Variant, bool)> = vec![
        (Truncation::new(4, 1, 3), vec![(1, 2)], Variant::Operad, false),
        (Truncation::new(4, 1, 3), vec![], Variant::Operad, true),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::Properad, false),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::Dioperad, false),
        (Truncation::new(3, 3, 2), vec![(1, 2), (2, 1)], Variant::HalfProp, false),
    ];
    for (t, g, v, regular) in cases {
        let gm = if regular { SBimodule::zero(t).with_regular(2).unwrap() } else { (*gens(t, &g)).clone() };
        let f = FreeMonoid::new(&gm, v).unwrap();
        let d = DirectFree::new(&gm, v).unwrap();
        let r = compare_constructions(&f, &d).unwrap();
        assert!(r.passed(), "{v} {:?}", r.rows.iter().find(|x| !x.matches()));
        assert!(r.intertwines);
        assert!(r.map.is_injective() && r.map.is_surjective());
        let phi = forget_map(&f, &d).unwrap();
        assert!(phi.same_matrices(&r.map));
    }
}

#[test]
fn basis_listings() {
    let t = Truncation::new(4, 1, 3);
    let f = free(t, &[(1, 2)], Variant::Operad);
    let d = DirectFree::new(&gens(t, &[(1, 2)]), Variant::Operad).unwrap();
    for (bi, w, n) in [(b(1, 1), 0, 1), (b(1, 2), 1, 1), (b(1, 3), 2, 3), (b(1, 4), 3, 15)] {
        let ld = archive::basis_lines_direct(&d, bi, w);
        let lc = archive::basis_lines_colimit(&f, bi, w);
        assert_eq!(ld.len(), n);
        assert_eq!(lc.len(), n);
        let mut sorted = ld.clone();
        sorted.sort();
        assert_eq!(sorted, ld);
    }
    assert_eq!(archive::basis_lines_direct(&d, b(1, 1), 0), vec!["0101000000 -".to_string()]);
}

#[test]
fn archive_files() {
    let f = free(Truncation::new(3, 1, 2), &[(1, 2)], Variant::Operad);
    assert_eq!(archive::dims_csv(&f), "m,n,weight,dim\n1,1,0,1\n1,2,1,1\n1,3,2,3\n");
    let reg = archive::basis_registry(&f);
    assert!(reg.starts_with("GFM1\n"));
    assert_eq!(reg.lines().count(), 1 + 5);
    let dir = std::env::temp_dir().join(format!("freemon-archive-{}", std::process::id()));
    archive::write_archive(&f, &dir).unwrap();
    let mu = std::fs::read_to_string(dir.join("mu/1_3.txt")).unwrap();
    let mut lines = mu.lines();
    let (rows, cols) = lines.next().unwrap().split_once(' ').unwrap();
    assert_eq!(rows, "3");
    assert_eq!(lines.count(), 3);
    assert!(cols.parse::<usize>().unwrap() >= 3);
    assert!(mu.contains("1/1"));
    let _ = std::fs::remove_dir_all(dir);

    let id = LinMap::identity(&BasedSpace::indexed(2));
    assert_eq!(archive::matrix_text(&id), "2 2\n1/1 0/1\n0/1 1/1\n");
}

#[test]
fn sign_generator_components() {
    // an antisymmetric binary generator: the free operad has the same dimensions
    let t = Truncation::new(4, 1, 3);
    let s = BasedSpace::indexed(1);
    let sign = Representation::new(2, s.clone(), vec![LinMap::identity(&s).scale(&int(-1))]).unwrap();
    let mut v = SBimodule::zero(t);
    v.insert(BimoduleComponent { biarity: b(1, 2), space: s.clone(), left: Representation::trivial(1, &s), right: sign }, vec![1])
        .unwrap();
    let f = FreeMonoid::new(&v, Variant::Operad).unwrap();
    assert_eq!(row(&f, 4), vec![1, 1, 3, 15]);
    let d = DirectFree::new(&v, Variant::Operad).unwrap();
    assert!(compare_constructions(&f, &d).unwrap().passed());
    assert!(verify_monoid(&f).unwrap().passed());
}

#[test]
fn unit_representatives() {
    let f = free(Truncation::new(3, 1, 2), &[(1, 2)], Variant::Operad);
    let (g, d) = f.representative(b(1, 1), 0);
    assert_eq!(g.num_levels(), 0);
    assert!(d.is_empty());
    assert_eq!(f.class(&LeveledGraph::identity(), &[]).unwrap(), SparseVec::unit(0));
    assert_eq!(Monoid::unit(&f), SparseVec::unit(0));
}
