use freemon::graph::{
    enumerate_graphs, enumerate_leveled, enumerate_two_level, graft, Biarity, End, GraphShape,
    LeveledGraph, Variant, Vertex,
};

use std::collections::{BTreeSet, HashSet};

/// Smallest canonical code in the orbit under vertex port reorderings
/// (`ports`) and global leg relabelings (`legs`).
fn class_code(g: &GraphShape, ports: bool, legs: bool) -> Vec<u8> {
    let mut seen = HashSet::new();
    let mut stack = vec![g.canonicalize()];
    seen.insert(stack[0].encode());
    while let Some(h) = stack.pop() {
        let mut next = Vec::new();
        if ports {
            for (v, vb) in h.vertices().iter().enumerate() {
                for q in 0..vb.inputs.saturating_sub(1) {
                    next.push(h.twist_inputs(v, q));
                }
                for q in 0..vb.outputs.saturating_sub(1) {
                    next.push(h.twist_outputs(v, q));
                }
            }
        }
        if legs {
            let bi = h.biarity();
            for j in 0..bi.inputs.saturating_sub(1) {
                next.push(h.swap_input_legs(j));
            }
            for j in 0..bi.outputs.saturating_sub(1) {
                next.push(h.swap_output_legs(j));
            }
        }
        for x in next {
            let c = x.canonicalize();
            if seen.insert(c.encode()) {
                stack.push(c);
            }
        }
    }
    seen.into_iter().min().unwrap()
}

fn classes<'a>(gs: impl IntoIterator<Item = &'a GraphShape>, ports: bool, legs: bool) -> usize {
    gs.into_iter()
        .map(|g| class_code(g, ports, legs))
        .collect::<BTreeSet<_>>()
        .len()
}

fn b(m: usize, n: usize) -> Biarity {
    Biarity::new(m, n)
}

fn node(m: usize, n: usize) -> Vertex {
    Vertex::node(b(m, n))
}

fn port(vertex: usize, port: usize) -> End {
    End::Port { vertex, port }
}

fn corolla(m: usize, n: usize) -> GraphShape {
    GraphShape::new(
        b(m, n),
        vec![b(m, n)],
        vec![(0..n).map(End::Leg).collect()],
        (0..m).map(|p| port(0, p)).collect(),
    )
    .unwrap()
}

/// a = (1 out, 2 in) below b = (2 out, 1 in), joined by two parallel edges.
fn double_edge() -> GraphShape {
    GraphShape::new(
        b(1, 1),
        vec![b(2, 1), b(1, 2)],
        vec![vec![End::Leg(0)], vec![port(0, 0), port(0, 1)]],
        vec![port(1, 0)],
    )
    .unwrap()
}

#[test]
fn corolla_is_valid_everywhere() {
    let g = corolla(1, 2);
    for v in Variant::ALL {
        assert!(g.satisfies(v), "{v}");
    }
}

#[test]
fn parallel_edges_have_genus_one() {
    let g = double_edge();
    assert_eq!(g.genus(), 1);
    assert!(g.satisfies(Variant::Properad));
    assert!(!g.satisfies(Variant::Dioperad));
    assert!(!g.satisfies(Variant::HalfProp));
}

#[test]
fn directed_cycle_is_rejected() {
    let g = GraphShape::new(
        b(1, 1),
        vec![b(2, 2), b(1, 1)],
        vec![vec![End::Leg(0), port(1, 0)], vec![port(0, 1)]],
        vec![port(0, 0)],
    )
    .unwrap();
    assert!(!g.is_acyclic());
    for v in Variant::ALL {
        assert!(!g.satisfies(v));
    }
}

#[test]
fn bad_wiring_is_rejected() {
    let r = GraphShape::new(b(1, 1), vec![b(1, 1)], vec![vec![End::Leg(0)]], vec![End::Leg(0)]);
    assert!(r.is_err());
    assert!(LeveledGraph::new(vec![vec![node(0, 0)]], vec![vec![], vec![]]).is_err());
}

// Enumerators return graphs with ordered ports and labeled legs. Counts up to
// port reordering or up to leg relabeling come from the orbit oracle above.
#[test]
fn two_level_counts() {
    let one = |t, bo, bi, v| enumerate_two_level(&[t], &[bo], bi, v);
    assert_eq!(one(node(1, 1), node(1, 1), b(1, 1), Variant::Properad).len(), 1);
    assert_eq!(one(node(2, 1), node(1, 2), b(1, 1), Variant::Properad).len(), 0);
    let double = one(node(1, 2), node(2, 1), b(1, 1), Variant::Properad);
    // straight and crossed wiring of the two parallel edges
    assert_eq!(double.len(), 2);
    let shapes: Vec<GraphShape> = double.iter().map(|g| g.forget_levels()).collect();
    assert_eq!(classes(&shapes, true, false), 1);
    assert!(one(node(1, 2), node(2, 1), b(1, 1), Variant::Dioperad).is_empty());

    let grafts = enumerate_two_level(
        &[node(1, 2)],
        &[node(1, 2), Vertex::STRAND],
        b(1, 3),
        Variant::Properad,
    );
    // top port (2) times ordered leg pair into the lower vertex (6)
    assert_eq!(grafts.len(), 12);
    let shapes: Vec<GraphShape> = grafts.iter().map(|g| g.forget_levels()).collect();
    assert_eq!(classes(&shapes, false, true), 2);
    assert_eq!(classes(&shapes, true, false), 3);
}

#[test]
fn graph_counts() {
    let corollas = enumerate_graphs(1, &[b(1, 2)], b(1, 2), Variant::Properad);
    assert_eq!(corollas.len(), 2);
    assert_eq!(classes(&corollas, true, false), 1);
    let grafts = enumerate_graphs(2, &[b(1, 2)], b(1, 3), Variant::Properad);
    assert_eq!(grafts.len(), 12);
    assert_eq!(classes(&grafts, false, true), 2);
    let s = [b(1, 2), b(2, 1)];
    let two: Vec<GraphShape> = enumerate_graphs(2, &s, b(1, 1), Variant::Properad)
        .into_iter()
        .filter(|g| g.vertex_count() == 2)
        .collect();
    assert_eq!(classes(&two, true, false), 1);
    assert!(enumerate_graphs(2, &s, b(1, 1), Variant::Dioperad)
        .iter()
        .all(|g| g.vertex_count() == 0));
}

#[test]
fn half_prop_keeps_single_edge_shape() {
    let s = [b(1, 2), b(2, 1)];
    let all: Vec<_> = enumerate_graphs(2, &s, b(2, 2), Variant::Dioperad)
        .into_iter()
        .filter(|g| g.vertex_count() == 2)
        .collect();
    let half: Vec<_> = enumerate_graphs(2, &s, b(2, 2), Variant::HalfProp)
        .into_iter()
        .filter(|g| g.vertex_count() == 2)
        .collect();
    assert!(half.len() < all.len());
    for g in &half {
        assert_eq!(g.internal_edges(), 1);
        let (u, v) = g.edges().next().unwrap();
        assert_eq!(g.vertices()[u], b(1, 2));
        assert_eq!(g.vertices()[v], b(2, 1));
    }
}

#[test]
fn operad_enumeration_gives_trees() {
    for n in 1..=4 {
        for g in enumerate_graphs(3, &[b(1, 2)], b(1, n), Variant::Operad) {
            assert_eq!(g.genus(), 0);
            assert_eq!(g.biarity().outputs, 1);
        }
    }
}

#[test]
fn forgetting_levels() {
    let lone = LeveledGraph::new(
        vec![vec![node(1, 2)], vec![Vertex::STRAND]],
        vec![vec![0, 1], vec![0], vec![0]],
    )
    .unwrap();
    assert_eq!(lone.forget_levels().canonical_code(), corolla(1, 2).canonical_code());

    // v = (1,2) and w = (1,1) side by side, on alternate levels.
    let a = LeveledGraph::new(
        vec![
            vec![node(1, 2), Vertex::STRAND],
            vec![Vertex::STRAND, node(1, 1)],
            vec![node(1, 2)],
        ],
        vec![vec![0, 1, 2], vec![0, 1], vec![0, 1], vec![0]],
    )
    .unwrap();
    let c = LeveledGraph::new(
        vec![
            vec![Vertex::STRAND, Vertex::STRAND, node(1, 1)],
            vec![node(1, 2), Vertex::STRAND],
            vec![node(1, 2)],
        ],
        vec![vec![0, 1, 2], vec![0, 1, 2], vec![0, 1], vec![0]],
    )
    .unwrap();
    assert_ne!(a.canonical_code(), c.canonical_code());
    assert_eq!(a.forget_levels().canonical_code(), c.forget_levels().canonical_code());

    let chain = LeveledGraph::new(
        vec![vec![node(1, 1)], vec![node(1, 1)], vec![node(1, 1)]],
        vec![vec![0], vec![0], vec![0], vec![0]],
    )
    .unwrap();
    let g = chain.forget_levels();
    assert_eq!(g.vertex_count(), 3);
    assert_eq!(g.internal_edges(), 2);
}

#[test]
fn canonical_code_ignores_vertex_order() {
    let g = GraphShape::new(
        b(1, 3),
        vec![b(1, 2), b(1, 2)],
        vec![vec![End::Leg(0), port(1, 0)], vec![End::Leg(1), End::Leg(2)]],
        vec![port(0, 0)],
    )
    .unwrap();
    let h = g.permute_vertices(&[1, 0]);
    assert_ne!(g.encode(), h.encode());
    assert_eq!(g.canonical_code(), h.canonical_code());
    let grafts = enumerate_graphs(2, &[b(1, 2)], b(1, 3), Variant::Properad);
    let codes: BTreeSet<Vec<u8>> = grafts.iter().map(|g| g.canonical_code()).collect();
    assert_eq!(codes.len(), grafts.len());
}

#[test]
fn grafting() {
    // without a strand the lower level cannot carry the third leg
    assert!(enumerate_two_level(&[node(1, 2)], &[node(1, 2)], b(1, 3), Variant::Properad).is_empty());
    let pattern =
        enumerate_two_level(&[node(1, 2)], &[node(1, 2), Vertex::STRAND], b(1, 3), Variant::Properad);
    for p in &pattern {
        let slots: Vec<GraphShape> = p
            .flat_vertices()
            .iter()
            .map(|v| {
                if v.is_strand() {
                    GraphShape::identity()
                } else {
                    corolla(1, 2)
                }
            })
            .collect();
        let g = graft(p, &slots).unwrap();
        assert_eq!(g.canonical_code(), p.forget_levels().canonical_code());
    }
    // a two-vertex tree into a corolla slot gives a three-vertex tree
    let p = &pattern[0];
    let tree = enumerate_graphs(2, &[b(1, 2)], b(1, 3), Variant::Operad)
        .into_iter()
        .find(|g| g.vertex_count() == 2)
        .unwrap();
    let bigger = enumerate_graphs(3, &[b(1, 2)], b(1, 4), Variant::Operad);
    let slots: Vec<GraphShape> = p
        .flat_vertices()
        .iter()
        .map(|v| if v.is_strand() { GraphShape::identity() } else { corolla(1, 2) })
        .collect();
    let g = graft(p, &slots).unwrap();
    assert_eq!(g.vertex_count(), 2);
    let one_slot = LeveledGraph::corolla(b(1, 3));
    let t = graft(&one_slot, &[tree]).unwrap();
    assert_eq!(t.vertex_count(), 2);
    assert!(bigger.iter().any(|x| x.vertex_count() == 3));
    assert!(graft(&one_slot, &[corolla(1, 2)]).is_err());
}

#[test]
fn leveled_operad_and_strand_enumeration() {
    let gen = vec![node(1, 2), Vertex::STRAND];
    let two = enumerate_leveled(&[gen.clone(), gen.clone()], b(1, 3), 2, Variant::Operad);
    // (x above strand|x) with 2 input routings of the lower x, times 3 leg labelings each
    assert!(!two.is_empty());
    for g in &two {
        assert!(g.satisfies(Variant::Operad));
    }
    let id = enumerate_leveled(&[], b(1, 1), 0, Variant::Properad);
    assert_eq!(id.len(), 1);
}

mod shuffles {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    /// Every class with at most three vertices from (1,2) and (2,1) within (3,3).
    fn sample() -> &'static Vec<GraphShape> {
        static S: OnceLock<Vec<GraphShape>> = OnceLock::new();
        S.get_or_init(|| {
            let mut out = Vec::new();
            for m in 1..=3 {
                for n in 1..=3 {
                    out.extend(enumerate_graphs(3, &[b(1, 2), b(2, 1)], b(m, n), Variant::Properad));
                }
            }
            out.retain(|g| g.vertex_count() >= 2);
            out
        })
    }

    fn order(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn canonical_form_survives_vertex_shuffles(
            (i, perm) in (0..1000usize).prop_flat_map(|i| {
                let g = &sample()[i % sample().len()];
                (Just(i % sample().len()), order(g.vertex_count()))
            })
        ) {
            let g = &sample()[i];
            let h = g.permute_vertices(&perm);
            prop_assert_eq!(h.canonical_code(), g.canonical_code());
            prop_assert_eq!(h.canonicalize(), g.canonicalize());
            prop_assert_eq!(h.genus(), g.genus());
            prop_assert_eq!(h.biarity(), g.biarity());
        }
    }

    #[test]
    fn operad_classes_are_trees() {
        for n in 1..=4 {
            for g in enumerate_graphs(3, &[b(1, 2), b(1, 3)], b(1, n), Variant::Operad).into_iter().filter(|g| g.vertex_count() > 0) {
                assert_eq!(g.internal_edges() as isize - g.vertex_count() as isize + 1, 0);
                assert_eq!(g.genus(), 0);
                assert!(g.vertices().iter().all(|v| v.outputs == 1));
            }
        }
    }

    #[test]
    fn dioperad_classes_have_genus_zero() {
        let gs = sample();
        let dio: Vec<_> = gs.iter().filter(|g| g.satisfies(Variant::Dioperad)).collect();
        assert!(dio.iter().all(|g| g.genus() == 0));
        assert!(gs.iter().any(|g| g.genus() > 0));
    }
}
