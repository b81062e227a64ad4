use super::leveled::{LeveledGraph, Vertex};
use super::shape::{End, GraphShape};
use super::{Biarity, Variant};
use crate::perm::enumerate_symmetric_group_bounded;
use std::collections::BTreeMap;

/// All connected leveled graphs with `allowed.len()` levels whose level-`l`
/// vertices are drawn from `allowed[l]`, with at most `max_nodes` non-strand
/// vertices, satisfying the variant. Canonical and sorted by encoding.
pub fn enumerate_leveled(
    allowed: &[Vec<Vertex>],
    biarity: Biarity,
    max_nodes: usize,
    variant: Variant,
) -> Vec<LeveledGraph> {
    let weighted: Vec<Vec<(Vertex, u32)>> = allowed
        .iter()
        .map(|lvl| lvl.iter().map(|v| (*v, u32::from(!v.is_strand()))).collect())
        .collect();
    enumerate_leveled_weighted(&weighted, biarity, max_nodes as u32, variant)
}

/// Like [`enumerate_leveled`], with a cost per vertex type and level and a
/// bound on the total cost. Zero-input vertex types must have positive cost.
pub fn enumerate_leveled_weighted(
    allowed: &[Vec<(Vertex, u32)>],
    biarity: Biarity,
    max_cost: u32,
    variant: Variant,
) -> Vec<LeveledGraph> {
    let mut found = BTreeMap::new();
    if allowed.is_empty() {
        if biarity == Biarity::UNIT {
            let g = LeveledGraph::identity();
            found.insert(g.encode(), g);
        }
        return found.into_values().collect();
    }
    let mut state = Builder {
        allowed,
        biarity,
        max_cost,
        variant,
        levels: Vec::new(),
        feeds: Vec::new(),
        found: &mut found,
    };
    state.level(biarity.inputs, 0);
    found.into_values().collect()
}

/// Two-level connected graphs with the given vertex multisets on the top and
/// bottom levels.
pub fn enumerate_two_level(
    top: &[Vertex],
    bottom: &[Vertex],
    biarity: Biarity,
    variant: Variant,
) -> Vec<LeveledGraph> {
    let sorted = |vs: &[Vertex]| {
        let mut v = vs.to_vec();
        v.sort();
        v
    };
    let kinds = |vs: &[Vertex]| {
        let mut k = sorted(vs);
        k.dedup();
        k
    };
    let allowed = vec![kinds(bottom), kinds(top)];
    let nodes = top.iter().chain(bottom).filter(|v| !v.is_strand()).count();
    let (want_top, want_bottom) = (sorted(top), sorted(bottom));
    enumerate_leveled(&allowed, biarity, nodes, variant)
        .into_iter()
        .filter(|g| sorted(g.level(0)) == want_bottom && sorted(g.level(1)) == want_top)
        .collect()
}

struct Builder<'a> {
    allowed: &'a [Vec<(Vertex, u32)>],
    biarity: Biarity,
    max_cost: u32,
    variant: Variant,
    levels: Vec<Vec<Vertex>>,
    feeds: Vec<Vec<usize>>,
    found: &'a mut BTreeMap<Vec<u8>, LeveledGraph>,
}

struct Partial {
    verts: Vec<Vertex>,
    filled: Vec<Vec<bool>>,
    feed: Vec<usize>,
}

impl Partial {
    fn port_index(&self, v: usize, p: usize) -> usize {
        self.verts[..v].iter().map(|x| x.biarity.inputs).sum::<usize>() + p
    }
}

impl Builder<'_> {
    fn level(&mut self, lower: usize, nodes: u32) {
        if self.levels.len() == self.allowed.len() {
            self.finish(lower);
            return;
        }
        let mut part = Partial {
            verts: Vec::new(),
            filled: Vec::new(),
            feed: vec![0; lower],
        };
        self.assign(0, nodes, &mut part);
    }

    /// Sends lower port `i` onwards to input ports of this level's vertices;
    /// vertices appear in the order their first port is reached.
    fn assign(&mut self, i: usize, nodes: u32, part: &mut Partial) {
        if i == part.feed.len() {
            if part.filled.iter().flatten().all(|x| *x) {
                let sources: Vec<(Vertex, u32)> = self.allowed[self.levels.len()]
                    .iter()
                    .copied()
                    .filter(|(t, c)| t.biarity.inputs == 0 && *c > 0)
                    .collect();
                let mut extra = Vec::new();
                self.add_sources(0, &sources, nodes, part, &mut extra);
            }
            return;
        }
        for v in 0..part.verts.len() {
            for p in 0..part.filled[v].len() {
                if !part.filled[v][p] {
                    part.filled[v][p] = true;
                    part.feed[i] = part.port_index(v, p);
                    self.assign(i + 1, nodes, part);
                    part.filled[v][p] = false;
                }
            }
        }
        let types = self.allowed[self.levels.len()].clone();
        for (t, cost) in types {
            if t.biarity.inputs == 0 {
                continue;
            }
            if nodes + cost > self.max_cost {
                continue;
            }
            part.verts.push(t);
            part.filled.push(vec![false; t.biarity.inputs]);
            let v = part.verts.len() - 1;
            for p in 0..t.biarity.inputs {
                part.filled[v][p] = true;
                part.feed[i] = part.port_index(v, p);
                self.assign(i + 1, nodes + cost, part);
                part.filled[v][p] = false;
            }
            part.verts.pop();
            part.filled.pop();
        }
    }

    /// Appends a multiset of zero-input vertices, then moves one level up.
    fn add_sources(
        &mut self,
        start: usize,
        sources: &[(Vertex, u32)],
        nodes: u32,
        part: &Partial,
        extra: &mut Vec<Vertex>,
    ) {
        if !part.verts.is_empty() || !extra.is_empty() {
            let mut lvl = part.verts.clone();
            lvl.extend(extra.iter().copied());
            let upper: usize = lvl.iter().map(|v| v.biarity.outputs).sum();
            self.levels.push(lvl);
            self.feeds.push(part.feed.clone());
            self.level(upper, nodes);
            self.levels.pop();
            self.feeds.pop();
        }
        for (j, &(t, cost)) in sources.iter().enumerate().skip(start) {
            if nodes + cost > self.max_cost {
                continue;
            }
            extra.push(t);
            self.add_sources(j, sources, nodes + cost, part, extra);
            extra.pop();
        }
    }

    fn finish(&mut self, top: usize) {
        let m = self.biarity.outputs;
        if top != m {
            return;
        }
        let perms = enumerate_symmetric_group_bounded(m, m).expect("bound equals degree");
        for p in perms {
            let mut feeds = self.feeds.clone();
            feeds.push(p.images().to_vec());
            let g = LeveledGraph::new_unchecked(self.levels.clone(), feeds);
            if g.satisfies(self.variant) {
                let c = g.canonicalize();
                self.found.entry(c.encode()).or_insert(c);
            }
        }
    }
}

/// Isomorphism classes of connected acyclic graphs (no levels) with at most
/// `max_vertices` vertices drawn from `support`, satisfying the variant.
/// The identity graph is included at biarity (1,1). Sorted by canonical code.
pub fn enumerate_graphs(
    max_vertices: usize,
    support: &[Biarity],
    biarity: Biarity,
    variant: Variant,
) -> Vec<GraphShape> {
    let mut support = support.to_vec();
    support.sort();
    support.dedup();
    let mut found = BTreeMap::new();
    if biarity == Biarity::UNIT {
        let g = GraphShape::identity();
        found.insert(g.encode(), g);
    }
    let mut multiset = Vec::new();
    multisets(&support, 0, max_vertices, &mut multiset, &mut |vs| {
        wire_all(vs, biarity, variant, &mut found);
    });
    found.into_values().collect()
}

fn multisets(
    support: &[Biarity],
    start: usize,
    left: usize,
    cur: &mut Vec<Biarity>,
    f: &mut dyn FnMut(&[Biarity]),
) {
    if !cur.is_empty() {
        f(cur);
    }
    if left == 0 {
        return;
    }
    for j in start..support.len() {
        cur.push(support[j]);
        multisets(support, j, left - 1, cur, f);
        cur.pop();
    }
}

struct Wiring<'a> {
    vs: &'a [Biarity],
    biarity: Biarity,
    variant: Variant,
    sources: Vec<End>,
    sinks: Vec<End>,
    used: Vec<bool>,
    chosen: Vec<End>,
    found: &'a mut BTreeMap<Vec<u8>, GraphShape>,
}

/// Tries every matching of sources (input legs, vertex outputs) to sinks
/// (vertex inputs, output legs).
fn wire_all(
    vs: &[Biarity],
    biarity: Biarity,
    variant: Variant,
    found: &mut BTreeMap<Vec<u8>, GraphShape>,
) {
    let outs: usize = vs.iter().map(|b| b.outputs).sum();
    let ins: usize = vs.iter().map(|b| b.inputs).sum();
    if outs + biarity.inputs != ins + biarity.outputs {
        return;
    }
    let mut sources: Vec<End> = (0..biarity.inputs).map(End::Leg).collect();
    let mut sinks: Vec<End> = Vec::new();
    for (v, b) in vs.iter().enumerate() {
        sources.extend((0..b.outputs).map(|port| End::Port { vertex: v, port }));
        sinks.extend((0..b.inputs).map(|port| End::Port { vertex: v, port }));
    }
    sinks.extend((0..biarity.outputs).map(End::Leg));
    let mut w = Wiring {
        vs,
        biarity,
        variant,
        used: vec![false; sources.len()],
        chosen: Vec::with_capacity(sinks.len()),
        sources,
        sinks,
        found,
    };
    w.extend();
}

impl Wiring<'_> {
    fn extend(&mut self) {
        let i = self.chosen.len();
        if i == self.sinks.len() {
            self.emit();
            return;
        }
        for s in 0..self.sources.len() {
            if self.used[s] {
                continue;
            }
            let ok = match (self.sources[s], self.sinks[i]) {
                (End::Port { vertex: a, .. }, End::Port { vertex: b, .. }) => a != b,
                (End::Leg(_), End::Leg(_)) => false,
                _ => true,
            };
            if !ok {
                continue;
            }
            self.used[s] = true;
            self.chosen.push(self.sources[s]);
            self.extend();
            self.chosen.pop();
            self.used[s] = false;
        }
    }

    fn emit(&mut self) {
        let mut in_src = Vec::with_capacity(self.vs.len());
        let mut k = 0;
        for b in self.vs {
            in_src.push(self.chosen[k..k + b.inputs].to_vec());
            k += b.inputs;
        }
        let leg_out = self.chosen[k..].to_vec();
        if let Ok(g) = GraphShape::new(self.biarity, self.vs.to_vec(), in_src, leg_out) {
            if g.satisfies(self.variant) {
                let c = g.canonicalize();
                self.found.entry(c.encode()).or_insert(c);
            }
        }
    }
}
