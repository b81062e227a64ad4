use super::canon::{push_u8, Discovery};
use super::shape::{End, GraphShape};
use super::Biarity;
use crate::error::{Error, Result};
use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    /// Identity pass-through strand; always biarity (1,1).
    Strand,
    Node,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub kind: VertexKind,
    pub biarity: Biarity,
}

impl Vertex {
    pub const STRAND: Vertex = Vertex {
        kind: VertexKind::Strand,
        biarity: Biarity::UNIT,
    };

    pub fn node(biarity: Biarity) -> Vertex {
        Vertex {
            kind: VertexKind::Node,
            biarity,
        }
    }

    pub fn is_strand(&self) -> bool {
        self.kind == VertexKind::Strand
    }
}

/// A graph drawn on `k` levels, every edge joining consecutive levels.
///
/// `feeds[b]` is the bijection at boundary `b` (for `0 <= b <= k`) from lower
/// ports to upper ports. Boundary 0 takes global input legs to level-0 input
/// ports; boundary `k` takes top-level output ports to global output legs.
/// Ports of a level are numbered vertex by vertex, then port by port.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LeveledGraph {
    levels: Vec<Vec<Vertex>>,
    feeds: Vec<Vec<usize>>,
}

/// A connected piece of a level range, with its legs expressed as parent ports.
#[derive(Clone, Debug)]
pub struct Component {
    pub graph: LeveledGraph,
    /// Parent flat vertex index of each component vertex, in component order.
    pub vertices: Vec<usize>,
    /// Parent input ports (at the range's bottom level) of the component's input legs.
    pub in_ports: Vec<usize>,
    /// Parent output ports (at the range's top level) of the component's output legs.
    pub out_ports: Vec<usize>,
    /// Level offset of the parent range.
    pub first_level: usize,
}

fn offsets(counts: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    let mut out = vec![0];
    for c in counts {
        acc += c;
        out.push(acc);
    }
    out
}

fn is_bijection(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&i| i < v.len() && !std::mem::replace(&mut seen[i], true))
}

fn invert(v: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; v.len()];
    for (i, &j) in v.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

impl LeveledGraph {
    pub fn new(levels: Vec<Vec<Vertex>>, feeds: Vec<Vec<usize>>) -> Result<Self> {
        let g = LeveledGraph { levels, feeds };
        g.check_wiring()?;
        Ok(g)
    }

    pub(crate) fn new_unchecked(levels: Vec<Vec<Vertex>>, feeds: Vec<Vec<usize>>) -> Self {
        LeveledGraph { levels, feeds }
    }

    /// The 0-level identity strand: one input leg wired to one output leg.
    pub fn identity() -> Self {
        LeveledGraph {
            levels: Vec::new(),
            feeds: vec![vec![0]],
        }
    }

    /// A single node with legs in port order.
    pub fn corolla(b: Biarity) -> Self {
        LeveledGraph {
            levels: vec![vec![Vertex::node(b)]],
            feeds: vec![(0..b.inputs).collect(), (0..b.outputs).collect()],
        }
    }

    fn check_wiring(&self) -> Result<()> {
        let k = self.levels.len();
        if self.feeds.len() != k + 1 {
            return Err(Error::InvalidGraph(format!(
                "{} boundaries for {k} levels",
                self.feeds.len()
            )));
        }
        for v in self.levels.iter().flatten() {
            if v.is_strand() && v.biarity != Biarity::UNIT {
                return Err(Error::InvalidGraph("strand with biarity other than (1,1)".into()));
            }
            if v.biarity == Biarity::new(0, 0) {
                return Err(Error::InvalidGraph("vertex of biarity (0,0)".into()));
            }
        }
        for b in 0..=k {
            if !is_bijection(&self.feeds[b]) {
                return Err(Error::InvalidGraph(format!("boundary {b} is not a bijection")));
            }
            if b > 0 && self.feeds[b].len() != self.level_outputs(b - 1) {
                return Err(Error::InvalidGraph(format!(
                    "boundary {b} has {} lower ports, level {} has {} outputs",
                    self.feeds[b].len(),
                    b - 1,
                    self.level_outputs(b - 1)
                )));
            }
            if b < k && self.feeds[b].len() != self.level_inputs(b) {
                return Err(Error::InvalidGraph(format!(
                    "boundary {b} has {} upper ports, level {b} has {} inputs",
                    self.feeds[b].len(),
                    self.level_inputs(b)
                )));
            }
        }
        Ok(())
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<Vertex>] {
        &self.levels
    }

    pub fn level(&self, l: usize) -> &[Vertex] {
        &self.levels[l]
    }

    pub fn feeds(&self) -> &[Vec<usize>] {
        &self.feeds
    }

    pub fn biarity(&self) -> Biarity {
        Biarity::new(self.feeds[self.levels.len()].len(), self.feeds[0].len())
    }

    pub fn level_inputs(&self, l: usize) -> usize {
        self.levels[l].iter().map(|v| v.biarity.inputs).sum()
    }

    pub fn level_outputs(&self, l: usize) -> usize {
        self.levels[l].iter().map(|v| v.biarity.outputs).sum()
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn node_count(&self) -> usize {
        self.vertices().filter(|(_, _, v)| !v.is_strand()).count()
    }

    /// `(level, index in level, vertex)` in flat (level-major) order.
    pub fn vertices(&self) -> impl Iterator<Item = (usize, usize, &Vertex)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(l, vs)| vs.iter().enumerate().map(move |(i, v)| (l, i, v)))
    }

    pub fn flat_vertices(&self) -> Vec<Vertex> {
        self.levels.iter().flatten().copied().collect()
    }

    pub(crate) fn level_start(&self) -> Vec<usize> {
        offsets(self.levels.iter().map(Vec::len))
    }

    pub(crate) fn in_offsets(&self, l: usize) -> Vec<usize> {
        offsets(self.levels[l].iter().map(|v| v.biarity.inputs))
    }

    pub(crate) fn out_offsets(&self, l: usize) -> Vec<usize> {
        offsets(self.levels[l].iter().map(|v| v.biarity.outputs))
    }

    fn owner(offsets: &[usize], port: usize) -> (usize, usize) {
        // offsets is nondecreasing; owner is the last vertex whose offset <= port
        // among vertices with nonzero arity.
        let v = offsets.partition_point(|&o| o <= port) - 1;
        (v, port - offsets[v])
    }

    /// Neighbouring vertex (flat index) across each port, `None` for legs.
    fn adjacency(&self) -> Vec<(Vec<Option<usize>>, Vec<Option<usize>>)> {
        let k = self.levels.len();
        let starts = self.level_start();
        let inv: Vec<Vec<usize>> = self.feeds.iter().map(|f| invert(f)).collect();
        let mut adj = Vec::with_capacity(self.vertex_count());
        for l in 0..k {
            let ino = self.in_offsets(l);
            let outo = self.out_offsets(l);
            let below = if l > 0 { Some(self.out_offsets(l - 1)) } else { None };
            let above = if l + 1 < k { Some(self.in_offsets(l + 1)) } else { None };
            for (i, v) in self.levels[l].iter().enumerate() {
                let ins = (0..v.biarity.inputs)
                    .map(|q| {
                        let lower = inv[l][ino[i] + q];
                        below
                            .as_ref()
                            .map(|bo| starts[l - 1] + Self::owner(bo, lower).0)
                    })
                    .collect();
                let outs = (0..v.biarity.outputs)
                    .map(|q| {
                        let upper = self.feeds[l + 1][outo[i] + q];
                        above
                            .as_ref()
                            .map(|ai| starts[l + 1] + Self::owner(ai, upper).0)
                    })
                    .collect();
                adj.push((ins, outs));
            }
        }
        adj
    }

    /// Flat vertex attached to each input leg and output leg.
    fn leg_vertices(&self) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let k = self.levels.len();
        if k == 0 {
            return (vec![None; self.feeds[0].len()], vec![None; self.feeds[0].len()]);
        }
        let starts = self.level_start();
        let ino = self.in_offsets(0);
        let ins = self.feeds[0]
            .iter()
            .map(|&p| Some(starts[0] + Self::owner(&ino, p).0))
            .collect();
        let outo = self.out_offsets(k - 1);
        let inv = invert(&self.feeds[k]);
        let outs = inv
            .iter()
            .map(|&p| Some(starts[k - 1] + Self::owner(&outo, p).0))
            .collect();
        (ins, outs)
    }

    /// Vertex order obtained by a breadth-first walk from the legs.
    fn discovery(&self) -> Discovery {
        let n = self.vertex_count();
        let adj = self.adjacency();
        let (in_legs, out_legs) = self.leg_vertices();
        let mut d = Discovery::new(n);
        let mut queue = VecDeque::new();
        for v in in_legs.into_iter().chain(out_legs).flatten() {
            if d.visit(v) {
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            let (ins, outs) = &adj[v];
            for w in ins.iter().chain(outs).flatten() {
                if d.visit(*w) {
                    queue.push_back(*w);
                }
            }
        }
        d
    }

    /// Connected with at least one leg. The 0-level identity counts as connected.
    pub fn is_connected(&self) -> bool {
        let b = self.biarity();
        if self.levels.is_empty() {
            return b == Biarity::UNIT;
        }
        if b.inputs + b.outputs == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut d = Discovery::new(adj.len());
        d.visit(0);
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            let (ins, outs) = &adj[v];
            for w in ins.iter().chain(outs).flatten() {
                if d.visit(*w) {
                    stack.push(*w);
                }
            }
        }
        d.all_visited()
    }

    /// First Betti number of the underlying undirected graph, strands spliced.
    pub fn genus(&self) -> isize {
        let k = self.levels.len();
        if k == 0 {
            return 0;
        }
        let internal: usize = (1..k).map(|b| self.feeds[b].len()).sum();
        internal as isize - self.vertex_count() as isize + 1
    }

    /// Canonical relabeling of vertices within levels. Returns the graph and,
    /// for each new flat vertex index, its old flat index.
    pub fn canonical(&self) -> (LeveledGraph, Vec<usize>) {
        let d = self.discovery();
        let starts = self.level_start();
        let mut order: Vec<usize> = Vec::with_capacity(self.vertex_count());
        for l in 0..self.levels.len() {
            let mut vs: Vec<usize> = (starts[l]..starts[l + 1]).collect();
            vs.sort_by_key(|&v| (d.rank(v), v));
            order.extend(vs);
        }
        (self.permute_vertices(&order), order)
    }

    pub fn canonicalize(&self) -> LeveledGraph {
        self.canonical().0
    }

    /// Reorders vertices within levels: new flat vertex `i` is old `order[i]`.
    pub fn permute_vertices(&self, order: &[usize]) -> LeveledGraph {
        let k = self.levels.len();
        let starts = self.level_start();
        let mut levels = Vec::with_capacity(k);
        // Per level: new index -> old index (local).
        let mut local_orders = Vec::with_capacity(k);
        for l in 0..k {
            let lo: Vec<usize> = order[starts[l]..starts[l + 1]]
                .iter()
                .map(|&o| o - starts[l])
                .collect();
            levels.push(lo.iter().map(|&o| self.levels[l][o]).collect::<Vec<_>>());
            local_orders.push(lo);
        }
        // old flat port -> new flat port maps per level, for inputs and outputs
        let port_map = |l: usize, inputs: bool| -> Vec<usize> {
            let (old_off, arity): (Vec<usize>, Box<dyn Fn(&Vertex) -> usize>) = if inputs {
                (self.in_offsets(l), Box::new(|v: &Vertex| v.biarity.inputs))
            } else {
                (self.out_offsets(l), Box::new(|v: &Vertex| v.biarity.outputs))
            };
            let total = *old_off.last().unwrap();
            let mut map = vec![0; total];
            let mut acc = 0;
            for &o in &local_orders[l] {
                let a = arity(&self.levels[l][o]);
                for q in 0..a {
                    map[old_off[o] + q] = acc + q;
                }
                acc += a;
            }
            map
        };
        let mut feeds = Vec::with_capacity(k + 1);
        for b in 0..=k {
            let lower = if b > 0 { Some(port_map(b - 1, false)) } else { None };
            let upper = if b < k { Some(port_map(b, true)) } else { None };
            let mut f = vec![0; self.feeds[b].len()];
            for (lo, &up) in self.feeds[b].iter().enumerate() {
                let nl = lower.as_ref().map_or(lo, |m| m[lo]);
                let nu = upper.as_ref().map_or(up, |m| m[up]);
                f[nl] = nu;
            }
            feeds.push(f);
        }
        LeveledGraph { levels, feeds }
    }

    /// Byte encoding; equal for isomorphic graphs once canonicalized.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        push_u8(&mut out, self.levels.len());
        for lvl in &self.levels {
            push_u8(&mut out, lvl.len());
            for v in lvl {
                out.push(match v.kind {
                    VertexKind::Strand => 0,
                    VertexKind::Node => 1,
                });
                push_u8(&mut out, v.biarity.outputs);
                push_u8(&mut out, v.biarity.inputs);
            }
        }
        for f in &self.feeds {
            push_u8(&mut out, f.len());
            for &p in f {
                push_u8(&mut out, p);
            }
        }
        out
    }

    pub fn canonical_code(&self) -> Vec<u8> {
        self.canonicalize().encode()
    }

    pub fn decode(bytes: &[u8]) -> Result<LeveledGraph> {
        let mut it = bytes.iter().map(|b| *b as usize);
        let bad = || Error::InvalidGraph("truncated leveled graph encoding".into());
        let k = it.next().ok_or_else(bad)?;
        let mut levels = Vec::with_capacity(k);
        for _ in 0..k {
            let c = it.next().ok_or_else(bad)?;
            let mut lvl = Vec::with_capacity(c);
            for _ in 0..c {
                let kind = match it.next().ok_or_else(bad)? {
                    0 => VertexKind::Strand,
                    1 => VertexKind::Node,
                    _ => return Err(Error::InvalidGraph("bad vertex kind".into())),
                };
                let o = it.next().ok_or_else(bad)?;
                let i = it.next().ok_or_else(bad)?;
                lvl.push(Vertex {
                    kind,
                    biarity: Biarity::new(o, i),
                });
            }
            levels.push(lvl);
        }
        let mut feeds = Vec::with_capacity(k + 1);
        for _ in 0..=k {
            let c = it.next().ok_or_else(bad)?;
            feeds.push((0..c).map(|_| it.next().ok_or_else(bad)).collect::<Result<Vec<_>>>()?);
        }
        if it.next().is_some() {
            return Err(Error::InvalidGraph("trailing bytes".into()));
        }
        LeveledGraph::new(levels, feeds)
    }

    fn locate(&self, flat: usize) -> (usize, usize) {
        let starts = self.level_start();
        let l = starts.partition_point(|&s| s <= flat) - 1;
        (l, flat - starts[l])
    }

    /// Exchanges input ports `q` and `q + 1` of flat vertex `v`.
    pub fn twist_inputs(&self, v: usize, q: usize) -> LeveledGraph {
        let (l, i) = self.locate(v);
        let p = self.in_offsets(l)[i] + q;
        let mut g = self.clone();
        for x in g.feeds[l].iter_mut() {
            if *x == p {
                *x = p + 1;
            } else if *x == p + 1 {
                *x = p;
            }
        }
        g
    }

    /// Exchanges output ports `q` and `q + 1` of flat vertex `v`.
    pub fn twist_outputs(&self, v: usize, q: usize) -> LeveledGraph {
        let (l, i) = self.locate(v);
        let p = self.out_offsets(l)[i] + q;
        let mut g = self.clone();
        g.feeds[l + 1].swap(p, p + 1);
        g
    }

    /// Relabels global input legs `j` and `j + 1`.
    pub fn swap_input_legs(&self, j: usize) -> LeveledGraph {
        let mut g = self.clone();
        g.feeds[0].swap(j, j + 1);
        g
    }

    /// Relabels global output legs `j` and `j + 1`.
    pub fn swap_output_legs(&self, j: usize) -> LeveledGraph {
        let mut g = self.clone();
        let k = g.levels.len();
        for x in g.feeds[k].iter_mut() {
            if *x == j {
                *x = j + 1;
            } else if *x == j + 1 {
                *x = j;
            }
        }
        g
    }

    /// Inserts a level of identity strands so that it becomes level `pos`
    /// (counted from the bottom, `0 <= pos <= k`).
    pub fn insert_strand_level(&self, pos: usize) -> LeveledGraph {
        let c = self.feeds[pos].len();
        let mut levels = self.levels.clone();
        levels.insert(pos, vec![Vertex::STRAND; c]);
        let mut feeds = self.feeds.clone();
        feeds.insert(pos, (0..c).collect());
        LeveledGraph { levels, feeds }
    }

    /// Whether level `l` consists of strands only.
    pub fn is_strand_level(&self, l: usize) -> bool {
        self.levels[l].iter().all(Vertex::is_strand)
    }

    /// Forgets the levels: splices out strands and returns the underlying graph.
    /// The returned vertex order follows flat order of the nodes.
    pub fn forget_levels(&self) -> GraphShape {
        let k = self.levels.len();
        let starts = self.level_start();
        let flat = self.flat_vertices();
        let mut node_index = vec![usize::MAX; flat.len()];
        let mut nodes = Vec::new();
        for (f, v) in flat.iter().enumerate() {
            if !v.is_strand() {
                node_index[f] = nodes.len();
                nodes.push(v.biarity);
            }
        }
        let inv: Vec<Vec<usize>> = self.feeds.iter().map(|f| invert(f)).collect();
        let in_offs: Vec<Vec<usize>> = (0..k).map(|l| self.in_offsets(l)).collect();
        let out_offs: Vec<Vec<usize>> = (0..k).map(|l| self.out_offsets(l)).collect();
        // Follow an input port (level l, flat port p) downward to its source.
        let source_of = |mut l: usize, mut p: usize| -> End {
            loop {
                let lower = inv[l][p];
                if l == 0 {
                    return End::Leg(lower);
                }
                let (v, q) = Self::owner(&out_offs[l - 1], lower);
                let f = starts[l - 1] + v;
                if flat[f].is_strand() {
                    l -= 1;
                    p = in_offs[l][v];
                } else {
                    return End::Port {
                        vertex: node_index[f],
                        port: q,
                    };
                }
            }
        };
        let target_of = |mut l: usize, mut p: usize| -> End {
            loop {
                let upper = self.feeds[l + 1][p];
                if l + 1 == k {
                    return End::Leg(upper);
                }
                let (v, q) = Self::owner(&in_offs[l + 1], upper);
                let f = starts[l + 1] + v;
                if flat[f].is_strand() {
                    l += 1;
                    p = out_offs[l][v];
                } else {
                    return End::Port {
                        vertex: node_index[f],
                        port: q,
                    };
                }
            }
        };
        let mut in_src = Vec::with_capacity(nodes.len());
        let mut out_dst = Vec::with_capacity(nodes.len());
        for l in 0..k {
            for (i, v) in self.levels[l].iter().enumerate() {
                if v.is_strand() {
                    continue;
                }
                in_src.push(
                    (0..v.biarity.inputs)
                        .map(|q| source_of(l, in_offs[l][i] + q))
                        .collect(),
                );
                out_dst.push(
                    (0..v.biarity.outputs)
                        .map(|q| target_of(l, out_offs[l][i] + q))
                        .collect(),
                );
            }
        }
        let b = self.biarity();
        if nodes.is_empty() {
            return GraphShape::identity();
        }
        GraphShape::from_parts(b, nodes, in_src, out_dst)
    }

    /// Connected components of the subgraph on levels `lo..=hi`, ordered by
    /// their first vertex in flat order.
    pub fn components(&self, lo: usize, hi: usize) -> Vec<Component> {
        let starts = self.level_start();
        let adj = self.adjacency();
        let in_range = |f: usize| f >= starts[lo] && f < starts[hi + 1];
        let mut comp_of = vec![usize::MAX; self.vertex_count()];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for f in starts[lo]..starts[hi + 1] {
            if comp_of[f] != usize::MAX {
                continue;
            }
            let c = comps.len();
            let mut members = vec![f];
            comp_of[f] = c;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                let (ins, outs) = &adj[v];
                for w in ins.iter().chain(outs).flatten() {
                    if in_range(*w) && comp_of[*w] == usize::MAX {
                        comp_of[*w] = c;
                        members.push(*w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
            .into_iter()
            .map(|members| self.extract(lo, hi, members))
            .collect()
    }

    /// Builds the sub-leveled-graph of `members` (sorted flat indices within levels lo..=hi).
    fn extract(&self, lo: usize, hi: usize, members: Vec<usize>) -> Component {
        let starts = self.level_start();
        let nl = hi - lo + 1;
        let mut levels: Vec<Vec<Vertex>> = vec![Vec::new(); nl];
        let mut local: Vec<Vec<usize>> = vec![Vec::new(); nl];
        for &f in &members {
            let (l, i) = self.locate(f);
            levels[l - lo].push(self.levels[l][i]);
            local[l - lo].push(i);
        }
        // old port -> new port, per level and direction
        let port_maps = |l: usize, inputs: bool| -> Vec<Option<usize>> {
            let offs = if inputs { self.in_offsets(l) } else { self.out_offsets(l) };
            let mut map = vec![None; *offs.last().unwrap()];
            let mut acc = 0;
            for &i in &local[l - lo] {
                let a = offs[i + 1] - offs[i];
                for q in 0..a {
                    map[offs[i] + q] = Some(acc + q);
                }
                acc += a;
            }
            map
        };
        let in_maps: Vec<Vec<Option<usize>>> = (lo..=hi).map(|l| port_maps(l, true)).collect();
        let out_maps: Vec<Vec<Option<usize>>> = (lo..=hi).map(|l| port_maps(l, false)).collect();
        let mut feeds = Vec::with_capacity(nl + 1);
        // bottom boundary: component input legs in order of parent input port
        let mut in_ports: Vec<usize> = in_maps[0]
            .iter()
            .enumerate()
            .filter_map(|(p, m)| m.map(|_| p))
            .collect();
        in_ports.sort_unstable();
        feeds.push(in_ports.iter().map(|&p| in_maps[0][p].unwrap()).collect());
        for b in 1..nl {
            let l = lo + b;
            let mut f = vec![0; out_maps[b - 1].iter().flatten().count()];
            for (lower, &upper) in self.feeds[l].iter().enumerate() {
                if let Some(nlow) = out_maps[b - 1][lower] {
                    f[nlow] = in_maps[b][upper].expect("component closed under adjacency");
                }
            }
            feeds.push(f);
        }
        let out_ports: Vec<usize> = out_maps[nl - 1]
            .iter()
            .enumerate()
            .filter_map(|(p, m)| m.map(|_| p))
            .collect();
        let mut top = vec![0; out_ports.len()];
        for (leg, &p) in out_ports.iter().enumerate() {
            top[out_maps[nl - 1][p].unwrap()] = leg;
        }
        feeds.push(top);
        let _ = starts;
        Component {
            graph: LeveledGraph { levels, feeds },
            vertices: members,
            in_ports,
            out_ports,
            first_level: lo,
        }
    }

    /// Groups consecutive levels (bottom first, `sizes` summing to `k`) and
    /// contracts every component of each group to a single vertex.
    ///
    /// Returns the coarse graph (all vertices are nodes) and the components
    /// behind each coarse vertex, in coarse flat order.
    pub fn contract(&self, sizes: &[usize]) -> Result<(LeveledGraph, Vec<Component>)> {
        let k = self.levels.len();
        if sizes.iter().sum::<usize>() != k || sizes.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "level grouping {sizes:?} does not partition {k} levels"
            )));
        }
        let mut groups: Vec<Vec<Component>> = Vec::new();
        let mut lo = 0;
        for &s in sizes {
            groups.push(self.components(lo, lo + s - 1));
            lo += s;
        }
        let levels: Vec<Vec<Vertex>> = groups
            .iter()
            .map(|cs| cs.iter().map(|c| Vertex::node(c.graph.biarity())).collect())
            .collect();
        let g = groups.len();
        let mut feeds = Vec::with_capacity(g + 1);
        // parent port -> coarse port maps for each group's bottom inputs and top outputs
        let coarse_in = |cs: &[Component], total: usize| -> Vec<usize> {
            let mut map = vec![usize::MAX; total];
            let mut acc = 0;
            for c in cs {
                for (j, &p) in c.in_ports.iter().enumerate() {
                    map[p] = acc + j;
                }
                acc += c.in_ports.len();
            }
            map
        };
        let coarse_out = |cs: &[Component], total: usize| -> Vec<usize> {
            let mut map = vec![usize::MAX; total];
            let mut acc = 0;
            for c in cs {
                for (j, &p) in c.out_ports.iter().enumerate() {
                    map[p] = acc + j;
                }
                acc += c.out_ports.len();
            }
            map
        };
        let mut lo = 0;
        let mut prev_out: Option<Vec<usize>> = None;
        for (gi, &s) in sizes.iter().enumerate() {
            let cin = coarse_in(&groups[gi], self.level_inputs(lo));
            let f = self.feeds[lo]
                .iter()
                .enumerate()
                .map(|(lower, &upper)| (prev_out.as_ref().map_or(lower, |m| m[lower]), cin[upper]))
                .fold(vec![0; self.feeds[lo].len()], |mut acc, (l, u)| {
                    acc[l] = u;
                    acc
                });
            feeds.push(f);
            prev_out = Some(coarse_out(&groups[gi], self.level_outputs(lo + s - 1)));
            lo += s;
        }
        let top = prev_out.expect("at least one group");
        let mut f = vec![0; self.feeds[k].len()];
        for (lower, &leg) in self.feeds[k].iter().enumerate() {
            f[top[lower]] = leg;
        }
        feeds.push(f);
        let coarse = LeveledGraph::new(levels, feeds)?;
        Ok((coarse, groups.into_iter().flatten().collect()))
    }

    /// Replaces every vertex of `self` (flat order) by a leveled graph. Parts
    /// replacing vertices of coarse level `g` must all have `sizes[g]` levels.
    ///
    /// Returns the fine graph and, per fine flat vertex, `(part, part flat vertex)`.
    pub fn substitute(
        &self,
        sizes: &[usize],
        parts: &[LeveledGraph],
    ) -> Result<(LeveledGraph, Vec<(usize, usize)>)> {
        let k = self.levels.len();
        if sizes.len() != k || parts.len() != self.vertex_count() {
            return Err(Error::ShapeMismatch("substitution data does not match graph".into()));
        }
        let starts = self.level_start();
        for (f, (l, _, v)) in self.vertices().enumerate() {
            let p = &parts[f];
            if p.num_levels() != sizes[l] || sizes[l] == 0 {
                return Err(Error::ShapeMismatch(format!(
                    "part {f} has {} levels, expected {}",
                    p.num_levels(),
                    sizes[l]
                )));
            }
            if p.biarity() != v.biarity {
                return Err(Error::BiarityMismatch {
                    slot: f,
                    expected: v.biarity,
                    got: p.biarity(),
                });
            }
        }
        let mut levels: Vec<Vec<Vertex>> = Vec::new();
        let mut origin: Vec<(usize, usize)> = Vec::new();
        let mut feeds: Vec<Vec<usize>> = Vec::new();
        // For each coarse level: fine port offsets of each part at its bottom
        // inputs and top outputs, to wire coarse boundaries.
        let mut prev_top: Option<Vec<Vec<usize>>> = None; // per coarse vertex: leg -> fine out port
        for l in 0..k {
            let members: Vec<usize> = (starts[l]..starts[l + 1]).collect();
            let part_starts: Vec<Vec<usize>> =
                members.iter().map(|&f| parts[f].level_start()).collect();
            // per fine sub-level: input/output port offsets of each part
            let mut in_off = vec![vec![0; members.len()]; sizes[l]];
            let mut out_off = vec![vec![0; members.len()]; sizes[l]];
            for s in 0..sizes[l] {
                let mut lvl = Vec::new();
                let (mut ai, mut ao) = (0, 0);
                for (mi, &f) in members.iter().enumerate() {
                    in_off[s][mi] = ai;
                    out_off[s][mi] = ao;
                    ai += parts[f].level_inputs(s);
                    ao += parts[f].level_outputs(s);
                    for (vi, v) in parts[f].level(s).iter().enumerate() {
                        lvl.push(*v);
                        origin.push((f, part_starts[mi][s] + vi));
                    }
                }
                levels.push(lvl);
            }
            // bottom boundary of this coarse level
            let ino = self.in_offsets(l);
            let mut f0 = vec![0; self.feeds[l].len()];
            for (lower, &upper) in self.feeds[l].iter().enumerate() {
                let (vi, q) = Self::owner(&ino, upper);
                let part = &parts[members[vi]];
                let fine_upper = in_off[0][vi] + part.feeds[0][q];
                let fine_lower = match &prev_top {
                    None => lower,
                    Some(pt) => {
                        let below = self.out_offsets(l - 1);
                        let (bv, bq) = Self::owner(&below, lower);
                        pt[bv][bq]
                    }
                };
                f0[fine_lower] = fine_upper;
            }
            feeds.push(f0);
            // internal boundaries
            for s in 1..sizes[l] {
                let total: usize = members.iter().map(|&f| parts[f].feeds[s].len()).sum();
                let mut fb = vec![0; total];
                for (mi, &f) in members.iter().enumerate() {
                    for (lower, &upper) in parts[f].feeds[s].iter().enumerate() {
                        fb[out_off[s - 1][mi] + lower] = in_off[s][mi] + upper;
                    }
                }
                feeds.push(fb);
            }
            // top outputs of each part: leg -> fine output port
            let top = sizes[l] - 1;
            prev_top = Some(
                members
                    .iter()
                    .enumerate()
                    .map(|(mi, &f)| {
                        let inv = invert(&parts[f].feeds[top + 1]);
                        inv.iter().map(|&p| out_off[top][mi] + p).collect()
                    })
                    .collect(),
            );
        }
        let pt = prev_top.unwrap_or_default();
        let below = if k > 0 { self.out_offsets(k - 1) } else { vec![0] };
        let total = self.feeds[k].len();
        let mut ft = vec![0; total];
        for (lower, &leg) in self.feeds[k].iter().enumerate() {
            let (bv, bq) = Self::owner(&below, lower);
            ft[pt[bv][bq]] = leg;
        }
        feeds.push(ft);
        Ok((LeveledGraph::new(levels, feeds)?, origin))
    }
}

impl LeveledGraph {
    /// Membership in the leveled family of a variant. Half-prop graphs are
    /// checked recursively: the top `k - 1` levels split into blocks, and
    /// either every bottom vertex has one output or every block has one input.
    pub fn satisfies(&self, variant: super::Variant) -> bool {
        use super::Variant;
        if !self.is_connected() {
            return false;
        }
        match variant {
            Variant::Properad => true,
            Variant::Operad => {
                self.biarity().outputs == 1
                    && self.levels.iter().flatten().all(|v| v.biarity.outputs == 1)
            }
            Variant::Dioperad => self.genus() == 0,
            Variant::HalfProp => self.genus() == 0 && self.half_prop_levels(),
        }
    }

    fn half_prop_levels(&self) -> bool {
        let k = self.levels.len();
        if k <= 1 {
            return true;
        }
        let blocks = self.components(1, k - 1);
        let bottom_ok = self.levels[0].iter().all(|v| v.biarity.outputs == 1);
        let blocks_ok = blocks.iter().all(|b| b.in_ports.len() == 1);
        (bottom_ok || blocks_ok) && blocks.iter().all(|b| b.graph.half_prop_levels())
    }
}

impl LeveledGraph {
    /// Removes level `l`, which must consist of (1,1) vertices, joining the
    /// edges through it.
    pub fn splice_level(&self, l: usize) -> Result<LeveledGraph> {
        if self.levels[l].iter().any(|v| v.biarity != Biarity::UNIT) {
            return Err(Error::InvalidGraph(format!("level {l} has a vertex other than (1,1)")));
        }
        let mut levels = self.levels.clone();
        levels.remove(l);
        let mut feeds = self.feeds.clone();
        let below = feeds.remove(l);
        // vertex u at level l: input port u, output port u
        let above = &mut feeds[l];
        *above = below.iter().map(|&u| self.feeds[l + 1][u]).collect();
        Ok(LeveledGraph { levels, feeds })
    }

    /// Inserts a level of (1,1) nodes at position `pos` (see
    /// [`LeveledGraph::insert_strand_level`]); returns the new graph and the
    /// flat indices of the inserted vertices.
    pub fn insert_unit_level(&self, pos: usize) -> (LeveledGraph, std::ops::Range<usize>) {
        let mut g = self.insert_strand_level(pos);
        for v in g.levels[pos].iter_mut() {
            v.kind = VertexKind::Node;
        }
        let start = g.level_start()[pos];
        let len = g.levels[pos].len();
        (g, start..start + len)
    }

    /// Replaces the listed (1,1) nodes by strands.
    pub fn mark_strands(&self, flat: &[usize]) -> LeveledGraph {
        let mut g = self.clone();
        let starts = self.level_start();
        for &f in flat {
            let l = starts.partition_point(|&s| s <= f) - 1;
            let v = &mut g.levels[l][f - starts[l]];
            debug_assert_eq!(v.biarity, Biarity::UNIT);
            v.kind = VertexKind::Strand;
        }
        g
    }
}
