use super::canon::{push_u8, Discovery};
use super::{Biarity, Variant};
use crate::error::{Error, Result};
use std::collections::VecDeque;

/// Where a half-edge ends: a global leg or a port of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Leg(usize),
    Port { vertex: usize, port: usize },
}

/// A directed graph with ordered legs and ordered vertex ports, without levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphShape {
    biarity: Biarity,
    vertices: Vec<Biarity>,
    /// For each vertex input port, what feeds it: an input leg or a vertex output port.
    in_src: Vec<Vec<End>>,
    /// For each vertex output port, what it feeds: an output leg or a vertex input port.
    out_dst: Vec<Vec<End>>,
    /// For each input leg, what it feeds.
    leg_in: Vec<End>,
    /// For each output leg, what feeds it.
    leg_out: Vec<End>,
}

impl GraphShape {
    pub fn identity() -> Self {
        GraphShape {
            biarity: Biarity::UNIT,
            vertices: Vec::new(),
            in_src: Vec::new(),
            out_dst: Vec::new(),
            leg_in: vec![End::Leg(0)],
            leg_out: vec![End::Leg(0)],
        }
    }

    pub(crate) fn from_parts(
        biarity: Biarity,
        vertices: Vec<Biarity>,
        in_src: Vec<Vec<End>>,
        out_dst: Vec<Vec<End>>,
    ) -> Self {
        let mut leg_in = vec![End::Leg(usize::MAX); biarity.inputs];
        let mut leg_out = vec![End::Leg(usize::MAX); biarity.outputs];
        for (v, srcs) in in_src.iter().enumerate() {
            for (p, e) in srcs.iter().enumerate() {
                if let End::Leg(j) = e {
                    leg_in[*j] = End::Port { vertex: v, port: p };
                }
            }
        }
        for (v, dsts) in out_dst.iter().enumerate() {
            for (p, e) in dsts.iter().enumerate() {
                if let End::Leg(j) = e {
                    leg_out[*j] = End::Port { vertex: v, port: p };
                }
            }
        }
        GraphShape {
            biarity,
            vertices,
            in_src,
            out_dst,
            leg_in,
            leg_out,
        }
    }

    /// Builds a graph from the source of every vertex input port and every
    /// output leg, checking that the wiring is a perfect matching.
    pub fn new(
        biarity: Biarity,
        vertices: Vec<Biarity>,
        in_src: Vec<Vec<End>>,
        leg_out: Vec<End>,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidGraph(m.to_string()));
        if in_src.len() != vertices.len() || leg_out.len() != biarity.outputs {
            return bad("port lists do not match vertices");
        }
        let mut out_dst: Vec<Vec<Option<End>>> =
            vertices.iter().map(|b| vec![None; b.outputs]).collect();
        let mut leg_used = vec![false; biarity.inputs];
        let mut claim = |src: End, dst: End| -> Result<()> {
            match src {
                End::Leg(j) => {
                    if j >= biarity.inputs || std::mem::replace(&mut leg_used[j], true) {
                        return Err(Error::InvalidGraph(format!("input leg {j} misused")));
                    }
                }
                End::Port { vertex, port } => {
                    let slot = out_dst
                        .get_mut(vertex)
                        .and_then(|o| o.get_mut(port))
                        .ok_or_else(|| Error::InvalidGraph("no such output port".into()))?;
                    if slot.replace(dst).is_some() {
                        return Err(Error::InvalidGraph("output port used twice".into()));
                    }
                }
            }
            Ok(())
        };
        for (v, srcs) in in_src.iter().enumerate() {
            if srcs.len() != vertices[v].inputs {
                return bad("input port count mismatch");
            }
            for (p, s) in srcs.iter().enumerate() {
                claim(*s, End::Port { vertex: v, port: p })?;
            }
        }
        for (j, s) in leg_out.iter().enumerate() {
            claim(*s, End::Leg(j))?;
        }
        if leg_used.iter().any(|u| !u) {
            return bad("unused input leg");
        }
        let out_dst: Option<Vec<Vec<End>>> = out_dst
            .into_iter()
            .map(|o| o.into_iter().collect())
            .collect();
        let Some(out_dst) = out_dst else {
            return bad("dangling output port");
        };
        if vertices.iter().any(|b| b.outputs == 0 && b.inputs == 0) {
            return bad("vertex of biarity (0,0)");
        }
        Ok(Self::from_parts(biarity, vertices, in_src, out_dst))
    }

    pub fn biarity(&self) -> Biarity {
        self.biarity
    }

    pub fn vertices(&self) -> &[Biarity] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn input_sources(&self) -> &[Vec<End>] {
        &self.in_src
    }

    pub fn output_leg_sources(&self) -> &[End] {
        &self.leg_out
    }

    /// Number of vertex-to-vertex edges.
    pub fn internal_edges(&self) -> usize {
        self.in_src
            .iter()
            .flatten()
            .filter(|e| matches!(e, End::Port { .. }))
            .count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.in_src.iter().enumerate().flat_map(|(v, srcs)| {
            srcs.iter().filter_map(move |e| match e {
                End::Port { vertex, .. } => Some((*vertex, v)),
                End::Leg(_) => None,
            })
        })
    }

    fn discovery(&self) -> Discovery {
        let n = self.vertices.len();
        let mut d = Discovery::new(n);
        let mut queue = VecDeque::new();
        for e in self.leg_in.iter().chain(&self.leg_out) {
            if let End::Port { vertex, .. } = e {
                if d.visit(*vertex) {
                    queue.push_back(*vertex);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for e in self.in_src[v].iter().chain(&self.out_dst[v]) {
                if let End::Port { vertex, .. } = e {
                    if d.visit(*vertex) {
                        queue.push_back(*vertex);
                    }
                }
            }
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return self.biarity == Biarity::UNIT;
        }
        if self.biarity.inputs + self.biarity.outputs == 0 {
            return false;
        }
        let mut d = Discovery::new(self.vertices.len());
        d.visit(0);
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for e in self.in_src[v].iter().chain(&self.out_dst[v]) {
                if let End::Port { vertex, .. } = e {
                    if d.visit(*vertex) {
                        stack.push(*vertex);
                    }
                }
            }
        }
        d.all_visited()
    }

    pub fn is_acyclic(&self) -> bool {
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for (_, v) in self.edges() {
            indeg[v] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for e in &self.out_dst[u] {
                if let End::Port { vertex, .. } = e {
                    indeg[*vertex] -= 1;
                    if indeg[*vertex] == 0 {
                        stack.push(*vertex);
                    }
                }
            }
        }
        seen == n
    }

    /// First Betti number, for connected graphs.
    pub fn genus(&self) -> isize {
        if self.vertices.is_empty() {
            return 0;
        }
        self.internal_edges() as isize - self.vertices.len() as isize + 1
    }

    /// Membership in the graph family of a variant (connected, directed acyclic
    /// and the variant's extra condition).
    pub fn satisfies(&self, variant: Variant) -> bool {
        if !self.is_connected() || !self.is_acyclic() {
            return false;
        }
        match variant {
            Variant::Properad => true,
            Variant::Operad => {
                self.biarity.outputs == 1 && self.vertices.iter().all(|b| b.outputs == 1)
            }
            Variant::Dioperad => self.genus() == 0,
            Variant::HalfProp => {
                self.genus() == 0
                    && self.edges().all(|(u, v)| {
                        self.vertices[u].outputs == 1 || self.vertices[v].inputs == 1
                    })
            }
        }
    }

    /// Canonical vertex order: new vertex `i` is old `order[i]`.
    pub fn canonical(&self) -> (GraphShape, Vec<usize>) {
        let order = self.discovery().order();
        (self.permute_vertices(&order), order)
    }

    pub fn canonicalize(&self) -> GraphShape {
        self.canonical().0
    }

    pub fn permute_vertices(&self, order: &[usize]) -> GraphShape {
        let mut new_of = vec![0; order.len()];
        for (i, &o) in order.iter().enumerate() {
            new_of[o] = i;
        }
        let re = |e: &End| match *e {
            End::Port { vertex, port } => End::Port {
                vertex: new_of[vertex],
                port,
            },
            leg => leg,
        };
        GraphShape {
            biarity: self.biarity,
            vertices: order.iter().map(|&o| self.vertices[o]).collect(),
            in_src: order
                .iter()
                .map(|&o| self.in_src[o].iter().map(re).collect())
                .collect(),
            out_dst: order
                .iter()
                .map(|&o| self.out_dst[o].iter().map(re).collect())
                .collect(),
            leg_in: self.leg_in.iter().map(re).collect(),
            leg_out: self.leg_out.iter().map(re).collect(),
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        push_u8(&mut out, self.biarity.outputs);
        push_u8(&mut out, self.biarity.inputs);
        push_u8(&mut out, self.vertices.len());
        for b in &self.vertices {
            push_u8(&mut out, b.outputs);
            push_u8(&mut out, b.inputs);
        }
        let end = |out: &mut Vec<u8>, e: &End| match *e {
            End::Leg(j) => {
                out.push(0);
                push_u8(out, j);
            }
            End::Port { vertex, port } => {
                out.push(1);
                push_u8(out, vertex);
                push_u8(out, port);
            }
        };
        for srcs in &self.in_src {
            for e in srcs {
                end(&mut out, e);
            }
        }
        for e in &self.leg_out {
            end(&mut out, e);
        }
        out
    }

    pub fn canonical_code(&self) -> Vec<u8> {
        self.canonicalize().encode()
    }

    /// Exchanges input ports `q` and `q + 1` of vertex `v`.
    pub fn twist_inputs(&self, v: usize, q: usize) -> GraphShape {
        let mut in_src = self.in_src.clone();
        in_src[v].swap(q, q + 1);
        let mut out_dst = self.out_dst.clone();
        swap_port_refs(out_dst.iter_mut().flatten(), v, q);
        Self::from_parts(self.biarity, self.vertices.clone(), in_src, out_dst)
    }

    /// Exchanges output ports `q` and `q + 1` of vertex `v`.
    pub fn twist_outputs(&self, v: usize, q: usize) -> GraphShape {
        let mut out_dst = self.out_dst.clone();
        out_dst[v].swap(q, q + 1);
        let mut in_src = self.in_src.clone();
        swap_port_refs(in_src.iter_mut().flatten(), v, q);
        Self::from_parts(self.biarity, self.vertices.clone(), in_src, out_dst)
    }

    /// Relabels input legs `j` and `j + 1`.
    pub fn swap_input_legs(&self, j: usize) -> GraphShape {
        let mut srcs = self.in_src.clone();
        for e in srcs.iter_mut().flatten() {
            if let End::Leg(x) = e {
                if *x == j || *x == j + 1 {
                    *x = 2 * j + 1 - *x;
                }
            }
        }
        Self::from_parts(self.biarity, self.vertices.clone(), srcs, self.out_dst.clone())
    }

    /// Relabels output legs `j` and `j + 1`.
    pub fn swap_output_legs(&self, j: usize) -> GraphShape {
        let mut dsts = self.out_dst.clone();
        for e in dsts.iter_mut().flatten() {
            if let End::Leg(x) = e {
                if *x == j || *x == j + 1 {
                    *x = 2 * j + 1 - *x;
                }
            }
        }
        Self::from_parts(self.biarity, self.vertices.clone(), self.in_src.clone(), dsts)
    }
}

fn swap_port_refs<'a>(ends: impl Iterator<Item = &'a mut End>, v: usize, q: usize) {
    for e in ends {
        if let End::Port { vertex, port } = e {
            if *vertex == v && (*port == q || *port == q + 1) {
                *port = 2 * q + 1 - *port;
            }
        }
    }
}

impl GraphShape {
    /// Replaces each vertex `v` by `inner[v]`, whose legs follow the port order of `v`.
    pub fn substitute(&self, inner: &[GraphShape]) -> Result<GraphShape> {
        if inner.len() != self.vertices.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} inner graphs for {} slots",
                inner.len(),
                self.vertices.len()
            )));
        }
        for (slot, (g, b)) in inner.iter().zip(&self.vertices).enumerate() {
            if g.biarity != *b {
                return Err(Error::BiarityMismatch {
                    slot,
                    expected: *b,
                    got: g.biarity,
                });
            }
        }
        let mut offset = vec![0];
        for g in inner {
            offset.push(offset.last().unwrap() + g.vertices.len());
        }
        // Source feeding `e`, an outer end seen from the consuming side.
        let resolve = |mut e: End| -> End {
            loop {
                match e {
                    End::Leg(j) => return End::Leg(j),
                    End::Port { vertex: u, port: p } => match inner[u].leg_out[p] {
                        End::Port { vertex, port } => {
                            return End::Port {
                                vertex: offset[u] + vertex,
                                port,
                            }
                        }
                        End::Leg(i) => e = self.in_src[u][i],
                    },
                }
            }
        };
        let mut vertices = Vec::new();
        let mut in_src = Vec::new();
        for (u, g) in inner.iter().enumerate() {
            vertices.extend(g.vertices.iter().copied());
            for srcs in &g.in_src {
                in_src.push(
                    srcs.iter()
                        .map(|e| match *e {
                            End::Leg(i) => resolve(self.in_src[u][i]),
                            End::Port { vertex, port } => End::Port {
                                vertex: offset[u] + vertex,
                                port,
                            },
                        })
                        .collect(),
                );
            }
        }
        let leg_out = self.leg_out.iter().map(|e| resolve(*e)).collect();
        if vertices.is_empty() {
            return Ok(GraphShape::identity());
        }
        GraphShape::new(self.biarity, vertices, in_src, leg_out)
    }
}

/// Grafts graphs into the vertices of a leveled pattern. Strand slots must
/// receive the identity graph. Nodes of the result follow slot order.
pub fn graft(outer: &super::LeveledGraph, inner: &[GraphShape]) -> Result<GraphShape> {
    let flat = outer.flat_vertices();
    if inner.len() != flat.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} inner graphs for {} slots",
            inner.len(),
            flat.len()
        )));
    }
    let mut node_inner = Vec::new();
    for (slot, (v, g)) in flat.iter().zip(inner).enumerate() {
        if v.is_strand() {
            if g.vertex_count() != 0 {
                return Err(Error::BiarityMismatch {
                    slot,
                    expected: Biarity::UNIT,
                    got: g.biarity,
                });
            }
        } else {
            node_inner.push(g.clone());
        }
    }
    outer.forget_levels().substitute(&node_inner)
}
