use super::bimodule::SBimodule;
use crate::error::{Error, Result};
use crate::graph::{enumerate_leveled_weighted, Biarity, LeveledGraph, Truncation, Variant, Vertex};
use crate::linalg::{BasedSpace, Echelon, Label, LinMap, Quotient, SparseVec};
use crate::perm::{BimoduleComponent, Representation};
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Leveled graphs whose level-`l` vertices are decorated by basis vectors of
/// `levels[l]`, modulo the twist relation at every vertex port.
///
/// Level 0 is the bottom (nearest the global inputs). With two levels this is
/// the product `levels[1] ⊠ levels[0]`.
#[derive(Clone, Debug)]
pub struct LeveledSpace {
    levels: Vec<Arc<SBimodule>>,
    variant: Variant,
    truncation: Truncation,
    weight_floor: u32,
    comps: BTreeMap<Biarity, SpaceComponent>,
}

/// Twisting vertex `vertex` at ports `port, port + 1` turns a shape into
/// `target`, whose flat vertex `i` is the old vertex `order[i]`.
#[derive(Clone, Debug)]
struct Twist {
    vertex: usize,
    port: usize,
    inputs: bool,
    target: usize,
    order: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Orbit {
    elems: Vec<usize>,
    quotient: Quotient,
    offset: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct SpaceComponent {
    shapes: Vec<LeveledGraph>,
    shape_index: HashMap<Vec<u8>, usize>,
    elems: Vec<(usize, Vec<usize>)>,
    elem_index: HashMap<(usize, Vec<usize>), usize>,
    elem_weight: Vec<u32>,
    place: Vec<(usize, usize)>,
    orbits: Vec<Orbit>,
    basis: Vec<usize>,
    component: BimoduleComponent,
    weights: Vec<u32>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

impl LeveledSpace {
    /// Computes every biarity of the truncation box.
    pub fn new(levels: Vec<Arc<SBimodule>>, variant: Variant, truncation: Truncation) -> Result<Self> {
        Self::with_floor(levels, variant, truncation, 0)
    }

    /// As [`LeveledSpace::new`], keeping only elements of weight at least `floor`.
    pub fn with_floor(
        levels: Vec<Arc<SBimodule>>,
        variant: Variant,
        truncation: Truncation,
        floor: u32,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput("a leveled space needs at least one level".into()));
        }
        let mut space = LeveledSpace {
            levels,
            variant,
            truncation,
            weight_floor: floor,
            comps: BTreeMap::new(),
        };
        for b in truncation.biarities() {
            let c = space.build(b)?;
            space.comps.insert(b, c);
        }
        Ok(space)
    }

    pub fn levels(&self) -> &[Arc<SBimodule>] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn dim(&self, b: Biarity) -> usize {
        self.comps.get(&b).map_or(0, |c| c.basis.len())
    }

    /// Dimension before the twist quotient.
    pub fn raw_dim(&self, b: Biarity) -> usize {
        self.comps.get(&b).map_or(0, |c| c.elems.len())
    }

    fn comp(&self, b: Biarity) -> Result<&SpaceComponent> {
        self.comps
            .get(&b)
            .ok_or_else(|| Error::TruncationExceeded(format!("biarity {b} outside the truncation")))
    }

    fn deco_weight(&self, g: &LeveledGraph, deco: &[usize]) -> u32 {
        g.vertices()
            .zip(deco)
            .map(|((l, _, v), d)| self.levels[l].weights(v.biarity)[*d])
            .sum()
    }

    fn build(&self, b: Biarity) -> Result<SpaceComponent> {
        let w_max = self.truncation.max_weight;
        let mut allowed = Vec::with_capacity(self.levels.len());
        let mut exact: Vec<Vec<Biarity>> = Vec::new();
        for m in &self.levels {
            let types = m.vertex_types(self.variant);
            allowed.push(types.iter().map(|(vb, w, _)| (Vertex::node(*vb), *w)).collect::<Vec<_>>());
            exact.push(types.iter().filter(|t| t.2).map(|t| t.0).collect());
        }
        let shapes = if self.variant.allows_biarity(b) {
            enumerate_leveled_weighted(&allowed, b, w_max, self.variant)
        } else {
            Vec::new()
        };
        for g in &shapes {
            for (l, _, v) in g.vertices() {
                if !exact[l].contains(&v.biarity) {
                    return Err(Error::TruncationExceeded(format!(
                        "biarity {b} needs a level-{l} vertex of biarity {}, outside the truncation",
                        v.biarity
                    )));
                }
            }
        }
        let shape_index: HashMap<Vec<u8>, usize> =
            shapes.iter().enumerate().map(|(i, g)| (g.encode(), i)).collect();

        // decorations
        let mut elems = Vec::new();
        let mut elem_weight = Vec::new();
        for (s, g) in shapes.iter().enumerate() {
            let slots: Vec<&[u32]> = g.vertices().map(|(l, _, v)| self.levels[l].weights(v.biarity)).collect();
            let mut cur = Vec::with_capacity(slots.len());
            decorations(&slots, 0, 0, w_max, &mut cur, &mut |d, w| {
                if w >= self.weight_floor {
                    elems.push((s, d.to_vec()));
                    elem_weight.push(w);
                }
            });
        }
        let elem_index: HashMap<(usize, Vec<usize>), usize> =
            elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();

        // twists between shapes
        let twists: Vec<Vec<Twist>> = shapes
            .iter()
            .map(|g| {
                let mut ts = Vec::new();
                for (f, (_, _, v)) in g.vertices().enumerate() {
                    for (inputs, arity) in [(true, v.biarity.inputs), (false, v.biarity.outputs)] {
                        for q in 0..arity.saturating_sub(1) {
                            let t = if inputs { g.twist_inputs(f, q) } else { g.twist_outputs(f, q) };
                            let (c, order) = t.canonical();
                            let target = shape_index[&c.encode()];
                            ts.push(Twist { vertex: f, port: q, inputs, target, order });
                        }
                    }
                }
                ts
            })
            .collect();
        let mut uf = UnionFind((0..shapes.len()).collect());
        for (s, ts) in twists.iter().enumerate() {
            for t in ts {
                uf.union(s, t.target);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in 0..elems.len() {
            let root = uf.find(elems[e].0);
            groups.entry(root).or_default().push(e);
        }

        let mut place = vec![(0, 0); elems.len()];
        let mut orbits = Vec::with_capacity(groups.len());
        let mut basis = Vec::new();
        for members in groups.into_values() {
            let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, e)| (*e, i)).collect();
            let mut ech = Echelon::new(members.len());
            for &e in &members {
                let (s, d) = &elems[e];
                let g = &shapes[*s];
                let levels_of: Vec<(usize, Biarity)> = g.vertices().map(|(l, _, v)| (l, v.biarity)).collect();
                for t in &twists[*s] {
                    let moved: Vec<usize> = t.order.iter().map(|&o| d[o]).collect();
                    let mut pairs = vec![(local[&elem_index[&(t.target, moved)]], crate::linalg::Scalar::one())];
                    let (l, vb) = levels_of[t.vertex];
                    let comp = self.levels[l].component(vb).expect("decorated vertex has a component");
                    let rep = if t.inputs { &comp.right } else { &comp.left };
                    for (c, x) in rep.generator(t.port).column(d[t.vertex]).entries() {
                        let mut d2 = d.clone();
                        d2[t.vertex] = *c;
                        pairs.push((local[&elem_index[&(*s, d2)]], -x.clone()));
                    }
                    let v = SparseVec::from_pairs(pairs);
                    if !v.is_zero() {
                        ech.insert(&v);
                    }
                }
            }
            let quotient = Quotient::new(ech);
            let offset = basis.len();
            for (i, &e) in members.iter().enumerate() {
                place[e] = (orbits.len(), i);
            }
            basis.extend(quotient.kept().iter().map(|&k| members[k]));
            orbits.push(Orbit { elems: members, quotient, offset });
        }

        let labels: Vec<Label> = basis
            .iter()
            .map(|&e| Label::Graph {
                code: shapes[elems[e].0].encode(),
                deco: elems[e].1.clone(),
            })
            .collect();
        let weights: Vec<u32> = basis.iter().map(|&e| elem_weight[e]).collect();
        let space = BasedSpace::new_unchecked(labels);
        let mut comp = SpaceComponent {
            shapes,
            shape_index,
            elems,
            elem_index,
            elem_weight,
            place,
            orbits,
            basis,
            component: BimoduleComponent::trivial(b, space.clone()),
            weights,
        };
        let leg_action = |swap: &dyn Fn(&LeveledGraph, usize) -> LeveledGraph, deg: usize| -> Result<Vec<LinMap>> {
            (0..deg.saturating_sub(1))
                .map(|j| {
                    let cols = comp
                        .basis
                        .iter()
                        .map(|&e| {
                            let (s, d) = &comp.elems[e];
                            let g = swap(&comp.shapes[*s], j);
                            comp.project_graph(&g, d)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    LinMap::from_columns(space.clone(), space.clone(), cols)
                })
                .collect()
        };
        let left = leg_action(&|g, j| g.swap_output_legs(j), b.outputs)?;
        let right = leg_action(&|g, j| g.swap_input_legs(j), b.inputs)?;
        comp.component = BimoduleComponent {
            biarity: b,
            left: Representation::new_unchecked(b.outputs, space.clone(), left),
            right: Representation::new_unchecked(b.inputs, space.clone(), right),
            space,
        };
        Ok(comp)
    }

    /// Index of a (possibly non-canonical) decorated graph before the quotient.
    pub fn locate(&self, g: &LeveledGraph, deco: &[usize]) -> Result<usize> {
        self.comp(g.biarity())?.locate(g, deco).ok_or_else(|| {
            let w = self.deco_weight(g, deco);
            if w > self.truncation.max_weight {
                Error::TruncationExceeded(format!("element of weight {w} above the weight bound"))
            } else {
                Error::InvalidGraph("decorated graph is not in this space".into())
            }
        })
    }

    /// Class of a decorated graph in the quotient.
    pub fn project_graph(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        let e = self.locate(g, deco)?;
        Ok(self.comps[&g.biarity()].project_elem(e))
    }

    /// Class of a linear combination of decorated graphs sharing one shape,
    /// given by a vector over the tensor product of the vertex decorations.
    pub fn project_combination(
        &self,
        g: &LeveledGraph,
        terms: &[(Vec<usize>, crate::linalg::Scalar)],
    ) -> Result<SparseVec> {
        let mut acc = SparseVec::new();
        for (d, x) in terms {
            acc = acc.add_scaled(x, &self.project_graph(g, d)?);
        }
        Ok(acc)
    }

    /// Representative of quotient basis vector `i`: canonical shape and decoration.
    pub fn representative(&self, b: Biarity, i: usize) -> (&LeveledGraph, &[usize]) {
        let c = &self.comps[&b];
        let (s, d) = &c.elems[c.basis[i]];
        (&c.shapes[*s], d)
    }

    /// All decorated graphs before the quotient, as `(shape, decoration)`.
    pub fn raw_elements(&self, b: Biarity) -> Vec<(&LeveledGraph, &[usize])> {
        self.comps.get(&b).map_or_else(Vec::new, |c| {
            c.elems.iter().map(|(s, d)| (&c.shapes[*s], d.as_slice())).collect()
        })
    }

    pub fn raw_weight(&self, b: Biarity, e: usize) -> u32 {
        self.comps[&b].elem_weight[e]
    }

    pub fn project_raw(&self, b: Biarity, e: usize) -> SparseVec {
        self.comps[&b].project_elem(e)
    }

    pub fn shapes(&self, b: Biarity) -> &[LeveledGraph] {
        self.comps.get(&b).map_or(&[], |c| &c.shapes)
    }

    /// Number of twist orbits of shapes at `b`.
    pub fn orbit_count(&self, b: Biarity) -> usize {
        self.comps.get(&b).map_or(0, |c| c.orbits.len())
    }

    pub fn component(&self, b: Biarity) -> Option<&BimoduleComponent> {
        self.comps.get(&b).map(|c| &c.component)
    }

    pub fn weights(&self, b: Biarity) -> &[u32] {
        self.comps.get(&b).map_or(&[], |c| &c.weights)
    }

    /// Twist-relation vectors at `b`, in raw coordinates.
    pub fn relation_vectors(&self, b: Biarity) -> Vec<SparseVec> {
        let Some(c) = self.comps.get(&b) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for o in &c.orbits {
            for r in o.quotient.relations().basis() {
                out.push(r.remap(|i| Some(o.elems[i])));
            }
        }
        out
    }

    /// Projection from raw decorated graphs onto the quotient at `b`.
    pub fn projection(&self, b: Biarity) -> LinMap {
        let c = &self.comps[&b];
        let raw = BasedSpace::indexed(c.elems.len());
        let cols = (0..c.elems.len()).map(|e| c.project_elem(e)).collect();
        LinMap::from_columns(raw, c.component.space.clone(), cols).expect("projection columns")
    }

    /// The quotient as an S-bimodule, with a conservative out-of-box support.
    pub fn to_bimodule(&self) -> SBimodule {
        let mut out = SBimodule::zero(self.truncation);
        for c in self.comps.values() {
            out.insert_unchecked(c.component.clone(), c.weights.clone());
        }
        out.set_overflow(self.potential_overflow());
        out
    }

    /// Biarities outside the box that graphs of weight at most the bound could
    /// reach, ignoring levels, with the least weight needed.
    fn potential_overflow(&self) -> BTreeMap<Biarity, u32> {
        let mut types: Vec<(Biarity, u32)> = Vec::new();
        for m in &self.levels {
            for (b, w, _) in m.vertex_types(self.variant) {
                let w = if b == Biarity::UNIT && w == 0 {
                    match m.piece(b).and_then(|p| p.weights.iter().copied().filter(|x| *x > 0).min()) {
                        Some(x) => x,
                        None => continue,
                    }
                } else {
                    w
                };
                types.push((b, w));
            }
        }
        types.sort();
        types.dedup();
        let mut out: BTreeMap<Biarity, u32> = BTreeMap::new();
        let mut cur = Vec::new();
        overflow_multisets(&types, 0, 0, self.truncation.max_weight, &mut cur, &mut |ms, w| {
            let c = ms.len();
            let so: usize = ms.iter().map(|b| b.outputs).sum();
            let si: usize = ms.iter().map(|b| b.inputs).sum();
            let e_min = c - 1;
            let e_max = match self.variant {
                Variant::Properad => so.min(si),
                _ => e_min,
            };
            for e in e_min..=e_max {
                if e > so || e > si {
                    break;
                }
                let b = Biarity::new(so - e, si - e);
                if b == Biarity::new(0, 0) || !self.variant.allows_biarity(b) || self.truncation.contains(b) {
                    continue;
                }
                let slot = out.entry(b).or_insert(w);
                *slot = (*slot).min(w);
            }
        });
        for m in &self.levels {
            for (b, w) in m.overflow() {
                let slot = out.entry(*b).or_insert(*w);
                *slot = (*slot).min(*w);
            }
        }
        out
    }
}

fn overflow_multisets(
    types: &[(Biarity, u32)],
    start: usize,
    w: u32,
    cap: u32,
    cur: &mut Vec<Biarity>,
    f: &mut dyn FnMut(&[Biarity], u32),
) {
    if !cur.is_empty() {
        f(cur, w);
    }
    for j in start..types.len() {
        let (b, c) = types[j];
        if w + c > cap {
            continue;
        }
        cur.push(b);
        overflow_multisets(types, j, w + c, cap, cur, f);
        cur.pop();
    }
}

fn decorations(
    slots: &[&[u32]],
    i: usize,
    w: u32,
    cap: u32,
    cur: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize], u32),
) {
    if i == slots.len() {
        f(cur, w);
        return;
    }
    for (d, x) in slots[i].iter().enumerate() {
        if w + x > cap {
            continue;
        }
        cur.push(d);
        decorations(slots, i + 1, w + x, cap, cur, f);
        cur.pop();
    }
}

impl SpaceComponent {
    fn locate(&self, g: &LeveledGraph, deco: &[usize]) -> Option<usize> {
        let (c, order) = g.canonical();
        let s = *self.shape_index.get(&c.encode())?;
        let d: Vec<usize> = order.iter().map(|&o| deco[o]).collect();
        self.elem_index.get(&(s, d)).copied()
    }

    fn project_elem(&self, e: usize) -> SparseVec {
        let (o, local) = self.place[e];
        let orbit = &self.orbits[o];
        orbit.quotient.project_unit(local).remap(|i| Some(orbit.offset + i))
    }

    fn project_graph(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        let e = self
            .locate(g, deco)
            .ok_or_else(|| Error::InvalidGraph("relabeled graph missing from its own space".into()))?;
        Ok(self.project_elem(e))
    }
}

