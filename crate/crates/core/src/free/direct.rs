use super::colimit::FreeMonoid;
use super::monoid::{expand_decorations, Monoid};
use crate::error::{Error, Result};
use crate::graph::{enumerate_graphs, graft, Biarity, GraphShape, LeveledGraph, Variant};
use crate::linalg::{BasedSpace, Echelon, Label, LinMap, Quotient, Scalar, SparseVec};
use crate::perm::{BimoduleComponent, Representation};
use crate::product::{boxtimes, ProductResult, SBimodule, SBimoduleMap};
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

/// `F(V)` with basis given by graphs without levels: decorated connected
/// graphs of the variant, modulo twists at every vertex.
#[derive(Debug)]
pub struct DirectFree {
    variant: Variant,
    base: Arc<SBimodule>,
    bimodule: Arc<SBimodule>,
    comps: BTreeMap<Biarity, GraphComponent>,
    square: OnceLock<ProductResult>,
}

#[derive(Debug)]
struct GraphComponent {
    shapes: Vec<GraphShape>,
    elems: Vec<(usize, Vec<usize>)>,
    elem_index: HashMap<(usize, Vec<usize>), usize>,
    shape_index: HashMap<Vec<u8>, usize>,
    /// per element: (orbit, position in orbit)
    place: Vec<(usize, usize)>,
    /// per orbit: quotient and offset of its kept elements in the basis
    orbits: Vec<(Quotient, usize)>,
    basis: Vec<usize>,
}

impl GraphComponent {
    fn project_elem(&self, e: usize) -> SparseVec {
        let (o, local) = self.place[e];
        let (q, offset) = &self.orbits[o];
        q.project_unit(local).remap(|i| Some(offset + i))
    }

    fn project(&self, g: &GraphShape, deco: &[usize]) -> Result<SparseVec> {
        let (c, order) = g.canonical();
        let d: Vec<usize> = order.iter().map(|&o| deco[o]).collect();
        let e = self
            .shape_index
            .get(&c.encode())
            .and_then(|s| self.elem_index.get(&(*s, d)))
            .ok_or_else(|| Error::InvalidGraph("decorated graph outside the space".into()))?;
        Ok(self.project_elem(*e))
    }
}

impl DirectFree {
    /// Generators are placed in weight 1 whatever their grading in `v`.
    pub fn new(v: &SBimodule, variant: Variant) -> Result<Self> {
        let t = v.truncation();
        if let Some(b) = v.support().find(|b| !variant.allows_biarity(*b)) {
            return Err(Error::InvalidInput(format!("{variant} generators cannot have biarity {b}")));
        }
        let base = Arc::new(v.regraded(1)?);
        let support: Vec<Biarity> = base.support().collect();
        let mut comps = BTreeMap::new();
        let mut out = SBimodule::zero(t);
        for b in t.biarities() {
            let shapes = enumerate_graphs(t.max_weight as usize, &support, b, variant);
            let (comp, component) = build_component(&base, b, shapes)?;
            if !comp.basis.is_empty() {
                let weights = comp.basis.iter().map(|&e| comp.shapes[comp.elems[e].0].vertex_count() as u32).collect();
                out.insert(component, weights)?;
            }
            comps.insert(b, comp);
        }
        Ok(DirectFree {
            variant,
            base,
            bimodule: Arc::new(out),
            comps,
            square: OnceLock::new(),
        })
    }

    pub fn bimodule(&self) -> &Arc<SBimodule> {
        &self.bimodule
    }

    pub fn generators(&self) -> &Arc<SBimodule> {
        &self.base
    }

    pub fn dim(&self, b: Biarity) -> usize {
        self.bimodule.dim(b)
    }

    pub fn dim_weight(&self, b: Biarity, w: u32) -> usize {
        self.bimodule.dim_weight(b, w)
    }

    /// Graph and vertex decorations (basis vectors of `V`) of basis vector `i`.
    pub fn representative(&self, b: Biarity, i: usize) -> (&GraphShape, &[usize]) {
        let c = &self.comps[&b];
        let (s, d) = &c.elems[c.basis[i]];
        (&c.shapes[*s], d)
    }

    /// Class of a graph decorated by basis vectors of `V`.
    pub fn class(&self, g: &GraphShape, deco: &[usize]) -> Result<SparseVec> {
        let b = g.biarity();
        self.comps
            .get(&b)
            .ok_or_else(|| Error::TruncationExceeded(format!("biarity {b} outside the truncation")))?
            .project(g, deco)
    }

    /// `u_V : V → F(V)`.
    pub fn unit_map(&self) -> Result<SBimoduleMap> {
        SBimoduleMap::from_fn(self.base.clone(), self.bimodule.clone(), |b, i| {
            let g = GraphShape::new(b, vec![b], vec![(0..b.inputs).map(crate::graph::End::Leg).collect()], {
                (0..b.outputs).map(|p| crate::graph::End::Port { vertex: 0, port: p }).collect()
            })?;
            self.class(&g, &[i])
        })
    }

    /// `μ̄ : F ⊠ F → F` by grafting.
    pub fn mu(&self) -> Result<SBimoduleMap> {
        let sq = Monoid::square(self)?;
        SBimoduleMap::from_fn(sq.bimodule.clone(), self.bimodule.clone(), |b, e| {
            let (g, d) = sq.space.representative(b, e);
            self.multiply(g, d)
        })
    }
}

fn build_component(base: &SBimodule, b: Biarity, shapes: Vec<GraphShape>) -> Result<(GraphComponent, BimoduleComponent)> {
    let shape_index: HashMap<Vec<u8>, usize> = shapes.iter().enumerate().map(|(i, g)| (g.encode(), i)).collect();
    let mut elems = Vec::new();
    for (s, g) in shapes.iter().enumerate() {
        let dims: Vec<usize> = g.vertices().iter().map(|vb| base.dim(*vb)).collect();
        let mut cur = vec![0; dims.len()];
        if dims.contains(&0) {
            continue;
        }
        loop {
            elems.push((s, cur.clone()));
            let mut i = 0;
            while i < dims.len() {
                cur[i] += 1;
                if cur[i] < dims[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
            if i == dims.len() {
                break;
            }
        }
    }
    let elem_index: HashMap<(usize, Vec<usize>), usize> = elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();

    // relations, grouped by connected orbits of shapes
    let mut relations: Vec<SparseVec> = Vec::new();
    let mut parent: Vec<usize> = (0..shapes.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (s, d) in &elems {
        let g = &shapes[*s];
        for (v, vb) in g.vertices().iter().enumerate() {
            let comp = base.component(*vb).expect("decorated vertex has a component");
            for (inputs, arity) in [(true, vb.inputs), (false, vb.outputs)] {
                for q in 0..arity.saturating_sub(1) {
                    let t = if inputs { g.twist_inputs(v, q) } else { g.twist_outputs(v, q) };
                    let (c, order) = t.canonical();
                    let target = shape_index[&c.encode()];
                    let (ra, rb) = (find(&mut parent, *s), find(&mut parent, target));
                    parent[ra.max(rb)] = ra.min(rb);
                    let moved: Vec<usize> = order.iter().map(|&o| d[o]).collect();
                    let mut pairs = vec![(elem_index[&(target, moved)], Scalar::one())];
                    let rep = if inputs { &comp.right } else { &comp.left };
                    for (x, coef) in rep.generator(q).column(d[v]).entries() {
                        let mut d2 = d.clone();
                        d2[v] = *x;
                        pairs.push((elem_index[&(*s, d2)], -coef.clone()));
                    }
                    let r = SparseVec::from_pairs(pairs);
                    if !r.is_zero() {
                        relations.push(r);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (e, (s, _)) in elems.iter().enumerate() {
        let r = find(&mut parent, *s);
        groups.entry(r).or_default().push(e);
    }
    let mut place = vec![(0, 0); elems.len()];
    let mut orbit_of = vec![0; elems.len()];
    let mut echelons = Vec::new();
    let mut members_of = Vec::new();
    for (o, members) in groups.into_values().enumerate() {
        for (i, &e) in members.iter().enumerate() {
            place[e] = (o, i);
            orbit_of[e] = o;
        }
        echelons.push(Echelon::new(members.len()));
        members_of.push(members);
    }
    for r in &relations {
        let o = orbit_of[r.entries()[0].0];
        echelons[o].insert(&r.remap(|e| Some(place[e].1)));
    }
    let mut orbits = Vec::new();
    let mut basis = Vec::new();
    for (ech, members) in echelons.into_iter().zip(&members_of) {
        let q = Quotient::new(ech);
        let offset = basis.len();
        basis.extend(q.kept().iter().map(|&k| members[k]));
        orbits.push((q, offset));
    }
    let comp = GraphComponent { shapes, elems, elem_index, shape_index, place, orbits, basis };
    let space = BasedSpace::new(
        comp.basis
            .iter()
            .map(|&e| Label::Graph { code: comp.shapes[comp.elems[e].0].encode(), deco: comp.elems[e].1.clone() })
            .collect(),
    )?;
    let action = |swap: &dyn Fn(&GraphShape, usize) -> GraphShape, deg: usize| -> Result<Vec<LinMap>> {
        (0..deg.saturating_sub(1))
            .map(|j| {
                let cols = comp
                    .basis
                    .iter()
                    .map(|&e| {
                        let (s, d) = &comp.elems[e];
                        comp.project(&swap(&comp.shapes[*s], j), d)
                    })
                    .collect::<Result<Vec<_>>>()?;
                LinMap::from_columns(space.clone(), space.clone(), cols)
            })
            .collect()
    };
    let left = action(&|g, j| g.swap_output_legs(j), b.outputs)?;
    let right = action(&|g, j| g.swap_input_legs(j), b.inputs)?;
    let component = BimoduleComponent {
        biarity: b,
        left: Representation::new_unchecked(b.outputs, space.clone(), left),
        right: Representation::new_unchecked(b.inputs, space.clone(), right),
        space,
    };
    Ok((comp, component))
}

impl Monoid for DirectFree {
    fn bimodule(&self) -> &Arc<SBimodule> {
        &self.bimodule
    }

    fn variant(&self) -> Variant {
        self.variant
    }

    fn square(&self) -> Result<&ProductResult> {
        if let Some(s) = self.square.get() {
            return Ok(s);
        }
        let s = boxtimes(&self.bimodule, &self.bimodule, self.variant, self.bimodule.truncation())?;
        Ok(self.square.get_or_init(|| s))
    }

    fn multiply(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        let mut inner = Vec::with_capacity(deco.len());
        let mut d = Vec::new();
        for ((_, _, v), &x) in g.vertices().zip(deco) {
            let (h, hd) = self.representative(v.biarity, x);
            inner.push(h.clone());
            d.extend_from_slice(hd);
        }
        let shape = graft(g, &inner)?;
        if shape.vertex_count() as u32 > self.bimodule.truncation().max_weight {
            return Err(Error::TruncationExceeded("grafted graph exceeds the weight bound".into()));
        }
        self.class(&shape, &d)
    }

    fn unit(&self) -> SparseVec {
        self.class(&GraphShape::identity(), &[]).expect("identity class")
    }
}

/// One row of the comparison between the two constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub biarity: Biarity,
    pub weight: u32,
    pub dim_colimit: usize,
    pub dim_direct: usize,
    /// rank of the level-forgetting map on this piece
    pub rank: usize,
}

impl ComparisonRow {
    pub fn matches(&self) -> bool {
        self.dim_colimit == self.dim_direct && self.rank == self.dim_colimit
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub intertwines: bool,
    /// the level-forgetting map `F(V) → F_direct(V)`
    pub map: SBimoduleMap,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.intertwines && self.rows.iter().all(ComparisonRow::matches)
    }
}

/// Sends a leveled representative of `F(V)` to its graph without levels.
pub fn forget_map(f: &FreeMonoid, d: &DirectFree) -> Result<SBimoduleMap> {
    let aug = f.augmented();
    SBimoduleMap::from_fn(f.bimodule().clone(), d.bimodule().clone(), |b, i| {
        let (g, deco) = f.representative(b, i);
        let mut strands = Vec::new();
        let mut kept = Vec::new();
        for (k, ((_, _, v), &x)) in g.vertices().zip(&deco).enumerate() {
            match aug.lower(v.biarity, x) {
                Some(e) => kept.push(e),
                None => strands.push(k),
            }
        }
        d.class(&g.mark_strands(&strands).forget_levels(), &kept)
    })
}

/// Compares the colimit and the graph-basis constructions piece by piece and
/// checks that forgetting levels intertwines the multiplications.
pub fn compare_constructions(f: &FreeMonoid, d: &DirectFree) -> Result<ComparisonReport> {
    let map = forget_map(f, d)?;
    let t = f.bimodule().truncation();
    let mut rows = Vec::new();
    for b in t.biarities() {
        let m = map.at(b);
        for w in 0..=t.max_weight {
            let (dc, dd) = (f.dim_weight(b, w), d.dim_weight(b, w));
            if dc == 0 && dd == 0 {
                continue;
            }
            let src: Vec<usize> = (0..f.dim(b)).filter(|&i| f.locate(b, i).0 == w).collect();
            let cols: Vec<SparseVec> = src.iter().map(|&i| m.column(i).clone()).collect();
            let rank = Echelon::from_vectors(d.dim(b), cols.iter()).rank();
            rows.push(ComparisonRow { biarity: b, weight: w, dim_colimit: dc, dim_direct: dd, rank });
        }
    }
    let sq = f.square()?;
    let mut intertwines = true;
    'outer: for b in t.biarities() {
        for e in 0..sq.dim(b) {
            let (g, deco) = sq.space.representative(b, e);
            let lhs = map.apply(b, &f.compose(g, deco)?);
            let decos: Vec<SparseVec> = g.vertices().zip(deco).map(|((_, _, v), &x)| map.image_of(v.biarity, x)).collect();
            let mut rhs = SparseVec::new();
            for (dd, c) in expand_decorations(&decos) {
                rhs = rhs.add_scaled(&c, &d.multiply(g, &dd)?);
            }
            if lhs != rhs {
                intertwines = false;
                break 'outer;
            }
        }
    }
    Ok(ComparisonReport { rows, intertwines, map })
}
