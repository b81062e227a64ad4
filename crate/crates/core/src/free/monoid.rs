use super::colimit::FreeMonoid;
use crate::error::{Error, Result};
use crate::graph::{Biarity, LeveledGraph, Truncation, Variant};
use crate::linalg::{Scalar, SparseVec};
use crate::perm::enumerate_symmetric_group;
use crate::product::{boxtimes, expand, level_product, ProductResult, SBimodule, SBimoduleMap};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A monoid for the connected composition product of some variant.
pub trait Monoid {
    fn bimodule(&self) -> &Arc<SBimodule>;
    fn variant(&self) -> Variant;
    /// `M ⊠ M`, whose basis `multiply` is evaluated on.
    fn square(&self) -> Result<&ProductResult>;
    /// `μ` on a two-level graph decorated by basis vectors of `M`.
    fn multiply(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec>;
    /// `η(1) ∈ M(1,1)`.
    fn unit(&self) -> SparseVec;
}

impl Monoid for FreeMonoid {
    fn bimodule(&self) -> &Arc<SBimodule> {
        FreeMonoid::bimodule(self)
    }

    fn variant(&self) -> Variant {
        FreeMonoid::variant(self)
    }

    fn square(&self) -> Result<&ProductResult> {
        FreeMonoid::square(self)
    }

    fn multiply(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        self.compose(g, deco)
    }

    fn unit(&self) -> SparseVec {
        self.class(&LeveledGraph::identity(), &[]).expect("identity class")
    }
}

/// Linear combination of decorated graphs, one vector per vertex, expanded.
pub(crate) fn expand_decorations(decos: &[SparseVec]) -> Vec<(Vec<usize>, Scalar)> {
    expand(decos)
}

/// Evaluates a leveled graph decorated by basis vectors of `m`, contracting
/// the two bottom levels first.
pub fn evaluate<M: Monoid + ?Sized>(m: &M, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
    match g.num_levels() {
        0 => Ok(m.unit()),
        1 => single(m.bimodule(), g, deco),
        k => {
            let sizes: Vec<usize> = [2].into_iter().chain(std::iter::repeat(1).take(k - 2)).collect();
            evaluate_grouped(m, g, deco, &sizes)
        }
    }
}

/// Value of a graph with a single vertex: its decoration, moved by the
/// actions that straighten the leg wiring.
fn single(m: &SBimodule, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
    if g.vertex_count() != 1 {
        return Err(Error::InvalidGraph("expected a single vertex".into()));
    }
    let (l, _, v) = g.vertices().next().expect("one vertex");
    let b = v.biarity;
    let mut x = SparseVec::unit(deco[0]);
    if b == Biarity::UNIT && m.component(b).is_none() {
        return Ok(x);
    }
    let comp = m
        .component(b)
        .ok_or_else(|| Error::InvalidGraph(format!("no component at {b}")))?;
    // leg i feeds input port ins[i]; [s_q ∘ a, x] = [a, R_q x]
    let mut ins: Vec<usize> = if l == 0 { g.feeds()[0].clone() } else { Vec::new() };
    loop {
        let mut pos = vec![0; ins.len()];
        for (i, &p) in ins.iter().enumerate() {
            pos[p] = i;
        }
        let Some(q) = (0..ins.len().saturating_sub(1)).find(|&q| pos[q] > pos[q + 1]) else { break };
        for p in ins.iter_mut() {
            if *p == q {
                *p = q + 1;
            } else if *p == q + 1 {
                *p = q;
            }
        }
        x = comp.right.generator(q).apply(&x);
    }
    // output port p leaves on leg outs[p]; [a ∘ s_q, x] = [a, L_q x]
    let mut outs: Vec<usize> = if l + 1 == g.num_levels() { g.feeds()[l + 1].clone() } else { Vec::new() };
    while let Some(q) = (0..outs.len().saturating_sub(1)).find(|&q| outs[q] > outs[q + 1]) {
        outs.swap(q, q + 1);
        x = comp.left.generator(q).apply(&x);
    }
    Ok(x)
}

/// Evaluates each group of levels (`sizes`, bottom first) separately, then
/// the contracted graph.
pub fn evaluate_grouped<M: Monoid + ?Sized>(
    m: &M,
    g: &LeveledGraph,
    deco: &[usize],
    sizes: &[usize],
) -> Result<SparseVec> {
    let (coarse, parts) = g.contract(sizes)?;
    let values = parts
        .iter()
        .map(|c| {
            let d: Vec<usize> = c.vertices.iter().map(|&f| deco[f]).collect();
            if c.vertices.len() == 1 {
                single(m.bimodule(), &c.graph, &d)
            } else if c.graph.num_levels() == 2 {
                m.multiply(&c.graph, &d)
            } else {
                evaluate(m, &c.graph, &d)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    evaluate_vectors(m, &coarse, &values)
}

/// Evaluates a graph whose vertices carry vectors of `m`.
pub fn evaluate_vectors<M: Monoid + ?Sized>(m: &M, g: &LeveledGraph, decos: &[SparseVec]) -> Result<SparseVec> {
    let mut out = SparseVec::new();
    for (d, c) in expand_decorations(decos) {
        let v = if g.num_levels() == 2 && g.vertex_count() > 1 {
            m.multiply(g, &d)?
        } else {
            evaluate(m, g, &d)?
        };
        out = out.add_scaled(&c, &v);
    }
    Ok(out)
}

/// Outcome of the monoid axiom checks, with the first failing biarity of each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonoidReport {
    pub associativity: Option<Biarity>,
    pub left_unit: Option<Biarity>,
    pub right_unit: Option<Biarity>,
    pub checked: usize,
}

impl MonoidReport {
    pub fn passed(&self) -> bool {
        self.associativity.is_none() && self.left_unit.is_none() && self.right_unit.is_none()
    }

    pub fn first_failure(&self) -> Option<(&'static str, Biarity)> {
        [
            ("associativity", self.associativity),
            ("left unit", self.left_unit),
            ("right unit", self.right_unit),
        ]
        .into_iter()
        .find_map(|(n, b)| b.map(|b| (n, b)))
    }
}

/// Checks associativity on every basis element of `M ⊠ M ⊠ M` and both unit
/// laws on every basis element of `M`.
pub fn verify_monoid<M: Monoid + ?Sized>(m: &M) -> Result<MonoidReport> {
    let bm = m.bimodule();
    let t = bm.truncation();
    let cube = level_product(vec![bm.clone(); 3], m.variant(), t)?;
    let mut report = MonoidReport::default();
    for b in t.biarities() {
        for e in 0..cube.dim(b) {
            let (g, d) = cube.space.representative(b, e);
            let low = evaluate_grouped(m, g, d, &[2, 1])?;
            let high = evaluate_grouped(m, g, d, &[1, 2])?;
            report.checked += 1;
            if low != high {
                report.associativity.get_or_insert(b);
                break;
            }
        }
    }
    let unit = m.unit();
    for b in t.biarities() {
        for x in 0..bm.dim(b) {
            let corolla = LeveledGraph::corolla(b);
            for (above, slot) in [(true, &mut report.left_unit), (false, &mut report.right_unit)] {
                let count = if above { b.outputs } else { b.inputs };
                if count == 0 || slot.is_some() {
                    continue;
                }
                let (g, range) = corolla.insert_unit_level(usize::from(above));
                let mut decos = vec![unit.clone(); g.vertex_count()];
                let xi = if above { 0 } else { range.end };
                decos[xi] = SparseVec::unit(x);
                report.checked += 1;
                if evaluate_vectors(m, &g, &decos)? != SparseVec::unit(x) {
                    *slot = Some(b);
                }
            }
        }
    }
    Ok(report)
}

/// A monoid given by its multiplication on the basis of `M ⊠ M`.
#[derive(Clone, Debug)]
pub struct MonoidPresentation {
    bimodule: Arc<SBimodule>,
    variant: Variant,
    square: ProductResult,
    /// `μ` on the basis of `M ⊠ M`
    mu: SBimoduleMap,
    unit: SparseVec,
}

impl MonoidPresentation {
    pub fn new(bimodule: Arc<SBimodule>, variant: Variant, mu: SBimoduleMap, unit: SparseVec) -> Result<Self> {
        let t = bimodule.truncation();
        let square = boxtimes(&bimodule, &bimodule, variant, t)?;
        if mu.domain().dims() != square.dims() || mu.codomain().dims() != bimodule.dims() {
            return Err(Error::ShapeMismatch("μ does not map M ⊠ M to M".into()));
        }
        Ok(MonoidPresentation { bimodule, variant, square, mu, unit })
    }

    /// Builds `μ` from its value on decorated two-level graphs, checking that
    /// it respects the twist relations.
    pub fn from_graph_fn(
        bimodule: Arc<SBimodule>,
        variant: Variant,
        unit: SparseVec,
        f: impl Fn(&LeveledGraph, &[usize]) -> Result<SparseVec>,
    ) -> Result<Self> {
        let t = bimodule.truncation();
        let square = boxtimes(&bimodule, &bimodule, variant, t)?;
        let mut maps = BTreeMap::new();
        for b in t.biarities() {
            let raw = square.space.raw_elements(b);
            let values = raw.iter().map(|(g, d)| f(g, d)).collect::<Result<Vec<_>>>()?;
            for r in square.relations(b) {
                let mut acc = SparseVec::new();
                for (e, c) in r.entries() {
                    acc = acc.add_scaled(c, &values[*e]);
                }
                if !acc.is_zero() {
                    return Err(Error::NotEquivariant(format!("μ does not respect twists at {b}")));
                }
            }
            let cols = (0..square.dim(b))
                .map(|i| {
                    let (g, d) = square.space.representative(b, i);
                    f(g, d)
                })
                .collect::<Result<Vec<_>>>()?;
            maps.insert(b, cols);
        }
        let mu = SBimoduleMap::from_fn(square.bimodule.clone(), bimodule.clone(), |b, i| Ok(maps[&b][i].clone()))?;
        Ok(MonoidPresentation { bimodule, variant, square, mu, unit })
    }

    pub fn mu(&self) -> &SBimoduleMap {
        &self.mu
    }

    /// The same monoid with `μ` scaled by `c` at `b`.
    pub fn corrupted(&self, b: Biarity, c: &Scalar) -> Result<Self> {
        let mu = SBimoduleMap::from_fn(self.square.bimodule.clone(), self.bimodule.clone(), |bb, i| {
            let v = self.mu.image_of(bb, i);
            Ok(if bb == b { v.scale(c) } else { v })
        })?;
        Ok(MonoidPresentation { mu, ..self.clone() })
    }

    /// Fails with `NotAMonoid` unless all axioms hold.
    pub fn verified(self) -> Result<Self> {
        let r = verify_monoid(&self)?;
        match r.first_failure() {
            None => Ok(self),
            Some((law, b)) => Err(Error::NotAMonoid(format!("{law} fails at {b}"))),
        }
    }
}

impl Monoid for MonoidPresentation {
    fn bimodule(&self) -> &Arc<SBimodule> {
        &self.bimodule
    }

    fn variant(&self) -> Variant {
        self.variant
    }

    fn square(&self) -> Result<&ProductResult> {
        Ok(&self.square)
    }

    fn multiply(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        let v = self.square.space.project_graph(g, deco)?;
        Ok(self.mu.apply(g.biarity(), &v))
    }

    fn unit(&self) -> SparseVec {
        self.unit.clone()
    }
}

/// The associative operad truncated to arities allowed by `t`: `M(1,n)` is
/// either one-dimensional with trivial action or the regular representation
/// of `S_n`, in weight `n - 1`.
pub fn associative(t: Truncation, regular: bool) -> Result<MonoidPresentation> {
    let max_arity = t.max_in.min(t.max_weight as usize + 1);
    if max_arity == 0 || t.max_out == 0 {
        return Err(Error::InvalidInput("truncation leaves no room for (1,1)".into()));
    }
    let mut m = SBimodule::zero(t);
    let mut words: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for n in 1..=max_arity {
        let piece = if regular { SBimodule::zero(t).with_regular(n)? } else { SBimodule::zero(t).with_trivial(Biarity::new(1, n), 1)? };
        let comp = piece.component(Biarity::new(1, n)).expect("component").clone();
        let d = comp.dim();
        m.insert(comp, vec![n as u32 - 1; d])?;
        let ws = if regular {
            enumerate_symmetric_group(n)?.iter().map(|p| p.images().to_vec()).collect()
        } else {
            vec![(0..n).collect()]
        };
        words.insert(n, ws);
    }
    let word_index = |w: &[usize]| -> Result<usize> {
        if regular {
            words[&w.len()]
                .binary_search_by(|x| x.as_slice().cmp(w))
                .map_err(|_| Error::InvalidInput("not a permutation word".into()))
        } else {
            Ok(0)
        }
    };
    let m = Arc::new(m);
    MonoidPresentation::from_graph_fn(m, Variant::Operad, SparseVec::unit(0), |g, d| {
        // read the top word, expanding each letter through the vertex below it
        let in_off = g.in_offsets(0);
        let mut leg_of = vec![0; *in_off.last().unwrap()];
        for (leg, &p) in g.feeds()[0].iter().enumerate() {
            leg_of[p] = leg;
        }
        let top_in = g.in_offsets(1);
        let bottom = g.level(0).len();
        let mut feeding = vec![0; *top_in.last().unwrap()];
        for (lower, &upper) in g.feeds()[1].iter().enumerate() {
            feeding[upper] = lower;
        }
        let mut word = Vec::new();
        for x in 0..g.level(1).len() {
            let top_word = &words[&g.level(1)[x].biarity.inputs][d[bottom + x]];
            for &letter in top_word {
                let v = feeding[top_in[x] + letter];
                let vb = g.level(0)[v].biarity.inputs;
                for &l in &words[&vb][d[v]] {
                    word.push(leg_of[in_off[v] + l]);
                }
            }
        }
        Ok(SparseVec::unit(word_index(&word)?))
    })
}

/// The counit `c_M : F(M) → M`, for `fm` free on the underlying bimodule of `m`.
pub fn counit<M: Monoid + ?Sized>(fm: &FreeMonoid, m: &M) -> Result<SBimoduleMap> {
    check_generators(fm, m.bimodule())?;
    let id = SBimoduleMap::identity(m.bimodule().clone());
    extension_unchecked(fm, &id, m)
}

/// The monoid morphism `F(V) → M` extending `f : V → M`.
pub fn free_extension<M: Monoid + ?Sized>(fm: &FreeMonoid, f: &SBimoduleMap, m: &M) -> Result<SBimoduleMap> {
    check_generators(fm, f.domain())?;
    if f.codomain().dims() != m.bimodule().dims() {
        return Err(Error::ShapeMismatch("map does not land in the monoid".into()));
    }
    f.check_equivariant()?;
    extension_unchecked(fm, f, m)
}

fn check_generators(fm: &FreeMonoid, v: &SBimodule) -> Result<()> {
    if fm.generators().dims() != v.dims() {
        return Err(Error::ShapeMismatch("free monoid is on a different bimodule".into()));
    }
    Ok(())
}

fn extension_unchecked<M: Monoid + ?Sized>(fm: &FreeMonoid, f: &SBimoduleMap, m: &M) -> Result<SBimoduleMap> {
    let aug = fm.augmented();
    let unit = m.unit();
    SBimoduleMap::from_fn(fm.bimodule().clone(), m.bimodule().clone(), |b, i| {
        let (g, d) = fm.representative(b, i);
        let decos: Vec<SparseVec> = g
            .vertices()
            .zip(&d)
            .map(|((_, _, v), &x)| match aug.lower(v.biarity, x) {
                Some(e) => f.image_of(v.biarity, e),
                None => unit.clone(),
            })
            .collect();
        evaluate_vectors(m, &g, &decos)
    })
}

/// `F(f) : F(V) → F(W)` for `f : V → W`.
pub fn free_map(source: &FreeMonoid, f: &SBimoduleMap, target: &FreeMonoid) -> Result<SBimoduleMap> {
    check_generators(source, f.domain())?;
    check_generators(target, f.codomain())?;
    let (sa, ta) = (source.augmented(), target.augmented());
    SBimoduleMap::from_fn(source.bimodule().clone(), target.bimodule().clone(), |b, i| {
        let (g, d) = source.representative(b, i);
        let decos: Vec<SparseVec> = g
            .vertices()
            .zip(&d)
            .map(|((_, _, v), &x)| match sa.lower(v.biarity, x) {
                Some(e) => f.image_of(v.biarity, e).remap(|k| Some(ta.lift(v.biarity, k))),
                None => SparseVec::unit(0),
            })
            .collect();
        let mut out = SparseVec::new();
        for (dd, c) in expand_decorations(&decos) {
            out = out.add_scaled(&c, &target.class(&g, &dd)?);
        }
        Ok(out)
    })
}

/// Whether `phi : A → B` satisfies `phi ∘ μ_A = μ_B ∘ (phi ⊠ phi)` and
/// `phi ∘ η_A = η_B`.
pub fn is_monoid_morphism<A: Monoid + ?Sized, B: Monoid + ?Sized>(phi: &SBimoduleMap, a: &A, b: &B) -> Result<bool> {
    if phi.apply(Biarity::UNIT, &a.unit()) != b.unit() {
        return Ok(false);
    }
    let sq = a.square()?;
    for bb in a.bimodule().truncation().biarities() {
        for e in 0..sq.dim(bb) {
            let (g, d) = sq.space.representative(bb, e);
            let lhs = phi.apply(bb, &a.multiply(g, d)?);
            let decos: Vec<SparseVec> = g.vertices().zip(d).map(|((_, _, v), &x)| phi.image_of(v.biarity, x)).collect();
            if lhs != evaluate_vectors(b, g, &decos)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
