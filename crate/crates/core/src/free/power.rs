use crate::error::{Error, Result};
use crate::graph::{Biarity, LeveledGraph, Truncation, Variant, Vertex};
use crate::linalg::{BasedSpace, Echelon, LinMap, Quotient, SparseVec, SubspaceInclusion};
use crate::product::{quotient_bimodule, unit_bimodule, ProductResult, SBimodule, SBimoduleMap};
use std::collections::BTreeMap;
use std::sync::Arc;

/// `V_+ = I ⊕ V` with `η : I → V_+` and `ε : V_+ → I`. In `V_+(1,1)` the
/// unit is basis vector 0.
#[derive(Clone, Debug)]
pub struct AugmentedObject {
    pub base: Arc<SBimodule>,
    pub plus: Arc<SBimodule>,
    pub unit: Arc<SBimodule>,
    pub eta: SBimoduleMap,
    pub epsilon: SBimoduleMap,
}

impl AugmentedObject {
    pub fn new(base: Arc<SBimodule>) -> Result<Self> {
        let unit = Arc::new(unit_bimodule(base.truncation()));
        let plus = Arc::new(unit.direct_sum(&base)?);
        let eta = SBimoduleMap::from_fn(unit.clone(), plus.clone(), |_, _| Ok(SparseVec::unit(0)))?;
        let epsilon = SBimoduleMap::from_fn(plus.clone(), unit.clone(), |b, i| {
            Ok(if b == Biarity::UNIT && i == 0 { SparseVec::unit(0) } else { SparseVec::new() })
        })?;
        Ok(AugmentedObject { base, plus, unit, eta, epsilon })
    }

    /// Index in `V_+` of basis vector `i` of `V` at `b`.
    pub fn lift(&self, b: Biarity, i: usize) -> usize {
        i + usize::from(b == Biarity::UNIT)
    }

    /// Index in `V` of a non-unit basis vector of `V_+`.
    pub fn lower(&self, b: Biarity, i: usize) -> Option<usize> {
        if b == Biarity::UNIT {
            i.checked_sub(1)
        } else {
            Some(i)
        }
    }

    pub fn is_unit(&self, b: Biarity, i: usize) -> bool {
        b == Biarity::UNIT && i == 0
    }

    pub fn truncation(&self) -> Truncation {
        self.base.truncation()
    }
}

/// `V_n = V_+^{⊠n}` on `n`-level graphs; `V_0 = I`.
#[derive(Clone, Debug)]
pub struct LevelPower {
    pub n: usize,
    space: Option<ProductResult>,
    bimodule: Arc<SBimodule>,
}

impl LevelPower {
    /// Keeps only elements of weight at least `floor`.
    pub fn new(aug: &AugmentedObject, n: usize, v: Variant, floor: u32) -> Result<Self> {
        if n == 0 {
            return Ok(LevelPower { n, space: None, bimodule: aug.unit.clone() });
        }
        let t = aug.truncation();
        let space = crate::product::LeveledSpace::with_floor(vec![aug.plus.clone(); n], v, t, floor)?;
        let bimodule = Arc::new(space.to_bimodule());
        let space = ProductResult { space, bimodule: bimodule.clone() };
        Ok(LevelPower { n, space: Some(space), bimodule })
    }

    pub fn bimodule(&self) -> &Arc<SBimodule> {
        &self.bimodule
    }

    pub fn product(&self) -> Option<&ProductResult> {
        self.space.as_ref()
    }

    pub fn dim(&self, b: Biarity) -> usize {
        self.bimodule.dim(b)
    }

    /// Class of a decorated `n`-level graph.
    pub fn class(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        match &self.space {
            None => {
                if g.num_levels() == 0 && g.biarity() == Biarity::UNIT {
                    Ok(SparseVec::unit(0))
                } else {
                    Err(Error::InvalidGraph("not an element of I".into()))
                }
            }
            Some(p) => p.space.project_graph(g, deco),
        }
    }

    pub fn representative(&self, b: Biarity, i: usize) -> (LeveledGraph, Vec<usize>) {
        match &self.space {
            None => (LeveledGraph::identity(), Vec::new()),
            Some(p) => {
                let (g, d) = p.space.representative(b, i);
                (g.clone(), d.to_vec())
            }
        }
    }

    /// Degeneracy `η_i : V_n → V_{n+1}`, inserting a unit level below the
    /// top `i` levels.
    pub fn eta(&self, i: usize, target: &LevelPower) -> Result<SBimoduleMap> {
        if target.n != self.n + 1 || i > self.n {
            return Err(Error::ShapeMismatch(format!("η_{i} from V_{} to V_{}", self.n, target.n)));
        }
        SBimoduleMap::from_fn(self.bimodule.clone(), target.bimodule.clone(), |b, k| {
            let (g, d) = self.representative(b, k);
            let (g2, d2) = insert_units(&g, &d, self.n - i);
            target.class(&g2, &d2)
        })
    }
}

/// Inserts a unit-decorated level at position `pos` (from the bottom).
pub(crate) fn insert_units(g: &LeveledGraph, deco: &[usize], pos: usize) -> (LeveledGraph, Vec<usize>) {
    let (g2, range) = g.insert_unit_level(pos);
    let mut d2 = deco[..range.start].to_vec();
    d2.extend(std::iter::repeat(0).take(range.len()));
    d2.extend_from_slice(&deco[range.start..]);
    (g2, d2)
}

/// `τ : V → V_2`, `x ↦ (x below a unit level) − (x above a unit level)`.
pub fn tau(aug: &AugmentedObject, v2: &LevelPower) -> Result<SBimoduleMap> {
    SBimoduleMap::from_fn(aug.base.clone(), v2.bimodule.clone(), |b, i| {
        let x = LeveledGraph::corolla(b);
        let d = [aug.lift(b, i)];
        let (low, dl) = insert_units(&x, &d, 1);
        let (high, dh) = insert_units(&x, &d, 0);
        Ok(v2.class(&low, &dl)?.sub(&v2.class(&high, &dh)?))
    })
}

/// Level-swap differences with the swapped pair at levels `(j, j+1)`: a
/// generator above units equals the generator below units.
///
/// `space` must have `V_+` on levels `j` and `j+1`.
pub fn swap_relations(
    space: &ProductResult,
    aug: &AugmentedObject,
    j: usize,
    b: Biarity,
) -> Result<Vec<SparseVec>> {
    let k = space.space.num_levels();
    if j + 1 >= k {
        return Ok(Vec::new());
    }
    let sizes: Vec<usize> = (0..j).map(|_| 1).chain([2]).chain((j + 2..k).map(|_| 1)).collect();
    let mut out = Vec::new();
    let raw = space.space.raw_elements(b);
    // Per shape, candidate moves: (x flat index, lower unit flat indices,
    // moved shape, source of each moved vertex: Some(old flat) or None = unit).
    let mut cache: BTreeMap<Vec<u8>, Vec<(usize, Vec<usize>, LeveledGraph, Vec<Option<usize>>)>> = BTreeMap::new();
    for (e, (g, deco)) in raw.iter().enumerate() {
        let moves = match cache.get(&g.encode()) {
            Some(m) => m,
            None => {
                let m = moves_for(g, j, &sizes)?;
                cache.entry(g.encode()).or_insert(m)
            }
        };
        for (x, lower, moved, source) in moves {
            let (xl, xb) = vertex_info(g, *x);
            debug_assert_eq!(xl, j + 1);
            if aug.is_unit(xb, deco[*x]) || lower.iter().any(|u| deco[*u] != 0) {
                continue;
            }
            let d2: Vec<usize> = source
                .iter()
                .map(|s| s.map_or(0, |o| deco[o]))
                .collect();
            let down = space.space.project_graph(moved, &d2)?;
            let v = space.space.project_raw(b, e).sub(&down);
            if !v.is_zero() {
                out.push(v);
            }
        }
    }
    Ok(out)
}

fn vertex_info(g: &LeveledGraph, f: usize) -> (usize, Biarity) {
    let (l, _, v) = g.vertices().nth(f).expect("vertex exists");
    (l, v.biarity)
}

type Move = (usize, Vec<usize>, LeveledGraph, Vec<Option<usize>>);

fn moves_for(g: &LeveledGraph, j: usize, sizes: &[usize]) -> Result<Vec<Move>> {
    let comps = g.components(j, j + 1);
    let (coarse, parts) = g.contract(sizes)?;
    let offset: usize = (0..j).map(|l| g.level(l).len()).sum();
    let mut out = Vec::new();
    for (ci, c) in comps.iter().enumerate() {
        let pg = &c.graph;
        if pg.level(1).len() != 1 {
            continue;
        }
        let xb = pg.level(1)[0].biarity;
        let lower = pg.level(0);
        if lower.len() != xb.inputs || lower.iter().any(|v| v.biarity != Biarity::UNIT) {
            continue;
        }
        // input leg i -> x input port
        let pi: Vec<usize> = (0..xb.inputs).map(|i| pg.feeds()[1][pg.feeds()[0][i]]).collect();
        let down = LeveledGraph::new(
            vec![vec![Vertex::node(xb)], vec![Vertex::node(Biarity::UNIT); xb.outputs]],
            vec![pi, (0..xb.outputs).collect(), pg.feeds()[2].clone()],
        )?;
        let target = offset + ci;
        let mut new_parts: Vec<LeveledGraph> = parts.iter().map(|p| p.graph.clone()).collect();
        new_parts[target] = down;
        let (moved, origin) = coarse.substitute(sizes, &new_parts)?;
        let x_flat = c.vertices[lower.len()];
        let source: Vec<Option<usize>> = origin
            .iter()
            .map(|&(p, pv)| {
                if p == target {
                    (pv == 0).then_some(x_flat)
                } else {
                    Some(parts[p].vertices[pv])
                }
            })
            .collect();
        let lower_flat = c.vertices[..lower.len()].to_vec();
        out.push((x_flat, lower_flat, moved, source));
    }
    Ok(out)
}

/// `Ṽ_n = V_n / R_n` with `R_n` the sum of the level-swap relations over all
/// adjacent level pairs.
#[derive(Clone, Debug)]
pub struct TildeQuotient {
    pub n: usize,
    pub power: LevelPower,
    relations: BTreeMap<Biarity, SubspaceInclusion>,
    quotients: BTreeMap<Biarity, Quotient>,
    bimodule: Arc<SBimodule>,
}

impl TildeQuotient {
    pub fn new(aug: &AugmentedObject, power: LevelPower) -> Result<Self> {
        let t = aug.truncation();
        let mut relations = BTreeMap::new();
        let mut echelons = BTreeMap::new();
        for b in t.biarities() {
            let mut vectors = Vec::new();
            if let Some(p) = power.product() {
                for j in 0..power.n.saturating_sub(1) {
                    vectors.extend(swap_relations(p, aug, j, b)?);
                }
            }
            let ech = Echelon::from_vectors(power.dim(b), vectors.iter());
            relations.insert(b, SubspaceInclusion::spanned_by(&power.bimodule().space(b), &ech.basis()));
            echelons.insert(b, ech);
        }
        let (bimodule, _, quotients) = quotient_bimodule(power.bimodule(), &echelons)?;
        Ok(TildeQuotient {
            n: power.n,
            power,
            relations,
            quotients,
            bimodule,
        })
    }

    pub fn bimodule(&self) -> &Arc<SBimodule> {
        &self.bimodule
    }

    pub fn dim(&self, b: Biarity) -> usize {
        self.bimodule.dim(b)
    }

    /// `R_n` at `b`, inside `V_n`.
    pub fn relations(&self, b: Biarity) -> Option<&SubspaceInclusion> {
        self.relations.get(&b)
    }

    pub fn quotient(&self, b: Biarity) -> Option<&Quotient> {
        self.quotients.get(&b)
    }

    /// `π_n` applied to a vector of `V_n`.
    pub fn project(&self, b: Biarity, v: &SparseVec) -> SparseVec {
        self.quotients.get(&b).map_or_else(SparseVec::new, |q| q.project(v))
    }

    /// The `V_n` basis index underlying `Ṽ_n` basis vector `i`.
    pub fn section(&self, b: Biarity, i: usize) -> usize {
        self.quotients[&b].section_unit(i)
    }

    /// Decorated graph representing `Ṽ_n` basis vector `i`.
    pub fn representative(&self, b: Biarity, i: usize) -> (LeveledGraph, Vec<usize>) {
        self.power.representative(b, self.section(b, i))
    }

    /// Class in `Ṽ_n` of a decorated `n`-level graph.
    pub fn class(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        Ok(self.project(g.biarity(), &self.power.class(g, deco)?))
    }

    /// Basis indices of weight `w` at `b`.
    pub fn weight_part(&self, b: Biarity, w: u32) -> Vec<usize> {
        self.bimodule
            .weights(b)
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == w)
            .map(|(i, _)| i)
            .collect()
    }

    /// `η̃_i : Ṽ_n → Ṽ_{n+1}` on the whole space.
    pub fn eta_tilde(&self, i: usize, next: &TildeQuotient) -> Result<SBimoduleMap> {
        SBimoduleMap::from_fn(self.bimodule.clone(), next.bimodule.clone(), |b, k| {
            let (g, d) = self.representative(b, k);
            let (g2, d2) = insert_units(&g, &d, self.n - i);
            next.class(&g2, &d2)
        })
    }

    /// `η̃` restricted to weight `w` at `b`, in weight-part coordinates.
    pub fn eta_tilde_weight(&self, next: &TildeQuotient, b: Biarity, w: u32) -> Result<LinMap> {
        let src = self.weight_part(b, w);
        let dst = next.weight_part(b, w);
        let pos: BTreeMap<usize, usize> = dst.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let cols = src
            .iter()
            .map(|&k| {
                let (g, d) = self.representative(b, k);
                let (g2, d2) = insert_units(&g, &d, self.n);
                let v = next.class(&g2, &d2)?;
                Ok(v.remap(|i| pos.get(&i).copied()))
            })
            .collect::<Result<Vec<_>>>()?;
        LinMap::from_columns(BasedSpace::indexed(src.len()), BasedSpace::indexed(dst.len()), cols)
    }
}
