use crate::error::{Error, Result};
use crate::graph::{Biarity, Truncation, Variant};
use crate::linalg::{BasedSpace, Echelon, Label, LinMap, Quotient, SparseVec};
use crate::perm::{BimoduleComponent, Representation};
use std::collections::BTreeMap;
use std::sync::Arc;

/// One nonzero component together with the weight of each basis vector.
#[derive(Clone, Debug)]
pub struct Piece {
    pub component: BimoduleComponent,
    pub weights: Vec<u32>,
}

impl Piece {
    pub fn dim(&self) -> usize {
        self.component.dim()
    }

    pub fn min_weight(&self) -> u32 {
        self.weights.iter().copied().min().unwrap_or(u32::MAX)
    }
}

/// A weight-graded S-bimodule, exact on the biarities of its truncation box.
///
/// `overflow` lists biarities outside the box where the object may be
/// nonzero, with a lower bound on the weight found there.
#[derive(Clone, Debug)]
pub struct SBimodule {
    truncation: Truncation,
    pieces: BTreeMap<Biarity, Piece>,
    overflow: BTreeMap<Biarity, u32>,
}

impl SBimodule {
    pub fn zero(truncation: Truncation) -> Self {
        SBimodule {
            truncation,
            pieces: BTreeMap::new(),
            overflow: BTreeMap::new(),
        }
    }

    /// Adds (or replaces) a component after validating actions and weights.
    pub fn insert(&mut self, component: BimoduleComponent, weights: Vec<u32>) -> Result<()> {
        let b = component.biarity;
        if b == Biarity::new(0, 0) {
            return Err(Error::InvalidInput("components of biarity (0,0) are not allowed".into()));
        }
        if !self.truncation.contains(b) {
            return Err(Error::TruncationExceeded(format!("component {b} outside the truncation")));
        }
        if weights.len() != component.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for a {}-dimensional component",
                weights.len(),
                component.dim()
            )));
        }
        if weights.contains(&0) && b != Biarity::UNIT {
            return Err(Error::InvalidInput(format!("weight 0 basis vector at {b}")));
        }
        let report = component.validate();
        if let Some((side, v)) = report.violation {
            return Err(Error::NotEquivariant(format!("{b} {side:?} action: {v}")));
        }
        let gens = component.left.generators().iter().chain(component.right.generators());
        for g in gens {
            for (j, col) in g.columns().iter().enumerate() {
                if col.entries().iter().any(|(i, _)| weights[*i] != weights[j]) {
                    return Err(Error::NotEquivariant(format!("action at {b} mixes weights")));
                }
            }
        }
        if component.dim() > 0 {
            self.pieces.insert(b, Piece { component, weights });
        } else {
            self.pieces.remove(&b);
        }
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, component: BimoduleComponent, weights: Vec<u32>) {
        if component.dim() > 0 {
            self.pieces.insert(component.biarity, Piece { component, weights });
        }
    }

    pub(crate) fn set_overflow(&mut self, overflow: BTreeMap<Biarity, u32>) {
        self.overflow = overflow;
    }

    /// Convenience: `count` generators of weight 1 at `b`, with trivial actions.
    pub fn with_trivial(mut self, b: Biarity, count: usize) -> Result<Self> {
        let names = (0..count).map(|i| Label::Name(format!("g{b}{i}"))).collect();
        let space = BasedSpace::new(names)?;
        self.insert(BimoduleComponent::trivial(b, space), vec![1; count])?;
        Ok(self)
    }

    /// Convenience: the regular representation of `S_n` at `(1, n)` in weight 1.
    pub fn with_regular(mut self, n: usize) -> Result<Self> {
        let right = Representation::regular(n)?;
        let space = right.space().clone();
        let comp = BimoduleComponent {
            biarity: Biarity::new(1, n),
            left: Representation::trivial(1, &space),
            right,
            space,
        };
        let d = comp.dim();
        self.insert(comp, vec![1; d])?;
        Ok(self)
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn piece(&self, b: Biarity) -> Option<&Piece> {
        self.pieces.get(&b)
    }

    pub fn component(&self, b: Biarity) -> Option<&BimoduleComponent> {
        self.pieces.get(&b).map(|p| &p.component)
    }

    pub fn dim(&self, b: Biarity) -> usize {
        self.pieces.get(&b).map_or(0, Piece::dim)
    }

    /// Dimension of the weight-`w` part at `b`.
    pub fn dim_weight(&self, b: Biarity, w: u32) -> usize {
        self.pieces
            .get(&b)
            .map_or(0, |p| p.weights.iter().filter(|x| **x == w).count())
    }

    pub fn weights(&self, b: Biarity) -> &[u32] {
        self.pieces.get(&b).map_or(&[], |p| &p.weights)
    }

    /// Basis of the component at `b`, or the zero space.
    pub fn space(&self, b: Biarity) -> BasedSpace {
        self.pieces
            .get(&b)
            .map_or_else(BasedSpace::zero, |p| p.component.space.clone())
    }

    /// Nonzero biarities in increasing order.
    pub fn support(&self) -> impl Iterator<Item = Biarity> + '_ {
        self.pieces.keys().copied()
    }

    pub fn pieces(&self) -> impl Iterator<Item = (Biarity, &Piece)> {
        self.pieces.iter().map(|(b, p)| (*b, p))
    }

    pub fn overflow(&self) -> &BTreeMap<Biarity, u32> {
        &self.overflow
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty() && self.overflow.is_empty()
    }

    /// Vertex types usable on a graph level: `(biarity, least weight)`,
    /// including out-of-box biarities that might be nonzero.
    pub fn vertex_types(&self, variant: Variant) -> Vec<(Biarity, u32, bool)> {
        let mut out: Vec<(Biarity, u32, bool)> = self
            .pieces
            .iter()
            .map(|(b, p)| (*b, p.min_weight(), true))
            .chain(self.overflow.iter().map(|(b, w)| (*b, *w, false)))
            .filter(|(b, _, _)| variant.allows_biarity(*b))
            .collect();
        out.sort();
        out
    }

    /// Dimension table `(biarity, dim)` over the truncation box.
    pub fn dims(&self) -> Vec<(Biarity, usize)> {
        self.truncation
            .biarities()
            .into_iter()
            .map(|b| (b, self.dim(b)))
            .collect()
    }

    /// The same components with every basis vector given weight `w`
    /// (weight 0 stays allowed only at (1,1)).
    pub fn regraded(&self, w: u32) -> Result<SBimodule> {
        let mut out = SBimodule::zero(self.truncation);
        for (_, p) in self.pieces() {
            out.insert(p.component.clone(), vec![w; p.dim()])?;
        }
        Ok(out)
    }

    /// Biarity-wise direct sum; labels tagged 0 (self) and 1 (other).
    pub fn direct_sum(&self, other: &SBimodule) -> Result<SBimodule> {
        if self.truncation != other.truncation {
            return Err(Error::ShapeMismatch("direct sum of differently truncated bimodules".into()));
        }
        let mut out = SBimodule::zero(self.truncation);
        for b in self.truncation.biarities() {
            let (x, y) = (self.piece(b), other.piece(b));
            if x.is_none() && y.is_none() {
                continue;
            }
            let sx = self.space(b);
            let sy = other.space(b);
            let space = sx.direct_sum(&sy);
            let sum_rep = |side: fn(&BimoduleComponent) -> &Representation, deg: usize| {
                let gens = (0..deg.saturating_sub(1))
                    .map(|i| {
                        let gx = x.map_or_else(|| LinMap::zero(&sx, &sx), |p| side(&p.component).generator(i).clone());
                        let gy = y.map_or_else(|| LinMap::zero(&sy, &sy), |p| side(&p.component).generator(i).clone());
                        relabel(&gx.direct_sum(&gy), &space)
                    })
                    .collect();
                Representation::new_unchecked(deg, space.clone(), gens)
            };
            let comp = BimoduleComponent {
                biarity: b,
                left: sum_rep(|c| &c.left, b.outputs),
                right: sum_rep(|c| &c.right, b.inputs),
                space: space.clone(),
            };
            let mut weights = self.weights(b).to_vec();
            weights.extend_from_slice(other.weights(b));
            out.insert_unchecked(comp, weights);
        }
        let mut overflow = self.overflow.clone();
        for (b, w) in &other.overflow {
            let e = overflow.entry(*b).or_insert(*w);
            *e = (*e).min(*w);
        }
        out.overflow = overflow;
        Ok(out)
    }
}

fn relabel(m: &LinMap, space: &BasedSpace) -> LinMap {
    LinMap::from_columns(space.clone(), space.clone(), m.columns().to_vec())
        .expect("same dimensions")
}

/// The unit: one-dimensional at (1,1) in weight 0, trivial actions.
pub fn unit_bimodule(t: Truncation) -> SBimodule {
    let mut out = SBimodule::zero(t);
    let space = BasedSpace::new(vec![Label::Unit]).unwrap();
    out.insert_unchecked(BimoduleComponent::trivial(Biarity::UNIT, space), vec![0]);
    out
}

/// A family of linear maps between two bimodules, one per biarity.
#[derive(Clone, Debug)]
pub struct SBimoduleMap {
    domain: Arc<SBimodule>,
    codomain: Arc<SBimodule>,
    maps: BTreeMap<Biarity, LinMap>,
}

impl SBimoduleMap {
    /// Missing biarities are taken to be zero maps.
    pub fn new(
        domain: Arc<SBimodule>,
        codomain: Arc<SBimodule>,
        maps: BTreeMap<Biarity, LinMap>,
    ) -> Result<Self> {
        for (b, m) in &maps {
            if m.domain().dim() != domain.dim(*b) || m.codomain().dim() != codomain.dim(*b) {
                return Err(Error::DimensionMismatch(format!(
                    "map at {b} is {}x{}, expected {}x{}",
                    m.codomain().dim(),
                    m.domain().dim(),
                    codomain.dim(*b),
                    domain.dim(*b)
                )));
            }
        }
        let mut full = BTreeMap::new();
        for b in domain.support() {
            let m = maps
                .get(&b)
                .cloned()
                .unwrap_or_else(|| LinMap::zero(&domain.space(b), &codomain.space(b)));
            full.insert(b, m);
        }
        Ok(SBimoduleMap {
            domain,
            codomain,
            maps: full,
        })
    }

    /// Builds a map from a function giving the image of each basis vector.
    pub fn from_fn(
        domain: Arc<SBimodule>,
        codomain: Arc<SBimodule>,
        mut f: impl FnMut(Biarity, usize) -> Result<SparseVec>,
    ) -> Result<Self> {
        let mut maps = BTreeMap::new();
        for b in domain.support() {
            let cols = (0..domain.dim(b)).map(|j| f(b, j)).collect::<Result<Vec<_>>>()?;
            maps.insert(b, LinMap::from_columns(domain.space(b), codomain.space(b), cols)?);
        }
        Self::new(domain, codomain, maps)
    }

    pub fn identity(m: Arc<SBimodule>) -> Self {
        let maps = m.support().map(|b| (b, LinMap::identity(&m.space(b)))).collect();
        SBimoduleMap {
            domain: m.clone(),
            codomain: m,
            maps,
        }
    }

    pub fn zero(domain: Arc<SBimodule>, codomain: Arc<SBimodule>) -> Self {
        Self::new(domain, codomain, BTreeMap::new()).expect("zero map is well formed")
    }

    pub fn domain(&self) -> &Arc<SBimodule> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SBimodule> {
        &self.codomain
    }

    /// The map at `b` (zero if the domain vanishes there).
    pub fn at(&self, b: Biarity) -> LinMap {
        self.maps
            .get(&b)
            .cloned()
            .unwrap_or_else(|| LinMap::zero(&self.domain.space(b), &self.codomain.space(b)))
    }

    pub fn apply(&self, b: Biarity, v: &SparseVec) -> SparseVec {
        self.maps.get(&b).map_or_else(SparseVec::new, |m| m.apply(v))
    }

    pub fn image_of(&self, b: Biarity, j: usize) -> SparseVec {
        self.maps.get(&b).map_or_else(SparseVec::new, |m| m.column(j).clone())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SBimoduleMap) -> Result<SBimoduleMap> {
        let mut maps = BTreeMap::new();
        for b in inner.domain.support() {
            maps.insert(b, self.at(b).compose(&inner.at(b))?);
        }
        Self::new(inner.domain.clone(), self.codomain.clone(), maps)
    }

    pub fn sub(&self, other: &SBimoduleMap) -> Result<SBimoduleMap> {
        let mut maps = BTreeMap::new();
        for b in self.domain.support() {
            maps.insert(b, self.at(b).sub(&other.at(b))?);
        }
        Self::new(self.domain.clone(), self.codomain.clone(), maps)
    }

    pub fn add(&self, other: &SBimoduleMap) -> Result<SBimoduleMap> {
        let mut maps = BTreeMap::new();
        for b in self.domain.support() {
            maps.insert(b, self.at(b).add(&other.at(b))?);
        }
        Self::new(self.domain.clone(), self.codomain.clone(), maps)
    }

    pub fn same_matrices(&self, other: &SBimoduleMap) -> bool {
        let mut bs: Vec<Biarity> = self.domain.support().chain(other.domain.support()).collect();
        bs.sort();
        bs.dedup();
        bs.into_iter().all(|b| self.at(b).same_matrix(&other.at(b)))
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().all(LinMap::is_zero)
    }

    pub fn rank(&self, b: Biarity) -> usize {
        self.maps.get(&b).map_or(0, LinMap::rank)
    }

    pub fn is_injective(&self) -> bool {
        self.maps.values().all(LinMap::is_injective)
    }

    pub fn is_surjective(&self) -> bool {
        self.codomain
            .support()
            .all(|b| self.rank(b) == self.codomain.dim(b))
    }

    /// Checks commutation with every adjacent transposition on both sides.
    pub fn check_equivariant(&self) -> Result<()> {
        for (b, m) in &self.maps {
            let (Some(d), Some(c)) = (self.domain.component(*b), self.codomain.component(*b)) else {
                continue;
            };
            let sides = [(&d.left, &c.left, "output"), (&d.right, &c.right, "input")];
            for (dr, cr, side) in sides {
                for (i, (gd, gc)) in dr.generators().iter().zip(cr.generators()).enumerate() {
                    if !m.compose(gd)?.same_matrix(&gc.compose(m)?) {
                        return Err(Error::NotEquivariant(format!(
                            "at {b}, {side} transposition {}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn induced_component(
    comp: &BimoduleComponent,
    space: &BasedSpace,
    image: impl Fn(&LinMap, usize) -> Result<SparseVec>,
    basis: &[usize],
) -> Result<BimoduleComponent> {
    let induce = |rep: &Representation| -> Result<Representation> {
        let gens = rep
            .generators()
            .iter()
            .map(|g| {
                let cols = basis.iter().map(|&k| image(g, k)).collect::<Result<Vec<_>>>()?;
                LinMap::from_columns(space.clone(), space.clone(), cols)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Representation::new_unchecked(rep.degree(), space.clone(), gens))
    };
    Ok(BimoduleComponent {
        biarity: comp.biarity,
        left: induce(&comp.left)?,
        right: induce(&comp.right)?,
        space: space.clone(),
    })
}

/// Quotient of `m` by invariant subspaces, with the induced actions and the
/// projection. The quotient basis is the set of non-pivot basis vectors of `m`.
pub fn quotient_bimodule(
    m: &Arc<SBimodule>,
    relations: &BTreeMap<Biarity, Echelon>,
) -> Result<(Arc<SBimodule>, SBimoduleMap, BTreeMap<Biarity, Quotient>)> {
    let mut out = SBimodule::zero(m.truncation);
    let mut quotients = BTreeMap::new();
    for (b, piece) in m.pieces() {
        let ech = relations.get(&b).cloned().unwrap_or_else(|| Echelon::new(piece.dim()));
        for r in ech.basis() {
            for rep in [&piece.component.left, &piece.component.right] {
                if rep.generators().iter().any(|g| !ech.contains(&g.apply(&r))) {
                    return Err(Error::NotEquivariant(format!("relations at {b} are not invariant")));
                }
            }
        }
        let q = Quotient::new(ech);
        if q.dim() > 0 {
            let full = m.space(b);
            let space = BasedSpace::new_unchecked(q.kept().iter().map(|&k| full.label(k).clone()).collect());
            let comp = induced_component(&piece.component, &space, |g, k| Ok(q.project(g.column(k))), q.kept())?;
            out.insert_unchecked(comp, q.kept().iter().map(|&k| piece.weights[k]).collect());
        }
        quotients.insert(b, q);
    }
    out.overflow = m.overflow.clone();
    let out = Arc::new(out);
    let pi = SBimoduleMap::from_fn(m.clone(), out.clone(), |b, i| Ok(quotients[&b].project_unit(i)))?;
    Ok((out, pi, quotients))
}

/// Sub-bimodule of `m` spanned by invariant, weight-homogeneous vectors,
/// with its inclusion.
pub fn sub_bimodule(
    m: &Arc<SBimodule>,
    spans: &BTreeMap<Biarity, Vec<SparseVec>>,
) -> Result<(Arc<SBimodule>, SBimoduleMap)> {
    let mut out = SBimodule::zero(m.truncation);
    let mut bases = BTreeMap::new();
    for (b, piece) in m.pieces() {
        let Some(vs) = spans.get(&b) else { continue };
        let ech = Echelon::from_vectors(piece.dim(), vs.iter());
        if ech.rank() == 0 {
            continue;
        }
        let basis = ech.basis();
        let weights = basis
            .iter()
            .map(|v| {
                let w = piece.weights[v.leading().expect("nonzero")];
                if v.entries().iter().any(|(i, _)| piece.weights[*i] != w) {
                    return Err(Error::InvalidInput(format!("mixed weights in a vector at {b}")));
                }
                Ok(w)
            })
            .collect::<Result<Vec<_>>>()?;
        let space = BasedSpace::indexed(basis.len());
        let idx: Vec<usize> = (0..basis.len()).collect();
        let comp = induced_component(
            &piece.component,
            &space,
            |g, k| {
                ech.coordinates(&g.apply(&basis[k]))
                    .ok_or_else(|| Error::NotEquivariant(format!("span at {b} is not invariant")))
            },
            &idx,
        )?;
        out.insert_unchecked(comp, weights);
        bases.insert(b, basis);
    }
    let out = Arc::new(out);
    let inc = SBimoduleMap::from_fn(out.clone(), m.clone(), |b, i| Ok(bases[&b][i].clone()))?;
    Ok((out, inc))
}
