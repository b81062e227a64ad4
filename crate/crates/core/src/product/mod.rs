//! Weight-graded S-bimodules, the unit, and the level products.
//!
//! `boxtimes(Q, P)` places `P` on the bottom level and `Q` on the top level
//! of two-level connected graphs; the variant restricts the graphs (trees,
//! genus 0, or the half-prop condition).

mod bimodule;
pub mod lemmas;
mod space;

pub use bimodule::{quotient_bimodule, sub_bimodule, unit_bimodule, Piece, SBimodule, SBimoduleMap};
pub use space::LeveledSpace;

use crate::error::{Error, Result};
use crate::graph::{hex, Biarity, Truncation, Variant, GFM_HEADER};
use crate::linalg::{LinMap, Scalar, SparseVec, SubspaceInclusion};
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

/// A product together with its basis registry and quotient data.
#[derive(Clone, Debug)]
pub struct ProductResult {
    pub space: LeveledSpace,
    pub bimodule: Arc<SBimodule>,
}

impl ProductResult {
    pub fn dim(&self, b: Biarity) -> usize {
        self.bimodule.dim(b)
    }

    pub fn dims(&self) -> Vec<(Biarity, usize)> {
        self.bimodule.dims()
    }

    /// Projection from the span of decorated graphs onto the product.
    pub fn projection(&self, b: Biarity) -> LinMap {
        self.space.projection(b)
    }

    /// Twist vectors, which the projection must kill.
    pub fn relations(&self, b: Biarity) -> Vec<SparseVec> {
        self.space.relation_vectors(b)
    }
}

fn check_within(m: &SBimodule, t: Truncation, what: &str) -> Result<()> {
    if let Some(b) = m.support().find(|b| !t.contains(*b)) {
        return Err(Error::TruncationExceeded(format!("{what} has a component at {b}")));
    }
    Ok(())
}

/// Builds the leveled space over `levels` (bottom first) as a product result.
pub fn level_product(levels: Vec<Arc<SBimodule>>, v: Variant, t: Truncation) -> Result<ProductResult> {
    for (i, m) in levels.iter().enumerate() {
        check_within(m, t, &format!("factor {i}"))?;
    }
    let space = LeveledSpace::new(levels, v, t)?;
    let bimodule = Arc::new(space.to_bimodule());
    Ok(ProductResult { space, bimodule })
}

/// `Q ⊠ P`: `P` on the bottom level, `Q` on top.
pub fn boxtimes(q: &Arc<SBimodule>, p: &Arc<SBimodule>, v: Variant, t: Truncation) -> Result<ProductResult> {
    level_product(vec![p.clone(), q.clone()], v, t)
}

/// Applies `maps[l]` to every level-`l` decoration, expanding multilinearly.
pub fn level_map(dom: &ProductResult, cod: &ProductResult, maps: &[&SBimoduleMap]) -> Result<SBimoduleMap> {
    if maps.len() != dom.space.num_levels() || maps.len() != cod.space.num_levels() {
        return Err(Error::ShapeMismatch("one map per level is required".into()));
    }
    SBimoduleMap::from_fn(dom.bimodule.clone(), cod.bimodule.clone(), |b, i| {
        let (g, deco) = dom.space.representative(b, i);
        let columns: Vec<SparseVec> = g
            .vertices()
            .zip(deco)
            .map(|((l, _, vx), d)| maps[l].image_of(vx.biarity, *d))
            .collect();
        let terms = expand(&columns);
        if terms.is_empty() {
            return Ok(SparseVec::new());
        }
        cod.space.project_combination(g, &terms)
    })
}

/// Multilinear expansion of a tensor of vectors into `(index tuple, coefficient)`.
pub(crate) fn expand(columns: &[SparseVec]) -> Vec<(Vec<usize>, Scalar)> {
    let mut acc: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for col in columns {
        let mut next = Vec::with_capacity(acc.len() * col.nnz());
        for (idx, c) in &acc {
            for (i, x) in col.entries() {
                let mut idx2 = idx.clone();
                idx2.push(*i);
                next.push((idx2, c * x));
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// `f ⊠ g : Q ⊠ P → Q' ⊠ P'` for `f : Q → Q'` and `g : P → P'`.
pub fn boxtimes_map(f: &SBimoduleMap, g: &SBimoduleMap, v: Variant, t: Truncation) -> Result<SBimoduleMap> {
    let dom = boxtimes(f.domain(), g.domain(), v, t)?;
    let cod = boxtimes(f.codomain(), g.codomain(), v, t)?;
    level_map(&dom, &cod, &[g, f])
}

/// Kernel of `A ⊠ π_Y ⊠ B` inside `A ⊠ (X ⊕ Y) ⊠ B`.
#[derive(Clone, Debug)]
pub struct MultilinearPart {
    /// `A ⊠ (X ⊕ Y) ⊠ B`, levels `[B, X ⊕ Y, A]`.
    pub ambient: ProductResult,
    /// `A ⊠ Y ⊠ B`.
    pub complement: ProductResult,
    /// `A ⊠ π_Y ⊠ B`.
    pub projection: SBimoduleMap,
    /// `A ⊠ ι_Y ⊠ B`, a section of the projection.
    pub splitting: SBimoduleMap,
    pub parts: BTreeMap<Biarity, SubspaceInclusion>,
}

impl MultilinearPart {
    pub fn dim(&self, b: Biarity) -> usize {
        self.parts.get(&b).map_or(0, SubspaceInclusion::dim)
    }
}

fn coordinate_maps(x: &Arc<SBimodule>, y: &Arc<SBimodule>, sum: &Arc<SBimodule>) -> Result<(SBimoduleMap, SBimoduleMap)> {
    let proj = SBimoduleMap::from_fn(sum.clone(), y.clone(), |b, i| {
        let dx = x.dim(b);
        Ok(if i >= dx { SparseVec::unit(i - dx) } else { SparseVec::new() })
    })?;
    let inj = SBimoduleMap::from_fn(y.clone(), sum.clone(), |b, i| Ok(SparseVec::unit(x.dim(b) + i)))?;
    Ok((proj, inj))
}

/// The part of `A ⊠ (X ⊕ Y) ⊠ B` using at least one `X` decoration on the
/// middle level, with the splitting `A⊠(X⊕Y)⊠B ≅ multilinear ⊕ A⊠Y⊠B` checked.
pub fn multilinear_part(
    a: &Arc<SBimodule>,
    x: &Arc<SBimodule>,
    y: &Arc<SBimodule>,
    b_mod: &Arc<SBimodule>,
    v: Variant,
    t: Truncation,
) -> Result<MultilinearPart> {
    let sum = Arc::new(x.direct_sum(y)?);
    let ambient = level_product(vec![b_mod.clone(), sum.clone(), a.clone()], v, t)?;
    let complement = level_product(vec![b_mod.clone(), y.clone(), a.clone()], v, t)?;
    let (pi, iota) = coordinate_maps(x, y, &sum)?;
    let id_a = SBimoduleMap::identity(a.clone());
    let id_b = SBimoduleMap::identity(b_mod.clone());
    let projection = level_map(&ambient, &complement, &[&id_b, &pi, &id_a])?;
    let splitting = level_map(&complement, &ambient, &[&id_b, &iota, &id_a])?;
    let mut parts = BTreeMap::new();
    for bi in t.biarities() {
        let proj_b = ambient.projection(bi);
        let vectors: Vec<SparseVec> = ambient
            .space
            .raw_elements(bi)
            .iter()
            .enumerate()
            .filter(|(_, (g, deco))| {
                g.vertices()
                    .zip(deco.iter())
                    .any(|((l, _, vx), d)| l == 1 && *d < x.dim(vx.biarity))
            })
            .map(|(e, _)| proj_b.column(e).clone())
            .collect();
        let part = SubspaceInclusion::spanned_by(&ambient.bimodule.space(bi), &vectors);
        let kernel = crate::linalg::kernel(&projection.at(bi));
        if !part.same_span(&kernel) {
            return Err(Error::ShapeMismatch(format!(
                "multilinear part differs from the kernel at {bi}"
            )));
        }
        if part.dim() + complement.dim(bi) != ambient.dim(bi) {
            return Err(Error::DimensionMismatch(format!("splitting fails at {bi}")));
        }
        parts.insert(bi, part);
    }
    if !projection.compose(&splitting)?.same_matrices(&SBimoduleMap::identity(complement.bimodule.clone())) {
        return Err(Error::ShapeMismatch("projection does not split".into()));
    }
    Ok(MultilinearPart {
        ambient,
        complement,
        projection,
        splitting,
        parts,
    })
}

/// `A ⊠ X ⊠ B` split by the number of middle-level vertices.
#[derive(Clone, Debug)]
pub struct HomogeneousDecomposition {
    pub total: ProductResult,
    /// `n ↦ (biarity ↦ subspace)`.
    pub pieces: BTreeMap<usize, BTreeMap<Biarity, SubspaceInclusion>>,
}

impl HomogeneousDecomposition {
    pub fn dim(&self, n: usize, b: Biarity) -> usize {
        self.pieces
            .get(&n)
            .and_then(|p| p.get(&b))
            .map_or(0, SubspaceInclusion::dim)
    }
}

pub fn homogeneous_decomposition(
    a: &Arc<SBimodule>,
    b_mod: &Arc<SBimodule>,
    x: &Arc<SBimodule>,
    v: Variant,
    t: Truncation,
) -> Result<HomogeneousDecomposition> {
    let total = level_product(vec![b_mod.clone(), x.clone(), a.clone()], v, t)?;
    let mut pieces: BTreeMap<usize, BTreeMap<Biarity, SubspaceInclusion>> = BTreeMap::new();
    for bi in t.biarities() {
        let proj = total.projection(bi);
        let mut by_n: BTreeMap<usize, Vec<SparseVec>> = BTreeMap::new();
        for (e, (g, _)) in total.space.raw_elements(bi).iter().enumerate() {
            by_n.entry(g.level(1).len()).or_default().push(proj.column(e).clone());
        }
        let ambient = total.bimodule.space(bi);
        let mut sum = 0;
        for (n, vs) in by_n {
            let s = SubspaceInclusion::spanned_by(&ambient, &vs);
            sum += s.dim();
            pieces.entry(n).or_default().insert(bi, s);
        }
        if sum != total.dim(bi) {
            return Err(Error::DimensionMismatch(format!("pieces do not form a direct sum at {bi}")));
        }
    }
    Ok(HomogeneousDecomposition { total, pieces })
}

/// Dimension table as CSV with header `m,n,dim`.
pub fn dims_csv(m: &SBimodule) -> String {
    let mut out = String::from("m,n,dim\n");
    for (b, d) in m.dims() {
        let _ = writeln!(out, "{},{},{}", b.outputs, b.inputs, d);
    }
    out
}

/// Basis registry dump: header, then one line per basis vector with its
/// biarity, weight, hex graph code and decoration indices.
pub fn registry_dump(p: &ProductResult) -> String {
    let mut out = format!("{GFM_HEADER}\n");
    for b in p.space.truncation().biarities() {
        for i in 0..p.dim(b) {
            let (g, deco) = p.space.representative(b, i);
            let d: Vec<String> = deco.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                b.outputs,
                b.inputs,
                p.space.weights(b)[i],
                hex(&g.encode()),
                d.join(",")
            );
        }
    }
    out
}
