use super::{BasedSpace, Echelon, Quotient, Scalar, SparseVec};
use crate::error::{Error, Result};
use num_traits::{One, Zero};

/// Linear map between based spaces, stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    domain: BasedSpace,
    codomain: BasedSpace,
    cols: Vec<SparseVec>,
}

impl LinMap {
    pub fn from_columns(domain: BasedSpace, codomain: BasedSpace, cols: Vec<SparseVec>) -> Result<Self> {
        if cols.len() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for domain of dimension {}",
                cols.len(),
                domain.dim()
            )));
        }
        if let Some(bad) = cols
            .iter()
            .filter_map(|c| c.max_index())
            .find(|i| *i >= codomain.dim())
        {
            return Err(Error::DimensionMismatch(format!(
                "row index {bad} outside codomain of dimension {}",
                codomain.dim()
            )));
        }
        Ok(LinMap {
            domain,
            codomain,
            cols,
        })
    }

    /// Dense row-major construction: `rows[i][j]` is the coefficient of basis
    /// vector `i` of the codomain in the image of basis vector `j`.
    pub fn from_rows(domain: BasedSpace, codomain: BasedSpace, rows: &[Vec<Scalar>]) -> Result<Self> {
        if rows.len() != codomain.dim() || rows.iter().any(|r| r.len() != domain.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape does not match {}x{}",
                codomain.dim(),
                domain.dim()
            )));
        }
        let cols = (0..domain.dim())
            .map(|j| {
                SparseVec::from_pairs(
                    rows.iter()
                        .enumerate()
                        .filter(|(_, r)| !r[j].is_zero())
                        .map(|(i, r)| (i, r[j].clone()))
                        .collect(),
                )
            })
            .collect();
        LinMap::from_columns(domain, codomain, cols)
    }

    pub fn identity(space: &BasedSpace) -> Self {
        LinMap {
            domain: space.clone(),
            codomain: space.clone(),
            cols: (0..space.dim()).map(SparseVec::unit).collect(),
        }
    }

    pub fn zero(domain: &BasedSpace, codomain: &BasedSpace) -> Self {
        LinMap {
            domain: domain.clone(),
            codomain: codomain.clone(),
            cols: vec![SparseVec::new(); domain.dim()],
        }
    }

    pub fn domain(&self) -> &BasedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &BasedSpace {
        &self.codomain
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.cols[j].get(i)
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        let mut rows = vec![vec![Scalar::zero(); self.domain.dim()]; self.codomain.dim()];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c.entries() {
                rows[*i][j] = v.clone();
            }
        }
        rows
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, x) in v.entries() {
            out = out.add_scaled(x, &self.cols[*j]);
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinMap) -> Result<LinMap> {
        if inner.codomain.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}->{} after {}->{}",
                self.domain.dim(),
                self.codomain.dim(),
                inner.domain.dim(),
                inner.codomain.dim()
            )));
        }
        Ok(LinMap {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            cols: inner.cols.iter().map(|c| self.apply(c)).collect(),
        })
    }

    fn check_same_shape(&self, other: &LinMap) -> Result<()> {
        if self.domain.dim() != other.domain.dim() || self.codomain.dim() != other.codomain.dim() {
            return Err(Error::DimensionMismatch("maps have different shapes".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &LinMap) -> Result<LinMap> {
        self.check_same_shape(other)?;
        Ok(LinMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &LinMap) -> Result<LinMap> {
        self.check_same_shape(other)?;
        Ok(LinMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> LinMap {
        LinMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            cols: self.cols.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_zero)
    }

    /// Matrix equality, ignoring labels.
    pub fn same_matrix(&self, other: &LinMap) -> bool {
        self.domain.dim() == other.domain.dim()
            && self.codomain.dim() == other.codomain.dim()
            && self.cols == other.cols
    }

    pub fn rank(&self) -> usize {
        Echelon::from_vectors(self.codomain.dim(), &self.cols).rank()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.domain.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.codomain.dim()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.domain.dim() == self.codomain.dim() && self.is_injective()
    }

    /// Two-sided inverse of an isomorphism.
    pub fn inverse(&self) -> Result<LinMap> {
        if !self.is_isomorphism() {
            return Err(Error::DimensionMismatch("map is not invertible".into()));
        }
        let n = self.domain.dim();
        let (rows, _) = tracked_reduction(&self.cols);
        // Fully reduced: every row is a unit vector e_p equal to self(w).
        let mut cols = vec![SparseVec::new(); n];
        for (v, w) in rows {
            cols[v.leading().expect("nonzero row")] = w;
        }
        LinMap::from_columns(self.codomain.clone(), self.domain.clone(), cols)
    }

    /// Kronecker product: `(f ⊗ g)(a ⊗ b) = f(a) ⊗ g(b)`, first factor slowest.
    pub fn tensor(&self, other: &LinMap) -> LinMap {
        let inner = other.codomain.dim();
        let mut cols = Vec::with_capacity(self.domain.dim() * other.domain.dim());
        for a in &self.cols {
            for b in &other.cols {
                let mut pairs = Vec::with_capacity(a.nnz() * b.nnz());
                for (i, x) in a.entries() {
                    for (k, y) in b.entries() {
                        pairs.push((i * inner + k, x * y));
                    }
                }
                cols.push(SparseVec::from_pairs(pairs));
            }
        }
        LinMap {
            domain: self.domain.tensor(&other.domain),
            codomain: self.codomain.tensor(&other.codomain),
            cols,
        }
    }

    /// Block-diagonal `f ⊕ g`.
    pub fn direct_sum(&self, other: &LinMap) -> LinMap {
        let shift = self.codomain.dim();
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().map(|c| c.remap(|i| Some(i + shift))));
        LinMap {
            domain: self.domain.direct_sum(&other.domain),
            codomain: self.codomain.direct_sum(&other.codomain),
            cols,
        }
    }

    /// `[f g] : A ⊕ B → C`.
    pub fn copair(&self, other: &LinMap) -> Result<LinMap> {
        if self.codomain.dim() != other.codomain.dim() {
            return Err(Error::DimensionMismatch("copair needs a common codomain".into()));
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(LinMap {
            domain: self.domain.direct_sum(&other.domain),
            codomain: self.codomain.clone(),
            cols,
        })
    }

    /// Largest bit size among entries.
    pub fn max_bits(&self) -> u64 {
        self.cols
            .iter()
            .flat_map(|c| c.entries().iter().map(|(_, v)| super::bit_size(v)))
            .max()
            .unwrap_or(0)
    }
}

/// Injective map onto a subspace of `ambient`.
#[derive(Clone, Debug)]
pub struct SubspaceInclusion {
    inclusion: LinMap,
}

impl SubspaceInclusion {
    /// Subspace spanned by `vectors`; the stored basis is the reduced echelon basis.
    pub fn spanned_by(ambient: &BasedSpace, vectors: &[SparseVec]) -> SubspaceInclusion {
        let ech = Echelon::from_vectors(ambient.dim(), vectors);
        Self::from_echelon(ambient, &ech)
    }

    pub(crate) fn from_echelon(ambient: &BasedSpace, ech: &Echelon) -> SubspaceInclusion {
        let basis = ech.basis();
        SubspaceInclusion {
            inclusion: LinMap {
                domain: BasedSpace::indexed(basis.len()),
                codomain: ambient.clone(),
                cols: basis,
            },
        }
    }

    pub fn ambient(&self) -> &BasedSpace {
        self.inclusion.codomain()
    }

    pub fn inclusion(&self) -> &LinMap {
        &self.inclusion
    }

    pub fn dim(&self) -> usize {
        self.inclusion.domain().dim()
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::from_vectors(self.ambient().dim(), self.inclusion.columns())
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.echelon().contains(v)
    }

    pub fn contains_subspace(&self, other: &SubspaceInclusion) -> bool {
        let e = self.echelon();
        other.inclusion.columns().iter().all(|v| e.contains(v))
    }

    pub fn same_span(&self, other: &SubspaceInclusion) -> bool {
        self.ambient().dim() == other.ambient().dim()
            && self.dim() == other.dim()
            && self.contains_subspace(other)
    }
}

/// A quotient `source ↠ quotient` with a chosen right inverse.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub source: BasedSpace,
    pub quotient: BasedSpace,
    pub projection: LinMap,
    pub section: LinMap,
}

impl QuotientPresentation {
    pub(crate) fn from_quotient(source: &BasedSpace, q: &Quotient) -> QuotientPresentation {
        let quotient = BasedSpace::new_unchecked(
            q.kept().iter().map(|c| source.label(*c).clone()).collect(),
        );
        let projection = LinMap {
            domain: source.clone(),
            codomain: quotient.clone(),
            cols: (0..source.dim()).map(|c| q.project_unit(c)).collect(),
        };
        let section = LinMap {
            domain: quotient.clone(),
            codomain: source.clone(),
            cols: q.kept().iter().map(|c| SparseVec::unit(*c)).collect(),
        };
        QuotientPresentation {
            source: source.clone(),
            quotient,
            projection,
            section,
        }
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

/// Gauss-Jordan on columns, tracking which combination of inputs produced
/// each reduced row. Returns the reduced rows and the kernel combinations.
fn tracked_reduction(cols: &[SparseVec]) -> (Vec<(SparseVec, SparseVec)>, Vec<SparseVec>) {
    let mut rows: Vec<(SparseVec, SparseVec)> = Vec::new();
    let mut kernel_vecs = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut v = col.clone();
        let mut w = SparseVec::unit(j);
        for (rv, rw) in &rows {
            let p = rv.leading().expect("stored rows are nonzero");
            let c = v.get(p);
            if !c.is_zero() {
                v = v.add_scaled(&-c.clone(), rv);
                w = w.add_scaled(&-c, rw);
            }
        }
        match v.leading() {
            None => kernel_vecs.push(w),
            Some(p) => {
                let inv = Scalar::one() / v.get(p);
                let v = v.scale(&inv);
                let w = w.scale(&inv);
                for (rv, rw) in rows.iter_mut() {
                    let c = rv.get(p);
                    if !c.is_zero() {
                        *rv = rv.add_scaled(&-c.clone(), &v);
                        *rw = rw.add_scaled(&-c, &w);
                    }
                }
                rows.push((v, w));
            }
        }
    }
    (rows, kernel_vecs)
}

pub fn kernel(f: &LinMap) -> SubspaceInclusion {
    let (_, kernel_vecs) = tracked_reduction(f.columns());
    SubspaceInclusion::spanned_by(f.domain(), &kernel_vecs)
}

pub fn image(f: &LinMap) -> SubspaceInclusion {
    SubspaceInclusion::spanned_by(f.codomain(), f.columns())
}

pub fn cokernel(f: &LinMap) -> QuotientPresentation {
    let ech = Echelon::from_vectors(f.codomain().dim(), f.columns());
    QuotientPresentation::from_quotient(f.codomain(), &Quotient::new(ech))
}

/// Coequalizer of a reflexive pair `d0, d1 : X1 ⇉ X0` with common section `s0`.
pub fn coequalizer(d0: &LinMap, d1: &LinMap, s0: &LinMap) -> Result<QuotientPresentation> {
    if d0.domain().dim() != d1.domain().dim() || d0.codomain().dim() != d1.codomain().dim() {
        return Err(Error::NotReflexive("d0 and d1 have different shapes".into()));
    }
    let id = LinMap::identity(d0.codomain());
    let c0 = d0.compose(s0).map_err(|e| Error::NotReflexive(e.to_string()))?;
    let c1 = d1.compose(s0).map_err(|e| Error::NotReflexive(e.to_string()))?;
    if !c0.same_matrix(&id) {
        return Err(Error::NotReflexive("d0 ∘ s0 is not the identity".into()));
    }
    if !c1.same_matrix(&id) {
        return Err(Error::NotReflexive("d1 ∘ s0 is not the identity".into()));
    }
    Ok(cokernel(&d0.sub(d1)?))
}

pub fn subspace_sum(parts: &[SubspaceInclusion]) -> Result<SubspaceInclusion> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidInput("empty subspace sum has no ambient".into()));
    };
    if parts.iter().any(|p| p.ambient() != first.ambient()) {
        return Err(Error::AmbientMismatch);
    }
    let vecs: Vec<SparseVec> = parts
        .iter()
        .flat_map(|p| p.inclusion().columns().iter().cloned())
        .collect();
    Ok(SubspaceInclusion::spanned_by(first.ambient(), &vecs))
}
