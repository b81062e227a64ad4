//! Exact linear algebra over the rationals.
//!
//! Spaces carry ordered, structured basis labels. Maps are stored column-sparse
//! since nearly every matrix produced by the graph layer has a handful of
//! nonzero entries per column.

mod echelon;
mod map;
mod sparse;

pub use echelon::{Echelon, Quotient};
pub use map::{
    coequalizer, cokernel, image, kernel, subspace_sum, LinMap, QuotientPresentation,
    SubspaceInclusion,
};
pub use sparse::SparseVec;

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_scalar(q: &Scalar) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Bit size of the larger of numerator and denominator.
pub fn bit_size(q: &Scalar) -> u64 {
    q.numer().abs().bits().max(q.denom().bits())
}

/// A structured basis label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Index(usize),
    Name(String),
    Unit,
    /// Summand `tag` of a direct sum.
    Tagged(u8, Box<Label>),
    Pair(Box<Label>, Box<Label>),
    /// A decorated graph: canonical shape encoding plus one basis index per vertex.
    Graph { code: Vec<u8>, deco: Vec<usize> },
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Index(i) => write!(f, "{i}"),
            Label::Name(s) => write!(f, "{s}"),
            Label::Unit => write!(f, "1"),
            Label::Tagged(t, l) => write!(f, "{t}:{l}"),
            Label::Pair(a, b) => write!(f, "({a},{b})"),
            Label::Graph { code, deco } => {
                for b in code {
                    write!(f, "{b:02x}")?;
                }
                write!(f, "|")?;
                for (i, d) in deco.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }
    }
}

/// Finite-dimensional space with an ordered basis of distinct labels.
#[derive(Clone, PartialEq, Eq)]
pub struct BasedSpace {
    labels: Arc<[Label]>,
}

impl fmt::Debug for BasedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasedSpace(dim {})", self.dim())
    }
}

impl BasedSpace {
    pub fn new(labels: Vec<Label>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::InvalidInput(format!("duplicate basis label {l}")));
            }
        }
        Ok(Self::new_unchecked(labels))
    }

    pub(crate) fn new_unchecked(labels: Vec<Label>) -> Self {
        BasedSpace {
            labels: labels.into(),
        }
    }

    /// Space with basis labels `0..dim`.
    pub fn indexed(dim: usize) -> Self {
        Self::new_unchecked((0..dim).map(Label::Index).collect())
    }

    pub fn zero() -> Self {
        Self::indexed(0)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    pub fn direct_sum(&self, other: &BasedSpace) -> BasedSpace {
        let labels = self
            .labels
            .iter()
            .map(|l| Label::Tagged(0, Box::new(l.clone())))
            .chain(
                other
                    .labels
                    .iter()
                    .map(|l| Label::Tagged(1, Box::new(l.clone()))),
            )
            .collect();
        Self::new_unchecked(labels)
    }

    /// Tensor product; basis = ordered pairs, first factor varying slowest.
    pub fn tensor(&self, other: &BasedSpace) -> BasedSpace {
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for a in self.labels.iter() {
            for b in other.labels.iter() {
                labels.push(Label::Pair(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
        Self::new_unchecked(labels)
    }
}
