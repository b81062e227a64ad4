//! Permutations and symmetric-group representations given by the images of
//! adjacent transpositions.

use crate::error::{Error, Result};
use crate::graph::Biarity;
use crate::linalg::{BasedSpace, Label, LinMap};
use std::fmt;

/// Default cap on `n` for [`enumerate_symmetric_group`].
pub const DEFAULT_GROUP_BOUND: usize = 7;

/// Bijection of `{0..n-1}` in one-line notation (displayed 1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// Parses 1-based one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidInput("one-based permutation contains 0".into()));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The adjacent transposition swapping `i` and `i + 1` (0-based).
    pub fn adjacent(n: usize, i: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, i + 1);
        Permutation(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, j)| i == *j)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// A reduced word `[i1, .., ik]` with `self = s_{i1} ∘ .. ∘ s_{ik}`.
    pub fn reduced_word(&self) -> Vec<usize> {
        // Bubble-sort self into the identity by left multiplications.
        let mut cur = self.0.clone();
        let mut word = Vec::new();
        loop {
            let Some(i) = (0..cur.len().saturating_sub(1)).find(|&i| cur[i] > cur[i + 1]) else {
                break;
            };
            // cur ∘ s_i swaps positions i, i+1.
            cur.swap(i, i + 1);
            word.push(i);
        }
        // self ∘ s_{w1} ∘ .. ∘ s_{wk} = id, so self = s_{wk} ∘ .. ∘ s_{w1}.
        word.reverse();
        word
    }

    pub fn inversions(&self) -> usize {
        let n = self.degree();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.0[i] > self.0[j])
            .count()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "]")
    }
}

/// All `n!` permutations in lexicographic order.
pub fn enumerate_symmetric_group(n: usize) -> Result<Vec<Permutation>> {
    enumerate_symmetric_group_bounded(n, DEFAULT_GROUP_BOUND)
}

pub fn enumerate_symmetric_group_bounded(n: usize, bound: usize) -> Result<Vec<Permutation>> {
    if n > bound {
        return Err(Error::BoundExceeded { n, bound });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    Ok(out)
}

/// Which Coxeter relation failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationViolation {
    NotSquare { generator: usize },
    Involution { generator: usize },
    Braid { generator: usize },
    Commutation { first: usize, second: usize },
    ActionsDoNotCommute { left: usize, right: usize },
}

impl fmt::Display for RelationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationViolation::NotSquare { generator } => {
                write!(f, "generator s{} has the wrong shape", generator + 1)
            }
            RelationViolation::Involution { generator } => {
                write!(f, "s{0}^2 = 1 fails", generator + 1)
            }
            RelationViolation::Braid { generator } => write!(
                f,
                "braid relation s{0} s{1} s{0} = s{1} s{0} s{1} fails",
                generator + 1,
                generator + 2
            ),
            RelationViolation::Commutation { first, second } => {
                write!(f, "s{} s{} = s{1} s{0} fails", first + 1, second + 1)
            }
            RelationViolation::ActionsDoNotCommute { left, right } => write!(
                f,
                "left generator s{} does not commute with right generator s{}",
                left + 1,
                right + 1
            ),
        }
    }
}

/// Representation of `S_degree` on a `dim`-dimensional space, given by the
/// images of `s_1 .. s_{degree-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    degree: usize,
    space: BasedSpace,
    generators: Vec<LinMap>,
}

impl Representation {
    /// Checks the Coxeter presentation before accepting the generators.
    pub fn new(degree: usize, space: BasedSpace, generators: Vec<LinMap>) -> Result<Self> {
        let rep = Self::new_unchecked(degree, space, generators);
        match rep.first_violation() {
            None => Ok(rep),
            Some(v) => Err(Error::InvalidInput(v.to_string())),
        }
    }

    pub fn new_unchecked(degree: usize, space: BasedSpace, generators: Vec<LinMap>) -> Self {
        Representation {
            degree,
            space,
            generators,
        }
    }

    pub fn trivial(degree: usize, space: &BasedSpace) -> Self {
        Representation {
            degree,
            space: space.clone(),
            generators: (0..degree.saturating_sub(1))
                .map(|_| LinMap::identity(space))
                .collect(),
        }
    }

    /// Left regular representation of `S_n` on the span of its elements.
    pub fn regular(n: usize) -> Result<Self> {
        let elems = enumerate_symmetric_group(n)?;
        let space = BasedSpace::new(
            elems
                .iter()
                .map(|p| Label::Name(p.to_string()))
                .collect(),
        )?;
        let gens = (0..n.saturating_sub(1))
            .map(|i| {
                let s = Permutation::adjacent(n, i);
                let cols = elems
                    .iter()
                    .map(|g| {
                        let t = s.compose(g);
                        crate::linalg::SparseVec::unit(elems.binary_search(&t).unwrap())
                    })
                    .collect();
                LinMap::from_columns(space.clone(), space.clone(), cols).unwrap()
            })
            .collect();
        Ok(Representation {
            degree: n,
            space,
            generators: gens,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &BasedSpace {
        &self.space
    }

    pub fn generators(&self) -> &[LinMap] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &LinMap {
        &self.generators[i]
    }

    pub fn first_violation(&self) -> Option<RelationViolation> {
        let d = self.dim();
        let expected = self.degree.saturating_sub(1);
        if self.generators.len() != expected {
            return Some(RelationViolation::NotSquare {
                generator: self.generators.len().min(expected),
            });
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.domain().dim() != d || g.codomain().dim() != d {
                return Some(RelationViolation::NotSquare { generator: i });
            }
        }
        let id = LinMap::identity(&self.space);
        let c = |a: &LinMap, b: &LinMap| a.compose(b).unwrap();
        for (i, g) in self.generators.iter().enumerate() {
            if !c(g, g).same_matrix(&id) {
                return Some(RelationViolation::Involution { generator: i });
            }
        }
        for i in 0..expected.saturating_sub(1) {
            let (a, b) = (&self.generators[i], &self.generators[i + 1]);
            if !c(&c(a, b), a).same_matrix(&c(&c(b, a), b)) {
                return Some(RelationViolation::Braid { generator: i });
            }
        }
        for i in 0..expected {
            for j in i + 2..expected {
                let (a, b) = (&self.generators[i], &self.generators[j]);
                if !c(a, b).same_matrix(&c(b, a)) {
                    return Some(RelationViolation::Commutation { first: i, second: j });
                }
            }
        }
        None
    }

    /// Image of `p`, multiplied out along its reduced word.
    pub fn action_of(&self, p: &Permutation) -> Result<LinMap> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                got: p.degree(),
            });
        }
        let mut m = LinMap::identity(&self.space);
        for i in p.reduced_word() {
            m = m.compose(&self.generators[i])?;
        }
        Ok(m)
    }
}

/// One component `P(m, n)` of an S-bimodule with its two actions.
#[derive(Clone, Debug)]
pub struct BimoduleComponent {
    pub biarity: Biarity,
    pub space: BasedSpace,
    /// Action of `S_m` permuting outputs.
    pub left: Representation,
    /// Action of `S_n` permuting inputs.
    pub right: Representation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub biarity: Biarity,
    pub violation: Option<(Side, RelationViolation)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Both,
}

impl ComponentReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

impl BimoduleComponent {
    pub fn trivial(biarity: Biarity, space: BasedSpace) -> Self {
        BimoduleComponent {
            biarity,
            left: Representation::trivial(biarity.outputs, &space),
            right: Representation::trivial(biarity.inputs, &space),
            space,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn validate(&self) -> ComponentReport {
        let violation = self.find_violation();
        ComponentReport {
            biarity: self.biarity,
            violation,
        }
    }

    fn find_violation(&self) -> Option<(Side, RelationViolation)> {
        if self.left.degree() != self.biarity.outputs || self.left.dim() != self.dim() {
            return Some((Side::Left, RelationViolation::NotSquare { generator: 0 }));
        }
        if self.right.degree() != self.biarity.inputs || self.right.dim() != self.dim() {
            return Some((Side::Right, RelationViolation::NotSquare { generator: 0 }));
        }
        if let Some(v) = self.left.first_violation() {
            return Some((Side::Left, v));
        }
        if let Some(v) = self.right.first_violation() {
            return Some((Side::Right, v));
        }
        for (i, l) in self.left.generators().iter().enumerate() {
            for (j, r) in self.right.generators().iter().enumerate() {
                if !l.compose(r).unwrap().same_matrix(&r.compose(l).unwrap()) {
                    return Some((
                        Side::Both,
                        RelationViolation::ActionsDoNotCommute { left: i, right: j },
                    ));
                }
            }
        }
        None
    }
}
