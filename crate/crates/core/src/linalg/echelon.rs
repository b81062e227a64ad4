use super::{Scalar, SparseVec};
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Reduced row-echelon basis of a subspace of `k^ambient`, grown incrementally.
///
/// Pivots are leftmost nonzero coordinates; every stored row has a 1 at its
/// pivot and zeros at every other pivot.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<SparseVec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Echelon {
            ambient,
            rows: Vec::new(),
            pivot_row: HashMap::new(),
        }
    }

    pub fn from_vectors<'a>(ambient: usize, vs: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut e = Echelon::new(ambient);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_row.contains_key(&c)
    }

    /// Rows sorted by pivot.
    pub fn basis(&self) -> Vec<SparseVec> {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| r.leading());
        rows
    }

    /// Remainder of `v` modulo the span; supported on non-pivot coordinates.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (c, _) in v.entries() {
            if let Some(&r) = self.pivot_row.get(c) {
                let coef = out.get(*c);
                if !coef.is_zero() {
                    out = out.add_scaled(&-coef, &self.rows[r]);
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.leading() else {
            return false;
        };
        let lead = r.get(p);
        let r = if lead.is_one() {
            r
        } else {
            r.scale(&(Scalar::one() / lead))
        };
        for row in self.rows.iter_mut() {
            let c = row.get(p);
            if !c.is_zero() {
                *row = row.add_scaled(&-c, &r);
            }
        }
        self.pivot_row.insert(p, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.pivot_row.keys().copied().collect();
        p.sort_unstable();
        p
    }

    /// Coordinates of `v` (assumed in the span) in terms of the pivot-sorted basis.
    pub fn coordinates(&self, v: &SparseVec) -> Option<SparseVec> {
        if !self.contains(v) {
            return None;
        }
        let pivots = self.pivots();
        let pos: HashMap<usize, usize> = pivots.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        Some(SparseVec::from_pairs(
            v.entries()
                .iter()
                .filter_map(|(c, x)| pos.get(c).map(|i| (*i, x.clone())))
                .collect(),
        ))
    }
}

/// Quotient of `k^ambient` by the span held in an [`Echelon`].
///
/// Basis of the quotient: the non-pivot coordinates, in increasing order. The
/// canonical section sends each quotient basis vector to the matching unit vector.
#[derive(Clone, Debug)]
pub struct Quotient {
    relations: Echelon,
    kept: Vec<usize>,
    kept_pos: HashMap<usize, usize>,
}

impl Quotient {
    pub fn new(relations: Echelon) -> Self {
        let kept: Vec<usize> = (0..relations.ambient())
            .filter(|c| !relations.is_pivot(*c))
            .collect();
        let kept_pos = kept.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        Quotient {
            relations,
            kept,
            kept_pos,
        }
    }

    pub fn dim(&self) -> usize {
        self.kept.len()
    }

    pub fn ambient(&self) -> usize {
        self.relations.ambient()
    }

    pub fn relations(&self) -> &Echelon {
        &self.relations
    }

    /// Ambient coordinates retained as quotient basis.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn project(&self, v: &SparseVec) -> SparseVec {
        self.relations
            .reduce(v)
            .remap(|c| self.kept_pos.get(&c).copied())
    }

    /// Projection of a unit vector.
    pub fn project_unit(&self, c: usize) -> SparseVec {
        match self.kept_pos.get(&c) {
            Some(&i) => SparseVec::unit(i),
            None => self.project(&SparseVec::unit(c)),
        }
    }

    pub fn section(&self, q: &SparseVec) -> SparseVec {
        q.remap(|i| Some(self.kept[i]))
    }

    pub fn section_unit(&self, i: usize) -> usize {
        self.kept[i]
    }
}
