use super::power::{AugmentedObject, LevelPower, TildeQuotient};
use crate::error::{Error, Result};
use crate::graph::{Biarity, LeveledGraph, Variant};
use crate::linalg::{BasedSpace, Label, LinMap, SparseVec};
use crate::perm::{BimoduleComponent, Representation};
use crate::product::{boxtimes, unit_bimodule, ProductResult, SBimodule, SBimoduleMap};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

/// One step of the chain `Ṽ_n(w) → Ṽ_{n+1}(w)` at a fixed biarity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityStep {
    pub biarity: Biarity,
    pub weight: u32,
    pub n: usize,
    pub dim_from: usize,
    pub dim_to: usize,
    pub rank: usize,
}

impl StabilityStep {
    pub fn is_isomorphism(&self) -> bool {
        self.dim_from == self.dim_to && self.rank == self.dim_from
    }
}

/// `F(V)`, the colimit of `Ṽ_0 → Ṽ_1 → ...`, computed weight by weight up
/// to the truncation bound `W`. The weight-`w` part is that of `Ṽ_w`.
#[derive(Debug)]
pub struct FreeMonoid {
    variant: Variant,
    aug: AugmentedObject,
    tildes: Vec<TildeQuotient>,
    bimodule: Arc<SBimodule>,
    /// per biarity, per basis vector of `F`: (weight, index in `Ṽ_weight`)
    index: BTreeMap<Biarity, Vec<(u32, usize)>>,
    /// `η̃` at weight `w` from `n` to `n + 1`, in weight-part coordinates
    steps: BTreeMap<(usize, Biarity, u32), LinMap>,
    square: OnceLock<ProductResult>,
}

impl FreeMonoid {
    /// Generators are placed in weight 1 whatever their grading in `v`.
    pub fn new(v: &SBimodule, variant: Variant) -> Result<Self> {
        let t = v.truncation();
        if let Some(b) = v.support().find(|b| !variant.allows_biarity(*b)) {
            return Err(Error::InvalidInput(format!("{variant} generators cannot have biarity {b}")));
        }
        let base = Arc::new(v.regraded(1)?);
        let aug = AugmentedObject::new(base)?;
        let big_w = t.max_weight;
        let cap = big_w as usize + 1;
        let mut tildes = Vec::with_capacity(cap + 1);
        for n in 0..=cap {
            let p = LevelPower::new(&aug, n, variant, 0)?;
            tildes.push(TildeQuotient::new(&aug, p)?);
        }
        let mut steps = BTreeMap::new();
        for n in 0..cap {
            for b in t.biarities() {
                for w in 0..=big_w {
                    let m = tildes[n].eta_tilde_weight(&tildes[n + 1], b, w)?;
                    steps.insert((n, b, w), m);
                }
            }
        }
        for b in t.biarities() {
            for w in 0..=big_w {
                for n in w as usize..cap {
                    let m = &steps[&(n, b, w)];
                    if !m.is_isomorphism() {
                        return Err(Error::NonStabilized { biarity: b, weight: w, cap });
                    }
                }
            }
        }
        let mut out = SBimodule::zero(t);
        let mut index = BTreeMap::new();
        for b in t.biarities() {
            let mut idx = Vec::new();
            let mut labels = Vec::new();
            let mut weights = Vec::new();
            for w in 0..=big_w {
                let q = &tildes[w as usize];
                let space = q.bimodule().space(b);
                for k in q.weight_part(b, w) {
                    idx.push((w, k));
                    labels.push(space.label(k).clone());
                    weights.push(w);
                }
            }
            if idx.is_empty() {
                continue;
            }
            let fspace = BasedSpace::new(labels)?;
            let pos: BTreeMap<(u32, usize), usize> = idx.iter().enumerate().map(|(i, x)| (*x, i)).collect();
            let restrict = |side: fn(&BimoduleComponent) -> &Representation, deg: usize| {
                let gens = (0..deg.saturating_sub(1))
                    .map(|g| {
                        let cols = idx
                            .iter()
                            .map(|&(w, k)| {
                                let c = tildes[w as usize].bimodule().component(b).expect("component");
                                side(c).generator(g).column(k).remap(|j| pos.get(&(w, j)).copied())
                            })
                            .collect();
                        LinMap::from_columns(fspace.clone(), fspace.clone(), cols)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok::<_, Error>(Representation::new_unchecked(deg, fspace.clone(), gens))
            };
            let comp = BimoduleComponent {
                biarity: b,
                left: restrict(|c| &c.left, b.outputs)?,
                right: restrict(|c| &c.right, b.inputs)?,
                space: fspace.clone(),
            };
            out.insert(comp, weights)?;
            index.insert(b, idx);
        }
        out.set_overflow(tildes[cap].bimodule().overflow().clone());
        Ok(FreeMonoid {
            variant,
            aug,
            tildes,
            bimodule: Arc::new(out),
            index,
            steps,
            square: OnceLock::new(),
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn augmented(&self) -> &AugmentedObject {
        &self.aug
    }

    /// Generators, regraded to weight 1.
    pub fn generators(&self) -> &Arc<SBimodule> {
        &self.aug.base
    }

    pub fn bimodule(&self) -> &Arc<SBimodule> {
        &self.bimodule
    }

    pub fn dim(&self, b: Biarity) -> usize {
        self.bimodule.dim(b)
    }

    pub fn dim_weight(&self, b: Biarity, w: u32) -> usize {
        self.bimodule.dim_weight(b, w)
    }

    /// `Ṽ_n` for `n` up to the cap `W + 1`.
    pub fn tilde(&self, n: usize) -> &TildeQuotient {
        &self.tildes[n]
    }

    pub fn cap(&self) -> usize {
        self.tildes.len() - 1
    }

    /// Weight and `Ṽ_weight` index of basis vector `i` at `b`.
    pub fn locate(&self, b: Biarity, i: usize) -> (u32, usize) {
        self.index[&b][i]
    }

    /// A leveled representative of basis vector `i`: `weight` levels,
    /// decorated by `V_+`.
    pub fn representative(&self, b: Biarity, i: usize) -> (LeveledGraph, Vec<usize>) {
        let (w, k) = self.locate(b, i);
        self.tildes[w as usize].representative(b, k)
    }

    /// Every step of the `η̃` chain from `n = w` to the cap.
    pub fn stability_report(&self) -> Vec<StabilityStep> {
        self.steps
            .iter()
            .filter(|((n, _, w), _)| *n >= *w as usize)
            .map(|(&(n, b, w), m)| StabilityStep {
                biarity: b,
                weight: w,
                n,
                dim_from: m.domain().dim(),
                dim_to: m.codomain().dim(),
                rank: m.rank(),
            })
            .collect()
    }

    /// `j_n` on a vector of `Ṽ_n`.
    pub fn j(&self, n: usize, b: Biarity, v: &SparseVec) -> Result<SparseVec> {
        let q = &self.tildes[n];
        let weights = q.bimodule().weights(b);
        let mut parts: BTreeMap<u32, Vec<(usize, crate::linalg::Scalar)>> = BTreeMap::new();
        for (k, c) in v.entries() {
            parts.entry(weights[*k]).or_default().push((*k, c.clone()));
        }
        let mut out = SparseVec::new();
        for (w, entries) in parts {
            let part = q.weight_part(b, w);
            let pos: BTreeMap<usize, usize> = part.iter().enumerate().map(|(i, k)| (*k, i)).collect();
            let mut x = SparseVec::from_pairs(entries.into_iter().map(|(k, c)| (pos[&k], c)).collect());
            let w_us = w as usize;
            if n <= w_us {
                for s in n..w_us {
                    x = self.steps[&(s, b, w)].apply(&x);
                }
            } else {
                for s in (w_us..n).rev() {
                    x = self.steps[&(s, b, w)].inverse()?.apply(&x);
                }
            }
            out = out.add(&x.remap(|i| Some(self.offset(b, w) + i)));
        }
        Ok(out)
    }

    fn offset(&self, b: Biarity, w: u32) -> usize {
        self.index.get(&b).map_or(0, |idx| idx.iter().take_while(|(x, _)| *x < w).count())
    }

    /// Class in `F` of an `n`-level graph decorated by `V_+`.
    pub fn class(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        let n = g.num_levels();
        if n > self.cap() {
            return Err(Error::TruncationExceeded(format!("{n} levels exceed the cap {}", self.cap())));
        }
        let v = self.tildes[n].class(g, deco)?;
        self.j(n, g.biarity(), &v)
    }

    /// Evaluates a leveled graph whose vertices carry basis vectors of `F`
    /// by inserting their representatives level by level.
    pub fn compose(&self, g: &LeveledGraph, deco: &[usize]) -> Result<SparseVec> {
        let mut parts = Vec::with_capacity(deco.len());
        let mut sizes = vec![0usize; g.num_levels()];
        let mut reps = Vec::with_capacity(deco.len());
        for ((l, _, v), &d) in g.vertices().zip(deco) {
            let (h, hd) = self.representative(v.biarity, d);
            sizes[l] = sizes[l].max(h.num_levels());
            reps.push((l, h, hd));
        }
        let empty: Vec<bool> = sizes.iter().map(|s| *s == 0).collect();
        for s in sizes.iter_mut() {
            *s = (*s).max(1);
        }
        let mut pdeco = Vec::with_capacity(reps.len());
        for (l, mut h, mut hd) in reps {
            while h.num_levels() < sizes[l] {
                let top = h.num_levels();
                let (h2, d2) = super::power::insert_units(&h, &hd, top);
                h = h2;
                hd = d2;
            }
            parts.push(h);
            pdeco.push(hd);
        }
        let (mut fine, origin) = g.substitute(&sizes, &parts)?;
        let mut fdeco: Vec<usize> = origin.iter().map(|&(p, pv)| pdeco[p][pv]).collect();
        let starts: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, s| {
                let x = *acc;
                *acc += s;
                Some(x)
            })
            .collect();
        for l in (0..sizes.len()).rev().filter(|l| empty[*l]) {
            let lvl = starts[l];
            let first: usize = (0..lvl).map(|k| fine.level(k).len()).sum();
            let count = fine.level(lvl).len();
            fine = fine.splice_level(lvl)?;
            fdeco.drain(first..first + count);
        }
        self.class(&fine, &fdeco)
    }

    /// `F ⊠ F`, computed once.
    pub fn square(&self) -> Result<&ProductResult> {
        if let Some(s) = self.square.get() {
            return Ok(s);
        }
        let s = boxtimes(&self.bimodule, &self.bimodule, self.variant, self.bimodule.truncation())?;
        Ok(self.square.get_or_init(|| s))
    }

    /// `μ̄ : F ⊠ F → F`.
    pub fn mu(&self) -> Result<SBimoduleMap> {
        let sq = self.square()?;
        SBimoduleMap::from_fn(sq.bimodule.clone(), self.bimodule.clone(), |b, e| {
            let (g, d) = sq.space.representative(b, e);
            self.compose(g, d)
        })
    }

    /// `η̄ : I → F`.
    pub fn eta(&self) -> Result<SBimoduleMap> {
        let unit = Arc::new(unit_bimodule(self.bimodule.truncation()));
        SBimoduleMap::from_fn(unit, self.bimodule.clone(), |_, _| {
            self.class(&LeveledGraph::identity(), &[])
        })
    }

    /// `ε̄ : F → I`, killing every positive weight.
    pub fn epsilon(&self) -> Result<SBimoduleMap> {
        let unit = Arc::new(unit_bimodule(self.bimodule.truncation()));
        SBimoduleMap::from_fn(self.bimodule.clone(), unit, |b, i| {
            Ok(if self.locate(b, i).0 == 0 { SparseVec::unit(0) } else { SparseVec::new() })
        })
    }

    /// `u_V : V → F(V)`, onto the weight-1 part.
    pub fn unit_map(&self) -> Result<SBimoduleMap> {
        SBimoduleMap::from_fn(self.aug.base.clone(), self.bimodule.clone(), |b, i| {
            self.class(&LeveledGraph::corolla(b), &[self.aug.lift(b, i)])
        })
    }

    /// Basis labels of `F` at `(b, w)`, in basis order.
    pub fn basis(&self, b: Biarity, w: u32) -> Vec<(usize, Label)> {
        let space = self.bimodule.space(b);
        self.index
            .get(&b)
            .map(|idx| {
                idx.iter()
                    .enumerate()
                    .filter(|(_, (x, _))| *x == w)
                    .map(|(i, _)| (i, space.label(i).clone()))
                    .collect()
            })
            .unwrap_or_default()
    }
}
