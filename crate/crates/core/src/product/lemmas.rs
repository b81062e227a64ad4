//! Randomized checks of the structural lemmas about `⊠`, on small seeded
//! instances built from trivial and sign representations.

use super::{
    boxtimes, homogeneous_decomposition, level_map, level_product, multilinear_part, quotient_bimodule,
    sub_bimodule, SBimodule, SBimoduleMap,
};
use crate::error::Result;
use crate::graph::{Biarity, Truncation, Variant};
use crate::linalg::{image, int, kernel, subspace_sum, BasedSpace, Echelon, Label, LinMap, Scalar, SparseVec};
use crate::perm::{BimoduleComponent, Representation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Result of one suite: how many instances ran and what failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub failures: Vec<String>,
}

impl LemmaOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A bimodule whose basis vectors each span a trivial or a sign line.
#[derive(Clone, Debug)]
struct Lines {
    module: Arc<SBimodule>,
    /// per biarity, whether each basis vector is a sign line
    sign: BTreeMap<Biarity, Vec<bool>>,
}

const TYPES: [Biarity; 3] = [Biarity::new(1, 1), Biarity::new(1, 2), Biarity::new(2, 1)];

fn truncation() -> Truncation {
    Truncation::new(2, 2, 3)
}

fn lines(t: Truncation, spec: &BTreeMap<Biarity, Vec<bool>>, unit: bool) -> Result<Lines> {
    let mut m = SBimodule::zero(t);
    let mut spec = spec.clone();
    if unit {
        spec.entry(Biarity::UNIT).or_default();
    }
    let mut sign = spec.clone();
    for (b, kinds) in &spec {
        if kinds.is_empty() && !(unit && *b == Biarity::UNIT) {
            continue;
        }
        let mut labels: Vec<Label> = Vec::new();
        let mut weights = Vec::new();
        if unit && *b == Biarity::UNIT {
            labels.push(Label::Unit);
            weights.push(0);
        }
        labels.extend(kinds.iter().enumerate().map(|(i, s)| Label::Name(format!("{}{i}", if *s { "s" } else { "t" }))));
        weights.extend(kinds.iter().map(|_| 1));
        let mut all = Vec::new();
        if unit && *b == Biarity::UNIT {
            all.push(false);
        }
        all.extend(kinds.iter().copied());
        let space = BasedSpace::new(labels)?;
        let act = |deg: usize, flip: bool| {
            let gens = (0..deg.saturating_sub(1))
                .map(|_| {
                    let cols = all
                        .iter()
                        .enumerate()
                        .map(|(i, s)| SparseVec::from_pairs(vec![(i, if *s && flip { int(-1) } else { int(1) })]))
                        .collect();
                    LinMap::from_columns(space.clone(), space.clone(), cols)
                })
                .collect::<Result<Vec<_>>>()?;
            Representation::new(deg, space.clone(), gens)
        };
        // sign lines are signed on the larger side
        let comp = BimoduleComponent {
            biarity: *b,
            left: act(b.outputs, b.outputs >= 2)?,
            right: act(b.inputs, b.inputs >= 2)?,
            space: space.clone(),
        };
        m.insert(comp, weights)?;
        sign.insert(*b, all);
    }
    Ok(Lines { module: Arc::new(m), sign })
}

fn random_lines(rng: &mut ChaCha8Rng, max: usize, unit: bool) -> Result<Lines> {
    let mut spec = BTreeMap::new();
    for b in TYPES {
        let n = rng.gen_range(0..=max);
        let kinds: Vec<bool> = (0..n).map(|_| b != Biarity::UNIT && rng.gen_bool(0.3)).collect();
        spec.insert(b, kinds);
    }
    lines(truncation(), &spec, unit)
}

fn small(rng: &mut ChaCha8Rng) -> Scalar {
    int(rng.gen_range(-2..=2))
}

/// A random equivariant map: entries only between lines of the same kind.
fn random_map(rng: &mut ChaCha8Rng, x: &Lines, y: &Lines) -> Result<SBimoduleMap> {
    let mut cols: BTreeMap<Biarity, Vec<SparseVec>> = BTreeMap::new();
    for b in x.module.support() {
        let sx = &x.sign[&b];
        let sy = y.sign.get(&b).cloned().unwrap_or_default();
        let (wx, wy) = (x.module.weights(b), y.module.weights(b));
        let c = sx
            .iter()
            .zip(wx)
            .map(|(kx, w)| {
                SparseVec::from_pairs(
                    sy.iter()
                        .zip(wy)
                        .enumerate()
                        .filter(|(_, (ky, w2))| *ky == kx && *w2 == w)
                        .map(|(i, _)| (i, small(rng)))
                        .collect(),
                )
            })
            .collect();
        cols.insert(b, c);
    }
    SBimoduleMap::from_fn(x.module.clone(), y.module.clone(), |b, i| Ok(cols[&b][i].clone()))
}

fn sum(x: &Lines, y: &Lines) -> Result<Lines> {
    let module = Arc::new(x.module.direct_sum(&y.module)?);
    let mut sign = BTreeMap::new();
    for b in module.support() {
        let mut s = x.sign.get(&b).cloned().unwrap_or_default();
        s.extend(y.sign.get(&b).cloned().unwrap_or_default());
        sign.insert(b, s);
    }
    Ok(Lines { module, sign })
}

fn variant(rng: &mut ChaCha8Rng) -> Variant {
    Variant::ALL[rng.gen_range(0..Variant::ALL.len())]
}

fn run(name: &'static str, seed: u64, n: usize, mut case: impl FnMut(&mut ChaCha8Rng) -> Result<Option<String>>) -> Result<LemmaOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..n {
        if let Some(f) = case(&mut rng)? {
            failures.push(format!("instance {i}: {f}"));
        }
    }
    Ok(LemmaOutcome { name, instances: n, failures })
}

/// `X ↦ A ⊠ X ⊠ B` sends surjections to surjections.
pub fn epimorphisms(seed: u64, n: usize) -> Result<LemmaOutcome> {
    run("epimorphism preservation", seed, n, |rng| {
        let v = variant(rng);
        let t = truncation();
        let a = random_lines(rng, 1, true)?;
        let b = random_lines(rng, 1, true)?;
        let y = random_lines(rng, 2, false)?;
        let z = random_lines(rng, 1, false)?;
        let x = sum(&y, &z)?;
        let tail = random_map(rng, &z, &y)?;
        let f = SBimoduleMap::from_fn(x.module.clone(), y.module.clone(), |bi, i| {
            let dy = y.module.dim(bi);
            Ok(if i < dy { SparseVec::unit(i) } else { tail.image_of(bi, i - dy) })
        })?;
        let dom = level_product(vec![b.module.clone(), x.module.clone(), a.module.clone()], v, t)?;
        let cod = level_product(vec![b.module.clone(), y.module.clone(), a.module.clone()], v, t)?;
        let ida = SBimoduleMap::identity(a.module.clone());
        let idb = SBimoduleMap::identity(b.module.clone());
        let g = level_map(&dom, &cod, &[&idb, &f, &ida])?;
        Ok((!g.is_surjective()).then(|| format!("{v}: image is not everything")))
    })
}

/// For reflexive pairs presenting `M` and `M'`, `π ⊠ π'` is the coequalizer
/// of `d₀ ⊠ d₀'` and `d₁ ⊠ d₁'`.
pub fn coequalizers(seed: u64, n: usize) -> Result<LemmaOutcome> {
    run("reflexive coequalizer preservation", seed, n, |rng| {
        let v = variant(rng);
        let t = truncation();
        let mut pres = Vec::new();
        for _ in 0..2 {
            let x = random_lines(rng, 2, true)?;
            let k = random_lines(rng, 1, false)?;
            let a = random_map(rng, &k, &x)?;
            let b = random_map(rng, &k, &x)?;
            let r = sum(&x, &k)?;
            let dx = |bi: Biarity| x.module.dim(bi);
            let d0 = SBimoduleMap::from_fn(r.module.clone(), x.module.clone(), |bi, i| {
                Ok(if i < dx(bi) { SparseVec::unit(i) } else { a.image_of(bi, i - dx(bi)) })
            })?;
            let d1 = SBimoduleMap::from_fn(r.module.clone(), x.module.clone(), |bi, i| {
                Ok(if i < dx(bi) { SparseVec::unit(i) } else { b.image_of(bi, i - dx(bi)) })
            })?;
            let s0 = SBimoduleMap::from_fn(x.module.clone(), r.module.clone(), |_, i| Ok(SparseVec::unit(i)))?;
            let ident = SBimoduleMap::identity(x.module.clone());
            if !d0.compose(&s0)?.same_matrices(&ident) || !d1.compose(&s0)?.same_matrices(&ident) {
                return Ok(Some("s0 is not a common section".into()));
            }
            let diff = d0.sub(&d1)?;
            let rel: BTreeMap<Biarity, Echelon> = x
                .module
                .support()
                .map(|bi| (bi, image(&diff.at(bi)).echelon()))
                .collect();
            let (_, pi, _) = quotient_bimodule(&x.module, &rel)?;
            pres.push((r, x, d0, d1, pi));
        }
        let (p0, p1) = (&pres[0], &pres[1]);
        // level 0 carries the second presentation
        let rr = boxtimes(&p0.0.module, &p1.0.module, v, t)?;
        let xx = boxtimes(&p0.1.module, &p1.1.module, v, t)?;
        let mm = boxtimes(p0.4.codomain(), p1.4.codomain(), v, t)?;
        let d0 = level_map(&rr, &xx, &[&p1.2, &p0.2])?;
        let d1 = level_map(&rr, &xx, &[&p1.3, &p0.3])?;
        let pi = level_map(&xx, &mm, &[&p1.4, &p0.4])?;
        let diff = d0.sub(&d1)?;
        for bi in t.biarities() {
            let (k, im) = (kernel(&pi.at(bi)), image(&diff.at(bi)));
            if !k.same_span(&im) {
                return Ok(Some(format!("{v}: kernel differs from the image at {bi}")));
            }
        }
        Ok((!pi.is_surjective()).then(|| format!("{v}: π ⊠ π' is not onto")))
    })
}

/// `Im(V ⊠ (A+B ⊕ W)) = Im(V ⊠ (A ⊕ W)) + Im(V ⊠ (B ⊕ W))` inside `V ⊠ W`,
/// images taken on the parts using the sub-object at least once.
pub fn image_sums(seed: u64, n: usize) -> Result<LemmaOutcome> {
    run("ImSum", seed, n, |rng| {
        let v = variant(rng);
        let t = truncation();
        let vv = random_lines(rng, 1, true)?;
        let w = random_lines(rng, 2, false)?;
        let mut subs = Vec::new();
        let mut all: BTreeMap<Biarity, Vec<SparseVec>> = BTreeMap::new();
        for _ in 0..2 {
            let s = random_lines(rng, 1, false)?;
            let f = random_map(rng, &s, &w)?;
            let spans: BTreeMap<Biarity, Vec<SparseVec>> = s
                .module
                .support()
                .map(|bi| (bi, (0..s.module.dim(bi)).map(|i| f.image_of(bi, i)).collect()))
                .collect();
            for (bi, vs) in &spans {
                all.entry(*bi).or_default().extend(vs.iter().cloned());
            }
            subs.push(sub_bimodule(&w.module, &spans)?);
        }
        subs.push(sub_bimodule(&w.module, &all)?);
        let target = boxtimes(&vv.module, &w.module, v, t)?;
        let idv = SBimoduleMap::identity(vv.module.clone());
        let mut images = Vec::new();
        for (a, inc) in &subs {
            let aw = Arc::new(a.direct_sum(&w.module)?);
            let map = SBimoduleMap::from_fn(aw.clone(), w.module.clone(), |bi, i| {
                let da = a.dim(bi);
                Ok(if i < da { inc.image_of(bi, i) } else { SparseVec::unit(i - da) })
            })?;
            let src = boxtimes(&vv.module, &aw, v, t)?;
            let f = level_map(&src, &target, &[&map, &idv])?;
            let mut per = BTreeMap::new();
            for bi in t.biarities() {
                let proj = src.space.projection(bi);
                let cols: Vec<SparseVec> = src
                    .space
                    .raw_elements(bi)
                    .iter()
                    .enumerate()
                    .filter(|(_, (g, d))| {
                        g.vertices().zip(d.iter()).any(|((l, _, x), k)| l == 0 && *k < a.dim(x.biarity))
                    })
                    .map(|(e, _)| f.apply(bi, proj.column(e)))
                    .collect();
                per.insert(bi, crate::linalg::SubspaceInclusion::spanned_by(&target.bimodule.space(bi), &cols));
            }
            images.push(per);
        }
        for bi in t.biarities() {
            let s = subspace_sum(&[images[0][&bi].clone(), images[1][&bi].clone()])?;
            if !s.same_span(&images[2][&bi]) {
                return Ok(Some(format!("{v}: spans differ at {bi}")));
            }
        }
        Ok(None)
    })
}

/// `A ⊠ (X ⊕ Y) ⊠ B` splits as the multilinear part plus `A ⊠ Y ⊠ B`.
pub fn splittings(seed: u64, n: usize) -> Result<LemmaOutcome> {
    run("multilinear splitting", seed, n, |rng| {
        let v = variant(rng);
        let a = random_lines(rng, 1, true)?;
        let b = random_lines(rng, 1, true)?;
        let x = random_lines(rng, 1, false)?;
        let y = random_lines(rng, 1, false)?;
        Ok(match multilinear_part(&a.module, &x.module, &y.module, &b.module, v, truncation()) {
            Ok(_) => None,
            Err(e) => Some(format!("{v}: {e}")),
        })
    })
}

/// The pieces of `A ⊠ X ⊠ B` by middle vertex count are homogeneous (`λ`
/// acts by `λⁿ`), functorial in `X`, and the linear piece is additive.
pub fn homogeneity(seed: u64, n: usize) -> Result<LemmaOutcome> {
    run("homogeneous pieces", seed, n, |rng| {
        let v = variant(rng);
        let t = truncation();
        let a = random_lines(rng, 1, true)?;
        let b = random_lines(rng, 1, true)?;
        let x1 = random_lines(rng, 1, false)?;
        let x2 = random_lines(rng, 1, false)?;
        let x = sum(&x1, &x2)?;
        let h = homogeneous_decomposition(&a.module, &b.module, &x.module, v, t)?;
        let h1 = homogeneous_decomposition(&a.module, &b.module, &x1.module, v, t)?;
        let h2 = homogeneous_decomposition(&a.module, &b.module, &x2.module, v, t)?;
        for bi in t.biarities() {
            if h.dim(1, bi) != h1.dim(1, bi) + h2.dim(1, bi) {
                return Ok(Some(format!("{v}: linear piece not additive at {bi}")));
            }
        }
        let lambda = int(rng.gen_range(2..=3));
        let scale = SBimoduleMap::from_fn(x.module.clone(), x.module.clone(), |_, i| {
            Ok(SparseVec::from_pairs(vec![(i, lambda.clone())]))
        })?;
        let ida = SBimoduleMap::identity(a.module.clone());
        let idb = SBimoduleMap::identity(b.module.clone());
        let s = level_map(&h.total, &h.total, &[&idb, &scale, &ida])?;
        let phi = random_map(rng, &x, &x)?;
        let p = level_map(&h.total, &h.total, &[&idb, &phi, &ida])?;
        for (deg, pieces) in &h.pieces {
            let factor = num_traits::pow(lambda.clone(), *deg);
            for (bi, sub) in pieces {
                for col in sub.inclusion().columns() {
                    if s.apply(*bi, col) != col.scale(&factor) {
                        return Ok(Some(format!("{v}: λ does not act by λ^{deg} at {bi}")));
                    }
                    if !sub.contains(&p.apply(*bi, col)) {
                        return Ok(Some(format!("{v}: piece {deg} not preserved at {bi}")));
                    }
                }
            }
        }
        Ok(None)
    })
}

/// All five suites with `n` instances each.
pub fn all(seed: u64, n: usize) -> Result<Vec<LemmaOutcome>> {
    Ok(vec![
        epimorphisms(seed, n)?,
        coequalizers(seed.wrapping_add(1), n)?,
        image_sums(seed.wrapping_add(2), n)?,
        splittings(seed.wrapping_add(3), n)?,
        homogeneity(seed.wrapping_add(4), n)?,
    ])
}
