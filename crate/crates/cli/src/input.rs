//! JSON input files: generator presentations, monoids and maps.

use freemon::graph::{Biarity, Truncation, Variant};
use freemon::linalg::{bit_size, parse_scalar, BasedSpace, Label, LinMap, Scalar, SparseVec};
use freemon::perm::{BimoduleComponent, Representation};
use freemon::product::{SBimodule, SBimoduleMap};
use freemon::{Error, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

pub const DEFAULT_MAX_BITS: u64 = 4096;

/// Bit-size cap on every rational read or printed, from `GFM_MAX_BITS`.
pub fn max_bits() -> u64 {
    std::env::var("GFM_MAX_BITS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_BITS)
}

/// A rational written as `"p/q"`; bare JSON integers are accepted too.
#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
enum Rational {
    Text(String),
    Int(i64),
}

impl Rational {
    fn value(&self, cap: u64) -> Result<Scalar> {
        let q = match self {
            Rational::Text(s) => parse_scalar(s)?,
            Rational::Int(i) => freemon::linalg::int(*i),
        };
        if bit_size(&q) > cap {
            return Err(Error::InvalidInput(format!("entry exceeds {cap} bits (GFM_MAX_BITS)")));
        }
        Ok(q)
    }
}

type Matrix = Vec<Vec<Rational>>;

#[derive(Deserialize, Debug)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TruncationSpec {
    max_in: usize,
    max_out: usize,
    max_weight: u32,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct GeneratorSpec {
    name: String,
    outputs: usize,
    inputs: usize,
    dim: usize,
    #[serde(default)]
    left: Option<Vec<Matrix>>,
    #[serde(default)]
    right: Option<Vec<Matrix>>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct PresentationSpec {
    presentation_version: u32,
    #[serde(default)]
    variant: Option<String>,
    #[serde(default)]
    truncation: Option<TruncationSpec>,
    #[serde(default)]
    generators: Vec<GeneratorSpec>,
}

/// A parsed presentation: the generating bimodule plus where each named
/// generator sits in it.
#[derive(Debug)]
pub struct Presentation {
    pub variant: Variant,
    pub truncation: Truncation,
    pub bimodule: Arc<SBimodule>,
    /// name → (biarity, offset of its block, dim)
    pub blocks: BTreeMap<String, (Biarity, usize, usize)>,
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))
}

pub fn parse_presentation(text: &str, variant_flag: Option<Variant>) -> Result<Presentation> {
    let spec: PresentationSpec = json(text)?;
    if spec.presentation_version != 1 {
        return Err(Error::InvalidInput(format!(
            "unsupported presentation_version {}",
            spec.presentation_version
        )));
    }
    let variant = match (variant_flag, &spec.variant) {
        (Some(v), _) => v,
        (None, Some(s)) => Variant::parse(s).ok_or_else(|| Error::InvalidInput(format!("unknown variant {s:?}")))?,
        (None, None) => Variant::Properad,
    };
    let truncation = spec
        .truncation
        .map(|t| Truncation::new(t.max_in, t.max_out, t.max_weight))
        .unwrap_or_default();
    let cap = max_bits();

    let mut by_biarity: BTreeMap<Biarity, Vec<&GeneratorSpec>> = BTreeMap::new();
    for g in &spec.generators {
        if g.dim == 0 {
            continue;
        }
        by_biarity.entry(Biarity::new(g.outputs, g.inputs)).or_default().push(g);
    }
    let mut names = std::collections::BTreeSet::new();
    for g in &spec.generators {
        if !names.insert(g.name.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate generator name {:?}", g.name)));
        }
    }

    let mut bimodule = SBimodule::zero(truncation);
    let mut blocks = BTreeMap::new();
    for (b, gens) in by_biarity {
        let mut labels = Vec::new();
        let mut left_blocks = Vec::new();
        let mut right_blocks = Vec::new();
        let mut offset = 0;
        for g in gens {
            for k in 0..g.dim {
                labels.push(if g.dim == 1 { Label::Name(g.name.clone()) } else { Label::Name(format!("{}.{k}", g.name)) });
            }
            blocks.insert(g.name.clone(), (b, offset, g.dim));
            offset += g.dim;
            left_blocks.push(action(g, &g.left, b.outputs, "left", cap)?);
            right_blocks.push(action(g, &g.right, b.inputs, "right", cap)?);
        }
        let space = BasedSpace::new(labels)?;
        let left = Representation::new(b.outputs, space.clone(), diagonal(&space, &left_blocks, b.outputs)?)
            .map_err(|e| Error::InvalidInput(format!("left action at {b}: {e}")))?;
        let right = Representation::new(b.inputs, space.clone(), diagonal(&space, &right_blocks, b.inputs)?)
            .map_err(|e| Error::InvalidInput(format!("right action at {b}: {e}")))?;
        let d = space.dim();
        bimodule.insert(BimoduleComponent { biarity: b, space, left, right }, vec![1; d])?;
    }
    Ok(Presentation { variant, truncation, bimodule: Arc::new(bimodule), blocks })
}

/// Images of `s_1 .. s_{degree-1}` for one generator, as dense rows.
fn action(g: &GeneratorSpec, m: &Option<Vec<Matrix>>, degree: usize, side: &str, cap: u64) -> Result<Vec<Vec<Vec<Scalar>>>> {
    let count = degree.saturating_sub(1);
    let Some(ms) = m else {
        let id = (0..g.dim)
            .map(|i| (0..g.dim).map(|j| freemon::linalg::int((i == j) as i64)).collect())
            .collect::<Vec<_>>();
        return Ok(vec![id; count]);
    };
    if ms.len() != count {
        return Err(Error::InvalidInput(format!(
            "generator {:?}: {} {side} matrices given, {count} expected",
            g.name,
            ms.len()
        )));
    }
    ms.iter()
        .map(|rows| {
            if rows.len() != g.dim || rows.iter().any(|r| r.len() != g.dim) {
                return Err(Error::InvalidInput(format!(
                    "generator {:?}: {side} matrices must be {1}x{1}",
                    g.name,
                    g.dim
                )));
            }
            rows.iter().map(|r| r.iter().map(|q| q.value(cap)).collect()).collect()
        })
        .collect()
}

fn diagonal(space: &BasedSpace, blocks: &[Vec<Vec<Vec<Scalar>>>], degree: usize) -> Result<Vec<LinMap>> {
    let d = space.dim();
    (0..degree.saturating_sub(1))
        .map(|s| {
            let mut rows = vec![vec![freemon::linalg::int(0); d]; d];
            let mut off = 0;
            for blk in blocks {
                let m = &blk[s];
                for (i, r) in m.iter().enumerate() {
                    for (j, q) in r.iter().enumerate() {
                        rows[off + i][off + j] = q.clone();
                    }
                }
                off += m.len();
            }
            LinMap::from_rows(space.clone(), space.clone(), &rows)
        })
        .collect()
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct MonoidSpec {
    kind: String,
    #[serde(default)]
    regular: bool,
    #[serde(default)]
    corrupt: Option<CorruptSpec>,
}

/// Scales `μ` at one biarity, to produce a deliberately broken monoid.
#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct CorruptSpec {
    outputs: usize,
    inputs: usize,
    factor: Rational,
}

#[derive(Debug)]
pub struct MonoidFile {
    pub regular: bool,
    pub corrupt: Option<(Biarity, Scalar)>,
}

pub fn parse_monoid(text: &str) -> Result<MonoidFile> {
    let spec: MonoidSpec = json(text)?;
    if spec.kind != "associative" {
        return Err(Error::InvalidInput(format!("unknown monoid kind {:?}", spec.kind)));
    }
    let corrupt = match spec.corrupt {
        Some(c) => Some((Biarity::new(c.outputs, c.inputs), c.factor.value(max_bits())?)),
        None => None,
    };
    Ok(MonoidFile { regular: spec.regular, corrupt })
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    map: BTreeMap<String, Vec<Vec<Rational>>>,
}

/// Reads `f : V → M`: per generator name, one coordinate vector in `M` per
/// basis vector of the generator. Unlisted generators map to zero.
pub fn parse_map(text: &str, p: &Presentation, target: &Arc<SBimodule>) -> Result<SBimoduleMap> {
    let spec: MapSpec = json(text)?;
    let cap = max_bits();
    let mut cols: BTreeMap<Biarity, Vec<SparseVec>> = BTreeMap::new();
    for b in p.bimodule.support() {
        cols.insert(b, vec![SparseVec::new(); p.bimodule.dim(b)]);
    }
    for (name, images) in &spec.map {
        let &(b, off, dim) = p
            .blocks
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("map names unknown generator {name:?}")))?;
        if images.len() != dim {
            return Err(Error::InvalidInput(format!("generator {name:?} has dim {dim}, {} images given", images.len())));
        }
        let target_dim = target.dim(b);
        for (k, img) in images.iter().enumerate() {
            if img.len() != target_dim {
                return Err(Error::InvalidInput(format!(
                    "image of {name:?}[{k}] has {} coordinates, target has dim {target_dim} at {b}",
                    img.len()
                )));
            }
            let v = img.iter().map(|q| q.value(cap)).collect::<Result<Vec<_>>>()?;
            cols.get_mut(&b).expect("support")[off + k] = SparseVec::from_dense(&v);
        }
    }
    SBimoduleMap::from_fn(p.bimodule.clone(), target.clone(), |b, j| Ok(cols[&b][j].clone()))
}
