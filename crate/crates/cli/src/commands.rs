use crate::input::{self, MonoidFile, Presentation};
use freemon::free::{
    archive, associative, counit, free_extension, forget_map, free_map, verify_monoid, DirectFree, FreeMonoid, Monoid,
    MonoidPresentation,
};
use freemon::graph::{Biarity, Variant};
use freemon::linalg::{bit_size, format_scalar, SparseVec};
use freemon::product::{lemmas, SBimoduleMap};
use freemon::{Error, Result};
use std::fmt::Write;
use std::time::Instant;

/// Lemma-suite instances run by `verify`.
pub const LEMMA_INSTANCES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Single {
    Colimit,
    Direct,
}

/// Text for stdout plus whether a check inside it failed.
pub struct Output {
    pub text: String,
    pub failed: bool,
}

fn build(p: &Presentation, single: Option<Single>, jobs: usize) -> Result<(Option<FreeMonoid>, Option<DirectFree>)> {
    let colimit = || -> Result<Option<FreeMonoid>> {
        match single {
            Some(Single::Direct) => Ok(None),
            _ => FreeMonoid::new(&p.bimodule, p.variant).map(Some),
        }
    };
    let direct = || -> Result<Option<DirectFree>> {
        match single {
            Some(Single::Colimit) => Ok(None),
            _ => DirectFree::new(&p.bimodule, p.variant).map(Some),
        }
    };
    if jobs > 1 && single.is_none() {
        std::thread::scope(|s| {
            let h = s.spawn(direct);
            let f = colimit()?;
            let d = h.join().expect("direct construction thread panicked")?;
            Ok((f, d))
        })
    } else {
        Ok((colimit()?, direct()?))
    }
}

pub fn dims(p: &Presentation, single: Option<Single>, jobs: usize) -> Result<Output> {
    let (f, d) = build(p, single, jobs)?;
    let t = p.truncation;
    let mut text = String::from("m,n,weight,dim_colimit,dim_direct,match\n");
    let mut failed = false;
    for b in t.biarities() {
        for w in 0..=t.max_weight {
            let dc = f.as_ref().map(|f| f.dim_weight(b, w));
            let dd = d.as_ref().map(|d| d.dim_weight(b, w));
            if dc.unwrap_or(0) == 0 && dd.unwrap_or(0) == 0 {
                continue;
            }
            let verdict = match (dc, dd) {
                (Some(x), Some(y)) if x == y => "match",
                (Some(_), Some(_)) => {
                    failed = true;
                    "mismatch"
                }
                _ => "-",
            };
            let show = |x: Option<usize>| x.map_or("-".to_string(), |x| x.to_string());
            let _ = writeln!(text, "{},{},{},{},{},{}", b.outputs, b.inputs, w, show(dc), show(dd), verdict);
        }
    }
    Ok(Output { text, failed })
}

pub fn basis(p: &Presentation, b: Biarity, w: u32, single: Option<Single>, jobs: usize) -> Result<Output> {
    let t = p.truncation;
    if !t.contains(b) || w > t.max_weight {
        return Err(Error::TruncationExceeded(format!(
            "{b} weight {w} lies outside the truncation ({}, {}, {})",
            t.max_in, t.max_out, t.max_weight
        )));
    }
    let (f, d) = build(p, single, jobs)?;
    // the two constructions choose different representatives, so agreement
    // is checked through the forget-levels map rather than line by line
    let failed = match (&f, &d) {
        (Some(f), Some(d)) => {
            let phi = forget_map(f, d)?.at(b);
            f.dim(b) != d.dim(b) || f.dim_weight(b, w) != d.dim_weight(b, w) || phi.rank() != d.dim(b)
        }
        _ => false,
    };
    let lines = match (&f, &d) {
        (_, Some(d)) => archive::basis_lines_direct(d, b, w),
        (Some(f), None) => archive::basis_lines_colimit(f, b, w),
        (None, None) => unreachable!("at least one construction is built"),
    };
    let mut text = format!("{}\n", freemon::graph::GFM_HEADER);
    for l in lines {
        let _ = writeln!(text, "{l}");
    }
    Ok(Output { text, failed })
}

fn monoid(p: &Presentation, m: &MonoidFile) -> Result<MonoidPresentation> {
    let base = associative(p.truncation, m.regular)?;
    match &m.corrupt {
        Some((b, c)) => base.corrupted(*b, c),
        None => Ok(base),
    }
}

struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

pub fn verify(p: &Presentation, m: Option<&MonoidFile>, seed: u64) -> Result<Output> {
    let mut suites = Vec::new();
    let clock = Instant::now();
    let f = FreeMonoid::new(&p.bimodule, p.variant)?;

    let r = verify_monoid(&f)?;
    let mut passed = r.passed();
    let mut detail = format!("F(V): {} products", r.checked);
    if let Some((law, b)) = r.first_failure() {
        let _ = write!(detail, ", {law} fails at {b}");
    }
    let given = m.map(|m| monoid(p, m)).transpose()?;
    if let Some(mm) = &given {
        let r = verify_monoid(mm)?;
        passed &= r.passed();
        let _ = write!(detail, "; M: {} products", r.checked);
        if let Some((law, b)) = r.first_failure() {
            let _ = write!(detail, ", {law} fails at {b}");
        }
    }
    suites.push(Suite { name: "monoid-axioms", passed, detail });

    let steps = f.stability_report();
    let bad = steps.iter().filter(|s| !s.is_isomorphism()).count();
    suites.push(Suite {
        name: "stabilization",
        passed: bad == 0,
        detail: format!("{} steps up to level {}, {bad} not isomorphisms", steps.len(), f.cap()),
    });

    for (name, out) in [
        ("image-sums", lemmas::image_sums(seed, LEMMA_INSTANCES)?),
        ("coequalizers", lemmas::coequalizers(seed, LEMMA_INSTANCES)?),
    ] {
        suites.push(Suite {
            name,
            passed: out.passed(),
            detail: format!("{} instances, {} failures", out.instances, out.failures.len()),
        });
    }

    if let Some(mm) = &given {
        let fm = FreeMonoid::new(mm.bimodule(), Variant::Operad)?;
        let um = fm.unit_map()?;
        let cm = counit(&fm, mm)?;
        let first = cm.compose(&um)?.same_matrices(&SBimoduleMap::identity(mm.bimodule().clone()));

        let ffv = FreeMonoid::new(f.bimodule(), p.variant)?;
        let fu = free_map(&f, &f.unit_map()?, &ffv)?;
        let c = counit(&ffv, &f)?;
        let second = c.compose(&fu)?.same_matrices(&SBimoduleMap::identity(f.bimodule().clone()));
        suites.push(Suite {
            name: "triangle-identities",
            passed: first && second,
            detail: format!(
                "c_M∘u_M = id {}, c_F(V)∘F(u_V) = id {}",
                if first { "holds" } else { "fails" },
                if second { "holds" } else { "fails" }
            ),
        });
    }

    let mut text = String::new();
    let mut failed = false;
    for s in &suites {
        failed |= !s.passed;
        let _ = writeln!(text, "{} {} ({})", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
    }
    let _ = writeln!(text, "# {:.2}s", clock.elapsed().as_secs_f64());
    Ok(Output { text, failed })
}

fn coords(v: &SparseVec, dim: usize) -> Result<String> {
    let cap = input::max_bits();
    let cells = v
        .to_dense(dim)
        .iter()
        .map(|q| {
            if bit_size(q) > cap {
                return Err(Error::InvalidInput(format!("result entry exceeds {cap} bits (GFM_MAX_BITS)")));
            }
            Ok(format_scalar(q))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(if cells.is_empty() { "-".into() } else { cells.join(" ") })
}

pub fn extend(p: &Presentation, m: &MonoidFile, map_text: &str) -> Result<Output> {
    if p.variant != Variant::Operad {
        return Err(Error::InvalidInput("the associative monoid is an operad; use the operad variant".into()));
    }
    let mm = monoid(p, m)?.verified()?;
    let f = input::parse_map(map_text, p, mm.bimodule())?;
    let fm = FreeMonoid::new(&p.bimodule, p.variant)?;
    let ext = free_extension(&fm, &f, &mm)?;
    let holds = ext.compose(&fm.unit_map()?)?.same_matrices(&f);

    let mut text = String::from("m,n,weight,class,image\n");
    let t = p.truncation;
    for b in t.biarities() {
        for i in 0..fm.dim(b) {
            let (w, _) = fm.locate(b, i);
            let img = coords(&ext.image_of(b, i), mm.bimodule().dim(b))?;
            let _ = writeln!(text, "{},{},{},{},{}", b.outputs, b.inputs, w, i, img);
        }
    }
    let _ = writeln!(text, "# extension restricted to generators equals f: {}", if holds { "yes" } else { "no" });
    Ok(Output { text, failed: !holds })
}
