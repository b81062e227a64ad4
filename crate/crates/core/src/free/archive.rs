use super::colimit::FreeMonoid;
use super::direct::DirectFree;
use crate::error::{Error, Result};
use crate::graph::{hex, Biarity, GraphShape, GFM_HEADER};
use crate::linalg::LinMap;
use crate::product::SBimodule;
use std::fmt::Write;
use std::path::Path;

/// `m,n,weight,dim` rows for every nonzero graded piece.
pub fn dims_csv(f: &FreeMonoid) -> String {
    let mut out = String::from("m,n,weight,dim\n");
    let t = f.bimodule().truncation();
    for b in t.biarities() {
        for w in 0..=t.max_weight {
            let d = f.dim_weight(b, w);
            if d > 0 {
                let _ = writeln!(out, "{},{},{},{}", b.outputs, b.inputs, w, d);
            }
        }
    }
    out
}

/// Leveled representatives: `m n weight hexcode deco` after the header.
pub fn basis_registry(f: &FreeMonoid) -> String {
    let mut out = format!("{GFM_HEADER}\n");
    for b in f.bimodule().truncation().biarities() {
        for i in 0..f.dim(b) {
            let (g, d) = f.representative(b, i);
            let d: Vec<String> = d.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{} {} {} {} {}", b.outputs, b.inputs, f.locate(b, i).0, hex(&g.encode()), d.join(","));
        }
    }
    out
}

/// Dense matrix, one row per line, entries as `p/q`, after a `rows cols` line.
pub fn matrix_text(m: &LinMap) -> String {
    let rows = m.to_rows();
    let mut out = format!("{} {}\n", m.codomain().dim(), m.domain().dim());
    for r in rows {
        let cells: Vec<String> = r.iter().map(|q| format!("{}/{}", q.numer(), q.denom())).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

/// Writes `dims.csv`, `basis.gfm` and one `mu/<m>_<n>.txt` per biarity.
pub fn write_archive(f: &FreeMonoid, dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir.join("mu")).map_err(io)?;
    std::fs::write(dir.join("dims.csv"), dims_csv(f)).map_err(io)?;
    std::fs::write(dir.join("basis.gfm"), basis_registry(f)).map_err(io)?;
    let mu = f.mu()?;
    for b in mu.domain().support() {
        let name = format!("{}_{}.txt", b.outputs, b.inputs);
        std::fs::write(dir.join("mu").join(name), matrix_text(&mu.at(b))).map_err(io)?;
    }
    Ok(())
}

/// One line per basis class at `(b, w)`: canonical code of the graph without
/// levels, then the generator labels of its vertices. Sorted.
pub fn basis_lines_direct(d: &DirectFree, b: Biarity, w: u32) -> Vec<String> {
    let mut lines: Vec<String> = (0..d.dim(b))
        .filter(|&i| d.bimodule().weights(b)[i] == w)
        .map(|i| {
            let (g, deco) = d.representative(b, i);
            line(d.generators(), g, deco)
        })
        .collect();
    lines.sort();
    lines
}

/// As [`basis_lines_direct`], from the leveled representatives of `F(V)`.
pub fn basis_lines_colimit(f: &FreeMonoid, b: Biarity, w: u32) -> Vec<String> {
    let aug = f.augmented();
    let mut lines: Vec<String> = (0..f.dim(b))
        .filter(|&i| f.locate(b, i).0 == w)
        .map(|i| {
            let (g, deco) = f.representative(b, i);
            let mut strands = Vec::new();
            let mut kept = Vec::new();
            for (k, ((_, _, v), &x)) in g.vertices().zip(&deco).enumerate() {
                match aug.lower(v.biarity, x) {
                    Some(e) => kept.push(e),
                    None => strands.push(k),
                }
            }
            let shape = g.mark_strands(&strands).forget_levels();
            let (c, order) = shape.canonical();
            let kept: Vec<usize> = order.iter().map(|&o| kept[o]).collect();
            line(f.generators(), &c, &kept)
        })
        .collect();
    lines.sort();
    lines
}

fn line(v: &SBimodule, g: &GraphShape, deco: &[usize]) -> String {
    let labels: Vec<String> = g
        .vertices()
        .iter()
        .zip(deco)
        .map(|(vb, &i)| v.space(*vb).label(i).to_string())
        .collect();
    let labels = if labels.is_empty() { "-".to_string() } else { labels.join(",") };
    format!("{} {}", hex(&g.canonical_code()), labels)
}
