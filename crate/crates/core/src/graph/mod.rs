//! Directed graphs without directed cycles, leveled and unleveled, with
//! globally labeled legs.
//!
//! Orientation: level 0 is nearest the global inputs. Outputs of a level feed
//! the inputs of the level above; global outputs leave the top level.

mod canon;
mod enumerate;
mod leveled;
mod shape;

pub use canon::{hex, unhex, GFM_HEADER};
pub use enumerate::{enumerate_graphs, enumerate_leveled, enumerate_leveled_weighted, enumerate_two_level};
pub use leveled::{Component, LeveledGraph, Vertex, VertexKind};
pub use shape::{graft, End, GraphShape};

use std::fmt;

/// `(outputs, inputs)`; a component `P(m, n)` has biarity `m` outputs, `n` inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Biarity {
    pub outputs: usize,
    pub inputs: usize,
}

impl Biarity {
    pub const fn new(outputs: usize, inputs: usize) -> Self {
        Biarity { outputs, inputs }
    }

    pub const UNIT: Biarity = Biarity::new(1, 1);
}

impl fmt::Display for Biarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.outputs, self.inputs)
    }
}

/// Which monoidal product, and so which class of graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Properad,
    Operad,
    Dioperad,
    HalfProp,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Properad,
        Variant::Operad,
        Variant::Dioperad,
        Variant::HalfProp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Properad => "properad",
            Variant::Operad => "operad",
            Variant::Dioperad => "dioperad",
            Variant::HalfProp => "half-prop",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s || (s == "halfProp" && *v == Variant::HalfProp))
    }

    /// Whether a component of this biarity may be nonzero.
    pub fn allows_biarity(self, b: Biarity) -> bool {
        match self {
            Variant::Operad => b.outputs == 1,
            _ => true,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Finite bounds making every object finite-dimensional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    pub max_in: usize,
    pub max_out: usize,
    /// Maximal weight, i.e. number of generator vertices.
    pub max_weight: u32,
}

impl Truncation {
    pub const fn new(max_in: usize, max_out: usize, max_weight: u32) -> Self {
        Truncation {
            max_in,
            max_out,
            max_weight,
        }
    }

    pub fn contains(&self, b: Biarity) -> bool {
        b.inputs <= self.max_in && b.outputs <= self.max_out
    }

    /// Biarities inside the box, excluding `(0,0)`, in (outputs, inputs) order.
    pub fn biarities(&self) -> Vec<Biarity> {
        let mut out = Vec::new();
        for m in 0..=self.max_out {
            for n in 0..=self.max_in {
                if m + n > 0 {
                    out.push(Biarity::new(m, n));
                }
            }
        }
        out
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::new(4, 4, 3)
    }
}
