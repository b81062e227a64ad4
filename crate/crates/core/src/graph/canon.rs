//! Shared helpers for canonical forms and their byte encodings.

/// Header line of graph basis dumps.
pub const GFM_HEADER: &str = "GFM1";

pub(crate) fn push_u8(out: &mut Vec<u8>, x: usize) {
    out.push(u8::try_from(x).expect("graph too large for byte encoding"));
}

/// Records the order in which a walk first reaches each vertex.
pub(crate) struct Discovery {
    rank: Vec<usize>,
    next: usize,
}

impl Discovery {
    pub(crate) fn new(n: usize) -> Self {
        Discovery {
            rank: vec![usize::MAX; n],
            next: 0,
        }
    }

    /// Marks `v` visited; false if it already was.
    pub(crate) fn visit(&mut self, v: usize) -> bool {
        if self.rank[v] != usize::MAX {
            return false;
        }
        self.rank[v] = self.next;
        self.next += 1;
        true
    }

    pub(crate) fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub(crate) fn all_visited(&self) -> bool {
        self.next == self.rank.len()
    }

    /// Vertices in discovery order; unvisited ones last, by index.
    pub(crate) fn order(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = (0..self.rank.len()).collect();
        vs.sort_by_key(|&v| (self.rank[v], v));
        vs
    }
}

/// Hex rendering of a byte code, used in dumps.
pub fn hex(code: &[u8]) -> String {
    code.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unhex(s: &str) -> Option<Vec<u8>> {
    if s.len() % 2 != 0 {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
        .collect()
}
