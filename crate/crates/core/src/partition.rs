//! Integer partitions and their diagram combinatorics.

use std::fmt;

/// A partition: weakly decreasing positive integer parts. The empty
/// partition (of zero) is allowed.
///
/// Diagram accessors use 0-indexed squares `(i, j)`: square `(i, j)` is in
/// the diagram when `j < parts[i]`. Arm, leg, co-arm and co-leg lengths
/// count boxes strictly to the right, below, to the left, and above.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition, checking that parts are weakly decreasing and
    /// positive.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "partition parts must be weakly decreasing"
        );
        assert!(
            parts.iter().all(|&p| p > 0),
            "partition parts must be positive"
        );
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|kappa|`, the sum of the parts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Part `i` (0-indexed), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// The conjugate partition (rows and columns of the diagram swapped).
    pub fn conjugate(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let cols = self.parts[0] as usize;
        let mut conj = Vec::with_capacity(cols);
        for j in 0..cols {
            conj.push(self.parts.iter().filter(|&&p| p as usize > j).count() as u32);
        }
        Partition { parts: conj }
    }

    /// Iterator over the diagram squares `(i, j)`, row-major, 0-indexed.
    pub fn squares(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p as usize).map(move |j| (i, j)))
    }

    /// Arm length: boxes to the right of `(i, j)` in its row.
    pub fn arm(&self, i: usize, j: usize) -> u32 {
        self.part(i) - 1 - j as u32
    }

    /// Co-arm length: boxes to the left of `(i, j)` in its row.
    pub fn coarm(&self, _i: usize, j: usize) -> u32 {
        j as u32
    }

    /// Leg length: boxes below `(i, j)` in its column.
    pub fn leg(&self, i: usize, j: usize) -> u32 {
        self.parts
            .iter()
            .skip(i + 1)
            .filter(|&&p| p as usize > j)
            .count() as u32
    }

    /// Co-leg length: boxes above `(i, j)` in its column.
    pub fn coleg(&self, i: usize, _j: usize) -> u32 {
        i as u32
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `k` with at most `max_parts` parts, in
/// reverse-lexicographic order (largest first part first). Deterministic;
/// `partitions_of(0, _)` is the singleton list holding the empty partition.
pub fn partitions_of(k: u32, max_parts: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    descend(k, k, max_parts, &mut current, &mut out);
    out
}

fn descend(remaining: u32, max_part: u32, slots: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    if slots == 0 {
        return;
    }
    let hi = remaining.min(max_part);
    // Largest next part first gives reverse-lexicographic order.
    for next in (1..=hi).rev() {
        current.push(next);
        descend(remaining - next, next, slots - 1, current, out);
        current.pop();
    }
}
