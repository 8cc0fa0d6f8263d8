//! Set partitions of sites into non-empty blocks.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Result};

/// A division of sites `0..n` into disjoint non-empty blocks, stored in
/// canonical form: each block ascending, blocks ordered by smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n_sites: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n_sites: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n_sites];
        for block in &blocks {
            if block.is_empty() {
                return invalid("partition blocks must be non-empty");
            }
            for &s in block {
                if s >= n_sites {
                    return invalid(format!("site {s} out of range for {n_sites} sites"));
                }
                if std::mem::replace(&mut seen[s], true) {
                    return invalid(format!("site {s} appears in two blocks"));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return invalid(format!("site {missing} is not covered"));
        }
        Ok(Self::canonical(n_sites, blocks))
    }

    fn canonical(n_sites: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Self { n_sites, blocks }
    }

    /// Everything in one block.
    pub fn whole(n_sites: usize) -> Self {
        Self {
            n_sites,
            blocks: vec![(0..n_sites).collect()],
        }
    }

    /// Every site on its own.
    pub fn singletons(n_sites: usize) -> Self {
        Self {
            n_sites,
            blocks: (0..n_sites).map(|s| vec![s]).collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, site: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&site))
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.n_sites == coarser.n_sites
            && self.blocks.iter().all(|b| {
                let target = coarser.block_of(b[0]);
                b.iter().all(|&s| coarser.block_of(s) == target)
            })
    }

    /// Stable identifier used to derive per-partition seeds.
    pub fn fingerprint(&self) -> u64 {
        let mut labels = vec![0u64; self.n_sites];
        for (i, b) in self.blocks.iter().enumerate() {
            for &s in b {
                labels[s] = i as u64;
            }
        }
        labels.iter().fold(self.n_sites as u64, |acc, &l| {
            acc.wrapping_mul(31).wrapping_add(l + 1)
        })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n_sites >= 10 { "," } else { "" };
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            let labels: Vec<String> = b.iter().map(|s| (s + 1).to_string()).collect();
            write!(f, "{}", labels.join(sep))?;
        }
        Ok(())
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All partitions of `n` sites into exactly `k` blocks, in lexicographic
/// order of their restricted growth strings. There are S(n, k) of them.
pub fn enumerate_partitions(n: usize, k: usize) -> Result<Vec<Partition>> {
    if k == 0 || k > n {
        return invalid(format!("block count {k} out of range 1..={n}"));
    }
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    grow(&mut labels, 1, 1, k, &mut out);
    Ok(out)
}

// labels[0] is always 0; `used` counts distinct labels among labels[..pos].
fn grow(labels: &mut [usize], pos: usize, used: usize, k: usize, out: &mut Vec<Partition>) {
    let n = labels.len();
    if pos == n {
        if used == k {
            let mut blocks = vec![Vec::new(); k];
            for (s, &l) in labels.iter().enumerate() {
                blocks[l].push(s);
            }
            out.push(Partition { n_sites: n, blocks });
        }
        return;
    }
    // not enough sites left to open the remaining blocks
    if used + (n - pos) < k {
        return;
    }
    for l in 0..=used.min(k - 1) {
        labels[pos] = l;
        grow(labels, pos + 1, used.max(l + 1), k, out);
    }
}

/// Unordered bipartitions {A, B} of `n` sites.
pub fn bipartitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions(n, 2)
}
