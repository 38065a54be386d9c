//! Naive enumeration over every symmetric 0-1 matrix of a given order.

#![allow(dead_code)]

use std::collections::HashMap;

/// Counts indexed by the exact row-sum vector, then by trace.
pub struct BruteTables {
    pub n: usize,
    /// Zero diagonal: row sums to count.
    pub simple: HashMap<Vec<u32>, u64>,
    /// Diagonal entries add 1: row sums to counts per trace.
    pub once: HashMap<Vec<u32>, Vec<u64>>,
    /// Diagonal entries add 2: row sums to counts per trace.
    pub twice: HashMap<Vec<u32>, Vec<u64>>,
}

impl BruteTables {
    pub fn build(n: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let mut simple = HashMap::new();
        let mut once: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        let mut twice: HashMap<Vec<u32>, Vec<u64>> = HashMap::new();
        for edges in 0u64..(1u64 << pairs.len()) {
            let mut rows = vec![0u32; n];
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if edges >> b & 1 == 1 {
                    rows[i] += 1;
                    rows[j] += 1;
                }
            }
            *simple.entry(rows.clone()).or_insert(0) += 1;
            for diag in 0u64..(1u64 << n) {
                let trace = diag.count_ones() as usize;
                let mut r1 = rows.clone();
                let mut r2 = rows.clone();
                for v in 0..n {
                    if diag >> v & 1 == 1 {
                        r1[v] += 1;
                        r2[v] += 2;
                    }
                }
                once.entry(r1).or_insert_with(|| vec![0; n + 1])[trace] += 1;
                twice.entry(r2).or_insert_with(|| vec![0; n + 1])[trace] += 1;
            }
        }
        BruteTables {
            n,
            simple,
            once,
            twice,
        }
    }

    pub fn simple(&self, seq: &[u32]) -> u64 {
        self.simple.get(seq).copied().unwrap_or(0)
    }

    /// Counts per trace under loop weight `w`.
    pub fn by_trace(&self, seq: &[u32], w: u32) -> Vec<u64> {
        let table = if w == 1 { &self.once } else { &self.twice };
        table
            .get(seq)
            .cloned()
            .unwrap_or_else(|| vec![0; self.n + 1])
    }
}

/// Every vector in `{0..=max}^n`, in lexicographic order.
pub fn all_sequences(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        out.push(cur.clone());
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if cur[i] < max {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}
