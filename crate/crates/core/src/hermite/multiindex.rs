use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

/// Multi-index `α = (α_1, …, α_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// `α ± e_j`, or `None` when an entry would go negative.
    pub fn shifted(&self, j: usize, up: bool) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        if up {
            v[j] += 1;
        } else {
            v[j] = v[j].checked_sub(1)?;
        }
        Some(MultiIndex(v))
    }

    /// `α!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| (1..=a).map(f64::from).product::<f64>()).product()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n.saturating_sub(k));
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// `dim E_N = binomial(N + n, n)`.
pub fn space_dim(n: usize, cutoff: usize) -> usize {
    binomial(cutoff + n, n)
}

fn push_degree(prefix: &mut Vec<u32>, remaining: usize, slots: usize, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        prefix.push(remaining as u32);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for v in 0..=remaining {
        prefix.push(v as u32);
        push_degree(prefix, remaining - v, slots - 1, out);
        prefix.pop();
    }
}

/// All `α ∈ ℕⁿ` with `|α| ≤ N`, graded by `|α|`, lexicographic within a degree.
pub fn enumerate_multiindices(n: usize, cutoff: usize) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be positive");
    let mut out = Vec::with_capacity(space_dim(n, cutoff));
    let mut prefix = Vec::with_capacity(n);
    for d in 0..=cutoff {
        push_degree(&mut prefix, d, n, &mut out);
    }
    out
}

/// Ordered index set of `E_N` with reverse lookup.
#[derive(Debug)]
pub struct Basis {
    pub n: usize,
    pub cutoff: usize,
    pub indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
}

impl Basis {
    fn build(n: usize, cutoff: usize) -> Self {
        let indices = enumerate_multiindices(n, cutoff);
        let lookup = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        Basis { n, cutoff, indices, lookup }
    }

    /// Shared, cached basis for `(n, N)`.
    pub fn get(n: usize, cutoff: usize) -> Arc<Basis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Basis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry((n, cutoff)).or_insert_with(|| Arc::new(Basis::build(n, cutoff))).clone()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Number of indices with `|α| ≤ k`; they form a prefix of the ordering.
    pub fn prefix_len(&self, k: usize) -> usize {
        space_dim(self.n, k.min(self.cutoff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let one = enumerate_multiindices(1, 3);
        assert_eq!(one.iter().map(|a| a.0[0]).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(enumerate_multiindices(2, 3).len(), 10);
        assert_eq!(enumerate_multiindices(3, 0), vec![MultiIndex(vec![0, 0, 0])]);
        let two = enumerate_multiindices(2, 2);
        let got: Vec<Vec<u32>> = two.into_iter().map(|a| a.0).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn prefix_is_lower_space() {
        let b = Basis::get(3, 5);
        for k in 0..=5 {
            let p = b.prefix_len(k);
            assert!(b.indices[..p].iter().all(|a| a.order() <= k));
            assert!(b.indices[p..].iter().all(|a| a.order() > k));
        }
    }
}
