//! Exhaustive or seeded-sampled selection of unordered index pairs.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSelection {
    All,
    Sample { k: usize, seed: u64 },
}

impl PairSelection {
    /// Unordered pairs `(i, j)` with `i < j < n`, in ascending order.
    /// Sampling draws `k` distinct pairs; when `k` covers everything it
    /// degrades to the exhaustive list.
    pub fn select(&self, n: usize) -> Vec<(usize, usize)> {
        let total = n * n.saturating_sub(1) / 2;
        match *self {
            PairSelection::Sample { k, seed } if k < total => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked: Vec<usize> = index::sample(&mut rng, total, k).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|r| unrank(r, n)).collect()
            }
            _ => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
        }
    }

    pub fn is_exhaustive_for(&self, n: usize) -> bool {
        match *self {
            PairSelection::All => true,
            PairSelection::Sample { k, .. } => k >= n * n.saturating_sub(1) / 2,
        }
    }
}

impl std::str::FromStr for PairSelection {
    type Err = String;

    /// `all` or `sample:K`; the seed is filled in separately.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(PairSelection::All);
        }
        match s.strip_prefix("sample:") {
            Some(k) => k
                .parse()
                .map(|k| PairSelection::Sample { k, seed: 0 })
                .map_err(|e| format!("bad sample size {k:?}: {e}")),
            None => Err(format!("expected `all` or `sample:K`, got {s:?}")),
        }
    }
}

/// Lexicographic rank -> pair among `i < j < n`.
fn unrank(mut r: usize, n: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if r < row {
            return (i, i + 1 + r);
        }
        r -= row;
        i += 1;
    }
}
