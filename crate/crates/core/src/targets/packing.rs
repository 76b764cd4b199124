use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_PACKING_BUDGET: usize = 1_000_000;
pub const DEFAULT_PACKING_SEED: u64 = 0x6776_7061_636b;

/// Binary codewords of length `m ≤ 64`, stored as bitmasks (bit `k-1` is `ω_k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    pub m: usize,
    pub words: Vec<u64>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `ω_k` for `k ∈ 1..=m`.
    pub fn bit(&self, word: usize, k: usize) -> bool {
        self.words[word] >> (k - 1) & 1 == 1
    }

    pub fn hamming(&self, a: usize, b: usize) -> u32 {
        (self.words[a] ^ self.words[b]).count_ones()
    }

    /// Smallest pairwise Hamming distance, `None` for fewer than two words.
    pub fn min_distance(&self) -> Option<u32> {
        let mut best = None;
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                let d = self.hamming(i, j);
                best = Some(best.map_or(d, |b: u32| b.min(d)));
            }
        }
        best
    }

    /// `ω_1 ω_2 … ω_m` as a string of `0`/`1`.
    pub fn to_bit_string(&self, word: usize) -> String {
        (1..=self.m).map(|k| if self.bit(word, k) { '1' } else { '0' }).collect()
    }
}

/// Hamming threshold `⌈m/8⌉`.
pub fn packing_distance(m: usize) -> u32 {
    m.div_ceil(8) as u32
}

/// Target family size `⌈2^{m/8}⌉`.
pub fn packing_size(m: usize) -> usize {
    (2f64).powf(m as f64 / 8.0).ceil() as usize
}

/// Greedy Gilbert–Varshamov packing of `{0,1}^m`.
///
/// Starts from the all-zeros word and scans candidates, first `budget`
/// seeded pseudo-random draws and then the words in lexicographic order,
/// keeping every candidate at distance `≥ ⌈m/8⌉` from all kept words. Stops
/// once `⌈2^{m/8}⌉` words are kept.
pub fn pack_hypercube(m: usize, seed: u64, budget: usize) -> Result<Codebook> {
    pack_hypercube_with(m, seed, budget, budget)
}

/// [`pack_hypercube`] with separate limits for the random and the lexicographic phase.
pub fn pack_hypercube_with(m: usize, seed: u64, random_draws: usize, scan_limit: usize) -> Result<Codebook> {
    if !(8..=64).contains(&m) {
        return Err(Error::InvalidArgument(format!("packing needs 8 ≤ m ≤ 64, got {m}")));
    }
    let threshold = packing_distance(m);
    let required = packing_size(m);
    let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut words = vec![0u64];
    let consider = |candidate: u64, words: &mut Vec<u64>| {
        if words.iter().all(|w| (w ^ candidate).count_ones() >= threshold) {
            words.push(candidate);
        }
        words.len() >= required
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_draws {
        if words.len() >= required || consider(rng.random::<u64>() & mask, &mut words) {
            return Ok(Codebook { m, words });
        }
    }
    let mut candidate = 0u64;
    let mut scanned = 0usize;
    while words.len() < required && scanned < scan_limit {
        if consider(candidate, &mut words) {
            break;
        }
        if candidate == mask {
            break;
        }
        candidate += 1;
        scanned += 1;
    }
    if words.len() >= required {
        Ok(Codebook { m, words })
    } else {
        Err(Error::PackingExhausted { achieved: words.len(), required })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exhaustive_check(book: &Codebook) {
        let threshold = packing_distance(book.m);
        for i in 0..book.len() {
            for j in i + 1..book.len() {
                assert!(book.hamming(i, j) >= threshold, "m={} pair ({i},{j})", book.m);
            }
        }
    }

    #[test]
    fn sizes_and_distances() {
        for m in [8, 16, 24, 32] {
            let book = pack_hypercube(m, DEFAULT_PACKING_SEED, DEFAULT_PACKING_BUDGET).unwrap();
            assert_eq!(book.words[0], 0);
            assert!(book.len() as f64 >= 2f64.powf(m as f64 / 8.0));
            exhaustive_check(&book);
        }
    }

    #[test]
    fn small_cases() {
        let book = pack_hypercube(8, 1, 10).unwrap();
        assert_eq!(book.len(), 2);
        assert_eq!(book.to_bit_string(0), "00000000");
        assert_ne!(book.words[1], 0);
        let book = pack_hypercube(16, 1, 1000).unwrap();
        assert!(book.len() >= 4 && book.min_distance().unwrap() >= 2);
        let book = pack_hypercube(24, 1, 1000).unwrap();
        assert!(book.len() >= 8 && book.min_distance().unwrap() >= 3);
    }

    #[test]
    fn lexicographic_fallback() {
        let book = pack_hypercube_with(16, 0, 0, 1 << 16).unwrap();
        exhaustive_check(&book);
        assert!(book.len() >= 4);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        assert!(matches!(
            pack_hypercube(24, 3, 0),
            Err(Error::PackingExhausted { achieved: 1, required: 8 })
        ));
        assert!(pack_hypercube(4, 3, 10).is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(pack_hypercube(32, 5, 1000).unwrap(), pack_hypercube(32, 5, 1000).unwrap());
    }
}
