#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use rcgs_core::datagen::{gen_gaussian_quantized, gen_markov_correlated};
use rcgs_core::model::ALPHABET_SIZE;
use rcgs_core::FrequencyTable;

pub fn rng(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

/// Frequency table over a random subset of the alphabet, drawn from one of
/// several shapes: flat, geometric, heavy-tailed, or one dominant symbol.
pub fn random_table(rng: &mut impl Rng) -> FrequencyTable {
    let n = match rng.gen_range(0..4) {
        0 => rng.gen_range(1..=8),
        1 => rng.gen_range(1..=64),
        _ => rng.gen_range(1..=256),
    };
    let mut symbols: Vec<u8> = (0..=255).collect();
    symbols.shuffle(rng);
    let mut counts = [0u64; ALPHABET_SIZE];
    let shape = rng.gen_range(0..4);
    let ratio: f64 = rng.gen_range(0.5..0.999);
    let alpha: f64 = rng.gen_range(0.3..2.5);
    for (i, &s) in symbols[..n].iter().enumerate() {
        counts[s as usize] = match shape {
            0 => rng.gen_range(1..1000),
            1 => ((1e6 * ratio.powi(i as i32)) as u64).max(1),
            2 => {
                let u: f64 = rng.gen_range(1e-6..1.0);
                (10.0 * u.powf(-alpha)) as u64 + 1
            }
            _ if i == 0 => 1_000_000,
            _ => rng.gen_range(1..20),
        };
    }
    FrequencyTable::from_counts(counts)
}

pub enum Source {
    Uniform,
    Constant,
    Gaussian(f64),
    Markov(f64),
}

impl Source {
    pub fn generate(&self, len: usize, rng: &mut impl Rng) -> Vec<u8> {
        let seed = rng.gen();
        match *self {
            Source::Uniform => (0..len).map(|_| rng.gen()).collect(),
            Source::Constant => vec![rng.gen(); len],
            Source::Gaussian(sigma_sq) => gen_gaussian_quantized(sigma_sq, 1.0, len, seed).unwrap(),
            Source::Markov(p) => gen_markov_correlated(p, len, seed).unwrap(),
        }
    }
}

/// One of the fuzzing distributions, picked at random.
pub fn random_source(rng: &mut impl Rng) -> Source {
    match rng.gen_range(0..6) {
        0 => Source::Uniform,
        1 => Source::Constant,
        2 => Source::Gaussian([0.5, 25.0, 400.0][rng.gen_range(0..3)]),
        3 => Source::Markov(0.5),
        4 => Source::Markov(0.9),
        _ => Source::Markov(0.99),
    }
}

/// Lengths in `0..=65536`, biased towards short and boundary cases.
pub fn random_len(rng: &mut impl Rng) -> usize {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(0..=300),
        1 => {
            let bits = rng.gen_range(0..=16);
            ((1usize << bits) + rng.gen_range(0..=2) - 1).min(65536)
        }
        _ => rng.gen_range(0..=65536),
    }
}
