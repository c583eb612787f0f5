//! Inputs shared by the criterion benchmarks.

use rcgs_core::datagen::{gen_gaussian_quantized, gen_markov_correlated};

/// Named synthetic inputs of `len` bytes, fixed seeds.
pub fn standard_inputs(len: usize) -> Vec<(&'static str, Vec<u8>)> {
    let gauss = |s, seed| gen_gaussian_quantized(s, 1.0, len, seed).expect("valid spec");
    vec![
        ("gauss_0.5", gauss(0.5, 1)),
        ("gauss_25", gauss(25.0, 2)),
        ("gauss_400", gauss(400.0, 3)),
        (
            "markov_0.99",
            gen_markov_correlated(0.99, len, 4).expect("valid spec"),
        ),
    ]
}
