mod common;

use proptest::prelude::*;
use rand::Rng;
use rcgs_core::baselines::{ac, huffman};
use rcgs_core::container::MAGIC;
use rcgs_core::{compress, decompress, encode, EncodedContainer, EncoderConfig};

fn config_strategy() -> impl Strategy<Value = EncoderConfig> {
    (0.001f64..0.5, 1usize..200, 1usize..40).prop_map(|(t_delta, raw_threshold, max_levels)| {
        EncoderConfig {
            t_delta,
            raw_threshold,
            max_levels,
            ..EncoderConfig::default()
        }
    })
}

fn skewed_bytes() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(any::<u8>(), 0..3000),
        prop::collection::vec(0u8..4, 0..3000),
        prop::collection::vec(prop_oneof![9 => Just(0u8), 1 => any::<u8>()], 0..3000),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rcgs_round_trip(data in skewed_bytes(), config in config_strategy()) {
        let packed = compress(&data, &config).unwrap();
        prop_assert_eq!(decompress(&packed).unwrap(), data.clone());
        // Deterministic output.
        prop_assert_eq!(compress(&data, &config).unwrap(), packed);
    }

    #[test]
    fn level_count_is_logarithmic(data in skewed_bytes()) {
        let config = EncoderConfig { raw_threshold: 1, ..EncoderConfig::default() };
        let c = encode(&data, &config).unwrap();
        let bound = if data.len() <= 1 { 1 } else { (usize::BITS - (data.len() - 1).leading_zeros()) as usize + 1 };
        prop_assert!(c.levels.len() <= bound, "{} levels for {} bytes", c.levels.len(), data.len());
    }

    #[test]
    fn baselines_round_trip(data in skewed_bytes()) {
        prop_assert_eq!(ac::ac_decompress(&ac::ac_compress(&data).unwrap()).unwrap(), data.clone());
        prop_assert_eq!(huffman::huffman_decompress(&huffman::huffman_compress(&data).unwrap()).unwrap(), data);
    }

    #[test]
    fn arbitrary_bytes_never_panic(data in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = decompress(&data);
        let mut framed = MAGIC.to_vec();
        framed.push(1);
        framed.extend_from_slice(&data);
        let _ = decompress(&framed);
        let _ = ac::ac_decompress(&data);
        let _ = huffman::huffman_decompress(&data);
    }
}

/// Corrupted containers must fail cleanly or decode to something; a panic
/// or a successful decode of the wrong length is a bug.
#[test]
fn mutated_containers_are_handled() {
    let mut rng = common::rng(7);
    let mut rejected = 0;
    for i in 0..3000 {
        let source = common::random_source(&mut rng);
        let len = rng.gen_range(0..4000);
        let data = source.generate(len, &mut rng);
        let mut packed = compress(&data, &EncoderConfig::default()).unwrap();
        match i % 4 {
            0 if !packed.is_empty() => {
                let at = rng.gen_range(0..packed.len());
                packed[at] ^= 1 << rng.gen_range(0..8);
            }
            1 => {
                let cut = rng.gen_range(0..packed.len());
                packed.truncate(cut);
            }
            2 => {
                let at = rng.gen_range(0..=packed.len());
                packed.insert(at, rng.gen());
            }
            _ => {
                for _ in 0..rng.gen_range(1..8) {
                    let at = rng.gen_range(0..packed.len());
                    packed[at] = rng.gen();
                }
            }
        }
        match decompress(&packed) {
            Ok(out) => {
                let c = EncodedContainer::from_bytes(&packed).unwrap();
                assert_eq!(out.len() as u64, c.original_length);
            }
            Err(_) => rejected += 1,
        }
    }
    assert!(rejected > 1000, "only {rejected} corruptions detected");
}

#[test]
fn truncation_is_always_detected() {
    let mut rng = common::rng(8);
    for _ in 0..30 {
        let data = common::Source::Gaussian(25.0).generate(rng.gen_range(1..1500), &mut rng);
        let packed = compress(&data, &EncoderConfig::default()).unwrap();
        for cut in 0..packed.len() {
            assert!(
                decompress(&packed[..cut]).is_err(),
                "prefix of {cut} bytes accepted"
            );
        }
    }
}
