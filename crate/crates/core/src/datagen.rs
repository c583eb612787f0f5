//! Deterministic synthetic corpora.
//!
//! Randomness comes from xoshiro256** seeded through SplitMix64
//! (`Xoshiro256StarStar::seed_from_u64`). Uniform reals are
//! `(next_u64 >> 11) · 2^-53`. Gaussian samples use the Box–Muller
//! transform on consecutive uniform pairs `(u1, u2)`:
//!
//! ```text
//! r = sqrt(-2 ln(1 - u1)),  θ = 2π u2,  z0 = r cos θ,  z1 = r sin θ
//! ```
//!
//! emitting `z0` then `z1`. Quantization is `round(x / qs)` with halves
//! away from zero, clamped to `[-128, 127]` and stored as `q + 128`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GenKind {
    Gaussian { sigma_sq: f64, qs: f64 },
    Markov { p_stay: f64 },
    Dct { image: PathBuf, qs: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub length: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn gaussian(sigma_sq: f64, qs: f64, length: usize, seed: u64) -> Self {
        Self {
            kind: GenKind::Gaussian { sigma_sq, qs },
            length,
            seed,
        }
    }

    pub fn markov(p_stay: f64, length: usize, seed: u64) -> Self {
        Self {
            kind: GenKind::Markov { p_stay },
            length,
            seed,
        }
    }

    pub fn dct(image: impl Into<PathBuf>, qs: f64, length: usize) -> Self {
        Self {
            kind: GenKind::Dct {
                image: image.into(),
                qs,
            },
            length,
            seed: 0,
        }
    }

    pub fn generate(&self) -> Result<Vec<u8>> {
        if self.length == 0 {
            return Err(Error::InvalidSpec("length must be positive".into()));
        }
        match &self.kind {
            GenKind::Gaussian { sigma_sq, qs } => {
                gen_gaussian_quantized(*sigma_sq, *qs, self.length, self.seed)
            }
            GenKind::Markov { p_stay } => gen_markov_correlated(*p_stay, self.length, self.seed),
            GenKind::Dct { image, qs } => {
                let img = read_pgm(image)?;
                gen_dct_blocks(&img, *qs, self.length)
            }
        }
    }
}

struct Source(Xoshiro256StarStar);

impl Source {
    fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn byte(&mut self) -> u8 {
        (self.0.next_u64() >> 56) as u8
    }
}

fn quantize(x: f64, qs: f64) -> u8 {
    ((x / qs).round().clamp(-128.0, 127.0) as i32 + 128) as u8
}

/// i.i.d. `Normal(0, sigma_sq)` samples, quantized with step `qs`.
pub fn gen_gaussian_quantized(sigma_sq: f64, qs: f64, length: usize, seed: u64) -> Result<Vec<u8>> {
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(Error::InvalidSpec("sigma_sq must be positive".into()));
    }
    if !(qs > 0.0 && qs.is_finite()) {
        return Err(Error::InvalidSpec("qs must be positive".into()));
    }
    let sigma = sigma_sq.sqrt();
    let mut src = Source::new(seed);
    let mut out = Vec::with_capacity(length);
    while out.len() < length {
        let u1 = src.uniform();
        let u2 = src.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt() * sigma;
        let theta = 2.0 * PI * u2;
        out.push(quantize(r * theta.cos(), qs));
        if out.len() < length {
            out.push(quantize(r * theta.sin(), qs));
        }
    }
    Ok(out)
}

/// Bytes that repeat the previous byte with probability `p_stay` and are
/// otherwise drawn uniformly (possibly repeating anyway). The first byte
/// is uniform.
pub fn gen_markov_correlated(p_stay: f64, length: usize, seed: u64) -> Result<Vec<u8>> {
    if !(p_stay > 0.0 && p_stay < 1.0) {
        return Err(Error::InvalidSpec("p_stay must lie in (0, 1)".into()));
    }
    let mut src = Source::new(seed);
    let mut out = Vec::with_capacity(length);
    if length == 0 {
        return Ok(out);
    }
    let mut prev = src.byte();
    out.push(prev);
    while out.len() < length {
        if src.uniform() >= p_stay {
            prev = src.byte();
        }
        out.push(prev);
    }
    Ok(out)
}

/// 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::Image(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Number of complete 8×8 blocks after cropping to multiples of 8.
    pub fn block_count(&self) -> usize {
        (self.width / 8) * (self.height / 8)
    }
}

/// Decodes a binary portable graymap (`P5`, maxval ≤ 255).
pub fn parse_pgm(data: &[u8]) -> Result<GrayImage> {
    if !data.starts_with(b"P5") {
        return Err(Error::Image("not a binary PGM (P5) file".into()));
    }
    let img = image::load_from_memory_with_format(data, image::ImageFormat::Pnm)
        .map_err(|e| Error::Image(e.to_string()))?;
    let luma = match img {
        image::DynamicImage::ImageLuma8(l) => l,
        other => {
            return Err(Error::Image(format!(
                "expected 8-bit grayscale, got {:?}",
                other.color()
            )))
        }
    };
    let (w, h) = luma.dimensions();
    GrayImage::new(w as usize, h as usize, luma.into_raw())
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let data = std::fs::read(path).map_err(|e| Error::Image(format!("{}: {e}", path.display())))?;
    parse_pgm(&data)
}

/// Orthonormal 8-point DCT-II basis, `BASIS[u][x]`.
fn dct_basis() -> [[f64; 8]; 8] {
    let mut basis = [[0.0; 8]; 8];
    for (u, row) in basis.iter_mut().enumerate() {
        let alpha = if u == 0 {
            (1.0f64 / 8.0).sqrt()
        } else {
            (2.0f64 / 8.0).sqrt()
        };
        for (x, v) in row.iter_mut().enumerate() {
            *v = alpha * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
        }
    }
    basis
}

/// Separable orthonormal 2-D DCT-II of a row-major 8×8 block.
pub fn dct8x8_forward(block: &[f64; 64]) -> [f64; 64] {
    let b = dct_basis();
    let mut tmp = [0.0; 64];
    // Rows: tmp[y][v] = Σ_x B[v][x]·f[y][x]
    for y in 0..8 {
        for v in 0..8 {
            tmp[y * 8 + v] = (0..8).map(|x| b[v][x] * block[y * 8 + x]).sum();
        }
    }
    let mut out = [0.0; 64];
    // Columns: out[u][v] = Σ_y B[u][y]·tmp[y][v]
    for u in 0..8 {
        for v in 0..8 {
            out[u * 8 + v] = (0..8).map(|y| b[u][y] * tmp[y * 8 + v]).sum();
        }
    }
    out
}

/// Inverse of [`dct8x8_forward`] (DCT-III with the same normalization).
pub fn dct8x8_inverse(coeffs: &[f64; 64]) -> [f64; 64] {
    let b = dct_basis();
    let mut tmp = [0.0; 64];
    for u in 0..8 {
        for x in 0..8 {
            tmp[u * 8 + x] = (0..8).map(|v| b[v][x] * coeffs[u * 8 + v]).sum();
        }
    }
    let mut out = [0.0; 64];
    for y in 0..8 {
        for x in 0..8 {
            out[y * 8 + x] = (0..8).map(|u| b[u][y] * tmp[u * 8 + x]).sum();
        }
    }
    out
}

/// Quantized DCT coefficients of the image's 8×8 blocks in raster order,
/// 64 row-major coefficients per block. Yields the largest multiple of 64
/// not above `length`; fails if the image has fewer coefficients than that.
pub fn gen_dct_blocks(image: &GrayImage, qs: f64, length: usize) -> Result<Vec<u8>> {
    if !(qs > 0.0 && qs.is_finite()) {
        return Err(Error::InvalidSpec("qs must be positive".into()));
    }
    let blocks_wanted = length / 64;
    if blocks_wanted == 0 {
        return Err(Error::InvalidSpec(
            "length must cover at least one 8x8 block".into(),
        ));
    }
    if blocks_wanted > image.block_count() {
        return Err(Error::InvalidSpec(format!(
            "image provides only {} coefficient bytes",
            image.block_count() * 64
        )));
    }
    let bw = image.width / 8;
    let mut out = Vec::with_capacity(blocks_wanted * 64);
    for k in 0..blocks_wanted {
        let (by, bx) = (k / bw, k % bw);
        let mut block = [0.0; 64];
        for y in 0..8 {
            let row = (by * 8 + y) * image.width + bx * 8;
            for x in 0..8 {
                block[y * 8 + x] = image.pixels[row + x] as f64 - 128.0;
            }
        }
        out.extend(dct8x8_forward(&block).iter().map(|&c| quantize(c, qs)));
    }
    Ok(out)
}
