//! Inline generator specs for `bench`: `gen:KIND,key=value,...`.
//!
//! Keys: `sigma_sq` (alias `σ²`), `qs`, `p_stay`, `image`, `len`
//! (alias `length`) and `seed`. Length defaults to 256 KiB, seed to 1 and
//! `qs` to 1; a `dct` spec without `len` uses the whole image.

use anyhow::{anyhow, bail, Context, Result};
use rcgs_core::datagen::read_pgm;
use rcgs_core::{GenKind, GenSpec};

pub const PREFIX: &str = "gen:";
pub const DEFAULT_LEN: usize = 256 * 1024;

pub fn is_gen_spec(arg: &str) -> bool {
    arg.starts_with(PREFIX)
}

pub fn parse(arg: &str) -> Result<GenSpec> {
    let body = arg
        .strip_prefix(PREFIX)
        .ok_or_else(|| anyhow!("generator spec must start with `{PREFIX}`"))?;
    let mut parts = body.split(',');
    let kind = parts.next().unwrap_or_default().trim();

    let (mut sigma_sq, mut qs, mut p_stay, mut image) = (None, None, None, None);
    let (mut len, mut seed) = (None, None);
    for part in parts.filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got `{part}` in `{arg}`"))?;
        let value = value.trim();
        let real = || -> Result<f64> {
            value
                .parse()
                .with_context(|| format!("bad number `{value}` for `{key}`"))
        };
        match key.trim() {
            "sigma_sq" | "σ²" | "sigma2" => sigma_sq = Some(real()?),
            "qs" => qs = Some(real()?),
            "p_stay" => p_stay = Some(real()?),
            "image" => image = Some(value.to_string()),
            "len" | "length" => {
                len = Some(
                    value
                        .parse::<usize>()
                        .with_context(|| format!("bad length `{value}`"))?,
                )
            }
            "seed" => {
                seed = Some(
                    value
                        .parse::<u64>()
                        .with_context(|| format!("bad seed `{value}`"))?,
                )
            }
            other => bail!("unknown key `{other}` in `{arg}`"),
        }
    }

    let seed = seed.unwrap_or(1);
    let qs = qs.unwrap_or(1.0);
    let spec = match kind {
        "gaussian" => GenSpec::gaussian(
            sigma_sq.ok_or_else(|| anyhow!("gaussian spec needs sigma_sq"))?,
            qs,
            len.unwrap_or(DEFAULT_LEN),
            seed,
        ),
        "markov" => GenSpec::markov(
            p_stay.ok_or_else(|| anyhow!("markov spec needs p_stay"))?,
            len.unwrap_or(DEFAULT_LEN),
            seed,
        ),
        "dct" => {
            let image = image.ok_or_else(|| anyhow!("dct spec needs image"))?;
            let len = match len {
                Some(l) => l,
                None => read_pgm(image.as_ref())?.block_count() * 64,
            };
            GenSpec::dct(image, qs, len)
        }
        other => bail!("unknown generator `{other}` (expected gaussian, markov or dct)"),
    };
    Ok(spec)
}

/// Short label used as the report row name.
pub fn label(spec: &GenSpec) -> String {
    match &spec.kind {
        GenKind::Gaussian { sigma_sq, qs } => {
            format!("gaussian σ²={sigma_sq} qs={qs} seed={}", spec.seed)
        }
        GenKind::Markov { p_stay } => format!("markov p_stay={p_stay} seed={}", spec.seed),
        GenKind::Dct { image, qs } => {
            let name = image.file_name().map_or_else(
                || image.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            format!("dct {name} qs={qs}")
        }
    }
}
