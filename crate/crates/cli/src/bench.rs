//! `bench`: size and speed of each coder on each input.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::ValueEnum;
use rcgs_core::baselines::{ac, huffman};
use rcgs_core::{compress, count_frequencies, decompress, EncoderConfig};

use crate::genspec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coder {
    Rcgs,
    Ac,
    Hc,
}

impl Coder {
    pub const ALL: [Coder; 3] = [Coder::Rcgs, Coder::Ac, Coder::Hc];

    pub fn name(self) -> &'static str {
        match self {
            Coder::Rcgs => "rcgs",
            Coder::Ac => "ac",
            Coder::Hc => "hc",
        }
    }

    fn compress(self, data: &[u8]) -> rcgs_core::Result<Vec<u8>> {
        match self {
            Coder::Rcgs => compress(data, &EncoderConfig::default()),
            Coder::Ac => ac::ac_compress(data),
            Coder::Hc => huffman::huffman_compress(data),
        }
    }

    fn decompress(self, data: &[u8]) -> rcgs_core::Result<Vec<u8>> {
        match self {
            Coder::Rcgs => decompress(data),
            Coder::Ac => ac::ac_decompress(data),
            Coder::Hc => huffman::huffman_decompress(data),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Tsv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub bits_per_symbol: f64,
    pub encode_ms: f64,
    pub decode_ms: f64,
    pub encode_mib_s: f64,
    pub decode_mib_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok(Cell),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub bytes: usize,
    pub entropy: f64,
    pub cells: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub coders: Vec<Coder>,
    pub rows: Vec<Row>,
    pub average: Option<Row>,
}

impl BenchReport {
    pub fn any_failed(&self) -> bool {
        self.rows
            .iter()
            .flat_map(|r| &r.cells)
            .any(|c| matches!(c, Outcome::Failed(_)))
    }

    pub fn render(&self, format: Format) -> String {
        let mut header = vec!["input".to_string(), "bytes".into(), "entropy".into()];
        for c in &self.coders {
            for col in ["bps", "enc_ms", "dec_ms", "enc_MiB/s", "dec_MiB/s"] {
                header.push(format!("{}_{col}", c.name()));
            }
        }
        let mut lines = vec![header];
        lines.extend(self.rows.iter().chain(&self.average).map(row_fields));
        match format {
            Format::Tsv => lines.iter().map(|l| l.join("\t") + "\n").collect(),
            Format::Table => {
                let widths: Vec<usize> = (0..lines[0].len())
                    .map(|i| {
                        lines
                            .iter()
                            .map(|l| l[i].chars().count())
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let mut out = String::new();
                for line in &lines {
                    for (i, (field, w)) in line.iter().zip(&widths).enumerate() {
                        let pad = w - field.chars().count();
                        if i == 0 {
                            let _ = write!(out, "{field}{}", " ".repeat(pad));
                        } else {
                            let _ = write!(out, "  {}{field}", " ".repeat(pad));
                        }
                    }
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn row_fields(row: &Row) -> Vec<String> {
    let mut f = vec![
        row.name.clone(),
        row.bytes.to_string(),
        format!("{:.3}", row.entropy),
    ];
    for cell in &row.cells {
        match cell {
            Outcome::Ok(c) => f.extend([
                format!("{:.3}", c.bits_per_symbol),
                format!("{:.3}", c.encode_ms),
                format!("{:.3}", c.decode_ms),
                format!("{:.1}", c.encode_mib_s),
                format!("{:.1}", c.decode_mib_s),
            ]),
            Outcome::Failed(_) => f.extend(std::iter::repeat("FAILED".to_string()).take(5)),
        }
    }
    f
}

fn median(mut times: Vec<Duration>) -> Duration {
    times.sort_unstable();
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2
    }
}

fn mib_per_s(bytes: usize, t: Duration) -> f64 {
    let secs = t.as_secs_f64();
    if secs > 0.0 {
        bytes as f64 / (1 << 20) as f64 / secs
    } else {
        f64::INFINITY
    }
}

/// Verifies the round trip once, then times `repeats` in-memory runs of
/// each direction and keeps the medians.
pub fn measure_cell(coder: Coder, data: &[u8], repeats: usize) -> Outcome {
    let packed = match coder.compress(data) {
        Ok(p) => p,
        Err(e) => return Outcome::Failed(format!("encode: {e}")),
    };
    match coder.decompress(&packed) {
        Ok(out) if out == data => {}
        Ok(_) => return Outcome::Failed("round trip mismatch".into()),
        Err(e) => return Outcome::Failed(format!("decode: {e}")),
    }
    let mut enc = Vec::with_capacity(repeats);
    let mut dec = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        let p = coder.compress(std::hint::black_box(data));
        enc.push(t.elapsed());
        drop(p);
        let t = Instant::now();
        let d = coder.decompress(std::hint::black_box(&packed));
        dec.push(t.elapsed());
        drop(d);
    }
    let (enc, dec) = (median(enc), median(dec));
    let bits_per_symbol = if data.is_empty() {
        0.0
    } else {
        packed.len() as f64 * 8.0 / data.len() as f64
    };
    Outcome::Ok(Cell {
        bits_per_symbol,
        encode_ms: enc.as_secs_f64() * 1e3,
        decode_ms: dec.as_secs_f64() * 1e3,
        encode_mib_s: mib_per_s(data.len(), enc),
        decode_mib_s: mib_per_s(data.len(), dec),
    })
}

pub fn measure_row(name: String, data: &[u8], coders: &[Coder], repeats: usize) -> Row {
    let entropy = count_frequencies(data)
        .entropy_bits_per_symbol()
        .unwrap_or(0.0);
    Row {
        name,
        bytes: data.len(),
        entropy,
        cells: coders
            .iter()
            .map(|&c| measure_cell(c, data, repeats))
            .collect(),
    }
}

/// Column means over the rows; a coder with any failed row averages to FAILED.
/// Throughput is total bytes over total time.
pub fn average(rows: &[Row], n_coders: usize) -> Option<Row> {
    if rows.len() < 2 {
        return None;
    }
    let n = rows.len() as f64;
    let total_bytes: usize = rows.iter().map(|r| r.bytes).sum();
    let mib = total_bytes as f64 / (1 << 20) as f64;
    let cells = (0..n_coders)
        .map(|i| {
            let cells: Option<Vec<&Cell>> = rows
                .iter()
                .map(|r| match &r.cells[i] {
                    Outcome::Ok(c) => Some(c),
                    Outcome::Failed(_) => None,
                })
                .collect();
            let Some(cells) = cells else {
                return Outcome::Failed("failed on some input".into());
            };
            let sum = |f: fn(&Cell) -> f64| cells.iter().map(|c| f(c)).sum::<f64>();
            let (enc_ms, dec_ms) = (sum(|c| c.encode_ms), sum(|c| c.decode_ms));
            Outcome::Ok(Cell {
                bits_per_symbol: sum(|c| c.bits_per_symbol) / n,
                encode_ms: enc_ms / n,
                decode_ms: dec_ms / n,
                encode_mib_s: mib / (enc_ms / 1e3),
                decode_mib_s: mib / (dec_ms / 1e3),
            })
        })
        .collect();
    Some(Row {
        name: "Average".into(),
        bytes: total_bytes,
        entropy: rows.iter().map(|r| r.entropy).sum::<f64>() / n,
        cells,
    })
}

/// Expands bench arguments: files, directories (their regular files, sorted)
/// and `gen:` specs.
pub fn collect_inputs(args: &[String]) -> Result<Vec<(String, Vec<u8>)>> {
    let mut inputs = Vec::new();
    for arg in args {
        if genspec::is_gen_spec(arg) {
            let spec = genspec::parse(arg)?;
            let data = spec
                .generate()
                .with_context(|| format!("generating `{arg}`"))?;
            inputs.push((genspec::label(&spec), data));
            continue;
        }
        let path = Path::new(arg);
        if path.is_dir() {
            let mut files: Vec<_> = std::fs::read_dir(path)
                .with_context(|| format!("reading directory {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            for f in files {
                let data = std::fs::read(&f).with_context(|| format!("reading {}", f.display()))?;
                let name = f.file_name().map_or_else(
                    || f.display().to_string(),
                    |n| n.to_string_lossy().into_owned(),
                );
                inputs.push((name, data));
            }
        } else {
            let data = std::fs::read(path).with_context(|| format!("reading {arg}"))?;
            inputs.push((arg.clone(), data));
        }
    }
    Ok(inputs)
}

pub fn run(inputs: &[String], coders: &[Coder], repeats: usize) -> Result<BenchReport> {
    let rows: Vec<Row> = collect_inputs(inputs)?
        .into_iter()
        .map(|(name, data)| measure_row(name, &data, coders, repeats))
        .collect();
    let average = average(&rows, coders.len());
    Ok(BenchReport {
        coders: coders.to_vec(),
        rows,
        average,
    })
}
