//! The `rcgs` command-line tool.

pub mod bench;
pub mod genspec;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rcgs_core::container::FILE_EXTENSION;
use rcgs_core::grouping::DEFAULT_T_DELTA;
use rcgs_core::{
    count_frequencies, decompress, encode_with_stats, EncodedContainer, EncoderConfig, GenSpec,
};

use bench::{Coder, Format};

#[derive(Debug, Parser)]
#[command(
    name = "rcgs",
    version,
    about = "Recursive group coding of byte streams"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a file into an .rcgs container.
    Encode(EncodeArgs),
    /// Restore the original bytes from an .rcgs container.
    Decode(DecodeArgs),
    /// Order-0 entropy of files, in bits per symbol.
    Entropy {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Write a synthetic byte stream.
    Gen(GenArgs),
    /// Compare coders on files, directories or `gen:` specs.
    Bench(BenchArgs),
    /// Per-level grouping diagnostics for a file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    /// Redundancy threshold for grouping.
    #[arg(long, default_value_t = DEFAULT_T_DELTA)]
    pub t_delta: f64,
    /// Streams of at most this many bytes are stored verbatim.
    #[arg(long, default_value_t = EncoderConfig::default().raw_threshold)]
    pub raw_threshold: usize,
}

impl CodecArgs {
    fn config(&self) -> Result<EncoderConfig> {
        let config = EncoderConfig {
            t_delta: self.t_delta,
            raw_threshold: self.raw_threshold,
            ..EncoderConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    pub input: PathBuf,
    /// Defaults to the input path with `.rcgs` appended.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub codec: CodecArgs,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    pub input: PathBuf,
    /// Defaults to the input path without `.rcgs`, or with `.out` appended.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub kind: GenCommand,
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Quantized i.i.d. Gaussian noise.
    Gaussian {
        #[arg(long, alias = "sigma2")]
        sigma_sq: f64,
        #[arg(long, default_value_t = 1.0)]
        qs: f64,
        #[arg(long, default_value_t = genspec::DEFAULT_LEN)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Bytes that repeat the previous one with probability `p_stay`.
    Markov {
        #[arg(long)]
        p_stay: f64,
        #[arg(long, default_value_t = genspec::DEFAULT_LEN)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Quantized 8x8 DCT coefficients of a binary PGM image.
    Dct {
        #[arg(long)]
        image: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        qs: f64,
        /// Defaults to every block of the image.
        #[arg(long)]
        length: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Files, directories, or specs such as `gen:gaussian,sigma_sq=25,len=262144,seed=1`.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = Coder::ALL)]
    pub coders: Vec<Coder>,
    /// Timed runs per coder and input; the median is reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub codec: CodecArgs,
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Encode(args) => cmd_encode(&args),
        Command::Decode(args) => cmd_decode(&args),
        Command::Entropy { files } => cmd_entropy(&files),
        Command::Gen(args) => cmd_gen(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Analyze(args) => cmd_analyze(&args),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

fn entropy_of(data: &[u8]) -> f64 {
    count_frequencies(data)
        .entropy_bits_per_symbol()
        .unwrap_or(0.0)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_encode(args: &EncodeArgs) -> Result<ExitCode> {
    let config = args.codec.config()?;
    let data = read(&args.input)?;
    let (container, _) = encode_with_stats(&data, &config)
        .with_context(|| format!("encoding {}", args.input.display()))?;
    let packed = container.to_bytes();
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| with_suffix(&args.input, &format!(".{FILE_EXTENSION}")));
    write(&output, &packed)?;
    let bps = if data.is_empty() {
        "n/a".to_string()
    } else {
        format!("{:.3}", packed.len() as f64 * 8.0 / data.len() as f64)
    };
    println!(
        "{} -> {}: {} -> {} bytes, {bps} bits/symbol (entropy {:.3}), {} levels",
        args.input.display(),
        output.display(),
        data.len(),
        packed.len(),
        entropy_of(&data),
        container.levels.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode(args: &DecodeArgs) -> Result<ExitCode> {
    let packed = read(&args.input)?;
    // Decode fully before touching the output so a bad container writes nothing.
    let data = decompress(&packed).with_context(|| format!("decoding {}", args.input.display()))?;
    let output = match &args.output {
        Some(o) => o.clone(),
        None if args.input.extension().is_some_and(|e| e == FILE_EXTENSION) => {
            args.input.with_extension("")
        }
        None => with_suffix(&args.input, ".out"),
    };
    write(&output, &data)?;
    println!(
        "{} -> {}: {} bytes",
        args.input.display(),
        output.display(),
        data.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_entropy(files: &[PathBuf]) -> Result<ExitCode> {
    for f in files {
        let data = read(f)?;
        println!("{:.3}\t{}\t{}", entropy_of(&data), data.len(), f.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    let Some(output) = &args.output else {
        bail!("gen needs an output file (-o PATH)");
    };
    let spec = match &args.kind {
        GenCommand::Gaussian {
            sigma_sq,
            qs,
            length,
            seed,
        } => GenSpec::gaussian(*sigma_sq, *qs, *length, *seed),
        GenCommand::Markov {
            p_stay,
            length,
            seed,
        } => GenSpec::markov(*p_stay, *length, *seed),
        GenCommand::Dct { image, qs, length } => {
            let length = match length {
                Some(l) => *l,
                None => rcgs_core::datagen::read_pgm(image)?.block_count() * 64,
            };
            GenSpec::dct(image, *qs, length)
        }
    };
    let data = spec.generate()?;
    write(output, &data)?;
    println!(
        "{}: {} bytes, entropy {:.3}",
        output.display(),
        data.len(),
        entropy_of(&data)
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode> {
    let report = bench::run(&args.inputs, &args.coders, args.repeats as usize)?;
    print!("{}", report.render(args.format));
    for row in &report.rows {
        for (coder, cell) in report.coders.iter().zip(&row.cells) {
            if let bench::Outcome::Failed(why) = cell {
                eprintln!("{} failed on {}: {why}", coder.name(), row.name);
            }
        }
    }
    Ok(if report.any_failed() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    let config = args.codec.config()?;
    let data = read(&args.input)?;
    let (container, stats) = encode_with_stats(&data, &config)
        .with_context(|| format!("encoding {}", args.input.display()))?;
    println!(
        "{}: {} bytes, entropy {:.3} bits/symbol",
        args.input.display(),
        data.len(),
        entropy_of(&data)
    );
    for (k, s) in stats.iter().enumerate() {
        let excess = if s.entropy_bits > 0.0 {
            format!(
                "{:+.2}%",
                (s.grouped_code_length / s.entropy_bits - 1.0) * 100.0
            )
        } else {
            "n/a".into()
        };
        println!(
            "level {k}: {} symbols, {} distinct, N_s {}, sizes {:?}, t_delta_used {:.3}, \
             grouped {:.3} vs entropy {:.3} ({excess}), suffix {} bits",
            s.stream_length,
            s.distinct_symbols,
            s.super_letter_sizes.len(),
            s.super_letter_sizes,
            s.t_delta_used,
            s.grouped_code_length,
            s.entropy_bits,
            s.suffix_bits
        );
    }
    summarize(&container, data.len());
    Ok(ExitCode::SUCCESS)
}

fn summarize(container: &EncodedContainer, len: usize) {
    let total = container.serialized_len();
    let bps = if len == 0 {
        "n/a".to_string()
    } else {
        format!("{:.3}", total as f64 * 8.0 / len as f64)
    };
    println!(
        "terminal {} bytes raw; container {total} bytes ({} header), {bps} bits/symbol",
        container.terminal_raw.len(),
        container.header_bytes()
    );
}
