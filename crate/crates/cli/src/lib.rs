//! Command implementations behind the `pospopcnt` binary. Each command
//! writes to caller-supplied streams and returns its exit code, so the
//! binary stays a thin shell and tests can drive commands in-process.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pospopcnt::{
    flagstats::FlagSummary, flagstats_pospopcnt, flagstats_reference, native_width,
    oracle_pospopcnt, pospopcnt, Backend, KernelKind, PositionalCounts, PospopcntConfig,
};
use pospopcnt_bench::{generate_stream, write_csv, DataSpec, Harness};
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: odd byte length {len}; input must be little-endian 16-bit words")]
    OddLength { path: String, len: usize },

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error(transparent)]
    Pospopcnt(#[from] pospopcnt::Error),
}

#[derive(Debug, Parser)]
#[command(name = "pospopcnt", version, about = "Positional population count over 16-bit word streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count set bits per position in a raw little-endian word file.
    Count(CountArgs),
    /// Check every kernel against the oracle.
    Verify(VerifyArgs),
    /// Time kernels across input sizes and write CSV.
    Bench(BenchArgs),
    /// SAM FLAG summary statistics over a raw word file.
    Flagstats(FlagstatsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// scalar | csa4 | csa8 | csa16 | forest | byteblend | auto
    #[arg(long, default_value = "auto", value_parser = parse_kernel)]
    pub kernel: KernelKind,
    /// auto | portable | avx2 | avx512
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    pub backend: Backend,
    /// Register width in bits for the carry-save-adder kernels (default: widest native).
    #[arg(long)]
    pub width: Option<u32>,
    /// Circuit blocks between lane-counter flushes (1..=65535).
    #[arg(long, default_value_t = pospopcnt::config::MAX_FLUSH_THRESHOLD)]
    pub flush_threshold: u32,
}

impl EngineArgs {
    pub fn config(&self) -> PospopcntConfig {
        let register_width_bits = self
            .width
            .or(self.backend.fixed_width())
            .unwrap_or_else(native_width);
        PospopcntConfig {
            kernel: self.kernel,
            register_width_bits,
            backend: self.backend,
            flush_threshold_blocks: self.flush_threshold,
            ..PospopcntConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Input file, or `-` for standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Check every stream length from 0 up to this many words.
    #[arg(long, default_value_t = 2048)]
    pub max_len: usize,
    /// Comma-separated kernels (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_kernel)]
    pub kernels: Vec<KernelKind>,
    /// Skip the exhaustive single-word pass.
    #[arg(long)]
    pub no_exhaustive: bool,
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    pub backend: Backend,
    #[arg(long)]
    pub width: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated sizes: words, with k/m suffixes (x1024 words), or
    /// bytes with kb/mb suffixes.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, required = true)]
    pub sizes: Vec<usize>,
    /// Comma-separated kernels (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_kernel)]
    pub kernels: Vec<KernelKind>,
    #[arg(long, default_value_t = 3)]
    pub reps: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Minimum time per repetition in milliseconds.
    #[arg(long, default_value_t = 20)]
    pub min_sample_ms: u64,
    #[arg(long, default_value = "auto", value_parser = parse_backend)]
    pub backend: Backend,
    #[arg(long)]
    pub width: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlagMode {
    Reference,
    Pospopcnt,
    Differential,
}

#[derive(Debug, Args)]
pub struct FlagstatsArgs {
    /// Input file of FLAG words, or `-` for standard input.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "pospopcnt")]
    pub mode: FlagMode,
    #[command(flatten)]
    pub engine: EngineArgs,
}

fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    s.parse().map_err(|e: pospopcnt::Error| e.to_string())
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: pospopcnt::Error| e.to_string())
}

/// Parses a size token into a word count.
///
/// `4096` and `8k` / `2m` are word counts (binary multiples); `8kb`,
/// `512kb`, `16mb` are byte sizes and must be even.
pub fn parse_size(s: &str) -> Result<usize, String> {
    let t = s.trim().to_ascii_lowercase();
    let (digits, mult, bytes) = if let Some(d) = t.strip_suffix("kb") {
        (d, 1 << 10, true)
    } else if let Some(d) = t.strip_suffix("mb") {
        (d, 1 << 20, true)
    } else if let Some(d) = t.strip_suffix('b') {
        (d, 1, true)
    } else if let Some(d) = t.strip_suffix('k') {
        (d, 1 << 10, false)
    } else if let Some(d) = t.strip_suffix('m') {
        (d, 1 << 20, false)
    } else {
        (t.as_str(), 1, false)
    };
    let n: usize = digits
        .parse()
        .map_err(|_| format!("bad size `{s}` (expected e.g. 4096, 8k, 512kb, 16mb)"))?;
    let n = n
        .checked_mul(mult)
        .ok_or_else(|| format!("size `{s}` overflows"))?;
    if bytes {
        if n % 2 != 0 {
            return Err(format!("size `{s}` is an odd number of bytes"));
        }
        Ok(n / 2)
    } else {
        Ok(n)
    }
}

/// Decodes raw little-endian 16-bit words.
pub fn decode_words(path: &str, bytes: &[u8]) -> Result<Vec<u16>, CliError> {
    if bytes.len() % 2 != 0 {
        return Err(CliError::OddLength {
            path: path.to_owned(),
            len: bytes.len(),
        });
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .collect())
}

pub fn encode_words(words: &[u16]) -> Vec<u8> {
    words.iter().flat_map(|w| w.to_le_bytes()).collect()
}

/// Reads a word file; `-` reads standard input, which is also the hook for
/// piping in blocks from an external decompressor.
pub fn read_words(path: &Path) -> Result<Vec<u16>, CliError> {
    let name = path.display().to_string();
    let mut bytes = Vec::new();
    let res = if name == "-" {
        io::stdin().lock().read_to_end(&mut bytes)
    } else {
        File::open(path).and_then(|mut f| f.read_to_end(&mut bytes))
    };
    res.map_err(|source| CliError::Io {
        path: name.clone(),
        source,
    })?;
    decode_words(&name, &bytes)
}

/// Parses `args` and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let code = e.exit_code() as u8;
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            code
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Count(a) => cmd_count(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Bench(a) => cmd_bench(&a, out, err),
        Command::Flagstats(a) => cmd_flagstats(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn format_counts(kernel: KernelKind, words: usize, counts: &PositionalCounts) -> String {
    let mut s = format!("kernel: {kernel}\nwords: {words}\n");
    for (p, c) in counts.iter().enumerate() {
        s.push_str(&format!("bit {p:2}: {c}\n"));
    }
    s
}

pub fn cmd_count(args: &CountArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let words = read_words(&args.input)?;
    let config = args.engine.config();
    let counts = pospopcnt(&words, &config)?;
    let kernel = config.resolved_kernel(words.len());
    let text = if args.json {
        let v = serde_json::json!({
            "kernel": kernel.name(),
            "words": words.len(),
            "counts": counts.as_array(),
        });
        format!("{v}\n")
    } else {
        format_counts(kernel, words.len(), &counts)
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

/// First disagreement found by [`verify_kernels`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub kernel: KernelKind,
    pub seed: u64,
    /// Stream length; `None` for the single-word pass.
    pub len: Option<usize>,
    /// Word value for the single-word pass.
    pub word: Option<u16>,
    pub expected: PositionalCounts,
    pub got: PositionalCounts,
}

impl Mismatch {
    pub fn describe(&self) -> String {
        let mut s = format!("MISMATCH kernel={} seed={}", self.kernel, self.seed);
        if let Some(len) = self.len {
            s.push_str(&format!(" length={len}"));
        }
        if let Some(w) = self.word {
            s.push_str(&format!(" word=0x{w:04x}"));
        }
        s.push('\n');
        for p in 0..16 {
            if self.expected[p] != self.got[p] {
                s.push_str(&format!(
                    "  bit {p:2}: expected {} got {}\n",
                    self.expected[p], self.got[p]
                ));
            }
        }
        s
    }
}

/// Compares `count(kernel, stream)` with the oracle over the single-word
/// domain (when `exhaustive`) and every prefix length `0..=max_len` of the
/// seeded stream. Lengths are tried in increasing order, so the reported
/// failure is the shortest one.
pub fn verify_kernels<F>(
    seed: u64,
    max_len: usize,
    kernels: &[KernelKind],
    exhaustive: bool,
    mut count: F,
) -> Result<(), Mismatch>
where
    F: FnMut(KernelKind, &[u16]) -> PositionalCounts,
{
    if exhaustive {
        for v in 0..=u16::MAX {
            let expected = oracle_pospopcnt(&[v]);
            for &kernel in kernels {
                let got = count(kernel, &[v]);
                if got != expected {
                    return Err(Mismatch { kernel, seed, len: None, word: Some(v), expected, got });
                }
            }
        }
    }
    let stream = generate_stream(DataSpec::new(seed, max_len));
    for len in 0..=max_len {
        let words = &stream[..len];
        let expected = oracle_pospopcnt(words);
        for &kernel in kernels {
            let got = count(kernel, words);
            if got != expected {
                return Err(Mismatch { kernel, seed, len: Some(len), word: None, expected, got });
            }
        }
    }
    Ok(())
}

fn kernels_or_all(k: &[KernelKind]) -> Vec<KernelKind> {
    if k.is_empty() {
        KernelKind::CONCRETE.to_vec()
    } else {
        k.to_vec()
    }
}

fn base_config(backend: Backend, width: Option<u32>) -> PospopcntConfig {
    PospopcntConfig {
        backend,
        register_width_bits: width.or(backend.fixed_width()).unwrap_or_else(native_width),
        ..PospopcntConfig::default()
    }
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let kernels = kernels_or_all(&args.kernels);
    let base = base_config(args.backend, args.width);
    for &kernel in &kernels {
        PospopcntConfig { kernel, ..base }.validate()?;
    }
    let result = verify_kernels(args.seed, args.max_len, &kernels, !args.no_exhaustive, |kernel, words| {
        pospopcnt(words, &PospopcntConfig { kernel, ..base }).expect("config validated")
    });
    report_verify(result, &kernels, args.max_len, out)
}

pub fn report_verify(
    result: Result<(), Mismatch>,
    kernels: &[KernelKind],
    max_len: usize,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let names: Vec<_> = kernels.iter().map(|k| k.name()).collect();
    match result {
        Ok(()) => {
            write_out(
                out,
                &format!(
                    "all kernels equivalent ({}) on lengths 0..={max_len}\n",
                    names.join(", ")
                ),
            )?;
            Ok(EXIT_OK)
        }
        Err(m) => {
            write_out(out, &m.describe())?;
            Ok(EXIT_FAILED)
        }
    }
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let kernels = kernels_or_all(&args.kernels);
    let base = base_config(args.backend, args.width);
    base.validate()?;
    let mut harness = Harness::new(base);
    harness.seed = args.seed;
    harness.min_sample = Duration::from_millis(args.min_sample_ms);
    if !harness.has_counters() {
        let _ = writeln!(err, "note: hardware counters unavailable; counter columns left empty");
    }
    let cells = harness.sweep(&kernels, &args.sizes, args.reps);
    let mut failed = false;
    for c in &cells {
        if let Err(e) = &c.outcome {
            failed = true;
            let _ = writeln!(err, "error: {} @ {} words: {e}", c.kernel, c.len_words);
        }
    }
    let records: Vec<_> = cells.iter().filter_map(|c| c.outcome.as_ref().ok()).collect();
    let io_err = |source, path: &Path| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    match &args.csv {
        Some(path) => {
            let f = File::create(path).map_err(|e| io_err(e, path))?;
            write_csv(io::BufWriter::new(f), records).map_err(|e| io_err(e, path))?;
        }
        None => write_csv(out, records).map_err(|e| io_err(e, Path::new("<stdout>")))?,
    }
    Ok(if failed { EXIT_FAILED } else { EXIT_OK })
}

pub fn format_flagstats(summary: &FlagSummary) -> String {
    let mut s = format!("{:<16}{:>14}{:>14}\n", "", "QC-passed", "QC-failed");
    let pass = summary.pass().fields();
    let fail = summary.fail().fields();
    for ((name, p), (_, f)) in pass.iter().zip(fail.iter()) {
        s.push_str(&format!("{name:<16}{p:>14}{f:>14}\n"));
    }
    s
}

pub fn cmd_flagstats(args: &FlagstatsArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let words = read_words(&args.input)?;
    let config = args.engine.config();
    match args.mode {
        FlagMode::Reference => {
            let s = flagstats_reference(&words)?;
            write_out(out, &format_flagstats(&s))?;
        }
        FlagMode::Pospopcnt => {
            let s = flagstats_pospopcnt(&words, &config)?;
            write_out(out, &format_flagstats(&s))?;
        }
        FlagMode::Differential => {
            let reference = flagstats_reference(&words)?;
            let fast = flagstats_pospopcnt(&words, &config)?;
            write_out(out, &format_flagstats(&fast))?;
            if reference != fast {
                let mut s = String::from("differential: MISMATCH\n");
                for (b, label) in [(0, "QC-passed"), (1, "QC-failed")] {
                    let r = reference.buckets[b].fields();
                    let f = fast.buckets[b].fields();
                    for ((name, rv), (_, fv)) in r.iter().zip(f.iter()) {
                        if rv != fv {
                            s.push_str(&format!("  {label} {name}: reference {rv} pospopcnt {fv}\n"));
                        }
                    }
                }
                write_out(out, &s)?;
                return Ok(EXIT_FAILED);
            }
            write_out(out, &format!("differential: match over {} words\n", words.len()))?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_tokens() {
        assert_eq!(parse_size("4096"), Ok(4096));
        assert_eq!(parse_size("8k"), Ok(8192));
        assert_eq!(parse_size("2M"), Ok(2 << 20));
        assert_eq!(parse_size("8kb"), Ok(4096));
        assert_eq!(parse_size("512kb"), Ok(262_144));
        assert_eq!(parse_size("16mb"), Ok(8 << 20));
        assert!(parse_size("12x").is_err());
        assert!(parse_size("").is_err());
        assert!(parse_size("3b").is_err());
    }

    #[test]
    fn odd_length_rejected() {
        assert!(matches!(decode_words("x", &[1, 2, 3]), Err(CliError::OddLength { len: 3, .. })));
        assert_eq!(decode_words("x", &[]).unwrap(), Vec::<u16>::new());
        assert_eq!(decode_words("x", &[0x34, 0x12]).unwrap(), vec![0x1234]);
    }

    #[test]
    fn injected_fault_is_reported_minimally() {
        let kernels = [KernelKind::ScalarBasic, KernelKind::Forest];
        let result = verify_kernels(7, 40, &kernels, false, |k, words| {
            let mut c = oracle_pospopcnt(words);
            if k == KernelKind::Forest && words.len() >= 5 {
                c[3] += 1;
            }
            c
        });
        let m = result.unwrap_err();
        assert_eq!(m.kernel, KernelKind::Forest);
        assert_eq!(m.len, Some(5));
        let text = m.describe();
        assert!(text.contains("length=5"));
        assert!(text.contains("bit  3"));
        let mut out = Vec::new();
        assert_eq!(report_verify(Err(m), &kernels, 40, &mut out).unwrap(), EXIT_FAILED);
    }

    #[test]
    fn verify_trivial_length() {
        let r = verify_kernels(1, 0, &KernelKind::CONCRETE, false, |k, w| {
            pospopcnt(w, &PospopcntConfig::with_kernel(k)).unwrap()
        });
        assert!(r.is_ok());
    }
}
