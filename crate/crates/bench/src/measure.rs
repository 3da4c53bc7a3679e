use std::hint::black_box;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use pospopcnt::{oracle_pospopcnt, pospopcnt, KernelKind, PospopcntConfig};

use crate::data::{generate_stream, DataSpec};
use crate::error::BenchError;
use crate::perf::HwCounters;

/// CSV header of [`write_csv`].
pub const CSV_HEADER: &str =
    "kernel,len_words,reps,wall_ns,gbps,cycles_per_word,instructions_per_word,stderr_pct";

/// One measured (kernel, input size) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub kernel: KernelKind,
    pub len_words: usize,
    pub reps: u32,
    /// Best per-call wall time over the repetitions, in nanoseconds.
    pub wall_ns: f64,
    /// Input bytes per nanosecond, i.e. GB/s.
    pub gbps: f64,
    pub cycles_per_word: Option<f64>,
    pub instructions_per_word: Option<f64>,
    /// Standard error of the mean per-call time, as a percentage of the mean.
    pub stderr_pct: f64,
}

/// Outcome of one sweep cell.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub kernel: KernelKind,
    pub len_words: usize,
    pub outcome: Result<BenchRecord, BenchError>,
}

/// Measurement settings shared by every cell of a run.
pub struct Harness {
    /// Backend, width and flush settings; `kernel` is overwritten per cell.
    pub config: PospopcntConfig,
    /// Each repetition loops the kernel until at least this much time has
    /// passed, so tiny inputs are not lost in timer resolution.
    pub min_sample: Duration,
    pub seed: u64,
    counters: Option<HwCounters>,
}

impl Default for Harness {
    fn default() -> Self {
        Harness::new(PospopcntConfig::default())
    }
}

impl Harness {
    pub fn new(config: PospopcntConfig) -> Self {
        Harness {
            config,
            min_sample: Duration::from_millis(2),
            seed: 1,
            counters: HwCounters::open(),
        }
    }

    pub fn has_counters(&self) -> bool {
        self.counters.is_some()
    }

    /// Runs `kernel` over `words` `reps` times after checking its result
    /// against the oracle once.
    pub fn measure(
        &mut self,
        kernel: KernelKind,
        words: &[u16],
        reps: u32,
    ) -> Result<BenchRecord, BenchError> {
        if reps == 0 {
            return Err(BenchError::NoReps);
        }
        let config = PospopcntConfig {
            kernel,
            ..self.config
        };
        let got = pospopcnt(words, &config)?;
        let expected = oracle_pospopcnt(words);
        if got != expected {
            return Err(BenchError::Mismatch {
                kernel,
                len_words: words.len(),
                got,
                expected,
            });
        }

        let run = || black_box(pospopcnt(black_box(words), &config));
        let start = Instant::now();
        run().ok();
        let once = start.elapsed().max(Duration::from_nanos(1));
        let inner = (self.min_sample.as_nanos() / once.as_nanos()).clamp(1, 1_000_000) as u64;

        let mut samples = Vec::with_capacity(reps as usize);
        let mut best_counters: Option<(f64, f64)> = None;
        for _ in 0..reps {
            let mut elapsed = Duration::ZERO;
            let counted = match self.counters.as_mut() {
                Some(c) => c.measure(|| {
                    let t = Instant::now();
                    for _ in 0..inner {
                        run().ok();
                    }
                    elapsed = t.elapsed();
                }),
                None => {
                    let t = Instant::now();
                    for _ in 0..inner {
                        run().ok();
                    }
                    elapsed = t.elapsed();
                    None
                }
            };
            samples.push(elapsed.as_nanos() as f64 / inner as f64);
            if let (Some(s), false) = (counted, words.is_empty()) {
                let per = (inner * words.len() as u64) as f64;
                let (cyc, ins) = (s.cycles as f64 / per, s.instructions as f64 / per);
                best_counters = Some(match best_counters {
                    Some((c, i)) => (c.min(cyc), i.min(ins)),
                    None => (cyc, ins),
                });
            }
        }

        let wall_ns = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let gbps = if wall_ns > 0.0 {
            2.0 * words.len() as f64 / wall_ns
        } else {
            0.0
        };
        Ok(BenchRecord {
            kernel,
            len_words: words.len(),
            reps,
            wall_ns,
            gbps,
            cycles_per_word: best_counters.map(|c| c.0),
            instructions_per_word: best_counters.map(|c| c.1),
            stderr_pct: stderr_pct(&samples),
        })
    }

    /// Measures every kernel on every size. Inputs are generated from
    /// `self.seed`; a failing cell does not stop the sweep.
    pub fn sweep(&mut self, kernels: &[KernelKind], sizes: &[usize], reps: u32) -> Vec<SweepCell> {
        let mut cells = Vec::with_capacity(kernels.len() * sizes.len());
        for &kernel in kernels {
            for &len_words in sizes {
                let words = generate_stream(DataSpec::new(self.seed, len_words));
                cells.push(SweepCell {
                    kernel,
                    len_words,
                    outcome: self.measure(kernel, &words, reps),
                });
            }
        }
        cells
    }
}

/// Standard error of the mean, relative to the mean, in percent.
pub fn stderr_pct(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    if samples.len() < 2 {
        return 0.0;
    }
    let mean = samples.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return 0.0;
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    100.0 * (var.sqrt() / n.sqrt()) / mean
}

/// [`Harness::measure`] with default settings.
pub fn measure(kernel: KernelKind, words: &[u16], reps: u32) -> Result<BenchRecord, BenchError> {
    Harness::default().measure(kernel, words, reps)
}

/// [`Harness::sweep`] with default settings.
pub fn sweep(kernels: &[KernelKind], sizes: &[usize], reps: u32) -> Vec<SweepCell> {
    Harness::default().sweep(kernels, sizes, reps)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_default()
}

pub fn write_csv<'a, W: Write>(
    mut out: W,
    records: impl IntoIterator<Item = &'a BenchRecord>,
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{:.1},{:.4},{},{},{:.3}",
            r.kernel,
            r.len_words,
            r.reps,
            r.wall_ns,
            r.gbps,
            opt(r.cycles_per_word),
            opt(r.instructions_per_word),
            r.stderr_pct
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Harness {
        Harness {
            min_sample: Duration::from_micros(50),
            ..Harness::default()
        }
    }

    #[test]
    fn smoke_scalar() {
        let words = generate_stream(DataSpec::new(3, 8192));
        let r = quick().measure(KernelKind::ScalarBasic, &words, 3).unwrap();
        assert!(r.gbps > 0.0);
        assert!(r.stderr_pct.is_finite());
        assert_eq!(r.len_words, 8192);
        assert!((r.gbps - 2.0 * 8192.0 / r.wall_ns).abs() < 1e-9);
    }

    #[test]
    fn zero_reps_rejected() {
        assert_eq!(quick().measure(KernelKind::Csa4, &[1, 2], 0), Err(BenchError::NoReps));
    }

    #[test]
    fn unavailable_kernel_is_an_error() {
        let mut h = quick();
        h.config.register_width_bits = 48;
        assert!(matches!(
            h.measure(KernelKind::Csa16, &[1], 1),
            Err(BenchError::Kernel(_))
        ));
    }

    #[test]
    fn sweep_shape() {
        let cells = quick().sweep(&[KernelKind::ScalarBasic], &[4096], 1);
        assert_eq!(cells.len(), 1);
        assert!(cells[0].outcome.is_ok());
        let cells = quick().sweep(&KernelKind::CONCRETE, &[10_007, 0], 1);
        assert_eq!(cells.len(), 12);
        assert!(cells.iter().all(|c| c.outcome.is_ok()));
    }

    #[test]
    fn csv_layout() {
        let rec = BenchRecord {
            kernel: KernelKind::Csa16,
            len_words: 4096,
            reps: 3,
            wall_ns: 1000.0,
            gbps: 8.192,
            cycles_per_word: None,
            instructions_per_word: Some(0.25),
            stderr_pct: 1.5,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, [&rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "csa16,4096,3,1000.0,8.1920,,0.2500,1.500");
    }

    #[test]
    fn stderr_of_constant_samples_is_zero() {
        assert_eq!(stderr_pct(&[5.0, 5.0, 5.0]), 0.0);
        assert_eq!(stderr_pct(&[5.0]), 0.0);
        assert!(stderr_pct(&[4.0, 6.0]) > 0.0);
    }
}
