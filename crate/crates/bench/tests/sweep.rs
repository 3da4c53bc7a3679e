use std::time::Duration;

use pospopcnt::{KernelKind, PospopcntConfig};
use pospopcnt_bench::{generate_stream, write_csv, DataSpec, Harness, CSV_HEADER};

fn quick_harness() -> Harness {
    let mut h = Harness::new(PospopcntConfig::default());
    h.min_sample = Duration::from_micros(200);
    h
}

#[test]
fn sweep_every_kernel_passes_gate() {
    let mut h = quick_harness();
    let cells = h.sweep(&KernelKind::CONCRETE, &[0, 1, 10_007], 2);
    assert_eq!(cells.len(), KernelKind::CONCRETE.len() * 3);
    for cell in &cells {
        let r = cell.outcome.as_ref().unwrap_or_else(|e| panic!("{:?} {}: {e}", cell.kernel, cell.len_words));
        assert_eq!(r.len_words, cell.len_words);
        assert_eq!(r.reps, 2);
        assert!(r.wall_ns > 0.0 && r.stderr_pct >= 0.0);
        assert_eq!(r.gbps, 2.0 * r.len_words as f64 / r.wall_ns);
    }
}

#[test]
fn generated_streams_are_seeded_prefixes() {
    let a = generate_stream(DataSpec::new(7, 5000));
    assert_eq!(a, generate_stream(DataSpec::new(7, 5000)));
    assert_eq!(a[..1000], generate_stream(DataSpec::new(7, 1000))[..]);
    assert_ne!(a, generate_stream(DataSpec::new(8, 5000)));
}

#[test]
fn csv_has_header_and_one_row_per_record() {
    let mut h = quick_harness();
    let words = generate_stream(DataSpec::new(1, 4096));
    let rec = h.measure(KernelKind::Csa8, &words, 3).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, [&rec, &rec]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1].split(',').count(), CSV_HEADER.split(',').count());
    assert!(lines[1].starts_with("csa8,4096,3,"));
}
