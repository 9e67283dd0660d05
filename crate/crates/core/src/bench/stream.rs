//! STREAM-style triad `a[i] = b[i] + q * c[i]`, counted as 24 bytes per element.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const TRIAD_SCALAR: f64 = 3.0;
const FALLBACK_LLC_BYTES: u64 = 32 << 20;

/// Bandwidth in GB/s for one triad pass over `elements` taking `seconds`.
pub fn triad_gbps(elements: usize, seconds: f64) -> f64 {
    24.0 * elements as f64 / seconds / 1e9
}

/// Size of the highest cache level reported by sysfs, or 32 MiB when unavailable.
pub fn last_level_cache_bytes() -> u64 {
    let mut best: Option<(u32, u64)> = None;
    if let Ok(dir) = std::fs::read_dir("/sys/devices/system/cpu/cpu0/cache") {
        for entry in dir.flatten() {
            let path = entry.path();
            let read = |f: &str| std::fs::read_to_string(path.join(f)).ok();
            let (Some(level), Some(size)) = (read("level"), read("size")) else {
                continue;
            };
            let (Ok(level), Some(bytes)) = (level.trim().parse::<u32>(), parse_cache_size(&size))
            else {
                continue;
            };
            if best.is_none_or(|(l, _)| level > l) {
                best = Some((level, bytes));
            }
        }
    }
    best.map_or(FALLBACK_LLC_BYTES, |(_, b)| b)
}

fn parse_cache_size(s: &str) -> Option<u64> {
    let s = s.trim();
    let (digits, mult) = match s.chars().last()? {
        'K' | 'k' => (&s[..s.len() - 1], 1u64 << 10),
        'M' | 'm' => (&s[..s.len() - 1], 1 << 20),
        'G' | 'g' => (&s[..s.len() - 1], 1 << 30),
        _ => (s, 1),
    };
    digits.trim().parse::<u64>().ok().map(|v| v * mult)
}

/// Best-of-`repetitions` triad bandwidth in GB/s.
///
/// Refuses array sizes whose three arrays together are smaller than four
/// times the last-level cache.
pub fn stream_triad(elements: usize, repetitions: usize, workers: usize) -> Result<f64> {
    let llc = last_level_cache_bytes();
    let footprint = 24u64 * elements as u64;
    if footprint < 4 * llc {
        return Err(Error::BenchConfig(format!(
            "triad arrays ({footprint} bytes) must be at least 4x the last-level cache ({llc} bytes); \
             use at least {} elements",
            (4 * llc).div_ceil(24)
        )));
    }
    stream_triad_unchecked(elements, repetitions, workers)
}

/// [`stream_triad`] without the cache-size guard.
pub fn stream_triad_unchecked(elements: usize, repetitions: usize, workers: usize) -> Result<f64> {
    if elements == 0 || repetitions == 0 || workers == 0 {
        return Err(Error::BenchConfig(
            "elements, repetitions and workers must be positive".into(),
        ));
    }
    let alloc = |fill: f64| -> Result<Vec<f64>> {
        let mut v = Vec::new();
        v.try_reserve_exact(elements)
            .map_err(|e| Error::BenchConfig(format!("cannot allocate triad arrays: {e}")))?;
        v.resize(elements, fill);
        Ok(v)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::BenchConfig(format!("thread pool: {e}")))?;
    let (mut a, b, c) = (alloc(0.0)?, alloc(1.0)?, alloc(2.0)?);
    let chunk = elements.div_ceil(workers);

    let best = pool.install(|| {
        let mut best = f64::INFINITY;
        for _ in 0..repetitions {
            let start = Instant::now();
            a.par_chunks_mut(chunk)
                .zip(b.par_chunks(chunk))
                .zip(c.par_chunks(chunk))
                .for_each(|((a, b), c)| {
                    for ((x, &y), &z) in a.iter_mut().zip(b).zip(c) {
                        *x = y + TRIAD_SCALAR * z;
                    }
                });
            best = best.min(start.elapsed().as_secs_f64());
        }
        best
    });
    let expect = 1.0 + TRIAD_SCALAR * 2.0;
    if a.iter().any(|&x| x != expect) {
        return Err(Error::Validation("triad produced wrong values".into()));
    }
    Ok(triad_gbps(elements, best.max(1e-9)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_accounting() {
        assert!((triad_gbps(1_000_000, 1e-3) - 24.0).abs() < 1e-12);
    }

    #[test]
    fn cache_size_parsing() {
        assert_eq!(parse_cache_size("32K\n"), Some(32 * 1024));
        assert_eq!(parse_cache_size("256M"), Some(256 << 20));
        assert_eq!(parse_cache_size("4096"), Some(4096));
        assert_eq!(parse_cache_size("x"), None);
    }

    #[test]
    fn small_triad_is_sane() {
        let bw = stream_triad_unchecked(1 << 16, 3, 2).unwrap();
        assert!(bw.is_finite() && bw > 0.0 && bw < 100_000.0);
    }

    #[test]
    fn guard_rejects_cache_resident_arrays() {
        assert!(stream_triad(1024, 1, 1).is_err());
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(stream_triad_unchecked(0, 1, 1).is_err());
        assert!(stream_triad_unchecked(10, 0, 1).is_err());
        assert!(stream_triad_unchecked(10, 1, 0).is_err());
    }
}
