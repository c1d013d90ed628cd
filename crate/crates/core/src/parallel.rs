//! Thin switch between rayon data-parallel loops and plain sequential ones.
//!
//! All reductions go through fixed-size chunks whose partial results are
//! combined in index order, so parallel runs are bitwise identical to serial
//! runs regardless of thread scheduling.

/// Execution mode selected at runtime (`--serial` on the CLI forces `Serial`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Parallel,
    Serial,
}

/// Chunk length used for deterministic reductions.
pub const CHUNK: usize = 4096;

#[cfg(feature = "parallel")]
pub fn map_inplace<T: Send, F: Fn(usize, &mut T) + Sync>(mode: Mode, data: &mut [T], f: F) {
    use rayon::prelude::*;
    match mode {
        Mode::Parallel => {
            data.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (i, x) in chunk.iter_mut().enumerate() {
                    f(base + i, x);
                }
            });
        }
        Mode::Serial => {
            for (i, x) in data.iter_mut().enumerate() {
                f(i, x);
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_inplace<T, F: Fn(usize, &mut T)>(_mode: Mode, data: &mut [T], f: F) {
    for (i, x) in data.iter_mut().enumerate() {
        f(i, x);
    }
}

/// Deterministic sum of `f(i)` over `0..n`: chunk partials are accumulated in
/// chunk order whichever mode runs.
#[cfg(feature = "parallel")]
pub fn sum_indexed<F: Fn(usize) -> f64 + Sync>(mode: Mode, n: usize, f: F) -> f64 {
    use rayon::prelude::*;
    match mode {
        Mode::Parallel => {
            let n_chunks = n.div_ceil(CHUNK);
            let partials: Vec<f64> = (0..n_chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = c * CHUNK;
                    let hi = (lo + CHUNK).min(n);
                    let mut acc = 0.0;
                    for i in lo..hi {
                        acc += f(i);
                    }
                    acc
                })
                .collect();
            partials.iter().sum()
        }
        Mode::Serial => {
            let mut acc = 0.0;
            let mut partial = 0.0;
            for i in 0..n {
                partial += f(i);
                if (i + 1) % CHUNK == 0 {
                    acc += partial;
                    partial = 0.0;
                }
            }
            acc + partial
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn sum_indexed<F: Fn(usize) -> f64>(_mode: Mode, n: usize, f: F) -> f64 {
    let mut acc = 0.0;
    let mut partial = 0.0;
    for i in 0..n {
        partial += f(i);
        if (i + 1) % CHUNK == 0 {
            acc += partial;
            partial = 0.0;
        }
    }
    acc + partial
}

/// Deterministic map over an index range collecting into a Vec.
#[cfg(feature = "parallel")]
pub fn map_collect<T: Send, F: Fn(usize) -> T + Sync + Send>(mode: Mode, n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    match mode {
        Mode::Parallel => (0..n).into_par_iter().map(f).collect(),
        Mode::Serial => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F: Fn(usize) -> T>(_mode: Mode, n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_matches_serial_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = sum_indexed(Mode::Parallel, 100_000, f);
        let b = sum_indexed(Mode::Serial, 100_000, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
