//! Uniform frequency grid on [0, 2π) and alias-index arithmetic.
//!
//! Every spectral object in this crate is sampled at the `n` bin frequencies
//! θ_k = 2πk/n. Downsampling by a factor `m` folds the grid onto an output
//! grid of n/m bins, and the input bins that alias onto a given output bin are
//! obtained purely by index arithmetic, so alias bookkeeping is exact — no
//! floating-point frequency comparison is ever needed.

use crate::error::{Error, Result};

/// A uniform `n`-point frequency grid over [0, 2π), `n` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyGrid {
    n: usize,
}

impl FrequencyGrid {
    /// Creates an `n`-point grid. `n` must be even and at least 2.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::Divisibility {
                n,
                divisor: 2,
                context: "frequency grids must have an even number of bins",
            });
        }
        Ok(Self { n })
    }

    /// Creates a grid suitable for decimation by `m`: requires `2m | n` so
    /// that both the input grid and the folded output grid are even.
    pub fn for_decimation(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Range {
                name: "m",
                value: 0.0,
                requirement: "downsampling factor must be positive",
            });
        }
        if n % (2 * m) != 0 {
            return Err(Error::Divisibility {
                n,
                divisor: 2 * m,
                context: "decimation grids must split into 2m equal half-bands",
            });
        }
        Self::new(n)
    }

    /// Number of bins.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Angular frequency of bin `k`, θ_k = 2πk/n ∈ [0, 2π).
    #[inline]
    pub fn theta(&self, k: usize) -> f64 {
        debug_assert!(k < self.n);
        std::f64::consts::TAU * (k as f64) / (self.n as f64)
    }

    /// All bin frequencies in order.
    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.theta(k))
    }

    /// The input bins that alias onto output bin `j` under `m`-fold
    /// downsampling, in canonical order: index `k` holds `(j + k·n/m) mod n`.
    ///
    /// The `m` returned bins partition onto disjoint classes as `j` ranges
    /// over the output grid `0..n/m`, and alias index 0 is always `j` itself.
    pub fn alias_bins(&self, m: usize, j: usize) -> Result<Vec<usize>> {
        if m == 0 || self.n % m != 0 {
            return Err(Error::Divisibility {
                n: self.n,
                divisor: m.max(1),
                context: "alias partition needs m | n",
            });
        }
        let step = self.n / m;
        if j >= step {
            return Err(Error::Range {
                name: "output_bin",
                value: j as f64,
                requirement: "output bin must lie in 0..n/m",
            });
        }
        Ok((0..m).map(|k| (j + k * step) % self.n).collect())
    }

    /// Rectangle-rule quadrature: (2π/n)·Σ samples.
    ///
    /// Exact for trigonometric polynomials of degree below `n`; smooth
    /// periodic integrands converge spectrally.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.n {
            return Err(Error::LengthMismatch {
                left_name: "grid",
                left: self.n,
                right_name: "samples",
                right: samples.len(),
            });
        }
        let sum: f64 = samples.iter().sum();
        Ok(std::f64::consts::TAU * sum / (self.n as f64))
    }
}

/// Checks that two grids are identical, for operations mixing spectra.
pub(crate) fn require_same_grid(a: FrequencyGrid, b: FrequencyGrid) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}
