//! FIR filters and per-bin power-gain masks.

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::quad::log_mean;

/// A real FIR filter `h[0..=P]` acting as `X̃_t = Σ_p h[p]·X_{t−p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    coeffs: Vec<f64>,
}

impl FirFilter {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Precondition(
                "FIR filter needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition(
                "FIR coefficients must be finite".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// The identity filter `h = [1]`.
    pub fn identity() -> Self {
        Self { coeffs: vec![1.0] }
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Filter order P (number of taps minus one).
    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Deterministic autocorrelation `ρ[m] = Σ_p h[p]·h[p+m]`, m = 0..=P.
    pub fn autocorr(&self) -> Vec<f64> {
        let p = self.coeffs.len();
        (0..p)
            .map(|m| (0..p - m).map(|i| self.coeffs[i] * self.coeffs[i + m]).sum())
            .collect()
    }

    /// Noise gain `Σ_p h[p]²`, the white-noise variance amplification. Equals
    /// (1/2π)∫|H|²dθ by Parseval.
    pub fn noise_gain(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Squared magnitude response |H(e^{jθ_k})|² sampled on the grid, built
    /// from the filter autocorrelation so the θ and 2π−θ bins are bit-equal
    /// and exact zeros (e.g. `h=[1,1]` at θ=π) come out exactly zero.
    pub fn magnitude_squared(&self, grid: FrequencyGrid) -> Result<BandMask> {
        let rho = self.autocorr();
        let n = grid.len();
        let mut gains = vec![0.0; n];
        for k in 0..=n / 2 {
            let theta = grid.theta(k);
            let mut g = rho[0];
            for (m, rm) in rho.iter().enumerate().skip(1) {
                g += 2.0 * rm * (m as f64 * theta).cos();
            }
            gains[k] = g.max(0.0);
            if k != 0 && k != n / 2 {
                gains[n - k] = gains[k];
            }
        }
        BandMask::new(grid, gains)
    }
}

/// Per-bin power gains |H(e^{jθ_k})|² ≥ 0 of a (possibly idealized) filter.
///
/// Masks produced from real FIR filters or band constructions are
/// even-symmetric bin-exactly; compaction masks may break evenness at exact
/// tie bins (a measure-zero set) because exactly one alias wins per output
/// bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMask {
    grid: FrequencyGrid,
    gains: Vec<f64>,
}

impl BandMask {
    pub fn new(grid: FrequencyGrid, gains: Vec<f64>) -> Result<Self> {
        if gains.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left_name: "grid",
                left: grid.len(),
                right_name: "gains",
                right: gains.len(),
            });
        }
        if let Some(&g) = gains.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(Error::Range {
                name: "gain",
                value: g,
                requirement: "mask gains must be finite and nonnegative",
            });
        }
        Ok(Self { grid, gains })
    }

    /// All-pass mask (gain 1 everywhere).
    pub fn all_pass(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            gains: vec![1.0; grid.len()],
        }
    }

    #[inline]
    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    #[inline]
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Pointwise product of two masks (cascaded filters).
    pub fn cascade(&self, other: &BandMask) -> Result<BandMask> {
        crate::grid::require_same_grid(self.grid, other.grid)?;
        let gains = self
            .gains
            .iter()
            .zip(&other.gains)
            .map(|(a, b)| a * b)
            .collect();
        BandMask::new(self.grid, gains)
    }

    /// The Paley-Wiener integral (1/4π)∫ln|H|²dθ = (1/2π)∫ln|H|dθ by the
    /// rectangle rule.
    ///
    /// Returns `NEG_INFINITY` (an ordinary value, not an error) when the
    /// gains vanish on a positive-measure set — a zero bin adjacent to
    /// another zero bin. An isolated zero bin is an integrable log
    /// singularity and is scored at the half-bin offsets, leaving O(ln n / n)
    /// quadrature error.
    pub fn paley_wiener_integral(&self) -> f64 {
        0.5 * log_mean(&self.gains)
    }
}

/// The textbook ideal low-pass anti-aliasing mask for decimation by `m`:
/// gain 1 on |θ| < π/m (θ folded to (−π, π]), gain 0 elsewhere, with the
/// boundary bins at exactly ±π/m excluded (half-open passband).
///
/// For m = 1 the decimator is the identity and the mask is all-ones.
/// Selection uses integer bin arithmetic only, so the cut is deterministic.
pub fn ideal_lowpass_mask(grid: FrequencyGrid, m: usize) -> Result<BandMask> {
    let n = grid.len();
    if m == 0 {
        return Err(Error::Range {
            name: "m",
            value: 0.0,
            requirement: "downsampling factor must be positive",
        });
    }
    if m == 1 {
        return Ok(BandMask::all_pass(grid));
    }
    if n % (2 * m) != 0 {
        return Err(Error::Divisibility {
            n,
            divisor: 2 * m,
            context: "ideal low-pass cut-off must fall on a bin boundary",
        });
    }
    let cut = n / (2 * m); // bin index of +π/m
    let gains = (0..n)
        .map(|k| if k < cut || k > n - cut { 1.0 } else { 0.0 })
        .collect();
    BandMask::new(grid, gains)
}
