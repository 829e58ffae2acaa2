//! Power spectra and cross spectra sampled on a [`FrequencyGrid`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::BandMask;
use crate::grid::{require_same_grid, FrequencyGrid};

/// Relative tolerance under which slightly negative PSD samples are clamped
/// to zero instead of rejected (quadrature round-off from autocorrelation
/// round trips).
const NEG_CLAMP_REL: f64 = 1e-12;

/// Relative tolerance for validating the even / Hermitian symmetry of
/// caller-provided sample arrays before they are symmetrized bin-exactly.
const SYMMETRY_REL: f64 = 1e-9;

/// A real, nonnegative, even power spectral density sampled at θ_k = 2πk/n.
///
/// Evenness (S(θ) = S(2π−θ)) holds bin-exactly: constructors either build the
/// upper half by mirroring or validate-and-symmetrize caller data.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: FrequencyGrid,
    values: Vec<f64>,
}

impl Spectrum {
    /// Wraps caller-provided samples. Values within `-1e-12` (relative) of
    /// zero are clamped to exactly zero; more negative values are rejected.
    /// The array must be even-symmetric to 1e-9 relative tolerance and is
    /// then symmetrized bin-exactly.
    pub fn from_values(grid: FrequencyGrid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left_name: "grid",
                left: grid.len(),
                right_name: "values",
                right: values.len(),
            });
        }
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
        for (k, v) in values.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v >= -NEG_CLAMP_REL * scale {
                    *v = 0.0;
                } else {
                    return Err(Error::NegativePsd { bin: k, value: *v });
                }
            }
        }
        let n = grid.len();
        for k in 1..n / 2 {
            if (values[k] - values[n - k]).abs() > SYMMETRY_REL * scale {
                return Err(Error::Precondition(format!(
                    "PSD must be even-symmetric: bins {k} and {} differ by {:e}",
                    n - k,
                    values[k] - values[n - k]
                )));
            }
            let avg = 0.5 * (values[k] + values[n - k]);
            values[k] = avg;
            values[n - k] = avg;
        }
        Ok(Self { grid, values })
    }

    /// Builds the trigonometric polynomial `S(θ) = r[0] + 2·Σ_m r[m]·cos(mθ)`
    /// from real autocorrelation coefficients `r[0..=K]`, K < n/2.
    pub fn from_autocorr(grid: FrequencyGrid, r: &[f64]) -> Result<Self> {
        let n = grid.len();
        if r.is_empty() || r.len() > n / 2 {
            return Err(Error::Range {
                name: "autocorr_len",
                value: r.len() as f64,
                requirement: "need 1 <= len <= n/2 coefficients",
            });
        }
        let mut values = vec![0.0; n];
        for k in 0..=n / 2 {
            let theta = grid.theta(k);
            let mut s = r[0];
            for (m, rm) in r.iter().enumerate().skip(1) {
                s += 2.0 * rm * (m as f64 * theta).cos();
            }
            values[k] = s;
            if k != 0 && k != n / 2 {
                values[n - k] = s; // bit-exact even symmetry
            }
        }
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
        for (k, v) in values.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v >= -NEG_CLAMP_REL * scale {
                    *v = 0.0;
                } else {
                    return Err(Error::NegativePsd { bin: k, value: *v });
                }
            }
        }
        Ok(Self { grid, values })
    }

    /// Flat spectrum of a white process with the given variance.
    pub fn white(grid: FrequencyGrid, variance: f64) -> Result<Self> {
        if !(variance >= 0.0) {
            return Err(Error::Range {
                name: "variance",
                value: variance,
                requirement: "variance must be nonnegative",
            });
        }
        Ok(Self {
            grid,
            values: vec![variance; grid.len()],
        })
    }

    #[inline]
    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean power (1/2π)∫S dθ, i.e. the process variance.
    pub fn mean_power(&self) -> f64 {
        self.values.iter().sum::<f64>() / (self.values.len() as f64)
    }

    /// Autocorrelation `r[m] = (1/2π)∫S·e^{jmθ}dθ` for m = 0..=max_lag by the
    /// rectangle rule: `r[m] = (1/n)·Σ_k S[k]·cos(m·θ_k)`.
    ///
    /// The imaginary part vanishes identically for even spectra and is not
    /// formed. Exact whenever S is a trigonometric polynomial of degree
    /// < n − max_lag; requires max_lag < n/2.
    pub fn autocorr(&self, max_lag: usize) -> Result<Vec<f64>> {
        let n = self.grid.len();
        if max_lag >= n / 2 {
            return Err(Error::Range {
                name: "max_lag",
                value: max_lag as f64,
                requirement: "max_lag must be below n/2",
            });
        }
        let inv_n = 1.0 / (n as f64);
        Ok((0..=max_lag)
            .map(|m| {
                let s: f64 = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (m as f64 * self.grid.theta(k)).cos())
                    .sum();
                s * inv_n
            })
            .collect())
    }

    /// PSD of the process after `m`-fold downsampling (no filter):
    /// `out[j] = (1/m)·Σ_k S[(j + k·n/m) mod n]` on the n/m-point grid.
    pub fn downsample(&self, m: usize) -> Result<Spectrum> {
        let n = self.grid.len();
        let out_grid = FrequencyGrid::for_decimation(n, m).and_then(|_| FrequencyGrid::new(n / m))?;
        let n_out = n / m;
        let inv_m = 1.0 / (m as f64);
        let mut out = vec![0.0; n_out];
        for j in 0..=n_out / 2 {
            let s: f64 = self
                .grid
                .alias_bins(m, j)?
                .into_iter()
                .map(|i| self.values[i])
                .sum();
            out[j] = s * inv_m;
            if j != 0 && j != n_out / 2 {
                out[n_out - j] = out[j];
            }
        }
        Ok(Spectrum {
            grid: out_grid,
            values: out,
        })
    }

    /// Pointwise product with a mask's power gains (the PSD after filtering
    /// by a filter with those |H|² gains).
    pub fn apply_mask(&self, mask: &BandMask) -> Result<Spectrum> {
        require_same_grid(self.grid, mask.grid())?;
        let values = self
            .values
            .iter()
            .zip(mask.gains())
            .map(|(s, g)| s * g)
            .collect();
        Ok(Spectrum {
            grid: self.grid,
            values,
        })
    }

    /// Re-samples the spectrum on another grid through its autocorrelation
    /// (lag cap min(64, n/2−1)). Exact for band-limited (trig-polynomial)
    /// spectra of degree ≤ the cap; longer-memory spectra are truncated.
    pub fn resample(&self, grid: FrequencyGrid) -> Result<Spectrum> {
        let cap = 64.min(self.grid.len() / 2 - 1).min(grid.len() / 2 - 1).max(1);
        let r = self.autocorr(cap)?;
        Spectrum::from_autocorr(grid, &r)
    }
}

/// A complex cross spectral density S_wz sampled on the grid, Hermitian
/// (S_wz(2π−θ) = conj S_wz(θ)) bin-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectrum {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl CrossSpectrum {
    /// Wraps caller-provided samples, validating Hermitian symmetry to 1e-9
    /// relative tolerance and then enforcing it bin-exactly.
    pub fn from_values(grid: FrequencyGrid, mut values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left_name: "grid",
                left: grid.len(),
                right_name: "values",
                right: values.len(),
            });
        }
        let n = grid.len();
        let scale = values
            .iter()
            .fold(0.0_f64, |a, v| a.max(v.norm()))
            .max(1e-300);
        for k in [0, n / 2] {
            if values[k].im.abs() > SYMMETRY_REL * scale {
                return Err(Error::Precondition(format!(
                    "cross spectrum must be Hermitian: bin {k} has imaginary part {:e}",
                    values[k].im
                )));
            }
            values[k].im = 0.0;
        }
        for k in 1..n / 2 {
            if (values[k] - values[n - k].conj()).norm() > SYMMETRY_REL * scale {
                return Err(Error::Precondition(format!(
                    "cross spectrum must be Hermitian: bins {k} and {} are not conjugate",
                    n - k
                )));
            }
            let avg = 0.5 * (values[k] + values[n - k].conj());
            values[k] = avg;
            values[n - k] = avg.conj();
        }
        Ok(Self { grid, values })
    }

    /// Builds a real, even cross spectrum (automatically Hermitian).
    pub fn from_real_even(spectrum: &Spectrum) -> Self {
        Self {
            grid: spectrum.grid(),
            values: spectrum
                .values()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    #[inline]
    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// |S_wz(θ_k)|² per bin.
    pub fn magnitude_squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Pointwise product with real mask gains. The gains are power gains
    /// |H|²; this convention matches binary masks (where |H|² = |H|) and the
    /// squared-magnitude use in all rate formulas.
    pub fn apply_mask(&self, mask: &BandMask) -> Result<CrossSpectrum> {
        require_same_grid(self.grid, mask.grid())?;
        let values = self
            .values
            .iter()
            .zip(mask.gains())
            .map(|(c, g)| c * g)
            .collect();
        Ok(CrossSpectrum {
            grid: self.grid,
            values,
        })
    }

    /// Cross autocorrelation `r_wz[τ] = (1/2π)∫S_wz·e^{jτθ}dθ` for
    /// τ = −max_lag..=max_lag, returned as real values (Hermitian symmetry
    /// makes the imaginary parts cancel; they are discarded below 1e-12).
    pub fn cross_autocorr(&self, max_lag: usize) -> Result<Vec<f64>> {
        let n = self.grid.len();
        if max_lag >= n / 2 {
            return Err(Error::Range {
                name: "max_lag",
                value: max_lag as f64,
                requirement: "max_lag must be below n/2",
            });
        }
        let inv_n = 1.0 / (n as f64);
        Ok((-(max_lag as isize)..=max_lag as isize)
            .map(|tau| {
                let s: Complex64 = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let ang = tau as f64 * self.grid.theta(k);
                        v * Complex64::new(ang.cos(), ang.sin())
                    })
                    .sum();
                debug_assert!(s.im.abs() * inv_n < 1e-9);
                s.re * inv_n
            })
            .collect())
    }
}
