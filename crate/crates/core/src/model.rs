//! Joint second-order model of a hidden signal and its observed process.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{require_same_grid, FrequencyGrid};
use crate::spectrum::{CrossSpectrum, Spectrum};

/// Relative slack allowed on the per-bin Cauchy-Schwarz bound
/// |S_sx|² ≤ S_s·S_x before a model is rejected.
const CS_REL_TOL: f64 = 1e-12;

/// How the observed process relates to the hidden signal.
#[derive(Debug, Clone, PartialEq)]
enum Observation {
    /// X = S + N with N independent of S: S_x = S_s + S_n, S_sx = S_s.
    Additive { noise: Spectrum },
    /// Arbitrary jointly stationary pair given by S_x and S_sx.
    General {
        observation: Spectrum,
        cross: CrossSpectrum,
    },
}

/// A hidden stationary Gaussian signal S observed through a jointly
/// stationary Gaussian process X, to be decimated by a factor `m`:
/// the observation is filtered and every m-th sample kept.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimationModel {
    signal: Spectrum,
    observation: Observation,
    m: usize,
}

impl DecimationModel {
    /// Signal-plus-independent-noise observation, X = S + N.
    pub fn additive(signal: Spectrum, noise: Spectrum, m: usize) -> Result<Self> {
        require_same_grid(signal.grid(), noise.grid())?;
        FrequencyGrid::for_decimation(signal.grid().len(), m)?;
        Self::check_m(m)?;
        Ok(Self {
            signal,
            observation: Observation::Additive { noise },
            m,
        })
    }

    /// General jointly stationary observation with explicit S_x and S_sx.
    /// Validates the per-bin Cauchy-Schwarz bound |S_sx|² ≤ S_s·S_x.
    pub fn general(
        signal: Spectrum,
        observation: Spectrum,
        cross: CrossSpectrum,
        m: usize,
    ) -> Result<Self> {
        require_same_grid(signal.grid(), observation.grid())?;
        require_same_grid(signal.grid(), cross.grid())?;
        FrequencyGrid::for_decimation(signal.grid().len(), m)?;
        Self::check_m(m)?;
        for (k, c) in cross.values().iter().enumerate() {
            let cross_sq = c.norm_sqr();
            let bound = signal.values()[k] * observation.values()[k];
            if cross_sq > bound * (1.0 + CS_REL_TOL) + 1e-300 {
                return Err(Error::CauchySchwarz {
                    bin: k,
                    cross_sq,
                    bound,
                });
            }
        }
        Ok(Self {
            signal,
            observation: Observation::General { observation, cross },
            m,
        })
    }

    fn check_m(m: usize) -> Result<()> {
        if m < 2 {
            return Err(Error::Range {
                name: "m",
                value: m as f64,
                requirement: "decimation factor must be at least 2",
            });
        }
        Ok(())
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn grid(&self) -> FrequencyGrid {
        self.signal.grid()
    }

    #[inline]
    pub fn signal_psd(&self) -> &Spectrum {
        &self.signal
    }

    /// Noise PSD when the model is additive; `None` for general models.
    pub fn noise_psd(&self) -> Option<&Spectrum> {
        match &self.observation {
            Observation::Additive { noise } => Some(noise),
            Observation::General { .. } => None,
        }
    }

    /// PSD of the observed process X (S_s + S_n for additive models).
    pub fn observation_psd(&self) -> Spectrum {
        match &self.observation {
            Observation::Additive { noise } => {
                let values = self
                    .signal
                    .values()
                    .iter()
                    .zip(noise.values())
                    .map(|(s, n)| s + n)
                    .collect();
                Spectrum::from_values(self.grid(), values)
                    .expect("sum of two valid PSDs is a valid PSD")
            }
            Observation::General { observation, .. } => observation.clone(),
        }
    }

    /// Cross spectral density S_sx (equal to S_s for additive models).
    pub fn cross_spectrum(&self) -> CrossSpectrum {
        match &self.observation {
            Observation::Additive { .. } => CrossSpectrum::from_real_even(&self.signal),
            Observation::General { cross, .. } => cross.clone(),
        }
    }

    /// |S_sx(θ_k)|² per bin without materializing the complex array twice.
    pub fn cross_sq(&self) -> Vec<f64> {
        match &self.observation {
            Observation::Additive { .. } => {
                self.signal.values().iter().map(|s| s * s).collect()
            }
            Observation::General { cross, .. } => cross.magnitude_squared(),
        }
    }

    /// A copy of the model with the white-noise variance replaced; only valid
    /// for additive models whose noise is white (used by parameter sweeps).
    pub fn with_white_noise(&self, variance: f64) -> Result<Self> {
        match &self.observation {
            Observation::Additive { .. } => Ok(Self {
                signal: self.signal.clone(),
                observation: Observation::Additive {
                    noise: Spectrum::white(self.grid(), variance)?,
                },
                m: self.m,
            }),
            Observation::General { .. } => Err(Error::Precondition(
                "noise sweeps require an additive model".into(),
            )),
        }
    }
}

/// Convenience constructor for the complex cross spectrum of a real pair.
pub fn cross_from_real(grid: FrequencyGrid, values: Vec<f64>) -> Result<CrossSpectrum> {
    CrossSpectrum::from_values(
        grid,
        values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    )
}
