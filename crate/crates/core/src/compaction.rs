//! Energy-compaction anti-aliasing masks: per output bin, pass exactly the
//! alias with the largest value of a per-bin merit ratio, blocking the
//! other M−1. The resulting binary mask is aliasing-free by construction.

use crate::error::{Error, Result};
use crate::filter::BandMask;
use crate::model::DecimationModel;
use crate::spectrum::Spectrum;

/// A binary, aliasing-free mask together with the winning alias index per
/// output bin.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactionResult {
    mask: BandMask,
    winner_index: Vec<usize>,
}

impl CompactionResult {
    /// The binary mask (gain 1 at each winner, 0 elsewhere).
    #[inline]
    pub fn mask(&self) -> &BandMask {
        &self.mask
    }

    /// For each output bin j, the alias index k ∈ 0..m whose input bin
    /// (j + k·n/m) mod n carries gain 1.
    #[inline]
    pub fn winner_index(&self) -> &[usize] {
        &self.winner_index
    }

    #[inline]
    pub fn into_mask(self) -> BandMask {
        self.mask
    }
}

/// Builds the compaction mask for a merit ratio: for each output bin j the
/// alias bin with the strictly largest ratio value wins; ties go to the
/// smallest alias index k, making the constant-ratio case select the low
/// band everywhere.
pub fn compaction_mask(ratio: &Spectrum, m: usize) -> Result<CompactionResult> {
    let grid = ratio.grid();
    let n = grid.len();
    if m == 0 || n % m != 0 {
        return Err(Error::Divisibility {
            n,
            divisor: m,
            context: "compaction mask alias sets",
        });
    }
    let values = ratio.values();
    let n_out = n / m;
    let mut gains = vec![0.0; n];
    let mut winner_index = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let aliases = grid.alias_bins(m, j)?;
        let mut best_k = 0;
        for (k, &bin) in aliases.iter().enumerate().skip(1) {
            if values[bin] > values[aliases[best_k]] {
                best_k = k;
            }
        }
        gains[aliases[best_k]] = 1.0;
        winner_index.push(best_k);
    }
    Ok(CompactionResult {
        mask: BandMask::new(grid, gains)?,
        winner_index,
    })
}

/// The general-model merit ratio |S_sx|²/(S_s·S_x − |S_sx|²).
///
/// Bins with vanishing cross spectrum score 0 regardless of the
/// denominator; everywhere else the regularity condition
/// S_s·S_x − |S_sx|² > 0 is enforced.
pub fn theorem2_ratio(model: &DecimationModel) -> Result<Spectrum> {
    let s_s = model.signal_psd().values();
    let observation = model.observation_psd();
    let s_x = observation.values();
    let cross_sq = model.cross_sq();
    let mut values = vec![0.0; s_s.len()];
    for (k, v) in values.iter_mut().enumerate() {
        let c2 = cross_sq[k];
        if c2 == 0.0 {
            continue;
        }
        let den = s_s[k] * s_x[k] - c2;
        if den <= 0.0 {
            return Err(Error::RegularityViolation { bin: k, value: den });
        }
        *v = c2 / den;
    }
    Spectrum::from_values(model.grid(), values)
}

/// The additive-noise merit ratio S_s/S_n (pointwise), requiring strictly
/// positive noise density.
pub fn snr_ratio(s_s: &Spectrum, s_n: &Spectrum) -> Result<Spectrum> {
    crate::grid::require_same_grid(s_s.grid(), s_n.grid())?;
    let mut values = vec![0.0; s_s.grid().len()];
    for (k, v) in values.iter_mut().enumerate() {
        let den = s_n.values()[k];
        if den <= 0.0 {
            return Err(Error::DivisionByZero {
                bin: k,
                context: "noise density in the SNR ratio",
            });
        }
        *v = s_s.values()[k] / den;
    }
    Spectrum::from_values(s_s.grid(), values)
}
