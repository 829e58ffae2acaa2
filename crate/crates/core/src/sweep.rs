//! Noise-variance sweep drivers: loss curves for a set of anti-aliasing
//! choices, optimal order-2 coefficient trajectories, and the extra loss of
//! the fixed √2 design, all on the 10·ln(σ²) axis.
//!
//! Sweep points are independent and evaluated in parallel; results are
//! returned in axis order, so output is identical for any thread count.

use rayon::prelude::*;

use crate::compaction::{compaction_mask, theorem2_ratio};
use crate::error::{Error, Result};
use crate::filter::{ideal_lowpass_mask, BandMask, FirFilter};
use crate::fir_design::{gaussian_bound_loss, optimize_fir, OptimizeOptions};
use crate::inforate::{mi_rate_blocked_snr, mi_rate_scalar};
use crate::model::DecimationModel;
use crate::spectrum::Spectrum;

/// An anti-aliasing filter selection for sweep experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterChoice {
    /// No filtering (all-pass mask).
    NoFilter,
    /// Ideal low-pass with cut-off π/M.
    IdealLowpass,
    /// Fixed FIR taps.
    Fir(Vec<f64>),
    /// FIR of the given order, re-optimized at every sweep point.
    FirOpt(usize),
    /// The optimal energy-compaction mask, rebuilt at every sweep point.
    Compaction,
}

impl FilterChoice {
    /// Column label used in CSV headers: `loss_<label>`.
    pub fn label(&self) -> String {
        match self {
            FilterChoice::NoFilter => "none".into(),
            FilterChoice::IdealLowpass => "ideal".into(),
            FilterChoice::Fir(c) => format!("fir{}", c.len().saturating_sub(1)),
            FilterChoice::FirOpt(order) => format!("firopt{order}"),
            FilterChoice::Compaction => "compaction".into(),
        }
    }
}

/// Uniform sweep over the 10·ln(σ²) axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::Range {
                name: "points",
                value: points as f64,
                requirement: "need finite endpoints and at least one point",
            });
        }
        Ok(Self { start, stop, points })
    }

    /// The axis used by the figure sweep modes: −20 to 10, 61 points.
    pub fn figure_default() -> Self {
        Self {
            start: -20.0,
            stop: 10.0,
            points: 61,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + i as f64 * step).collect()
    }
}

/// One sweep point of a loss experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub ten_ln_sigma2: f64,
    pub sigma2: f64,
    /// M·Ī(S;X), the information available before downsampling.
    pub available_info: f64,
    /// Loss per filter, ordered as the `filters` argument.
    pub losses: Vec<f64>,
}

/// One sweep point of the order-2 coefficient experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffRow {
    pub ten_ln_sigma2: f64,
    pub sigma2: f64,
    pub c1_opt: f64,
    pub c2_opt: f64,
    pub c1_minus_sqrt2: f64,
}

/// One sweep point of the forced-√2 comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtraLossRow {
    pub ten_ln_sigma2: f64,
    pub sigma2: f64,
    pub extra_loss_sqrt2: f64,
}

fn model_at(signal: &Spectrum, m: usize, sigma2: f64) -> Result<DecimationModel> {
    let noise = Spectrum::white(signal.grid(), sigma2)?;
    DecimationModel::additive(signal.clone(), noise, m)
}

fn mask_for(choice: &FilterChoice, model: &DecimationModel) -> Result<Option<BandMask>> {
    let grid = model.grid();
    Ok(match choice {
        FilterChoice::NoFilter => Some(BandMask::all_pass(grid)),
        FilterChoice::IdealLowpass => Some(ideal_lowpass_mask(grid, model.m())?),
        FilterChoice::Fir(taps) => {
            Some(FirFilter::new(taps.clone())?.magnitude_squared(grid)?)
        }
        FilterChoice::Compaction => {
            Some(compaction_mask(&theorem2_ratio(model)?, model.m())?.into_mask())
        }
        FilterChoice::FirOpt(_) => None,
    })
}

/// Loss curves: for every axis value v, builds the additive model with
/// white noise σ² = exp(v/10) and evaluates the relevant loss of each
/// filter choice.
pub fn sweep_losses(
    signal: &Spectrum,
    m: usize,
    filters: &[FilterChoice],
    axis: &SweepAxis,
) -> Result<Vec<LossRow>> {
    axis.values()
        .par_iter()
        .map(|&v| {
            let sigma2 = (v / 10.0).exp();
            let model = model_at(signal, m, sigma2)?;
            let observation = model.observation_psd();
            let available_info = m as f64
                * mi_rate_scalar(model.signal_psd(), &observation, &model.cross_sq())?;
            let mut losses = Vec::with_capacity(filters.len());
            for choice in filters {
                let loss = match mask_for(choice, &model)? {
                    Some(mask) => available_info - mi_rate_blocked_snr(&model, &mask)?,
                    None => {
                        let order = match choice {
                            FilterChoice::FirOpt(order) => *order,
                            _ => unreachable!("only FirOpt lacks a direct mask"),
                        };
                        optimize_fir(order, &model, OptimizeOptions::default())?.loss
                    }
                };
                losses.push(loss);
            }
            Ok(LossRow {
                ten_ln_sigma2: v,
                sigma2,
                available_info,
                losses,
            })
        })
        .collect()
}

/// Optimal order-2 coefficient trajectories for the given signal and M.
pub fn sweep_order2_coefficients(
    signal: &Spectrum,
    m: usize,
    axis: &SweepAxis,
) -> Result<Vec<CoeffRow>> {
    axis.values()
        .par_iter()
        .map(|&v| {
            let sigma2 = (v / 10.0).exp();
            let model = model_at(signal, m, sigma2)?;
            let result = optimize_fir(2, &model, OptimizeOptions::default())?;
            let c1 = result.coeffs.coeffs()[1];
            let c2 = result.coeffs.coeffs()[2];
            Ok(CoeffRow {
                ten_ln_sigma2: v,
                sigma2,
                c1_opt: c1,
                c2_opt: c2,
                c1_minus_sqrt2: c1 - std::f64::consts::SQRT_2,
            })
        })
        .collect()
}

/// Extra loss incurred by fixing the order-2 filter to [1, √2, 1] instead
/// of optimizing both coefficients.
pub fn sweep_extra_loss_sqrt2(
    signal: &Spectrum,
    m: usize,
    axis: &SweepAxis,
) -> Result<Vec<ExtraLossRow>> {
    let forced = FirFilter::new(vec![1.0, std::f64::consts::SQRT_2, 1.0])?;
    axis.values()
        .par_iter()
        .map(|&v| {
            let sigma2 = (v / 10.0).exp();
            let model = model_at(signal, m, sigma2)?;
            let forced_loss = gaussian_bound_loss(&forced, &model)?;
            let optimal = optimize_fir(2, &model, OptimizeOptions::default())?;
            Ok(ExtraLossRow {
                ten_ln_sigma2: v,
                sigma2,
                extra_loss_sqrt2: forced_loss - optimal.loss,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FrequencyGrid;

    fn section_signal(n: usize) -> Spectrum {
        Spectrum::from_autocorr(FrequencyGrid::new(n).unwrap(), &[1.0, 0.5]).unwrap()
    }

    #[test]
    fn axis_endpoints_and_count() {
        let axis = SweepAxis::figure_default();
        let v = axis.values();
        assert_eq!(v.len(), 61);
        assert_eq!(v[0], -20.0);
        assert_eq!(*v.last().unwrap(), 10.0);
        assert!((v[1] - v[0] - 0.5).abs() < 1e-12);

        let single = SweepAxis::new(3.0, 9.0, 1).unwrap();
        assert_eq!(single.values(), vec![3.0]);
        assert!(SweepAxis::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn loss_rows_reproduce_known_point() {
        // σ² = 1 point of the published M = 2 example.
        let signal = section_signal(4096);
        let axis = SweepAxis::new(0.0, 0.0, 1).unwrap();
        let filters = [
            FilterChoice::IdealLowpass,
            FilterChoice::Fir(vec![1.0, 1.0]),
            FilterChoice::NoFilter,
        ];
        let rows = sweep_losses(&signal, 2, &filters, &axis).unwrap();
        let row = &rows[0];
        let expect_available = ((2.0 + 3.0f64.sqrt()) / 2.0).ln();
        assert!((row.available_info - expect_available).abs() < 1e-6);
        assert!((row.losses[0] - 0.142_650_313).abs() < 1e-6, "ideal {}", row.losses[0]);
        assert!((row.losses[1] - 0.170_742_062).abs() < 1e-6, "fir {}", row.losses[1]);
        assert!((row.losses[2] - 0.277_237_126).abs() < 1e-6, "none {}", row.losses[2]);
    }

    #[test]
    fn parallel_sweep_is_order_stable() {
        let signal = section_signal(256);
        let axis = SweepAxis::new(-4.0, 4.0, 9).unwrap();
        let filters = [FilterChoice::NoFilter, FilterChoice::Compaction];
        let a = sweep_losses(&signal, 2, &filters, &axis).unwrap();
        let b = sweep_losses(&signal, 2, &filters, &axis).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
        for (row, v) in a.iter().zip(axis.values()) {
            assert_eq!(row.ten_ln_sigma2, v);
        }
    }

    #[test]
    fn filter_labels() {
        assert_eq!(FilterChoice::NoFilter.label(), "none");
        assert_eq!(FilterChoice::IdealLowpass.label(), "ideal");
        assert_eq!(FilterChoice::Fir(vec![1.0, 1.0]).label(), "fir1");
        assert_eq!(FilterChoice::FirOpt(2).label(), "firopt2");
        assert_eq!(FilterChoice::Compaction.label(), "compaction");
    }

    #[test]
    fn extra_loss_of_forced_sqrt2_is_small_and_nonnegative() {
        let signal = section_signal(480);
        let axis = SweepAxis::new(0.0, 10.0, 2).unwrap();
        let rows = sweep_extra_loss_sqrt2(&signal, 3, &axis).unwrap();
        for row in rows {
            assert!(row.extra_loss_sqrt2 > -1e-9, "at {}", row.ten_ln_sigma2);
            assert!(row.extra_loss_sqrt2 < 5e-3, "at {}", row.ten_ln_sigma2);
        }
    }
}
