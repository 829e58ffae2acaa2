//! Information rates, spectral compaction and filter design for decimation
//! systems: a stationary Gaussian signal is observed through noise, passed
//! through an anti-aliasing filter, and downsampled by an integer factor.
//!
//! The crate provides three independent computation routes for the relevant
//! information surviving decimation (a scalar coherence integral, a folded
//! SNR integral, and an alias-covariance matrix form), a finite-window
//! covariance oracle that validates them, exact rational loss accounting for
//! flat sub-band spectra, an FIR optimizer for the decimation-loss
//! objective, and a reproducible time-domain simulator.

mod error;
mod grid;
mod linalg;
mod quad;

pub mod compaction;
pub mod filter;
pub mod fir_design;
pub mod inforate;
pub mod model;
pub mod relative_loss;
pub mod rng;
pub mod simulate;
pub mod spectrum;
pub mod sweep;

pub use compaction::{compaction_mask, snr_ratio, theorem2_ratio, CompactionResult};
pub use error::{Error, Result};
pub use filter::{ideal_lowpass_mask, BandMask, FirFilter};
pub use fir_design::{
    eigen_compaction, gaussian_bound_loss, jensen_upper_bound, nyquist_m_check, optimize_fir,
    FirDesignResult, OptimizeOptions,
};
pub use grid::FrequencyGrid;
pub use inforate::{
    entropy_rate_gaussian, entropy_rate_through_filter, mi_rate_blocked_matrix,
    mi_rate_blocked_snr, mi_rate_finite_n, mi_rate_scalar, relevant_loss_rate, RateReport,
    HALF_LN_TWO_PI_E,
};
pub use model::{cross_from_real, DecimationModel};
pub use relative_loss::{
    irrational_edge_bounds, relative_loss_rate, subband_groups, LossFraction, RationalBandMask,
    RelativeLossResult,
};
pub use simulate::{
    decimate, empirical_check, synthesize_gaussian, welch_psd, EmpiricalReport, SampleRecord,
};
pub use spectrum::{CrossSpectrum, Spectrum};
pub use sweep::{
    sweep_extra_loss_sqrt2, sweep_losses, sweep_order2_coefficients, CoeffRow, ExtraLossRow,
    FilterChoice, LossRow, SweepAxis,
};
