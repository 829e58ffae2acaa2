//! Shared input builders for the benchmark suite.

use decirate_core::{BandMask, DecimationModel, FirFilter, FrequencyGrid, Spectrum};

/// The running-example model: S_s = 1 + cosθ observed in white noise.
pub fn example_model(n: usize, sigma2: f64, m: usize) -> DecimationModel {
    let grid = FrequencyGrid::for_decimation(n, m).expect("benchmark grid");
    let signal = Spectrum::from_autocorr(grid, &[1.0, 0.5]).expect("benchmark signal");
    let noise = Spectrum::white(grid, sigma2).expect("benchmark noise");
    DecimationModel::additive(signal, noise, m).expect("benchmark model")
}

/// |H|² of the two-tap boxcar h = [1, 1] on the model's grid.
pub fn boxcar_mask(model: &DecimationModel) -> BandMask {
    FirFilter::new(vec![1.0, 1.0])
        .expect("boxcar taps")
        .magnitude_squared(model.grid())
        .expect("boxcar mask")
}
