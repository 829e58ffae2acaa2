//! Experiment configuration: JSON schema, filter-string grammar, and the
//! translation into core model objects.

use std::path::Path;

use decirate_core::{DecimationModel, FilterChoice, FrequencyGrid, Spectrum, SweepAxis};
use serde::Deserialize;

use crate::Failure;

/// Top-level experiment file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(alias = "M")]
    pub m: usize,
    /// Frequency grid size; falls back to the global `--grid` flag.
    pub grid_size: Option<usize>,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub filters: Vec<String>,
    /// Figure mode for `sweep`: `fig3` (loss curves; fig5 is the same mode
    /// with M=3), `fig4` (order-2 coefficients), `fig6` (forced-√2 penalty).
    pub mode: Option<String>,
    pub output: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub signal: PsdSpec,
    /// Defaults to white noise of unit variance when omitted.
    pub noise: Option<PsdSpec>,
}

/// A power spectral density in one of three encodings.
#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum PsdSpec {
    /// Trigonometric polynomial given by its autocorrelation lags
    /// r0, r1, …: S(θ) = r0 + 2·Σ rd·cos(dθ).
    #[serde(rename = "trigpoly")]
    TrigPoly { r: Vec<f64> },
    /// Flat spectrum of the given variance.
    #[serde(rename = "white")]
    White { variance: f64 },
    /// Explicit nonnegative samples on a uniform grid over [0, 2π);
    /// resampled to the working grid when the lengths differ.
    #[serde(rename = "grid")]
    Grid { values: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Only `ten_ln_sigma2` is supported; that is also the default.
    pub axis: Option<String>,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            Failure::Config(format!(
                "config error in {} at line {} column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    /// The working grid size: explicit `grid_size` wins over the CLI flag.
    pub fn grid_size_or(&self, flag: usize) -> usize {
        self.grid_size.unwrap_or(flag)
    }

    /// Builds the additive observation model at the given grid size.
    /// `sigma2` overrides the configured noise with white noise.
    pub fn build_model(
        &self,
        grid_size: usize,
        sigma2: Option<f64>,
    ) -> Result<DecimationModel, Failure> {
        let grid = FrequencyGrid::for_decimation(grid_size, self.m)
            .map_err(|e| Failure::Config(format!("grid_size/M: {e}")))?;
        let signal = self.model.signal.build(grid)?;
        let noise = match (sigma2, &self.model.noise) {
            (Some(v), _) => Spectrum::white(grid, v)
                .map_err(|e| Failure::Config(format!("--sigma2: {e}")))?,
            (None, Some(spec)) => spec.build(grid)?,
            (None, None) => Spectrum::white(grid, 1.0).expect("unit variance is valid"),
        };
        DecimationModel::additive(signal, noise, self.m)
            .map_err(|e| Failure::Config(format!("model: {e}")))
    }

    pub fn sweep_axis(&self) -> Result<SweepAxis, Failure> {
        let spec = self
            .sweep
            .as_ref()
            .ok_or_else(|| Failure::Config("config field `sweep` is required".into()))?;
        if let Some(axis) = &spec.axis {
            if axis != "ten_ln_sigma2" {
                return Err(Failure::Config(format!(
                    "sweep.axis: unsupported axis `{axis}` (only ten_ln_sigma2)"
                )));
            }
        }
        SweepAxis::new(spec.start, spec.stop, spec.points)
            .map_err(|e| Failure::Config(format!("sweep: {e}")))
    }

    pub fn filter_choices(&self) -> Result<Vec<FilterChoice>, Failure> {
        self.filters.iter().map(|s| parse_filter(s)).collect()
    }
}

impl PsdSpec {
    pub fn build(&self, grid: FrequencyGrid) -> Result<Spectrum, Failure> {
        let config = |e| Failure::Config(format!("model PSD: {e}"));
        match self {
            PsdSpec::TrigPoly { r } => Spectrum::from_autocorr(grid, r).map_err(config),
            PsdSpec::White { variance } => Spectrum::white(grid, *variance).map_err(config),
            PsdSpec::Grid { values } => {
                let own = FrequencyGrid::new(values.len()).map_err(config)?;
                let s = Spectrum::from_values(own, values.clone()).map_err(config)?;
                if values.len() == grid.len() {
                    Ok(s)
                } else {
                    s.resample(grid).map_err(config)
                }
            }
        }
    }
}

/// Parses the filter grammar used in configs and `--filter` flags:
/// `none` | `ideal_lowpass` | `fir:[coeffs]` | `fir_opt:order` | `compaction`.
pub fn parse_filter(text: &str) -> Result<FilterChoice, Failure> {
    if let Some(rest) = text.strip_prefix("fir:") {
        let taps: Vec<f64> = serde_json::from_str(rest).map_err(|_| {
            Failure::Config(format!(
                "filter `{text}`: expected a JSON tap array, e.g. fir:[1,1]"
            ))
        })?;
        if taps.is_empty() {
            return Err(Failure::Config(format!("filter `{text}`: needs taps")));
        }
        return Ok(FilterChoice::Fir(taps));
    }
    if let Some(rest) = text.strip_prefix("fir_opt:") {
        let order: usize = rest.parse().map_err(|_| {
            Failure::Config(format!(
                "filter `{text}`: expected an integer order, e.g. fir_opt:2"
            ))
        })?;
        return Ok(FilterChoice::FirOpt(order));
    }
    match text {
        "none" => Ok(FilterChoice::NoFilter),
        "ideal_lowpass" => Ok(FilterChoice::IdealLowpass),
        "compaction" => Ok(FilterChoice::Compaction),
        _ => Err(Failure::Config(format!(
            "unknown filter `{text}`: expected none | ideal_lowpass | fir:[coeffs] | \
             fir_opt:order | compaction"
        ))),
    }
}
