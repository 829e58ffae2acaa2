//! Quadrature helpers for logarithmic spectral integrals.
//!
//! Rate and entropy integrands contain ln S(θ) terms, and several spectra of
//! interest touch zero at isolated grid bins (e.g. |1+e^{-jθ}|² at θ = π).
//! Such points are integrable log singularities of measure zero, while a zero
//! that spans adjacent bins represents a zero *band* and makes the integral
//! genuinely −∞. The helpers here implement that distinction once so every
//! caller treats singular bins identically.

/// Floor inserted under ln() to guard against subnormal garbage.
const LOG_FLOOR: f64 = 1e-300;

/// Mean of ln(values) over the grid, i.e. (1/2π)∫ln f dθ by the rectangle
/// rule, with the isolated-zero policy:
///
/// * a zero bin whose two circular neighbors are nonzero is treated as a
///   simple quadratic zero of the underlying function; its cell is scored at
///   the half-bin offsets, which for a quadratic zero equals
///   ln(√(f[k−1]·f[k+1]) / 4). The residual quadrature error is O(ln n / n).
/// * a zero bin adjacent to another zero bin is a positive-measure zero set:
///   the integral is −∞ (returned as a value, not an error).
pub(crate) fn log_mean(values: &[f64]) -> f64 {
    let n = values.len();
    debug_assert!(n > 0);
    let mut sum = 0.0;
    for k in 0..n {
        let v = values[k];
        if v > 0.0 {
            sum += v.max(LOG_FLOOR).ln();
        } else {
            let left = values[(k + n - 1) % n];
            let right = values[(k + 1) % n];
            if left <= 0.0 || right <= 0.0 {
                return f64::NEG_INFINITY;
            }
            // Half-bin-offset score for an isolated quadratic zero:
            // f(θ_k ± π/n) ≈ f(θ_k ± 2π/n) / 4.
            sum += 0.5 * (left.max(LOG_FLOOR).ln() + right.max(LOG_FLOOR).ln()) - (4.0_f64).ln();
        }
    }
    sum / (n as f64)
}

/// Replaces isolated NaN entries (degenerate bins of removable measure-zero
/// singularities) by the average of their circular neighbors.
///
/// Returns `Err(bin)` with the first offending bin if a NaN has a NaN
/// neighbor — a positive-measure degeneracy the caller must turn into its
/// operation-specific error.
pub(crate) fn repair_isolated_nans(values: &mut [f64]) -> Result<(), usize> {
    let n = values.len();
    let bad: Vec<usize> = (0..n).filter(|&k| values[k].is_nan()).collect();
    for &k in &bad {
        let left = values[(k + n - 1) % n];
        let right = values[(k + 1) % n];
        if left.is_nan() || right.is_nan() {
            return Err(k);
        }
        values[k] = 0.5 * (left + right);
    }
    Ok(())
}
