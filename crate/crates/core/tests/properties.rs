//! Randomized invariants: structural facts that must hold for *every*
//! admissible input, checked with generated cases and shrinking.

use decirate_core::rng::Xoshiro256StarStar;
use decirate_core::*;
use proptest::prelude::*;

/// Builds a strictly positive PSD from unconstrained lag weights by scaling
/// the off-lag mass below the zero-lag term.
fn psd_from_raw(grid: FrequencyGrid, raw: &[f64], floor: f64) -> Spectrum {
    let mass: f64 = raw.iter().map(|a| a.abs()).sum();
    let scale = if mass > 0.0 { 0.5 / mass } else { 0.0 };
    let mut r = Vec::with_capacity(raw.len() + 1);
    r.push(1.0 + floor);
    r.extend(raw.iter().map(|a| a * scale));
    Spectrum::from_autocorr(grid, &r).unwrap()
}

fn fir_mask(grid: FrequencyGrid, taps: &[f64]) -> BandMask {
    FirFilter::new(taps.to_vec())
        .unwrap()
        .magnitude_squared(grid)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alias_bins_partition_the_grid(q in 1usize..32, m in 2usize..6) {
        let n = 2 * m * q;
        let grid = FrequencyGrid::for_decimation(n, m).unwrap();
        let mut seen = vec![0u32; n];
        for j in 0..n / m {
            for k in grid.alias_bins(m, j).unwrap() {
                seen[k] += 1;
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn relative_loss_never_below_structural_bound(
        l in 1usize..9,
        m in 2usize..5,
        bits in prop::collection::vec(any::<bool>(), 36),
    ) {
        let pass = bits[..l * m].to_vec();
        let mask = RationalBandMask::new(l, m, pass).unwrap();
        let result = relative_loss_rate(&mask);
        let bound = LossFraction::new((m - 1) as u64, m as u64).unwrap();
        prop_assert!(result.loss >= bound);
        prop_assert!(result.surviving_groups <= l);
    }

    #[test]
    fn filtering_and_decimation_cannot_create_information(
        raw_s in prop::collection::vec(-1.0f64..1.0, 3),
        raw_n in prop::collection::vec(-1.0f64..1.0, 2),
        taps in prop::collection::vec(-1.5f64..1.5, 2),
        m in 2usize..5,
    ) {
        let grid = FrequencyGrid::new(240).unwrap();
        let signal = psd_from_raw(grid, &raw_s, 0.05);
        let noise = psd_from_raw(grid, &raw_n, 0.05);
        let model = DecimationModel::additive(signal, noise, m).unwrap();
        let mut h = vec![1.0];
        h.extend(&taps);
        let report = relevant_loss_rate(&model, &fir_mask(grid, &h)).unwrap();
        prop_assert!(report.mi_rate_input.is_finite());
        prop_assert!(report.mi_rate_output <= report.mi_rate_input + 1e-12);
        prop_assert!(report.relevant_loss >= -1e-12);
    }

    #[test]
    fn rate_routes_agree_on_additive_models(
        raw_s in prop::collection::vec(-1.0f64..1.0, 3),
        raw_n in prop::collection::vec(-1.0f64..1.0, 2),
        taps in prop::collection::vec(-1.5f64..1.5, 2),
        m in 2usize..5,
    ) {
        let grid = FrequencyGrid::new(240).unwrap();
        let signal = psd_from_raw(grid, &raw_s, 0.05);
        let noise = psd_from_raw(grid, &raw_n, 0.05);
        let model = DecimationModel::additive(signal, noise, m).unwrap();
        let mut h = vec![1.0];
        h.extend(&taps);
        let mask = fir_mask(grid, &h);
        let snr = mi_rate_blocked_snr(&model, &mask).unwrap();
        let mat = mi_rate_blocked_matrix(&model, &mask).unwrap();
        prop_assert!((snr - mat).abs() < 1e-9, "snr {} matrix {}", snr, mat);
    }

    #[test]
    fn compaction_winner_dominates_its_aliases(
        raw in prop::collection::vec(-1.0f64..1.0, 4),
        m in 2usize..5,
    ) {
        let grid = FrequencyGrid::new(240).unwrap();
        let ratio = psd_from_raw(grid, &raw, 0.01);
        let result = compaction_mask(&ratio, m).unwrap();
        for (j, &slot) in result.winner_index().iter().enumerate() {
            let aliases = grid.alias_bins(m, j).unwrap();
            let winner = aliases[slot];
            for k in aliases {
                prop_assert!(ratio.values()[winner] >= ratio.values()[k]);
                let expect = if k == winner { 1.0 } else { 0.0 };
                prop_assert!(result.mask().gains()[k] == expect);
            }
        }
    }

    #[test]
    fn edge_bounds_are_ordered_and_respect_the_floor(
        cuts in prop::collection::vec(0.0f64..1.0, 3),
        l in 1usize..8,
        m in 2usize..5,
    ) {
        let mut edges: Vec<f64> = cuts
            .iter()
            .map(|c| c * std::f64::consts::PI)
            .collect();
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (lower, upper) = irrational_edge_bounds(&edges, m, l).unwrap();
        prop_assert!(lower.loss <= upper.loss);
        let bound = LossFraction::new((m - 1) as u64, m as u64).unwrap();
        prop_assert!(lower.loss >= bound);
        prop_assert!(upper.loss <= LossFraction::new(1, 1).unwrap());
    }

    #[test]
    fn psd_lag_roundtrip(raw in prop::collection::vec(-1.0f64..1.0, 4)) {
        let grid = FrequencyGrid::new(256).unwrap();
        let psd = psd_from_raw(grid, &raw, 0.05);
        let mass: f64 = raw.iter().map(|a| a.abs()).sum();
        let scale = if mass > 0.0 { 0.5 / mass } else { 0.0 };
        let lags = psd.autocorr(raw.len()).unwrap();
        prop_assert!((lags[0] - 1.05).abs() < 1e-9);
        for (have, want) in lags[1..].iter().zip(raw.iter().map(|a| a * scale)) {
            prop_assert!((have - want).abs() < 1e-9);
        }
    }

    #[test]
    fn decimation_shifts_by_one_when_input_shifts_by_m(
        x in prop::collection::vec(-2.0f64..2.0, 24),
        taps in prop::collection::vec(-1.0f64..1.0, 3),
        m in 2usize..4,
    ) {
        let len = 24 - 24 % m;
        let x = &x[..len];
        let h = FirFilter::new(taps.to_vec());
        prop_assume!(h.is_ok());
        let h = h.unwrap();
        let shifted: Vec<f64> = (0..len)
            .map(|t| x[(t + len - m) % len])
            .collect();
        let y = decimate(x, &h, m).unwrap();
        let y_shifted = decimate(&shifted, &h, m).unwrap();
        for i in 0..y.len() {
            let expect = y[(i + y.len() - 1) % y.len()];
            prop_assert!((y_shifted[i] - expect).abs() < 1e-12);
        }
    }
}

/// Exhaustive neighbourhood audit of the coordinate-descent optimum: no
/// point of a dense 2-D grid around the reported coefficients may achieve a
/// lower Gaussian-bound loss.
#[test]
fn optimizer_survives_dense_grid_audit() {
    let grid = FrequencyGrid::for_decimation(480, 3).unwrap();
    let signal = Spectrum::from_autocorr(grid, &[1.0, 0.5]).unwrap();
    let noise = Spectrum::white(grid, 1.0).unwrap();
    let model = DecimationModel::additive(signal, noise, 3).unwrap();
    let result = optimize_fir(2, &model, OptimizeOptions::default()).unwrap();
    let c = result.coeffs.coeffs().to_vec();

    let mut best_grid = f64::INFINITY;
    let steps = 121;
    for i in 0..steps {
        let c1 = c[1] - 0.06 + 0.001 * i as f64;
        for j in 0..steps {
            let c2 = c[2] - 0.06 + 0.001 * j as f64;
            let candidate = FirFilter::new(vec![1.0, c1, c2]).unwrap();
            let loss = gaussian_bound_loss(&candidate, &model).unwrap();
            if loss < best_grid {
                best_grid = loss;
            }
        }
    }
    assert!(
        result.loss <= best_grid + 1e-9,
        "optimizer {} vs dense grid {}",
        result.loss,
        best_grid
    );
}

/// The finite-window rate must approach the spectral rate from the short
/// side monotonically in the window length for the running example.
#[test]
fn finite_window_rate_converges_with_window_length() {
    let grid = FrequencyGrid::for_decimation(2048, 2).unwrap();
    let signal = Spectrum::from_autocorr(grid, &[1.0, 0.5]).unwrap();
    let noise = Spectrum::white(grid, 1.0).unwrap();
    let model = DecimationModel::additive(signal, noise, 2).unwrap();
    let h = FirFilter::new(vec![1.0, 1.0]).unwrap();
    let mask = h.magnitude_squared(grid).unwrap();
    let spectral = mi_rate_blocked_snr(&model, &mask).unwrap();

    let mut previous_gap = f64::INFINITY;
    for n in [32usize, 128, 512] {
        let oracle = mi_rate_finite_n(&model, &h, n).unwrap();
        let gap = (oracle - spectral).abs();
        assert!(gap < previous_gap, "gap grew at n = {n}: {gap}");
        previous_gap = gap;
    }
    assert!(previous_gap / spectral < 0.01);
}

/// Byte-level determinism of the full Monte-Carlo path: same seed, same
/// report; different seed, different samples.
#[test]
fn monte_carlo_path_is_reproducible() {
    let grid = FrequencyGrid::for_decimation(256, 2).unwrap();
    let signal = Spectrum::from_autocorr(grid, &[1.0, 0.4]).unwrap();
    let noise = Spectrum::white(grid, 0.5).unwrap();
    let model = DecimationModel::additive(signal.clone(), noise, 2).unwrap();
    let h = FirFilter::new(vec![1.0, 0.7]).unwrap();

    let a = empirical_check(&model, &h, 1 << 14, 7).unwrap();
    let b = empirical_check(&model, &h, 1 << 14, 7).unwrap();
    assert_eq!(
        a.rms_relative_deviation.to_bits(),
        b.rms_relative_deviation.to_bits()
    );

    let x1 = synthesize_gaussian(&signal, 4096, 7).unwrap();
    let x2 = synthesize_gaussian(&signal, 4096, 8).unwrap();
    assert_ne!(x1.samples, x2.samples);
}

/// Splitting the tie-break: a ratio that is exactly alias-symmetric must
/// route every output bin to its lowest-index alias.
#[test]
fn compaction_tie_break_is_deterministic() {
    let grid = FrequencyGrid::new(64).unwrap();
    let ratio = Spectrum::white(grid, 3.5).unwrap();
    for m in [2usize, 4] {
        let result = compaction_mask(&ratio, m).unwrap();
        for (j, &slot) in result.winner_index().iter().enumerate() {
            let aliases = grid.alias_bins(m, j).unwrap();
            assert_eq!(slot, 0, "tie must keep the first alias");
            assert_eq!(aliases[slot], *aliases.iter().min().unwrap());
        }
    }
}

/// Fuzz the degenerate-input guards: they must return structured errors,
/// never panic.
#[test]
fn degenerate_inputs_produce_structured_errors() {
    let grid = FrequencyGrid::new(64).unwrap();
    let flat = Spectrum::white(grid, 1.0).unwrap();

    assert!(matches!(
        FrequencyGrid::for_decimation(62, 4),
        Err(Error::Divisibility { .. })
    ));
    assert!(matches!(
        snr_ratio(&flat, &Spectrum::white(grid, 0.0).unwrap()),
        Err(Error::DivisionByZero { .. })
    ));
    assert!(matches!(
        RationalBandMask::new(2, 3, vec![true; 5]),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(matches!(
        FirFilter::new(vec![1.0, f64::NAN]),
        Err(Error::Precondition(_))
    ));
    let mut rng = Xoshiro256StarStar::seed_from(3);
    let noisy: Vec<f64> = (0..64).map(|_| rng.next_f64() - 2.0).collect();
    assert!(Spectrum::from_values(grid, noisy).is_err());
}
