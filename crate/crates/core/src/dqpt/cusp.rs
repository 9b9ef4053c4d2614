//! Cusp detection on rate-function series.
//!
//! The statistic is the centered second difference normalized by the grid
//! spacing, `s_i = |G_{i+1} − 2G_i + G_{i−1}|/Δt`: for a slope jump J it
//! approaches |J|, while smooth curvature contributes only O(G''·Δt). A point
//! is a cusp when its statistic is the maximum within `window` points and
//! exceeds the threshold
//! `max(median_factor × median(s), SLOPE_SCALE_FRACTION × slope scale)`,
//! where the slope scale is half the spread of the first differences. The
//! median term rejects grid-level noise; the slope floor demands a slope
//! jump comparable to the series' own slope range, which separates true
//! kinks (statistic ≈ |J|, independent of Δt) from smooth bumps (statistic
//! ∝ Δt). Both terms, the statistic and the detector are invariant under
//! adding a constant or a linear-in-t term. Calibrated on the synthetic
//! |t − 1| kink: the kink fires at ratio 2 against the slope floor while a
//! parabola stays an order of magnitude below it.

use crate::error::{Error, Result};

/// Fraction of the series' slope scale a second-difference peak must exceed.
pub const SLOPE_SCALE_FRACTION: f64 = 0.25;

/// Detector output: cusp times plus the full statistic series.
#[derive(Debug, Clone)]
pub struct CuspReport {
    /// Detected cusp times, ascending.
    pub times: Vec<f64>,
    /// Grid indices of the detections.
    pub indices: Vec<usize>,
    /// `s_i` for interior points i = 1 … n−2 (aligned with `times[1..n-1]`).
    pub statistic: Vec<f64>,
    /// Threshold actually applied.
    pub threshold: f64,
}

fn check_uniform(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::domain("series too short for cusp detection"));
    }
    let dt = times[1] - times[0];
    if dt <= 0.0 {
        return Err(Error::domain("time grid must be increasing"));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::domain("cusp detection requires a uniform grid"));
        }
    }
    Ok(dt)
}

/// Second-difference statistic `|Δ²G|/Δt` at interior grid points.
pub fn cusp_statistic(times: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let dt = check_uniform(times)?;
    if values.len() != times.len() {
        return Err(Error::dimension("values and times differ in length"));
    }
    Ok((1..times.len() - 1)
        .map(|i| {
            let d2 = values[i + 1] - 2.0 * values[i] + values[i - 1];
            if d2.is_finite() {
                d2.abs() / dt
            } else {
                0.0
            }
        })
        .collect())
}

/// Runs the detector. `window` is the one-sided local-max neighborhood (in
/// grid points); the threshold is `median_factor` times the median statistic.
pub fn detect_cusps(
    times: &[f64],
    values: &[f64],
    window: usize,
    median_factor: f64,
) -> Result<CuspReport> {
    let stat = cusp_statistic(times, values)?;
    if window == 0 || 2 * window + 1 > stat.len() {
        return Err(Error::domain(format!(
            "window {window} does not fit a series of {} interior points",
            stat.len()
        )));
    }
    let mut sorted = stat.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let dt = times[1] - times[0];
    let slopes: Vec<f64> = values
        .windows(2)
        .map(|w| (w[1] - w[0]) / dt)
        .filter(|s| s.is_finite())
        .collect();
    let slope_scale = if slopes.is_empty() {
        0.0
    } else {
        let max = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
        (max - min) / 2.0
    };
    let threshold = (median_factor * median).max(SLOPE_SCALE_FRACTION * slope_scale);

    let mut indices = Vec::new();
    let mut cusp_times = Vec::new();
    for i in 0..stat.len() {
        if stat[i] <= threshold {
            continue;
        }
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(stat.len() - 1);
        let mut is_max = true;
        for j in lo..=hi {
            if j == i {
                continue;
            }
            // Strictly dominated, or tied with an earlier point: not a peak.
            if stat[j] > stat[i] || (stat[j] == stat[i] && j < i) {
                is_max = false;
                break;
            }
        }
        if is_max {
            indices.push(i + 1); // interior offset
            cusp_times.push(times[i + 1]);
        }
    }
    Ok(CuspReport {
        times: cusp_times,
        indices,
        statistic: stat,
        threshold,
    })
}

/// Largest statistic within ±`window` grid points of time `t`.
pub fn statistic_near(times: &[f64], statistic: &[f64], t: f64, window: usize) -> f64 {
    if statistic.is_empty() {
        return 0.0;
    }
    // statistic[i] corresponds to times[i+1]
    let mut nearest = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..statistic.len() {
        let d = (times[i + 1] - t).abs();
        if d < best {
            best = d;
            nearest = i;
        }
    }
    let lo = nearest.saturating_sub(window);
    let hi = (nearest + window).min(statistic.len() - 1);
    statistic[lo..=hi].iter().cloned().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn synthetic_kink_is_detected_once() {
        let dt = 0.005;
        let times = grid(401, dt);
        let values: Vec<f64> = times.iter().map(|t| (t - 1.0).abs()).collect();
        let report = detect_cusps(&times, &values, 5, 10.0).unwrap();
        assert_eq!(report.times.len(), 1, "detections: {:?}", report.times);
        assert!((report.times[0] - 1.0).abs() <= dt + 1e-12);
    }

    #[test]
    fn smooth_series_has_no_cusps() {
        let times = grid(401, 0.005);
        let values: Vec<f64> = times.iter().map(|t| t * t).collect();
        let report = detect_cusps(&times, &values, 5, 10.0).unwrap();
        assert!(report.times.is_empty(), "false detections: {:?}", report.times);
    }

    #[test]
    fn detector_is_affine_invariant() {
        let dt = 0.005;
        let times = grid(401, dt);
        let base: Vec<f64> = times
            .iter()
            .map(|t| (t - 0.7).abs() + 0.1 * (3.0 * t).sin().powi(2))
            .collect();
        let shifted: Vec<f64> = times
            .iter()
            .zip(base.iter())
            .map(|(t, v)| v + 3.4 + 2.2 * t)
            .collect();
        let r1 = detect_cusps(&times, &base, 5, 10.0).unwrap();
        let r2 = detect_cusps(&times, &shifted, 5, 10.0).unwrap();
        assert_eq!(r1.times, r2.times);
        for (a, b) in r1.statistic.iter().zip(r2.statistic.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn window_larger_than_series_is_domain_error() {
        let times = grid(8, 0.1);
        let values = vec![0.0; 8];
        assert!(matches!(
            detect_cusps(&times, &values, 10, 10.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn statistic_near_picks_local_peak() {
        let dt = 0.01;
        let times = grid(201, dt);
        let values: Vec<f64> = times.iter().map(|t| (t - 1.0).abs()).collect();
        let stat = cusp_statistic(&times, &values).unwrap();
        let near = statistic_near(&times, &stat, 1.0, 5);
        assert!(near > 1.0, "peak statistic {near}");
        let far = statistic_near(&times, &stat, 0.3, 5);
        assert!(far < 1e-9);
    }
}
