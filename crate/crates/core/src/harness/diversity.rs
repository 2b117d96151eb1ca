use serde::Serialize;

use crate::error::{Error, Result};

use super::sweep::SweepRow;

/// Points with fewer errors than this are not used for slope fits.
pub const MIN_ERRORS: u64 = 100;
/// Width of the automatic fit window.
pub const AUTO_WINDOW_DB: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub ser: f64,
    pub errors: u64,
    pub trials: u64,
}

impl From<&SweepRow> for CurvePoint {
    fn from(r: &SweepRow) -> Self {
        Self {
            snr_db: r.snr_db,
            ser: r.ser,
            errors: r.errors,
            trials: r.trials,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiversityFit {
    pub slope: f64,
    pub std_err: f64,
    /// 95% interval on the slope.
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// SNR range (dB) of the fitted points.
    pub window: (f64, f64),
    pub points: usize,
}

fn qualifies(p: &CurvePoint) -> bool {
    p.errors >= MIN_ERRORS && p.ser > 0.0 && p.ser < 1.0
}

/// Highest `AUTO_WINDOW_DB`-wide window in which every grid point qualifies
/// and at least three points lie.
pub fn auto_window(curve: &[CurvePoint]) -> Option<(f64, f64)> {
    let mut sorted: Vec<&CurvePoint> = curve.iter().collect();
    sorted.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    for top in sorted.iter().rev() {
        let lo = top.snr_db - AUTO_WINDOW_DB - 1e-9;
        let inside: Vec<&&CurvePoint> = sorted
            .iter()
            .filter(|p| p.snr_db >= lo && p.snr_db <= top.snr_db)
            .collect();
        if inside.len() >= 3 && inside.iter().all(|p| qualifies(p)) {
            return Some((inside[0].snr_db, top.snr_db));
        }
    }
    None
}

/// Weighted least-squares slope of `-log10(ser)` against `log10(rho)`.
///
/// Each point is weighted by the inverse delta-method variance of
/// `log10(ser_hat)`, i.e. `errors / (1 - ser)` up to a constant, so the slope
/// error reflects the binomial uncertainty of every point.
pub fn estimate_diversity(curve: &[CurvePoint], window: Option<(f64, f64)>) -> Result<DiversityFit> {
    let (lo, hi) = match window {
        Some(w) => w,
        None => auto_window(curve).ok_or_else(|| {
            Error::NotEstimable(format!(
                "no {AUTO_WINDOW_DB} dB window with at least 3 points of >= {MIN_ERRORS} errors"
            ))
        })?,
    };
    let pts: Vec<&CurvePoint> = curve
        .iter()
        .filter(|p| p.snr_db >= lo - 1e-9 && p.snr_db <= hi + 1e-9 && qualifies(p))
        .collect();
    if pts.len() < 3 {
        return Err(Error::NotEstimable(format!(
            "{} qualifying points in [{lo}, {hi}] dB, need 3",
            pts.len()
        )));
    }
    let ln10 = std::f64::consts::LN_10;
    let data: Vec<(f64, f64, f64)> = pts
        .iter()
        .map(|p| {
            let var = (1.0 - p.ser) / (p.errors as f64 * ln10 * ln10);
            (p.snr_db / 10.0, -p.ser.log10(), 1.0 / var)
        })
        .collect();
    let sw: f64 = data.iter().map(|d| d.2).sum();
    let xm = data.iter().map(|d| d.2 * d.0).sum::<f64>() / sw;
    let ym = data.iter().map(|d| d.2 * d.1).sum::<f64>() / sw;
    let sxx: f64 = data.iter().map(|d| d.2 * (d.0 - xm).powi(2)).sum();
    let sxy: f64 = data.iter().map(|d| d.2 * (d.0 - xm) * (d.1 - ym)).sum();
    if sxx <= 0.0 {
        return Err(Error::NotEstimable("all fit points share one SNR".into()));
    }
    let slope = sxy / sxx;
    let std_err = (1.0 / sxx).sqrt();
    const Z: f64 = 1.959_963_984_540_054;
    Ok(DiversityFit {
        slope,
        std_err,
        ci_lo: slope - Z * std_err,
        ci_hi: slope + Z * std_err,
        window: (pts[0].snr_db, pts[pts.len() - 1].snr_db),
        points: pts.len(),
    })
}

/// Fit for the rows of one decoder label.
pub fn fit_rows(rows: &[&SweepRow], window: Option<(f64, f64)>) -> Result<DiversityFit> {
    let curve: Vec<CurvePoint> = rows.iter().map(|r| CurvePoint::from(*r)).collect();
    estimate_diversity(&curve, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn synthetic(c: f64, d: f64) -> Vec<CurvePoint> {
        (0..=8)
            .map(|i| {
                let snr_db = 10.0 + 2.5 * i as f64;
                let rho = 10f64.powf(snr_db / 10.0);
                CurvePoint {
                    snr_db,
                    ser: c * rho.powf(-d),
                    errors: 1000,
                    trials: 1_000_000_000,
                }
            })
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = estimate_diversity(&synthetic(1.0, 2.0), None).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_eq!(fit.window, (20.0, 30.0));
        assert!(fit.ci_lo < 2.0 && fit.ci_hi > 2.0);
    }

    #[test]
    fn intercept_does_not_matter() {
        for &c in &[0.01, 0.3, 5.0] {
            for &d in &[1.0, 3.0, 6.0] {
                let fit = estimate_diversity(&synthetic(c, d), Some((10.0, 20.0))).unwrap();
                assert_abs_diff_eq!(fit.slope, d, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn too_few_errors_is_not_a_number() {
        let mut curve = synthetic(1.0, 2.0);
        for p in curve.iter_mut() {
            p.errors = 99;
        }
        assert!(matches!(estimate_diversity(&curve, None), Err(Error::NotEstimable(_))));
        let curve = synthetic(1.0, 2.0);
        assert!(matches!(
            estimate_diversity(&curve[..2], Some((0.0, 100.0))),
            Err(Error::NotEstimable(_))
        ));
    }

    #[test]
    fn window_stops_below_unreliable_points() {
        let mut curve = synthetic(1.0, 2.0);
        let n = curve.len();
        curve[n - 1].errors = 10;
        curve[n - 2].errors = 10;
        let fit = estimate_diversity(&curve, None).unwrap();
        assert_eq!(fit.window, (15.0, 25.0));
    }
}
