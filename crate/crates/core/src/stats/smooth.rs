use crate::error::{Error, Result};
use crate::sweep::log_sweep;

pub const DEFAULT_GRID_SIZE: usize = 200;

/// Smoothed trend evaluated on a log-spaced grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendCurve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// One twentieth of the log-x range of `points`, or 1 when the range is empty.
pub fn default_bandwidth(points: &[(f64, f64)]) -> f64 {
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    let span = hi.ln() - lo.ln();
    if span.is_finite() && span > 0.0 {
        span / 20.0
    } else {
        1.0
    }
}

/// Nadaraya–Watson regression with a Gaussian kernel in `ln x`.
///
/// The grid spans `[min x, max x]` geometrically with `grid_size` points (a
/// single point when all x coincide). Kernel weights are computed relative to
/// the nearest data point, so the estimate stays defined for any bandwidth.
pub fn gaussian_smooth(
    points: &[(f64, f64)],
    bandwidth: f64,
    grid_size: usize,
) -> Result<TrendCurve> {
    if points.is_empty() {
        return Err(Error::invalid("cannot smooth an empty point set"));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::invalid(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    if grid_size == 0 {
        return Err(Error::invalid("grid size must be at least 1"));
    }
    if let Some(&(x, _)) = points.iter().find(|(x, _)| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::invalid(format!(
            "x values must be positive, got {x}"
        )));
    }
    if points.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::invalid("y values must be finite"));
    }

    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    let xs = if lo == hi {
        vec![lo]
    } else {
        log_sweep(lo, hi, grid_size)?
    };

    let log_points: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y)).collect();
    let (y_min, y_max) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, y)| {
            (a.min(y), b.max(y))
        });

    let mut exponents = vec![0.0; log_points.len()];
    let ys =
        xs.iter()
            .map(|&g| {
                let lg = g.ln();
                for (e, &(lx, _)) in exponents.iter_mut().zip(&log_points) {
                    let u = (lg - lx) / bandwidth;
                    *e = -0.5 * u * u;
                }
                let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let (num, den) = exponents.iter().zip(&log_points).fold(
                    (0.0, 0.0),
                    |(num, den), (&e, &(_, y))| {
                        let k = (e - top).exp();
                        (num + k * y, den + k)
                    },
                );
                (num / den).clamp(y_min, y_max)
            })
            .collect();
    Ok(TrendCurve { xs, ys })
}
