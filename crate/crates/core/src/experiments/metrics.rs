//! Scalar figures computed from traces.

use std::fmt;

/// Root mean square of a sequence; zero for an empty one.
pub fn rms(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n − 1); zero for fewer than two values.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Time after `t_step` at which `y` first reaches 90% of the way from `from`
/// to `to`, interpolated between samples. Works for rising and falling
/// transitions alike.
pub fn time_to_90(t: &[f64], y: &[f64], t_step: f64, from: f64, to: f64) -> Option<f64> {
    let level = from + 0.9 * (to - from);
    let sign = if to > from { 1.0 } else { -1.0 };
    let reached = |v: f64| (v - level) * sign >= 0.0;
    let start = t.iter().position(|&ti| ti >= t_step)?;
    let i = (start..y.len()).find(|&i| reached(y[i]))?;
    if i == start || reached(y[i - 1]) {
        return Some(t[i] - t_step);
    }
    let frac = (level - y[i - 1]) / (y[i] - y[i - 1]);
    Some(t[i - 1] + frac * (t[i] - t[i - 1]) - t_step)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination. A dataset with no spread in `y` that
    /// the line reproduces exactly scores 1.
    pub r_squared: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let e = yi - (slope * xi + intercept);
        ss_res += e * e;
        ss_tot += (yi - my) * (yi - my);
    }
    let r_squared = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Area enclosed by the polyline `(x, y)`, closed back to its start
/// (shoelace formula, absolute value).
pub fn loop_area(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        twice += x[i] * y[j] - x[j] * y[i];
    }
    0.5 * twice.abs()
}

/// Mean and sample standard deviation over repeated trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl TrialStats {
    pub fn from_values(values: &[f64]) -> Self {
        Self {
            mean: mean(values),
            sd: std_dev(values),
            n: values.len(),
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            mean: self.mean * factor,
            sd: self.sd * factor.abs(),
            n: self.n,
        }
    }
}

impl fmt::Display for TrialStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(3);
        write!(f, "{:.p$} ± {:.p$}", self.mean, self.sd)
    }
}

/// Figures reported by one scenario. Fields that do not apply are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub rms_error: Option<f64>,
    pub rise_time_90: Option<f64>,
    pub fall_time_90: Option<f64>,
    pub fitted_stiffness: Option<f64>,
    pub pivot_std: Option<f64>,
}
