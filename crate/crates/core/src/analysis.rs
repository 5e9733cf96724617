//! Lyapunov fits, exponential-window search and long-time classification.

use serde::{Deserialize, Serialize};

use crate::correlators::CorrelatorSeries;
use crate::error::{Error, Result};

/// Fewest samples accepted by a log-linear fit.
pub const MIN_FIT_SAMPLES: usize = 8;

/// How the fitted slope of `log 𝓒` maps to a Lyapunov exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// Exponent equals the slope.
    #[default]
    Raw,
    /// `𝓒 ~ e^{2λ_L t}`: exponent is half the slope.
    SquaredCommutator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub lyapunov: f64,
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub r_squared: f64,
    /// `2πT`.
    pub bound_value: f64,
    pub bound_satisfied: bool,
    pub mode: FitMode,
}

struct Line {
    slope: f64,
    intercept: f64,
    r_squared: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 0.0 };
    Line {
        slope,
        intercept: my - slope * mx,
        r_squared,
    }
}

/// Indices of samples with `t_start ≤ t ≤ t_end` (with a little slack for
/// grid round-off).
fn window_indices(times: &[f64], window: (f64, f64)) -> Vec<usize> {
    let slack = 1e-9 * (1.0 + window.0.abs().max(window.1.abs()));
    times
        .iter()
        .enumerate()
        .filter(|(_, t)| **t >= window.0 - slack && **t <= window.1 + slack)
        .map(|(k, _)| k)
        .collect()
}

/// Least-squares line through `(t, log 𝓒(t))` on `window`.
pub fn fit_lyapunov(series: &CorrelatorSeries, window: (f64, f64), mode: FitMode, temperature: f64) -> Result<FitResult> {
    if !(window.1 > window.0) {
        return Err(Error::Fit(format!("empty window {window:?}")));
    }
    let idx = window_indices(&series.times, window);
    if idx.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "window {window:?} holds {} samples, need at least {MIN_FIT_SAMPLES}",
            idx.len()
        )));
    }
    let mut x = Vec::with_capacity(idx.len());
    let mut y = Vec::with_capacity(idx.len());
    for &k in &idx {
        let v = series.values[k].map(|z| z.re);
        match v {
            Some(v) if v > 0.0 && v.is_finite() => {
                x.push(series.times[k]);
                y.push(v.ln());
            }
            _ => {
                return Err(Error::Fit(format!(
                    "non-positive or undefined value at t = {} inside the fit window",
                    series.times[k]
                )))
            }
        }
    }
    let line = least_squares(&x, &y);
    let lyapunov = match mode {
        FitMode::Raw => line.slope,
        FitMode::SquaredCommutator => 0.5 * line.slope,
    };
    let bound_value = 2.0 * std::f64::consts::PI * temperature;
    Ok(FitResult {
        lyapunov,
        slope: line.slope,
        intercept: line.intercept,
        window: (x[0], x[x.len() - 1]),
        samples: x.len(),
        r_squared: line.r_squared,
        bound_value,
        bound_satisfied: lyapunov <= bound_value,
        mode,
    })
}

/// Settings for [`auto_window`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSearch {
    /// Shortest admissible window, in time units.
    pub min_duration: f64,
    /// Best `r²` below this means no exponential window.
    #[serde(default = "default_r2")]
    pub r2_threshold: f64,
    /// `r²` values closer than this count as tied.
    #[serde(default = "default_tie")]
    pub tie_tol: f64,
}

fn default_r2() -> f64 {
    0.98
}

fn default_tie() -> f64 {
    1e-9
}

impl WindowSearch {
    pub fn new(min_duration: f64) -> Self {
        Self {
            min_duration,
            r2_threshold: default_r2(),
            tie_tol: default_tie(),
        }
    }
}

/// Window maximizing `r²` of the log-linear fit among windows of positive
/// slope and at least `min_duration`; ties go to the longer, then earlier,
/// window.
pub fn auto_window(series: &CorrelatorSeries, search: &WindowSearch) -> Result<(f64, f64)> {
    let n = series.len();
    let logs: Vec<Option<f64>> = series
        .values
        .iter()
        .map(|v| v.and_then(|z| (z.re > 0.0 && z.re.is_finite()).then(|| z.re.ln())))
        .collect();
    if logs.iter().all(|v| v.is_none()) {
        return Err(Error::Fit("series is nowhere positive".into()));
    }
    // prefix sums over runs of valid samples
    let mut sx = vec![0.0; n + 1];
    let mut sy = vec![0.0; n + 1];
    let mut sxx = vec![0.0; n + 1];
    let mut sxy = vec![0.0; n + 1];
    let mut syy = vec![0.0; n + 1];
    let mut bad = vec![0usize; n + 1];
    let t = &series.times;
    let t0 = t.first().copied().unwrap_or(0.0);
    for k in 0..n {
        let x = t[k] - t0;
        let y = logs[k].unwrap_or(0.0);
        sx[k + 1] = sx[k] + x;
        sy[k + 1] = sy[k] + y;
        sxx[k + 1] = sxx[k] + x * x;
        sxy[k + 1] = sxy[k] + x * y;
        syy[k + 1] = syy[k] + y * y;
        bad[k + 1] = bad[k] + usize::from(logs[k].is_none());
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..n {
        for j in (i + MIN_FIT_SAMPLES - 1)..n {
            if t[j] - t[i] < search.min_duration - 1e-12 {
                continue;
            }
            if bad[j + 1] != bad[i] {
                continue;
            }
            let m = (j + 1 - i) as f64;
            let mx = (sx[j + 1] - sx[i]) / m;
            let my = (sy[j + 1] - sy[i]) / m;
            let cxx = (sxx[j + 1] - sxx[i]) - m * mx * mx;
            let cxy = (sxy[j + 1] - sxy[i]) - m * mx * my;
            let cyy = (syy[j + 1] - syy[i]) - m * my * my;
            if !(cxx > 0.0 && cyy > 0.0 && cxy > 0.0) {
                continue;
            }
            let r2 = (cxy * cxy / (cxx * cyy)).min(1.0);
            let better = match best {
                None => true,
                Some((b, bi, bj)) => {
                    if r2 > b + search.tie_tol {
                        true
                    } else if r2 + search.tie_tol >= b {
                        let (len, blen) = (j - i, bj - bi);
                        len > blen || (len == blen && i < bi)
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((r2, i, j));
            }
        }
    }
    match best {
        Some((r2, i, j)) if r2 >= search.r2_threshold => Ok((t[i], t[j])),
        Some((r2, _, _)) => Err(Error::Fit(format!(
            "no exponential window: best r² = {r2:.4} below {}",
            search.r2_threshold
        ))),
        None => Err(Error::Fit("no window with positive slope".into())),
    }
}

/// Long-time behaviour of an OTOC series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LongTimeBehavior {
    DecaysToZero,
    SaturatesNonzero,
    Oscillatory,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeOptions {
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
    /// Tail mean below this fraction of the series maximum counts as decay.
    #[serde(default = "default_decay")]
    pub decay_threshold: f64,
    /// Tail `σ/μ` above this counts as oscillatory.
    #[serde(default = "default_osc")]
    pub oscillation_threshold: f64,
}

fn default_tail() -> f64 {
    0.25
}
fn default_decay() -> f64 {
    0.02
}
fn default_osc() -> f64 {
    0.5
}

impl Default for LongTimeOptions {
    fn default() -> Self {
        Self {
            tail_fraction: default_tail(),
            decay_threshold: default_decay(),
            oscillation_threshold: default_osc(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeReport {
    pub behavior: LongTimeBehavior,
    pub tail_mean: f64,
    pub tail_std: f64,
    pub series_max: f64,
    /// Time of the global maximum.
    pub argmax_time: f64,
}

/// Classifies the tail of a series.
pub fn classify_longtime(series: &CorrelatorSeries, opts: &LongTimeOptions) -> Result<LongTimeReport> {
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter_map(|(t, v)| v.map(|z| (*t, z.re)))
        .collect();
    if pts.is_empty() {
        return Err(Error::Fit("series has no defined values".into()));
    }
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0) {
        return Err(Error::Spec(format!("tail_fraction must lie in (0, 1], got {}", opts.tail_fraction)));
    }
    let (argmax_time, series_max) = pts
        .iter()
        .copied()
        .fold((pts[0].0, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
    let tail_len = ((pts.len() as f64 * opts.tail_fraction).ceil() as usize).clamp(1, pts.len());
    let tail: Vec<f64> = pts[pts.len() - tail_len..].iter().map(|p| p.1).collect();
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let var = tail.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / tail.len() as f64;
    let std = var.sqrt();
    let behavior = if mean < opts.decay_threshold * series_max {
        LongTimeBehavior::DecaysToZero
    } else if std / mean > opts.oscillation_threshold {
        LongTimeBehavior::Oscillatory
    } else {
        LongTimeBehavior::SaturatesNonzero
    };
    Ok(LongTimeReport {
        behavior,
        tail_mean: mean,
        tail_std: std,
        series_max,
        argmax_time,
    })
}
