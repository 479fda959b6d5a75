//! Deflection and probability estimators on sampled intensity profiles.
//!
//! The centroid is the primary estimator. The Gaussian fit is a cross-check
//! and the split detector is a 1-D stand-in for the quad-detector readout.

use crate::error::{Result, WeakBeamError};
use crate::field::SampledField;
use crate::wv::WEAK_REGIME_THRESHOLD;

/// Orientation of the detector axis relative to the closed-form deflection.
///
/// With the mirror matrix `diag(e^{i(-kx+phi/2)}, e^{-i(-kx+phi/2)})` the
/// dark-port peak sits at `-d_w`, i.e. [`SignConvention::DetectorAxisNegative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    DetectorAxisPositive,
    DetectorAxisNegative,
}

impl SignConvention {
    pub fn sign(self) -> f64 {
        match self {
            Self::DetectorAxisPositive => 1.0,
            Self::DetectorAxisNegative => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DetectorAxisPositive => "detector_axis_positive",
            Self::DetectorAxisNegative => "detector_axis_negative",
        }
    }
}

/// Measured and predicted deflection for one scenario evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflectionReport {
    /// Intensity centroid at the detector (m).
    pub measured_centroid: f64,
    /// Center of a least-squares Gaussian fit to the detector intensity (m).
    pub fitted_center: f64,
    /// Closed-form deflection, unsigned by convention (m).
    pub predicted: f64,
    pub postselection_probability_measured: f64,
    pub postselection_probability_predicted: f64,
    pub weak_regime_margin: f64,
    pub diffraction_margin: f64,
    pub sign_convention: SignConvention,
    /// Non-fatal diagnostics (aliasing risk, regime violations, poor fits).
    pub warnings: Vec<String>,
}

impl DeflectionReport {
    /// Where the centroid is expected on the detector axis.
    pub fn signed_prediction(&self) -> f64 {
        self.sign_convention.sign() * self.predicted
    }

    /// `|centroid - signed prediction| / |prediction|`; zero when both vanish.
    pub fn relative_error(&self) -> f64 {
        let diff = (self.measured_centroid - self.signed_prediction()).abs();
        if self.predicted == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.predicted.abs()
        }
    }

    pub fn weak_regime_holds(&self) -> bool {
        self.weak_regime_margin <= WEAK_REGIME_THRESHOLD
    }

    pub fn weak_regime_holds_at(&self, threshold: f64) -> bool {
        self.weak_regime_margin <= threshold
    }
}

/// Result of [`gaussian_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub center: f64,
    /// Intensity radius `w` of `A exp(-(x-c)^2 / 2w^2)`.
    pub radius: f64,
    pub amplitude: f64,
    /// `sqrt(sum r^2 / sum I^2)` over all samples.
    pub residual: f64,
    pub iterations: usize,
}

pub const FIT_MAX_ITERATIONS: usize = 100;
pub const FIT_TOLERANCE: f64 = 1e-12;

/// First moment of intensity.
pub fn centroid(field: &SampledField) -> Result<f64> {
    let grid = field.grid();
    let mut total = 0.0;
    let mut first = 0.0;
    for (x, v) in grid.positions().zip(field.values()) {
        let i = v.norm_sqr();
        total += i;
        first += x * i;
    }
    if !(total > 0.0) {
        return Err(WeakBeamError::NullField);
    }
    Ok(first / total)
}

/// Intensity second central moment (variance).
pub fn second_moment(field: &SampledField) -> Result<f64> {
    let c = centroid(field)?;
    let mut total = 0.0;
    let mut second = 0.0;
    for (x, v) in field.grid().positions().zip(field.values()) {
        let i = v.norm_sqr();
        total += i;
        second += (x - c) * (x - c) * i;
    }
    Ok(second / total)
}

/// Levenberg-Marquardt fit of `A exp(-(x-c)^2 / 2w^2)` to the intensity.
///
/// A profile that is not Gaussian still returns a fit; its shape mismatch
/// shows up in `residual`.
pub fn gaussian_fit(field: &SampledField) -> Result<GaussianFit> {
    let xs: Vec<f64> = field.grid().positions().collect();
    let ys = field.intensity();
    let peak = ys.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(WeakBeamError::NullField);
    }
    let c0 = centroid(field)?;
    let w0 = second_moment(field)?.sqrt().max(field.grid().dx());
    fit_gaussian_samples(&xs, &ys, [peak, c0, w0])
}

fn fit_gaussian_samples(xs: &[f64], ys: &[f64], init: [f64; 3]) -> Result<GaussianFit> {
    // Parameters are scaled so the normal equations stay well conditioned.
    let a_scale = init[0];
    let x_scale = init[2];
    let x_ref = init[1];
    let norm_y: f64 = ys.iter().map(|y| y * y).sum();

    let model = |p: &[f64; 3], x: f64| {
        let u = (x - x_ref) / x_scale - p[1];
        p[0] * (-0.5 * u * u / (p[2] * p[2])).exp()
    };
    let cost = |p: &[f64; 3]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y / a_scale - model(p, x);
                r * r
            })
            .sum()
    };

    let mut p = [1.0, 0.0, 1.0];
    let mut current = cost(&p);
    let mut lambda = 1e-3;

    for iter in 1..=FIT_MAX_ITERATIONS {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for (&x, &y) in xs.iter().zip(ys) {
            let u = (x - x_ref) / x_scale - p[1];
            let g = (-0.5 * u * u / (p[2] * p[2])).exp();
            let f = p[0] * g;
            let jac = [g, f * u / (p[2] * p[2]), f * u * u / (p[2] * p[2] * p[2])];
            let r = y / a_scale - f;
            for i in 0..3 {
                jtr[i] += jac[i] * r;
                for j in 0..3 {
                    jtj[i][j] += jac[i] * jac[j];
                }
            }
        }

        let mut accepted = false;
        while lambda < 1e16 {
            let mut lhs = jtj;
            for (i, row) in lhs.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-300);
            }
            let Some(step) = solve3(lhs, jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = if trial[2] > 0.0 {
                cost(&trial)
            } else {
                f64::INFINITY
            };
            if trial_cost <= current {
                let rel_change = (0..3)
                    .map(|i| step[i].abs() / trial[i].abs().max(1.0))
                    .fold(0.0, f64::max);
                p = trial;
                let improvement = current - trial_cost;
                current = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel_change < FIT_TOLERANCE || improvement <= 1e-15 * current {
                    return Ok(finish(p, a_scale, x_scale, x_ref, current, norm_y, iter));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step at any damping: a stationary point.
            return Ok(finish(p, a_scale, x_scale, x_ref, current, norm_y, iter));
        }
    }
    Err(WeakBeamError::FitDiverged {
        iterations: FIT_MAX_ITERATIONS,
    })
}

fn finish(
    p: [f64; 3],
    a_scale: f64,
    x_scale: f64,
    x_ref: f64,
    cost: f64,
    norm_y: f64,
    iterations: usize,
) -> GaussianFit {
    GaussianFit {
        amplitude: p[0] * a_scale,
        center: x_ref + p[1] * x_scale,
        radius: p[2].abs() * x_scale,
        residual: (cost * a_scale * a_scale / norm_y).sqrt(),
        iterations,
    }
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        *slot = det(&mc) / d;
    }
    Some(out)
}

/// `(E_right - E_left) / (E_right + E_left)` about `split_at`.
///
/// A sample sitting exactly on the split contributes half to each side.
pub fn split_detector_signal(field: &SampledField, split_at: f64) -> Result<f64> {
    let mut left = 0.0;
    let mut right = 0.0;
    for (x, v) in field.grid().positions().zip(field.values()) {
        let i = v.norm_sqr();
        if x > split_at {
            right += i;
        } else if x < split_at {
            left += i;
        } else {
            left += 0.5 * i;
            right += 0.5 * i;
        }
    }
    let total = left + right;
    if !(total > 0.0) {
        return Err(WeakBeamError::NullField);
    }
    Ok((right - left) / total)
}

/// Output energy over input energy.
pub fn energy_ratio(output: &SampledField, input: &SampledField) -> Result<f64> {
    let e_in = input.energy();
    if !(e_in > 0.0) {
        return Err(WeakBeamError::NullField);
    }
    Ok(output.energy() / e_in)
}
