//! Closed-form and numerically integrated distributions of the SNR sample
//! observed at the small cell. Used as an independent oracle for the sampler.

use std::f64::consts::{LN_10, PI, SQRT_2};

use crate::channel::PATH_LOSS_SLOPE_DB;
use crate::error::{Error, Result};

/// Absolute tolerance targeted by [`cdf_gamma1_db`] and [`pdf_gamma1_db`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Half-width of the integration window, in standard deviations of the
/// shadowing difference.
const SHADOW_WINDOW_SIGMAS: f64 = 10.0;

/// CDF of the fading ratio in dB.
pub fn cdf_theta_r(theta_r: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-theta_r / 10.0))
}

/// Density of the fading ratio in dB.
pub fn pdf_theta_r(theta_r: f64) -> f64 {
    // even function; evaluating at |θ| keeps the power term below one
    let x = 10f64.powf(-theta_r.abs() / 10.0);
    LN_10 * x / (10.0 * (1.0 + x) * (1.0 + x))
}

/// Density of the shadowing difference in dB: zero-mean normal with variance `2σ_s²`.
pub fn pdf_theta_s(theta_s: f64, sigma_s_db: f64) -> Result<f64> {
    if sigma_s_db == 0.0 {
        return Err(Error::DegenerateSigma);
    }
    if !(sigma_s_db > 0.0) {
        return Err(Error::domain("sigma_s_db", sigma_s_db, "(0, inf)"));
    }
    let var2 = 4.0 * sigma_s_db * sigma_s_db;
    Ok((-theta_s * theta_s / var2).exp() / (PI * var2).sqrt())
}

/// Parameters of the SNR distribution at the small cell for a fixed user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrCdfModel {
    pub gamma_t_db: f64,
    pub d0: f64,
    pub d1: f64,
    pub sigma_s_db: f64,
}

impl SnrCdfModel {
    pub fn new(gamma_t_db: f64, d0: f64, d1: f64, sigma_s_db: f64) -> Result<Self> {
        if !(d0 > 0.0) {
            return Err(Error::domain("d0", d0, "(0, inf)"));
        }
        if !(d1 > 0.0) {
            return Err(Error::domain("d1", d1, "(0, inf)"));
        }
        if !(sigma_s_db >= 0.0) {
            return Err(Error::domain("sigma_s_db", sigma_s_db, "[0, inf)"));
        }
        Ok(SnrCdfModel {
            gamma_t_db,
            d0,
            d1,
            sigma_s_db,
        })
    }

    /// Median of the SNR sample: the deterministic part of the dB-domain SNR.
    pub fn median_db(&self) -> f64 {
        self.gamma_t_db + PATH_LOSS_SLOPE_DB * (self.d0 / self.d1).log10()
    }

    /// Offset of `gamma1_db` from the median.
    pub fn offset(&self, gamma1_db: f64) -> f64 {
        gamma1_db - self.median_db()
    }
}

/// CDF of the SNR sample in dB, integrating the shadowing density against
/// the fading CDF.
pub fn cdf_gamma1_db(model: &SnrCdfModel, gamma1_db: f64) -> Result<f64> {
    let m = model.offset(gamma1_db);
    if model.sigma_s_db == 0.0 {
        return Ok(cdf_theta_r(m));
    }
    let spread = SQRT_2 * model.sigma_s_db;
    integrate_against_normal(|t| cdf_theta_r(m - spread * t))
}

/// Density of the SNR sample in dB.
pub fn pdf_gamma1_db(model: &SnrCdfModel, gamma1_db: f64) -> Result<f64> {
    let m = model.offset(gamma1_db);
    if model.sigma_s_db == 0.0 {
        return Ok(pdf_theta_r(m));
    }
    let spread = SQRT_2 * model.sigma_s_db;
    integrate_against_normal(|t| pdf_theta_r(m - spread * t))
}

/// `∫ φ(t) g(t) dt` for the standard normal density `φ`.
fn integrate_against_normal(g: impl Fn(f64) -> f64) -> Result<f64> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    let integrand = |t: f64| norm * (-0.5 * t * t).exp() * g(t);
    adaptive_simpson(
        integrand,
        -SHADOW_WINDOW_SIGMAS,
        SHADOW_WINDOW_SIGMAS,
        QUADRATURE_TOLERANCE,
    )
}

const MAX_DEPTH: u32 = 40;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut converged = true;
    let est = simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut converged);
    if converged && est.is_finite() {
        Ok(est)
    } else {
        Err(Error::Quadrature {
            tolerance: tol,
            estimate: est,
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        *converged = false;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged)
}
