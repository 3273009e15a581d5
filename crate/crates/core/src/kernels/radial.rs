//! Radial profiles and the d-dimensional Fourier transform of radial functions.
//!
//! For a radial `G(‖ξ‖)` in `ℝ^d` (unitary convention),
//!
//! * d = 1: `√(2/π) ∫₀^∞ G(s) cos(rs) ds`
//! * d = 2: `∫₀^∞ G(s) J₀(rs) s ds = (2/π) ∫₀^∞ S(r cosh t) dt`, with the sine
//!   moment `S(ω) = ∫₀^∞ G(s) s sin(ωs) ds` (projection of the 3-d transform)
//! * d = 3: `√(2/π) r⁻¹ ∫₀^∞ G(s) s sin(rs) ds`
//!
//! The one-dimensional cosine/sine transforms are taken along a ray rotated
//! into the upper half plane whenever the profile continues analytically into
//! a sector; there `e^{irz}` decays and the integrand no longer oscillates
//! along the real axis. Profiles without a continuation fall back to
//! real-axis panels of half a period each.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::bessel::{bessel_j0, bessel_k};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, adaptive_breaks, adaptive_semi_infinite, Tolerance};

/// A scalar function of radius `s ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `s ↦ scale · e^{−α s^p}`.
    StretchedExp { scale: f64, alpha: f64, p: f64 },
    /// `s ↦ (s² + c²)^{−ν}`.
    InverseMultiquadric { c: f64, nu: f64 },
    /// The d-dimensional Fourier transform of the inverse multiquadric,
    /// `s ↦ 2^{1−ν}/Γ(ν) (s/c)^{ν−d/2} K_{ν−d/2}(cs)`.
    ImqSpectrum { c: f64, nu: f64, dim: usize },
}

impl RadialProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialProfile::StretchedExp { scale, alpha, p } => scale.is_finite() && alpha > 0.0 && p > 0.0,
            RadialProfile::InverseMultiquadric { c, nu } => c > 0.0 && nu > 0.0,
            RadialProfile::ImqSpectrum { c, nu, dim } => c > 0.0 && dim > 0 && nu > dim as f64 / 2.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid radial profile {self:?}")))
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        match *self {
            RadialProfile::StretchedExp { scale, alpha, p } => Ok(scale * (-alpha * s.powf(p)).exp()),
            RadialProfile::InverseMultiquadric { c, nu } => Ok((s * s + c * c).powf(-nu)),
            RadialProfile::ImqSpectrum { c, nu, dim } => imq_spectrum(c, nu, dim, s),
        }
    }

    /// Analytic continuation along `z = t e^{iθ}`, when one is available.
    fn eval_complex(&self, z: Complex64) -> Option<Complex64> {
        match *self {
            RadialProfile::StretchedExp { scale, alpha, p } => Some((-alpha * z.powf(p)).exp() * scale),
            RadialProfile::InverseMultiquadric { c, nu } => Some((z * z + c * c).powf(-nu)),
            RadialProfile::ImqSpectrum { .. } => None,
        }
    }

    /// Rotation angle for the oscillatory transforms, if the profile decays in that sector.
    fn ray_angle(&self) -> Option<f64> {
        match *self {
            // |e^{−α z^p}| decays for p·arg z < π/2; the ray sits halfway.
            RadialProfile::StretchedExp { p, .. } => Some(0.5 * FRAC_PI_2.min(FRAC_PI_2 / p)),
            // Analytic away from ±ic.
            RadialProfile::InverseMultiquadric { .. } => Some(0.25 * PI),
            RadialProfile::ImqSpectrum { .. } => None,
        }
    }

    /// Algebraic tails gain nothing from the real axis even at low frequency.
    fn algebraic(&self) -> bool {
        matches!(self, RadialProfile::InverseMultiquadric { .. })
    }

    /// Length over which the profile decays along the real axis.
    fn decay_scale(&self) -> f64 {
        match *self {
            RadialProfile::StretchedExp { alpha, p, .. } => alpha.powf(-1.0 / p),
            RadialProfile::InverseMultiquadric { c, .. } => c,
            RadialProfile::ImqSpectrum { c, .. } => 1.0 / c,
        }
    }

    fn ray_decay_scale(&self, theta: f64) -> f64 {
        match *self {
            RadialProfile::StretchedExp { alpha, p, .. } => (alpha * (p * theta).cos()).powf(-1.0 / p),
            _ => self.decay_scale(),
        }
    }

    /// Radius past which `|G(s)| s^k` is negligible (only used on the real axis).
    fn cutoff(&self, weight_power: i32) -> Result<f64> {
        let mut s = self.decay_scale();
        let mut peak = 0.0f64;
        for _ in 0..200 {
            let v = self.eval(s)?.abs() * s.powi(weight_power);
            peak = peak.max(v);
            if v < 1e-18 * peak && s > 4.0 * self.decay_scale() {
                return Ok(s);
            }
            s *= 1.25;
        }
        Err(Error::Quadrature { estimate: peak, target: 1e-18 * peak })
    }
}

fn imq_spectrum(c: f64, nu: f64, dim: usize, s: f64) -> Result<f64> {
    let order = nu - dim as f64 / 2.0;
    let prefactor = 2f64.powf(1.0 - nu) / gamma(nu);
    if s * c < 1e-8 {
        // Small-argument limit of (s/c)^γ K_γ(cs) = Γ(γ) 2^{γ−1} c^{−2γ}.
        return Ok(prefactor * gamma(order) * 2f64.powf(order - 1.0) * c.powf(-2.0 * order));
    }
    Ok(prefactor * (s / c).powf(order) * bessel_k(order, c * s)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Oscillator {
    Cos,
    Sin,
    /// `sin(x)/x`
    Sinc,
}

impl Oscillator {
    fn eval(self, x: f64) -> f64 {
        match self {
            Oscillator::Cos => x.cos(),
            Oscillator::Sin => x.sin(),
            Oscillator::Sinc if x.abs() < 1e-4 => 1.0 - x * x / 6.0,
            Oscillator::Sinc => x.sin() / x,
        }
    }
}

/// `∫₀^∞ s^k G(s) osc(ωs) ds`.
fn oscillatory(profile: &RadialProfile, weight_power: i32, omega: f64, osc: Oscillator, tol: Tolerance) -> Result<f64> {
    let scale = profile.decay_scale();
    let algebraic = profile.algebraic() && omega > 0.0;
    if algebraic && osc == Oscillator::Sinc {
        return Ok(oscillatory(profile, weight_power - 1, omega, Oscillator::Sin, tol)? / omega);
    }
    let gentle = omega * scale < 1.0 && !algebraic;

    if let (false, Some(theta), false) = (gentle, profile.ray_angle(), osc == Oscillator::Sinc) {
        let dir = Complex64::from_polar(1.0, theta);
        let len = profile.ray_decay_scale(theta).min(1.0 / (omega * theta.sin()));
        let est = adaptive_semi_infinite(
            |t: f64| {
                let z = dir * t;
                let g = profile.eval_complex(z).expect("ray angle implies continuation");
                g * z.powi(weight_power) * (Complex64::i() * omega * z).exp() * dir
            },
            0.0,
            len,
            tol,
        )?;
        return Ok(match osc {
            Oscillator::Cos => est.value.re,
            _ => est.value.im,
        });
    }

    let mut failure = None;
    let mut integrand = |s: f64| match profile.eval(s) {
        Ok(g) => g * s.powi(weight_power) * osc.eval(omega * s),
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };

    let value = if profile.ray_angle().is_some() {
        adaptive_semi_infinite(&mut integrand, 0.0, scale, tol)?.value
    } else {
        // Real axis, truncated, half-period panels.
        let cutoff = profile.cutoff(weight_power)?;
        let mut breaks = vec![0.0];
        if omega > 0.0 {
            let step = PI / omega;
            let mut b = step;
            while b < cutoff {
                breaks.push(b);
                b += step;
            }
        }
        breaks.push(cutoff);
        adaptive_breaks(&mut integrand, &breaks, tol)?.value
    };
    if let Some(e) = failure {
        return Err(e);
    }
    finite(value)
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature { estimate: f64::INFINITY, target: 0.0 })
    }
}

/// `∫₀^∞ G(s) J₀(rs) s ds` on the truncated real axis, one panel per half period.
fn hankel_real_axis(profile: &RadialProfile, r: f64, tol: Tolerance) -> Result<f64> {
    let cutoff = profile.cutoff(1)?;
    let step = PI / r;
    let mut breaks: Vec<f64> = (0..).map(|k| k as f64 * step).take_while(|&b| b < cutoff).collect();
    breaks.push(cutoff);
    let mut failure = None;
    let est = adaptive_breaks(
        |s: f64| match profile.eval(s) {
            Ok(g) => g * s * bessel_j0(r * s),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &breaks,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    finite(est.value)
}

/// `∫₀^∞ G(s) s sin(ωs) ds`, through `sinc` at low frequency to avoid cancellation.
fn sine_moment(profile: &RadialProfile, omega: f64, tol: Tolerance) -> Result<f64> {
    if omega * profile.decay_scale() < 1.0 {
        Ok(omega * oscillatory(profile, 2, omega, Oscillator::Sinc, tol)?)
    } else {
        oscillatory(profile, 1, omega, Oscillator::Sin, tol)
    }
}

/// Inverse Fourier transform of a radial profile in `ℝ^d` (d ∈ {1, 2, 3}) at radius `r`.
pub fn radial_inverse_ft(profile: &RadialProfile, dim: usize, r: f64) -> Result<f64> {
    radial_inverse_ft_with(profile, dim, r, Tolerance::default())
}

pub fn radial_inverse_ft_with(profile: &RadialProfile, dim: usize, r: f64, tol: Tolerance) -> Result<f64> {
    profile.validate()?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be finite and non-negative, got {r}")));
    }
    let root = FRAC_2_PI.sqrt();
    match dim {
        1 => Ok(root * oscillatory(profile, 0, r, Oscillator::Cos, tol)?),
        2 => {
            if r == 0.0 {
                return oscillatory(profile, 1, 0.0, Oscillator::Cos, tol);
            }
            if profile.ray_angle().is_none() {
                return hankel_real_axis(profile, r, tol);
            }
            let scale = profile.decay_scale();
            let mut failure = None;
            let est = adaptive_semi_infinite(
                |t: f64| match sine_moment(profile, r * t.min(600.0).cosh(), tol) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                0.0,
                (1.0 / (r * scale)).asinh().max(1.0),
                tol,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            finite(FRAC_2_PI * est.value)
        }
        3 => {
            if r * profile.decay_scale() < 1.0 {
                return Ok(root * oscillatory(profile, 2, r, Oscillator::Sinc, tol)?);
            }
            Ok(root * oscillatory(profile, 1, r, Oscillator::Sin, tol)? / r)
        }
        _ => Err(Error::InvalidParameter(format!("radial transforms support d ∈ {{1,2,3}}, got {dim}"))),
    }
}

/// `∫_{ℝ^d} |G(‖ξ‖)| dξ` for a radial profile.
pub fn radial_l1_norm(profile: &RadialProfile, dim: usize) -> Result<f64> {
    let est = adaptive_semi_infinite(
        |s: f64| profile.eval(s).map(|g| g.abs() * s.powi(dim as i32 - 1)).unwrap_or(f64::NAN),
        0.0,
        profile.decay_scale(),
        Tolerance::default(),
    )?;
    Ok(sphere_area(dim) * finite(est.value)?)
}

/// Surface area of the unit sphere in `ℝ^d`.
pub fn sphere_area(dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// `∫_a^b |h(s)| s^{d−1} ds` times the sphere area, adaptively.
pub(crate) fn radial_shell_integral(h: impl Fn(f64) -> f64, dim: usize, a: f64, b: f64) -> Result<f64> {
    let est = adaptive(|s: f64| h(s).abs() * s.powi(dim as i32 - 1), a, b, Tolerance::default())?;
    Ok(sphere_area(dim) * est.value)
}
