//! Modified Bessel function of the second kind from its integral
//! representation `K_γ(r) = ∫₀^∞ e^{−r cosh t} cosh(γt) dt`, plus `J₀` from
//! its averaged-cosine representation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, GaussLegendre, Tolerance};

const TRUNCATION: f64 = 1e-18;

fn bessel_tolerance(sum: f64) -> Tolerance {
    Tolerance::new(1e-16 * sum.max(f64::MIN_POSITIVE), 1e-13)
}

/// `e^{−r(cosh t − 1)} cosh(γt)`, assembled in the exponent to avoid overflow.
fn scaled_integrand(gamma: f64, r: f64, t: f64) -> f64 {
    let s = (0.5 * t).sinh();
    let decay = -2.0 * r * s * s;
    0.5 * ((decay + gamma * t).exp() + (decay - gamma * t).exp())
}

/// `e^{r} K_γ(r)`.
pub fn bessel_k_scaled(gamma: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("K_γ(r) needs r > 0, got {r}")));
    }
    let gamma = gamma.abs();
    // Panel width tracks the width of the integrand's bulk: ~1/√r for large r.
    let width = (2.0 / r.sqrt()).clamp(0.05, 1.0);
    let mut sum = 0.0;
    let mut lo = 0.0;
    loop {
        let hi = lo + width;
        sum += adaptive(|t| scaled_integrand(gamma, r, t), lo, hi, bessel_tolerance(sum))?.value;
        lo = hi;
        let tail = scaled_integrand(gamma, r, lo);
        // Past the maximum of the integrand, stop once it is negligible.
        let falling = scaled_integrand(gamma, r, lo + 1e-3 * width) < tail;
        if falling && tail < TRUNCATION * sum {
            return Ok(sum);
        }
        if lo > 1e3 {
            return Err(Error::Quadrature { estimate: tail, target: TRUNCATION * sum });
        }
    }
}

/// `K_γ(r)` for `r > 0`; symmetric in `γ`.
pub fn bessel_k(gamma: f64, r: f64) -> Result<f64> {
    Ok(bessel_k_scaled(gamma, r)? * (-r).exp())
}

/// `ln K_γ(r)`, finite even where `K_γ(r)` underflows.
pub fn ln_bessel_k(gamma: f64, r: f64) -> Result<f64> {
    Ok(bessel_k_scaled(gamma, r)?.ln() - r)
}

fn j0_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// `J₀(x) = (2/π) ∫₀^{π/2} cos(x cos θ) dθ`, with one 32-point panel per 20 units of `|x|`.
pub fn bessel_j0(x: f64) -> f64 {
    let panels = 1 + (x.abs() / 20.0) as usize;
    let integral = j0_rule().composite(0.0, FRAC_PI_2, panels, |theta: f64| (x * theta.cos()).cos());
    2.0 * integral / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn half_integer_oracle(order: u32, r: f64) -> f64 {
        // K_{n+1/2}(r) = √(π/(2r)) e^{−r} Σ_k (n+k)! / (k! (n−k)! (2r)^k)
        let n = order as i64;
        let mut sum = 0.0;
        for k in 0..=n {
            let num: f64 = ((n - k + 1)..=(n + k)).map(|v| v as f64).product();
            let den: f64 = (1..=k).map(|v| v as f64).product();
            sum += num / den / (2.0 * r).powi(k as i32);
        }
        (PI / (2.0 * r)).sqrt() * (-r).exp() * sum
    }

    #[test]
    fn half_integer_examples() {
        assert_relative_eq!(bessel_k(0.5, 1.0).unwrap(), 0.46107, epsilon = 1e-5);
        assert_relative_eq!(bessel_k(-0.5, 1.0).unwrap(), bessel_k(0.5, 1.0).unwrap(), max_relative = 1e-15);
        let oracle = (PI / 4.0).sqrt() * (-2.0f64).exp() * 1.5;
        assert_relative_eq!(bessel_k(1.5, 2.0).unwrap(), oracle, max_relative = 1e-10);
        assert_relative_eq!(oracle, 0.179906, epsilon = 1e-6);
    }

    #[test]
    fn half_integer_orders_match_closed_forms() {
        for order in 0..4 {
            for &r in &[0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0, 300.0] {
                let got = bessel_k(order as f64 + 0.5, r).unwrap();
                assert_relative_eq!(got, half_integer_oracle(order, r), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn integer_orders_against_reference_values() {
        // Reference values from standard tables.
        assert_relative_eq!(bessel_k(0.0, 1.0).unwrap(), 0.421_024_438_240_708_3, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(1.0, 1.0).unwrap(), 0.601_907_230_197_234_6, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(1.0, 0.1).unwrap(), 9.853_844_780_870_606, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(2.0, 5.0).unwrap(), 0.005_308_943_712_223_46, max_relative = 1e-10);
    }

    #[test]
    fn differentiation_identity() {
        // d/dr[r^γ K_γ(r)] = −r^γ K_{γ−1}(r), checked by central differences.
        let gamma = 1.3;
        for &r in &[0.5, 2.0, 7.0] {
            let h = 1e-5;
            let f = |x: f64| x.powf(gamma) * bessel_k(gamma, x).unwrap();
            let fd = (f(r + h) - f(r - h)) / (2.0 * h);
            assert_relative_eq!(fd, -r.powf(gamma) * bessel_k(gamma - 1.0, r).unwrap(), max_relative = 1e-7);
        }
    }

    #[test]
    fn scaled_survives_underflow() {
        let ln = ln_bessel_k(0.5, 2000.0).unwrap();
        let oracle = 0.5 * (PI / 4000.0).ln() - 2000.0;
        assert_relative_eq!(ln, oracle, max_relative = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_k(0.5, 0.0).is_err());
        assert!(bessel_k(0.5, -1.0).is_err());
    }

    #[test]
    fn j0_reference_values() {
        assert_relative_eq!(bessel_j0(0.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, epsilon = 1e-14);
        assert_relative_eq!(bessel_j0(10.0), -0.245_935_764_451_348_3, epsilon = 1e-14);
        assert_relative_eq!(bessel_j0(100.0), 0.019_985_850_304_223_122, epsilon = 1e-14);
        // First zero.
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-14);
    }
}
