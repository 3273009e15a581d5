//! The three kernel families: Gaussians, inverse multiquadrics and the
//! p-exponential class `F⁻¹[e^{−α‖·‖^p}]`, in space and in frequency.

pub mod bessel;
pub mod radial;
pub mod table;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub use bessel::{bessel_j0, bessel_k, bessel_k_scaled, ln_bessel_k};
pub use radial::{radial_inverse_ft, radial_l1_norm, sphere_area, RadialProfile};

use crate::error::{Error, Result};
use table::{RadialTable, DEFAULT_TABLE_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Imq,
    Pexp,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Imq => "imq",
            Family::Pexp => "pexp",
        }
    }
}

/// JSON form of a kernel: `{"family":…,"alpha":…,"c":…,"nu":…,"p":…,"dim":d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub dim: usize,
}

impl KernelSpec {
    pub fn gaussian(alpha: f64, dim: usize) -> Self {
        KernelSpec { family: Family::Gaussian, alpha: Some(alpha), c: None, nu: None, p: None, dim }
    }

    pub fn imq(nu: f64, c: f64, dim: usize) -> Self {
        KernelSpec { family: Family::Imq, alpha: None, c: Some(c), nu: Some(nu), p: None, dim }
    }

    pub fn pexp(p: f64, alpha: f64, dim: usize) -> Self {
        KernelSpec { family: Family::Pexp, alpha: Some(alpha), c: None, nu: None, p: Some(p), dim }
    }

    /// The family's growing parameter: `c` for inverse multiquadrics, `α` otherwise.
    pub fn shape(&self) -> Option<f64> {
        match self.family {
            Family::Imq => self.c,
            _ => self.alpha,
        }
    }

    pub fn with_shape(mut self, shape: f64) -> Self {
        match self.family {
            Family::Imq => self.c = Some(shape),
            _ => self.alpha = Some(shape),
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Params {
    Gaussian { alpha: f64 },
    Imq { c: f64, nu: f64 },
    Pexp { alpha: f64, p: f64 },
}

/// One kernel of a family, bound to a dimension.
#[derive(Debug, Clone)]
pub struct Kernel {
    params: Params,
    dim: usize,
    table: Option<Arc<RadialTable>>,
}

fn need(value: Option<f64>, name: &str, family: Family) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidParameter(format!("{} kernel needs \"{name}\"", family.name())))
}

fn default_table_range(dim: usize) -> f64 {
    if dim == 1 {
        2048.0
    } else {
        256.0
    }
}

impl Kernel {
    pub fn gaussian(alpha: f64, dim: usize) -> Result<Self> {
        Self::from_spec(&KernelSpec::gaussian(alpha, dim))
    }

    pub fn imq(nu: f64, c: f64, dim: usize) -> Result<Self> {
        Self::from_spec(&KernelSpec::imq(nu, c, dim))
    }

    pub fn pexp(p: f64, alpha: f64, dim: usize) -> Result<Self> {
        Self::from_spec(&KernelSpec::pexp(p, alpha, dim))
    }

    pub fn from_spec(spec: &KernelSpec) -> Result<Self> {
        Self::from_spec_with_range(spec, default_table_range(spec.dim))
    }

    /// As [`Kernel::from_spec`], with the p-exponential lookup table covering `[0, r_max]`.
    /// Larger radii are still evaluated, by direct quadrature.
    pub fn from_spec_with_range(spec: &KernelSpec, r_max: f64) -> Result<Self> {
        let mut kernel = Self::spectral_only(spec)?;
        if let Params::Pexp { alpha, p } = kernel.params {
            let profile = kernel.spectral_profile();
            let dim = kernel.dim;
            let r_scale = 0.25 * alpha.powf(1.0 / p);
            let table = RadialTable::build(DEFAULT_TABLE_POINTS, r_scale, r_max.max(r_scale), |r| {
                radial_inverse_ft(&profile, dim, r)
            })?;
            kernel.table = Some(Arc::new(table));
        }
        Ok(kernel)
    }

    /// A kernel without the p-exponential lookup table: cheap to build when
    /// only the spectrum is needed. Spatial values still work, by quadrature.
    pub fn spectral_only(spec: &KernelSpec) -> Result<Self> {
        let dim = spec.dim;
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!("kernels support d ∈ {{1,2,3}}, got {dim}")));
        }
        let positive = |v: f64, name: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        let params = match spec.family {
            Family::Gaussian => Params::Gaussian { alpha: positive(need(spec.alpha, "alpha", spec.family)?, "alpha")? },
            Family::Imq => {
                let c = need(spec.c, "c", spec.family)?;
                let nu = need(spec.nu, "nu", spec.family)?;
                if !(c >= 1.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter(format!("imq shape c must be ≥ 1, got {c}")));
                }
                if !(nu > dim as f64 / 2.0 && nu.is_finite()) {
                    return Err(Error::InvalidParameter(format!("imq order ν must exceed d/2 = {}, got {nu}", dim as f64 / 2.0)));
                }
                Params::Imq { c, nu }
            }
            Family::Pexp => Params::Pexp {
                alpha: positive(need(spec.alpha, "alpha", spec.family)?, "alpha")?,
                p: positive(need(spec.p, "p", spec.family)?, "p")?,
            },
        };
        Ok(Kernel { params, dim, table: None })
    }

    pub fn family(&self) -> Family {
        match self.params {
            Params::Gaussian { .. } => Family::Gaussian,
            Params::Imq { .. } => Family::Imq,
            Params::Pexp { .. } => Family::Pexp,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> KernelSpec {
        match self.params {
            Params::Gaussian { alpha } => KernelSpec::gaussian(alpha, self.dim),
            Params::Imq { c, nu } => KernelSpec::imq(nu, c, self.dim),
            Params::Pexp { alpha, p } => KernelSpec::pexp(p, alpha, self.dim),
        }
    }

    /// `α` or `c`.
    pub fn shape(&self) -> f64 {
        match self.params {
            Params::Gaussian { alpha } | Params::Pexp { alpha, .. } => alpha,
            Params::Imq { c, .. } => c,
        }
    }

    /// Radius covered by the cached lookup table, where one exists.
    pub fn table_range(&self) -> Option<f64> {
        self.table.as_ref().map(|t| t.r_max())
    }

    fn check_dim(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    pub fn spatial(&self, x: &[f64]) -> Result<f64> {
        let r = self.check_dim(x)?;
        self.spatial_radial(r)
    }

    pub fn spatial_radial(&self, r: f64) -> Result<f64> {
        match self.params {
            Params::Gaussian { alpha } => Ok((-r * r / (4.0 * alpha)).exp()),
            Params::Imq { c, nu } => Ok((r * r + c * c).powf(-nu)),
            Params::Pexp { .. } => {
                if let Some(v) = self.table.as_ref().and_then(|t| t.lookup(r)) {
                    return Ok(v);
                }
                radial_inverse_ft(&self.spectral_profile(), self.dim, r)
            }
        }
    }

    pub fn spectral(&self, xi: &[f64]) -> Result<f64> {
        let rho = self.check_dim(xi)?;
        self.spectral_radial(rho)
    }

    pub fn spectral_radial(&self, rho: f64) -> Result<f64> {
        self.spectral_profile().eval(rho)
    }

    /// `ln φ̂(ρ)`, finite well past the point where `φ̂` itself underflows.
    pub fn ln_spectral_radial(&self, rho: f64) -> Result<f64> {
        let d = self.dim as f64;
        match self.params {
            Params::Gaussian { alpha } => Ok(-0.5 * d * (2.0 * alpha).ln() - alpha * rho * rho),
            Params::Pexp { alpha, p } => Ok(-alpha * rho.powf(p)),
            Params::Imq { c, nu } => {
                let order = nu - d / 2.0;
                if rho * c < 1e-8 {
                    return Ok(self.spectral_radial(rho)?.ln());
                }
                Ok((1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + order * (rho / c).ln()
                    + ln_bessel_k(order, c * rho)?)
            }
        }
    }

    /// The spectrum `φ̂` as a radial profile.
    ///
    /// The Gaussian spectrum is taken as `(2α)^{−d/2} e^{−αρ²}`. The unitary
    /// transform of `e^{−r²/(4α)}` carries `(2α)^{+d/2}` instead; the two
    /// differ by the constant `(2α)^d`, which cancels from every ratio of
    /// spectral values and only rescales absolute bounds.
    pub fn spectral_profile(&self) -> RadialProfile {
        match self.params {
            Params::Gaussian { alpha } => RadialProfile::StretchedExp {
                scale: (2.0 * alpha).powf(-(self.dim as f64) / 2.0),
                alpha,
                p: 2.0,
            },
            Params::Imq { c, nu } => RadialProfile::ImqSpectrum { c, nu, dim: self.dim },
            Params::Pexp { alpha, p } => RadialProfile::StretchedExp { scale: 1.0, alpha, p },
        }
    }

    /// The kernel itself as a radial profile, for the closed-form families.
    pub fn spatial_profile(&self) -> Option<RadialProfile> {
        match self.params {
            Params::Gaussian { alpha } => Some(RadialProfile::StretchedExp { scale: 1.0, alpha: 0.25 / alpha, p: 2.0 }),
            Params::Imq { c, nu } => Some(RadialProfile::InverseMultiquadric { c, nu }),
            Params::Pexp { .. } => None,
        }
    }

    /// `∫ |φ̂|` over `ℝ^d`.
    pub fn spectral_l1_norm(&self) -> Result<f64> {
        radial_l1_norm(&self.spectral_profile(), self.dim)
    }

    /// `∫ |φ|` over `ℝ^d`.
    ///
    /// The p-exponential kernels are integrated over their table range and the
    /// remainder is bounded by a power-law tail fitted to the last octave;
    /// the tail is infinite when the fitted decay is too slow to integrate.
    pub fn spatial_l1_norm(&self) -> Result<f64> {
        if let Some(profile) = self.spatial_profile() {
            return radial_l1_norm(&profile, self.dim);
        }
        let r_max = self.table_range().unwrap_or_else(|| default_table_range(self.dim));
        let scale = self.shape().powf(1.0 / self.pexp_power());
        let mut breaks = vec![0.0];
        let mut b = scale;
        while b < r_max {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(r_max);
        let mut body = 0.0;
        for w in breaks.windows(2) {
            body += radial::radial_shell_integral(|s| self.spatial_radial(s).unwrap_or(f64::NAN), self.dim, w[0], w[1])?;
        }
        let outer = self.spatial_radial(r_max)?.abs();
        let inner = self.spatial_radial(0.5 * r_max)?.abs();
        let d = self.dim as f64;
        if outer == 0.0 {
            return Ok(body);
        }
        let decay = (inner / outer).ln() / std::f64::consts::LN_2;
        if !(decay > d) {
            return Ok(f64::INFINITY);
        }
        let tail = sphere_area(self.dim) * outer * r_max.powf(d) / (decay - d);
        Ok(body + tail)
    }

    fn pexp_power(&self) -> f64 {
        match self.params {
            Params::Pexp { p, .. } => p,
            _ => 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_2_PI, PI};

    #[test]
    fn spatial_examples() {
        assert_eq!(Kernel::gaussian(1.0, 1).unwrap().spatial(&[0.0]).unwrap(), 1.0);
        assert_eq!(Kernel::imq(1.5, 1.0, 1).unwrap().spatial(&[0.0]).unwrap(), 1.0);
        let pexp = Kernel::pexp(1.0, 1.0, 1).unwrap();
        assert_relative_eq!(pexp.spatial(&[0.0]).unwrap(), 0.79788, epsilon = 1e-5);
        for &x in &[0.3, 1.0, 4.0, 50.0, 700.0, 3000.0] {
            let poisson = FRAC_2_PI.sqrt() / (1.0 + x * x);
            assert_relative_eq!(pexp.spatial(&[x]).unwrap(), poisson, max_relative = 1e-8);
        }
    }

    #[test]
    fn spectral_examples() {
        let g = Kernel::gaussian(1.0, 1).unwrap();
        assert_relative_eq!(g.spectral(&[0.0]).unwrap(), 0.70711, epsilon = 1e-5);
        let p = Kernel::pexp(0.5, 3.0, 2).unwrap();
        assert_relative_eq!(p.spectral(&[0.6, 0.8]).unwrap(), (-3.0f64).exp(), max_relative = 1e-14);
        // Forward radial transform of the inverse multiquadric as oracle.
        let imq = Kernel::imq(1.5, 2.0, 1).unwrap();
        let forward = radial_inverse_ft(&imq.spatial_profile().unwrap(), 1, 1.0).unwrap();
        assert_relative_eq!(imq.spectral(&[1.0]).unwrap(), forward, max_relative = 1e-6);
    }

    #[test]
    fn imq_spectrum_at_origin_is_the_radial_limit() {
        for dim in 1..=3 {
            let imq = Kernel::imq(2.5, 1.5, dim).unwrap();
            let at_zero = imq.spectral_radial(0.0).unwrap();
            let near = imq.spectral_radial(1e-5).unwrap();
            assert_relative_eq!(at_zero, near, max_relative = 1e-6);
            // Same value as the direct transform (2π)^{−d/2} ∫ φ.
            let direct = imq.spatial_l1_norm().unwrap() / (2.0 * PI).powf(dim as f64 / 2.0);
            assert_relative_eq!(at_zero, direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn pexp_two_dimensional_poisson() {
        let k = Kernel::pexp(1.0, 4.0, 2).unwrap();
        for &r in &[0.0f64, 0.5, 3.0, 20.0, 100.0, 255.0, 400.0] {
            let oracle = 4.0 / (16.0 + r * r).powf(1.5);
            assert_relative_eq!(k.spatial_radial(r).unwrap(), oracle, max_relative = 1e-7);
        }
    }

    #[test]
    fn pexp_p2_is_gaussian() {
        // e^{−α‖ξ‖²} is (2α)^{d/2} times the Gaussian e^{−‖x‖²/(4α)} spectrum.
        let alpha = 1.5;
        for dim in 1..=2 {
            let pexp = Kernel::pexp(2.0, alpha, dim).unwrap();
            let gauss = Kernel::gaussian(alpha, dim).unwrap();
            let scale = (2.0 * alpha).powf(dim as f64 / 2.0);
            for &r in &[0.0, 0.7, 2.5, 6.0] {
                assert_relative_eq!(pexp.spatial_radial(r).unwrap(), gauss.spatial_radial(r).unwrap() / scale, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn log_spectrum_matches_spectrum() {
        let kernels = [
            Kernel::gaussian(3.0, 2).unwrap(),
            Kernel::imq(1.5, 4.0, 1).unwrap(),
            Kernel::imq(2.5, 2.0, 3).unwrap(),
            Kernel::pexp(0.7, 2.0, 1).unwrap(),
        ];
        for k in &kernels {
            for &rho in &[0.0, 0.1, 0.5, 1.0, 2.0] {
                let direct = k.spectral_radial(rho).unwrap().ln();
                assert_relative_eq!(k.ln_spectral_radial(rho).unwrap(), direct, max_relative = 1e-12, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(Kernel::imq(0.5, 1.0, 1).is_err());
        assert!(Kernel::imq(1.5, 0.5, 1).is_err());
        assert!(Kernel::gaussian(-1.0, 1).is_err());
        assert!(Kernel::gaussian(1.0, 4).is_err());
        let spec = KernelSpec { family: Family::Pexp, alpha: Some(1.0), c: None, nu: None, p: None, dim: 1 };
        assert!(Kernel::from_spec(&spec).is_err());
        assert!(Kernel::gaussian(1.0, 2).unwrap().spatial(&[1.0]).is_err());
    }

    #[test]
    fn spec_json_rejects_unknown_keys() {
        let ok: KernelSpec = serde_json::from_str(r#"{"family":"imq","c":2,"nu":1.5,"dim":1}"#).unwrap();
        assert_eq!(ok, KernelSpec::imq(1.5, 2.0, 1));
        assert!(serde_json::from_str::<KernelSpec>(r#"{"family":"imq","c":2,"nu":1.5,"dim":1,"beta":1}"#).is_err());
    }

    fn built_ins() -> Vec<Kernel> {
        vec![
            Kernel::gaussian(2.0, 1).unwrap(),
            Kernel::gaussian(1.0, 2).unwrap(),
            Kernel::imq(1.5, 2.0, 1).unwrap(),
            Kernel::imq(2.5, 1.0, 3).unwrap(),
            Kernel::pexp(1.0, 2.0, 1).unwrap(),
            Kernel::pexp(0.5, 1.0, 2).unwrap(),
        ]
    }

    #[test]
    fn spectra_are_positive_and_radially_decreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in built_ins() {
            for _ in 0..1000 {
                let a: f64 = rng.gen_range(0.0..3.0);
                let b: f64 = rng.gen_range(0.0..3.0);
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let (s_lo, s_hi) = (k.spectral_radial(lo).unwrap(), k.spectral_radial(hi).unwrap());
                assert!(s_hi > 0.0);
                assert!(s_lo >= s_hi, "{:?}: φ̂({lo}) = {s_lo} < φ̂({hi}) = {s_hi}", k.spec());
            }
        }
    }

    #[test]
    fn kernels_are_even_and_positive_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for k in built_ins() {
            assert!(k.spatial_radial(0.0).unwrap() > 0.0);
            for _ in 0..50 {
                let x: Vec<f64> = (0..k.dim()).map(|_| rng.gen_range(-10.0..10.0)).collect();
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                assert_eq!(k.spatial(&x).unwrap(), k.spatial(&neg).unwrap());
            }
        }
    }

    #[test]
    fn fourier_consistency_of_closed_forms() {
        let kernels = [
            Kernel::gaussian(1.0, 1).unwrap(),
            Kernel::gaussian(2.0, 2).unwrap(),
            Kernel::gaussian(0.5, 3).unwrap(),
            Kernel::imq(1.5, 1.0, 1).unwrap(),
            Kernel::imq(1.5, 2.0, 2).unwrap(),
            Kernel::imq(2.5, 1.0, 3).unwrap(),
        ];
        for k in &kernels {
            // Undo the Gaussian spectral normalization (see `spectral_profile`).
            let norm = match k.family() {
                Family::Gaussian => (2.0 * k.shape()).powi(k.dim() as i32),
                _ => 1.0,
            };
            for i in 0..=10 {
                let r = 0.5 * i as f64;
                let back = norm * radial_inverse_ft(&k.spectral_profile(), k.dim(), r).unwrap();
                assert_relative_eq!(back, k.spatial_radial(r).unwrap(), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn spatial_integrability() {
        for k in built_ins() {
            let l1 = k.spatial_l1_norm().unwrap();
            assert!(l1.is_finite() && l1 > 0.0, "{:?}: {l1}", k.spec());
        }
        // Gaussian closed form: (4πα)^{d/2}.
        let l1 = Kernel::gaussian(2.0, 2).unwrap().spatial_l1_norm().unwrap();
        assert_relative_eq!(l1, 8.0 * PI, max_relative = 1e-9);
    }
}
