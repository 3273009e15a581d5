//! Dense radial lookup table with cubic Lagrange interpolation.
//!
//! Samples sit on `r = r_s (e^u − 1)` for `u` uniform, which is logarithmic
//! spacing for `r ≫ r_s` and uniform near the origin, so `r = 0` is a node.

use rayon::prelude::*;

use crate::error::Result;

pub const DEFAULT_TABLE_POINTS: usize = 2048;

#[derive(Debug, Clone)]
pub struct RadialTable {
    r_scale: f64,
    r_max: f64,
    du: f64,
    values: Vec<f64>,
}

impl RadialTable {
    pub fn build(points: usize, r_scale: f64, r_max: f64, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Self> {
        assert!(points >= 4, "cubic interpolation needs four samples");
        let u_max = (r_max / r_scale).ln_1p();
        let du = u_max / (points - 1) as f64;
        let values = (0..points)
            .into_par_iter()
            .map(|k| f(r_scale * (k as f64 * du).exp_m1()))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialTable { r_scale, r_max, du, values })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Interpolated value, or `None` outside `[0, r_max]`.
    pub fn lookup(&self, r: f64) -> Option<f64> {
        if !(0.0..=self.r_max).contains(&r) {
            return None;
        }
        let u = (r / self.r_scale).ln_1p() / self.du;
        let n = self.values.len();
        let base = (u.floor() as usize).saturating_sub(1).min(n - 4);
        let t = u - base as f64;
        let v = &self.values[base..base + 4];
        // Lagrange basis on nodes 0, 1, 2, 3.
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        Some(l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3])
    }
}
