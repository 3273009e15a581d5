//! Numerical checks of the interpolator conditions (integrability, a positive
//! spectral floor on the body, summable dyadic annulus maxima), of the
//! regularity ratios along a shape-parameter grid, and of the dyadic series
//! bounds behind them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::kernels::{Family, Kernel, KernelSpec};
use crate::quadrature::{adaptive_semi_infinite, Tolerance};

/// Cap on the dyadic index in annulus sums.
pub const J_MAX: u32 = 60;
/// Annulus sums stop once a term falls below this fraction of the partial sum.
pub const TAIL_RATIO: f64 = 1e-16;
/// Sample count of the non-radial annulus fallback.
pub const ANNULUS_SAMPLES: usize = 4096;
/// Largest accepted spread of `S_α/M_α` over a grid.
pub const R1_SPREAD_LIMIT: f64 = 3.0;
/// Regularity grid used when none is given: `1, 2, 4, …, 512`. The top value
/// is large enough for the p-exponential's slow `ratio_r2` decay.
pub const DEFAULT_SHAPE_GRID: [f64; 10] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0];

fn check_index(j: u32) -> Result<()> {
    if j == 0 {
        Err(Error::InvalidParameter("annulus index j must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Radius `2^{j−1} δ`, the smallest norm in `2^j (Z ∖ ½Z)`.
fn annulus_radius(body: &ConvexBody, j: u32) -> f64 {
    2f64.powi(j as i32) * body.metrics().annulus_min_norm
}

/// `M_j = sup |φ̂(2^j u)|` over `u ∈ Z ∖ ½Z`. Built-in spectra are radial and
/// nonincreasing, so the supremum sits at the smallest norm of the annulus.
pub fn annulus_sup(kernel: &Kernel, body: &ConvexBody, j: u32) -> Result<f64> {
    check_index(j)?;
    kernel.spectral_radial(annulus_radius(body, j))
}

/// `ln M_j`, finite after `M_j` underflows.
pub fn ln_annulus_sup(kernel: &Kernel, body: &ConvexBody, j: u32) -> Result<f64> {
    check_index(j)?;
    kernel.ln_spectral_radial(annulus_radius(body, j))
}

/// Sampled `M_j` for spectra without radial structure: the maximum over
/// [`ANNULUS_SAMPLES`] seeded uniform points of `Z ∖ ½Z`.
pub fn annulus_sup_sampled(spectrum: impl Fn(&[f64]) -> f64, body: &ConvexBody, j: u32, seed: u64) -> Result<f64> {
    check_index(j)?;
    let r = body.circumscribed_radius();
    let scale = 2f64.powi(j as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut accepted = 0;
    while accepted < ANNULUS_SAMPLES {
        let u: Vec<f64> = (0..body.dim()).map(|_| rng.gen_range(-r..=r)).collect();
        let half: Vec<f64> = u.iter().map(|v| 2.0 * v).collect();
        if body.contains(&u)? && !body.contains(&half)? {
            accepted += 1;
            let xi: Vec<f64> = u.iter().map(|v| scale * v).collect();
            best = best.max(spectrum(&xi).abs());
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRow {
    pub j: u32,
    pub m_j: f64,
    /// `2^{jd/2} M_j`
    pub weighted: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolatorReport {
    pub kernel: KernelSpec,
    pub spatial_l1: f64,
    pub spectral_l1: f64,
    pub integrable: bool,
    /// `ε = min φ̂` over the body, at its circumscribed radius.
    pub epsilon: f64,
    pub floor_positive: bool,
    pub annuli: Vec<AnnulusRow>,
    /// Last term over the partial sum.
    pub tail_ratio: f64,
    pub summable: bool,
}

impl InterpolatorReport {
    pub fn pass(&self) -> bool {
        self.integrable && self.floor_positive && self.summable
    }
}

fn annulus_table(kernel: &Kernel, body: &ConvexBody) -> Result<(Vec<AnnulusRow>, f64)> {
    let d = kernel.dim() as f64;
    let mut rows = Vec::new();
    let mut sum = 0.0;
    let mut tail = f64::INFINITY;
    for j in 1..=J_MAX {
        let m_j = annulus_sup(kernel, body, j)?;
        let weighted = 2f64.powf(j as f64 * d / 2.0) * m_j;
        sum += weighted;
        rows.push(AnnulusRow { j, m_j, weighted, partial_sum: sum });
        tail = if sum > 0.0 { weighted / sum } else { f64::INFINITY };
        if tail < TAIL_RATIO {
            break;
        }
    }
    Ok((rows, tail))
}

pub fn check_interpolator(kernel: &Kernel, body: &ConvexBody) -> Result<InterpolatorReport> {
    if kernel.dim() != body.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), got: body.dim() });
    }
    let spatial_l1 = kernel.spatial_l1_norm()?;
    let spectral_l1 = kernel.spectral_l1_norm()?;
    let integrable = spatial_l1.is_finite() && spectral_l1.is_finite() && spatial_l1 > 0.0 && spectral_l1 > 0.0;
    let epsilon = kernel.spectral_radial(body.circumscribed_radius())?;
    let (annuli, tail_ratio) = annulus_table(kernel, body)?;
    let monotone = annuli.windows(2).all(|w| w[1].partial_sum >= w[0].partial_sum);
    let total = annuli.last().map_or(0.0, |r| r.partial_sum);
    let last = annuli.last().map_or(f64::INFINITY, |r| r.weighted);
    let summable = monotone && total.is_finite() && total > 0.0 && last < 1e-14 * total;
    Ok(InterpolatorReport {
        kernel: kernel.spec(),
        spatial_l1,
        spectral_l1,
        integrable,
        epsilon,
        floor_positive: epsilon > 0.0,
        annuli,
        tail_ratio,
        summable,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityRow {
    /// Shape parameter: `α`, or `c` for inverse multiquadrics.
    pub alpha: f64,
    /// `M_α = φ̂(δ)`
    pub m_alpha: f64,
    /// `m_α(β) = φ̂(β)`
    pub m_beta: f64,
    /// `γ_α = φ̂(1)`
    pub gamma: f64,
    /// `S_α = Σ_j 2^{jd/2} M_j(α)`
    pub s_alpha: f64,
    pub ratio_r1: f64,
    /// `M_α³ / (m_α(β) γ_α²)`, assembled from logarithms.
    pub ratio_r2: f64,
    pub ln_ratio_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub kernel: KernelSpec,
    pub delta: f64,
    pub beta: f64,
    pub limiting_case: bool,
    pub rows: Vec<RegularityRow>,
    /// `max/min` of `ratio_r1` over the grid.
    pub r1_spread: f64,
    pub r1_bounded: bool,
    pub r2_decreasing: bool,
}

impl RegularityReport {
    pub fn pass(&self) -> bool {
        self.r1_bounded && self.r2_decreasing
    }
}

/// Checks `0 < β < δ ≤ R ≤ 1`; returns whether this is the limiting case `β = δ = 1`.
pub fn check_band_geometry(body: &ConvexBody, beta: f64) -> Result<bool> {
    let m = body.metrics();
    let tol = 1e-12;
    if !(m.circumscribed <= 1.0 + tol) {
        return Err(Error::InvalidParameter(format!("body must lie in the unit ball, circumscribed radius {}", m.circumscribed)));
    }
    if body.is_limiting_case() && (beta - 1.0).abs() <= tol {
        return Ok(true);
    }
    if !(beta > 0.0 && beta < m.inscribed) {
        return Err(Error::InvalidParameter(format!("band radius β = {beta} must lie in (0, δ) with δ = {}", m.inscribed)));
    }
    Ok(false)
}

/// One row of the regularity table for a single kernel.
pub fn regularity_row(kernel: &Kernel, body: &ConvexBody, beta: f64) -> Result<RegularityRow> {
    let delta = body.inscribed_radius();
    let ln_m = kernel.ln_spectral_radial(delta)?;
    let ln_mb = kernel.ln_spectral_radial(beta)?;
    let ln_g = kernel.ln_spectral_radial(1.0)?;
    let d = kernel.dim() as f64;
    // S_α/M_α = Σ_j 2^{jd/2} e^{ln M_j − ln M_α}, immune to underflow.
    let mut ratio_r1 = 0.0;
    for j in 1..=J_MAX {
        let term = 2f64.powf(j as f64 * d / 2.0) * (ln_annulus_sup(kernel, body, j)? - ln_m).exp();
        ratio_r1 += term;
        if term < TAIL_RATIO * ratio_r1 {
            break;
        }
    }
    let ln_ratio_r2 = 3.0 * ln_m - ln_mb - 2.0 * ln_g;
    Ok(RegularityRow {
        alpha: kernel.shape(),
        m_alpha: ln_m.exp(),
        m_beta: ln_mb.exp(),
        gamma: ln_g.exp(),
        s_alpha: ratio_r1 * ln_m.exp(),
        ratio_r1,
        ratio_r2: ln_ratio_r2.exp(),
        ln_ratio_r2,
    })
}

pub fn regularity_sweep(spec: &KernelSpec, body: &ConvexBody, beta: f64, grid: &[f64]) -> Result<RegularityReport> {
    if spec.dim != body.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim, got: body.dim() });
    }
    let limiting_case = check_band_geometry(body, beta)?;
    check_grid(grid)?;
    let rows = grid
        .iter()
        .map(|&a| regularity_row(&Kernel::spectral_only(&spec.with_shape(a))?, body, beta))
        .collect::<Result<Vec<_>>>()?;
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.ratio_r1), hi.max(r.ratio_r1)));
    let r1_spread = hi / lo;
    Ok(RegularityReport {
        kernel: *spec,
        delta: body.inscribed_radius(),
        beta,
        limiting_case,
        r2_decreasing: rows.windows(2).all(|w| w[1].ln_ratio_r2 < w[0].ln_ratio_r2),
        rows,
        r1_spread,
        r1_bounded: r1_spread < R1_SPREAD_LIMIT,
    })
}

/// Grids must be non-empty, positive and strictly increasing.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("shape grid is empty".into()));
    }
    if grid.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::Config(format!("shape grid entries must be positive: {grid:?}")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("shape grid must be strictly increasing: {grid:?}")));
    }
    Ok(())
}

/// Decay exponent `κ` of the error bound `e^{κ·shape}`, with whether `(δ, β)`
/// lies in the region where the bound is proved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateExponent {
    pub value: f64,
    pub feasible: bool,
}

/// * Gaussian: `β² + 2 − 3δ²`, for `δ ∈ (√(2/3), 1)`, `β < √(3δ² − 2)`.
/// * Inverse multiquadric (in `c`): `β + 2 − 3δ`, for `δ ∈ (2/3, 1)`, `β < 3δ − 2`.
/// * p-exponential: `β^p + 2 − 3δ^p`, for `(2/3)^{1/p} < δ < 1`, `β < (3δ^p − 2)^{1/p}`.
pub fn theoretical_exponent(family: Family, delta: f64, beta: f64, p: Option<f64>) -> RateExponent {
    let p = match family {
        Family::Gaussian => 2.0,
        Family::Imq => 1.0,
        Family::Pexp => p.unwrap_or(f64::NAN),
    };
    let value = beta.powf(p) + 2.0 - 3.0 * delta.powf(p);
    let feasible = p > 0.0 && delta < 1.0 && 3.0 * delta.powf(p) > 2.0 && beta > 0.0 && beta.powf(p) < 3.0 * delta.powf(p) - 2.0;
    RateExponent { value, feasible }
}

pub fn exponent_for(spec: &KernelSpec, delta: f64, beta: f64) -> RateExponent {
    theoretical_exponent(spec.family, delta, beta, spec.p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesCheck {
    pub d: f64,
    pub a: f64,
    /// `Σ_{j≥1} D^j e^{−a 2^{j−1}}`
    pub sum: f64,
    pub exp_neg_a: f64,
    pub ratio: f64,
    /// `max{ln D / ln 2, 2 / ln 2}`
    pub threshold: f64,
    pub admissible: bool,
    /// `∫₁^∞ 2^x e^{−a 2^{x−1}} dx` by quadrature, against `(2/(a ln 2)) e^{−a}`.
    pub integral_quadrature: f64,
    pub integral_closed_form: f64,
}

pub fn series_threshold(d: f64) -> f64 {
    (d.ln() / std::f64::consts::LN_2).max(2.0 / std::f64::consts::LN_2)
}

pub fn series_bound_check(d: f64, a: f64) -> Result<SeriesCheck> {
    if !(d > 1.0 && d.is_finite() && a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("series check needs D > 1 and a > 0, got D = {d}, a = {a}")));
    }
    // Terms relative to e^{−a}: D^j e^{−a(2^{j−1} − 1)}.
    let mut ratio = 0.0;
    for j in 1..=200 {
        let term = (j as f64 * d.ln() - a * (2f64.powi(j - 1) - 1.0)).exp();
        ratio += term;
        if term < 1e-16 * ratio {
            break;
        }
    }
    let exp_neg_a = (-a).exp();
    let ln2 = std::f64::consts::LN_2;
    let integral_quadrature = adaptive_semi_infinite(
        |y: f64| {
            let x = 1.0 + y;
            (x * ln2 - a * (2f64.powf(x - 1.0))).exp()
        },
        0.0,
        1.0,
        Tolerance::new(1e-300, 1e-12),
    )?
    .value;
    let threshold = series_threshold(d);
    Ok(SeriesCheck {
        d,
        a,
        sum: ratio * exp_neg_a,
        exp_neg_a,
        ratio,
        threshold,
        admissible: a >= threshold,
        integral_quadrature,
        integral_closed_form: 2.0 / (a * ln2) * exp_neg_a,
    })
}
