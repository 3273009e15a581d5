//! Gauss–Legendre rules and globally adaptive Gauss–Kronrod integration.
//!
//! Everything numerical in the crate bottoms out here: spectral quadrature of
//! bandlimited functions, the Bessel `K` integral, radial Fourier transforms
//! and the window error norms. Integrands may be real or complex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Stopping rule for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-12, rel: 1e-9, max_intervals: 4000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, ..Default::default() }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// An n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre polynomial `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<T: QuadValue>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> T) -> T {
        self.mapped(a, b).fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
    }

    /// Composite rule over `panels` equal sub-intervals of [a, b].
    pub fn composite<T: QuadValue>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: impl FnMut(f64) -> T,
    ) -> T {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels).fold(T::zero(), |acc, k| {
            let lo = a + h * k as f64;
            acc + self.integrate(lo, lo + h, &mut f)
        })
    }

    /// Nodes and weights of the composite rule, flattened.
    pub fn composite_rule(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|k| {
                let lo = a + h * k as f64;
                self.mapped(lo, lo + h).collect::<Vec<_>>()
            })
            .collect()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).magnitude())
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive G7/K15 integration over each consecutive pair of `breaks`.
pub fn adaptive_breaks<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate<T>> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (value, error) = kronrod15(&mut f, w[0], w[1]);
        total = total + value;
        total_err += error;
        heap.push(Piece { a: w[0], b: w[1], value, error });
    }
    let mut evaluations = 15 * heap.len();
    while total_err > tol.target(total.magnitude()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature { estimate: total_err, target: tol.target(total.magnitude()) });
        }
        let worst = heap.pop().expect("heap holds at least one interval");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval has collapsed to machine resolution.
            return Err(Error::Quadrature { estimate: total_err, target: tol.target(total.magnitude()) });
        }
        let (lv, le) = kronrod15(&mut f, worst.a, mid);
        let (rv, re) = kronrod15(&mut f, mid, worst.b);
        evaluations += 30;
        total = total - worst.value + lv + rv;
        total_err += le + re - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Piece { a: mid, b: worst.b, value: rv, error: re });
        if heap.len() % 64 == 0 {
            // Re-sum to shed accumulated cancellation in the running totals.
            total = heap.iter().fold(T::zero(), |acc, p| acc + p.value);
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(Estimate { value: total, error: total_err, evaluations })
}

pub fn adaptive<T: QuadValue>(f: impl FnMut(f64) -> T, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<T>> {
    adaptive_breaks(f, &[a, b], tol)
}

/// Integral over [a, ∞) through the substitution `s = a + scale · u / (1 − u)`.
///
/// `scale` should be of the order of the integrand's decay length.
pub fn adaptive_semi_infinite<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    scale: f64,
    tol: Tolerance,
) -> Result<Estimate<T>> {
    let g = move |u: f64| {
        let one_minus = 1.0 - u;
        let s = a + scale * u / one_minus;
        let jac = scale / (one_minus * one_minus);
        if !s.is_finite() {
            return T::zero();
        }
        f(s) * jac
    };
    adaptive_breaks(g, &[0.0, 0.5, 0.75, 0.875, 1.0], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1usize, 2, 5, 16, 64, 200, 256] {
            let rule = GaussLegendre::new(n);
            let sum: f64 = rule.weights().iter().sum();
            assert_relative_eq!(sum, 2.0, epsilon = 1e-13);
            let deg = (2 * n - 1).min(40);
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert_relative_eq!(got, 1.0 / (deg as f64 + 1.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let rule = GaussLegendre::new(33);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        for (x, y) in rule.nodes().iter().zip(rule.nodes().iter().rev()) {
            assert!((x + y).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, Tolerance::new(1e-13, 1e-12)).unwrap();
        assert_relative_eq!(est.value, 2.0 / 3.0, epsilon = 1e-11);
    }

    #[test]
    fn semi_infinite_exponential_and_algebraic() {
        let est = adaptive_semi_infinite(|x: f64| (-x).exp(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-10);
        let est = adaptive_semi_infinite(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, std::f64::consts::FRAC_PI_2, epsilon = 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let est = adaptive(|x: f64| Complex64::new(0.0, x).exp(), 0.0, std::f64::consts::PI, Tolerance::default())
            .unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn failure_reports_estimate() {
        let tol = Tolerance { abs: 0.0, rel: 0.0, max_intervals: 8 };
        match adaptive(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, tol) {
            Err(Error::Quadrature { estimate, .. }) => assert!(estimate > 0.0),
            other => panic!("expected quadrature failure, got {other:?}"),
        }
    }
}
