//! Kernel collocation: the symmetric system `Σ_n a_n φ(x_m − x_n) = f(x_m)`
//! and the resulting interpolant `Σ_n a_n φ(· − x_n)`.

use std::io::Write;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::bandlimited::BandlimitedFunction;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::nodes::NodeSet;

/// Relative diagonal shift for the single retry of a failed factorization.
pub const JITTER: f64 = 1e-12;

/// Node residual bound `1e−8 (1 + ‖s‖_∞)`.
pub fn solver_tolerance(samples: &[f64]) -> f64 {
    1e-8 * (1.0 + max_abs(samples))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Refinement sweeps applied when the first residual misses the tolerance.
const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone)]
pub struct CollocationSystem {
    kernel: Kernel,
    nodes: NodeSet,
    matrix: DMatrix<f64>,
    factor: Option<Cholesky<f64, Dyn>>,
    jitter: f64,
}

impl CollocationSystem {
    /// Dense matrix `A_{mn} = φ(x_m − x_n)`, filled from the upper triangle so it is exactly symmetric.
    pub fn assemble(kernel: &Kernel, nodes: &NodeSet) -> Result<Self> {
        if kernel.dim() != nodes.dim() {
            return Err(Error::DimensionMismatch { expected: kernel.dim(), got: nodes.dim() });
        }
        let n = nodes.len();
        if n == 0 {
            return Err(Error::TooFewNodes { needed: 1, got: 0 });
        }
        let pts = nodes.points();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|m| (m..n).map(|k| kernel.spatial_radial(distance(&pts[m], &pts[k]))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut matrix = DMatrix::zeros(n, n);
        for (m, row) in rows.iter().enumerate() {
            for (offset, &v) in row.iter().enumerate() {
                matrix[(m, m + offset)] = v;
                matrix[(m + offset, m)] = v;
            }
        }
        Ok(CollocationSystem { kernel: kernel.clone(), nodes: nodes.clone(), matrix, factor: None, jitter: 0.0 })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// Diagonal shift used by the factorization; zero unless the retry was needed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn is_factorized(&self) -> bool {
        self.factor.is_some()
    }

    /// Cholesky factorization; on failure, one retry with `1e−12·trace(A)/N` on the diagonal.
    pub fn factorize(&mut self) -> Result<()> {
        if self.factor.is_some() {
            return Ok(());
        }
        if let Some(c) = Cholesky::new(self.matrix.clone()) {
            self.factor = Some(c);
            return Ok(());
        }
        let n = self.matrix.nrows();
        let jitter = JITTER * self.matrix.trace() / n as f64;
        let mut shifted = self.matrix.clone();
        for k in 0..n {
            shifted[(k, k)] += jitter;
        }
        match Cholesky::new(shifted) {
            Some(c) => {
                self.jitter = jitter;
                self.factor = Some(c);
                Ok(())
            }
            None => Err(Error::Factorization { jitter }),
        }
    }

    /// `(max L_ii / min L_ii)²`, a cheap stand-in for the 2-norm condition number.
    pub fn condition_estimate(&self) -> Option<f64> {
        let l = self.factor.as_ref()?.l_dirty().diagonal();
        let (lo, hi) = l.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Some((hi / lo).powi(2))
    }

    /// Smallest eigenvalue by a dense symmetric eigensolve, for direct checks on small systems.
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigen().eigenvalues.min()
    }

    fn residual(&self, coefficients: &DVector<f64>, samples: &DVector<f64>) -> DVector<f64> {
        samples - &self.matrix * coefficients
    }

    pub fn solve(&mut self, samples: &[f64]) -> Result<Interpolant> {
        let n = self.nodes.len();
        if samples.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: samples.len() });
        }
        self.factorize()?;
        let factor = self.factor.as_ref().expect("factorized above");
        let rhs = DVector::from_column_slice(samples);
        let tolerance = solver_tolerance(samples);
        let mut a = factor.solve(&rhs);
        let mut r = self.residual(&a, &rhs);
        for _ in 0..REFINEMENT_STEPS {
            if r.amax() <= tolerance {
                break;
            }
            a += factor.solve(&r);
            r = self.residual(&a, &rhs);
        }
        let residual = r.amax();
        let condition = self.condition_estimate().unwrap_or(f64::INFINITY);
        if !(residual <= tolerance) {
            return Err(Error::Residual { residual, tolerance, condition });
        }
        Ok(Interpolant {
            kernel: self.kernel.clone(),
            nodes: self.nodes.clone(),
            coefficients: a.as_slice().to_vec(),
            samples: samples.to_vec(),
            residual,
            jitter: self.jitter,
            condition,
        })
    }
}

/// `I f = Σ_j a_j φ(· − x_j)`.
#[derive(Debug, Clone)]
pub struct Interpolant {
    kernel: Kernel,
    nodes: NodeSet,
    coefficients: Vec<f64>,
    samples: Vec<f64>,
    residual: f64,
    jitter: f64,
    condition: f64,
}

impl Interpolant {
    /// Assemble, factorize and solve in one step.
    pub fn fit(kernel: &Kernel, nodes: &NodeSet, samples: &[f64]) -> Result<Self> {
        CollocationSystem::assemble(kernel, nodes)?.solve(samples)
    }

    /// An interpolant with given coefficients, e.g. for evaluation only.
    pub fn from_coefficients(kernel: &Kernel, nodes: &NodeSet, coefficients: Vec<f64>) -> Result<Self> {
        if kernel.dim() != nodes.dim() {
            return Err(Error::DimensionMismatch { expected: kernel.dim(), got: nodes.dim() });
        }
        if coefficients.len() != nodes.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: coefficients.len() });
        }
        Ok(Interpolant {
            kernel: kernel.clone(),
            nodes: nodes.clone(),
            samples: vec![f64::NAN; coefficients.len()],
            coefficients,
            residual: f64::NAN,
            jitter: 0.0,
            condition: f64::NAN,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// `‖A a − s‖_∞` after the solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.nodes.dim() {
            return Err(Error::DimensionMismatch { expected: self.nodes.dim(), got: x.len() });
        }
        let mut sum = 0.0;
        for (p, a) in self.nodes.points().iter().zip(&self.coefficients) {
            if *a != 0.0 {
                sum += a * self.kernel.spatial_radial(distance(x, p))?;
            }
        }
        Ok(sum)
    }

    pub fn evaluate_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.evaluate(x)).collect()
    }

    /// CSV with header `x1,…,xd,coefficient`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let header: Vec<String> = (1..=self.nodes.dim()).map(|a| format!("x{a}")).collect();
        writeln!(out, "{},coefficient", header.join(","))?;
        for (p, a) in self.nodes.points().iter().zip(&self.coefficients) {
            let coords: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{},{a:.16e}", coords.join(","))?;
        }
        Ok(())
    }
}

/// Pointwise mean of the interpolants on several node sets. It converges to
/// `f` like each term does, but in general interpolates on none of them.
#[derive(Debug, Clone)]
pub struct AveragedApproximant {
    parts: Vec<Interpolant>,
}

impl AveragedApproximant {
    pub fn parts(&self) -> &[Interpolant] {
        &self.parts
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for p in &self.parts {
            sum += p.evaluate(x)?;
        }
        Ok(sum / self.parts.len() as f64)
    }

    pub fn evaluate_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.evaluate(x)).collect()
    }
}

/// Solves one system per node set (in parallel); errors name the failing set.
pub fn averaged(kernel: &Kernel, nodesets: &[NodeSet], f: &BandlimitedFunction) -> Result<AveragedApproximant> {
    if nodesets.is_empty() {
        return Err(Error::InvalidParameter("averaging needs at least one node set".into()));
    }
    let parts = nodesets
        .par_iter()
        .enumerate()
        .map(|(index, x)| {
            f.sample(x)
                .and_then(|s| Interpolant::fit(kernel, x, &s))
                .map_err(|e| Error::NodeSetSolve { index, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AveragedApproximant { parts })
}
