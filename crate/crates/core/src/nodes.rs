//! Finite node sequences: Kadec-perturbed lattices on the line and their
//! tensor products for boxes.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Perturbations must stay below a quarter of the lattice spacing.
pub const KADEC_LIMIT: f64 = 0.25;

/// How a node set was produced; also its JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum NodeSpec {
    /// `x_j = (π/h)(j + ε_j)`, `ε_j ~ U[−L, L]`, `j = jmin..=jmax`.
    Kadec {
        h: f64,
        jmin: i64,
        jmax: i64,
        #[serde(rename = "L")]
        l: f64,
        seed: u64,
    },
    Tensor { axes: Vec<NodeSpec> },
    /// Points supplied directly.
    Explicit,
}

impl NodeSpec {
    pub fn generate(&self) -> Result<NodeSet> {
        match self {
            NodeSpec::Kadec { h, jmin, jmax, l, seed } => kadec_1d(*h, *jmin..=*jmax, *l, *seed),
            NodeSpec::Tensor { axes } => {
                let sets = axes.iter().map(NodeSpec::generate).collect::<Result<Vec<_>>>()?;
                tensor(&sets)
            }
            NodeSpec::Explicit => Err(Error::Config("explicit node sets carry no generator".into())),
        }
    }

    /// Replaces every seed; tensor axes get `seed, seed + 1, …` so they stay independent.
    pub fn with_seed(&self, seed: u64) -> NodeSpec {
        match self {
            NodeSpec::Kadec { h, jmin, jmax, l, .. } => NodeSpec::Kadec { h: *h, jmin: *jmin, jmax: *jmax, l: *l, seed },
            NodeSpec::Tensor { axes } => NodeSpec::Tensor {
                axes: axes.iter().enumerate().map(|(k, a)| a.with_seed(seed.wrapping_add(k as u64))).collect(),
            },
            NodeSpec::Explicit => NodeSpec::Explicit,
        }
    }
}

/// An ordered set of distinct points in `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    dim: usize,
    points: Vec<Vec<f64>>,
    spec: NodeSpec,
    separation: Option<f64>,
}

impl NodeSet {
    /// Validates dimensions and distinctness.
    pub fn from_points(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_spec(dim, points, NodeSpec::Explicit)
    }

    fn with_spec(dim: usize, points: Vec<Vec<f64>>, spec: NodeSpec) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("node dimension must be positive".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if let Some(p) = points.iter().find(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidParameter(format!("non-finite node {p:?}")));
        }
        let separation = if points.len() >= 2 {
            let (q, first, second) = min_distance(&points);
            if q == 0.0 {
                return Err(Error::DuplicateNodes { first, second });
            }
            Some(q)
        } else {
            None
        };
        Ok(NodeSet { dim, points, spec, separation })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    pub fn spec(&self) -> &NodeSpec {
        &self.spec
    }

    /// Per-axis `(min, max)` of the bounding box.
    pub fn hull(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|a| {
                self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[a]), hi.max(p[a])))
            })
            .collect()
    }

    /// Largest distance between two nodes.
    pub fn diameter(&self) -> f64 {
        self.hull().iter().map(|(lo, hi)| (hi - lo).powi(2)).sum::<f64>().sqrt()
    }

    /// Concatenation; fails if the union has coincident points.
    pub fn union(&self, other: &NodeSet) -> Result<NodeSet> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        NodeSet::from_points(self.dim, points)
    }

    /// CSV with header `index,x1,…,xd`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        let header: Vec<String> = (1..=self.dim).map(|a| format!("x{a}")).collect();
        writeln!(out, "index,{}", header.join(","))?;
        for (k, p) in self.points.iter().enumerate() {
            let coords: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{k},{}", coords.join(","))?;
        }
        Ok(())
    }
}

/// Minimum pairwise distance: sorted scan on the line, all pairs otherwise.
pub fn separation(nodes: &NodeSet) -> Result<f64> {
    nodes.separation.ok_or(Error::TooFewNodes { needed: 2, got: nodes.len() })
}

fn min_distance(points: &[Vec<f64>]) -> (f64, usize, usize) {
    let mut best = (f64::INFINITY, 0, 0);
    if points[0].len() == 1 {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
        for w in order.windows(2) {
            let d = points[w[1]][0] - points[w[0]][0];
            if d < best.0 {
                best = (d, w[0].min(w[1]), w[0].max(w[1]));
            }
        }
        return best;
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best.0 {
                best = (d2, i, j);
            }
        }
    }
    (best.0.sqrt(), best.1, best.2)
}

pub fn kadec_1d(h: f64, j_range: std::ops::RangeInclusive<i64>, l: f64, seed: u64) -> Result<NodeSet> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("lattice parameter h must be positive, got {h}")));
    }
    if !(0.0..KADEC_LIMIT).contains(&l) {
        return Err(Error::InvalidParameter(format!("perturbation bound L must lie in [0, 1/4), got {l}")));
    }
    if j_range.is_empty() {
        return Err(Error::InvalidParameter(format!("empty index range {j_range:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spacing = PI / h;
    let points = j_range
        .clone()
        .map(|j| {
            let eps = if l > 0.0 { rng.gen_range(-l..=l) } else { 0.0 };
            vec![spacing * (j as f64 + eps)]
        })
        .collect();
    let spec = NodeSpec::Kadec { h, jmin: *j_range.start(), jmax: *j_range.end(), l, seed };
    NodeSet::with_spec(1, points, spec)
}

/// Cartesian product; the last axis varies fastest.
pub fn tensor(axes: &[NodeSet]) -> Result<NodeSet> {
    if axes.is_empty() {
        return Err(Error::InvalidParameter("tensor product needs at least one axis".into()));
    }
    if let Some(a) = axes.iter().find(|a| a.dim != 1) {
        return Err(Error::DimensionMismatch { expected: 1, got: a.dim });
    }
    if axes.iter().any(NodeSet::is_empty) {
        return Err(Error::InvalidParameter("tensor axis without nodes".into()));
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        points = points
            .iter()
            .flat_map(|prefix| {
                axis.points.iter().map(move |p| {
                    let mut q = prefix.clone();
                    q.push(p[0]);
                    q
                })
            })
            .collect();
    }
    let spec = NodeSpec::Tensor { axes: axes.iter().map(|a| a.spec.clone()).collect() };
    // Distinct axis values make the product distinct; separation is still computed exactly.
    NodeSet::with_spec(axes.len(), points, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unperturbed_lattices() {
        let x = kadec_1d(1.0, -2..=2, 0.0, 0).unwrap();
        let got: Vec<f64> = x.points().iter().map(|p| p[0]).collect();
        assert_eq!(got, vec![-2.0 * PI, -PI, 0.0, PI, 2.0 * PI]);
        let x = kadec_1d(0.95, 0..=1, 0.0, 0).unwrap();
        assert_relative_eq!(x.point(1)[0], 3.30694, epsilon = 1e-5);
    }

    #[test]
    fn perturbations_within_bound() {
        for seed in 0..20 {
            let x = kadec_1d(1.0, -50..=50, 0.2, seed).unwrap();
            for (p, j) in x.points().iter().zip(-50..=50) {
                assert!((p[0] - PI * j as f64).abs() <= PI * 0.2 + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_large_perturbation() {
        assert!(kadec_1d(1.0, 0..=4, 0.25, 0).is_err());
        assert!(kadec_1d(1.0, 0..=4, -0.1, 0).is_err());
        assert!(kadec_1d(0.0, 0..=4, 0.1, 0).is_err());
    }

    #[test]
    fn separation_examples() {
        let line = |v: &[f64]| NodeSet::from_points(1, v.iter().map(|&x| vec![x]).collect()).unwrap();
        assert_relative_eq!(separation(&line(&[0.0, PI, 2.0 * PI])).unwrap(), PI, epsilon = 1e-15);
        assert_eq!(separation(&line(&[0.0, 1.0, 1.5])).unwrap(), 0.5);
        assert!(separation(&line(&[1.0])).is_err());
        assert!(matches!(
            NodeSet::from_points(1, vec![vec![0.0], vec![1.0], vec![0.0]]),
            Err(Error::DuplicateNodes { first: 0, second: 2 })
        ));
    }

    #[test]
    fn tensor_examples() {
        let axis = kadec_1d(1.0, 0..=1, 0.0, 0).unwrap();
        let grid = tensor(&[axis.clone(), axis]).unwrap();
        assert_eq!(grid.points(), &[vec![0.0, 0.0], vec![0.0, PI], vec![PI, 0.0], vec![PI, PI]]);
        let five = kadec_1d(1.0, -2..=2, 0.0, 0).unwrap();
        let grid = tensor(&[five.clone(), five]).unwrap();
        assert_eq!(grid.len(), 25);
        assert_relative_eq!(separation(&grid).unwrap(), PI, epsilon = 1e-14);
        assert!(tensor(&[]).is_err());
        assert!(tensor(&[grid]).is_err());
    }

    fn brute_force(x: &NodeSet) -> f64 {
        let mut q = f64::INFINITY;
        for i in 0..x.len() {
            for j in 0..i {
                let d: f64 = x.point(i).iter().zip(x.point(j)).map(|(a, b)| (a - b).powi(2)).sum();
                q = q.min(d.sqrt());
            }
        }
        q
    }

    #[test]
    fn spec_json_round_trip() {
        let json = r#"{"generator":"tensor","axes":[
            {"generator":"kadec","h":0.7,"jmin":-8,"jmax":8,"L":0.2,"seed":7},
            {"generator":"kadec","h":0.7,"jmin":-8,"jmax":8,"L":0.2,"seed":8}]}"#;
        let spec: NodeSpec = serde_json::from_str(json).unwrap();
        let x = spec.generate().unwrap();
        assert_eq!(x.len(), 289);
        assert_eq!(x.spec(), &spec);
        let back: NodeSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let typo = r#"{"generator":"kadec","h":1,"jmin":0,"jmax":3,"L":0.1,"seed":1,"sead":2}"#;
        assert!(serde_json::from_str::<NodeSpec>(typo).is_err());
    }

    #[test]
    fn csv_export() {
        let x = kadec_1d(1.0, 0..=1, 0.0, 0).unwrap();
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,x1");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2].split(',').nth(1).unwrap().parse::<f64>().unwrap(), PI);
    }

    proptest! {
        #[test]
        fn kadec_separation_bound(h in 0.3f64..3.0, l in 0.0f64..0.2499, seed in any::<u64>(), n in 2i64..60) {
            let x = kadec_1d(h, -n..=n, l, seed).unwrap();
            let q = separation(&x).unwrap();
            prop_assert!(q >= PI / h * (1.0 - 2.0 * l) - 1e-12);
            prop_assert!(q > 0.5 * PI / h);
            prop_assert_eq!(q, brute_force(&x));
            prop_assert_eq!(&x, &kadec_1d(h, -n..=n, l, seed).unwrap());
        }

        #[test]
        fn tensor_separation_dominates_axes(l in 0.0f64..0.24, s1 in any::<u64>(), s2 in any::<u64>()) {
            let a = kadec_1d(1.0, -4..=4, l, s1).unwrap();
            let b = kadec_1d(0.8, -3..=3, l, s2).unwrap();
            let grid = tensor(&[a.clone(), b.clone()]).unwrap();
            let q = separation(&grid).unwrap();
            prop_assert!(q >= separation(&a).unwrap().min(separation(&b).unwrap()) - 1e-12);
            prop_assert!((q - brute_force(&grid)).abs() < 1e-12);
        }
    }
}
