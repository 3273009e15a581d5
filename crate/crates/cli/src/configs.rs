//! Config schemas of the subcommands that are not plain sweeps.

use bandrec::{BodySpec, FunctionSpec, KernelSpec, NodeSpec};
use serde::{Deserialize, Serialize};

pub const BODY_KEYS: &str = "  body.kind        \"ball\" or \"box\"
  body.dim         dimension d (1, 2 or 3)
  body.size        ball radius or box half-width; the body must fit in the unit ball";

pub const KERNEL_KEYS: &str = "  kernel.family    \"gaussian\", \"imq\" or \"pexp\"
  kernel.dim       dimension d; must equal body.dim
  kernel.alpha     shape of gaussian and pexp kernels
  kernel.c         shape of imq kernels, c ≥ 1
  kernel.nu        imq exponent, ν > d/2
  kernel.p         pexp exponent, p > 0";

pub const NODE_KEYS: &str = "  nodes.generator  \"kadec\" or \"tensor\"
  nodes.h          (kadec) half-width of the band the lattice π/h is matched to
  nodes.jmin       (kadec) first lattice index
  nodes.jmax       (kadec) last lattice index
  nodes.L          (kadec) perturbation bound, 0 ≤ L < 1/4
  nodes.seed       (kadec) RNG seed
  nodes.axes       (tensor) list of kadec specs, one per axis";

pub const FUNCTION_KEYS: &str = "  function.preset    \"indicator\", \"cosine_bump\" or \"random_smooth\"
  function.beta      band radius β, 0 < β < δ
  function.seed      RNG seed of the random_smooth coefficients (default 0)
  function.amplitude scale factor (default 1)";

pub const SHARED_FLAGS: &str = "\
Outputs go to OUT/<subcommand>-<hash>/, where <hash> is derived from the
subcommand and the effective config. A run whose check fails writes its files
to OUT/<subcommand>-<hash>.failed/ instead. Unknown config keys are rejected.

Exit status: 0 pass, 1 check failed, 2 usage or config error, 3 numerical failure.";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelCheckConfig {
    pub kernel: KernelSpec,
    pub body: BodySpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodesConfig {
    pub nodes: NodeSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolateConfig {
    pub kernel: KernelSpec,
    pub nodes: NodeSpec,
    pub function: FunctionSpec,
    /// Extra points at which interpolant and target are compared.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eval: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatiosConfig {
    pub kernel: KernelSpec,
    pub body: BodySpec,
    pub beta: f64,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
}

fn default_grid() -> Vec<f64> {
    bandrec::conditions::DEFAULT_SHAPE_GRID.to_vec()
}

pub fn check_kernel_help() -> String {
    format!(
        "Checks the interpolator conditions of one kernel on a body: integrability of φ and φ̂,\n\
         a positive spectral floor on the body, and summability of the dyadic annulus suprema.\n\n\
         Config keys:\n{KERNEL_KEYS}\n{BODY_KEYS}\n\n\
         Writes report.json; exit 1 if any condition fails.\n\n{SHARED_FLAGS}"
    )
}

pub fn nodes_help() -> String {
    format!(
        "Generates a node set and reports its size, hull and separation.\n\n\
         Config keys:\n{NODE_KEYS}\n\n\
         --seed replaces the node seed (tensor axis k gets seed + k).\n\
         Writes nodes.csv and summary.json.\n\n{SHARED_FLAGS}"
    )
}

pub fn interpolate_help() -> String {
    format!(
        "Solves the collocation system for one kernel, node set and bandlimited target.\n\n\
         Config keys:\n{KERNEL_KEYS}\n{NODE_KEYS}\n{FUNCTION_KEYS}\n  \
         eval             optional list of points [[x1, …, xd], …] where the interpolant\n                   \
         is compared with the target\n\n\
         --seed replaces both the node seed and function.seed.\n\
         Writes coefficients.csv and summary.json; exit 1 if the node residual exceeds\n\
         the solver tolerance.\n\n{SHARED_FLAGS}"
    )
}

pub fn sweep_help() -> String {
    format!(
        "Runs a convergence sweep over a grid of shape values and fits the error rate.\n\n\
         Config keys:\n  name             optional label\n{BODY_KEYS}\n{KERNEL_KEYS}\n                   \
         (the shape key may be omitted; each grid value replaces it)\n{FUNCTION_KEYS}\n{NODE_KEYS}\n  \
         grid             strictly increasing shape values\n  \
         window           central fraction of the node hull where errors are measured (default 0.5)\n  \
         sup_points       sup-error grid points per axis (default 2048 / 128 / 32 for d = 1 / 2 / 3)\n  \
         l2_order         Gauss–Legendre order per axis for the L2 error (default 200 / 64 / 16)\n  \
         limiting_case    true to allow β = δ = 1 on the unit ball (default false)\n\n\
         --seed replaces both the node seed and function.seed.\n\
         Writes report.csv and summary.json; exit 1 if the rate check fails,\n\
         3 if a row failed numerically.\n\n{SHARED_FLAGS}"
    )
}

pub fn ratios_help() -> String {
    format!(
        "Tabulates the regularity ratios of a kernel family over a shape grid.\n\n\
         Config keys:\n{KERNEL_KEYS}\n                   \
         (the shape key may be omitted; each grid value replaces it)\n{BODY_KEYS}\n  \
         beta             band radius β, 0 < β < δ\n  \
         grid             strictly increasing shape values (default 1, 2, 4, …, 512)\n\n\
         Writes ratios.csv and report.json; exit 1 if the first ratio is not bounded\n\
         or the second is not strictly decreasing.\n\n{SHARED_FLAGS}"
    )
}

pub fn series_help() -> String {
    format!(
        "Evaluates S(D, a) = Σ_(j≥1) D^j e^(−a 2^(j−1)) and compares it with e^(−a).\n\
         Takes no config file; a defaults to the admissibility threshold for D.\n\n\
         Prints sum, e^(−a) and their ratio; with --out also writes series.json.\n\
         Exit 1 if a is below the threshold (the bound is then not claimed).\n\n{SHARED_FLAGS}"
    )
}
