use std::f64::consts::PI;

use bandrec::conditions::{regularity_sweep, DEFAULT_SHAPE_GRID};
use bandrec::experiments::{run_sweep, SweepConfig};
use bandrec::interpolation::solver_tolerance;
use bandrec::kernels::bessel_k;
use bandrec::nodes::NodeSpec;
use bandrec::{synthesize, BodyKind, BodySpec, ConvexBody, Family, FunctionSpec, KernelSpec, Preset};
use proptest::prelude::*;

/// Energy of the discrete transform of `f` beyond `1.05 β`, relative to the total.
fn out_of_band_energy(preset: Preset, beta: f64) -> f64 {
    let f = synthesize(&FunctionSpec::new(preset, beta, 3), 1).unwrap();
    let (h, half) = (0.5, 800);
    let samples: Vec<(f64, f64)> = (-half..=half).map(|k| {
        let x = h * k as f64;
        (x, f.eval(&[x]).unwrap())
    }).collect();
    let (mut inside, mut outside) = (0.0, 0.0);
    let n_xi = 1500;
    let xi_max = 3.0;
    for m in 0..n_xi {
        let xi = xi_max * (m as f64 + 0.5) / n_xi as f64;
        let (re, im) = samples.iter().fold((0.0, 0.0), |(re, im), &(x, v)| (re + v * (xi * x).cos(), im - v * (xi * x).sin()));
        let power = re * re + im * im;
        if xi > 1.05 * beta {
            outside += power;
        } else {
            inside += power;
        }
    }
    outside / (inside + outside)
}

#[test]
fn sampled_functions_stay_in_band() {
    for preset in [Preset::CosineBump, Preset::RandomSmooth] {
        let rel = out_of_band_energy(preset, 0.5);
        assert!(rel < 1e-6, "{preset:?}: out-of-band fraction {rel:e}");
    }
}

#[test]
fn smooth_presets_decay_at_infinity() {
    for (preset, dim) in [(Preset::CosineBump, 1), (Preset::RandomSmooth, 1), (Preset::CosineBump, 2), (Preset::RandomSmooth, 2)] {
        let f = synthesize(&FunctionSpec::new(preset, 0.5, 5), dim).unwrap();
        // Shell maxima of |f| over ‖x‖ ∈ [20, 40].
        let shells: Vec<f64> = (0..4)
            .map(|s| {
                let lo = 20.0 + 5.0 * s as f64;
                (0..=200)
                    .map(|k| {
                        let r = lo + 5.0 * k as f64 / 200.0;
                        let x: Vec<f64> = if dim == 1 { vec![r] } else { vec![r * 0.6, r * 0.8] };
                        f.eval(&x).unwrap().abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(shells.last().unwrap() < shells.first().unwrap(), "{preset:?} d={dim}: {shells:?}");
        assert!(shells.windows(2).filter(|w| w[1] < w[0]).count() >= 2, "{preset:?} d={dim}: {shells:?}");
    }
}

proptest! {
    #[test]
    fn bessel_sandwich(dim in 1usize..=3, excess in 0.5f64..6.0, r in 0.1f64..=10.0) {
        // γ = ν − d/2 with ν = d/2 + excess.
        let g = excess;
        let k = bessel_k(g, r).unwrap();
        let base = r.powf(-0.5) * (-r).exp();
        prop_assert!((PI / 2.0).sqrt() * base <= k * (1.0 + 1e-14), "d={} γ={} r={}", dim, g, r);
        prop_assert!(k <= (2.0 * PI).sqrt() * base * (g * g / (2.0 * r)).exp() * (1.0 + 1e-14));
    }
}

fn acceptance_ratio_configs() -> Vec<(KernelSpec, ConvexBody, f64)> {
    let ball = ConvexBody::ball(1, 0.95).unwrap();
    vec![
        (KernelSpec::gaussian(1.0, 1), ball, 0.5),
        (KernelSpec::imq(1.5, 1.0, 1), ball, 0.4),
        (KernelSpec::pexp(1.0, 1.0, 2), ConvexBody::cube(2, 0.5f64.sqrt()).unwrap(), 0.1),
    ]
}

#[test]
fn second_ratio_vanishes_on_default_grid() {
    for (spec, body, beta) in acceptance_ratio_configs() {
        let rep = regularity_sweep(&spec, &body, beta, &DEFAULT_SHAPE_GRID).unwrap();
        assert!(rep.r2_decreasing && rep.r1_bounded, "{:?}", spec.family);
        let top = rep.rows.last().unwrap().ratio_r2;
        assert!(top < 1e-3, "{:?}: ratio_r2 {top:e} at α = {}", spec.family, DEFAULT_SHAPE_GRID[9]);
    }
}

#[test]
fn first_ratio_bounded_over_a_decade() {
    let grid: Vec<f64> = (0..=10).map(|k| 10f64.powf(k as f64 / 10.0) * 2.0).collect();
    for (spec, body, beta) in acceptance_ratio_configs() {
        let rep = regularity_sweep(&spec, &body, beta, &grid).unwrap();
        assert!(rep.r1_spread < 3.0, "{:?}: spread {}", spec.family, rep.r1_spread);
    }
}

fn sweep(kernel: KernelSpec, beta: f64, grid: Vec<f64>) -> SweepConfig {
    SweepConfig {
        name: None,
        body: BodySpec { kind: BodyKind::Ball, dim: 1, size: 0.95 },
        kernel,
        function: FunctionSpec::new(Preset::RandomSmooth, beta, 7),
        nodes: NodeSpec::Kadec { h: 0.95, jmin: -48, jmax: 48, l: 0.2, seed: 7 },
        grid,
        window: 0.5,
        sup_points: Some(1024),
        l2_order: Some(100),
        limiting_case: false,
    }
}

#[test]
fn rows_interpolate_and_error_tracks_ratio() {
    let imq = KernelSpec { family: Family::Imq, alpha: None, c: None, nu: Some(1.5), p: None, dim: 1 };
    let cases = [
        sweep(KernelSpec { alpha: None, ..KernelSpec::gaussian(1.0, 1) }, 0.5, vec![1.0, 2.0, 4.0, 6.0]),
        sweep(imq, 0.4, vec![2.0, 4.0, 8.0]),
    ];
    for cfg in &cases {
        let rep = run_sweep(cfg).unwrap();
        let f = synthesize(&cfg.function, 1).unwrap();
        let nodes = cfg.nodes.generate().unwrap();
        let tol = solver_tolerance(&f.sample(&nodes).unwrap());
        for r in &rep.rows {
            assert!(r.is_ok(), "{:?}", r);
            assert!(r.node_residual <= tol, "α={} residual {}", r.alpha, r.node_residual);
        }
        // ln(sup error) − ln(ratio_r2) should not grow with α: the constant set
        // by the coarsest row (plus one decade) bounds every later row.
        let gaps: Vec<f64> = rep.rows.iter().map(|r| r.sup_error.ln() - r.ratio_r2.ln()).collect();
        assert!(gaps.iter().all(|g| *g <= gaps[0] + 10f64.ln()), "{:?}: {gaps:?}", cfg.kernel.family);
    }
}
