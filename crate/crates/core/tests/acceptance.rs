//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! By default the binary exits 0 once every criterion has been evaluated, so
//! `cargo test` reports honest failures without aborting the workspace run.
//! Set `ACCEPTANCE_STRICT=1` to exit nonzero when any criterion fails.

use std::time::Instant;

use kinchem::kinetic::{monotone_iterate_b, picard_contraction_test, simulate, SimulationConfig};
use kinchem::moments::{
    asymptotic_roots, build_matrix, char_poly_pn, compute_moments, critical_masses,
    integrate_cascade, model_b_order2, q_n, sample_cascade, second_order_steady_state, stability,
    MomentTable,
};
use kinchem::ode::Tolerances;
use kinchem::quad::GaussLegendre;
use kinchem::signal::{cross_moment, signal_moments};
use kinchem::stationary::{
    inverse_transform, large_mass_comparison, solve_stationary, solve_stationary_spectral,
    SpectralOptions, StationaryOptions,
};
use kinchem::{make_grids, DensityProfile, ModelKind, PhaseField, UniformGrid};
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

const TIGHT: Tolerances = Tolerances {
    abs: 1e-12,
    rel: 1e-12,
};

/// Second-order table of a Gaussian product with unit variances and mass `m`.
fn unit_gaussian_moments(m: f64) -> MomentTable {
    let mut t = MomentTable::zeros(2);
    t.set(0, 0, m);
    t.set(2, 0, m);
    t.set(0, 2, m);
    t
}

fn max_deviation(t: &MomentTable, target: (f64, f64, f64)) -> f64 {
    (t.get(2, 0) - target.0)
        .abs()
        .max((t.get(1, 1) - target.1).abs())
        .max((t.get(0, 2) - target.2).abs())
}

fn criterion_1() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [3.0, 4.0, 10.0] {
        let target = second_order_steady_state(m).expect("supercritical");
        let closed = (2.0 * m / (m - 2.0), 0.0, 2.0 * m * m / (m - 2.0));
        let t_end = 40.0 / (m - 2.0);
        let traj =
            integrate_cascade(&unit_gaussian_moments(m), m, t_end, TIGHT).expect("valid data");
        let dev = max_deviation(traj.last(), closed);
        let formula = max_deviation(
            &{
                let mut t = MomentTable::zeros(2);
                t.set(2, 0, target.0);
                t.set(1, 1, target.1);
                t.set(0, 2, target.2);
                t
            },
            closed,
        );
        let slowest = stability(2, m).expect("order 2").max_real_part;
        ok &= dev <= 1e-8 && formula <= 1e-12 && traj.diverged_at.is_none();
        let rel = dev / closed.0.abs().max(closed.2.abs());
        parts.push(format!(
            "M={m}: |A(t={t_end:.3}) - A*| = {dev:.2e}, relative {rel:.1e} (slowest Re λ = {slowest:.4}, e-folds {:.1})",
            -slowest * t_end
        ));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_2() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [0.5, 1.0, 1.9] {
        let r = stability(2, m).expect("order 2");
        let traj =
            integrate_cascade(&unit_gaussian_moments(m), m, 5000.0, TIGHT).expect("valid data");
        ok &= r.max_real_part > 1e-9 && traj.diverged_at.is_some();
        parts.push(format!(
            "M={m}: max Re λ = {:.3e}, diverged at t = {:?}",
            r.max_real_part, traj.diverged_at
        ));
    }
    for m in [2.1, 4.0, 10.0] {
        let r = stability(2, m).expect("order 2");
        let target = second_order_steady_state(m).expect("supercritical");
        let traj =
            integrate_cascade(&unit_gaussian_moments(m), m, 1000.0, TIGHT).expect("valid data");
        let scale = target.0.abs().max(target.2.abs());
        let dev = max_deviation(traj.last(), target);
        ok &= r.max_real_part < -1e-9 && traj.diverged_at.is_none() && dev <= 1e-6 * scale;
        parts.push(format!(
            "M={m}: max Re λ = {:.3e}, rel. deviation at t=1000 {:.1e}",
            r.max_real_part,
            dev / scale
        ));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let m = 4.0;
    let (x, v) = make_grids(20.0, 257, 20.0, 257).expect("grid");
    let f0 = PhaseField::from_fn(x, v, |a, b| (-(a * a + b * b) / 2.0).exp())
        .unwrap()
        .normalized(m)
        .unwrap();
    let mut cfg = SimulationConfig::new(ModelKind::A, 0.01, 5.0);
    cfg.stride = 10;
    let traj = simulate(&cfg, &f0).expect("simulation");
    let ode = sample_cascade(&compute_moments(&f0, 2), m, &traj.times, TIGHT).expect("cascade");
    let mut errs = [0.0f64; 3];
    for (c, (i, j)) in [(2, 0), (1, 1), (0, 2)].into_iter().enumerate() {
        let scale = ode
            .tables
            .iter()
            .map(|t| t.get(i, j).abs())
            .fold(0.0, f64::max);
        let worst = traj
            .moments
            .iter()
            .zip(&ode.tables)
            .map(|(p, o)| (p.get(i, j) - o.get(i, j)).abs())
            .fold(0.0, f64::max);
        errs[c] = worst / scale;
    }
    let drift = traj.max_mass_drift();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = errs.iter().all(|&e| e <= 0.02) && drift <= 1e-6 * m && elapsed <= 300.0;
    verdict(
        ok,
        format!(
            "closure rel. errors A20 {:.3e}, A11 {:.3e}, A02 {:.3e}; mass drift {:.2e} (limit {:.0e}); outflow {:.2e}; {elapsed:.1}s",
            errs[0],
            errs[1],
            errs[2],
            drift,
            1e-6 * m,
            traj.outflow.last().copied().unwrap_or(0.0)
        ),
    )
}

fn criterion_4() -> Verdict {
    let table = critical_masses(12, 10.0).expect("scan");
    let m: Vec<f64> = table
        .iter()
        .map(|e| e.critical_mass().unwrap_or(f64::NAN))
        .collect();
    let exact = (m[0] - 2.0).abs().max((m[1] - 2.0).abs());
    let m4 = m[2];
    let bracket = q_n(4, m4 - 1e-9) * q_n(4, m4 + 1e-9) < 0.0;
    let increasing = m[2..].windows(2).all(|w| w[0] < w[1]);
    let ok = exact <= 1e-10
        && m4 > 2.0
        && m4 < 3.0
        && (m4 - 2.5127).abs() < 5e-5
        && bracket
        && increasing;
    let list: Vec<String> = m
        .iter()
        .enumerate()
        .map(|(k, v)| format!("M_{}={v:.6}", k + 2))
        .collect();
    verdict(ok, format!("|M_2-2|,|M_3-2| ≤ {exact:.1e}; sign change at M_4: {bracket}; increasing 4..12: {increasing}; {}", list.join(" ")))
}

fn criterion_5() -> Verdict {
    let mut rng = StdRng::seed_from_u64(5);
    let (mut worst, mut worst_zero) = (0.0f64, 0.0f64);
    for order in 1..=8 {
        for _ in 0..100 {
            let m = rng.random_range(0.05..12.0);
            let lambda = rng.random_range(-15.0..5.0);
            let c = build_matrix(order, m).unwrap().matrix;
            let n = c.nrows();
            let det = (c - DMatrix::<f64>::identity(n, n) * lambda).determinant();
            worst = worst.max((char_poly_pn(order, m, lambda) - det).abs() / det.abs());
            let factorial: f64 = (1..=order).map(|k| k as f64).product();
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sign * m * factorial * q_n(order, m);
            let lhs = char_poly_pn(order, m, 0.0);
            worst_zero = worst_zero.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
        }
    }
    verdict(
        worst <= 1e-10 && worst_zero <= 1e-10,
        format!("max rel. error p_N vs det {worst:.2e}; p_N(0) identity {worst_zero:.2e}"),
    )
}

fn criterion_6() -> Verdict {
    let (order, m) = (3, 1e3);
    let mut eig = stability(order, m).unwrap().eigenvalues;
    let near_n = eig
        .iter()
        .enumerate()
        .map(|(k, z)| (k, (z - nalgebra::Complex::new(-(order as f64), 0.0)).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    eig.remove(near_n.0);
    let mut worst: f64 = 0.0;
    for mu in asymptotic_roots(order) {
        let target = nalgebra::Complex::new(-m, 0.0) - mu;
        let (k, d) = eig
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(d);
        eig.remove(k);
    }
    verdict(
        near_n.1 <= 0.01 && worst <= 0.01 && eig.is_empty(),
        format!(
            "distance to -N {:.2e}; max distance to -M-μ_j {worst:.2e}",
            near_n.1
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [1.0, 4.0] {
        let r = model_b_order2(m, [1.0, 0.0, 1.0], 200.0).unwrap();
        let max_re = r
            .jacobian_eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= r.min_diagonal > 0.0
            && r.integral_defect <= 1e-8
            && r.exceeds_threshold_at.is_some()
            && max_re > 0.0;
        parts.push(format!(
            "M={m}: min diag {:.3}, dD/dt defect {:.1e}, >1e6 at t={:?}, Jacobian max Re λ {max_re:.3}",
            r.min_diagonal, r.integral_defect, r.exceeds_threshold_at
        ));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let m = 4.0;
    let (x, v) = make_grids(20.0, 513, 20.0, 513).unwrap();
    let res = match solve_stationary(m, &x, &v, &StationaryOptions::default()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("solver failed: {e}")),
    };
    let (a20, a11, a02) = (
        res.moments.get(2, 0),
        res.moments.get(1, 1),
        res.moments.get(0, 2),
    );
    let (e20, _, e02) = (2.0 * m / (m - 2.0), 0.0, 2.0 * m * m / (m - 2.0));
    let moments_ok = (a20 - e20).abs() <= 0.01 * e20
        && (a02 - e02).abs() <= 0.01 * e02
        && a11.abs() <= 0.01 * (a20 * a02).sqrt();
    let weighted_limit = 60.0 * m.powi(3) / (m - 2.0).powi(2);
    let spectral = solve_stationary_spectral(m, &SpectralOptions::default()).unwrap();
    let (rho_s, _) = inverse_transform(&spectral.profile, &x);
    let l1 = rho_s.l1_distance(&res.rho);
    let ok = res.update < 1e-9 * m
        && moments_ok
        && res.max_velocity_weighted <= m * m * (1.0 + 1e-6)
        && res.weighted_mass <= weighted_limit
        && res.residual <= 1e-3 * m
        && l1 <= 1e-3;
    verdict(
        ok,
        format!(
            "update {:.1e}; moments ({a20:.4}, {a11:.1e}, {a02:.4}); max|v|f {:.3}; ∬(1+x²+v²)f {:.2} ≤ {weighted_limit}; residual {:.2e}; physical vs spectral L1 {l1:.2e}",
            res.update, res.max_velocity_weighted, res.weighted_mass, res.residual
        ),
    )
}

/// Gaussian mixture with parts `(center, width, weight)`.
struct Mixture(Vec<(f64, f64, f64)>);

impl Mixture {
    fn density(&self, x: f64) -> f64 {
        self.0
            .iter()
            .map(|&(c, w, a)| a * (-(x - c) * (x - c) / (2.0 * w * w)).exp())
            .sum()
    }

    /// Closed-form moments `∫ x^k ρ`.
    fn moments(&self, order: usize) -> Vec<f64> {
        (0..=order)
            .map(|k| {
                self.0
                    .iter()
                    .map(|&(c, w, a)| {
                        let z = a * w * (2.0 * std::f64::consts::PI).sqrt();
                        let w2 = w * w;
                        z * match k {
                            0 => 1.0,
                            1 => c,
                            2 => c * c + w2,
                            3 => c.powi(3) + 3.0 * c * w2,
                            4 => c.powi(4) + 6.0 * c * c * w2 + 3.0 * w2 * w2,
                            _ => unreachable!(),
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// `½ ∫ e^{-|x-y|} ρ(y) dy`, Gauss–Legendre on half-unit panels away from the kink.
    fn signal(&self, x: f64, gl: &GaussLegendre) -> f64 {
        let mut total = 0.0;
        for p in 0..100 {
            for (&u, &w) in gl.nodes.iter().zip(&gl.weights) {
                let d = 0.5 * (p as f64 + u);
                total += 0.5 * w * (-d).exp() * (self.density(x - d) + self.density(x + d));
            }
        }
        0.5 * total
    }
}

fn criterion_9() -> Verdict {
    let mut rng = StdRng::seed_from_u64(9);
    let gl = GaussLegendre::unit(10);
    let h = 0.1;
    let xg = UniformGrid::new(20.0, 401).unwrap();
    let vg = UniformGrid::new(30.0, 601).unwrap();
    let sg = UniformGrid::new(50.0, 1001).unwrap();
    let (wx, wv, ws) = (
        xg.trapezoid_weights(),
        vg.trapezoid_weights(),
        sg.trapezoid_weights(),
    );
    let (mut worst_s, mut worst_c, mut worst_v) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let parts = rng.random_range(1..=4);
        let mix = Mixture(
            (0..parts)
                .map(|_| {
                    (
                        rng.random_range(-3.0..3.0),
                        rng.random_range(0.4..2.0),
                        rng.random_range(0.1..2.0),
                    )
                })
                .collect(),
        );
        let r = mix.moments(4);
        let s_lib = signal_moments(&r);
        let s: Vec<f64> = sg.nodes().iter().map(|&y| mix.signal(y, &gl)).collect();
        for k in 0..=4 {
            let quad: f64 = sg
                .nodes()
                .iter()
                .zip(&s)
                .zip(&ws)
                .map(|((y, sv), w)| w * y.powi(k as i32) * sv)
                .sum();
            worst_s = worst_s.max((quad - s_lib.get(k)).abs() / quad.abs().max(r[0]));
        }
        // S(x_i + v_j) sits on the S grid because all three grids share the spacing h.
        let offset = |i: usize, j: usize| ((xg.node(i) + vg.node(j) + 50.0) / h).round() as usize;
        let rho: Vec<f64> = xg.nodes().iter().map(|&x| mix.density(x)).collect();
        for order in 0..=4usize {
            for n in 0..=order {
                let mut direct = 0.0;
                for i in 0..xg.len() {
                    let xi = xg.node(i);
                    let mut inner = 0.0;
                    for j in 0..vg.len() {
                        inner += wv[j] * vg.node(j).powi(n as i32) * s[offset(i, j)];
                    }
                    direct += wx[i] * xi.powi((order - n) as i32) * rho[i] * inner;
                }
                let closed = cross_moment(n, order, &s_lib, &r).unwrap();
                worst_c = worst_c.max((direct - closed).abs() / direct.abs().max(r[0] * r[0]));
            }
        }
        for _ in 0..10 {
            let i = rng.random_range(150..=250usize);
            let x = xg.node(i);
            let vint = |p: i32| -> f64 {
                (0..vg.len())
                    .map(|j| wv[j] * vg.node(j).powi(p) * s[offset(i, j)])
                    .sum()
            };
            let checks = [
                (vint(0), r[0]),
                (vint(1), r[1] - x * r[0]),
                (vint(2), r[2] - 2.0 * x * r[1] + x * x * r[0] + 2.0 * r[0]),
            ];
            for (lhs, rhs) in checks {
                worst_v = worst_v.max((lhs - rhs).abs() / r[0]);
            }
        }
    }
    verdict(
        worst_s <= 1e-6 && worst_c <= 1e-6 && worst_v <= 1e-6,
        format!("signal moments {worst_s:.1e}; cross moments {worst_c:.1e}; velocity identities {worst_v:.1e}"),
    )
}

fn criterion_10() -> Verdict {
    let mut rng = StdRng::seed_from_u64(10);
    let grid = UniformGrid::new(8.0, 81).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, t) in [(1.0, 0.5), (2.0, 0.3)] {
        let mut worst = f64::NEG_INFINITY;
        let mut bound = 0.0;
        for _ in 0..10 {
            let mut random = || {
                let mix = Mixture(
                    (0..3)
                        .map(|_| {
                            (
                                rng.random_range(-3.0..3.0),
                                rng.random_range(0.4..1.5),
                                rng.random_range(0.1..1.0),
                            )
                        })
                        .collect(),
                );
                let p = DensityProfile::from_fn(grid, |x| mix.density(x)).unwrap();
                p.scaled(m / p.mass())
            };
            let (a, b) = (random(), random());
            let rep = picard_contraction_test(&a, &b, t, m).unwrap();
            worst = worst.max(rep.ratio);
            bound = rep.bound;
        }
        ok &= worst <= 2.0 * (1.0 - (-m * t).exp()) + 0.02;
        parts.push(format!(
            "(M,T)=({m},{t}): max ratio {worst:.4} vs bound {bound:.4}+0.02"
        ));
    }
    for m in [1.0, 2.0] {
        let (x, v) = make_grids(8.0, 65, 8.0, 65).unwrap();
        let f = PhaseField::from_fn(x, v, |a, b| (-(a - 0.5).powi(2) - b * b / 2.0).exp())
            .unwrap()
            .normalized(m)
            .unwrap();
        let r = monotone_iterate_b(&f, 0.5, 0.05, 6).unwrap();
        ok &= r.violations == 0 && r.max_mass() <= m + 1e-8;
        parts.push(format!(
            "Model B M={m}: {} monotonicity violations, max mass {:.10} (M + 1e-8 = {})",
            r.violations,
            r.max_mass(),
            m + 1e-8
        ));
    }
    verdict(ok, parts.join("; "))
}

fn criterion_11() -> Verdict {
    let m = 50.0;
    let (x, v) = make_grids(4.0, 201, 20.0, 801).unwrap();
    let res = match solve_stationary(m, &x, &v, &StationaryOptions::default()) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("solver failed: {e}")),
    };
    let rep = large_mass_comparison(&res);
    let limit = 2.0 / (m - 2.0) * 1.05;
    verdict(
        rep.marginal_l1 <= 0.05 && rep.rescaled_a20 <= limit,
        format!(
            "marginal L1 {:.4} (limit 0.05); A20/M {:.5} ≤ {limit:.5}; {} iterations",
            rep.marginal_l1, rep.rescaled_a20, res.iterations
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("second-order steady state", criterion_1),
        ("critical-mass dichotomy", criterion_2),
        ("kinetic vs moment ODE closure", criterion_3),
        ("critical-mass table", criterion_4),
        ("closed-form spectrum", criterion_5),
        ("asymptotic roots", criterion_6),
        ("Model B second order", criterion_7),
        ("stationary solver", criterion_8),
        ("moment identity suite", criterion_9),
        ("Picard contraction and monotone iterates", criterion_10),
        ("large-mass asymptotics", criterion_11),
    ];
    let mut passed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        passed += v.passed as usize;
        println!(
            "{tag} {:>2} {name} [{:.1}s]: {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("{passed}/{} acceptance criteria passed", criteria.len());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|s| s == "1");
    if strict && passed < criteria.len() {
        std::process::exit(1);
    }
}
