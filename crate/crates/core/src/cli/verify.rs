//! Reduced-scale invariant suite behind the `verify` command.

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::field::{DensityProfile, PhaseField};
use crate::grid::{make_grids, UniformGrid};
use crate::kinetic::{picard_contraction_test, simulate, SimulationConfig};
use crate::moments::{
    build_matrix, char_poly_pn, compute_moments, critical_masses, integrate_cascade,
    model_b_order2, q_n, second_order_steady_state, stability, MomentTable, Verdict,
};
use crate::ode::Tolerances;
use crate::params::ModelKind;
use crate::quad::GaussLegendre;
use crate::signal::{cross_moment, signal_moments};
use crate::stationary::{solve_stationary, StationaryOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

fn failed(name: &str, limit: f64) -> Check {
    Check {
        name: name.into(),
        value: f64::NAN,
        limit,
        passed: false,
    }
}

/// Gaussian mixture `Σ a exp(−(x−c)²/2w²)` with parts `(c, w, a)`.
struct Mixture(Vec<(f64, f64, f64)>);

impl Mixture {
    fn random(rng: &mut StdRng) -> Self {
        Mixture(
            (0..3)
                .map(|_| {
                    (
                        rng.random_range(-2.0..2.0),
                        rng.random_range(0.5..1.5),
                        rng.random_range(0.2..1.0),
                    )
                })
                .collect(),
        )
    }

    fn density(&self, x: f64) -> f64 {
        self.0
            .iter()
            .map(|&(c, w, a)| a * (-(x - c) * (x - c) / (2.0 * w * w)).exp())
            .sum()
    }

    fn profile(&self, grid: UniformGrid) -> DensityProfile {
        DensityProfile::from_fn(grid, |x| self.density(x)).expect("finite mixture")
    }

    /// `½ ∫ e^{−|x−y|} ρ(y) dy` by composite Gauss–Legendre on unit panels
    /// either side of the kink, out to distance 40.
    fn signal(&self, x: f64, gl: &GaussLegendre) -> f64 {
        let mut total = 0.0;
        for p in 0..40 {
            for (&u, &w) in gl.nodes.iter().zip(&gl.weights) {
                let d = p as f64 + u;
                total += w * (-d).exp() * (self.density(x - d) + self.density(x + d));
            }
        }
        0.5 * total
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn signal_identities(rng: &mut StdRng) -> [Check; 3] {
    let grid = UniformGrid::new(40.0, 801).expect("grid");
    let gl = GaussLegendre::unit(12);
    let w = grid.trapezoid_weights();
    let xs = grid.nodes();
    let (mut worst_s, mut worst_c, mut worst_v): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..5 {
        let mix = Mixture::random(rng);
        let rho = mix.profile(grid);
        let s: Vec<f64> = xs.iter().map(|&x| mix.signal(x, &gl)).collect();
        let r = rho.moments(4);
        let sm = signal_moments(&r);
        for k in 0..=4 {
            let quad: f64 = (0..xs.len())
                .map(|i| w[i] * xs[i].powi(k as i32) * s[i])
                .sum();
            worst_s = worst_s.max((quad - sm.get(k)).abs() / quad.abs().max(r[0]));
        }
        for order in 0..=4 {
            for n in 0..=order {
                let mut direct = 0.0;
                for i in 0..xs.len() {
                    let inner: f64 = (0..xs.len())
                        .map(|j| w[j] * (xs[j] - xs[i]).powi(n as i32) * s[j])
                        .sum();
                    direct += w[i] * rho.values()[i] * xs[i].powi((order - n) as i32) * inner;
                }
                let closed = cross_moment(n, order, &sm, &r).expect("indices in range");
                worst_c = worst_c.max((direct - closed).abs() / direct.abs().max(r[0] * r[0]));
            }
        }
        for i in (grid.center() - 50..=grid.center() + 50).step_by(10) {
            let x = xs[i];
            let v_moment = |p: i32| -> f64 {
                (0..xs.len())
                    .map(|j| w[j] * (xs[j] - x).powi(p) * s[j])
                    .sum()
            };
            let rho_moment = |g: &dyn Fn(f64) -> f64| -> f64 {
                (0..xs.len())
                    .map(|j| w[j] * g(xs[j] - x) * rho.values()[j])
                    .sum()
            };
            let pairs = [
                (v_moment(0), r[0]),
                (v_moment(1), rho_moment(&|d| d)),
                (v_moment(2), rho_moment(&|d| d * d + 2.0)),
            ];
            for (lhs, rhs) in pairs {
                worst_v = worst_v.max((lhs - rhs).abs() / r[0]);
            }
        }
    }
    [
        Check::at_most("signal moments vs quadrature", worst_s, 1e-6),
        Check::at_most("cross moments vs quadrature", worst_c, 1e-6),
        Check::at_most("velocity identities of S", worst_v, 1e-6),
    ]
}

fn characteristic_polynomial(rng: &mut StdRng) -> [Check; 2] {
    let mut worst: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for order in 1..=8 {
        for _ in 0..10 {
            let m = rng.random_range(0.1..10.0);
            let lambda = rng.random_range(-12.0..4.0);
            let c = build_matrix(order, m).expect("valid order").matrix;
            let n = c.nrows();
            let det = (c - DMatrix::<f64>::identity(n, n) * lambda).determinant();
            worst = worst.max(relative(char_poly_pn(order, m, lambda), det));
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            let factorial: f64 = (1..=order).map(|k| k as f64).product();
            let rhs = sign * m * factorial * q_n(order, m);
            worst_zero =
                worst_zero.max((char_poly_pn(order, m, 0.0) - rhs).abs() / rhs.abs().max(1.0));
        }
    }
    [
        Check::at_most("p_N vs det(C_N - λI), N ≤ 8", worst, 1e-10),
        Check::at_most("p_N(0) vs (-1)^N M N! q_N(M)", worst_zero, 1e-10),
    ]
}

fn critical_mass_checks() -> Vec<Check> {
    let Ok(table) = critical_masses(6, 10.0) else {
        return vec![failed("critical masses M_2, M_3", 1e-10)];
    };
    let m = |k: usize| table[k].critical_mass().unwrap_or(f64::NAN);
    let gap = (m(0) - 2.0).abs().max((m(1) - 2.0).abs());
    let m4 = m(2);
    vec![
        Check::at_most("|M_2 - 2|, |M_3 - 2|", gap, 1e-10),
        Check {
            name: "M_4 in (2, 3)".into(),
            value: m4,
            limit: 3.0,
            passed: m4 > 2.0 && m4 < 3.0,
        },
        Check {
            name: "M_4 < M_5 < M_6".into(),
            value: m(4) - m(3),
            limit: 0.0,
            passed: m(2) < m(3) && m(3) < m(4),
        },
    ]
}

fn routh_hurwitz() -> Check {
    let mut disagreements = 0;
    for order in 2..=8 {
        for m in [0.5, 1.0, 1.9, 2.1, 3.0, 4.0, 10.0] {
            match stability(order, m) {
                Ok(r) if r.consistent() => {}
                _ => disagreements += 1,
            }
        }
    }
    Check::at_most(
        "Routh-Hurwitz vs eigenvalue disagreements",
        disagreements as f64,
        0.0,
    )
}

fn steady_state() -> Check {
    let name = "second-order steady state at M = 4";
    let m = 4.0;
    let mut init = MomentTable::zeros(2);
    init.set(0, 0, m);
    init.set(2, 0, 1.0);
    init.set(0, 2, 1.0);
    let (Ok(traj), Ok(target)) = (
        integrate_cascade(&init, m, 40.0, Tolerances::new(1e-12, 1e-12)),
        second_order_steady_state(m),
    ) else {
        return failed(name, 1e-8);
    };
    let last = traj.last();
    let dev = (last.get(2, 0) - target.0)
        .abs()
        .max(last.get(1, 1).abs())
        .max((last.get(0, 2) - target.2).abs());
    Check::at_most(name, dev, 1e-8)
}

fn dichotomy() -> Check {
    let sub = stability(2, 1.0)
        .map(|r| r.verdict == Verdict::Unstable)
        .unwrap_or(false);
    let sup = stability(2, 4.0)
        .map(|r| r.verdict == Verdict::Stable)
        .unwrap_or(false);
    Check {
        name: "order-2 stability flips at M = 2".into(),
        value: (sub && sup) as u8 as f64,
        limit: 1.0,
        passed: sub && sup,
    }
}

fn model_b() -> Check {
    match model_b_order2(1.0, [1.0, 0.0, 1.0], 30.0) {
        Ok(r) => Check::at_most(
            "Model B determinant identity defect",
            r.integral_defect,
            1e-8,
        ),
        Err(_) => failed("Model B determinant identity defect", 1e-8),
    }
}

fn kinetic_mass() -> Check {
    let name = "kinetic mass drift / M (129², t = 1)";
    let m = 4.0;
    let field = make_grids(20.0, 129, 20.0, 129)
        .and_then(|(x, v)| PhaseField::from_fn(x, v, |a, b| (-(a * a + b * b) / 2.0).exp()))
        .and_then(|f| f.normalized(m));
    let traj = field.and_then(|f| simulate(&SimulationConfig::new(ModelKind::A, 0.02, 1.0), &f));
    match traj {
        Ok(t) => Check::at_most(name, t.max_mass_drift() / m, 1e-6),
        Err(_) => failed(name, 1e-6),
    }
}

fn picard(rng: &mut StdRng) -> Check {
    let name = "Picard ratio - bound (M = 1, T = 0.5)";
    let grid = UniformGrid::new(8.0, 81).expect("grid");
    let a = Mixture::random(rng).profile(grid);
    let b = Mixture::random(rng).profile(grid);
    let (a, b) = (a.scaled(1.0 / a.mass()), b.scaled(1.0 / b.mass()));
    match picard_contraction_test(&a, &b, 0.5, 1.0) {
        Ok(r) => Check::at_most(name, r.ratio - r.bound, 0.02),
        Err(_) => failed(name, 0.02),
    }
}

fn stationary() -> Check {
    let name = "stationary A_2_0 rel. error (M = 4, 129²)";
    let result = make_grids(20.0, 129, 20.0, 129).and_then(|(x, v)| {
        solve_stationary(
            4.0,
            &x,
            &v,
            &StationaryOptions {
                tol: 1e-8,
                ..Default::default()
            },
        )
    });
    match result {
        Ok(r) => Check::at_most(
            name,
            relative(compute_moments(&r.f, 2).get(2, 0), 4.0),
            0.05,
        ),
        Err(_) => failed(name, 0.05),
    }
}

/// Runs every check with a fixed seed; results are reproducible.
pub fn run_checks() -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(20);
    let mut out = Vec::new();
    out.extend(signal_identities(&mut rng));
    out.extend(characteristic_polynomial(&mut rng));
    out.extend(critical_mass_checks());
    out.push(routh_hurwitz());
    out.push(dichotomy());
    out.push(steady_state());
    out.push(model_b());
    out.push(kinetic_mass());
    out.push(picard(&mut rng));
    out.push(stationary());
    out
}
