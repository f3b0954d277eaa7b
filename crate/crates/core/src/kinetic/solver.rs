use ndarray::Array2;

use super::collision::{gain_a, gain_b};
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::{SpatialGrid, VelocityGrid};
use crate::moments::MomentTable;
use crate::params::ModelKind;
use crate::quad::cubic_at;

/// Time-stepping parameters. Grids are taken from the initial datum.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub model: ModelKind,
    pub dt: f64,
    pub t_end: f64,
    /// Record moments every `stride` steps (the final time is always recorded).
    pub stride: usize,
    pub moment_order: usize,
    /// Keep a lab-grid snapshot every `n` recorded samples.
    pub snapshot_every: Option<usize>,
    /// Switch off the turning gain (loss-only relaxation).
    pub gain: bool,
}

impl SimulationConfig {
    pub fn new(model: ModelKind, dt: f64, t_end: f64) -> Self {
        SimulationConfig {
            model,
            dt,
            t_end,
            stride: 1,
            moment_order: 2,
            snapshot_every: None,
            gain: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", "time step must be positive"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::invalid("t_end", "final time must be nonnegative"));
        }
        if self.stride == 0 {
            return Err(Error::invalid("stride", "must be at least 1"));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::invalid("snapshot_every", "must be at least 1"));
        }
        Ok(())
    }
}

/// Recorded output of [`simulate`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub moments: Vec<MomentTable>,
    pub masses: Vec<f64>,
    /// Cumulative mass that left `[-L, L]` through transport.
    pub outflow: Vec<f64>,
    /// Smallest stored value seen over the run.
    pub min_value: f64,
    pub snapshots: Vec<(f64, PhaseField)>,
}

impl Trajectory {
    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.masses.first().copied().unwrap_or(0.0);
        self.masses
            .iter()
            .fold(0.0f64, |a, m| a.max((m - m0).abs()))
    }
}

/// Solver state: one array per velocity row, sampled at `x_i + θ_j dx`.
#[derive(Debug, Clone)]
pub struct KineticState {
    x: SpatialGrid,
    v: VelocityGrid,
    model: ModelKind,
    gain: bool,
    rows: Vec<Vec<f64>>,
    cells: Vec<i64>,
    phase: Vec<f64>,
    transported: f64,
    time: f64,
    outflow: f64,
    wx: Vec<f64>,
    wv: Vec<f64>,
}

impl KineticState {
    pub fn new(f: &PhaseField, model: ModelKind) -> Self {
        let (x, v) = (*f.x_grid(), *f.v_grid());
        let rows = (0..v.len())
            .map(|j| f.values().column(j).to_vec())
            .collect();
        KineticState {
            x,
            v,
            model,
            gain: true,
            rows,
            cells: vec![0; v.len()],
            phase: vec![0.0; v.len()],
            transported: 0.0,
            time: 0.0,
            outflow: 0.0,
            wx: x.trapezoid_weights(),
            wv: v.trapezoid_weights(),
        }
    }

    pub fn without_gain(mut self) -> Self {
        self.gain = false;
        self
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn outflow(&self) -> f64 {
        self.outflow
    }

    fn row_mass(&self, j: usize) -> f64 {
        self.rows[j]
            .iter()
            .zip(&self.wx)
            .map(|(a, w)| a * w)
            .sum::<f64>()
    }

    pub fn mass(&self) -> f64 {
        (0..self.rows.len())
            .map(|j| self.wv[j] * self.row_mass(j))
            .sum()
    }

    pub fn min_value(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// Moments from the exact sample positions of every row.
    pub fn moments(&self, order: usize) -> MomentTable {
        let dx = self.x.spacing();
        let mut table = MomentTable::zeros(order);
        let mut acc = vec![0.0; order + 1];
        for (j, row) in self.rows.iter().enumerate() {
            let shift = self.phase[j] * dx;
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (i, &val) in row.iter().enumerate() {
                if val == 0.0 {
                    continue;
                }
                let pos = self.x.node(i) + shift;
                let mut p = self.wx[i] * val;
                for a in acc.iter_mut() {
                    *a += p;
                    p *= pos;
                }
            }
            let vj = self.v.node(j);
            let mut vp = self.wv[j];
            for n in 0..=order {
                for m in 0..=order - n {
                    let cur = table.get(m, n);
                    table.set(m, n, cur + vp * acc[m]);
                }
                vp *= vj;
            }
        }
        table
    }

    /// Values interpolated to the lab nodes `(x_i, v_j)`.
    pub fn lab_values(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.x.len(), self.v.len()));
        for (j, row) in self.rows.iter().enumerate() {
            let th = self.phase[j];
            for i in 0..self.x.len() {
                out[[i, j]] = if th == 0.0 {
                    row[i]
                } else {
                    cubic_at(row, i as f64 - th).max(0.0)
                };
            }
        }
        out
    }

    pub fn to_field(&self) -> PhaseField {
        PhaseField::from_parts(self.x, self.v, self.lab_values())
    }

    /// Free transport over `tau`: whole-cell shifts plus phase update.
    fn transport(&mut self, tau: f64) {
        self.transported += tau;
        let dx = self.x.spacing();
        let n = self.x.len() as i64;
        for j in 0..self.rows.len() {
            let s = self.v.node(j) * self.transported / dx;
            let k = s.floor();
            self.phase[j] = s - k;
            let k = k as i64;
            let d = k - self.cells[j];
            if d == 0 {
                continue;
            }
            let before = self.row_mass(j);
            let row = &mut self.rows[j];
            if d.abs() >= n {
                row.iter_mut().for_each(|a| *a = 0.0);
            } else if d > 0 {
                let d = d as usize;
                row.rotate_right(d);
                row[..d].iter_mut().for_each(|a| *a = 0.0);
            } else {
                let d = (-d) as usize;
                row.rotate_left(d);
                let len = row.len();
                row[len - d..].iter_mut().for_each(|a| *a = 0.0);
            }
            self.cells[j] = k;
            self.outflow += self.wv[j] * (before - self.row_mass(j));
        }
    }

    /// Turning over `dt` with the gain frozen at the start of the substep.
    fn relax(&mut self, dt: f64) {
        let m = self.mass();
        if !(m > 0.0) {
            return;
        }
        let decay = (-m * dt).exp();
        if !self.gain {
            self.rows.iter_mut().flatten().for_each(|a| *a *= decay);
            return;
        }
        let lab = self.lab_values();
        let g = match self.model {
            ModelKind::A => gain_a(&self.x, &self.v, &lab),
            ModelKind::B => gain_b(&self.x, &self.v, &lab),
        };
        let nx = self.x.len();
        let mut deposit: Vec<Vec<f64>> = Vec::with_capacity(self.rows.len());
        let mut gain_mass = 0.0;
        for j in 0..self.rows.len() {
            let col = g.column(j).to_vec();
            let th = self.phase[j];
            let row: Vec<f64> = (0..nx)
                .map(|i| {
                    if th == 0.0 {
                        col[i]
                    } else {
                        cubic_at(&col, i as f64 + th).max(0.0)
                    }
                })
                .collect();
            gain_mass += self.wv[j] * row.iter().zip(&self.wx).map(|(a, w)| a * w).sum::<f64>();
            deposit.push(row);
        }
        // exact gain mass is m², so the relaxation conserves mass
        let scale = if gain_mass > 0.0 {
            m * m / gain_mass
        } else {
            0.0
        };
        let w = (1.0 - decay) / m * scale;
        for (row, dep) in self.rows.iter_mut().zip(&deposit) {
            for (a, d) in row.iter_mut().zip(dep) {
                *a = decay * *a + w * d;
            }
        }
    }

    /// One Strang step: half transport, turning, half transport.
    pub fn step(&mut self, dt: f64) {
        self.transport(0.5 * dt);
        self.relax(dt);
        self.transport(0.5 * dt);
        self.time += dt;
    }
}

/// A single split step from lab-grid data back to lab-grid data.
pub fn step(f: &PhaseField, dt: f64, model: ModelKind) -> Result<PhaseField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", "time step must be positive"));
    }
    let mut s = KineticState::new(f, model);
    s.step(dt);
    Ok(s.to_field())
}

/// Runs the split scheme from `f_I` to `config.t_end`.
pub fn simulate(config: &SimulationConfig, f_init: &PhaseField) -> Result<Trajectory> {
    config.validate()?;
    let mut state = KineticState::new(f_init, config.model);
    if !config.gain {
        state = state.without_gain();
    }
    let steps = if config.t_end == 0.0 {
        0
    } else {
        (config.t_end / config.dt - 1e-9).ceil() as usize
    };
    let mut traj = Trajectory {
        times: Vec::new(),
        moments: Vec::new(),
        masses: Vec::new(),
        outflow: Vec::new(),
        min_value: state.min_value(),
        snapshots: Vec::new(),
    };
    let record = |state: &KineticState, traj: &mut Trajectory| {
        let k = traj.times.len();
        traj.times.push(state.time());
        traj.moments.push(state.moments(config.moment_order));
        traj.masses.push(state.mass());
        traj.outflow.push(state.outflow());
        if let Some(every) = config.snapshot_every {
            if k.is_multiple_of(every) {
                traj.snapshots.push((state.time(), state.to_field()));
            }
        }
    };
    record(&state, &mut traj);
    for n in 1..=steps {
        let dt = if n == steps {
            config.t_end - config.dt * (steps - 1) as f64
        } else {
            config.dt
        };
        state.step(dt);
        if n == steps {
            state.time = config.t_end;
        }
        let mass = state.mass();
        if !mass.is_finite() {
            return Err(Error::Divergence {
                time: state.time(),
                detail: format!("non-finite mass after step {n}"),
            });
        }
        traj.min_value = traj.min_value.min(state.min_value());
        if n % config.stride == 0 || n == steps {
            record(&state, &mut traj);
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grids;
    use crate::moments::compute_moments;

    fn gaussian(mass: f64, l: f64, n: usize) -> PhaseField {
        let (x, v) = make_grids(l, n, l, n).unwrap();
        PhaseField::from_fn(x, v, |a, b| (-(a * a + b * b) / 2.0).exp())
            .unwrap()
            .normalized(mass)
            .unwrap()
    }

    #[test]
    fn zero_datum_stays_zero() {
        let f = PhaseField::zeros(
            make_grids(5.0, 21, 5.0, 21).unwrap().0,
            make_grids(5.0, 21, 5.0, 21).unwrap().1,
        );
        let traj = simulate(&SimulationConfig::new(ModelKind::A, 0.1, 1.0), &f).unwrap();
        assert!(traj.masses.iter().all(|&m| m == 0.0));
        assert_eq!(traj.times.len(), 11);
        assert!((traj.times[10] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loss_only_step_is_transport_and_decay() {
        let f = gaussian(2.0, 10.0, 101);
        let m = f.mass();
        let dt = 0.2;
        let mut s = KineticState::new(&f, ModelKind::A).without_gain();
        s.step(dt);
        let g = s.to_field();
        let decay = (-m * dt).exp();
        let peak = f.get(50, 50);
        for i in 0..101 {
            for j in 0..101 {
                let (x, v) = (g.x_grid().node(i), g.v_grid().node(j));
                let exact = decay * peak * (-((x - v * dt).powi(2) + v * v) / 2.0).exp();
                assert!((g.get(i, j) - exact).abs() < 2e-4 * peak, "{i} {j}");
            }
        }
    }

    #[test]
    fn mass_is_conserved_per_step() {
        for model in [ModelKind::A, ModelKind::B] {
            let f = gaussian(4.0, 10.0, 101);
            let mut s = KineticState::new(&f, model);
            let mut m0 = s.mass();
            for _ in 0..5 {
                s.step(0.05);
                let m1 = s.mass() + s.outflow();
                assert!((m1 - m0).abs() < 1e-10, "{model}: {m0} {m1}");
                m0 = s.mass() + s.outflow();
            }
        }
    }

    #[test]
    fn constant_in_x_is_transport_invariant() {
        let (x, v) = make_grids(10.0, 81, 4.0, 41).unwrap();
        let f = PhaseField::from_fn(x, v, |_, b| (-b * b).exp()).unwrap();
        let mut s = KineticState::new(&f, ModelKind::A).without_gain();
        s.transport(0.37);
        let g = s.lab_values();
        // away from the inflow boundary
        for i in 20..61 {
            for j in 0..41 {
                assert!((g[[i, j]] - f.get(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn evenness_is_preserved() {
        for model in [ModelKind::A, ModelKind::B] {
            let (x, v) = make_grids(10.0, 81, 10.0, 81).unwrap();
            let f =
                PhaseField::from_fn(x, v, |a, b| (-(a * a) - (a + b).powi(2) / 2.0).exp()).unwrap();
            let mut s = KineticState::new(&f, model);
            for _ in 0..10 {
                s.step(0.03);
            }
            assert!(s.to_field().evenness_defect() < 1e-12);
            assert!(s.min_value() >= 0.0);
        }
    }

    #[test]
    fn first_moments_follow_their_odes() {
        let (x, v) = make_grids(20.0, 161, 20.0, 161).unwrap();
        let f = PhaseField::from_fn(x, v, |a, b| {
            (-(a * a) / 2.0 - (b - 0.5).powi(2) / 2.0).exp()
        })
        .unwrap()
        .normalized(3.0)
        .unwrap();
        let a0 = compute_moments(&f, 1);
        let cfg = SimulationConfig {
            stride: 10,
            ..SimulationConfig::new(ModelKind::A, 0.02, 1.0)
        };
        let traj = simulate(&cfg, &f).unwrap();
        let m = 3.0;
        for (t, tab) in traj.times.iter().zip(&traj.moments) {
            let a01 = a0.get(0, 1) * (-m * t).exp();
            let a10 = a0.get(1, 0) + a0.get(0, 1) / m * (1.0 - (-m * t).exp());
            assert!((tab.get(0, 1) - a01).abs() < 0.01 * a0.get(0, 1).abs());
            assert!((tab.get(1, 0) - a10).abs() < 0.01 * a0.get(0, 1).abs());
        }
    }
}
