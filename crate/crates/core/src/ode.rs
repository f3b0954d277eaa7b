//! Adaptive explicit Runge–Kutta integration (Dormand–Prince 5(4)).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerances {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerances { abs, rel }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-10,
            rel: 1e-10,
        }
    }
}

/// Final state of an integration.
#[derive(Debug, Clone)]
pub struct OdeOutcome {
    pub time: f64,
    pub state: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Set when a component exceeded the blow-up guard; `time` is the
    /// first step at which that happened.
    pub blew_up: bool,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights are the last row of A; these are (b5 - b4)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Dormand–Prince 5(4) with standard step-size control.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub tol: Tolerances,
    /// Stop (without error) once any component exceeds this magnitude.
    pub blow_up_guard: Option<f64>,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Dopri5 {
    pub fn new(tol: Tolerances) -> Self {
        Dopri5 {
            tol,
            blow_up_guard: None,
            max_steps: 10_000_000,
            initial_step: None,
        }
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.blow_up_guard = Some(guard);
        self
    }

    /// Integrates from `t0` to `t_end`, calling `observer` after every
    /// accepted step.
    pub fn integrate<F, O>(
        &mut self,
        rhs: F,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        mut observer: O,
    ) -> Result<OdeOutcome>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]),
    {
        self.run(rhs, t0, y0, &[t_end], |t, y, _| observer(t, y))
    }

    /// Integrates through the increasing `times`, landing on each of them
    /// exactly. Returns the states at the reached sample times.
    pub fn sample<F>(
        &mut self,
        rhs: F,
        t0: f64,
        y0: &[f64],
        times: &[f64],
    ) -> Result<(Vec<Vec<f64>>, OdeOutcome)>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let mut samples = Vec::with_capacity(times.len());
        if times.first().is_some_and(|&t| t == t0) {
            samples.push(y0.to_vec());
        }
        let stops: Vec<f64> = times.iter().copied().filter(|&t| t > t0).collect();
        let outcome = self.run(rhs, t0, y0, &stops, |_, y, is_stop| {
            if is_stop {
                samples.push(y.to_vec());
            }
        })?;
        Ok((samples, outcome))
    }

    fn run<F, O>(
        &mut self,
        mut rhs: F,
        t0: f64,
        y0: &[f64],
        stops: &[f64],
        mut on_step: O,
    ) -> Result<OdeOutcome>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64], bool),
    {
        let n = y0.len();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut stage = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        let mut accepted = 0usize;
        let mut rejected = 0usize;

        let Some(&t_final) = stops.last() else {
            return Ok(OdeOutcome {
                time: t,
                state: y,
                accepted_steps: 0,
                rejected_steps: 0,
                blew_up: false,
            });
        };
        if t_final <= t0 || n == 0 {
            return Ok(OdeOutcome {
                time: t,
                state: y,
                accepted_steps: 0,
                rejected_steps: 0,
                blew_up: false,
            });
        }
        if stops.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(
                "times",
                "sample times must increase strictly",
            ));
        }
        if let Some(g) = self.blow_up_guard {
            if y.iter().any(|v| v.abs() > g) {
                return Ok(OdeOutcome {
                    time: t,
                    state: y,
                    accepted_steps: 0,
                    rejected_steps: 0,
                    blew_up: true,
                });
            }
        }

        rhs(t, &y, &mut k[0]);
        let mut h = self
            .initial_step
            .unwrap_or_else(|| self.guess_step(&y, &k[0], t_final - t0));
        let mut next_stop = 0usize;

        while next_stop < stops.len() {
            if accepted + rejected >= self.max_steps {
                return Err(Error::Divergence {
                    time: t,
                    detail: "step budget exhausted".into(),
                });
            }
            let target = stops[next_stop];
            let mut landing = false;
            if t + h >= target || (target - t - h) < 1e-12 * target.abs().max(1.0) {
                h = target - t;
                landing = true;
            }

            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    stage[i] = y[i] + h * acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                rhs(t + C[s] * h, &stage, &mut tail[0]);
                if s == 6 {
                    y_new.copy_from_slice(&stage);
                }
            }

            let mut err = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                let scale = self.tol.abs + self.tol.rel * y[i].abs().max(y_new[i].abs());
                let r = h * e / scale;
                err += r * r;
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                if h.abs() < 1e-300 {
                    return Err(Error::Divergence {
                        time: t,
                        detail: "non-finite state".into(),
                    });
                }
                rejected += 1;
                h *= 0.1;
                continue;
            }

            if err <= 1.0 {
                accepted += 1;
                t = if landing { target } else { t + h };
                std::mem::swap(&mut y, &mut y_new);
                // FSAL: stage 7 derivative is the next first stage
                let last = k.pop().unwrap();
                k.insert(0, last);
                on_step(t, &y, landing);
                if landing {
                    next_stop += 1;
                }
                if let Some(g) = self.blow_up_guard {
                    if y.iter().any(|v| v.abs() > g) {
                        return Ok(OdeOutcome {
                            time: t,
                            state: y,
                            accepted_steps: accepted,
                            rejected_steps: rejected,
                            blew_up: true,
                        });
                    }
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            } else {
                rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if h.abs() < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Divergence {
                        time: t,
                        detail: "step size underflow".into(),
                    });
                }
            }
        }
        Ok(OdeOutcome {
            time: t,
            state: y,
            accepted_steps: accepted,
            rejected_steps: rejected,
            blew_up: false,
        })
    }

    fn guess_step(&self, y: &[f64], dy: &[f64], span: f64) -> f64 {
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for (a, b) in y.iter().zip(dy) {
            let sc = self.tol.abs + self.tol.rel * a.abs();
            d0 = d0.max((a / sc).abs());
            d1 = d1.max((b / sc).abs());
        }
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h.min(span).max(1e-12 * span)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut s = Dopri5::new(Tolerances::new(1e-12, 1e-12));
        let out = s
            .integrate(|_, y, dy| dy[0] = -2.0 * y[0], 0.0, &[1.0], 3.0, |_, _| {})
            .unwrap();
        assert!((out.time - 3.0).abs() < 1e-15);
        assert!((out.state[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_sampled() {
        let mut s = Dopri5::new(Tolerances::new(1e-11, 1e-11));
        let times: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let (samples, _) = s
            .sample(
                |_, y, dy| {
                    dy[0] = y[1];
                    dy[1] = -y[0];
                },
                0.0,
                &[1.0, 0.0],
                &times,
            )
            .unwrap();
        assert_eq!(samples.len(), 11);
        for (t, y) in times.iter().zip(&samples) {
            assert!((y[0] - t.cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn guard_stops_growth() {
        let mut s = Dopri5::new(Tolerances::default()).with_guard(1e6);
        let out = s
            .integrate(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], 100.0, |_, _| {})
            .unwrap();
        assert!(out.blew_up);
        assert!(out.time < 20.0 && out.time > 13.0);
    }
}
