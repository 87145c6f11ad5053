//! Classical four-stage explicit Runge-Kutta stepping.

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Vector-space operations the integrator needs from a state.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// Uniform steps of size `dt` from `t0`, the last one shortened to land on
/// `tfinal` when `clamp_last` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub tfinal: f64,
    pub dt: f64,
    /// Number of full steps of size `dt`.
    pub nsteps: usize,
    pub clamp_last: bool,
}

impl TimeGrid {
    /// Largest-step grid with `dt <= dt_max`, the step adjusted so that an
    /// integer number of equal steps reaches `tfinal`.
    pub fn uniform(t0: f64, tfinal: f64, dt_max: f64) -> Result<Self> {
        Self::validate(t0, tfinal, dt_max)?;
        let span = tfinal - t0;
        if span == 0.0 {
            return Ok(Self { t0, tfinal, dt: dt_max, nsteps: 0, clamp_last: false });
        }
        let nsteps = (span / dt_max * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(Self { t0, tfinal, dt: span / nsteps as f64, nsteps, clamp_last: false })
    }

    /// Exactly `nsteps` equal steps.
    pub fn with_steps(t0: f64, tfinal: f64, nsteps: usize) -> Result<Self> {
        if nsteps == 0 {
            if tfinal != t0 {
                return Err(Error::TimeGrid("zero steps but tfinal != t0".into()));
            }
            return Ok(Self { t0, tfinal, dt: 0.0, nsteps: 0, clamp_last: false });
        }
        let dt = (tfinal - t0) / nsteps as f64;
        Self::validate(t0, tfinal, dt)?;
        Ok(Self { t0, tfinal, dt, nsteps, clamp_last: false })
    }

    /// Steps of exactly `dt` followed by one shorter step if needed.
    pub fn clamped(t0: f64, tfinal: f64, dt: f64) -> Result<Self> {
        Self::validate(t0, tfinal, dt)?;
        let ratio = (tfinal - t0) / dt;
        let full = (ratio + 1e-9).floor() as usize;
        let rest = tfinal - (t0 + full as f64 * dt);
        let clamp_last = rest > 1e-12 * dt.max(1.0);
        Ok(Self { t0, tfinal, dt, nsteps: full, clamp_last })
    }

    fn validate(t0: f64, tfinal: f64, dt: f64) -> Result<()> {
        if !(t0.is_finite() && tfinal.is_finite() && tfinal >= t0) {
            return Err(Error::TimeGrid(format!("invalid interval [{t0}, {tfinal}]")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::TimeGrid(format!("step must be positive, got {dt}")));
        }
        Ok(())
    }

    /// Total number of steps taken, including a clamped final step.
    pub fn total_steps(&self) -> usize {
        self.nsteps + usize::from(self.clamp_last)
    }

    /// Time at the start of step `n` and its size.
    fn step(&self, n: usize) -> (f64, f64) {
        let t = self.t0 + n as f64 * self.dt;
        if n + 1 == self.total_steps() {
            (t, self.tfinal - t)
        } else {
            (t, self.dt)
        }
    }
}

/// `C * dx_min^alpha`.
pub fn cfl_dt(mesh: &Mesh, alpha: f64, courant: f64) -> Result<f64> {
    if !(courant > 0.0 && courant < 1.0) {
        return Err(Error::InvalidCfl(courant));
    }
    Ok(courant * mesh.dx_min().powf(alpha))
}

/// Courant constant used when none is configured.
pub fn default_courant(alpha: f64) -> f64 {
    if alpha >= 1.5 {
        0.5
    } else {
        0.2
    }
}

/// One classical RK4 step.
pub fn erk4_step<S: OdeState>(rhs: &mut impl FnMut(&S, f64) -> S, y: &S, t: f64, dt: f64) -> S {
    let k1 = rhs(y, t);
    let mut y2 = y.clone();
    y2.axpy(0.5 * dt, &k1);
    let k2 = rhs(&y2, t + 0.5 * dt);
    let mut y3 = y.clone();
    y3.axpy(0.5 * dt, &k2);
    let k3 = rhs(&y3, t + 0.5 * dt);
    let mut y4 = y.clone();
    y4.axpy(dt, &k3);
    let k4 = rhs(&y4, t + dt);
    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out
}

/// Callback invoked at step 0, every `interval()` steps, and at the final step.
pub trait Observer<S> {
    fn interval(&self) -> usize {
        1
    }
    fn observe(&mut self, step: usize, t: f64, state: &S) -> Result<()>;
}

/// Adapts a closure into an [`Observer`].
pub struct EveryN<F> {
    pub every: usize,
    pub callback: F,
}

impl<S, F: FnMut(usize, f64, &S) -> Result<()>> Observer<S> for EveryN<F> {
    fn interval(&self) -> usize {
        self.every
    }

    fn observe(&mut self, step: usize, t: f64, state: &S) -> Result<()> {
        (self.callback)(step, t, state)
    }
}

/// Advances `y0` across `grid`, aborting on the first non-finite state.
pub fn integrate<S: OdeState>(
    mut rhs: impl FnMut(&S, f64) -> S,
    y0: S,
    grid: &TimeGrid,
    observers: &mut [&mut dyn Observer<S>],
) -> Result<S> {
    let total = grid.total_steps();
    let mut y = y0;
    for obs in observers.iter_mut() {
        obs.observe(0, grid.t0, &y)?;
    }
    for n in 0..total {
        let (t, dt) = grid.step(n);
        y = erk4_step(&mut rhs, &y, t, dt);
        let step = n + 1;
        let t_new = if step == total { grid.tfinal } else { t + dt };
        if !y.is_finite() {
            return Err(Error::NonFinite { step, time: t_new });
        }
        for obs in observers.iter_mut() {
            let every = obs.interval().max(1);
            if step % every == 0 || step == total {
                obs.observe(step, t_new, &y)?;
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_rhs_leaves_state() {
        let y = erk4_step(&mut |_: &f64, _| 0.0, &3.5, 0.0, 0.1);
        assert_eq!(y, 3.5);
    }

    #[test]
    fn time_only_rhs_is_simpson() {
        let f = |t: f64| (3.0 * t).sin() + t * t;
        let (t, dt) = (0.3, 0.2);
        let y = erk4_step(&mut |_: &f64, s| f(s), &0.0, t, dt);
        let simpson = dt / 6.0 * (f(t) + 4.0 * f(t + 0.5 * dt) + f(t + dt));
        assert_relative_eq!(y, simpson, epsilon = 1e-15);
    }

    #[test]
    fn exponential_one_step_is_taylor() {
        let y = erk4_step(&mut |y: &f64, _| *y, &1.0, 0.0, 0.1);
        let taylor = 1.0 + 0.1 + 0.01 / 2.0 + 0.001 / 6.0 + 0.0001 / 24.0;
        assert_relative_eq!(y, taylor, epsilon = 1e-15);
        assert_relative_eq!(y, 1.105_170_833_333_333, epsilon = 1e-14);
    }

    fn exp_error(nsteps: usize) -> f64 {
        let grid = TimeGrid::with_steps(0.0, 1.0, nsteps).unwrap();
        let y = integrate(|y: &f64, _| *y, 1.0, &grid, &mut []).unwrap();
        (y - 1f64.exp()).abs()
    }

    #[test]
    fn global_order_is_four() {
        for n in [20, 40, 80] {
            let order = (exp_error(n) / exp_error(2 * n)).log2();
            assert!((order - 4.0).abs() < 0.05, "order {order} at n = {n}");
        }
    }

    #[test]
    fn exponential_accuracy_at_small_step() {
        assert!(exp_error(100) < 1e-8);
    }

    #[test]
    fn zero_steps_fire_once() {
        let grid = TimeGrid::uniform(1.0, 1.0, 0.1).unwrap();
        let mut calls = Vec::new();
        let mut obs = EveryN {
            every: 1,
            callback: |s: usize, t: f64, _: &f64| {
                calls.push((s, t));
                Ok(())
            },
        };
        let y = integrate(|y: &f64, _| *y, 2.0, &grid, &mut [&mut obs]).unwrap();
        assert_eq!(y, 2.0);
        assert_eq!(calls, vec![(0, 1.0)]);
    }

    #[test]
    fn observers_fire_at_cadence_and_end() {
        let grid = TimeGrid::clamped(0.0, 1.0, 0.15).unwrap();
        assert_eq!(grid.nsteps, 6);
        assert!(grid.clamp_last);
        let mut times = Vec::new();
        let mut obs = EveryN {
            every: 4,
            callback: |_: usize, t: f64, _: &f64| {
                times.push(t);
                Ok(())
            },
        };
        integrate(|y: &f64, _| -*y, 1.0, &grid, &mut [&mut obs]).unwrap();
        assert_eq!(times.len(), 3);
        assert_relative_eq!(times[1], 0.6, epsilon = 1e-14);
        assert_eq!(*times.last().unwrap(), 1.0);
    }

    #[test]
    fn clamped_grid_reaches_final_time() {
        for dt in [0.1, 0.3, 0.07, 1e-3] {
            let g = TimeGrid::clamped(0.0, 2.0, dt).unwrap();
            let last_start = g.t0 + (g.total_steps() - 1) as f64 * g.dt;
            let (_, last_dt) = g.step(g.total_steps() - 1);
            assert!((last_start + last_dt - 2.0).abs() < 1e-12);
            assert!(last_dt <= dt * (1.0 + 1e-9));
        }
    }

    #[test]
    fn blow_up_is_reported_with_step() {
        let grid = TimeGrid::with_steps(0.0, 10.0, 100).unwrap();
        let err = integrate(|y: &f64, _| y * y * 1e200, 1e100, &grid, &mut []).unwrap_err();
        assert!(matches!(err, Error::NonFinite { step: 1, .. }), "{err:?}");
    }

    #[test]
    fn cfl_examples() {
        let mesh = Mesh::uniform(0.0, 1.0, 2, 1).unwrap();
        assert_relative_eq!(cfl_dt(&mesh, 2.0, 0.5).unwrap(), 0.125, epsilon = 1e-15);
        assert_relative_eq!(cfl_dt(&mesh, 1.5, 0.1).unwrap(), 0.1 * 0.5f64.powf(1.5), epsilon = 1e-15);
        assert!(cfl_dt(&mesh, 0.5, 0.3).is_ok());
        assert!(cfl_dt(&mesh, 2.0, 1.0).is_err());
        assert!(cfl_dt(&mesh, 2.0, 0.0).is_err());
    }
}
