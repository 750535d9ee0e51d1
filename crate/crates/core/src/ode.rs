//! Adaptive linearly implicit integration for stiff systems.
//!
//! The stepper is the L-stable Rosenbrock (modified) pair of order 2(3) from
//! Shampine & Reichelt, the scheme behind MATLAB's `ode23s`: one Jacobian
//! and one factorization of `W = I − h d J` per step, three stage solves,
//! and an embedded third-order error estimate. Dense output is cubic
//! Hermite interpolation through stored states and derivatives.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{Lu, Matrix};
use crate::{Error, Result};

/// A first-order system `x' = f(t, x)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]);

    /// Writes `∂f/∂t` into `out` and returns `true`, or returns `false` to
    /// request a finite-difference estimate.
    fn time_derivative(&self, _t: f64, _x: &[f64], _out: &mut [f64]) -> bool {
        false
    }

    /// Jacobian information at `(t, x)`; `None` requests a dense
    /// finite-difference Jacobian.
    fn linearize(&self, _t: f64, _x: &[f64]) -> Option<Box<dyn Linearization>> {
        None
    }
}

/// Something that can factor the Rosenbrock iteration matrix `I − γ J`.
pub trait Linearization {
    fn factor_shifted(&self, gamma: f64) -> Result<Box<dyn ShiftedSolver>>;
}

pub trait ShiftedSolver {
    /// Overwrites `b` with `(I − γ J)⁻¹ b`.
    fn solve_in_place(&self, b: &mut [f64]);
}

/// A dense Jacobian matrix.
#[derive(Debug, Clone)]
pub struct DenseJacobian(pub Matrix);

impl Linearization for DenseJacobian {
    fn factor_shifted(&self, gamma: f64) -> Result<Box<dyn ShiftedSolver>> {
        let j = &self.0;
        let w = Matrix::from_fn(j.rows(), j.cols(), |r, c| {
            let id = if r == c { 1.0 } else { 0.0 };
            id - gamma * j[(r, c)]
        });
        Ok(Box::new(Lu::factor(&w)?))
    }
}

impl ShiftedSolver for Lu {
    fn solve_in_place(&self, b: &mut [f64]) {
        Lu::solve_in_place(self, b);
    }
}

/// Adapts closures to [`OdeSystem`].
pub struct FnSystem<F, J = fn(f64, &[f64]) -> Matrix> {
    dim: usize,
    rhs: F,
    jacobian: Option<J>,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, rhs: F) -> Self {
        Self {
            dim,
            rhs,
            jacobian: None,
        }
    }
}

impl<F, J> FnSystem<F, J>
where
    F: Fn(f64, &[f64], &mut [f64]),
    J: Fn(f64, &[f64]) -> Matrix,
{
    pub fn with_jacobian(dim: usize, rhs: F, jacobian: J) -> Self {
        Self {
            dim,
            rhs,
            jacobian: Some(jacobian),
        }
    }
}

impl<F, J> OdeSystem for FnSystem<F, J>
where
    F: Fn(f64, &[f64], &mut [f64]),
    J: Fn(f64, &[f64]) -> Matrix,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (self.rhs)(t, x, dx)
    }

    fn linearize(&self, t: f64, x: &[f64]) -> Option<Box<dyn Linearization>> {
        self.jacobian
            .as_ref()
            .map(|j| Box::new(DenseJacobian(j(t, x))) as Box<dyn Linearization>)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Largest allowed step; defaults to a tenth of the interval.
    pub h_max: Option<f64>,
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-3,
            atol: 1e-6,
            h_max: None,
            h_init: None,
            max_steps: 1_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub jacobian_evals: usize,
    pub factorizations: usize,
}

/// Accepted steps of an integration with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn derivative(&self, k: usize) -> &[f64] {
        &self.derivs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn tf(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one node")
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// State at `t` by cubic Hermite interpolation (exact at stored nodes).
    pub fn state_at(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.state_at_into(t, &mut out)?;
        Ok(out)
    }

    pub fn state_at_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (t0, tf) = (self.t0(), self.tf());
        let slack = 1e-12 * (tf - t0).abs().max(tf.abs());
        if !(t >= t0 - slack && t <= tf + slack) {
            return Err(Error::OutOfRange { t, t0, tf });
        }
        let t = t.clamp(t0, tf);
        // last k with times[k] <= t
        let k = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if self.times[k] == t || k + 1 == self.len() {
            out.copy_from_slice(self.state(k));
            return Ok(());
        }
        let (ta, tb) = (self.times[k], self.times[k + 1]);
        let h = tb - ta;
        let s = (t - ta) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (ya, yb) = (self.state(k), self.state(k + 1));
        let (fa, fb) = (self.derivative(k), self.derivative(k + 1));
        for i in 0..self.dim {
            out[i] = h00 * ya[i] + h * h10 * fa[i] + h01 * yb[i] + h * h11 * fb[i];
        }
        Ok(())
    }

    /// States at each query time.
    pub fn sample(&self, query_times: &[f64]) -> Result<Vec<Vec<f64>>> {
        query_times.iter().map(|&t| self.state_at(t)).collect()
    }
}

/// Integrates `system` from `(t0, x0)` to `tf`.
pub fn integrate<S: OdeSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    t0: f64,
    tf: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    let n = system.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if tf.partial_cmp(&t0) != Some(core::cmp::Ordering::Greater)
        || !t0.is_finite()
        || !tf.is_finite()
    {
        return Err(Error::InvalidArgument(
            "integration interval must satisfy t0 < tf",
        ));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: t0 });
    }

    let d = 1.0 / (2.0 + 2.0f64.sqrt());
    let e32 = 6.0 + 2.0f64.sqrt();
    let (rtol, atol) = (opts.rtol, opts.atol);
    let threshold = atol / rtol;
    let span = tf - t0;
    let h_max = opts.h_max.unwrap_or(0.1 * span).min(span);

    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = x0.to_vec();
    let mut f0 = vec![0.0; n];
    system.rhs(t, &y, &mut f0);
    stats.rhs_evals += 1;

    let mut traj = Trajectory {
        dim: n,
        times: vec![t0],
        states: y.clone(),
        derivs: f0.clone(),
        stats,
    };

    let mut h = match opts.h_init {
        Some(h) => h.min(h_max),
        None => {
            let rh = f0
                .iter()
                .zip(&y)
                .map(|(f, yi)| (f / yi.abs().max(threshold)).abs())
                .fold(0.0, f64::max)
                / (0.8 * rtol.powf(1.0 / 3.0));
            if h_max * rh > 1.0 {
                1.0 / rh
            } else {
                h_max
            }
        }
    };

    let mut dfdt = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    while t < tf {
        if stats.accepted >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t, h });
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(span.abs());

        let lin: Box<dyn Linearization> = match system.linearize(t, &y) {
            Some(l) => l,
            None => {
                stats.rhs_evals += n;
                Box::new(fd_jacobian(system, t, &y, &f0))
            }
        };
        stats.jacobian_evals += 1;
        let have_dfdt = system.time_derivative(t, &y, &mut dfdt);
        if !have_dfdt {
            let dt = f64::EPSILON.sqrt() * t.abs().max(h);
            system.rhs(t + dt, &y, &mut f1);
            stats.rhs_evals += 1;
            for i in 0..n {
                dfdt[i] = (f1[i] - f0[i]) / dt;
            }
        }

        let mut rejected_here = false;
        loop {
            h = h.min(h_max).max(h_min);
            let last = t + h >= tf - h_min;
            if last {
                h = tf - t;
            }
            let hd = h * d;
            let w = lin.factor_shifted(hd)?;
            stats.factorizations += 1;

            for i in 0..n {
                k1[i] = f0[i] + hd * dfdt[i];
            }
            w.solve_in_place(&mut k1);

            for i in 0..n {
                ytmp[i] = y[i] + 0.5 * h * k1[i];
            }
            system.rhs(t + 0.5 * h, &ytmp, &mut f1);

            for i in 0..n {
                k2[i] = f1[i] - k1[i];
            }
            w.solve_in_place(&mut k2);
            for i in 0..n {
                k2[i] += k1[i];
                ynew[i] = y[i] + h * k2[i];
            }
            let tnew = if last { tf } else { t + h };
            system.rhs(tnew, &ynew, &mut f2);

            for i in 0..n {
                k3[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]) + hd * dfdt[i];
            }
            w.solve_in_place(&mut k3);
            stats.rhs_evals += 2;

            let mut err = 0.0f64;
            let mut finite = true;
            for i in 0..n {
                let e = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);
                let scale = rtol * y[i].abs().max(ynew[i].abs()).max(threshold);
                let r = e.abs() / scale;
                if !r.is_finite() || !ynew[i].is_finite() {
                    finite = false;
                }
                err = err.max(r);
            }

            if !finite || err > 1.0 {
                stats.rejected += 1;
                if h <= h_min {
                    return Err(if !finite {
                        Error::NonFiniteState { t }
                    } else {
                        Error::StepSizeUnderflow { t, h }
                    });
                }
                let factor = if finite {
                    (0.8 * err.powf(-1.0 / 3.0)).max(0.1)
                } else {
                    0.1
                };
                h *= factor;
                rejected_here = true;
                continue;
            }

            t = tnew;
            core::mem::swap(&mut y, &mut ynew);
            core::mem::swap(&mut f0, &mut f2);
            stats.accepted += 1;
            traj.times.push(t);
            traj.states.extend_from_slice(&y);
            traj.derivs.extend_from_slice(&f0);

            if !rejected_here {
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.8 * err.powf(-1.0 / 3.0)).min(5.0)
                };
                h *= grow;
            }
            break;
        }
    }

    traj.stats = stats;
    Ok(traj)
}

fn fd_jacobian<S: OdeSystem + ?Sized>(system: &S, t: f64, x: &[f64], f0: &[f64]) -> DenseJacobian {
    let n = x.len();
    let mut j = Matrix::zeros(n, n);
    let mut xp = x.to_vec();
    let mut fp = vec![0.0; n];
    let sq = f64::EPSILON.sqrt();
    for c in 0..n {
        let delta = sq * x[c].abs().max(1.0);
        xp[c] = x[c] + delta;
        system.rhs(t, &xp, &mut fp);
        for r in 0..n {
            j[(r, c)] = (fp[r] - f0[r]) / delta;
        }
        xp[c] = x[c];
    }
    DenseJacobian(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_arguments() {
        let sys = FnSystem::new(1, |_t: f64, x: &[f64], dx: &mut [f64]| dx[0] = -x[0]);
        let o = OdeOptions::default();
        assert!(matches!(
            integrate(&sys, &[1.0], 1.0, 1.0, &o),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            integrate(&sys, &[1.0, 2.0], 0.0, 1.0, &o),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            integrate(&sys, &[f64::NAN], 0.0, 1.0, &o),
            Err(Error::NonFiniteState { .. })
        ));
    }

    #[test]
    fn spans_exact_interval() {
        let sys = FnSystem::new(1, |_t: f64, x: &[f64], dx: &mut [f64]| dx[0] = -x[0]);
        let tr = integrate(&sys, &[1.0], 0.25, 3.0, &OdeOptions::default()).unwrap();
        assert_eq!(tr.t0(), 0.25);
        assert_eq!(tr.tf(), 3.0);
        assert!(tr.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn blowup_is_reported() {
        let sys = FnSystem::new(1, |_t: f64, x: &[f64], dx: &mut [f64]| dx[0] = x[0] * x[0]);
        let err = integrate(&sys, &[1.0], 0.0, 2.0, &OdeOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::StepSizeUnderflow { .. } | Error::NonFiniteState { .. }
        ));
    }

    #[test]
    fn out_of_range_query() {
        let sys = FnSystem::new(1, |_t: f64, x: &[f64], dx: &mut [f64]| dx[0] = -x[0]);
        let tr = integrate(&sys, &[1.0], 0.0, 1.0, &OdeOptions::default()).unwrap();
        assert!(matches!(tr.state_at(1.5), Err(Error::OutOfRange { .. })));
        assert!(tr.sample(&[]).unwrap().is_empty());
        assert_eq!(tr.state_at(tr.times()[3]).unwrap(), tr.state(3));
    }
}
