//! The reduced nonlinear model and output simulations of FOM and ROM.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::balance::ReducedSystem;
use crate::linalg::{dot, BandedLu, Matrix};
use crate::model::StateSpaceSystem;
use crate::ode::{
    integrate, DenseJacobian, Linearization, OdeOptions, OdeStats, OdeSystem, ShiftedSolver,
    Trajectory,
};
use crate::signals::InputSpec;
use crate::{Error, Result};

/// Default number of points on the output comparison grid.
pub const DEFAULT_SAMPLES: usize = 1000;

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `S_r F(T_r a)` from the two weight vectors: one dot product, one scaling.
pub fn rom_nonlinear(red: &ReducedSystem, a: &[f64]) -> Result<Vec<f64>> {
    check_len(red.order(), a.len())?;
    let mut out = vec![0.0; a.len()];
    add_rom_nonlinear(red, a, &mut out);
    Ok(out)
}

fn add_rom_nonlinear(red: &ReducedSystem, a: &[f64], out: &mut [f64]) {
    let s = dot(&red.nl_in_weights, a);
    let force = red.nl_coeff * s * s * s;
    for (o, w) in out.iter_mut().zip(&red.nl_out_weights) {
        *o += force * w;
    }
}

/// `Ar a + Br u + S_r F(T_r a)`.
pub fn rom_rhs(red: &ReducedSystem, a: &[f64], u: f64) -> Result<Vec<f64>> {
    check_len(red.order(), a.len())?;
    let mut out = vec![0.0; a.len()];
    rom_rhs_into(red, a, u, &mut out);
    Ok(out)
}

fn rom_rhs_into(red: &ReducedSystem, a: &[f64], u: f64, out: &mut [f64]) {
    red.ar.mul_vec_into(a, out);
    for (i, o) in out.iter_mut().enumerate() {
        *o += red.br[(i, 0)] * u;
    }
    add_rom_nonlinear(red, a, out);
}

/// The reduced model driven by an input, as an ODE with analytic Jacobian
/// `Ar + 3 c s² ψ φᵀ`.
pub struct RomProblem<'a> {
    pub red: &'a ReducedSystem,
    pub input: InputSpec,
}

impl OdeSystem for RomProblem<'_> {
    fn dim(&self) -> usize {
        self.red.order()
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        rom_rhs_into(self.red, x, self.input.eval(t), dx);
    }

    fn time_derivative(&self, t: f64, _x: &[f64], out: &mut [f64]) -> bool {
        let du = self.input.derivative(t);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.red.br[(i, 0)] * du;
        }
        true
    }

    fn linearize(&self, _t: f64, x: &[f64]) -> Option<Box<dyn Linearization>> {
        let red = self.red;
        let s = dot(&red.nl_in_weights, x);
        let k = 3.0 * red.nl_coeff * s * s;
        let r = red.order();
        let j = Matrix::from_fn(r, r, |i, c| {
            red.ar[(i, c)] + k * red.nl_out_weights[i] * red.nl_in_weights[c]
        });
        Some(Box::new(DenseJacobian(j)))
    }
}

/// The full-order model driven by an input.
///
/// When `A` has the second-order structure `[[0, I], [K, D]]` with `K`, `D`
/// pentadiagonal (always true for [`crate::model::build_system`]), the
/// Rosenbrock matrix is solved by eliminating the displacement block and
/// factoring the banded `I − γD − γ²K`; otherwise a dense Jacobian is used.
pub struct FomProblem<'a> {
    pub sys: &'a StateSpaceSystem,
    pub input: InputSpec,
    banded: bool,
}

const HALF_BAND: usize = 2;

impl<'a> FomProblem<'a> {
    pub fn new(sys: &'a StateSpaceSystem, input: InputSpec) -> Self {
        let banded = has_banded_structure(sys);
        Self { sys, input, banded }
    }
}

fn has_banded_structure(sys: &StateSpaceSystem) -> bool {
    let n = sys.n;
    let a = &sys.a;
    if a.rows() != 2 * n || a.cols() != 2 * n {
        return false;
    }
    if sys.nl_state_index >= n || sys.nl_target_index < n {
        return false;
    }
    for i in 0..n {
        for j in 0..2 * n {
            let expected = if j == n + i { 1.0 } else { 0.0 };
            if a[(i, j)] != expected {
                return false;
            }
        }
    }
    let far = |i: usize, j: usize| i.abs_diff(j) > HALF_BAND;
    for i in 0..n {
        for j in 0..n {
            if far(i, j) && (a[(n + i, j)] != 0.0 || a[(n + i, n + j)] != 0.0) {
                return false;
            }
        }
    }
    !far(sys.nl_state_index, sys.nl_target_index - n)
}

struct BandedLinearization {
    n: usize,
    /// Lower-left block with the cubic stiffness folded in.
    k: Matrix,
    d: Matrix,
}

struct BandedSolver {
    n: usize,
    gamma: f64,
    k: Matrix,
    lu: BandedLu,
}

impl Linearization for BandedLinearization {
    fn factor_shifted(&self, gamma: f64) -> Result<Box<dyn ShiftedSolver>> {
        let (k, d) = (&self.k, &self.d);
        let lu = BandedLu::factor(self.n, HALF_BAND, HALF_BAND, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - gamma * d[(i, j)] - gamma * gamma * k[(i, j)]
        })?;
        Ok(Box::new(BandedSolver {
            n: self.n,
            gamma,
            k: k.clone(),
            lu,
        }))
    }
}

impl ShiftedSolver for BandedSolver {
    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let (rd, rv) = b.split_at_mut(n);
        for i in 0..n {
            let lo = i.saturating_sub(HALF_BAND);
            let hi = (i + HALF_BAND + 1).min(n);
            let kr: f64 = (lo..hi).map(|j| self.k[(i, j)] * rd[j]).sum();
            rv[i] += self.gamma * kr;
        }
        self.lu.solve_in_place(rv);
        for (d, v) in rd.iter_mut().zip(rv.iter()) {
            *d += self.gamma * v;
        }
    }
}

impl OdeSystem for FomProblem<'_> {
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        self.sys.fom_rhs_into(x, self.input.eval(t), dx);
    }

    fn time_derivative(&self, t: f64, _x: &[f64], out: &mut [f64]) -> bool {
        let du = self.input.derivative(t);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.sys.b[(i, 0)] * du;
        }
        true
    }

    fn linearize(&self, _t: f64, x: &[f64]) -> Option<Box<dyn Linearization>> {
        let sys = self.sys;
        let dn = x[sys.nl_state_index];
        let stiff = 3.0 * sys.nl_coeff * dn * dn;
        if self.banded {
            let n = sys.n;
            let mut k = sys.a.block(n, 0, n, n);
            k[(sys.nl_target_index - n, sys.nl_state_index)] += stiff;
            let d = sys.a.block(n, n, n, n);
            return Some(Box::new(BandedLinearization { n, k, d }));
        }
        let mut j = sys.a.clone();
        j[(sys.nl_target_index, sys.nl_state_index)] += stiff;
        Some(Box::new(DenseJacobian(j)))
    }
}

/// Output channels sampled on a time grid; `channels[c][k]` is channel `c`
/// at `times[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSeries {
    pub times: Vec<f64>,
    pub channels: Vec<Vec<f64>>,
}

impl OutputSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The first `count` samples.
    pub fn prefix(&self, count: usize) -> Self {
        let count = count.min(self.len());
        Self {
            times: self.times[..count].to_vec(),
            channels: self.channels.iter().map(|c| c[..count].to_vec()).collect(),
        }
    }

    /// Scales every channel by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            times: self.times.clone(),
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|v| v * s).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOptions {
    pub ode: OdeOptions,
    pub samples: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl SimulationOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            ode: OdeOptions::with_tolerances(rtol, atol),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub outputs: OutputSeries,
    pub stats: OdeStats,
}

/// `count` equally spaced points from `t0` to `tf` inclusive.
pub fn uniform_grid(t0: f64, tf: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..count)
            .map(|k| {
                if k == count - 1 {
                    tf
                } else {
                    t0 + (tf - t0) * k as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

fn sample_outputs(
    traj: &Trajectory,
    c: &Matrix,
    t0: f64,
    tf: f64,
    count: usize,
) -> Result<OutputSeries> {
    let times = uniform_grid(t0, tf, count);
    let mut channels = vec![Vec::with_capacity(times.len()); c.rows()];
    let mut x = vec![0.0; traj.dim()];
    for &t in &times {
        traj.state_at_into(t, &mut x)?;
        for (ch, out) in channels.iter_mut().enumerate() {
            out.push(dot(c.row(ch), &x));
        }
    }
    Ok(OutputSeries { times, channels })
}

/// Integrates the FOM from `x0`.
pub fn integrate_fom(
    sys: &StateSpaceSystem,
    input: InputSpec,
    x0: &[f64],
    t0: f64,
    tf: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    input.validate()?;
    integrate(&FomProblem::new(sys, input), x0, t0, tf, opts)
}

/// FOM output `y = C x` from zero initial data.
pub fn simulate_fom(
    sys: &StateSpaceSystem,
    input: InputSpec,
    t0: f64,
    tf: f64,
    opts: &SimulationOptions,
) -> Result<Simulation> {
    let x0 = vec![0.0; sys.dim()];
    let traj = integrate_fom(sys, input, &x0, t0, tf, &opts.ode)?;
    Ok(Simulation {
        outputs: sample_outputs(&traj, &sys.c, t0, tf, opts.samples)?,
        stats: traj.stats,
    })
}

/// ROM output `y_r = Cr a` from zero initial data.
pub fn simulate_rom(
    red: &ReducedSystem,
    input: InputSpec,
    t0: f64,
    tf: f64,
    opts: &SimulationOptions,
) -> Result<Simulation> {
    input.validate()?;
    let a0 = vec![0.0; red.order()];
    let traj = integrate(&RomProblem { red, input }, &a0, t0, tf, &opts.ode)?;
    Ok(Simulation {
        outputs: sample_outputs(&traj, &red.cr, t0, tf, opts.samples)?,
        stats: traj.stats,
    })
}
