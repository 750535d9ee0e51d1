//! Finite-difference model of the cable-mass system.
//!
//! The cable displacement `w(t, x)` on `[0, l]` obeys
//!
//! ```text
//! w_tt + α w_t = γ w_txx + β² w_xx
//! ```
//!
//! and each end is a damped oscillator whose displacement equals the cable
//! endpoint. The left mass is forced by `u(t)`; the right spring has an extra
//! cubic term `k3 w_l³`. Interior nodes use centered differences and the two
//! boundary rows use second-order one-sided differences for `w_x`, so no
//! ghost nodes are needed.
//!
//! The state is ordered `x = [d₁ … d_n, v₁ … v_n]` (displacements then
//! velocities) and the output is `y = (d_n, v_n)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Physical coefficients of the cable-mass system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cable length.
    pub l: f64,
    pub m0: f64,
    pub ml: f64,
    pub k0: f64,
    pub kl: f64,
    /// Cubic stiffness of the right spring (0 gives a linear system).
    pub k3: f64,
    /// Wave speed.
    pub beta: f64,
    /// Kelvin-Voigt damping.
    pub gamma: f64,
    /// Interior viscous damping.
    pub alpha: f64,
    pub alpha0: f64,
    pub alphal: f64,
}

impl Default for PhysicalParams {
    /// Fixed experiment values (`l = 1`, `m0 = 1`, `ml = 1.5`, `k3 = 1`,
    /// `β = 1`) with the damping/stiffness of the stability study
    /// (`γ = α_l = 0.1`, `k0 = kl = 1`, `α = α0 = 0`).
    fn default() -> Self {
        Self {
            l: 1.0,
            m0: 1.0,
            ml: 1.5,
            k0: 1.0,
            kl: 1.0,
            k3: 1.0,
            beta: 1.0,
            gamma: 0.1,
            alpha: 0.0,
            alpha0: 0.0,
            alphal: 0.1,
        }
    }
}

impl PhysicalParams {
    /// Lengths, masses, `β` and the linear stiffnesses must be positive; the
    /// cubic stiffness and all dampings nonnegative.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l", self.l),
            ("m0", self.m0),
            ("ml", self.ml),
            ("k0", self.k0),
            ("kl", self.kl),
            ("beta", self.beta),
        ];
        for (field, v) in positive {
            if !v.is_finite() {
                return Err(Error::InvalidParams {
                    field,
                    reason: "must be finite",
                });
            }
            if v <= 0.0 {
                return Err(Error::InvalidParams {
                    field,
                    reason: "must be positive",
                });
            }
        }
        let nonnegative = [
            ("k3", self.k3),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
            ("alpha0", self.alpha0),
            ("alphal", self.alphal),
        ];
        for (field, v) in nonnegative {
            if !v.is_finite() {
                return Err(Error::InvalidParams {
                    field,
                    reason: "must be finite",
                });
            }
            if v < 0.0 {
                return Err(Error::InvalidParams {
                    field,
                    reason: "must be nonnegative",
                });
            }
        }
        Ok(())
    }
}

/// Uniform grid `x_j = (j − 1) h`, `h = l / (n − 1)`, `j = 1..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub l: f64,
}

impl Grid {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::GridTooCoarse { n });
        }
        Ok(Self {
            n,
            h: l / (n - 1) as f64,
            l,
        })
    }

    /// Position of the zero-based node `j`. The last node is exactly `l`.
    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.n {
            self.l
        } else {
            j as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// The full-order model `ẋ = A x + F(x) + B u`, `y = C x`.
///
/// `F(x)` is zero except for row `nl_target_index` (the `v_n` equation),
/// which holds `nl_coeff · x[nl_state_index]³` with `nl_coeff = −k3/ml`.
#[derive(Debug, Clone)]
pub struct StateSpaceSystem {
    pub n: usize,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub nl_coeff: f64,
    pub nl_state_index: usize,
    pub nl_target_index: usize,
    pub params: PhysicalParams,
}

pub fn build_system(params: &PhysicalParams, n: usize) -> Result<StateSpaceSystem> {
    params.validate()?;
    let grid = Grid::new(params.l, n)?;
    let h = grid.h;
    let p = params;
    let dim = 2 * n;
    let mut a = Matrix::zeros(dim, dim);
    let (d, v) = (0usize, n);

    for i in 0..n {
        a[(d + i, v + i)] = 1.0;
    }

    let b2 = p.beta * p.beta;
    for i in 1..n - 1 {
        let row = v + i;
        a[(row, d + i - 1)] = b2 / (h * h);
        a[(row, d + i)] = -2.0 * b2 / (h * h);
        a[(row, d + i + 1)] = b2 / (h * h);
        a[(row, v + i - 1)] = p.gamma / (h * h);
        a[(row, v + i)] = -p.alpha - 2.0 * p.gamma / (h * h);
        a[(row, v + i + 1)] = p.gamma / (h * h);
    }

    let left = v;
    let s0 = 2.0 * h * p.m0;
    a[(left, d)] = -p.k0 / p.m0 - 3.0 * b2 / s0;
    a[(left, d + 1)] = 4.0 * b2 / s0;
    a[(left, d + 2)] = -b2 / s0;
    a[(left, v)] = -3.0 * p.gamma / s0 - p.alpha0 / p.m0;
    a[(left, v + 1)] = 4.0 * p.gamma / s0;
    a[(left, v + 2)] = -p.gamma / s0;

    let right = v + n - 1;
    let sl = 2.0 * h * p.ml;
    a[(right, d + n - 1)] = -p.kl / p.ml - 3.0 * b2 / sl;
    a[(right, d + n - 2)] = 4.0 * b2 / sl;
    a[(right, d + n - 3)] = -b2 / sl;
    a[(right, v + n - 1)] = -p.alphal / p.ml - 3.0 * p.gamma / sl;
    a[(right, v + n - 2)] = 4.0 * p.gamma / sl;
    a[(right, v + n - 3)] = -p.gamma / sl;

    let mut b = Matrix::zeros(dim, 1);
    b[(left, 0)] = 1.0 / p.m0;

    let mut c = Matrix::zeros(2, dim);
    c[(0, d + n - 1)] = 1.0;
    c[(1, v + n - 1)] = 1.0;

    Ok(StateSpaceSystem {
        n,
        a,
        b,
        c,
        nl_coeff: -p.k3 / p.ml,
        nl_state_index: d + n - 1,
        nl_target_index: right,
        params: *p,
    })
}

impl StateSpaceSystem {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// The cubic boundary force `F(x)`.
    pub fn eval_nonlinearity(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut f = vec![0.0; self.dim()];
        let dn = x[self.nl_state_index];
        f[self.nl_target_index] = self.nl_coeff * dn * dn * dn;
        Ok(f)
    }

    /// `A x + F(x) + B u`.
    pub fn fom_rhs(&self, x: &[f64], u: f64) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut dx = vec![0.0; self.dim()];
        self.fom_rhs_into(x, u, &mut dx);
        Ok(dx)
    }

    /// Allocation-free right-hand side; lengths are the caller's contract.
    pub fn fom_rhs_into(&self, x: &[f64], u: f64, dx: &mut [f64]) {
        self.a.mul_vec_into(x, dx);
        for (i, o) in dx.iter_mut().enumerate() {
            *o += self.b[(i, 0)] * u;
        }
        let dn = x[self.nl_state_index];
        dx[self.nl_target_index] += self.nl_coeff * dn * dn * dn;
    }

    pub fn output(&self, x: &[f64]) -> [f64; 2] {
        [x[self.nl_state_index], x[self.nl_target_index]]
    }
}

/// Samples displacement and velocity profiles on the grid. The end nodes
/// carry the mass states, so the displacement compatibility condition holds
/// by construction.
pub fn sample_initial_data(
    params: &PhysicalParams,
    n: usize,
    pos: impl Fn(f64) -> f64,
    vel: impl Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let grid = Grid::new(params.l, n)?;
    let mut x = Vec::with_capacity(2 * n);
    x.extend(grid.nodes().into_iter().map(&pos));
    x.extend(grid.nodes().into_iter().map(&vel));
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(x)
}

/// Discrete versions of the energy inner products, all `n × n` acting on
/// nodal values `w₁..w_n`.
#[derive(Debug, Clone)]
pub struct QuadraticForms {
    /// Trapezoid mass form plus the two point masses.
    pub m_h: Matrix,
    /// `β² ∫ w_x²` by cell differences plus the two linear springs.
    pub k_v: Matrix,
    /// Damping form: `γ ∫ w_x²` + `α ∫ w²` + endpoint dampers.
    pub d_sig2: Matrix,
}

pub fn quadratic_forms(params: &PhysicalParams, n: usize) -> Result<QuadraticForms> {
    params.validate()?;
    let grid = Grid::new(params.l, n)?;
    let h = grid.h;
    let mass = {
        let mut w = vec![h; n];
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
        Matrix::from_diagonal(&w)
    };
    let stiffness = {
        let mut s = Matrix::zeros(n, n);
        for j in 0..n - 1 {
            s[(j, j)] += 1.0 / h;
            s[(j + 1, j + 1)] += 1.0 / h;
            s[(j, j + 1)] -= 1.0 / h;
            s[(j + 1, j)] -= 1.0 / h;
        }
        s
    };
    let p = params;
    let mut m_h = mass.clone();
    m_h[(0, 0)] += p.m0;
    m_h[(n - 1, n - 1)] += p.ml;

    let mut k_v = stiffness.scale(p.beta * p.beta);
    k_v[(0, 0)] += p.k0;
    k_v[(n - 1, n - 1)] += p.kl;

    let mut d_sig2 = stiffness.scale(p.gamma).add(&mass.scale(p.alpha));
    d_sig2[(0, 0)] += p.alpha0;
    d_sig2[(n - 1, n - 1)] += p.alphal;

    Ok(QuadraticForms { m_h, k_v, d_sig2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_params() -> PhysicalParams {
        PhysicalParams {
            l: 1.0,
            m0: 1.0,
            ml: 1.0,
            k0: 1.0,
            kl: 1.0,
            k3: 1.0,
            beta: 1.0,
            gamma: 0.0,
            alpha: 0.0,
            alpha0: 0.0,
            alphal: 0.0,
        }
    }

    #[test]
    fn interior_stencil_three_nodes() {
        let sys = build_system(&unit_params(), 3).unwrap();
        // v₂' row: β²/h² = 4
        let row: Vec<f64> = (0..3).map(|j| sys.a[(4, j)]).collect();
        assert_eq!(row, vec![4.0, -8.0, 4.0]);
    }

    #[test]
    fn left_boundary_stencil_three_nodes() {
        let sys = build_system(&unit_params(), 3).unwrap();
        let row: Vec<f64> = (0..3).map(|j| sys.a[(3, j)]).collect();
        assert_eq!(row, vec![-4.0, 4.0, -1.0]);
        assert_eq!(sys.b[(3, 0)], 1.0);
    }

    #[test]
    fn right_boundary_mirrors_left() {
        let p = PhysicalParams {
            ml: 2.0,
            kl: 3.0,
            gamma: 0.5,
            alphal: 0.25,
            ..unit_params()
        };
        let sys = build_system(&p, 5).unwrap();
        let h = 0.25;
        let r = 9;
        let s = 2.0 * h * 2.0;
        assert_eq!(sys.a[(r, 4)], -3.0 / 2.0 - 3.0 / s);
        assert_eq!(sys.a[(r, 3)], 4.0 / s);
        assert_eq!(sys.a[(r, 2)], -1.0 / s);
        assert_eq!(sys.a[(r, 9)], -0.25 / 2.0 - 1.5 / s);
        assert_eq!(sys.a[(r, 8)], 2.0 / s);
        assert_eq!(sys.a[(r, 7)], -0.5 / s);
    }

    #[test]
    fn block_structure_and_io_vectors() {
        let sys = build_system(&PhysicalParams::default(), 10).unwrap();
        let n = 10;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(sys.a[(i, j)], 0.0);
                assert_eq!(sys.a[(i, n + j)], if i == j { 1.0 } else { 0.0 });
            }
        }
        let nonzero_b: Vec<usize> = (0..2 * n).filter(|&i| sys.b[(i, 0)] != 0.0).collect();
        assert_eq!(nonzero_b, vec![n]);
        assert_eq!(sys.b[(n, 0)], 1.0);
        for (row, idx) in [(0, n - 1), (1, 2 * n - 1)] {
            for j in 0..2 * n {
                assert_eq!(sys.c[(row, j)], if j == idx { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn rejects_bad_params_and_grid() {
        let p = PhysicalParams {
            m0: -1.0,
            ..PhysicalParams::default()
        };
        assert!(matches!(
            build_system(&p, 10),
            Err(Error::InvalidParams { field: "m0", .. })
        ));
        let p = PhysicalParams {
            alpha: -0.1,
            ..PhysicalParams::default()
        };
        assert!(matches!(
            build_system(&p, 10),
            Err(Error::InvalidParams { field: "alpha", .. })
        ));
        assert_eq!(
            build_system(&PhysicalParams::default(), 2).unwrap_err(),
            Error::GridTooCoarse { n: 2 }
        );
    }

    #[test]
    fn cubic_term() {
        let p = PhysicalParams {
            k3: 1.0,
            ml: 1.5,
            ..PhysicalParams::default()
        };
        let sys = build_system(&p, 4).unwrap();
        let mut x = vec![0.0; 8];
        assert!(sys.eval_nonlinearity(&x).unwrap().iter().all(|&v| v == 0.0));
        x[3] = 2.0;
        let f = sys.eval_nonlinearity(&x).unwrap();
        assert!((f[7] + 16.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.iter().filter(|&&v| v != 0.0).count(), 1);
        assert!(matches!(
            sys.eval_nonlinearity(&[0.0; 3]),
            Err(Error::DimensionMismatch {
                expected: 8,
                found: 3
            })
        ));
    }

    #[test]
    fn rhs_equilibrium_and_input_column() {
        let sys = build_system(&PhysicalParams::default(), 6).unwrap();
        let zero = vec![0.0; 12];
        assert!(sys.fom_rhs(&zero, 0.0).unwrap().iter().all(|&v| v == 0.0));
        let f = sys.fom_rhs(&zero, 1.0).unwrap();
        for (i, v) in f.iter().enumerate() {
            assert_eq!(*v, if i == 6 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn initial_data_sampling() {
        let p = unit_params();
        assert!(sample_initial_data(&p, 5, |_| 0.0, |_| 0.0)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let x = sample_initial_data(&p, 3, |x| x, |_| 0.0).unwrap();
        assert_eq!(&x[..3], &[0.0, 0.5, 1.0]);
        assert_eq!(
            sample_initial_data(&p, 3, |_| f64::NAN, |_| 0.0).unwrap_err(),
            Error::NonFinite
        );
    }

    #[test]
    fn damping_form_vanishes_without_damping() {
        let q = quadratic_forms(&unit_params(), 7).unwrap();
        assert_eq!(q.d_sig2.max_abs(), 0.0);
    }

    #[test]
    fn constant_profile_only_sees_springs() {
        let q = quadratic_forms(&unit_params(), 9).unwrap();
        let c = 0.7;
        let w = vec![c; 9];
        let kw = q.k_v.mul_vec(&w);
        let value: f64 = w.iter().zip(&kw).map(|(a, b)| a * b).sum();
        assert!((value - 2.0 * c * c).abs() < 1e-14);
    }
}
