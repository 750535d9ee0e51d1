//! Energy, decay fits, stability margins and output error metrics.

use alloc::vec::Vec;

// Shadowed by std's inherent methods whenever std is in the build graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{dot, eigenvalues, Matrix};
use crate::model::{PhysicalParams, QuadraticForms, StateSpaceSystem};
use crate::ode::OdeOptions;
use crate::rom::{integrate_fom, uniform_grid, OutputSeries};
use crate::signals::InputSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
}

fn quadratic(m: &Matrix, x: &[f64]) -> f64 {
    dot(x, &m.mul_vec(x))
}

/// Kinetic `½ vᵀ M v`, potential `½ dᵀ K d + (k3/4) d_n⁴`.
pub fn compute_energy(
    forms: &QuadraticForms,
    params: &PhysicalParams,
    x: &[f64],
) -> Result<Energy> {
    let n = forms.m_h.rows();
    if x.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: x.len(),
        });
    }
    let (d, v) = x.split_at(n);
    let kinetic = 0.5 * quadratic(&forms.m_h, v);
    let dn = d[n - 1];
    let potential = 0.5 * quadratic(&forms.k_v, d) + 0.25 * params.k3 * dn * dn * dn * dn;
    Ok(Energy {
        total: kinetic + potential,
        kinetic,
        potential,
    })
}

/// Unforced energy history with a fitted exponential rate.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
    /// Slope of the least-squares line through `log E` on `[0.1 tf, tf]`.
    pub fitted_rate: f64,
    pub r_squared: f64,
    /// Set when the energy is not positive enough to fit (e.g. zero data);
    /// the rate is then reported as 0.
    pub degenerate: bool,
}

impl EnergyReport {
    /// Largest increase `E(t_{k+1}) − E(t_k)` over the samples (≤ 0 when
    /// monotone).
    pub fn max_increase(&self) -> f64 {
        self.total
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.total.len() < 2 || self.max_increase() <= slack
    }
}

/// Integrates the unforced FOM from `x0` and evaluates the energy on
/// `samples` uniform points of `[0, tf]`.
pub fn energy_decay(
    sys: &StateSpaceSystem,
    forms: &QuadraticForms,
    x0: &[f64],
    tf: f64,
    opts: &OdeOptions,
    samples: usize,
) -> Result<EnergyReport> {
    let times = uniform_grid(0.0, tf, samples);
    let mut total = Vec::with_capacity(times.len());
    let mut kinetic = Vec::with_capacity(times.len());
    let mut potential = Vec::with_capacity(times.len());
    let mut push = |e: Energy| {
        total.push(e.total);
        kinetic.push(e.kinetic);
        potential.push(e.potential);
    };
    if x0.iter().all(|&v| v == 0.0) {
        if x0.len() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                found: x0.len(),
            });
        }
        for _ in &times {
            push(compute_energy(forms, &sys.params, x0)?);
        }
    } else {
        let traj = integrate_fom(sys, InputSpec::zero(), x0, 0.0, tf, opts)?;
        let mut x = alloc::vec![0.0; sys.dim()];
        for &t in &times {
            traj.state_at_into(t, &mut x)?;
            push(compute_energy(forms, &sys.params, &x)?);
        }
    }
    let fit = fit_log_rate(&times, &total, 0.1 * tf);
    let (fitted_rate, r_squared, degenerate) = match fit {
        Some((rate, r2)) => (rate, r2, false),
        None => (0.0, 0.0, true),
    };
    Ok(EnergyReport {
        times,
        total,
        kinetic,
        potential,
        fitted_rate,
        r_squared,
        degenerate,
    })
}

/// Least-squares slope and R² of `log E` against `t` for `t ≥ t_start`.
/// `None` if fewer than two positive samples are available.
fn fit_log_rate(times: &[f64], energy: &[f64], t_start: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(energy)
        .filter(|&(&t, &e)| t >= t_start && e > 0.0 && e.is_finite())
        .map(|(&t, &e)| (t, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sty * sty / (stt * syy)
    };
    Some((slope, r2))
}

/// Values at the interior strict local maxima of a sampled signal.
pub fn local_maxima(values: &[f64]) -> Vec<f64> {
    values
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2])
        .map(|w| w[1])
        .collect()
}

/// Largest real part over the spectrum of `A`.
pub fn stability_margin(a: &Matrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .fold(f64::NEG_INFINITY, |m, l| m.max(l.re)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelError {
    pub rel_l2: f64,
    pub rel_linf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMetrics {
    /// Over all channels together.
    pub rel_l2: f64,
    pub rel_linf: f64,
    pub per_channel: Vec<ChannelError>,
}

fn ratio(num: f64, den: f64) -> f64 {
    // absolute fallback for an identically zero reference
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn check_grids(y_ref: &OutputSeries, y_test: &OutputSeries) -> Result<()> {
    if y_ref.times != y_test.times
        || y_ref.channels.len() != y_test.channels.len()
        || y_ref
            .channels
            .iter()
            .chain(&y_test.channels)
            .any(|c| c.len() != y_ref.times.len())
    {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Relative discrete 2- and max-norm errors of `y_test` against `y_ref`.
pub fn output_error(y_ref: &OutputSeries, y_test: &OutputSeries) -> Result<ErrorMetrics> {
    check_grids(y_ref, y_test)?;
    let mut per_channel = Vec::with_capacity(y_ref.channels.len());
    let (mut diff_sq, mut ref_sq, mut diff_max, mut ref_max) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (r, t) in y_ref.channels.iter().zip(&y_test.channels) {
        let (mut dsq, mut rsq, mut dmax, mut rmax) = (0.0, 0.0, 0.0f64, 0.0f64);
        for (a, b) in r.iter().zip(t) {
            let e = a - b;
            dsq += e * e;
            rsq += a * a;
            dmax = dmax.max(e.abs());
            rmax = rmax.max(a.abs());
        }
        per_channel.push(ChannelError {
            rel_l2: ratio(dsq.sqrt(), rsq.sqrt()),
            rel_linf: ratio(dmax, rmax),
        });
        diff_sq += dsq;
        ref_sq += rsq;
        diff_max = diff_max.max(dmax);
        ref_max = ref_max.max(rmax);
    }
    Ok(ErrorMetrics {
        rel_l2: ratio(diff_sq.sqrt(), ref_sq.sqrt()),
        rel_linf: ratio(diff_max, ref_max),
        per_channel,
    })
}

/// Pointwise error `‖y_ref(t_k) − y_test(t_k)‖_∞ / max_j ‖y_ref(t_j)‖_∞`,
/// normalized per channel by that channel's peak reference magnitude.
pub fn pointwise_error(y_ref: &OutputSeries, y_test: &OutputSeries) -> Result<Vec<f64>> {
    check_grids(y_ref, y_test)?;
    let mut out = alloc::vec![0.0f64; y_ref.len()];
    for (r, t) in y_ref.channels.iter().zip(&y_test.channels) {
        let peak = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (k, (a, b)) in r.iter().zip(t).enumerate() {
            out[k] = out[k].max(ratio((a - b).abs(), peak));
        }
    }
    Ok(out)
}

/// End time of the longest initial stretch on which the pointwise error
/// stays below `tol` (the first grid time if it fails immediately).
pub fn accurate_horizon(y_ref: &OutputSeries, y_test: &OutputSeries, tol: f64) -> Result<f64> {
    let errs = pointwise_error(y_ref, y_test)?;
    let first_bad = errs.iter().position(|&e| e >= tol);
    Ok(match first_bad {
        Some(0) | None if y_ref.is_empty() => 0.0,
        Some(0) => y_ref.times[0],
        Some(k) => y_ref.times[k - 1],
        None => *y_ref.times.last().unwrap_or(&0.0),
    })
}
