//! Time integration of the dissipative KdV equation.
//!
//! Two independent routes are provided: a direct ETD-RK4 integrator
//! ([`solve_ivp`]) and a Picard iteration on the Duhamel formulation over
//! a space-time lattice ([`picard_solve`]). On small data they must agree.

mod io;
mod picard;

pub use io::{read_snapshot, write_snapshot, write_trajectory_csv, SnapshotHeader};
pub use picard::{
    duhamel_integral, duhamel_map, duhamel_resolution_defect, free_evolution, picard_solve, z_norm,
    PicardConfig, PicardOutcome, PICARD_TOLERANCE, QUADRATURE_WARNING,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expint::Etdrk4Coeffs;
use crate::spectral::{
    linear_symbol, nonlinear_term, sobolev_norm, Field, ModelParams, SpectralField,
};

/// Relative L² growth tolerated per step before reporting a violation.
pub const DISSIPATION_TOLERANCE: f64 = 1e-9;

/// Recorded solution `u(t_i)`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub params: ModelParams,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&SpectralField> {
        self.states.last()
    }

    pub fn l2_norms(&self) -> Vec<f64> {
        self.states.iter().map(|s| sobolev_norm(s, 0.0)).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.states.iter().map(SpectralField::mean).collect()
    }
}

/// ETD-RK4 integrator with coefficients cached for one `(grid, dt, α)`.
#[derive(Debug, Clone)]
pub struct Etdrk4Stepper {
    dt: f64,
    coupling: f64,
    coeffs: Vec<Etdrk4Coeffs>,
}

impl Etdrk4Stepper {
    pub fn new(grid: crate::spectral::Grid1D, dt: f64, params: &ModelParams) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        params.validate()?;
        let coeffs = (0..grid.n_points())
            .map(|i| Etdrk4Coeffs::new(linear_symbol(grid.xi(i), params.alpha), dt))
            .collect();
        Ok(Self {
            dt,
            coupling: params.coupling,
            coeffs,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nonlinear(&self, v: &SpectralField) -> SpectralField {
        let mut n = nonlinear_term(v);
        if self.coupling != 1.0 {
            for c in &mut n.coeffs {
                *c *= self.coupling;
            }
        }
        n
    }

    /// Advances one step without dissipation checks.
    pub fn advance(&self, v: &SpectralField) -> SpectralField {
        let grid = v.grid;
        if self.coupling == 0.0 {
            let coeffs = v
                .coeffs
                .iter()
                .zip(&self.coeffs)
                .map(|(u, c)| c.e * u)
                .collect();
            return SpectralField { grid, coeffs };
        }
        let combine = |f: &dyn Fn(usize) -> Complex64| SpectralField {
            grid,
            coeffs: (0..grid.n_points()).map(f).collect(),
        };
        let nv = self.nonlinear(v);
        let a = combine(&|i| self.coeffs[i].e_half * v.coeffs[i] + self.coeffs[i].q * nv.coeffs[i]);
        let na = self.nonlinear(&a);
        let b = combine(&|i| self.coeffs[i].e_half * v.coeffs[i] + self.coeffs[i].q * na.coeffs[i]);
        let nb = self.nonlinear(&b);
        let c = combine(&|i| {
            self.coeffs[i].e_half * a.coeffs[i]
                + self.coeffs[i].q * (2.0 * nb.coeffs[i] - nv.coeffs[i])
        });
        let nc = self.nonlinear(&c);
        combine(&|i| {
            let k = &self.coeffs[i];
            k.e * v.coeffs[i]
                + k.f1 * nv.coeffs[i]
                + 2.0 * k.f2 * (na.coeffs[i] + nb.coeffs[i])
                + k.f3 * nc.coeffs[i]
        })
    }

    /// One step at time `t`, reporting blow-up and dissipation violations.
    pub fn step_checked(&self, v: &SpectralField, t: f64) -> Result<SpectralField> {
        let next = self.advance(v);
        if !next.is_finite() {
            return Err(Error::BlowUp { time: t + self.dt });
        }
        let before = sobolev_norm(v, 0.0);
        let after = sobolev_norm(&next, 0.0);
        if after > before * (1.0 + DISSIPATION_TOLERANCE) && after > f64::MIN_POSITIVE {
            return Err(Error::Stability {
                time: t + self.dt,
                growth: after / before - 1.0,
                norm: "L2".into(),
            });
        }
        Ok(next)
    }
}

/// One ETD-RK4 step of size `dt`.
pub fn etdrk4_step(u: &SpectralField, dt: f64, params: &ModelParams) -> Result<SpectralField> {
    Etdrk4Stepper::new(u.grid, dt, params)?.step_checked(u, 0.0)
}

/// Step size satisfying `dt · max|u| · max|ξ| ≤ cfl`.
pub fn cfl_time_step(u0: &Field, cfl: f64) -> f64 {
    let xi_max = u0.grid.n_points() as f64 / 2.0 * u0.grid.dxi();
    let amp = u0.max_abs();
    if amp == 0.0 {
        return f64::INFINITY;
    }
    cfl / (amp * xi_max)
}

/// Integrates from `u0` to time `t_final` with step `dt` (shortened so
/// that it divides `t_final`), recording every `record_every` steps and
/// the final state.
pub fn solve_ivp(
    u0: &Field,
    t_final: f64,
    dt: f64,
    params: &ModelParams,
    record_every: usize,
) -> Result<Trajectory> {
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::param(
            "T",
            format!("must be positive, got {t_final}"),
        ));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if record_every == 0 {
        return Err(Error::param("record_every", "must be at least 1"));
    }
    let n_steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / n_steps as f64;
    let stepper = Etdrk4Stepper::new(u0.grid, h, params)?;

    let mut v = u0.forward();
    let mut times = vec![0.0];
    let mut states = vec![v.clone()];
    for step in 1..=n_steps {
        let t = (step - 1) as f64 * h;
        v = stepper.step_checked(&v, t)?;
        if step % record_every == 0 || step == n_steps {
            times.push(step as f64 * h);
            states.push(v.clone());
        }
    }
    Ok(Trajectory {
        times,
        states,
        params: *params,
    })
}

/// `‖u(t_i)‖_{H^{s}}` along a trajectory, with a monotonicity verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayDiagnostic {
    pub s_probe: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Largest relative increase between consecutive records.
    pub max_relative_increase: f64,
    pub nonincreasing: bool,
}

pub fn decay_diagnostic(traj: &Trajectory, s_probe: f64) -> DecayDiagnostic {
    let norms: Vec<f64> = traj
        .states
        .iter()
        .map(|s| sobolev_norm(s, s_probe))
        .collect();
    let max_relative_increase = norms
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                (w[1] - w[0]) / w[0]
            } else {
                w[1]
            }
        })
        .fold(0.0, f64::max);
    DecayDiagnostic {
        s_probe,
        times: traj.times.clone(),
        norms,
        max_relative_increase,
        nonincreasing: max_relative_increase <= DISSIPATION_TOLERANCE,
    }
}

/// Largest `L²` distance between the Picard fixed point and [`solve_ivp`]
/// (stepping with the lattice spacing) over the lattice times in `[0, T/2]`.
pub fn picard_direct_difference(
    u0: &Field,
    outcome: &PicardOutcome,
    cfg: &PicardConfig,
    params: &ModelParams,
) -> Result<f64> {
    let st = outcome.solution.st_grid;
    let nodes: Vec<usize> = (st.zero_index()..st.n_time())
        .filter(|&j| st.t(j) <= 0.5 * cfg.t_window + 1e-12)
        .collect();
    let t_last = st.t(*nodes.last().expect("t = 0 is a lattice time"));
    if t_last <= 0.0 {
        return Ok(0.0);
    }
    let traj = solve_ivp(u0, t_last, st.dt(), params, 1)?;
    let mut worst = 0.0f64;
    for (k, &j) in nodes.iter().enumerate() {
        let a = outcome.state_at(j).inverse();
        let b = traj.states[k].inverse();
        let diff = Field::new(
            u0.grid,
            a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect(),
        )?;
        worst = worst.max(diff.l2_norm());
    }
    Ok(worst)
}
