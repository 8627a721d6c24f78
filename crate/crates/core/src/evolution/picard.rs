//! Picard iteration on the Duhamel formulation
//! `u = ψ(t)[W_α(t)u₀ - ½ χ_{t≥0} ∫₀ᵗ W_α(t-t') ∂_x(ψ_T²(t') u²(t')) dt']`.
//!
//! The Duhamel integral is evaluated on the nonnegative half of the time
//! lattice by exponential Simpson panels: the factor `e^{(t-t')Λ(ξ)}` is
//! integrated exactly and the forcing is interpolated by quadratics. The
//! integral is advanced panel by panel, so `W_α` is only ever applied
//! forward in time.

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bilinear::s_alpha;
use crate::bourgain::{bump_psi, psi, xbs_norm_any, Representation, SpaceTimeField, SpaceTimeGrid};
use crate::error::{Error, Result};
use crate::expint::ExpSimpsonWeights;
use crate::spectral::{
    linear_symbol, nonlinear_term, semigroup_factor, sobolev_norm, Field, Grid1D, ModelParams,
    SpectralField,
};

/// Increment size at which the iteration is declared converged.
pub const PICARD_TOLERANCE: f64 = 1e-8;
/// Quadrature defect (in `X^{1/2,s}`) above which a warning is raised.
pub const QUADRATURE_WARNING: f64 = 1e-6;

fn default_t_window() -> f64 {
    0.5
}
fn default_n_quad() -> usize {
    257
}
fn default_max_iters() -> usize {
    30
}
fn default_s_c_plus() -> f64 {
    -0.5
}
fn default_t_box() -> f64 {
    4.0
}

/// Settings of the fixed-point solver.
///
/// The time lattice is `[-T_box, T_box)` with `2(n_quad - 1)` samples, so
/// that the quadrature nodes on `[0, T_box]` are exactly `n_quad`
/// lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    #[serde(default = "default_t_window", alias = "T")]
    pub t_window: f64,
    #[serde(default = "default_n_quad")]
    pub n_quad: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_s_c_plus")]
    pub s_c_plus: f64,
    /// Weight of the `X^{1/2,s}` part of the Z-norm; derived from the data when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_t_box")]
    pub t_box: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            t_window: default_t_window(),
            n_quad: default_n_quad(),
            max_iters: default_max_iters(),
            s_c_plus: default_s_c_plus(),
            gamma: None,
            t_box: default_t_box(),
        }
    }
}

impl PicardConfig {
    pub fn n_time(&self) -> usize {
        2 * self.n_quad.saturating_sub(1)
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        if !(self.t_window > 0.0) {
            return Err(Error::param("T", "must be positive"));
        }
        let intervals = self.n_quad.saturating_sub(1);
        if intervals < 8 || !intervals.is_power_of_two() {
            return Err(Error::param(
                "n_quad",
                format!(
                    "n_quad - 1 must be a power of two >= 8, got {}",
                    self.n_quad
                ),
            ));
        }
        if self.max_iters < 2 {
            return Err(Error::param("max_iters", "must be at least 2"));
        }
        if !(self.t_box >= 2.0) {
            return Err(Error::param("t_box", "must be >= 2 to contain supp ψ"));
        }
        if 2.0 * self.t_window > self.t_box {
            return Err(Error::param(
                "T",
                "supp ψ_T² = [0, 2T] must fit inside the box",
            ));
        }
        let threshold = s_alpha(params.alpha)?;
        if !(self.s_c_plus > threshold) {
            return Err(Error::param(
                "s_c_plus",
                format!("must exceed s_alpha = {threshold}, got {}", self.s_c_plus),
            ));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0) {
                return Err(Error::param("gamma", "must be positive"));
            }
        }
        Ok(())
    }

    pub fn space_time_grid(&self, grid_x: Grid1D) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(grid_x, self.n_time(), self.t_box)
    }

    /// `γ = ‖u₀‖_{H^{s_c⁺}} / ‖u₀‖_{H^s}`, or 1 for vanishing data.
    pub fn gamma_for(&self, u0: &SpectralField, s: f64) -> f64 {
        if let Some(g) = self.gamma {
            return g;
        }
        let low = sobolev_norm(u0, s);
        if low == 0.0 {
            1.0
        } else {
            sobolev_norm(u0, self.s_c_plus) / low
        }
    }
}

/// `∫₀^{t_q} W_α(t_q - t') g(t') dt'` at every node `t_q = q·dt` given the
/// forcing at nodes `q = 0 … M` (`M` even).
pub fn duhamel_integral(
    forcing: &[SpectralField],
    dt: f64,
    alpha: f64,
) -> Result<Vec<SpectralField>> {
    let m = forcing.len().saturating_sub(1);
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::param("forcing", "need an even number of intervals"));
    }
    let grid = forcing[0].grid;
    let n = grid.n_points();
    let weights: Vec<ExpSimpsonWeights> = (0..n)
        .map(|i| ExpSimpsonWeights::new(linear_symbol(grid.xi(i), alpha), dt))
        .collect();
    let mut out = vec![SpectralField::zeros(grid); m + 1];
    for p in (0..m).step_by(2) {
        let (g0, g1, g2) = (&forcing[p], &forcing[p + 1], &forcing[p + 2]);
        let mut mid = SpectralField::zeros(grid);
        let mut end = SpectralField::zeros(grid);
        for (i, w) in weights.iter().enumerate() {
            let base = out[p].coeffs[i];
            mid.coeffs[i] = w.e_half * base
                + dt * (w.half[0] * g0.coeffs[i]
                    + w.half[1] * g1.coeffs[i]
                    + w.half[2] * g2.coeffs[i]);
            end.coeffs[i] = w.e_full * base
                + dt * (w.full[0] * g0.coeffs[i]
                    + w.full[1] * g1.coeffs[i]
                    + w.full[2] * g2.coeffs[i]);
        }
        out[p + 1] = mid;
        out[p + 2] = end;
    }
    Ok(out)
}

/// `ψ(t) W_α(t) u₀` sampled on the whole lattice.
pub fn free_evolution(u0: &Field, st_grid: SpaceTimeGrid, alpha: f64) -> SpaceTimeField {
    let u0_hat = u0.forward();
    let rows = (0..st_grid.n_time())
        .map(|j| free_row(&u0_hat, st_grid.t(j), alpha))
        .collect::<Vec<_>>();
    SpaceTimeField::from_spectral_rows(st_grid, &rows).expect("rows built on the lattice")
}

fn free_row(u0_hat: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let cut = psi(t);
    let grid = u0_hat.grid;
    let coeffs = if cut == 0.0 {
        vec![Complex64::new(0.0, 0.0); grid.n_points()]
    } else {
        u0_hat
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * semigroup_factor(grid.xi(i), t, alpha) * cut)
            .collect()
    };
    SpectralField { grid, coeffs }
}

/// One application of the Duhamel map `F_{u₀}` to a space-time field.
pub fn duhamel_map(
    u: &SpaceTimeField,
    u0: &Field,
    cfg: &PicardConfig,
    params: &ModelParams,
) -> Result<SpaceTimeField> {
    cfg.validate(params)?;
    let st_grid = cfg.space_time_grid(u0.grid)?;
    if u.st_grid != st_grid {
        return Err(Error::ShapeMismatch(
            "field lattice does not match the Picard configuration".into(),
        ));
    }
    let u = u.to_physical();
    let u0_hat = u0.forward();
    let alpha = params.alpha;
    let nt = st_grid.n_time();
    let zero = st_grid.zero_index();
    let mut rows: Vec<SpectralField> = (0..nt)
        .map(|j| free_row(&u0_hat, st_grid.t(j), alpha))
        .collect();

    if params.coupling != 0.0 {
        let m = nt / 2;
        let forcing: Vec<SpectralField> = (0..=m)
            .map(|q| {
                let j = (zero + q) % nt;
                let t = q as f64 * st_grid.dt();
                let cut = bump_psi(t, cfg.t_window);
                let weight = params.coupling * cut * cut;
                if weight == 0.0 {
                    return SpectralField::zeros(u0.grid);
                }
                let mut g = nonlinear_term(&u.slice_spectral(j));
                for c in &mut g.coeffs {
                    *c *= weight;
                }
                g
            })
            .collect();
        let integral = duhamel_integral(&forcing, st_grid.dt(), alpha)?;
        for q in 0..m {
            let t = q as f64 * st_grid.dt();
            let cut = psi(t);
            if cut == 0.0 {
                continue;
            }
            let row = &mut rows[zero + q];
            for (r, c) in row.coeffs.iter_mut().zip(&integral[q].coeffs) {
                *r += c * cut;
            }
        }
    }
    SpaceTimeField::from_spectral_rows(st_grid, &rows)
}

/// `‖F(u)_{n_quad} - F(u)_{(n_quad+1)/2}‖_{X^{1/2,s}}` on the coarse lattice.
pub fn duhamel_resolution_defect(
    u: &SpaceTimeField,
    u0: &Field,
    cfg: &PicardConfig,
    params: &ModelParams,
) -> Result<f64> {
    let coarse_cfg = PicardConfig {
        n_quad: (cfg.n_quad - 1) / 2 + 1,
        ..*cfg
    };
    coarse_cfg.validate(params)?;
    let coarse_grid = coarse_cfg.space_time_grid(u0.grid)?;
    let decimate = |f: &SpaceTimeField| {
        let phys = f.to_physical();
        let mut out = SpaceTimeField::zeros(coarse_grid, Representation::Physical);
        for j in 0..coarse_grid.n_time() {
            out.row_mut(j).copy_from_slice(phys.row(2 * j));
        }
        out
    };
    let fine = decimate(&duhamel_map(u, u0, cfg, params)?);
    let coarse = duhamel_map(&decimate(u), u0, &coarse_cfg, params)?;
    Ok(xbs_norm_any(
        &fine.sub(&coarse)?,
        0.5,
        params.s,
        params.alpha,
    ))
}

/// `‖u‖_Z = ‖u‖_{X^{1/2,s_c⁺}} + γ ‖u‖_{X^{1/2,s}}`.
pub fn z_norm(u: &SpaceTimeField, cfg: &PicardConfig, params: &ModelParams, gamma: f64) -> f64 {
    xbs_norm_any(u, 0.5, cfg.s_c_plus, params.alpha)
        + gamma * xbs_norm_any(u, 0.5, params.s, params.alpha)
}

/// Result of [`picard_solve`].
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub solution: SpaceTimeField,
    /// `‖u^{k+1} - u^k‖_Z` for `k = 0, 1, …`.
    pub increments: Vec<f64>,
    /// `r_k = ‖u^{k+1} - u^k‖_Z / ‖u^k - u^{k-1}‖_Z`.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub gamma: f64,
    pub quadrature_defect: f64,
}

impl PicardOutcome {
    /// Physical slice `u(t_j)` of the fixed point at lattice index `j`.
    pub fn state_at(&self, j: usize) -> SpectralField {
        self.solution.slice_spectral(j)
    }
}

/// Iterates `u^{k+1} = F(u^k)` from `u^0 = 0` until the Z-norm increment
/// drops below [`PICARD_TOLERANCE`].
pub fn picard_solve(u0: &Field, cfg: &PicardConfig, params: &ModelParams) -> Result<PicardOutcome> {
    cfg.validate(params)?;
    let st_grid = cfg.space_time_grid(u0.grid)?;
    let gamma = cfg.gamma_for(&u0.forward(), params.s);
    let mut u = SpaceTimeField::zeros(st_grid, Representation::Physical);
    let mut increments = Vec::new();
    let mut ratios = Vec::new();
    for k in 0..cfg.max_iters {
        let next = duhamel_map(&u, u0, cfg, params)?;
        if !next.is_finite() {
            return Err(Error::BlowUp { time: f64::NAN });
        }
        let d = z_norm(&next.sub(&u)?, cfg, params, gamma);
        if let Some(&prev) = increments.last() {
            ratios.push(d / prev);
        }
        increments.push(d);
        u = next;
        if d < PICARD_TOLERANCE {
            let quadrature_defect = duhamel_resolution_defect(&u, u0, cfg, params)?;
            if quadrature_defect > QUADRATURE_WARNING {
                warn!(
                    "Duhamel quadrature under-resolved: halving n_quad moves F(u) by {quadrature_defect:e} in X^(1/2,s)"
                );
            }
            return Ok(PicardOutcome {
                solution: u,
                increments,
                ratios,
                iterations: k + 1,
                gamma,
                quadrature_defect,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iters,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup() -> (Grid1D, PicardConfig, ModelParams) {
        let g = Grid1D::new(64, 16.0 * PI).unwrap();
        let cfg = PicardConfig {
            n_quad: 129,
            ..PicardConfig::default()
        };
        (g, cfg, ModelParams::new(1.0, -0.9).unwrap())
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let (g, cfg, p) = setup();
        let st = cfg.space_time_grid(g).unwrap();
        let zero = SpaceTimeField::zeros(st, Representation::Physical);
        let f = duhamel_map(&zero, &Field::zeros(g), &cfg, &p).unwrap();
        assert!(f.values.iter().all(|c| c.norm() == 0.0));
        let out = picard_solve(&Field::zeros(g), &cfg, &p).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.gamma, 1.0);
    }

    #[test]
    fn linear_part_only() {
        let (g, cfg, p) = setup();
        let p = p.with_coupling(0.0);
        let u0 = Field::from_fn(g, |x| (-x * x / 4.0).exp());
        let st = cfg.space_time_grid(g).unwrap();
        let u = free_evolution(&u0, st, 1.0).scaled(3.0);
        let f = duhamel_map(&u, &u0, &cfg, &p).unwrap();
        let lin = free_evolution(&u0, st, 1.0);
        for (a, b) in f.values.iter().zip(&lin.values) {
            assert!((a - b).norm() < 1e-14);
        }
        // vanishes for t <= -2
        for j in 0..st.n_time() {
            if st.t(j) <= -2.0 {
                assert!(f.row(j).iter().all(|c| c.norm() == 0.0));
            }
        }
    }

    #[test]
    fn config_validation() {
        let p = ModelParams::new(1.0, -0.9).unwrap();
        let bad = PicardConfig {
            s_c_plus: -1.2,
            ..PicardConfig::default()
        };
        assert!(bad.validate(&p).is_err());
        let bad = PicardConfig {
            n_quad: 100,
            ..PicardConfig::default()
        };
        assert!(bad.validate(&p).is_err());
        let bad = PicardConfig {
            t_window: 3.0,
            ..PicardConfig::default()
        };
        assert!(bad.validate(&p).is_err());
        assert!(PicardConfig::default().validate(&p).is_ok());
    }

    #[test]
    fn duhamel_integral_of_constant_forcing() {
        // ∫₀ᵗ e^{(t-t')Λ} dt' = (e^{tΛ} - 1)/Λ
        let g = Grid1D::new(16, 2.0 * PI).unwrap();
        let mut one = SpectralField::zeros(g);
        for c in &mut one.coeffs {
            *c = Complex64::new(1.0, 0.0);
        }
        let dt = 0.01;
        let out = duhamel_integral(&vec![one; 65], dt, 0.6).unwrap();
        for q in [1, 7, 64] {
            let t = q as f64 * dt;
            for i in 1..16 {
                let lam = linear_symbol(g.xi(i), 0.6);
                let exact = ((lam * t).exp() - 1.0) / lam;
                assert!((out[q].coeffs[i] - exact).norm() < 1e-12);
            }
            assert!((out[q].coeffs[0].re - t).abs() < 1e-13);
        }
    }
}
