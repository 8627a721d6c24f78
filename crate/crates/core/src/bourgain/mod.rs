//! Discretized space-time Fourier analysis.
//!
//! Space-time fields live on `[-T_box, T_box) × [-L/2, L/2)`. The
//! transform approximates `û(τ, ξ) = ∫∫ e^{-i(τt + ξx)} u dt dx`, so with
//! quadrature weight `Δτ Δξ / (2π)²` the discrete Parseval identity is
//! exact, mirroring [`crate::spectral`].

mod lemmas;

pub use lemmas::{
    calc_a_ratio, calc_b_ratio, lemma_check, lemma_check_with, time_localized_ensemble, LemmaKind,
    LemmaOptions, LemmaVerdict,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{fft2_inplace, fft_inplace, parity_sign, signed_index};
use crate::spectral::{bracket, dissipative_bracket, Grid1D, SpectralField};

/// Smooth cutoff: `1` on `[-1, 1]`, `0` outside `(-2, 2)`, and
/// `exp(1 - 1/(1 - (|t|-1)²))` in between.
pub fn psi(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let y = a - 1.0;
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

/// `ψ_T(t) = ψ(t / T)`.
pub fn bump_psi(t: f64, scale: f64) -> f64 {
    debug_assert!(scale > 0.0);
    psi(t / scale)
}

/// Tensor lattice in `(t, x)` and its dual `(τ, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    pub grid_x: Grid1D,
    n_time: usize,
    t_box: f64,
}

impl SpaceTimeGrid {
    pub fn new(grid_x: Grid1D, n_time: usize, t_box: f64) -> Result<Self> {
        if n_time < 16 || !n_time.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_time must be a power of two >= 16, got {n_time}"
            )));
        }
        if !(t_box >= 2.0) || !t_box.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "T_box must be >= 2 to contain supp ψ, got {t_box}"
            )));
        }
        Ok(Self {
            grid_x,
            n_time,
            t_box,
        })
    }

    #[inline]
    pub fn n_time(&self) -> usize {
        self.n_time
    }

    #[inline]
    pub fn n_x(&self) -> usize {
        self.grid_x.n_points()
    }

    #[inline]
    pub fn t_box(&self) -> f64 {
        self.t_box
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        2.0 * self.t_box / self.n_time as f64
    }

    /// `Δτ = 2π / (2 T_box)`.
    #[inline]
    pub fn dtau(&self) -> f64 {
        std::f64::consts::PI / self.t_box
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        -self.t_box + j as f64 * self.dt()
    }

    /// Index of `t = 0`.
    #[inline]
    pub fn zero_index(&self) -> usize {
        self.n_time / 2
    }

    #[inline]
    pub fn tau(&self, m: usize) -> f64 {
        signed_index(m, self.n_time) as f64 * self.dtau()
    }

    pub fn tau_frequencies(&self) -> Vec<f64> {
        let half = (self.n_time / 2) as i64;
        (-half..half).map(|m| m as f64 * self.dtau()).collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_time * self.n_x()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of one frequency cell, `Δτ Δξ / (2π)²`.
    #[inline]
    pub fn frequency_weight(&self) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        self.dtau() * self.grid_x.dxi() / (two_pi * two_pi)
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dt() * self.grid_x.spacing()
    }

    /// Same box, twice the samples in each direction.
    pub fn refined(&self) -> Result<Self> {
        let gx = Grid1D::new(2 * self.n_x(), self.grid_x.domain_length())?;
        Self::new(gx, 2 * self.n_time, self.t_box)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Samples `u(t_j, x_k)`.
    Physical,
    /// Coefficients `û(τ_m, ξ_k)`, both axes in FFT order.
    Spectral,
}

/// Complex space-time data, row-major with time as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub st_grid: SpaceTimeGrid,
    pub values: Vec<Complex64>,
    pub representation: Representation,
}

impl SpaceTimeField {
    pub fn zeros(st_grid: SpaceTimeGrid, representation: Representation) -> Self {
        Self {
            st_grid,
            values: vec![Complex64::new(0.0, 0.0); st_grid.len()],
            representation,
        }
    }

    pub fn from_fn(st_grid: SpaceTimeGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let gx = st_grid.grid_x;
        let mut values = Vec::with_capacity(st_grid.len());
        for j in 0..st_grid.n_time() {
            let t = st_grid.t(j);
            for k in 0..gx.n_points() {
                values.push(f(t, gx.x(k)));
            }
        }
        Self {
            st_grid,
            values,
            representation: Representation::Physical,
        }
    }

    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j * self.st_grid.n_x() + k
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        let n = self.st_grid.n_x();
        &self.values[j * n..(j + 1) * n]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [Complex64] {
        let n = self.st_grid.n_x();
        &mut self.values[j * n..(j + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= a;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.st_grid != other.st_grid || self.representation != other.representation {
            return Err(Error::ShapeMismatch(
                "space-time fields live on different lattices or representations".into(),
            ));
        }
        Ok(())
    }

    pub fn to_spectral(&self) -> SpaceTimeField {
        match self.representation {
            Representation::Spectral => self.clone(),
            Representation::Physical => forward(self),
        }
    }

    pub fn to_physical(&self) -> SpaceTimeField {
        match self.representation {
            Representation::Physical => self.clone(),
            Representation::Spectral => inverse(self),
        }
    }

    /// `L²_{t,x}` norm, from whichever representation is held.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|c| c.norm_sqr()).sum();
        let w = match self.representation {
            Representation::Physical => self.st_grid.cell_area(),
            Representation::Spectral => self.st_grid.frequency_weight(),
        };
        (sum * w).sqrt()
    }

    /// `L⁴_{t,x}` norm of physical samples.
    pub fn l4_norm(&self) -> f64 {
        let phys = self.to_physical();
        let sum: f64 = phys
            .values
            .iter()
            .map(|c| c.norm_sqr() * c.norm_sqr())
            .sum();
        (sum * self.st_grid.cell_area()).powf(0.25)
    }

    /// Time slice `t_j` as Fourier coefficients in `x`.
    pub fn slice_spectral(&self, j: usize) -> SpectralField {
        let phys = match self.representation {
            Representation::Physical => std::borrow::Cow::Borrowed(self),
            Representation::Spectral => std::borrow::Cow::Owned(inverse(self)),
        };
        let grid = self.st_grid.grid_x;
        let n = grid.n_points();
        let mut buf = phys.row(j).to_vec();
        fft_inplace(&mut buf, true);
        let dx = grid.spacing();
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= dx * parity_sign(signed_index(i, n));
        }
        SpectralField { grid, coeffs: buf }
    }

    /// Physical field whose time slices have the given `x`-coefficients.
    pub fn from_spectral_rows(st_grid: SpaceTimeGrid, rows: &[SpectralField]) -> Result<Self> {
        if rows.len() != st_grid.n_time() || rows.iter().any(|r| r.grid != st_grid.grid_x) {
            return Err(Error::ShapeMismatch(
                "rows do not match the space-time lattice".into(),
            ));
        }
        let n = st_grid.n_x();
        let scale = 1.0 / st_grid.grid_x.domain_length();
        let mut values = Vec::with_capacity(st_grid.len());
        for row in rows {
            let mut buf: Vec<Complex64> = row
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * parity_sign(signed_index(i, n)))
                .collect();
            fft_inplace(&mut buf, false);
            values.extend(buf.into_iter().map(|c| c * scale));
        }
        Ok(Self {
            st_grid,
            values,
            representation: Representation::Physical,
        })
    }
}

/// Coefficients of `u` placed on a larger lattice with the same frequency
/// spacing (the output of [`SpaceTimeGrid::refined`] or any lattice of
/// at least the same size and box).
pub fn embed(u: &SpaceTimeField, fine: SpaceTimeGrid) -> SpaceTimeField {
    let spec = u.to_spectral();
    let g = spec.st_grid;
    let (nt, nx) = (g.n_time(), g.n_x());
    let mut out = SpaceTimeField::zeros(fine, Representation::Spectral);
    for m in 0..nt {
        let fm = crate::fft::slot_of(signed_index(m, nt), fine.n_time())
            .expect("fine lattice is larger");
        for k in 0..nx {
            let fk = crate::fft::slot_of(signed_index(k, nx), fine.n_x())
                .expect("fine lattice is larger");
            out.values[fm * fine.n_x() + fk] = spec.values[m * nx + k];
        }
    }
    out
}

/// Direction tag for [`spacetime_transform`].
pub use crate::spectral::Direction;

pub fn spacetime_transform(u: &SpaceTimeField, direction: Direction) -> Result<SpaceTimeField> {
    match (u.representation, direction) {
        (Representation::Physical, Direction::Forward) => Ok(forward(u)),
        (Representation::Spectral, Direction::Inverse) => Ok(inverse(u)),
        _ => Err(Error::param(
            "direction",
            "representation flag does not match the requested direction",
        )),
    }
}

fn apply_parity(values: &mut [Complex64], g: &SpaceTimeGrid, scale: f64) {
    let (nt, nx) = (g.n_time(), g.n_x());
    for m in 0..nt {
        let pm = parity_sign(signed_index(m, nt));
        for k in 0..nx {
            values[m * nx + k] *= scale * pm * parity_sign(signed_index(k, nx));
        }
    }
}

fn forward(u: &SpaceTimeField) -> SpaceTimeField {
    let g = u.st_grid;
    let mut values = u.values.clone();
    fft2_inplace(&mut values, g.n_time(), g.n_x(), true);
    apply_parity(&mut values, &g, g.cell_area());
    SpaceTimeField {
        st_grid: g,
        values,
        representation: Representation::Spectral,
    }
}

fn inverse(u: &SpaceTimeField) -> SpaceTimeField {
    let g = u.st_grid;
    let mut values = u.values.clone();
    apply_parity(&mut values, &g, 1.0);
    fft2_inplace(&mut values, g.n_time(), g.n_x(), false);
    let scale = 1.0 / (2.0 * g.t_box() * g.grid_x.domain_length());
    for v in &mut values {
        *v *= scale;
    }
    SpaceTimeField {
        st_grid: g,
        values,
        representation: Representation::Physical,
    }
}

impl SpaceTimeField {
    /// Weighted `L²` sum `Σ w(τ, ξ)² |û|² Δτ Δξ / (2π)²` over the lattice.
    pub fn weighted_norm(&self, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let spec = self.to_spectral();
        let g = spec.st_grid;
        let (nt, nx) = (g.n_time(), g.n_x());
        let mut sum = 0.0;
        for m in 0..nt {
            let tau = g.tau(m);
            for k in 0..nx {
                let xi = g.grid_x.xi(k);
                let w = weight(tau, xi);
                sum += w * w * spec.values[m * nx + k].norm_sqr();
            }
        }
        (sum * g.frequency_weight()).sqrt()
    }
}

/// `‖u‖_{X^{b,s}_α} = ‖⟨i(τ-ξ³) + |ξ|^{2α}⟩^b ⟨ξ⟩^s û‖_{L²}`.
pub fn xbs_norm(u_hat: &SpaceTimeField, b: f64, s: f64, alpha: f64) -> Result<f64> {
    if u_hat.representation != Representation::Spectral {
        return Err(Error::param(
            "u_hat",
            "expected the frequency representation",
        ));
    }
    Ok(u_hat.weighted_norm(|tau, xi| xbs_weight(tau, xi, b, s, alpha)))
}

/// Weight of the `X^{b,s}_α` norm at `(τ, ξ)`.
#[inline]
pub fn xbs_weight(tau: f64, xi: f64, b: f64, s: f64, alpha: f64) -> f64 {
    let sigma = tau - xi * xi * xi;
    dissipative_bracket(sigma, xi, alpha).powf(b) * bracket(xi).powf(s)
}

/// `X^{b,s}_α` norm of a field in either representation.
pub fn xbs_norm_any(u: &SpaceTimeField, b: f64, s: f64, alpha: f64) -> f64 {
    u.weighted_norm(|tau, xi| xbs_weight(tau, xi, b, s, alpha))
}

/// The two sides of `‖u‖_{X^{b,s}_α} ∼ ‖U(-t)u‖_{H^{b,s}} + ‖u‖_{L²_t H^{s+2αb}_x}`.
pub fn xbs_equivalent_parts(u: &SpaceTimeField, b: f64, s: f64, alpha: f64) -> (f64, f64) {
    let free = u.weighted_norm(|tau, xi| bracket(tau - xi * xi * xi).powf(b) * bracket(xi).powf(s));
    let smooth = u.weighted_norm(|_, xi| bracket(xi).powf(s + 2.0 * alpha * b));
    (free, smooth)
}
