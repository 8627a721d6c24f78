//! Periodic pseudospectral discretization of the real line.
//!
//! The line is truncated to a torus `[-L/2, L/2)` sampled at `n` points.
//! Fourier coefficients approximate the continuous transform
//! `û(ξ) = ∫ e^{-ixξ} u(x) dx` by the rectangle rule, so that with the
//! quadrature weight `Δξ / 2π = 1 / L` Parseval reads
//! `Σ_k |û_k|² / L = Σ_j |u_j|² Δx`.
//!
//! Coefficients are stored in FFT order (`0, 1, …, n/2-1, -n/2, …, -1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{fft_inplace, parity_sign, signed_index};

/// Japanese bracket `⟨x⟩ = (1 + x²)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `⟨i σ + |ξ|^{2α}⟩`, evaluated as `(1 + σ² + |ξ|^{4α})^{1/2}`.
#[inline]
pub fn dissipative_bracket(sigma: f64, xi: f64, alpha: f64) -> f64 {
    (1.0 + sigma * sigma + xi.abs().powf(4.0 * alpha)).sqrt()
}

/// Periodic collocation lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n_points: usize,
    domain_length: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, domain_length: f64) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= 8, got {n_points}"
            )));
        }
        if !(domain_length > 0.0) || !domain_length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive, got {domain_length}"
            )));
        }
        Ok(Self {
            n_points,
            domain_length,
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.domain_length / self.n_points as f64
    }

    /// Frequency lattice spacing `2π / L`.
    #[inline]
    pub fn dxi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.domain_length
    }

    /// Sample location of index `j`, on `[-L/2, L/2)`.
    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.domain_length + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Frequency of storage slot `i` (FFT order).
    #[inline]
    pub fn xi(&self, i: usize) -> f64 {
        signed_index(i, self.n_points) as f64 * self.dxi()
    }

    /// Frequencies in storage (FFT) order.
    pub fn fft_frequencies(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.xi(i)).collect()
    }

    /// Frequencies `2πk/L`, `k = -n/2 … n/2-1`, in increasing order.
    pub fn frequencies(&self) -> Vec<f64> {
        let half = (self.n_points / 2) as i64;
        (-half..half).map(|k| k as f64 * self.dxi()).collect()
    }

    /// Largest |k| kept by the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n_points / 3) as i64
    }

    #[inline]
    pub fn is_kept(&self, i: usize) -> bool {
        signed_index(i, self.n_points).abs() <= self.dealias_cutoff()
    }
}

fn default_alpha() -> f64 {
    1.0
}
fn default_s() -> f64 {
    -0.9
}
fn default_b() -> f64 {
    0.5
}
fn default_delta() -> f64 {
    0.01
}
fn default_nu_probe() -> f64 {
    0.1
}
fn default_coupling() -> f64 {
    1.0
}

/// Exponents of the model and its function spaces.
///
/// `coupling` scales the quadratic term; `0` turns the equation into the
/// free dissipative Airy flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_s")]
    pub s: f64,
    #[serde(default = "default_b")]
    pub b: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_nu_probe")]
    pub nu_probe: f64,
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            s: default_s(),
            b: default_b(),
            delta: default_delta(),
            nu_probe: default_nu_probe(),
            coupling: default_coupling(),
        }
    }
}

impl ModelParams {
    pub fn new(alpha: f64, s: f64) -> Result<Self> {
        let p = Self {
            alpha,
            s,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must lie in (0, 1], got {}", self.alpha),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::param(
                "delta",
                format!("must lie in (0, 1/2), got {}", self.delta),
            ));
        }
        if !(self.nu_probe > 0.0) {
            return Err(Error::param("nu_probe", "must be positive"));
        }
        for (name, v) in [("s", self.s), ("b", self.b), ("coupling", self.coupling)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Real samples `u(x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

/// Fourier coefficients `û(ξ_k)` in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid1D,
    pub coeffs: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples on a {}-point grid",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite sample"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_points()],
        }
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn forward(&self) -> SpectralField {
        transform_forward(self)
    }

    /// `‖u‖_{L²}` by the rectangle rule.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.spacing()).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn inverse(&self) -> Field {
        transform_inverse(self)
    }

    /// Coefficient at signed wavenumber index `k`.
    pub fn at(&self, k: i64) -> Complex64 {
        crate::fft::slot_of(k, self.grid.n_points())
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    pub fn at_mut(&mut self, k: i64) -> Option<&mut Complex64> {
        crate::fft::slot_of(k, self.grid.n_points()).map(move |i| &mut self.coeffs[i])
    }

    /// Spatial mean recovered from the zero mode.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / self.grid.domain_length()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `û(-ξ) = conj û(ξ)`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n_points();
        (1..n)
            .map(|i| (self.coeffs[i] - self.coeffs[n - i].conj()).norm())
            .fold(self.coeffs[0].im.abs(), f64::max)
    }
}

/// Direction tag for [`transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Either representation of a field on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnyField {
    Physical(Field),
    Spectral(SpectralField),
}

/// Transform between physical samples and Fourier coefficients.
pub fn transform(field: AnyField, direction: Direction) -> Result<AnyField> {
    match (field, direction) {
        (AnyField::Physical(f), Direction::Forward) => {
            Ok(AnyField::Spectral(transform_forward(&f)))
        }
        (AnyField::Spectral(f), Direction::Inverse) => {
            Ok(AnyField::Physical(transform_inverse(&f)))
        }
        (AnyField::Physical(_), Direction::Inverse) => Err(Error::param(
            "direction",
            "inverse transform requested on a physical-space field",
        )),
        (AnyField::Spectral(_), Direction::Forward) => Err(Error::param(
            "direction",
            "forward transform requested on a spectral field",
        )),
    }
}

pub fn transform_forward(field: &Field) -> SpectralField {
    let grid = field.grid;
    let n = grid.n_points();
    let mut buf: Vec<Complex64> = field
        .values
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft_inplace(&mut buf, true);
    let dx = grid.spacing();
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= dx * parity_sign(signed_index(i, n));
    }
    SpectralField { grid, coeffs: buf }
}

/// Complex inverse, keeping the imaginary parts.
pub fn inverse_complex(field: &SpectralField) -> Vec<Complex64> {
    let grid = field.grid;
    let n = grid.n_points();
    let mut buf: Vec<Complex64> = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * parity_sign(signed_index(i, n)))
        .collect();
    fft_inplace(&mut buf, false);
    let scale = 1.0 / grid.domain_length();
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

pub fn transform_inverse(field: &SpectralField) -> Field {
    let values = inverse_complex(field).into_iter().map(|c| c.re).collect();
    Field {
        grid: field.grid,
        values,
    }
}

/// Symbol `Λ(ξ) = iξ³ - |ξ|^{2α}` of the linear part; `û(t) = e^{tΛ}û(0)`.
#[inline]
pub fn linear_symbol(xi: f64, alpha: f64) -> Complex64 {
    Complex64::new(-xi.abs().powf(2.0 * alpha), xi * xi * xi)
}

/// Multiplier of `W_α(t)`: `exp(-|ξ|^{2α}|t| + iξ³t)`, defined for all real `t`.
#[inline]
pub fn semigroup_factor(xi: f64, t: f64, alpha: f64) -> Complex64 {
    let decay = (-xi.abs().powf(2.0 * alpha) * t.abs()).exp();
    Complex64::from_polar(decay, xi * xi * xi * t)
}

pub fn apply_semigroup(phi: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let grid = phi.grid;
    let coeffs = phi
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * semigroup_factor(grid.xi(i), t, alpha))
        .collect();
    SpectralField { grid, coeffs }
}

/// Spectral form of `-½ ∂_x(u²)`, dealiased by the 2/3 rule.
///
/// The input is truncated to the kept band before squaring, so the
/// retained output modes are free of aliasing.
pub fn nonlinear_term(u_hat: &SpectralField) -> SpectralField {
    let grid = u_hat.grid;
    let mut filtered = u_hat.clone();
    for (i, c) in filtered.coeffs.iter_mut().enumerate() {
        if !grid.is_kept(i) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    let mut phys = filtered.inverse();
    for v in &mut phys.values {
        *v *= *v;
    }
    let mut sq = phys.forward();
    for (i, c) in sq.coeffs.iter_mut().enumerate() {
        *c = if grid.is_kept(i) {
            Complex64::new(0.0, -0.5 * grid.xi(i)) * *c
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    sq
}

/// `-½ ∂_x(u²)` in physical space.
pub fn nonlinearity(u: &Field) -> Field {
    nonlinear_term(&u.forward()).inverse()
}

/// Spectral derivative `∂_x u`.
pub fn derivative(u_hat: &SpectralField) -> SpectralField {
    let grid = u_hat.grid;
    let coeffs = u_hat
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if signed_index(i, grid.n_points()) == -((grid.n_points() / 2) as i64) {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, grid.xi(i)) * c
            }
        })
        .collect();
    SpectralField { grid, coeffs }
}

/// `‖φ‖_{H^s} = (Σ ⟨ξ_k⟩^{2s} |φ̂_k|² / L)^{1/2}`.
pub fn sobolev_norm(phi: &SpectralField, s: f64) -> f64 {
    let grid = phi.grid;
    let sum: f64 = phi
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| bracket(grid.xi(i)).powf(2.0 * s) * c.norm_sqr())
        .sum();
    (sum / grid.domain_length()).sqrt()
}

/// `‖ |D|^α u ‖²_{L²}`, the dissipation rate density.
pub fn dissipation_rate(phi: &SpectralField, alpha: f64) -> f64 {
    let grid = phi.grid;
    phi.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| grid.xi(i).abs().powf(2.0 * alpha) * c.norm_sqr())
        .sum::<f64>()
        / grid.domain_length()
}
