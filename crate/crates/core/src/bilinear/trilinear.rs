//! Constrained trilinear forms `∫_{ζ₁+ζ₂+ζ₃=0} m f₁(ζ₁) f₂(ζ₂) f₃(ζ₃)`
//! over space-time frequencies `ζ = (τ, ξ)`, the characteristic-function
//! profiles that saturate the `(+−)` block bound, and two ways of
//! evaluating them: an exact sum over a frequency lattice and a
//! semi-analytic slab integral that scales to large blocks.
//!
//! Frequencies carry plain Lebesgue measure `dτ dξ` throughout, both in
//! the trilinear form and in the `L²` norms of the profiles.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocks::{dyadic_block_bound, BlockCase, DyadicBlock};
use super::kernel_K;
use crate::bourgain::{Representation, SpaceTimeField, SpaceTimeGrid};
use crate::error::{Error, Result};
use crate::fft::signed_index;
use crate::quad::integrate;
use crate::spectral::{Grid1D, ModelParams};

/// Real samples on a centred integer lattice `(m Δτ, k Δξ)`,
/// `m ∈ [tau_lo, tau_lo + n_tau)`, `k ∈ [xi_lo, xi_lo + n_xi)`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeProfile {
    pub dtau: f64,
    pub dxi: f64,
    pub tau_lo: i64,
    pub xi_lo: i64,
    pub n_tau: usize,
    pub n_xi: usize,
    /// Row-major, `τ` slow.
    pub values: Vec<f64>,
}

impl LatticeProfile {
    pub fn new(
        dtau: f64,
        dxi: f64,
        tau_lo: i64,
        xi_lo: i64,
        n_tau: usize,
        n_xi: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != n_tau * n_xi {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {n_tau}×{n_xi} lattice",
                values.len()
            )));
        }
        if !(dtau > 0.0 && dxi > 0.0) {
            return Err(Error::InvalidGrid(
                "lattice spacings must be positive".into(),
            ));
        }
        Ok(Self {
            dtau,
            dxi,
            tau_lo,
            xi_lo,
            n_tau,
            n_xi,
            values,
        })
    }

    /// Real part of the spectral coefficients, re-indexed from FFT order.
    pub fn from_field(f: &SpaceTimeField) -> Self {
        let spec = f.to_spectral();
        let g = spec.st_grid;
        let (nt, nx) = (g.n_time(), g.n_x());
        let mut values = vec![0.0; nt * nx];
        for m in 0..nt {
            let row = (signed_index(m, nt) + (nt / 2) as i64) as usize;
            for k in 0..nx {
                let col = (signed_index(k, nx) + (nx / 2) as i64) as usize;
                values[row * nx + col] = spec.values[m * nx + k].re;
            }
        }
        Self {
            dtau: g.dtau(),
            dxi: g.grid_x.dxi(),
            tau_lo: -((nt / 2) as i64),
            xi_lo: -((nx / 2) as i64),
            n_tau: nt,
            n_xi: nx,
            values,
        }
    }

    #[inline]
    pub fn get(&self, m: i64, k: i64) -> f64 {
        let (r, c) = (m - self.tau_lo, k - self.xi_lo);
        if r < 0 || c < 0 || r >= self.n_tau as i64 || c >= self.n_xi as i64 {
            return 0.0;
        }
        self.values[r as usize * self.n_xi + c as usize]
    }

    /// Nonzero samples as `(m, k, value)`.
    pub fn support(&self) -> Vec<(i64, i64, f64)> {
        let mut out = Vec::new();
        for r in 0..self.n_tau {
            for c in 0..self.n_xi {
                let v = self.values[r * self.n_xi + c];
                if v != 0.0 {
                    out.push((self.tau_lo + r as i64, self.xi_lo + c as i64, v));
                }
            }
        }
        out
    }

    pub fn cell(&self) -> f64 {
        self.dtau * self.dxi
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.cell()).sqrt()
    }
}

/// Weight `m(ζ₁, ζ₂, ζ₃)` of a trilinear form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `m ≡ 1`.
    One,
    /// Characteristic function of `|ξ_j| ∈ [N_j/2, 2N_j]`, `|τ_j - ξ_j³| ∈ [L_j/2, 2L_j]`.
    Block(DyadicBlock),
    /// The bilinear-estimate kernel with output frequency `-ζ₃` and first input `ζ₁`.
    Kernel,
}

fn in_shell(x: f64, size: f64) -> bool {
    let a = x.abs();
    a >= 0.5 * size && a <= 2.0 * size
}

impl Multiplier {
    pub fn eval(&self, z: [(f64, f64); 3], params: &ModelParams) -> f64 {
        match self {
            Multiplier::One => 1.0,
            Multiplier::Block(b) => {
                let ok =
                    z.iter().zip(b.n()).zip(b.l()).all(|((&(tau, xi), n), l)| {
                        in_shell(xi, n) && in_shell(tau - xi * xi * xi, l)
                    });
                if ok {
                    1.0
                } else {
                    0.0
                }
            }
            Multiplier::Kernel => {
                let ((tau1, xi1), (tau3, xi3)) = (z[0], z[2]);
                kernel_K(-tau3, tau1, -xi3, xi1, params)
            }
        }
    }
}

/// Exact lattice value of `∫ m f₁ f₂ f₃` on `ζ₁+ζ₂+ζ₃ = 0`: a sum over
/// pairs of nonzero samples of `f₁, f₂` with `f₃` read at `-ζ₁-ζ₂`
/// (zero off the lattice, no wrap-around), weighted by `(Δτ Δξ)²`.
pub fn trilinear_profiles(
    f: [&LatticeProfile; 3],
    multiplier: &Multiplier,
    params: &ModelParams,
) -> Result<f64> {
    let (dtau, dxi) = (f[0].dtau, f[0].dxi);
    if f.iter().any(|p| p.dtau != dtau || p.dxi != dxi) {
        return Err(Error::ShapeMismatch(
            "profiles must share the lattice spacing".into(),
        ));
    }
    let s1 = f[0].support();
    let s2 = f[1].support();
    let f3 = f[2];
    let partial: Vec<f64> = s1
        .par_iter()
        .map(|&(m1, k1, v1)| {
            let mut acc = 0.0;
            for &(m2, k2, v2) in &s2 {
                let (m3, k3) = (-m1 - m2, -k1 - k2);
                let v3 = f3.get(m3, k3);
                if v3 == 0.0 {
                    continue;
                }
                let z = [
                    (m1 as f64 * dtau, k1 as f64 * dxi),
                    (m2 as f64 * dtau, k2 as f64 * dxi),
                    (m3 as f64 * dtau, k3 as f64 * dxi),
                ];
                acc += multiplier.eval(z, params) * v1 * v2 * v3;
            }
            acc
        })
        .collect();
    let cell = dtau * dxi;
    Ok(partial.iter().sum::<f64>() * cell * cell)
}

/// The three characteristic profiles of a `(+−)` block with low frequency `N₁`:
/// `f₁ = χ{N₁/2 ≤ |ξ| ≤ N₁, |τ - 3N₂²ξ| ≤ N₁²N₂}`,
/// `f₂ = χ{|ξ - N₂| ≤ N₁, |τ - ξ³| ≤ L₂}`,
/// `f₃ = χ{|ξ + N₂| ≤ N₁, |τ - ξ³| ≤ L₃}`.
#[derive(Debug, Clone)]
pub struct ExtremizerTriple {
    pub f1_hat: SpaceTimeField,
    pub f2_hat: SpaceTimeField,
    pub f3_hat: SpaceTimeField,
    pub block: DyadicBlock,
}

impl ExtremizerTriple {
    pub fn profiles(&self) -> [LatticeProfile; 3] {
        [
            LatticeProfile::from_field(&self.f1_hat),
            LatticeProfile::from_field(&self.f2_hat),
            LatticeProfile::from_field(&self.f3_hat),
        ]
    }
}

fn check_plus_minus_low_first(block: &DyadicBlock) -> Result<()> {
    match block.plus_minus_index() {
        Some(0) if block.n2 == block.n3 => Ok(()),
        _ => Err(Error::Hypothesis(format!(
            "extremizers need the (+-) regime with N1 low, N2 = N3 and L1 ∼ N1N2N3, got {block:?}"
        ))),
    }
}

/// Largest `|τ|` and `|ξ|` reached by the extremizer supports.
fn support_reach(b: &DyadicBlock) -> (f64, f64) {
    let xi = b.n2 + b.n1;
    let tau = (xi * xi * xi + b.l2.max(b.l3)).max(3.0 * b.n2 * b.n2 * b.n1 + b.n1 * b.n1 * b.n2);
    (tau, xi)
}

/// Smallest power-of-two lattice with `Δτ ≤ L_min/(4·refine)` and
/// `Δξ ≤ N₁/(4·refine)` that contains the extremizer supports.
pub fn resolving_grid(block: &DyadicBlock, refine: usize) -> Result<SpaceTimeGrid> {
    let r = refine.max(1) as f64;
    let lmin = block.l2.min(block.l3);
    let t_box = (4.0 * r * std::f64::consts::PI / lmin).max(2.0);
    let dtau = std::f64::consts::PI / t_box;
    let (tau_reach, xi_reach) = support_reach(block);
    let n_time = (2 * ((tau_reach / dtau).ceil() as usize + 2))
        .next_power_of_two()
        .max(16);
    let dxi = block.n1 / (4.0 * r);
    let length = 2.0 * std::f64::consts::PI / dxi;
    let n_x = (2 * ((xi_reach / dxi).ceil() as usize + 2))
        .next_power_of_two()
        .max(8);
    SpaceTimeGrid::new(Grid1D::new(n_x, length)?, n_time, t_box)
}

/// Builds the extremizer profiles of `block` on `st_grid`.
pub fn extremizer_triple(block: DyadicBlock, st_grid: SpaceTimeGrid) -> Result<ExtremizerTriple> {
    check_plus_minus_low_first(&block)?;
    let lmin = block.l2.min(block.l3);
    let dtau = st_grid.dtau();
    let dt = st_grid.dt();
    let (tau_reach, xi_reach) = support_reach(&block);
    let tau_top = (st_grid.n_time() / 2 - 1) as f64 * dtau;
    if dtau > lmin / 4.0 || tau_top < tau_reach {
        let t_box = st_grid.t_box().max(4.0 * std::f64::consts::PI / lmin);
        let need_dtau = std::f64::consts::PI / t_box;
        let by_spacing = (2.0 * t_box / dt).ceil() as usize;
        let by_reach = 2 * ((tau_reach / need_dtau).ceil() as usize + 2);
        return Err(Error::UnderResolved {
            reason: format!(
                "Δτ = {dtau:.4} must be ≤ L_min/4 = {:.4} (T_box ≥ {t_box:.4}) and τ must reach {tau_reach:.4}",
                lmin / 4.0
            ),
            required_n_time: by_spacing.max(by_reach).next_power_of_two(),
        });
    }
    let gx = st_grid.grid_x;
    let (dxi, xi_top) = (gx.dxi(), (gx.n_points() / 2 - 1) as f64 * gx.dxi());
    if dxi > block.n1 / 4.0 || xi_top < xi_reach {
        return Err(Error::InvalidGrid(format!(
            "Δξ = {dxi:.4} must be ≤ N1/4 = {:.4} and ξ must reach {xi_reach:.4}",
            block.n1 / 4.0
        )));
    }
    let (n1, n2) = (block.n1, block.n2);
    let indicator = |pred: &dyn Fn(f64, f64) -> bool| -> SpaceTimeField {
        let mut f = SpaceTimeField::zeros(st_grid, Representation::Spectral);
        for m in 0..st_grid.n_time() {
            let tau = st_grid.tau(m);
            for k in 0..gx.n_points() {
                if pred(tau, gx.xi(k)) {
                    f.values[m * gx.n_points() + k] = Complex64::new(1.0, 0.0);
                }
            }
        }
        f
    };
    let f1_hat = indicator(&|tau, xi| {
        xi.abs() >= 0.5 * n1 && xi.abs() <= n1 && (tau - 3.0 * n2 * n2 * xi).abs() <= n1 * n1 * n2
    });
    let f2_hat =
        indicator(&|tau, xi| (xi - n2).abs() <= n1 && (tau - xi * xi * xi).abs() <= block.l2);
    let f3_hat =
        indicator(&|tau, xi| (xi + n2).abs() <= n1 && (tau - xi * xi * xi).abs() <= block.l3);
    for (name, f) in [("f1", &f1_hat), ("f2", &f2_hat), ("f3", &f3_hat)] {
        if f.values.iter().all(|c| c.re == 0.0) {
            return Err(Error::UnderResolved {
                reason: format!("{name} has empty support on the lattice"),
                required_n_time: 2 * st_grid.n_time(),
            });
        }
    }
    Ok(ExtremizerTriple {
        f1_hat,
        f2_hat,
        f3_hat,
        block,
    })
}

/// Trilinear form of the extremizer profiles on their lattice.
pub fn trilinear_integral(
    triple: &ExtremizerTriple,
    multiplier: &Multiplier,
    params: &ModelParams,
) -> Result<f64> {
    let [a, b, c] = triple.profiles();
    trilinear_profiles([&a, &b, &c], multiplier, params)
}

/// `∫ χ_block f₁f₂f₃ / (‖f₁‖‖f₂‖‖f₃‖)` on the lattice: a lower bound for
/// the multiplier norm of the block.
pub fn block_lower_bound(
    block: &DyadicBlock,
    st_grid: SpaceTimeGrid,
    params: &ModelParams,
) -> Result<f64> {
    params.validate()?;
    let triple = extremizer_triple(*block, st_grid)?;
    let [a, b, c] = triple.profiles();
    let num = trilinear_profiles([&a, &b, &c], &Multiplier::Block(*block), params)?;
    Ok(num / (a.l2_norm() * b.l2_norm() * c.l2_norm()))
}

type Interval = (f64, f64);

fn intersect(a: Interval, b: Interval) -> Option<Interval> {
    let (lo, hi) = (a.0.max(b.0), a.1.min(b.1));
    (lo < hi).then_some((lo, hi))
}

/// `[-w, w] ∩ {L/2 ≤ |u + shift| ≤ 2L}`.
fn window_in_shell(w: f64, l: f64, shift: f64) -> Vec<Interval> {
    [
        (-2.0 * l - shift, -0.5 * l - shift),
        (0.5 * l - shift, 2.0 * l - shift),
    ]
    .into_iter()
    .filter_map(|s| intersect((-w, w), s))
    .collect()
}

fn ramp(z: f64) -> f64 {
    if z > 0.0 {
        0.5 * z * z
    } else {
        0.0
    }
}

/// Area of `{(u₂, u₃) ∈ I₂×I₃ : u₂+u₃ ≤ y}`.
fn corner_area(y: f64, i2: Interval, i3: Interval) -> f64 {
    ramp(y - i2.0 - i3.0) - ramp(y - i2.1 - i3.0) - ramp(y - i2.0 - i3.1) + ramp(y - i2.1 - i3.1)
}

/// Semi-analytic value of `∫ χ_block f₁f₂f₃` for the extremizer profiles.
///
/// Writing `τ₂ = ξ₂³ + u₂`, `τ₃ = ξ₃³ + u₃`, the `f₁` window becomes
/// `u₁ = -c - u₂ - u₃` with `|u₁| ≤ N₁²N₂`, where
/// `c = (ξ₂+ξ₃)(ξ₂²-ξ₂ξ₃+ξ₃²-3N₂²)`. Every `u`-constraint is a union of at
/// most two intervals, so the `(u₂, u₃)` area `A(c)` is an exact piecewise
/// quadratic. In `p = ξ₂+ξ₃ = -ξ₁`, `q = ξ₂-ξ₃-2N₂` one has
/// `c = p(3N₂q + 3q²/4 + p²/4)`, monotone in `q` on the support, so for
/// fixed `p` the `q`-integral splits into polynomial pieces of degree 4
/// and three-point Gauss rules are exact. The `p`-integral is adaptive.
pub fn slab_trilinear(block: &DyadicBlock) -> Result<f64> {
    check_plus_minus_low_first(block)?;
    let DyadicBlock {
        n1, n2, l1, l2, l3, ..
    } = *block;
    let u2 = window_in_shell(l2, l2, 0.0);
    let u3 = window_in_shell(l3, l3, 0.0);
    let w1 = n1 * n1 * n2;
    let inner = |p: f64| -> f64 {
        let reach = 2.0 * n1 - p.abs();
        let c_of = |q: f64| p * (3.0 * n2 * q + 0.75 * q * q + 0.25 * p * p);
        let x1 = -p;
        let u1 = window_in_shell(w1, l1, 3.0 * n2 * n2 * x1 - x1 * x1 * x1);
        let area = |c: f64| -> f64 {
            let mut acc = 0.0;
            for i1 in &u1 {
                for &i2 in &u2 {
                    for &i3 in &u3 {
                        acc += corner_area(-c - i1.0, i2, i3) - corner_area(-c - i1.1, i2, i3);
                    }
                }
            }
            acc
        };
        let mut knots = vec![-reach, reach];
        let (qa, qb) = (0.75 * p, 3.0 * n2 * p);
        for i1 in &u1 {
            for &i2 in &u2 {
                for &i3 in &u3 {
                    for e1 in [i1.0, i1.1] {
                        for y in [i2.0 + i3.0, i2.1 + i3.0, i2.0 + i3.1, i2.1 + i3.1] {
                            // c(q) = -y - e1, smaller root of a quadratic.
                            let qc = 0.25 * p * p * p + y + e1;
                            let disc = qb * qb - 4.0 * qa * qc;
                            if disc < 0.0 {
                                continue;
                            }
                            let q = -2.0 * qc / (qb + qb.signum() * disc.sqrt());
                            if q.abs() < reach {
                                knots.push(q);
                            }
                        }
                    }
                }
            }
        }
        knots.sort_by(f64::total_cmp);
        let nodes = [-(0.6f64.sqrt()), 0.0, 0.6f64.sqrt()];
        let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let mut total = 0.0;
        for w in knots.windows(2) {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in nodes.iter().zip(weights) {
                total += wt * half * area(c_of(mid + half * x));
            }
        }
        total
    };
    let scale = n1 * n1 * l2 * l3;
    let tol = 1e-9 * scale;
    let pos = integrate(inner, 0.5 * n1, n1, tol).value;
    let neg = integrate(inner, -n1, -0.5 * n1, tol).value;
    // dξ₂ dξ₃ = dp dq / 2.
    Ok(0.5 * (pos + neg))
}

/// [`slab_trilinear`] normalized by the exact profile norms
/// `|supp f₁| = 2N₁³N₂`, `|supp f₂| = 4N₁L₂`, `|supp f₃| = 4N₁L₃`.
pub fn block_lower_bound_slab(block: &DyadicBlock) -> Result<f64> {
    let DyadicBlock { n1, n2, l2, l3, .. } = *block;
    let volume = (2.0 * n1.powi(3) * n2) * (4.0 * n1 * l2) * (4.0 * n1 * l3);
    Ok(slab_trilinear(block)? / volume.sqrt())
}

/// One line of a block table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub block: DyadicBlock,
    pub bound: f64,
    pub measured: f64,
    pub ratio: f64,
}

impl BlockRow {
    /// Closed-form `(+−)` bound against the slab lower bound.
    pub fn measure(block: DyadicBlock) -> Result<Self> {
        let bound = dyadic_block_bound(&block, BlockCase::PlusMinus)?;
        let measured = block_lower_bound_slab(&block)?;
        Ok(Self {
            block,
            bound,
            measured,
            ratio: measured / bound,
        })
    }
}

/// CSV with columns `N1,N2,N3,L1,L2,L3,bound,measured,ratio`.
pub fn block_table_csv(rows: &[BlockRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "N1,N2,N3,L1,L2,L3,bound,measured,ratio")?;
    for r in rows {
        let b = r.block;
        writeln!(
            out,
            "{},{},{},{},{},{},{:e},{:e},{:e}",
            b.n1, b.n2, b.n3, b.l1, b.l2, b.l3, r.bound, r.measured, r.ratio
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(f: [&LatticeProfile; 3], m: &Multiplier, p: &ModelParams) -> f64 {
        let (dt, dx) = (f[0].dtau, f[0].dxi);
        let range = |p: &LatticeProfile| {
            (
                p.tau_lo..p.tau_lo + p.n_tau as i64,
                p.xi_lo..p.xi_lo + p.n_xi as i64,
            )
        };
        let (t1, x1) = range(f[0]);
        let (t2, x2) = range(f[1]);
        let (t3, x3) = range(f[2]);
        let mut sum = 0.0;
        for a in t1.clone() {
            for b in x1.clone() {
                for c in t2.clone() {
                    for d in x2.clone() {
                        for e in t3.clone() {
                            for g in x3.clone() {
                                if a + c + e != 0 || b + d + g != 0 {
                                    continue;
                                }
                                let z = [
                                    (a as f64 * dt, b as f64 * dx),
                                    (c as f64 * dt, d as f64 * dx),
                                    (e as f64 * dt, g as f64 * dx),
                                ];
                                sum +=
                                    m.eval(z, p) * f[0].get(a, b) * f[1].get(c, d) * f[2].get(e, g);
                            }
                        }
                    }
                }
            }
        }
        sum * (dt * dx) * (dt * dx)
    }

    fn random_profile(rng: &mut ChaCha8Rng, n: usize, ones: bool) -> LatticeProfile {
        let lo = rng.gen_range(-(n as i64)..=0);
        let lo_x = rng.gen_range(-(n as i64)..=0);
        let values = (0..n * n)
            .map(|_| if ones || rng.gen_bool(0.5) { 1.0 } else { 0.0 })
            .collect();
        LatticeProfile::new(0.5, 0.75, lo, lo_x, n, n, values).unwrap()
    }

    #[test]
    fn lattice_sum_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = ModelParams::default();
        let block = DyadicBlock::new([0.5, 1.0, 1.0], [1.0, 0.5, 0.5]).unwrap();
        for n in [4usize, 6, 8] {
            for ones in [true, false] {
                let f: Vec<LatticeProfile> =
                    (0..3).map(|_| random_profile(&mut rng, n, ones)).collect();
                for m in [
                    Multiplier::One,
                    Multiplier::Kernel,
                    Multiplier::Block(block),
                ] {
                    let fast = trilinear_profiles([&f[0], &f[1], &f[2]], &m, &p).unwrap();
                    let slow = brute_force([&f[0], &f[1], &f[2]], &m, &p);
                    let scale = slow.abs().max(1e-300);
                    assert!(
                        (fast - slow).abs() <= 1e-12 * scale,
                        "n={n} {m:?}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_profile_gives_zero() {
        let z = LatticeProfile::new(1.0, 1.0, -2, -2, 4, 4, vec![0.0; 16]).unwrap();
        let o = LatticeProfile::new(1.0, 1.0, -2, -2, 4, 4, vec![1.0; 16]).unwrap();
        let p = ModelParams::default();
        assert_eq!(
            trilinear_profiles([&o, &o, &z], &Multiplier::One, &p).unwrap(),
            0.0
        );
        assert!(trilinear_profiles([&o, &o, &o], &Multiplier::One, &p).unwrap() > 0.0);
    }

    fn small_block() -> DyadicBlock {
        DyadicBlock::new([1.0, 4.0, 4.0], [32.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn extremizer_supports() {
        let b = small_block();
        let g = resolving_grid(&b, 1).unwrap();
        let t = extremizer_triple(b, g).unwrap();
        let [f1, f2, f3] = t.profiles();
        for (m, k, v) in f2.support() {
            let (tau, xi) = (m as f64 * f2.dtau, k as f64 * f2.dxi);
            assert_eq!(v, 1.0);
            assert!((xi - 4.0).abs() <= 1.0 && (tau - xi.powi(3)).abs() <= 1.0);
        }
        let measure = f2.support().len() as f64 * f2.cell();
        assert!((2.0..=8.0).contains(&measure), "|supp f2| = {measure}");
        assert!(!f1.support().is_empty() && !f3.support().is_empty());
        assert!(t
            .f1_hat
            .values
            .iter()
            .all(|c| c.im == 0.0 && (c.re == 0.0 || c.re == 1.0)));
    }

    #[test]
    fn coarse_tau_spacing_is_rejected() {
        let b = small_block();
        let g = resolving_grid(&b, 1).unwrap();
        let coarse = SpaceTimeGrid::new(g.grid_x, 1024, 2.0).unwrap();
        match extremizer_triple(b, coarse) {
            Err(Error::UnderResolved {
                required_n_time, ..
            }) => assert!(required_n_time > 1024),
            other => panic!("expected UnderResolved, got {other:?}"),
        }
        let wrong = DyadicBlock::new([4.0, 1.0, 4.0], [1.0, 32.0, 1.0]).unwrap();
        assert!(matches!(
            extremizer_triple(wrong, g),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn lattice_bound_is_stable_under_refinement() {
        let b = small_block();
        let p = ModelParams::default();
        let coarse = block_lower_bound(&b, resolving_grid(&b, 1).unwrap(), &p).unwrap();
        let fine = block_lower_bound(&b, resolving_grid(&b, 2).unwrap(), &p).unwrap();
        assert!(((fine - coarse) / fine).abs() < 0.10, "{coarse} vs {fine}");
        // Lattice point counts at the shell edges converge only at rate Δτ/L_min.
        let finest = block_lower_bound(&b, resolving_grid(&b, 4).unwrap(), &p).unwrap();
        let slab = block_lower_bound_slab(&b).unwrap();
        assert!(
            ((finest - slab) / slab).abs() < 0.10,
            "lattice {finest} vs slab {slab}"
        );
    }

    /// Plain midpoint rule over `(ξ₂, ξ₃)` with the exact `(u₂, u₃)` area.
    fn slab_midpoint(block: &DyadicBlock, h: f64) -> f64 {
        let DyadicBlock {
            n1, n2, l1, l2, l3, ..
        } = *block;
        let count = (2.0 * n1 / h).ceil() as usize;
        let h = 2.0 * n1 / count as f64;
        let (u2, u3) = (window_in_shell(l2, l2, 0.0), window_in_shell(l3, l3, 0.0));
        let mut acc = 0.0;
        for i in 0..count {
            let x2 = n2 - n1 + (i as f64 + 0.5) * h;
            for j in 0..count {
                let x3 = -n2 - n1 + (j as f64 + 0.5) * h;
                let x1 = -(x2 + x3);
                if x1.abs() < 0.5 * n1 || x1.abs() > n1 {
                    continue;
                }
                let c = (x2 + x3) * (x2 * x2 - x2 * x3 + x3 * x3 - 3.0 * n2 * n2);
                for i1 in window_in_shell(n1 * n1 * n2, l1, 3.0 * n2 * n2 * x1 - x1.powi(3)) {
                    for &i2 in &u2 {
                        for &i3 in &u3 {
                            acc += corner_area(-c - i1.0, i2, i3) - corner_area(-c - i1.1, i2, i3);
                        }
                    }
                }
            }
        }
        acc * h * h
    }

    #[test]
    fn slab_matches_midpoint_rule() {
        for (n, l) in [
            ([1.0, 4.0, 4.0], [32.0, 1.0, 1.0]),
            ([2.0, 16.0, 16.0], [1024.0, 32.0, 8.0]),
            ([1.0, 8.0, 8.0], [64.0, 8.0, 8.0]),
            ([1.0, 8.0, 8.0], [128.0, 64.0, 2.0]),
        ] {
            let b = DyadicBlock::new(n, l).unwrap();
            let exact = slab_trilinear(&b).unwrap();
            let h = (n[0] / 128.0).min(l[2] / (48.0 * n[0] * n[1]));
            // Edge cells make the midpoint error O(h); extrapolate it away.
            let mid = (4.0 * slab_midpoint(&b, h / 4.0) - slab_midpoint(&b, h)) / 3.0;
            assert!(
                ((exact - mid) / exact).abs() < 1e-3,
                "{b:?}: {exact} vs {mid}"
            );
        }
    }

    #[test]
    fn off_shell_block_loses_mass() {
        // With L₁ = N₁N₂²/2 the f₁ slab leaves the output shell.
        let inside = DyadicBlock::new([1.0, 8.0, 8.0], [128.0, 8.0, 8.0]).unwrap();
        let outside = DyadicBlock::new([1.0, 8.0, 8.0], [32.0, 8.0, 8.0]).unwrap();
        let a = slab_trilinear(&inside).unwrap();
        let b = slab_trilinear(&outside).unwrap();
        assert!(b < 0.5 * a, "{a} vs {b}");
    }

    #[test]
    fn corner_area_is_exact() {
        let (i2, i3) = ((0.0, 2.0), (1.0, 4.0));
        assert_eq!(corner_area(0.5, i2, i3), 0.0);
        assert_eq!(corner_area(10.0, i2, i3), 6.0);
        // Half the rectangle lies below its centre line u₂+u₃ = 3.5.
        assert!((corner_area(3.5, i2, i3) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn table_csv() {
        let row = BlockRow::measure(small_block()).unwrap();
        let mut buf = Vec::new();
        block_table_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("N1,N2,N3,L1,L2,L3,bound,measured,ratio\n1,4,4,32,1,1,"));
    }
}
