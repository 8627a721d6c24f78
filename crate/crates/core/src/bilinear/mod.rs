//! The bilinear estimate `‖∂_x(uv)‖_{X^{-1/2+δ,s}} ≲ ‖u‖_{X^{1/2,s}}‖v‖_{X^{1/2,s}}`:
//! its trilinear kernel, dyadic block bounds, extremizing profiles and the
//! sharpness sweeps that locate the critical index.

mod blocks;
mod sweep;
mod trilinear;

pub use blocks::{dyadic_block_bound, dyadic_round, BlockCase, DyadicBlock};
pub use sweep::{
    predicted_slope, sharpness_sweep, sweep_block, SweepReport, Verdict, DIVERGENCE_THRESHOLD,
};
pub use trilinear::{
    block_lower_bound, block_lower_bound_slab, block_table_csv, extremizer_triple, resolving_grid,
    slab_trilinear, trilinear_integral, trilinear_profiles, BlockRow, ExtremizerTriple,
    LatticeProfile, Multiplier,
};

use num_complex::Complex64;

use crate::bourgain::{embed, xbs_norm_any, xbs_weight, Representation, SpaceTimeField};
use crate::error::{Error, Result};
use crate::spectral::{bracket, dissipative_bracket, ModelParams};

/// Critical Sobolev index: `-3/4` for `α ≤ 1/2`, `-3/(5 - 2α)` above.
pub fn s_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(
            "alpha",
            format!("must lie in (0, 1], got {alpha}"),
        ));
    }
    Ok(if alpha <= 0.5 {
        -0.75
    } else {
        -3.0 / (5.0 - 2.0 * alpha)
    })
}

/// `(σ, σ₁, σ₂) = (τ - ξ³, τ₁ - ξ₁³, (τ-τ₁) - (ξ-ξ₁)³)`.
pub fn modulations(tau: f64, tau1: f64, xi: f64, xi1: f64) -> (f64, f64, f64) {
    let xi2 = xi - xi1;
    (
        tau - xi * xi * xi,
        tau1 - xi1 * xi1 * xi1,
        (tau - tau1) - xi2 * xi2 * xi2,
    )
}

/// Trilinear kernel of the dual form of the bilinear estimate,
/// `|ξ|⟨ξ⟩^s ⟨ξ₁⟩^{-s}⟨ξ-ξ₁⟩^{-s} / (⟨iσ+|ξ|^{2α}⟩^{1/2-δ} ⟨iσ₁+|ξ₁|^{2α}⟩^{1/2} ⟨iσ₂+|ξ-ξ₁|^{2α}⟩^{1/2})`.
#[allow(non_snake_case)]
pub fn kernel_K(tau: f64, tau1: f64, xi: f64, xi1: f64, params: &ModelParams) -> f64 {
    kernel_with_exponents(tau, tau1, xi, xi1, params, 0.5 - params.delta, 0.5)
}

/// [`kernel_K`] with the modulation exponents `(b_out, b_in)` in place of `(1/2-δ, 1/2)`.
pub fn kernel_with_exponents(
    tau: f64,
    tau1: f64,
    xi: f64,
    xi1: f64,
    params: &ModelParams,
    b_out: f64,
    b_in: f64,
) -> f64 {
    let (s, a) = (params.s, params.alpha);
    let xi2 = xi - xi1;
    let (sigma, sigma1, sigma2) = modulations(tau, tau1, xi, xi1);
    xi.abs() * bracket(xi).powf(s) * bracket(xi1).powf(-s) * bracket(xi2).powf(-s)
        / (dissipative_bracket(sigma, xi, a).powf(b_out)
            * dissipative_bracket(sigma1, xi1, a).powf(b_in)
            * dissipative_bracket(sigma2, xi2, a).powf(b_in))
}

fn nonzero(name: &str, v: f64) -> Result<f64> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::ZeroDenominator(format!("‖{name}‖_X^(1/2,s) = {v}")));
    }
    Ok(v)
}

/// `‖∂_x(uv)‖_{X^{-1/2+δ,s}} / (‖u‖_{X^{1/2,s}} ‖v‖_{X^{1/2,s}})`.
///
/// The product is formed in physical space on the lattice with twice the
/// samples per axis, which holds the full linear convolution of the two
/// coefficient arrays without wrap-around.
pub fn bilinear_ratio(u: &SpaceTimeField, v: &SpaceTimeField, params: &ModelParams) -> Result<f64> {
    u.check_compatible(v).or_else(|_| {
        if u.st_grid == v.st_grid {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                "u and v live on different lattices".into(),
            ))
        }
    })?;
    params.validate()?;
    let (s, a, d) = (params.s, params.alpha, params.delta);
    let nu = nonzero("u", xbs_norm_any(u, 0.5, s, a))?;
    let nv = nonzero("v", xbs_norm_any(v, 0.5, s, a))?;
    let padded = u.st_grid.refined()?;
    let up = embed(u, padded).to_physical();
    let vp = embed(v, padded).to_physical();
    let mut prod = up.clone();
    for (p, w) in prod.values.iter_mut().zip(&vp.values) {
        *p *= w;
    }
    let lhs = prod.weighted_norm(|tau, xi| xi.abs() * xbs_weight(tau, xi, d - 0.5, s, a));
    Ok(lhs / (nu * nv))
}

/// The same ratio through the dual trilinear form:
/// `sup_{‖h‖=1} ∫K h f g = ‖∫K(·,τ₁,·,ξ₁) f(τ₁,ξ₁) g(τ-τ₁,ξ-ξ₁)‖_{L²}`
/// with `f, g` the `X^{1/2,s}`-weighted transforms of `u, v`, summed
/// directly over lattice pairs. Quadratic in the lattice size.
pub fn bilinear_ratio_by_duality(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    params: &ModelParams,
) -> Result<f64> {
    if u.st_grid != v.st_grid {
        return Err(Error::ShapeMismatch(
            "u and v live on different lattices".into(),
        ));
    }
    params.validate()?;
    let (s, a) = (params.s, params.alpha);
    let g = u.st_grid;
    let (nt, nx) = (g.n_time() as i64, g.n_x() as i64);
    let weighted = |w: &SpaceTimeField| -> Vec<Complex64> {
        let spec = w.to_spectral();
        let mut out = spec.values.clone();
        for m in 0..nt as usize {
            for k in 0..nx as usize {
                out[m * nx as usize + k] *= xbs_weight(g.tau(m), g.grid_x.xi(k), 0.5, s, a);
            }
        }
        out
    };
    let (f, h) = (weighted(u), weighted(v));
    let norm_f = nonzero(
        "u",
        (f.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.frequency_weight()).sqrt(),
    )?;
    let norm_g = nonzero(
        "v",
        (h.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.frequency_weight()).sqrt(),
    )?;
    let (dtau, dxi) = (g.dtau(), g.grid_x.dxi());
    let slot = |i: i64, n: i64| (i.rem_euclid(n)) as usize;
    let half = |n: i64| n / 2;
    let w = g.frequency_weight();
    let mut total = 0.0;
    for m in -nt..nt {
        for k in -nx..nx {
            let (tau, xi) = (m as f64 * dtau, k as f64 * dxi);
            let mut acc = Complex64::new(0.0, 0.0);
            for m1 in -half(nt)..half(nt) {
                let m2 = m - m1;
                if m2 < -half(nt) || m2 >= half(nt) {
                    continue;
                }
                for k1 in -half(nx)..half(nx) {
                    let k2 = k - k1;
                    if k2 < -half(nx) || k2 >= half(nx) {
                        continue;
                    }
                    let fv = f[slot(m1, nt) * nx as usize + slot(k1, nx)];
                    let gv = h[slot(m2, nt) * nx as usize + slot(k2, nx)];
                    let kern = kernel_K(tau, m1 as f64 * dtau, xi, k1 as f64 * dxi, params);
                    acc += fv * gv * kern;
                }
            }
            total += (acc * w).norm_sqr();
        }
    }
    Ok((total * w).sqrt() / (norm_f * norm_g))
}

/// Time-localized single low mode `ψ(t) e^{iξ₀x}` used in resolution studies.
pub fn localized_mode(st_grid: crate::bourgain::SpaceTimeGrid, k: i64) -> SpaceTimeField {
    let xi0 = k as f64 * st_grid.grid_x.dxi();
    let mut f = SpaceTimeField::from_fn(st_grid, |t, x| {
        Complex64::from_polar(crate::bourgain::psi(t), xi0 * x)
    });
    f.representation = Representation::Physical;
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bourgain::SpaceTimeGrid;
    use crate::spectral::Grid1D;

    #[test]
    fn critical_index() {
        assert_eq!(s_alpha(0.3).unwrap(), -0.75);
        assert_eq!(s_alpha(1.0).unwrap(), -1.0);
        assert_eq!(s_alpha(0.5).unwrap(), -0.75);
        assert_eq!(-3.0 / (5.0 - 2.0 * 0.5), -0.75);
        assert!(s_alpha(0.0).is_err() && s_alpha(1.5).is_err());
    }

    #[test]
    fn modulation_examples() {
        let (a, b, c) = modulations(8.0, 8.0, 2.0, 2.0);
        assert_eq!((a, b, c), (0.0, 0.0, 0.0));
        let (s, s1, s2) = modulations(0.3, -1.7, 2.0, 1.0);
        assert!((s1 + s2 - s - 6.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_worked_example() {
        // ξ = 1, ξ₁ = 1/2 on the characteristic surface, s = δ = 0, α = 1.
        let p = ModelParams {
            s: 0.0,
            delta: 0.0,
            ..ModelParams::default()
        };
        let k = kernel_K(1.0, 0.125, 1.0, 0.5, &p);
        // σ = σ₁ = 0, σ₂ = (1 - 1/8) - 1/8 = 3/4; |ξ₁|² = |ξ₂|² = 1/4.
        let b0 = (1.0f64 + 1.0).sqrt();
        let b1 = (1.0f64 + 1.0 / 16.0).sqrt();
        let b2 = (1.0f64 + 9.0 / 16.0 + 1.0 / 16.0).sqrt();
        let expect = 1.0 / (b0 * b1 * b2).sqrt();
        assert!((k - expect).abs() < 1e-15);
        assert_eq!(kernel_K(3.0, 1.0, 0.0, 0.7, &p), 0.0);
    }

    #[test]
    fn kernel_at_zero_exponents() {
        let p = ModelParams::new(0.6, -0.4).unwrap();
        let (xi, xi1) = (1.7, -0.6);
        let k = kernel_with_exponents(3.0, -2.0, xi, xi1, &p, 0.0, 0.0);
        let expect = xi.abs()
            * bracket(xi).powf(-0.4)
            * bracket(xi1).powf(0.4)
            * bracket(xi - xi1).powf(0.4);
        assert!((k - expect).abs() < 1e-14);
    }

    fn small_lattice() -> SpaceTimeGrid {
        SpaceTimeGrid::new(Grid1D::new(8, 8.0 * std::f64::consts::PI).unwrap(), 16, 2.0).unwrap()
    }

    #[test]
    fn zero_denominator_rejected() {
        let g = small_lattice();
        let z = SpaceTimeField::zeros(g, Representation::Physical);
        let u = localized_mode(g, 1);
        assert!(matches!(
            bilinear_ratio(&z, &u, &ModelParams::default()),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn homogeneous_of_degree_zero() {
        let g = small_lattice();
        let u = localized_mode(g, 1);
        let v = localized_mode(g, -2);
        let p = ModelParams::default();
        let r = bilinear_ratio(&u, &v, &p).unwrap();
        let r2 = bilinear_ratio(&u.scaled(3.5), &v.scaled(-0.2), &p).unwrap();
        assert!((r - r2).abs() < 1e-12 * r);
    }

    #[test]
    fn duality_matches_direct_evaluation() {
        let g = small_lattice();
        let u = localized_mode(g, 1);
        let v = localized_mode(g, 2);
        let p = ModelParams::new(0.75, -0.6).unwrap();
        let direct = bilinear_ratio(&u, &v, &p).unwrap();
        let dual = bilinear_ratio_by_duality(&u, &v, &p).unwrap();
        assert!((direct - dual).abs() < 1e-10 * direct, "{direct} vs {dual}");
    }

    proptest::proptest! {
        #[test]
        fn resonance_identity(tau in -1e3f64..1e3, tau1 in -1e3f64..1e3, xi in -30.0f64..30.0, xi1 in -30.0f64..30.0) {
            let (s, s1, s2) = modulations(tau, tau1, xi, xi1);
            let xi2 = xi - xi1;
            let h = -3.0 * xi * xi1 * xi2;
            proptest::prop_assert!((s - s1 - s2 - h).abs() <= 1e-12 * (1.0 + xi.abs().powi(3) + xi1.abs().powi(3) + tau.abs() + tau1.abs()));
            let largest = s.abs().max(s1.abs()).max(s2.abs());
            proptest::prop_assert!(largest >= (xi * xi1 * xi2).abs() * (1.0 - 1e-12));
        }
    }
}
