//! Exponential-integrator coefficients.
//!
//! Every coefficient here is an entire function of `z = h Λ(ξ)` whose
//! closed form cancels catastrophically near `z = 0`. They are evaluated
//! as the mean over `CONTOUR_POINTS` points of a unit circle centred at
//! `z`, which is exact for entire functions up to aliasing of the 32nd
//! Taylor coefficient.

use num_complex::Complex64;

pub const CONTOUR_POINTS: usize = 32;
pub const CONTOUR_RADIUS: f64 = 1.0;

fn contour_mean<const K: usize>(
    z: Complex64,
    f: impl Fn(Complex64) -> [Complex64; K],
) -> [Complex64; K] {
    let mut acc = [Complex64::new(0.0, 0.0); K];
    for j in 0..CONTOUR_POINTS {
        let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
        let r = z + Complex64::from_polar(CONTOUR_RADIUS, theta);
        for (a, v) in acc.iter_mut().zip(f(r)) {
            *a += v;
        }
    }
    let m = CONTOUR_POINTS as f64;
    acc.map(|a| a / m)
}

/// Per-mode coefficients of the fourth-order exponential time-differencing
/// Runge–Kutta scheme of Cox–Matthews in the Kassam–Trefethen form.
#[derive(Debug, Clone, Copy)]
pub struct Etdrk4Coeffs {
    pub e: Complex64,
    pub e_half: Complex64,
    pub q: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
}

impl Etdrk4Coeffs {
    /// Coefficients for symbol value `lambda` and step `h`.
    pub fn new(lambda: Complex64, h: f64) -> Self {
        let z = lambda * h;
        let [q, f1, f2, f3] = contour_mean(z, |r| {
            let er = r.exp();
            let r3 = r * r * r;
            [
                ((r * 0.5).exp() - 1.0) / r,
                (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3,
                (2.0 + r + er * (r - 2.0)) / r3,
                (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3,
            ]
        });
        Self {
            e: z.exp(),
            e_half: (z * 0.5).exp(),
            q: q * h,
            f1: f1 * h,
            f2: f2 * h,
            f3: f3 * h,
        }
    }
}

/// Weights of exponential Simpson panels.
///
/// For a panel `[t_k, t_k + 2h]` and `g` interpolated by the quadratic
/// through `g(t_k), g(t_k+h), g(t_k+2h)`,
/// `∫_{t_k}^{t_k+2h} e^{(t_k+2h-t')Λ} g(t') dt' = h Σ_i full[i] g_i` and
/// `∫_{t_k}^{t_k+h} e^{(t_k+h-t')Λ} g(t') dt' = h Σ_i half[i] g_i`.
/// At `Λ = 0` `full` is the classical Simpson rule `(1/3, 4/3, 1/3)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpSimpsonWeights {
    pub full: [Complex64; 3],
    pub half: [Complex64; 3],
    pub e_full: Complex64,
    pub e_half: Complex64,
}

fn quadratic_moments(a: f64, r: Complex64) -> [Complex64; 3] {
    // M_n = ∫_0^a e^{(a-s) r} s^n ds
    let m0 = ((r * a).exp() - 1.0) / r;
    let m1 = (m0 - a) / r;
    let m2 = (m1 * 2.0 - a * a) / r;
    [m0, m1, m2]
}

fn lagrange_weights(m: [Complex64; 3]) -> [Complex64; 3] {
    let [m0, m1, m2] = m;
    [
        (m2 - m1 * 3.0 + m0 * 2.0) * 0.5,
        -m2 + m1 * 2.0,
        (m2 - m1) * 0.5,
    ]
}

impl ExpSimpsonWeights {
    pub fn new(lambda: Complex64, h: f64) -> Self {
        let z = lambda * h;
        let [a0, a1, a2, b0, b1, b2] = contour_mean(z, |r| {
            let [w0, w1, w2] = lagrange_weights(quadratic_moments(2.0, r));
            let [v0, v1, v2] = lagrange_weights(quadratic_moments(1.0, r));
            [w0, w1, w2, v0, v1, v2]
        });
        Self {
            full: [a0, a1, a2],
            half: [b0, b1, b2],
            e_full: (z * 2.0).exp(),
            e_half: z.exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_limit() {
        let w = ExpSimpsonWeights::new(Complex64::new(0.0, 0.0), 0.1);
        let expect = [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0];
        for (a, b) in w.full.iter().zip(expect) {
            assert!((a - b).norm() < 1e-14);
        }
        // ∫_0^1 L_i(s) ds = (5/12, 2/3, -1/12)
        let expect = [5.0 / 12.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in w.half.iter().zip(expect) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn weights_integrate_quadratics_exactly() {
        // g(t') = 1 + t' - t'^2 on [0, 2h]; exact ∫ e^{(2h-t')λ} g dt' by fine quadrature.
        let lambda = Complex64::new(-3.0, 40.0);
        let h = 0.05;
        let w = ExpSimpsonWeights::new(lambda, h);
        let g = |t: f64| 1.0 + t - t * t;
        let approx = h * (w.full[0] * g(0.0) + w.full[1] * g(h) + w.full[2] * g(2.0 * h));
        let n = 200_000;
        let dt = 2.0 * h / n as f64;
        let exact: Complex64 = (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * dt;
                (lambda * (2.0 * h - t)).exp() * g(t) * dt
            })
            .sum();
        assert!((approx - exact).norm() < 1e-9);
    }

    #[test]
    fn etdrk4_small_z_matches_taylor() {
        // f1, f2, f3 -> h/6, h/6, h/6 and q -> h/2 at z = 0.
        let c = Etdrk4Coeffs::new(Complex64::new(0.0, 0.0), 1.0);
        assert!((c.q - 0.5).norm() < 1e-14);
        for f in [c.f1, c.f2, c.f3] {
            assert!((f - 1.0 / 6.0).norm() < 1e-14);
        }
    }
}
