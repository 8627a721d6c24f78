//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by recursive
/// bisection, splitting the tolerance between halves.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Quadrature {
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        whole: (f64, f64),
        depth: u32,
        evals: &mut usize,
    ) -> (f64, f64) {
        let (value, err) = whole;
        if err <= tol || depth == 0 {
            return (value, err);
        }
        let m = 0.5 * (a + b);
        let left = gk15(f, a, m);
        let right = gk15(f, m, b);
        *evals += 30;
        let (lv, le) = rec(f, a, m, 0.5 * tol, left, depth - 1, evals);
        let (rv, re) = rec(f, m, b, 0.5 * tol, right, depth - 1, evals);
        (lv + rv, le + re)
    }
    let mut evals = 15;
    let first = gk15(&f, a, b);
    let (value, error) = rec(&f, a, b, tol, first, 40, &mut evals);
    Quadrature {
        value,
        error,
        evaluations: evals,
    }
}

/// Sum of [`integrate`] over consecutive breakpoints.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, breaks: &[f64], tol: f64) -> Quadrature {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let q = integrate(&f, w[0], w[1], tol / pieces);
            total.value += q.value;
            total.error += q.error;
            total.evaluations += q.evaluations;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_peaks() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((q.value - 0.0).abs() < 1e-12);
        let q = integrate(|x| 1.0 / (1.0 + x * x), -1000.0, 1000.0, 1e-10);
        let exact = 2.0 * 1000f64.atan();
        assert!((q.value - exact).abs() < 1e-9);
    }

    #[test]
    fn breakpoints() {
        let q = integrate_pieces(|x: f64| x.abs(), &[-1.0, 0.0, 1.0], 1e-13);
        assert!((q.value - 1.0).abs() < 1e-13);
    }
}
