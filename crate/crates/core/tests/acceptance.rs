//! End-to-end acceptance checks. Runs as a plain binary so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

use std::time::Instant;

use dkdv::bilinear::{
    kernel_K, modulations, s_alpha, sharpness_sweep, trilinear_profiles, BlockCase, BlockRow,
    LatticeProfile, Multiplier, Verdict,
};
use dkdv::bourgain::{lemma_check, LemmaKind};
use dkdv::evolution::{picard_direct_difference, picard_solve, solve_ivp, PicardConfig};
use dkdv::harness::{block_family, random_field, BlocksSection};
use dkdv::spectral::{dissipation_rate, sobolev_norm, Field, Grid1D, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn critical_index() -> Result<String, String> {
    for a in [0.1, 0.3, 0.5] {
        let v = s_alpha(a).map_err(|e| e.to_string())?;
        ensure(v == -0.75, || format!("s_alpha({a}) = {v}"))?;
    }
    for a in [0.6, 0.75, 1.0] {
        let v = s_alpha(a).map_err(|e| e.to_string())?;
        ensure(v == -3.0 / (5.0 - 2.0 * a), || {
            format!("s_alpha({a}) = {v}")
        })?;
    }
    ensure(s_alpha(1.0).unwrap() == -1.0, || "s_alpha(1) != -1".into())?;
    Ok("6 values exact".into())
}

const N1_LIST: [f64; 5] = [16.0, 32.0, 64.0, 128.0, 256.0];

// At α = 1 the low frequency N₁^{1/2} is dyadic only for even exponents.
const N1_EVEN: [f64; 3] = [16.0, 64.0, 256.0];

fn sweep(s: f64, alpha: f64) -> Result<dkdv::bilinear::SweepReport, String> {
    let list: &[f64] = if alpha == 1.0 { &N1_EVEN } else { &N1_LIST };
    sharpness_sweep(s, alpha, list, &ModelParams::default()).map_err(|e| e.to_string())
}

fn sweep_low_alpha() -> Result<String, String> {
    let div = sweep(-0.9, 0.25)?;
    ensure((div.fitted_slope - 0.3).abs() <= 0.15, || {
        format!("slope {} at s=-0.9", div.fitted_slope)
    })?;
    ensure(div.verdict == Verdict::Divergent, || {
        "s=-0.9 not divergent".into()
    })?;
    let bdd = sweep(-0.7, 0.25)?;
    ensure(bdd.fitted_slope <= 0.05, || {
        format!("slope {} at s=-0.7", bdd.fitted_slope)
    })?;
    ensure(bdd.verdict == Verdict::Bounded, || {
        "s=-0.7 not bounded".into()
    })?;
    Ok(format!(
        "s=-0.9 slope {:.3}±{:.3} divergent, s=-0.7 slope {:.3} bounded",
        div.fitted_slope, div.slope_stderr, bdd.fitted_slope
    ))
}

fn sweep_high_alpha() -> Result<String, String> {
    let mut parts = Vec::new();
    for (s, want) in [(-1.1, Verdict::Divergent), (-0.9, Verdict::Bounded)] {
        let r = sweep(s, 1.0)?;
        ensure(r.verdict == want, || {
            format!("s={s}: verdict {:?}", r.verdict)
        })?;
        ensure(
            r.fitted_slope.signum() == r.predicted_slope.signum(),
            || {
                format!(
                    "s={s}: fitted {} vs predicted {}",
                    r.fitted_slope, r.predicted_slope
                )
            },
        )?;
        parts.push(format!(
            "s={s} slope {:.3}±{:.3} (predicted {:.3}) {:?}",
            r.fitted_slope, r.slope_stderr, r.predicted_slope, r.verdict
        ));
    }
    Ok(parts.join(", "))
}

fn block_sharpness() -> Result<String, String> {
    let family = block_family(&BlocksSection::default()).map_err(|e| e.to_string())?;
    ensure(family.len() >= 10, || {
        format!("only {} blocks", family.len())
    })?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let (mut nmin, mut nmax) = (f64::INFINITY, 0.0f64);
    for b in &family {
        ensure(BlockCase::classify(b) == Some(BlockCase::PlusMinus), || {
            format!("{b:?} is not (+-)")
        })?;
        let row = BlockRow::measure(*b).map_err(|e| e.to_string())?;
        lo = lo.min(row.ratio);
        hi = hi.max(row.ratio);
        nmin = nmin.min(b.n_sorted()[0]);
        nmax = nmax.max(b.n_sorted()[0]);
    }
    ensure(nmin <= 4.0 && nmax >= 128.0, || {
        format!("N_max spans only {nmin}..{nmax}")
    })?;
    ensure(hi / lo <= 10.0, || format!("C/c = {}", hi / lo))?;
    Ok(format!(
        "{} blocks, N_max {nmin}..{nmax}, ratio in [{lo:.4}, {hi:.4}], C/c = {:.3}",
        family.len(),
        hi / lo
    ))
}

/// Plain six-fold sum over the three boxes, keeping only `ζ₁+ζ₂+ζ₃ = 0`.
fn constrained_sum(f: [&LatticeProfile; 3], kernel: bool, p: &ModelParams) -> f64 {
    let (dt, dx) = (f[0].dtau, f[0].dxi);
    let mut sum = 0.0;
    for a in f[0].tau_lo..f[0].tau_lo + f[0].n_tau as i64 {
        for b in f[0].xi_lo..f[0].xi_lo + f[0].n_xi as i64 {
            for c in f[1].tau_lo..f[1].tau_lo + f[1].n_tau as i64 {
                for d in f[1].xi_lo..f[1].xi_lo + f[1].n_xi as i64 {
                    for e in f[2].tau_lo..f[2].tau_lo + f[2].n_tau as i64 {
                        for g in f[2].xi_lo..f[2].xi_lo + f[2].n_xi as i64 {
                            if a + c + e != 0 || b + d + g != 0 {
                                continue;
                            }
                            let m = if kernel {
                                kernel_K(
                                    -(e as f64) * dt,
                                    a as f64 * dt,
                                    -(g as f64) * dx,
                                    b as f64 * dx,
                                    p,
                                )
                            } else {
                                1.0
                            };
                            sum += m * f[0].get(a, b) * f[1].get(c, d) * f[2].get(e, g);
                        }
                    }
                }
            }
        }
    }
    sum * (dt * dx) * (dt * dx)
}

fn trilinear_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let p = ModelParams::default();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 2..=8usize {
        for ones in [true, false] {
            let profile = |rng: &mut ChaCha8Rng| {
                let values = (0..n * n)
                    .map(|_| if ones || rng.gen_bool(0.5) { 1.0 } else { 0.0 })
                    .collect();
                LatticeProfile::new(
                    0.5,
                    0.75,
                    rng.gen_range(-(n as i64)..=0),
                    rng.gen_range(-(n as i64)..=0),
                    n,
                    n,
                    values,
                )
                .unwrap()
            };
            let f = [profile(&mut rng), profile(&mut rng), profile(&mut rng)];
            let refs = [&f[0], &f[1], &f[2]];
            for (kernel, m) in [(false, Multiplier::One), (true, Multiplier::Kernel)] {
                let got = trilinear_profiles(refs, &m, &p).map_err(|e| e.to_string())?;
                let want = constrained_sum(refs, kernel, &p);
                let err = if want == 0.0 {
                    got.abs()
                } else {
                    ((got - want) / want).abs()
                };
                worst = worst.max(err);
                cases += 1;
            }
        }
    }
    ensure(worst <= 1e-12, || format!("worst relative error {worst:e}"))?;
    Ok(format!(
        "{cases} cases up to 8x8, worst relative error {worst:.1e}"
    ))
}

fn solver_dissipation() -> Result<String, String> {
    let grid = Grid1D::new(256, 16.0 * std::f64::consts::PI).unwrap();
    let dt = 1e-3;
    let (mut worst_growth, mut worst_mean, mut worst_rate) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let alpha = [0.25, 0.5, 1.0][seed as usize % 3];
        let params = ModelParams::new(alpha, -0.5).unwrap();
        let mut u0 = random_field(grid, 0.0, 1.0, -1.0, seed);
        for v in &mut u0.values {
            *v += 0.2;
        }
        let traj = solve_ivp(&u0, 0.1, dt, &params, 1).map_err(|e| e.to_string())?;
        let sq: Vec<f64> = traj
            .states
            .iter()
            .map(|s| sobolev_norm(s, 0.0).powi(2))
            .collect();
        for w in sq.windows(2) {
            worst_growth = worst_growth.max((w[1].sqrt() - w[0].sqrt()) / w[0].sqrt());
        }
        let m0 = traj.states[0].mean();
        for s in &traj.states {
            worst_mean = worst_mean.max((s.mean() - m0).abs());
        }
        for i in 1..sq.len() - 1 {
            let observed = (sq[i + 1] - sq[i - 1]) / (traj.times[i + 1] - traj.times[i - 1]);
            let expected = -2.0 * dissipation_rate(&traj.states[i], alpha);
            worst_rate = worst_rate.max(((observed - expected) / expected).abs());
        }
    }
    ensure(worst_growth <= 1e-9, || {
        format!("L2 grew by relative {worst_growth:e}")
    })?;
    ensure(worst_mean <= 1e-12, || {
        format!("mean drifted by {worst_mean:e}")
    })?;
    ensure(worst_rate <= 0.01, || {
        format!("energy rate off by {worst_rate:e}")
    })?;
    Ok(format!(
        "20 runs: max L2 step change {worst_growth:.1e}, mean drift {worst_mean:.1e}, energy rate error {worst_rate:.1e}"
    ))
}

fn integrator_order() -> Result<String, String> {
    // Data large enough that the nonlinear truncation error dominates
    // the accumulated FFT round-off at dt = 1e-3.
    let grid = Grid1D::new(256, 16.0 * std::f64::consts::PI).unwrap();
    let params = ModelParams::new(1.0, -0.5).unwrap();
    let u0 = Field::from_fn(grid, |x| 10.0 * (-x * x / 2.0).exp());
    let run = |dt: f64| -> Result<Field, String> {
        let traj = solve_ivp(&u0, 0.5, dt, &params, usize::MAX).map_err(|e| e.to_string())?;
        Ok(traj.last().unwrap().inverse())
    };
    let reference = run(2.5e-4)?;
    let mut errors = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3] {
        let u = run(dt)?;
        let diff: Vec<f64> = u
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| a - b)
            .collect();
        errors.push(Field::new(grid, diff).unwrap().l2_norm());
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(order >= 3.5, || {
        format!("orders {orders:?}, errors {errors:?}")
    })?;
    Ok(format!(
        "errors {:.2e} {:.2e} {:.2e}, orders {:.2} {:.2}",
        errors[0], errors[1], errors[2], orders[0], orders[1]
    ))
}

fn picard_agreement() -> Result<String, String> {
    let grid = Grid1D::new(256, 32.0 * std::f64::consts::PI).unwrap();
    let params = ModelParams::new(1.0, -0.5).unwrap();
    let shape = Field::from_fn(grid, |x| (-x * x / 4.0).exp());
    let scale = 0.1 / sobolev_norm(&shape.forward(), -0.5);
    let u0 = Field::from_fn(grid, |x| scale * (-x * x / 4.0).exp());
    let cfg = PicardConfig::default();
    ensure(cfg.t_window == 0.5, || "default window is not 0.5".into())?;
    let out = picard_solve(&u0, &cfg, &params).map_err(|e| e.to_string())?;
    let diff = picard_direct_difference(&u0, &out, &cfg, &params).map_err(|e| e.to_string())?;
    ensure(diff <= 1e-4, || format!("L2 difference {diff:e}"))?;
    ensure(out.ratios.iter().all(|&r| r < 1.0), || {
        format!("ratios {:?}", out.ratios)
    })?;
    // ratios[k - 1] is r_k
    let tail = &out.ratios[2.min(out.ratios.len())..];
    ensure(!tail.is_empty(), || "fewer than three ratios".into())?;
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    ensure(hi <= 2.0 * lo, || {
        format!("ratios after k = 3 vary from {lo} to {hi}")
    })?;
    Ok(format!(
        "{} iterations, L2 difference {diff:.1e}, r_k (k>=3) in [{lo:.3}, {hi:.3}]",
        out.iterations
    ))
}

fn lemma_suite() -> Result<String, String> {
    let params = ModelParams::default();
    let mut parts = Vec::new();
    for kind in LemmaKind::ALL {
        let v = lemma_check(kind, 20, &params, 99).map_err(|e| e.to_string())?;
        ensure(v.pass, || format!("{kind} failed: {v:?}"))?;
        ensure(v.growth < 0.1, || format!("{kind}: growth {}", v.growth))?;
        if matches!(kind, LemmaKind::L2Contract | LemmaKind::L4Strichartz) {
            let slope = v.t_scaling_slope.unwrap_or(f64::NAN);
            ensure(slope > 0.0, || format!("{kind}: T-scaling slope {slope}"))?;
        }
        parts.push(format!("{kind} {:.3}", v.worst_ratio));
    }
    Ok(parts.join(", "))
}

fn resonance() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..1_000_000 {
        // Exact integer arithmetic.
        let (t, t1): (i128, i128) = (
            rng.gen_range(-1_000_000_000..=1_000_000_000),
            rng.gen_range(-1_000_000_000..=1_000_000_000),
        );
        let (x, x1): (i128, i128) = (rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000));
        let x2 = x - x1;
        let (s, s1, s2) = (t - x * x * x, t1 - x1 * x1 * x1, (t - t1) - x2 * x2 * x2);
        let h = 3 * x * x1 * x2;
        ensure(s1 + s2 - s == h, || {
            format!("identity fails at {t} {t1} {x} {x1}")
        })?;
        let prod = (x * x1 * x2).abs();
        ensure(s.abs().max(s1.abs()).max(s2.abs()) >= prod, || {
            format!("inequality fails at {t} {t1} {x} {x1}")
        })?;

        // Floating point through the library.
        let (tf, t1f, xf, x1f) = (
            rng.gen_range(-1e3..1e3),
            rng.gen_range(-1e3..1e3),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
        );
        let (a, b, c) = modulations(tf, t1f, xf, x1f);
        let hf = 3.0 * xf * x1f * (xf - x1f);
        let scale =
            tf.abs() + t1f.abs() + xf.abs().powi(3) + x1f.abs().powi(3) + (xf - x1f).abs().powi(3);
        worst = worst.max((b + c - a - hf).abs() / scale);
    }
    ensure(worst <= 8.0 * f64::EPSILON, || {
        format!("floating identity error {worst:e}")
    })?;
    Ok(format!(
        "1e6 integer quadruples exact, floating relative error {worst:.1e}"
    ))
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("critical index formula", critical_index),
        ("sharpness sweep, alpha <= 1/2", sweep_low_alpha),
        ("sharpness sweep, alpha > 1/2", sweep_high_alpha),
        ("block bound sharpness", block_sharpness),
        ("trilinear oracle", trilinear_oracle),
        ("solver dissipation and conservation", solver_dissipation),
        ("integrator order", integrator_order),
        ("Picard/direct agreement", picard_agreement),
        ("lemma suite", lemma_suite),
        ("resonance identity", resonance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("acceptance {:>2} PASS {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {:>2} FAIL {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
