//! Resolvents `(λ−T)^{-1}` of nilpotent truncations, in scaled arithmetic.
//!
//! `(λ−T)` is lower triangular with `λ` on the diagonal, so `(λ−T)^{-1}x` is a
//! forward substitution and `(λ−T)^{-*}x` a backward one. Intermediate vectors
//! are renormalized by exact powers of two whenever an entry exceeds `2^512`;
//! the accumulated exponent ends up in the [`LogMagnitude`] of the result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{Complex, LogMagnitude, PrecisionContext, Real, GUARD_BITS};
use crate::operators::{Kernel, Operator, OperatorSpec, VectorSpec};

/// Entries above `2^RENORM_EXP` trigger a rescale.
const RENORM_EXP: i64 = 512;

/// `v = m · direction` with `‖direction‖ = 1` and `m` stored as a log.
#[derive(Clone, Debug)]
pub struct ScaledVector {
    pub direction: Vec<Complex>,
    pub log_scale: LogMagnitude,
}

impl ScaledVector {
    /// `ln ‖v‖`.
    pub fn log_norm(&self) -> f64 {
        self.log_scale.ln()
    }
}

/// A vector stored as `values · 2^exp2`.
struct Pow2Vector {
    values: Vec<Complex>,
    exp2: i64,
}

fn magnitude_exponent(z: &Complex) -> Option<i64> {
    match (z.re.exponent(), z.im.exponent()) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn rescale_if_large(y: &mut [Complex], upto: usize, aux: Option<&mut Complex>, exp2: &mut i64) {
    let Some(e) = magnitude_exponent(&y[upto]) else {
        return;
    };
    if e <= RENORM_EXP {
        return;
    }
    for v in y.iter_mut() {
        if !v.is_zero() {
            *v = v.mul_pow2(-e);
        }
    }
    if let Some(s) = aux {
        *s = s.mul_pow2(-e);
    }
    *exp2 += e;
}

/// Solves `(λ−T) y = x` given `mu = 1/λ`.
fn forward_solve(op: &Operator, mu: &Complex, x: &[Complex]) -> Pow2Vector {
    let n = op.dim();
    let bits = mu.precision();
    if let Kernel::BlockDiagonal { parts, offsets } = op.kernel() {
        let blocks: Vec<Pow2Vector> = parts
            .iter()
            .zip(offsets)
            .map(|(p, &off)| forward_solve(p, mu, &x[off..off + p.dim()]))
            .collect();
        return merge_blocks(blocks);
    }
    let mut y = vec![Complex::zero(bits); n];
    let mut exp2 = 0i64;
    // x in the current units is x · 2^-exp2
    let xs = |i: usize, exp2: i64| -> Complex {
        if exp2 == 0 || x[i].is_zero() {
            x[i].clone()
        } else {
            x[i].mul_pow2(-exp2)
        }
    };
    match op.kernel() {
        Kernel::Bidiagonal { sub } => {
            for i in 0..n {
                let mut rhs = xs(i, exp2);
                if i > 0 && !sub[i].is_zero() && !y[i - 1].is_zero() {
                    rhs = &rhs + &y[i - 1].scale(&sub[i]);
                }
                y[i] = &rhs * mu;
                rescale_if_large(&mut y[..=i], i, None, &mut exp2);
            }
        }
        Kernel::UniformLower { weight } => {
            let mut acc = Complex::zero(bits);
            for i in 0..n {
                let rhs = &xs(i, exp2) + &acc.scale(weight);
                y[i] = &rhs * mu;
                acc = &acc + &y[i];
                rescale_if_large(&mut y[..=i], i, Some(&mut acc), &mut exp2);
            }
        }
        Kernel::Banded { bands } => {
            for i in 0..n {
                let mut rhs = xs(i, exp2);
                for (d, band) in bands.iter().enumerate() {
                    if d + 1 > i {
                        break;
                    }
                    let j = i - d - 1;
                    if !band[j].is_zero() && !y[j].is_zero() {
                        rhs = &rhs + &y[j].scale(&band[j]);
                    }
                }
                y[i] = &rhs * mu;
                rescale_if_large(&mut y[..=i], i, None, &mut exp2);
            }
        }
        Kernel::BlockDiagonal { .. } => unreachable!(),
    }
    Pow2Vector { values: y, exp2 }
}

/// Solves `(λ−T)* z = x` given `mu = 1/conj(λ)`.
fn backward_solve(op: &Operator, mu: &Complex, x: &[Complex]) -> Pow2Vector {
    let n = op.dim();
    let bits = mu.precision();
    if let Kernel::BlockDiagonal { parts, offsets } = op.kernel() {
        let blocks: Vec<Pow2Vector> = parts
            .iter()
            .zip(offsets)
            .map(|(p, &off)| backward_solve(p, mu, &x[off..off + p.dim()]))
            .collect();
        return merge_blocks(blocks);
    }
    let mut z = vec![Complex::zero(bits); n];
    let mut exp2 = 0i64;
    let xs = |i: usize, exp2: i64| -> Complex {
        if exp2 == 0 || x[i].is_zero() {
            x[i].clone()
        } else {
            x[i].mul_pow2(-exp2)
        }
    };
    match op.kernel() {
        Kernel::Bidiagonal { sub } => {
            for i in (0..n).rev() {
                let mut rhs = xs(i, exp2);
                if i + 1 < n && !sub[i + 1].is_zero() && !z[i + 1].is_zero() {
                    rhs = &rhs + &z[i + 1].scale(&sub[i + 1]);
                }
                z[i] = &rhs * mu;
                rescale_if_large(&mut z[i..], 0, None, &mut exp2);
            }
        }
        Kernel::UniformLower { weight } => {
            let mut acc = Complex::zero(bits);
            for i in (0..n).rev() {
                let rhs = &xs(i, exp2) + &acc.scale(weight);
                z[i] = &rhs * mu;
                acc = &acc + &z[i];
                rescale_if_large(&mut z[i..], 0, Some(&mut acc), &mut exp2);
            }
        }
        Kernel::Banded { bands } => {
            for i in (0..n).rev() {
                let mut rhs = xs(i, exp2);
                for (d, band) in bands.iter().enumerate() {
                    let k = i + d + 1;
                    if k >= n {
                        break;
                    }
                    if !band[i].is_zero() && !z[k].is_zero() {
                        rhs = &rhs + &z[k].scale(&band[i]);
                    }
                }
                z[i] = &rhs * mu;
                rescale_if_large(&mut z[i..], 0, None, &mut exp2);
            }
        }
        Kernel::BlockDiagonal { .. } => unreachable!(),
    }
    Pow2Vector { values: z, exp2 }
}

/// Brings per-block results to a common power-of-two scale (exactly).
fn merge_blocks(blocks: Vec<Pow2Vector>) -> Pow2Vector {
    let exp2 = blocks
        .iter()
        .filter(|b| b.values.iter().any(|v| !v.is_zero()))
        .map(|b| b.exp2)
        .max()
        .unwrap_or(0);
    let mut values = Vec::new();
    for b in blocks {
        let shift = b.exp2 - exp2;
        if shift == 0 {
            values.extend(b.values);
        } else {
            values.extend(b.values.into_iter().map(|v| {
                if v.is_zero() {
                    v
                } else {
                    v.mul_pow2(shift)
                }
            }));
        }
    }
    Pow2Vector { values, exp2 }
}

fn euclidean_norm(v: &[Complex], bits: usize) -> Real {
    let mut s = Real::zero(bits);
    for z in v {
        if !z.is_zero() {
            s = &s + &z.norm_sqr();
        }
    }
    s.sqrt()
}

/// Normalizes `y · 2^exp2` into direction and log-scale.
fn into_scaled(y: Pow2Vector, bits: usize) -> Result<ScaledVector> {
    let norm = euclidean_norm(&y.values, bits);
    if norm.is_zero() {
        return Err(Error::ZeroVector);
    }
    let wide = bits + GUARD_BITS;
    let log = &norm.with_precision(wide).ln()
        + &(&Real::ln2(wide) * &Real::from_f64(y.exp2 as f64, wide));
    let inv = &Real::one(bits) / &norm;
    let direction = y.values.iter().map(|z| z.scale(&inv)).collect();
    Ok(ScaledVector {
        direction,
        log_scale: LogMagnitude::from_log(log),
    })
}

fn check_inputs(op: &Operator, lambda: &Complex, x: &[Complex]) -> Result<()> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    if x.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: x.len(),
        });
    }
    if x.iter().all(Complex::is_zero) {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

fn with_bits(z: &Complex, bits: usize) -> Complex {
    Complex::new(z.re.with_precision(bits), z.im.with_precision(bits))
}

/// `(λ−T)^{-1} x` by forward substitution.
pub fn resolvent_apply(
    op: &Operator,
    lambda: &Complex,
    x: &[Complex],
    ctx: &PrecisionContext,
) -> Result<ScaledVector> {
    check_inputs(op, lambda, x)?;
    let bits = ctx.bits();
    let mu = with_bits(lambda, bits).recip();
    into_scaled(forward_solve(op, &mu, x), bits)
}

/// `(λ−T)^{-*} x` by backward substitution on the conjugate transpose.
pub fn resolvent_apply_adjoint(
    op: &Operator,
    lambda: &Complex,
    x: &[Complex],
    ctx: &PrecisionContext,
) -> Result<ScaledVector> {
    check_inputs(op, lambda, x)?;
    let bits = ctx.bits();
    let mu = with_bits(lambda, bits).conj().recip();
    into_scaled(backward_solve(op, &mu, x), bits)
}

/// [`resolvent_apply`] for a vector given by spec.
pub fn resolvent_apply_spec(
    spec: &OperatorSpec,
    lambda: &Complex,
    x: &VectorSpec,
    ctx: &PrecisionContext,
) -> Result<ScaledVector> {
    let op = crate::operators::materialize(spec, ctx.bits())?;
    let v = x.materialize(spec, ctx.bits())?;
    resolvent_apply(&op, lambda, &v, ctx)
}

fn random_unit(n: usize, seed: u64, bits: usize) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex> = (0..n)
        .map(|_| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            Complex::from_f64(re, im, bits)
        })
        .collect();
    let inv = &Real::one(bits) / &euclidean_norm(&v, bits);
    v.iter().map(|z| z.scale(&inv)).collect()
}

enum PowerOutcome {
    Converged(Real),
    Stalled(Real),
}

fn power_iteration(
    op: &Operator,
    mu: &Complex,
    mu_adj: &Complex,
    start: Vec<Complex>,
    iterations: usize,
    tol: f64,
    bits: usize,
) -> Result<PowerOutcome> {
    let mut v = start;
    let mut prev: Option<Real> = None;
    let mut last = Real::zero(bits + GUARD_BITS);
    for _ in 0..iterations {
        // ‖Rv‖ with ‖v‖ = 1 is a lower bound for ‖R‖ that increases to it
        let rv = into_scaled(forward_solve(op, mu, &v), bits)?;
        let log = rv.log_scale.log_value().expect("nonzero").clone();
        let back = into_scaled(backward_solve(op, mu_adj, &rv.direction), bits)?;
        v = back.direction;
        if let Some(p) = &prev {
            if (&log - p).abs().to_f64() <= tol {
                return Ok(PowerOutcome::Converged(log.max(p)));
            }
        }
        last = match prev {
            Some(p) => log.max(&p),
            None => log.clone(),
        };
        prev = Some(log);
    }
    Ok(PowerOutcome::Stalled(last))
}

/// `ln ‖(λ−T)^{-1}‖` (largest singular value) by power iteration on `R*R`.
///
/// Direct sums are handled block by block. If the first start vector stalls
/// the iteration restarts once from a fresh seed; each attempt gets half of
/// `ctx.max_power_iterations`.
pub fn resolvent_norm(
    op: &Operator,
    lambda: &Complex,
    ctx: &PrecisionContext,
) -> Result<LogMagnitude> {
    ctx.validate()?;
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let bits = ctx.bits();
    if let Kernel::BlockDiagonal { parts, .. } = op.kernel() {
        let norms = parts
            .par_iter()
            .map(|p| resolvent_norm(p, lambda, ctx))
            .collect::<Result<Vec<_>>>()?;
        let mut best = norms[0].clone();
        for n in norms.into_iter().skip(1) {
            if n > best {
                best = n;
            }
        }
        return Ok(best);
    }
    let lam = with_bits(lambda, bits);
    if op.dim() == 1 {
        let m = lam.abs().with_precision(bits + GUARD_BITS);
        return Ok(LogMagnitude::from_log(-m.ln()));
    }
    let mu = lam.recip();
    let mu_adj = lam.conj().recip();
    let first = ctx.max_power_iterations.div_ceil(2);
    let second = ctx.max_power_iterations - first;
    let mut best = Real::zero(bits + GUARD_BITS);
    for (attempt, budget) in [(0u64, first), (1, second)] {
        if budget == 0 {
            continue;
        }
        let seed = ctx.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let start = random_unit(op.dim(), seed, bits);
        match power_iteration(op, &mu, &mu_adj, start, budget, ctx.power_iteration_tol, bits)? {
            PowerOutcome::Converged(l) => return Ok(LogMagnitude::from_log(l)),
            PowerOutcome::Stalled(l) => {
                best = if attempt == 0 { l } else { best.max(&l) };
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: ctx.max_power_iterations,
        last_log_norm: best.to_f64(),
    })
}

/// [`resolvent_norm`] for an operator given by spec.
pub fn resolvent_norm_spec(
    spec: &OperatorSpec,
    lambda: &Complex,
    ctx: &PrecisionContext,
) -> Result<LogMagnitude> {
    let op = crate::operators::materialize(spec, ctx.bits())?;
    resolvent_norm(&op, lambda, ctx)
}

/// Closed-form sandwich for the weighted shift at `z = 1/t`:
/// `√6/(πr)·(e^{rt} − 1) ≤ ‖(1/t − rA)^{-1}‖ ≤ t·e^{rt}`.
pub fn shift_norm_bounds(r: f64, t: f64, bits: usize) -> Result<(LogMagnitude, LogMagnitude)> {
    if !(r > 0.0 && r.is_finite() && t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "shift bounds need r > 0 and t > 0, got r = {r}, t = {t}"
        )));
    }
    let wide = bits + GUARD_BITS;
    let r = Real::from_f64(r, wide);
    let t = Real::from_f64(t, wide);
    let rt = &r * &t;
    // ln(e^{rt} − 1) = rt + ln(1 − e^{−rt})
    let tail = (-&(-&rt).exp_m1()).ln();
    let c = &Real::from_f64(6.0, wide).sqrt() / &(&Real::pi(wide) * &r);
    let lower = &(&c.ln() + &rt) + &tail;
    let upper = &t.ln() + &rt;
    Ok((LogMagnitude::from_log(lower), LogMagnitude::from_log(upper)))
}

/// `|λ|`, valid as a substitute for `λ` in norm computations on weighted
/// shifts and direct sums of them (their resolvent norm depends on `|λ|`
/// only, by conjugation with the diagonal unitary `e_n ↦ e^{inθ} e_n`).
pub fn rotation_reduce(spec: &OperatorSpec, lambda: &Complex) -> Result<Real> {
    if !spec.is_weighted_shift_family() {
        return Err(Error::Unsupported(
            "rotation reduction only holds for weighted shifts".into(),
        ));
    }
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    Ok(lambda.abs())
}

/// Upper bound `ln[(1/|λ|) e^{1/|λ|}]` for the Volterra resolvent norm.
pub fn volterra_norm_upper(lambda: &Complex, bits: usize) -> Result<LogMagnitude> {
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let m = lambda.abs().with_precision(bits + GUARD_BITS);
    let log = &(&Real::one(bits + GUARD_BITS) / &m) - &m.ln();
    Ok(LogMagnitude::from_log(log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::materialize;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::from_f64(re, im, 128)
    }

    fn e(n: usize, k: usize) -> Vec<Complex> {
        let mut v = vec![c(0.0, 0.0); n];
        v[k] = c(1.0, 0.0);
        v
    }

    fn scaled_coords(y: &ScaledVector) -> Vec<f64> {
        let m = y.log_scale.ln().exp();
        y.direction.iter().map(|z| z.re.to_f64() * m).collect()
    }

    #[test]
    fn jordan_two_at_one() {
        let t = materialize(&OperatorSpec::jordan(2), 128).unwrap();
        let y = resolvent_apply(&t, &c(1.0, 0.0), &e(2, 0), &ctx()).unwrap();
        let v = scaled_coords(&y);
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        assert!((y.log_norm() - 2f64.sqrt().ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_operator_scalar_resolvent() {
        let t = materialize(&OperatorSpec::scaled(0.0, OperatorSpec::shift(3)), 128).unwrap();
        let y = resolvent_apply(&t, &c(0.0, 0.5), &e(3, 0), &ctx()).unwrap();
        // e_0 / (0.5i) = −2i e_0
        let (re, im) = y.direction[0].to_f64();
        assert!(re.abs() < 1e-30 && (im + 1.0).abs() < 1e-30);
        assert!((y.log_norm() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn shift_resolvent_has_factorial_coefficients() {
        let a = materialize(&OperatorSpec::shift(6), 128).unwrap();
        let y = resolvent_apply(&a, &c(1.0, 0.0), &e(6, 0), &ctx()).unwrap();
        let v = scaled_coords(&y);
        for (k, want) in [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0].iter().enumerate() {
            assert!((v[k] - want).abs() < 1e-14, "coefficient {k}: {}", v[k]);
        }
    }

    #[test]
    fn renormalization_keeps_huge_resolvents_finite() {
        // J_60 at λ = 1e-3: ‖R e_0‖ ≈ 1e180 per step, far past 2^512 overall
        let j = materialize(&OperatorSpec::jordan(60), 128).unwrap();
        let y = resolvent_apply(&j, &c(1e-3, 0.0), &e(60, 0), &ctx()).unwrap();
        let want = 60.0 * 1e3f64.ln();
        assert!((y.log_norm() - want).abs() < 1e-6, "{}", y.log_norm());
        let n2: f64 = y.direction.iter().map(|z| z.norm_sqr().to_f64()).sum();
        assert!((n2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_lambda_and_vector() {
        let j = materialize(&OperatorSpec::jordan(2), 128).unwrap();
        assert!(matches!(
            resolvent_apply(&j, &c(0.0, 0.0), &e(2, 0), &ctx()),
            Err(Error::ZeroLambda)
        ));
        assert!(matches!(
            resolvent_apply(&j, &c(1.0, 0.0), &[c(0.0, 0.0), c(0.0, 0.0)], &ctx()),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(
            resolvent_norm(&j, &c(0.0, 0.0), &ctx()),
            Err(Error::ZeroLambda)
        ));
    }

    #[test]
    fn residual_is_small() {
        let spec = OperatorSpec::DirectSum {
            parts: vec![
                OperatorSpec::scaled(0.7, OperatorSpec::shift(20)),
                crate::operators::volterra_matrix(9).unwrap(),
                OperatorSpec::VolterraGrid {
                    grid_size: 11,
                    rule: Default::default(),
                },
            ],
        };
        let t = materialize(&spec, 128).unwrap();
        let lam = c(0.03, -0.02);
        let x: Vec<Complex> = (0..t.dim()).map(|k| c((k % 5) as f64 - 2.0, 1.0)).collect();
        let y = resolvent_apply(&t, &lam, &x, &ctx()).unwrap();
        let m = y.log_scale.to_real(128);
        let yv: Vec<Complex> = y.direction.iter().map(|z| z.scale(&m)).collect();
        let ty = t.apply(&yv);
        let mut res = Real::zero(128);
        for i in 0..t.dim() {
            let r = &(&(&lam * &yv[i]) - &ty[i]) - &x[i];
            res = &res + &r.norm_sqr();
        }
        let xn = euclidean_norm(&x, 128);
        assert!((&res.sqrt() / &xn).to_f64() < 1e-25);

        let z = resolvent_apply_adjoint(&t, &lam, &x, &ctx()).unwrap();
        let m = z.log_scale.to_real(128);
        let zv: Vec<Complex> = z.direction.iter().map(|w| w.scale(&m)).collect();
        let tz = t.apply_adjoint(&zv);
        let mut res = Real::zero(128);
        for i in 0..t.dim() {
            let r = &(&(&lam.conj() * &zv[i]) - &tz[i]) - &x[i];
            res = &res + &r.norm_sqr();
        }
        assert!((&res.sqrt() / &xn).to_f64() < 1e-25);
    }

    #[test]
    fn dim_one_norm_is_exact() {
        let t = materialize(&OperatorSpec::shift(1), 128).unwrap();
        let n = resolvent_norm(&t, &c(0.25, 0.0), &ctx()).unwrap();
        assert!((n.ln() - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn jordan_three_norm_matches_explicit_inverse() {
        // (λ−J)^{-1} has entries λ^{-1}, λ^{-2}, λ^{-3} on successive diagonals;
        // largest singular value computed from the explicit 3×3 matrix.
        let lam: f64 = 1e-2;
        let m = [
            [1.0 / lam, 0.0, 0.0],
            [lam.powi(-2), 1.0 / lam, 0.0],
            [lam.powi(-3), lam.powi(-2), 1.0 / lam],
        ];
        let want = largest_singular_value(&m).ln();
        let j = materialize(&OperatorSpec::jordan(3), 128).unwrap();
        let got = resolvent_norm(&j, &c(lam, 0.0), &ctx()).unwrap().ln();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        assert!((got - 3.0 * 100f64.ln()).abs() < 1.0);
    }

    /// Power iteration on `MᵀM` in plain f64, as an independent check.
    fn largest_singular_value(m: &[[f64; 3]; 3]) -> f64 {
        let mut v = [1.0, 0.7, 0.3];
        let mut s = 0.0;
        for _ in 0..500 {
            let mut w = [0.0; 3];
            for i in 0..3 {
                for j in 0..3 {
                    w[i] += m[i][j] * v[j];
                }
            }
            let mut u = [0.0; 3];
            for i in 0..3 {
                for j in 0..3 {
                    u[j] += m[i][j] * w[i];
                }
            }
            let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            s = (w.iter().map(|x| x * x).sum::<f64>()).sqrt();
            v = [u[0] / nu, u[1] / nu, u[2] / nu];
        }
        s
    }

    #[test]
    fn shift_norm_inside_sandwich() {
        let a = materialize(&OperatorSpec::shift(200), 128).unwrap();
        let n = resolvent_norm(&a, &c(0.1, 0.0), &ctx()).unwrap().ln();
        let (lo, hi) = shift_norm_bounds(1.0, 10.0, 128).unwrap();
        assert!(lo.ln() <= n && n <= hi.ln(), "{} <= {n} <= {}", lo.ln(), hi.ln());
    }

    #[test]
    fn shift_bounds_closed_forms() {
        let (lo, hi) = shift_norm_bounds(1.0, 1.0, 128).unwrap();
        let c0 = 6f64.sqrt() / std::f64::consts::PI;
        assert!((lo.ln() - (c0 * (1f64.exp() - 1.0)).ln()).abs() < 1e-14);
        assert!((lo.ln() - 1.33967f64.ln()).abs() < 1e-4);
        assert!((hi.ln() - 1.0).abs() < 1e-15);

        let (lo, hi) = shift_norm_bounds(1.0, 10.0, 128).unwrap();
        assert!((lo.ln() - 17172.6f64.ln()).abs() < 1e-4);
        assert!((hi.ln() - (10f64.ln() + 10.0)).abs() < 1e-14);

        let (lo, hi) = shift_norm_bounds(2.0, 0.5, 128).unwrap();
        let want = (6f64.sqrt() / (2.0 * std::f64::consts::PI) * (1f64.exp() - 1.0)).ln();
        assert!((lo.ln() - want).abs() < 1e-14);
        assert!((hi.ln() - (0.5 * 1f64.exp()).ln()).abs() < 1e-15);

        let (lo, hi) = shift_norm_bounds(1.0, 1e6, 128).unwrap();
        assert!((hi.ln() - (1e6 + 1e6f64.ln())).abs() < 1e-6);
        assert!(lo.ln() < hi.ln());
        assert!(shift_norm_bounds(0.0, 1.0, 128).is_err());
        assert!(shift_norm_bounds(1.0, -1.0, 128).is_err());
    }

    #[test]
    fn rotation_reduce_returns_modulus() {
        let spec = OperatorSpec::shift(10);
        let r = |re, im| rotation_reduce(&spec, &c(re, im)).unwrap().to_f64();
        assert!((r(0.0, 0.1) - 0.1).abs() < 1e-17);
        assert_eq!(r(-0.3, 0.0), 0.3);
        assert_eq!(r(0.05, 0.0), 0.05);
        let v = crate::operators::volterra_matrix(5).unwrap();
        assert!(rotation_reduce(&v, &c(0.1, 0.0)).is_err());
    }

    #[test]
    fn volterra_upper_values() {
        let u = |x: f64| volterra_norm_upper(&c(x, 0.0), 128).unwrap().ln();
        assert!((u(1.0) - 1.0).abs() < 1e-15);
        assert!((u(0.5) - (2.0 + 2f64.ln())).abs() < 1e-15);
        assert!((u(1e-3) - (1000.0 + 1000f64.ln())).abs() < 1e-12);
        assert!(volterra_norm_upper(&c(0.0, 0.0), 128).is_err());
    }
}
