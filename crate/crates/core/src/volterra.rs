//! Closed forms for the Volterra operator `(Vf)(t) = ∫₀ᵗ f(s) ds`.
//!
//! With `f_α = 1_{[α,1]}` and `g_α = V f_α`,
//!
//! ```text
//! (λ−V)^{-1} g_α (t) = e^{(t−α)/λ} − 1   for t ≥ α, and 0 before α,
//! ```
//!
//! so `‖(λ−V)^{-1} g_α‖²` has an elementary closed form. These serve as ground
//! truth for the discretized operator and drive the `k_{g_α} = 1 − α` pipeline.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{estimate_k, KEstimate, LambdaGrid, Sample, SampleCurve};
use crate::numerics::{Complex, LogMagnitude, PrecisionContext, Real, GUARD_BITS};
use crate::operators::{materialize, OperatorSpec, VolterraRule};
use crate::resolvent::{resolvent_apply, volterra_norm_upper};

/// Above this value of `Re(z)·u` the integrand leaves machine range.
const MACHINE_EXP_LIMIT: f64 = 700.0;

/// Witnesses required by [`lemma_fe_witness`].
pub const MIN_WITNESSES: usize = 5;

/// A real function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampledFunction {
    Constant { value: f64 },
    /// `f_α`, the indicator of `[α, 1]`.
    Characteristic { alpha: f64 },
    /// `g_α = V f_α`, i.e. `t ↦ max(t − α, 0)`.
    VolterraImage { alpha: f64 },
    /// `Σ c_k t^k`.
    Polynomial { coefficients: Vec<f64> },
    /// Values at `k/(m−1)`, `k = 0..m`, linearly interpolated.
    Grid { values: Vec<f64> },
}

impl SampledFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            SampledFunction::Characteristic { alpha } | SampledFunction::VolterraImage { alpha } => {
                check_alpha(*alpha)
            }
            SampledFunction::Grid { values } if values.len() < 2 => Err(Error::InvalidArgument(
                "grid function needs at least 2 values".into(),
            )),
            SampledFunction::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidArgument("non-finite constant".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SampledFunction::Constant { value } => *value,
            SampledFunction::Characteristic { alpha } => {
                if t >= *alpha {
                    1.0
                } else {
                    0.0
                }
            }
            SampledFunction::VolterraImage { alpha } => (t - alpha).max(0.0),
            SampledFunction::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
            }
            SampledFunction::Grid { values } => {
                let m = values.len() - 1;
                let x = (t.clamp(0.0, 1.0)) * m as f64;
                let k = (x.floor() as usize).min(m - 1);
                let w = x - k as f64;
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }

    /// Points in `(0, 1)` where the function or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            SampledFunction::Characteristic { alpha } | SampledFunction::VolterraImage { alpha } => {
                if *alpha > 0.0 {
                    vec![*alpha]
                } else {
                    vec![]
                }
            }
            SampledFunction::Grid { values } => {
                let m = values.len() - 1;
                (1..m).map(|k| k as f64 / m as f64).collect()
            }
            _ => vec![],
        }
    }

    /// `‖f‖` in `L²[0, 1]`, exact for every variant.
    pub fn l2_norm(&self) -> f64 {
        let sq = match self {
            SampledFunction::Constant { value } => value * value,
            SampledFunction::Characteristic { alpha } => 1.0 - alpha,
            SampledFunction::VolterraImage { alpha } => (1.0 - alpha).powi(3) / 3.0,
            SampledFunction::Polynomial { coefficients } => {
                let mut s = 0.0;
                for (i, a) in coefficients.iter().enumerate() {
                    for (j, b) in coefficients.iter().enumerate() {
                        s += a * b / (i + j + 1) as f64;
                    }
                }
                s
            }
            SampledFunction::Grid { values } => {
                let h = 1.0 / (values.len() - 1) as f64;
                values
                    .windows(2)
                    .map(|w| h * (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0)
                    .sum()
            }
        };
        sq.max(0.0).sqrt()
    }

    /// Values at the grid points `t_i = i/n`, `i = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("α must lie in [0, 1), got {alpha}")))
    }
}

/// Composite Gauss–Legendre rule: `panels` panels of `degree` nodes each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub panels: usize,
    pub degree: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            panels: 32,
            degree: 16,
        }
    }
}

fn legendre_pairs(degree: usize) -> Vec<(f64, f64)> {
    static DEFAULT: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let build = |d: usize| {
        GaussLegendre::new(NonZeroUsize::new(d).expect("degree is positive"))
            .as_node_weight_pairs()
            .to_vec()
    };
    if degree == Quadrature::default().degree {
        DEFAULT.get_or_init(|| build(degree)).clone()
    } else {
        build(degree)
    }
}

/// Panels of `[a, b]` split at `breaks`, at least `min_panels` in total and
/// none wider than `max_width`.
fn panels(a: f64, b: f64, breaks: &[f64], min_panels: usize, max_width: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| a < x && x < b));
    cuts.push(b);
    let len = b - a;
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let seg = w[1] - w[0];
        let by_share = (min_panels as f64 * seg / len).ceil();
        let by_width = (seg / max_width).ceil();
        let n = by_share.max(by_width).max(1.0) as usize;
        let h = seg / n as f64;
        for k in 0..n {
            let lo = w[0] + k as f64 * h;
            let hi = if k + 1 == n { w[1] } else { lo + h };
            out.push((lo, hi));
        }
    }
    out
}

/// `Φ_{f,u}(z) = ∫₀ᵘ f(s) e^{(u−s)z} ds` with the default rule.
pub fn phi(f: &SampledFunction, u: f64, z: Complex64, bits: usize) -> Result<Complex> {
    phi_with(f, u, z, Quadrature::default(), bits)
}

pub fn phi_with(
    f: &SampledFunction,
    u: f64,
    z: Complex64,
    rule: Quadrature,
    bits: usize,
) -> Result<Complex> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidArgument(format!("u must lie in (0, 1], got {u}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidArgument("z must be finite".into()));
    }
    f.validate()?;
    let pairs = legendre_pairs(rule.degree);
    // one panel per 2/|z| keeps e^{-sz} resolved on every panel
    let max_width = if z.norm() > 0.0 { 2.0 / z.norm() } else { f64::INFINITY };
    let parts = panels(0.0, u, &f.breakpoints(), rule.panels, max_width);

    if z.re * u <= MACHINE_EXP_LIMIT {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, b) in &parts {
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            for &(x, w) in &pairs {
                let s = c + h * x;
                acc += w * h * f.eval(s) * ((u - s) * z).exp();
            }
        }
        return Ok(Complex::from_f64(acc.re, acc.im, bits));
    }

    // Each panel [a, b] contributes e^{(u−a)z} ∫ f(s) e^{(a−s)z} ds, with the
    // inner integrand bounded by 1 in modulus.
    let zx = Complex::from_f64(z.re, z.im, bits);
    let mut acc = Complex::zero(bits);
    for &(a, b) in &parts {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut inner = Complex64::new(0.0, 0.0);
        for &(x, w) in &pairs {
            let s = c + h * x;
            inner += w * h * f.eval(s) * ((a - s) * z).exp();
        }
        if inner == Complex64::new(0.0, 0.0) {
            continue;
        }
        let factor = zx.scale(&Real::from_f64(u - a, bits)).exp();
        acc = &acc + &(&factor * &Complex::from_f64(inner.re, inner.im, bits));
    }
    Ok(acc)
}

/// `(λ−V)^{-1} V f (t) = (1/λ) ∫₀ᵗ e^{(t−s)/λ} f(s) ds = Φ_{f,t}(1/λ)/λ`.
pub fn resolvent_vf_pointwise(
    f: &SampledFunction,
    lambda: Complex64,
    t: f64,
    bits: usize,
) -> Result<Complex> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroLambda);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t must lie in [0, 1], got {t}")));
    }
    if t == 0.0 {
        return Ok(Complex::zero(bits));
    }
    let p = phi(f, t, lambda.inv(), bits)?;
    Ok(&p / &Complex::from_f64(lambda.re, lambda.im, bits))
}

/// `e^z − 1` without cancellation for small `|z|`.
fn complex_exp_m1(z: &Complex) -> Complex {
    let half = z.im.mul_pow2(-1).sin();
    let cos_m1 = -&(&half * &half).mul_pow2(1);
    let em1 = z.re.exp_m1();
    let ex = &em1 + &Real::one(z.precision());
    Complex::new(&(&em1 * &z.im.cos()) + &cos_m1, &ex * &z.im.sin())
}

/// `‖(λ−V)^{-1} V f_α‖² = ∫₀ᵇ |e^{s/λ} − 1|² ds`, `b = 1 − α`.
///
/// With `1/λ = a + ic` this is
/// `(e^{2ab} − 1)/(2a) − 2 Re[λ(e^{b/λ} − 1)] + b`. For `a = 0` the first term
/// is singular in form and the integral is evaluated by quadrature instead.
pub fn h_alpha_norm_sq(alpha: f64, lambda: Complex64, bits: usize) -> Result<LogMagnitude> {
    check_alpha(alpha)?;
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroLambda);
    }
    let wide = bits + GUARD_BITS;
    let b = Real::from_f64(1.0 - alpha, wide);
    let lam = Complex::from_f64(lambda.re, lambda.im, wide);
    let w = lam.recip();
    if w.re.is_zero() {
        return Ok(LogMagnitude::from_real(&Real::from_f64(
            h_alpha_quadrature(alpha, lambda),
            wide,
        )));
    }
    let two_ab = (&w.re * &b).mul_pow2(1);
    let first = &two_ab.exp_m1() / &w.re.mul_pow2(1);
    let middle = (&lam * &complex_exp_m1(&w.scale(&b))).re.mul_pow2(1);
    let value = &(&first - &middle) + &b;
    if !value.is_positive() {
        // cancellation wiped out every digit; fall back to quadrature
        return Ok(LogMagnitude::from_real(&Real::from_f64(
            h_alpha_quadrature(alpha, lambda),
            wide,
        )));
    }
    Ok(LogMagnitude::from_real(&value))
}

/// `∫₀ᵇ |e^{s/λ} − 1|² ds` by composite Gauss–Legendre in machine precision.
pub fn h_alpha_quadrature(alpha: f64, lambda: Complex64) -> f64 {
    let b = 1.0 - alpha;
    let w = lambda.inv();
    let rule = Quadrature::default();
    let pairs = legendre_pairs(rule.degree);
    let max_width = 2.0 / w.norm().max(1e-300);
    let mut acc = 0.0;
    for (lo, hi) in panels(0.0, b, &[], rule.panels, max_width) {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for &(x, wt) in &pairs {
            let s = c + h * x;
            acc += wt * h * ((s * w).exp() - 1.0).norm_sqr();
        }
    }
    acc
}

/// `‖(λ−V)^{-1} f_α‖² = (1/(−2λ))[1 − e^{2(1−α)/λ}]` for real `λ < 0`.
pub fn f_alpha_resolvent_norm_sq_neg(alpha: f64, lambda: f64, bits: usize) -> Result<LogMagnitude> {
    check_alpha(alpha)?;
    if !(lambda < 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "this closed form needs real λ < 0, got {lambda}"
        )));
    }
    let wide = bits + GUARD_BITS;
    let lam = Real::from_f64(lambda, wide);
    let b = Real::from_f64(1.0 - alpha, wide);
    let e = (&b / &lam).mul_pow2(1).exp_m1();
    let value = &(-&e) / &(-&lam).mul_pow2(1);
    Ok(LogMagnitude::from_real(&value))
}

/// `k_{g_α} = 1 − α`.
pub fn k_g_alpha_oracle(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(1.0 - alpha)
}

/// `‖g_α‖ = √((1−α)³/3)`.
pub fn g_alpha_norm(alpha: f64) -> f64 {
    ((1.0 - alpha).powi(3) / 3.0).sqrt()
}

/// Slope estimates of `k_{g_α}` from the closed forms along `λ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GAlphaEstimate {
    pub alpha: f64,
    pub oracle: f64,
    /// Denominator `ln‖(λ−V)^{-1} ĝ_0‖`, a lower bound for `ln‖(λ−V)^{-1}‖`.
    pub against_lower: KEstimate,
    /// Denominator `1/λ − ln λ`, an upper bound for `ln‖(λ−V)^{-1}‖`.
    pub against_upper: KEstimate,
}

/// Runs the closed-form pipeline on the moduli of `grid` (taken as real
/// positive `λ`).
pub fn k_g_alpha_estimate(alpha: f64, grid: &LambdaGrid, bits: usize) -> Result<GAlphaEstimate> {
    let oracle = k_g_alpha_oracle(alpha)?;
    grid.validate()?;
    let ln_g = g_alpha_norm(alpha).ln();
    let ln_g0 = g_alpha_norm(0.0).ln();
    let mut lower = Vec::with_capacity(grid.count);
    let mut upper = Vec::with_capacity(grid.count);
    for lam in grid.moduli() {
        let z = Complex64::new(lam, 0.0);
        let num = 0.5 * h_alpha_norm_sq(alpha, z, bits)?.ln() - ln_g;
        let lo = 0.5 * h_alpha_norm_sq(0.0, z, bits)?.ln() - ln_g0;
        let hi = volterra_norm_upper(&Complex::from_f64(lam, 0.0, bits), bits)?.ln();
        for (den, out) in [(lo, &mut lower), (hi, &mut upper)] {
            out.push(Sample {
                lambda_modulus: lam,
                theta: 0.0,
                log_norm_resolvent: den,
                log_norm_resolvent_x: num,
                ratio: num / den,
            });
        }
    }
    let fit = |samples| {
        estimate_k(&SampleCurve {
            samples,
            truncated: false,
        })
    };
    Ok(GAlphaEstimate {
        alpha,
        oracle,
        against_lower: fit(lower)?,
        against_upper: fit(upper)?,
    })
}

/// Result of [`lemma_fe_witness`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeWitness {
    pub d: f64,
    pub u: f64,
    /// Grid values of `λ` at which the bound beats `e^{d/λ}`, decreasing.
    pub witnesses: Vec<f64>,
}

/// Largest `d` among `d_candidates` for which
/// `(|Φ_{f,u}(1/λ)| − ‖f‖)/√u > e^{d/λ}` holds at at least
/// [`MIN_WITNESSES`] grid points, the smallest grid `λ` among them.
///
/// The left side bounds `‖(λ−V)^{-1}Vf‖ ≤ ‖(λ−V)^{-1}f‖` from below; `u` is
/// the rightmost point of a 1/1024 mesh where `f` is nonzero.
pub fn lemma_fe_witness(
    f: &SampledFunction,
    d_candidates: &[f64],
    grid: &LambdaGrid,
    bits: usize,
) -> Result<FeWitness> {
    f.validate()?;
    grid.validate()?;
    let u = (0..=1024)
        .rev()
        .map(|k| k as f64 / 1024.0)
        .find(|&t| t > 0.0 && f.eval(t) != 0.0)
        .ok_or_else(|| Error::InvalidArgument("f must be nonzero".into()))?;
    let norm_f = Real::from_f64(f.l2_norm(), bits);
    let ln_sqrt_u = 0.5 * u.ln();
    // ln of the lower bound at each grid point, or None when it is not positive
    let bounds = grid
        .moduli()
        .into_iter()
        .map(|lam| -> Result<(f64, Option<f64>)> {
            let p = phi(f, u, Complex64::new(1.0 / lam, 0.0), bits)?;
            let excess = &p.abs() - &norm_f;
            let lb = if excess.is_positive() {
                Some(excess.with_precision(bits + GUARD_BITS).ln().to_f64() - ln_sqrt_u)
            } else {
                None
            };
            Ok((lam, lb))
        })
        .collect::<Result<Vec<_>>>()?;
    let smallest = grid.modulus(grid.count - 1);
    let mut candidates: Vec<f64> = d_candidates.iter().copied().filter(|d| *d > 0.0).collect();
    candidates.sort_by(|a, b| b.total_cmp(a));
    for d in candidates {
        let witnesses: Vec<f64> = bounds
            .iter()
            .filter(|(lam, lb)| matches!(lb, Some(v) if *v > d / lam))
            .map(|(lam, _)| *lam)
            .collect();
        if witnesses.len() >= MIN_WITNESSES && witnesses.last() == Some(&smallest) {
            return Ok(FeWitness { d, u, witnesses });
        }
    }
    Err(Error::NoWitness)
}

/// Default candidates `0.05, 0.10, …, 0.95`.
pub fn default_d_candidates() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// `‖(λ−V_N)^{-1} f‖²` for the left-endpoint discretization on `t_i = i/N`,
/// with the discrete norm `Σ|y_i|²/N`.
pub fn matrix_resolvent_norm_sq(
    f: &SampledFunction,
    lambda: Complex64,
    grid_size: usize,
    ctx: &PrecisionContext,
) -> Result<LogMagnitude> {
    f.validate()?;
    let bits = ctx.bits();
    let spec = OperatorSpec::VolterraGrid {
        grid_size,
        rule: VolterraRule::LeftEndpoint,
    };
    let op = materialize(&spec, bits)?;
    let x: Vec<Complex> = f
        .sample(grid_size)
        .into_iter()
        .map(|v| Complex::from_f64(v, 0.0, bits))
        .collect();
    let y = resolvent_apply(&op, &Complex::from_f64(lambda.re, lambda.im, bits), &x, ctx)?;
    let ln_n = Real::from_f64(grid_size as f64, bits + GUARD_BITS).ln();
    let two_log = y.log_scale.square();
    let log = two_log.log_value().expect("nonzero") - &ln_n;
    Ok(LogMagnitude::from_log(log))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: usize = 128;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn phi_elementary_values() {
        let one = SampledFunction::Constant { value: 1.0 };
        let p = phi(&one, 1.0, c(0.0), BITS).unwrap().to_f64();
        assert!((p.0 - 1.0).abs() < 1e-14 && p.1 == 0.0);
        let p = phi(&one, 1.0, c(1.0), BITS).unwrap().to_f64();
        assert!((p.0 - (std::f64::consts::E - 1.0)).abs() < 1e-13);
        let s = SampledFunction::Polynomial {
            coefficients: vec![0.0, 1.0],
        };
        let p = phi(&s, 1.0, c(0.0), BITS).unwrap().to_f64();
        assert!((p.0 - 0.5).abs() < 1e-14);
        assert!(phi(&one, 0.0, c(1.0), BITS).is_err());
        assert!(phi(&one, 1.5, c(1.0), BITS).is_err());
    }

    #[test]
    fn phi_large_argument_matches_antiderivative() {
        // ∫₀¹ e^{(1−s)ρ} ds = (e^ρ − 1)/ρ; ρ = 5000 is far outside f64 range
        let one = SampledFunction::Constant { value: 1.0 };
        let rho = 5000.0;
        let p = phi(&one, 1.0, c(rho), BITS).unwrap();
        let ln = p.abs().with_precision(BITS + GUARD_BITS).ln().to_f64();
        let want = rho - rho.ln() + (-(-rho).exp_m1()).ln();
        assert!((ln - want).abs() < 1e-12, "{ln} vs {want}");
        // and at a moderate complex argument
        let z = Complex64::new(3.0, 7.0);
        let p = phi(&one, 1.0, z, BITS).unwrap().to_f64();
        let want = (z.exp() - 1.0) / z;
        assert!((p.0 - want.re).abs() < 1e-12 && (p.1 - want.im).abs() < 1e-12);
    }

    #[test]
    fn pointwise_resolvent_of_characteristic() {
        let f = SampledFunction::Characteristic { alpha: 0.4 };
        let lam = c(0.3);
        assert!(resolvent_vf_pointwise(&f, lam, 0.2, BITS).unwrap().is_zero());
        for t in [0.5, 0.8, 1.0] {
            let got = resolvent_vf_pointwise(&f, lam, t, BITS).unwrap().to_f64().0;
            let want = ((t - 0.4) / 0.3).exp_m1();
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "t = {t}");
        }
        let one = SampledFunction::Constant { value: 1.0 };
        let got = resolvent_vf_pointwise(&one, c(1.0), 1.0, BITS).unwrap().to_f64().0;
        assert!((got - (std::f64::consts::E - 1.0)).abs() < 1e-13);
        assert!(resolvent_vf_pointwise(&one, c(0.0), 1.0, BITS).is_err());
    }

    #[test]
    fn h_alpha_real_values() {
        let e = std::f64::consts::E;
        let want = 0.5 * e * e - 2.0 * e + 2.5;
        let got = h_alpha_norm_sq(0.0, c(1.0), BITS).unwrap().ln();
        assert!((got - want.ln()).abs() < 1e-14);
        assert!((want - 0.757964).abs() < 1e-6);

        // leading behaviour (2/λ)(1−α) + ln(λ/2) as λ → 0⁺
        let lam = 1e-3;
        let got = h_alpha_norm_sq(0.5, c(lam), BITS).unwrap().ln();
        assert!((got - (1.0 / lam + (lam / 2.0).ln())).abs() < 1e-9);
    }

    #[test]
    fn h_alpha_agrees_with_quadrature() {
        for &(alpha, re, im) in &[
            (0.0, 0.7, 0.2),
            (0.3, -0.4, 0.9),
            (0.7, 0.05, -0.5),
            (0.2, 3.0, 0.0),
            (0.5, -2.0, -1.0),
        ] {
            let z = Complex64::new(re, im);
            let closed = h_alpha_norm_sq(alpha, z, BITS).unwrap().ln().exp();
            let quad = h_alpha_quadrature(alpha, z);
            assert!(
                ((closed - quad) / quad).abs() < 1e-11,
                "α = {alpha}, λ = {z}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn h_alpha_imaginary_lambda_falls_back() {
        // ∫₀ᵇ |e^{ics} − 1|² ds = 2b − 2 sin(cb)/c
        let lam = Complex64::new(0.0, 0.25);
        let cc = (1.0 / lam).im;
        let want = 2.0 - 2.0 * cc.sin() / cc;
        let got = h_alpha_norm_sq(0.0, lam, BITS).unwrap().ln().exp();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn h_alpha_bounded_on_left_half_plane() {
        for &(re, im) in &[(-0.01, 0.0), (-1.0, 0.3), (0.0, 0.02), (-1e-4, -1e-3)] {
            for alpha in [0.0, 0.5, 0.9] {
                let v = h_alpha_norm_sq(alpha, Complex64::new(re, im), BITS).unwrap();
                assert!(v.ln() <= 4f64.ln() + 1e-12);
            }
        }
    }

    #[test]
    fn f_alpha_negative_lambda_values() {
        let v = f_alpha_resolvent_norm_sq_neg(0.0, -0.5, BITS).unwrap().ln();
        assert!((v - (1.0 - (-4f64).exp()).ln()).abs() < 1e-15);
        assert!((v - 0.981684f64.ln()).abs() < 1e-6);
        let v = f_alpha_resolvent_norm_sq_neg(0.5, -1.0, BITS).unwrap().ln();
        assert!((v - (0.5 * (1.0 - (-1f64).exp())).ln()).abs() < 1e-15);
        let v = f_alpha_resolvent_norm_sq_neg(0.3, -1e-6, BITS).unwrap().ln();
        assert!((v - (1.0 / 2e-6f64).ln()).abs() < 1e-12);
        assert!(f_alpha_resolvent_norm_sq_neg(0.3, 0.5, BITS).is_err());
    }

    #[test]
    fn oracle_values() {
        assert_eq!(k_g_alpha_oracle(0.0).unwrap(), 1.0);
        assert_eq!(k_g_alpha_oracle(0.25).unwrap(), 0.75);
        assert!(k_g_alpha_oracle(0.999999).unwrap() > 0.0);
        assert!(k_g_alpha_oracle(1.0).is_err());
        assert!(k_g_alpha_oracle(-0.1).is_err());
    }

    #[test]
    fn norms_are_exact() {
        assert!((SampledFunction::VolterraImage { alpha: 0.4 }.l2_norm() - g_alpha_norm(0.4)).abs() < 1e-16);
        let p = SampledFunction::Polynomial {
            coefficients: vec![1.0, 1.0],
        };
        // ∫(1+t)² = 7/3
        assert!((p.l2_norm() - (7.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let g = SampledFunction::Grid {
            values: vec![1.0, 2.0],
        };
        assert!((g.l2_norm() - p.l2_norm()).abs() < 1e-15);
        assert_eq!(g.eval(0.5), 1.5);
    }

    #[test]
    fn witness_for_constant() {
        let one = SampledFunction::Constant { value: 1.0 };
        let w = lemma_fe_witness(&one, &[0.5], &LambdaGrid::default(), BITS).unwrap();
        assert_eq!(w.d, 0.5);
        assert_eq!(w.u, 1.0);
        assert!(w.witnesses.len() >= MIN_WITNESSES);
        let zero = SampledFunction::Constant { value: 0.0 };
        assert!(lemma_fe_witness(&zero, &[0.5], &LambdaGrid::default(), BITS).is_err());
        // no λ on this grid gets close enough to 0 for d = 0.95 with g_0.9
        let g = SampledFunction::VolterraImage { alpha: 0.9 };
        assert!(matches!(
            lemma_fe_witness(&g, &[0.95], &LambdaGrid::default(), BITS),
            Err(Error::NoWitness)
        ));
    }

    #[test]
    fn matrix_norm_close_to_closed_form() {
        let f = SampledFunction::Characteristic { alpha: 0.3 };
        let ctx = PrecisionContext::default();
        let m = matrix_resolvent_norm_sq(&f, c(-0.2), 400, &ctx).unwrap().ln().exp();
        let cf = f_alpha_resolvent_norm_sq_neg(0.3, -0.2, BITS).unwrap().ln().exp();
        assert!(((m - cf) / cf).abs() < 0.02, "{m} vs {cf}");
    }
}
