//! Estimating `k_x` from samples of the two log-norms along a radial path.
//!
//! Both `ln‖(λ−T)^{-1}x‖` and `ln‖(λ−T)^{-1}‖` diverge as `λ → 0`, so the
//! least-squares slope of one against the other over the tail of the grid
//! cancels additive constants and converges much faster than the raw ratio.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Complex, LogMagnitude, PrecisionContext, Real};
use crate::operators::{materialize, Operator, OperatorSpec, VectorSpec};
use crate::resolvent::{resolvent_apply, resolvent_norm, rotation_reduce};

/// Samples whose resolvent log-norm exceeds this are not taken.
pub const LOG_NORM_CEILING: f64 = 1e7;

/// Minimum number of samples accepted by [`estimate_k`].
pub const MIN_SAMPLES: usize = 6;

/// Points `λ_j = lambda_max · ratio^j · e^{iθ}`, `j = 0..count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaGrid {
    pub lambda_max: f64,
    pub ratio: f64,
    pub count: usize,
    pub theta: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid {
            lambda_max: 0.5,
            ratio: 0.8,
            count: 40,
            theta: 0.0,
        }
    }
}

impl LambdaGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid lambda_max must be positive, got {}",
                self.lambda_max
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "grid ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.count == 0 {
            return Err(Error::InvalidArgument("grid count must be positive".into()));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidArgument("grid theta must be finite".into()));
        }
        if self.modulus(self.count - 1) == 0.0 {
            return Err(Error::InvalidArgument(
                "grid reaches |λ| = 0 in machine precision".into(),
            ));
        }
        Ok(())
    }

    /// Grid whose last point is the first one at or below `lambda_min`.
    pub fn down_to(lambda_max: f64, ratio: f64, lambda_min: f64) -> Self {
        let steps = ((lambda_min / lambda_max).ln() / ratio.ln()).ceil().max(0.0) as usize;
        LambdaGrid {
            lambda_max,
            ratio,
            count: steps + 1,
            theta: 0.0,
        }
    }

    pub fn modulus(&self, j: usize) -> f64 {
        self.lambda_max * self.ratio.powi(j as i32)
    }

    pub fn moduli(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.modulus(j)).collect()
    }

    pub fn point(&self, j: usize, bits: usize) -> Complex {
        Complex::from_polar(self.modulus(j), self.theta, bits)
    }
}

/// One grid point of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub lambda_modulus: f64,
    pub theta: f64,
    pub log_norm_resolvent: f64,
    pub log_norm_resolvent_x: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCurve {
    pub samples: Vec<Sample>,
    /// The grid was cut short by the log-norm ceiling or a power-iteration
    /// failure.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub slope: f64,
    pub slope_stderr: f64,
    pub ratio_tail_max: f64,
    pub tail_len: usize,
    pub truncated: bool,
    pub samples: Vec<Sample>,
}

struct PointValues {
    log_norm: LogMagnitude,
    log_norm_x: Vec<LogMagnitude>,
}

enum PointOutcome {
    Ok(PointValues),
    Floor,
}

fn unit_vector(spec: &OperatorSpec, x: &VectorSpec, bits: usize) -> Result<Vec<Complex>> {
    let v = x.materialize(spec, bits)?;
    let mut s = Real::zero(bits);
    for z in &v {
        s = &s + &z.norm_sqr();
    }
    let inv = &Real::one(bits) / &s.sqrt();
    Ok(v.iter().map(|z| z.scale(&inv)).collect())
}

fn norm_at(
    spec: &OperatorSpec,
    op: &Operator,
    lambda: &Complex,
    ctx: &PrecisionContext,
) -> Result<LogMagnitude> {
    match rotation_reduce(spec, lambda) {
        Ok(m) => resolvent_norm(op, &Complex::from_real(m), ctx),
        Err(Error::Unsupported(_)) => resolvent_norm(op, lambda, ctx),
        Err(e) => Err(e),
    }
}

fn evaluate_point(
    spec: &OperatorSpec,
    op: &Operator,
    xs: &[Vec<Complex>],
    lambda: &Complex,
    ctx: &PrecisionContext,
) -> Result<PointOutcome> {
    let mut log_norm = match norm_at(spec, op, lambda, ctx) {
        Ok(n) => n,
        Err(Error::NonConvergence { .. }) => return Ok(PointOutcome::Floor),
        Err(e) => return Err(e),
    };
    let mut log_norm_x = Vec::with_capacity(xs.len());
    for x in xs {
        let y = resolvent_apply(op, lambda, x, ctx)?;
        // ‖Rx‖ ≤ ‖R‖ for unit x, and both are lower bounds of the true norm
        if y.log_scale > log_norm {
            log_norm = y.log_scale.clone();
        }
        log_norm_x.push(y.log_scale);
    }
    if log_norm.ln() > LOG_NORM_CEILING {
        return Ok(PointOutcome::Floor);
    }
    Ok(PointOutcome::Ok(PointValues {
        log_norm,
        log_norm_x,
    }))
}

fn ratio_of(num: &LogMagnitude, den: &LogMagnitude) -> f64 {
    match (num.log_value(), den.log_value()) {
        (Some(a), Some(b)) if !b.is_zero() => (a / b).to_f64(),
        _ => f64::NAN,
    }
}

/// Samples for several vectors against one operator; the resolvent norm is
/// computed once per grid point.
pub fn sample_curves(
    spec: &OperatorSpec,
    xs: &[VectorSpec],
    grid: &LambdaGrid,
    ctx: &PrecisionContext,
) -> Result<Vec<SampleCurve>> {
    ctx.validate()?;
    grid.validate()?;
    let bits = ctx.bits();
    let op = materialize(spec, bits)?;
    let units = xs
        .iter()
        .map(|x| unit_vector(spec, x, bits))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = (0..grid.count)
        .into_par_iter()
        .map(|j| {
            let lambda = grid.point(j, bits);
            evaluate_point(spec, &op, &units, &lambda, ctx)
                .map_err(|e| e.at_lambda(grid.modulus(j), grid.theta))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curves = vec![
        SampleCurve {
            samples: Vec::new(),
            truncated: false,
        };
        xs.len()
    ];
    for (j, outcome) in outcomes.into_iter().enumerate() {
        let values = match outcome {
            PointOutcome::Ok(v) => v,
            PointOutcome::Floor => {
                for c in &mut curves {
                    c.truncated = true;
                }
                break;
            }
        };
        for (curve, num) in curves.iter_mut().zip(&values.log_norm_x) {
            curve.samples.push(Sample {
                lambda_modulus: grid.modulus(j),
                theta: grid.theta,
                log_norm_resolvent: values.log_norm.ln(),
                log_norm_resolvent_x: num.ln(),
                ratio: ratio_of(num, &values.log_norm),
            });
        }
    }
    Ok(curves)
}

/// `(ln‖(λ−T)^{-1}‖, ln‖(λ−T)^{-1}x̂‖)` along the grid, with `x̂ = x/‖x‖`.
pub fn sample_curve(
    spec: &OperatorSpec,
    x: &VectorSpec,
    grid: &LambdaGrid,
    ctx: &PrecisionContext,
) -> Result<SampleCurve> {
    let mut curves = sample_curves(spec, std::slice::from_ref(x), grid, ctx)?;
    Ok(curves.pop().expect("one curve per vector"))
}

/// Samples of a numerator against another operator's resolvent norm.
///
/// The numerator is `ln‖(λ−N)^{-1}x̂‖` when `x` is given and `ln‖(λ−N)^{-1}‖`
/// otherwise; the denominator is always `ln‖(λ−D)^{-1}‖`.
pub fn sample_quotient(
    numerator: &OperatorSpec,
    x: Option<&VectorSpec>,
    denominator: &OperatorSpec,
    grid: &LambdaGrid,
    ctx: &PrecisionContext,
) -> Result<SampleCurve> {
    ctx.validate()?;
    grid.validate()?;
    let bits = ctx.bits();
    let num_op = materialize(numerator, bits)?;
    let den_op = materialize(denominator, bits)?;
    let unit = x.map(|x| unit_vector(numerator, x, bits)).transpose()?;
    let outcomes = (0..grid.count)
        .into_par_iter()
        .map(|j| -> Result<Option<(LogMagnitude, LogMagnitude)>> {
            let lambda = grid.point(j, bits);
            let tag = |e: Error| e.at_lambda(grid.modulus(j), grid.theta);
            let den = match norm_at(denominator, &den_op, &lambda, ctx) {
                Ok(d) => d,
                Err(Error::NonConvergence { .. }) => return Ok(None),
                Err(e) => return Err(tag(e)),
            };
            let num = match &unit {
                Some(u) => resolvent_apply(&num_op, &lambda, u, ctx).map(|y| y.log_scale),
                None => norm_at(numerator, &num_op, &lambda, ctx),
            };
            let num = match num {
                Ok(n) => n,
                Err(Error::NonConvergence { .. }) => return Ok(None),
                Err(e) => return Err(tag(e)),
            };
            if den.ln() > LOG_NORM_CEILING || num.ln() > LOG_NORM_CEILING {
                return Ok(None);
            }
            Ok(Some((den, num)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut curve = SampleCurve {
        samples: Vec::new(),
        truncated: false,
    };
    for (j, o) in outcomes.into_iter().enumerate() {
        let Some((den, num)) = o else {
            curve.truncated = true;
            break;
        };
        curve.samples.push(Sample {
            lambda_modulus: grid.modulus(j),
            theta: grid.theta,
            log_norm_resolvent: den.ln(),
            log_norm_resolvent_x: num.ln(),
            ratio: ratio_of(&num, &den),
        });
    }
    Ok(curve)
}

/// Least-squares fit `y = a + b x`; returns `(b, stderr(b))`.
fn regress(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 || !sxx.is_finite() {
        return Err(Error::DegenerateRegression);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if points.len() > 2 {
        let intercept = my - slope * mx;
        let ssr: f64 = points
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (ssr / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, stderr))
}

/// Slope and tail-max ratio over the last third of the samples.
pub fn estimate_k(curve: &SampleCurve) -> Result<KEstimate> {
    let samples = &curve.samples;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let tail_len = samples.len().div_ceil(3);
    let tail = &samples[samples.len() - tail_len..];
    let points: Vec<(f64, f64)> = tail
        .iter()
        .map(|s| (s.log_norm_resolvent, s.log_norm_resolvent_x))
        .collect();
    let (slope, slope_stderr) = regress(&points)?;
    let ratio_tail_max = tail.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max);
    Ok(KEstimate {
        slope,
        slope_stderr,
        ratio_tail_max,
        tail_len,
        truncated: curve.truncated,
        samples: samples.clone(),
    })
}

/// `sup{r_k : k ∈ support}` for `⊕ r_k A` and a vector whose nonzero
/// components sit in the summands listed in `support`.
pub fn k_direct_sum_oracle(rates: &[f64], support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(r) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::InvalidArgument(format!("rate {r} outside [0, 1]")));
    }
    let mut best = f64::NEG_INFINITY;
    for &k in support {
        let r = *rates.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: rates.len(),
        })?;
        best = best.max(r);
    }
    Ok(best)
}

/// Writes samples as CSV with a header row.
pub fn write_samples_csv<W: Write>(samples: &[Sample], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for s in samples {
        out.serialize(s)?;
    }
    out.flush()?;
    Ok(())
}
