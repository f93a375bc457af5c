use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Overrides, VolterraConfig, VolterraVector};
use crate::error::{Error, Result};
use crate::exponent::{
    estimate_k, sample_curve, sample_curves, sample_quotient, write_samples_csv,
    k_direct_sum_oracle, LambdaGrid,
};
use crate::numerics::{Complex, PrecisionContext};
use crate::operators::{embed_summand, Coefficient, OperatorSpec, VectorSpec};
use crate::resolvent::{resolvent_norm_spec, shift_norm_bounds};
use crate::synthesis::{build_theorem_b_operator, extract_sequence, is_right_closed};
use crate::volterra::{
    default_d_candidates, f_alpha_resolvent_norm_sq_neg, h_alpha_norm_sq, k_g_alpha_estimate,
    lemma_fe_witness, matrix_resolvent_norm_sq, SampledFunction,
};

pub const SCHEMA_VERSION: u32 = 1;

/// What a command produced: a JSON report, extra files for `--out`, and
/// whether every check it ran passed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub files: Vec<(String, Vec<u8>)>,
    pub verified: bool,
}

fn ctx_of(cfg: &ExperimentConfig) -> Result<PrecisionContext> {
    cfg.precision.validate()?;
    Ok(cfg.precision.clone())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn csv_bytes(samples: &[crate::exponent::Sample]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_samples_csv(samples, &mut buf)?;
    Ok(buf)
}

pub fn estimate_k_cmd(cfg: &ExperimentConfig, o: &Overrides) -> Result<Outcome> {
    let ctx = ctx_of(cfg)?;
    let op = cfg
        .operator
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("estimate-k needs an \"operator\"".into()))?;
    let grid = cfg.grid_or(LambdaGrid::default(), o);
    let curve = match &cfg.denominator {
        Some(den) => sample_quotient(op, cfg.vector.as_ref(), den, &grid, &ctx)?,
        None => {
            let x = cfg.vector.clone().unwrap_or(VectorSpec::basis(0));
            sample_curve(op, &x, &grid, &ctx)?
        }
    };
    let k = estimate_k(&curve)?;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "estimate-k",
        "slope": k.slope,
        "slope_stderr": k.slope_stderr,
        "ratio_tail_max": k.ratio_tail_max,
        "tail_len": k.tail_len,
        "sample_count": k.samples.len(),
        "flags": { "truncated": k.truncated },
        "grid": to_value(&grid),
    });
    Ok(Outcome {
        report,
        files: vec![("samples.csv".into(), csv_bytes(&k.samples)?)],
        verified: true,
    })
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BoundsRow {
    Sandwich {
        r: f64,
        t: f64,
        n: usize,
        theta: f64,
        log_norm: f64,
        log_lower: f64,
        log_upper: f64,
        pass: bool,
    },
    Rotation {
        r: f64,
        n: usize,
        modulus: f64,
        thetas: Vec<f64>,
        log_norms: Vec<f64>,
        max_rel_diff: f64,
        pass: bool,
    },
    Monotone {
        r1: f64,
        r2: f64,
        z: [f64; 2],
        n: usize,
        log_norm_r1: f64,
        log_norm_r2: f64,
        pass: bool,
    },
}

impl BoundsRow {
    fn pass(&self) -> bool {
        match self {
            BoundsRow::Sandwich { pass, .. }
            | BoundsRow::Rotation { pass, .. }
            | BoundsRow::Monotone { pass, .. } => *pass,
        }
    }
}

fn scaled_shift(r: f64, n: usize) -> OperatorSpec {
    OperatorSpec::scaled(r, OperatorSpec::shift(n))
}

pub fn verify_bounds_cmd(cfg: &ExperimentConfig, _o: &Overrides) -> Result<Outcome> {
    let ctx = ctx_of(cfg)?;
    let bits = ctx.bits();
    let b = cfg.bounds.clone().unwrap_or_default();
    let mut rows = Vec::new();
    for c in &b.sandwich {
        let z = Complex::from_polar(1.0 / c.t, c.theta, bits);
        let v = resolvent_norm_spec(&scaled_shift(c.r, c.n), &z, &ctx)?.ln();
        let (lo, hi) = shift_norm_bounds(c.r, c.t, bits)?;
        let (lo, hi) = (lo.ln(), hi.ln());
        rows.push(BoundsRow::Sandwich {
            r: c.r,
            t: c.t,
            n: c.n,
            theta: c.theta,
            log_norm: v,
            log_lower: lo,
            log_upper: hi,
            pass: lo - b.sandwich_slack <= v && v <= hi + b.sandwich_slack,
        });
    }
    for c in &b.rotation {
        if c.thetas.is_empty() {
            return Err(Error::InvalidArgument("rotation case needs angles".into()));
        }
        let spec = scaled_shift(c.r, c.n);
        let log_norms = c
            .thetas
            .iter()
            .map(|&th| {
                resolvent_norm_spec(&spec, &Complex::from_polar(c.modulus, th, bits), &ctx)
                    .map(|n| n.ln())
            })
            .collect::<Result<Vec<_>>>()?;
        let mut max_rel_diff: f64 = 0.0;
        for a in &log_norms {
            for b in &log_norms {
                max_rel_diff = max_rel_diff.max((a - b).exp_m1().abs());
            }
        }
        rows.push(BoundsRow::Rotation {
            r: c.r,
            n: c.n,
            modulus: c.modulus,
            thetas: c.thetas.clone(),
            log_norms,
            max_rel_diff,
            pass: max_rel_diff <= b.rotation_rel_tol,
        });
    }
    for c in &b.monotone {
        let z = Complex::from_f64(c.z[0], c.z[1], bits);
        let n1 = resolvent_norm_spec(&scaled_shift(c.r1, c.n), &z, &ctx)?.ln();
        let n2 = resolvent_norm_spec(&scaled_shift(c.r2, c.n), &z, &ctx)?.ln();
        // larger scale, larger norm
        let (big, small) = if c.r1 >= c.r2 { (n1, n2) } else { (n2, n1) };
        rows.push(BoundsRow::Monotone {
            r1: c.r1,
            r2: c.r2,
            z: c.z,
            n: c.n,
            log_norm_r1: n1,
            log_norm_r2: n2,
            pass: big >= small - 10.0 * ctx.power_iteration_tol,
        });
    }
    let failed = rows.iter().filter(|r| !r.pass()).count();
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify-bounds",
        "rows": to_value(&rows),
        "failed": failed,
        "pass": failed == 0,
    });
    Ok(Outcome {
        report,
        files: vec![],
        verified: failed == 0,
    })
}

/// Grid for a direct sum of shifts truncated at `n`: stop near `|λ| = 1/(0.8 n)`,
/// before truncation takes over the resolvent growth.
pub fn synthesis_grid(n: usize) -> LambdaGrid {
    LambdaGrid::down_to(0.5, 0.8, 1.0 / (0.8 * n as f64))
}

#[derive(Serialize)]
struct SummandRow {
    index: usize,
    rate: f64,
    slope: f64,
    slope_stderr: f64,
    ratio_tail_max: f64,
    abs_error: f64,
}

pub fn synthesize_cmd(cfg: &ExperimentConfig, o: &Overrides) -> Result<Outcome> {
    let ctx = ctx_of(cfg)?;
    let s = cfg
        .synthesis
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("synthesize needs a \"synthesis\" section".into()))?;
    if !is_right_closed(&s.set)? {
        return Err(Error::NotRightClosed(
            "an interval omits its right endpoint".into(),
        ));
    }
    let rates = extract_sequence(&s.set, s.summands)?;
    let spec = build_theorem_b_operator(&s.set, s.summands, s.trunc_dim)?;
    let grid = cfg.grid_or(synthesis_grid(s.trunc_dim), o);

    let mut vectors = Vec::with_capacity(rates.len() + 1);
    for k in 0..rates.len() {
        vectors.push(embed_summand(&spec, k, &VectorSpec::basis(0))?);
    }
    let dim = spec.dim()?;
    let mut all = vec![Coefficient::Real(0.0); dim];
    for v in &vectors {
        if let VectorSpec::Basis { index } = v {
            all[*index] = Coefficient::Real(1.0);
        }
    }
    vectors.push(VectorSpec::Dense { coefficients: all });

    let curves = sample_curves(&spec, &vectors, &grid, &ctx)?;
    let mut rows = Vec::new();
    for (k, curve) in curves.iter().take(rates.len()).enumerate() {
        let est = estimate_k(curve)?;
        rows.push(SummandRow {
            index: k,
            rate: rates[k],
            slope: est.slope,
            slope_stderr: est.slope_stderr,
            ratio_tail_max: est.ratio_tail_max,
            abs_error: (est.slope - rates[k]).abs(),
        });
    }
    let all_support: Vec<usize> = (0..rates.len()).collect();
    let oracle = k_direct_sum_oracle(&rates, &all_support)?;
    let all_est = estimate_k(curves.last().expect("all-summand curve"))?;
    let all_error = (all_est.slope - oracle).abs();
    let pass = rows.iter().all(|r| r.abs_error <= s.tolerance) && all_error <= s.tolerance;

    let mut summary = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        summary.serialize(r)?;
    }
    let summary = summary
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))?;

    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "synthesize",
        "rates": rates,
        "summands": to_value(&rows),
        "all_summands": {
            "slope": all_est.slope,
            "slope_stderr": all_est.slope_stderr,
            "oracle": oracle,
            "abs_error": all_error,
        },
        "tolerance": s.tolerance,
        "grid": to_value(&grid),
        "pass": pass,
    });
    let mut operator_json = serde_json::to_vec_pretty(&spec)?;
    operator_json.push(b'\n');
    Ok(Outcome {
        report,
        files: vec![
            ("operator.json".into(), operator_json),
            ("summands.csv".into(), summary),
        ],
        verified: pass,
    })
}

#[derive(Serialize)]
struct VolterraRow {
    alpha: f64,
    lambda: f64,
    closed_form_log_norm_sq: f64,
    matrix_log_norm_sq: f64,
    rel_error: f64,
}

fn volterra_rows(v: &VolterraConfig, n: usize, ctx: &PrecisionContext) -> Result<Vec<VolterraRow>> {
    let bits = ctx.bits();
    let mut rows = Vec::new();
    for &alpha in &v.alphas {
        for &lambda in &v.lambdas {
            let z = num_complex::Complex64::new(lambda, 0.0);
            let (f, closed) = match v.vector {
                VolterraVector::FAlpha => (
                    SampledFunction::Characteristic { alpha },
                    f_alpha_resolvent_norm_sq_neg(alpha, lambda, bits)?,
                ),
                VolterraVector::GAlpha => (
                    SampledFunction::VolterraImage { alpha },
                    h_alpha_norm_sq(alpha, z, bits)?,
                ),
            };
            let m = matrix_resolvent_norm_sq(&f, z, n, ctx)?;
            rows.push(VolterraRow {
                alpha,
                lambda,
                closed_form_log_norm_sq: closed.ln(),
                matrix_log_norm_sq: m.ln(),
                rel_error: (m.ln() - closed.ln()).exp_m1().abs(),
            });
        }
    }
    Ok(rows)
}

pub fn volterra_compare_cmd(cfg: &ExperimentConfig, o: &Overrides) -> Result<Outcome> {
    let ctx = ctx_of(cfg)?;
    let v = cfg.volterra.clone().unwrap_or_default();
    let mut files = Vec::new();
    let mut per_n = Vec::new();
    let mut max_rel_error: f64 = 0.0;
    let mut all_rows: Vec<Vec<VolterraRow>> = Vec::new();
    for &n in &v.grid_sizes {
        let rows = volterra_rows(&v, n, &ctx)?;
        let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
        max_rel_error = max_rel_error.max(worst);
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &rows {
            w.serialize(r)?;
        }
        files.push((
            format!("volterra_n{n}.csv"),
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?,
        ));
        per_n.push(json!({ "grid_size": n, "max_rel_error": worst }));
        all_rows.push(rows);
    }
    // error ratios between consecutive grid sizes, per (α, λ)
    let mut halving = Vec::new();
    for (i, pair) in all_rows.windows(2).enumerate() {
        for (a, b) in pair[0].iter().zip(&pair[1]) {
            halving.push(json!({
                "alpha": a.alpha,
                "lambda": a.lambda,
                "from": v.grid_sizes[i],
                "to": v.grid_sizes[i + 1],
                "ratio": b.rel_error / a.rel_error,
            }));
        }
    }
    let grid = cfg.grid_or(LambdaGrid::default(), o);
    let mut k_rows = Vec::new();
    let mut k_pass = true;
    for &alpha in &v.k_alphas {
        let est = k_g_alpha_estimate(alpha, &grid, ctx.bits())?;
        let ok = (est.against_lower.slope - est.oracle).abs() <= v.k_tolerance
            && (est.against_upper.slope - est.oracle).abs() <= v.k_tolerance;
        k_pass &= ok;
        k_rows.push(json!({
            "alpha": alpha,
            "oracle": est.oracle,
            "slope_against_lower": est.against_lower.slope,
            "slope_against_upper": est.against_upper.slope,
            "pass": ok,
        }));
    }
    let mut witnesses = Vec::new();
    for f in &v.witness {
        let entry = match lemma_fe_witness(f, &default_d_candidates(), &grid, ctx.bits()) {
            Ok(w) => json!({ "function": to_value(f), "d": w.d, "u": w.u, "witnesses": w.witnesses }),
            Err(Error::NoWitness) => json!({ "function": to_value(f), "d": null, "witnesses": [] }),
            Err(e) => return Err(e),
        };
        witnesses.push(entry);
    }
    let pass = max_rel_error <= v.max_rel_error && k_pass;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "volterra-compare",
        "vector": to_value(&v.vector),
        "per_grid_size": per_n,
        "max_rel_error": max_rel_error,
        "error_ratios": halving,
        "k_estimates": k_rows,
        "witnesses": witnesses,
        "pass": pass,
    });
    Ok(Outcome {
        report,
        files,
        verified: pass,
    })
}
