use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exponent::LambdaGrid;
use crate::numerics::PrecisionContext;
use crate::operators::{OperatorSpec, VectorSpec};
use crate::synthesis::IntervalSet;
use crate::volterra::SampledFunction;

/// One experiment, as read from `--config`. Every section is optional; the
/// command supplies defaults for the ones it needs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub precision: PrecisionContext,
    pub grid: Option<LambdaGrid>,
    pub operator: Option<OperatorSpec>,
    pub vector: Option<VectorSpec>,
    /// When set, estimate-k regresses against this operator's resolvent norm.
    pub denominator: Option<OperatorSpec>,
    pub bounds: Option<BoundsConfig>,
    pub synthesis: Option<SynthesisConfig>,
    pub volterra: Option<VolterraConfig>,
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichCase {
    pub r: f64,
    pub t: f64,
    pub n: usize,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationCase {
    #[serde(default = "one")]
    pub r: f64,
    pub n: usize,
    pub modulus: f64,
    pub thetas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneCase {
    pub r1: f64,
    pub r2: f64,
    pub z: [f64; 2],
    pub n: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub sandwich: Vec<SandwichCase>,
    pub rotation: Vec<RotationCase>,
    pub monotone: Vec<MonotoneCase>,
    /// Slack on log scale for the sandwich.
    pub sandwich_slack: f64,
    /// Relative agreement required between rotated norms.
    pub rotation_rel_tol: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        let quarter = std::f64::consts::FRAC_PI_4;
        let thetas = vec![0.0, quarter, 2.0 * quarter, 4.0 * quarter];
        BoundsConfig {
            sandwich: [1.0, 5.0, 10.0, 20.0]
                .iter()
                .flat_map(|&t| {
                    [0.0, 2.0 * quarter].map(|theta| SandwichCase {
                        r: 1.0,
                        t,
                        n: (10.0 * t) as usize,
                        theta,
                    })
                })
                .collect(),
            rotation: [0.05, 0.1, 0.5]
                .iter()
                .map(|&modulus| RotationCase {
                    r: 1.0,
                    n: 200,
                    modulus,
                    thetas: thetas.clone(),
                })
                .collect(),
            monotone: vec![MonotoneCase {
                r1: 0.9,
                r2: 0.3,
                z: [0.05, 0.0],
                n: 200,
            }],
            sandwich_slack: 1e-6,
            rotation_rel_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfig {
    pub set: IntervalSet,
    #[serde(default = "default_summands")]
    pub summands: usize,
    #[serde(default = "default_trunc")]
    pub trunc_dim: usize,
    #[serde(default = "default_synth_tol")]
    pub tolerance: f64,
}

fn default_summands() -> usize {
    12
}

fn default_trunc() -> usize {
    300
}

fn default_synth_tol() -> f64 {
    0.03
}

/// Which vector the matrix/closed-form comparison uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolterraVector {
    /// `f_α`, compared with the closed form for `λ < 0`.
    #[default]
    FAlpha,
    /// `g_α = V f_α`, compared with `‖h_{α,λ}‖²`.
    GAlpha,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VolterraConfig {
    pub vector: VolterraVector,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub grid_sizes: Vec<usize>,
    pub max_rel_error: f64,
    /// α values for the closed-form `k_{g_α}` pipeline.
    pub k_alphas: Vec<f64>,
    pub k_tolerance: f64,
    pub witness: Vec<SampledFunction>,
}

impl Default for VolterraConfig {
    fn default() -> Self {
        VolterraConfig {
            vector: VolterraVector::FAlpha,
            alphas: vec![0.0, 0.3, 0.7],
            lambdas: vec![-0.2],
            grid_sizes: vec![500, 1000, 2000],
            max_rel_error: 0.01,
            k_alphas: vec![0.0, 0.25, 0.5, 0.75],
            k_tolerance: 0.03,
            witness: vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// JSON pointer into the experiment config, e.g. `/grid/count`.
    pub pointer: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub command: String,
    pub axes: Vec<SweepAxis>,
}

/// Command-line overrides, applied after the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub bits: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub grid_max: Option<f64>,
    pub grid_ratio: Option<f64>,
    pub grid_count: Option<usize>,
    pub theta: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Applies the precision flags; grid flags are applied by [`Self::grid_or`].
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(b) = o.bits {
            self.precision.mantissa_bits = b;
        }
        if let Some(t) = o.tol {
            self.precision.power_iteration_tol = t;
        }
        if let Some(s) = o.seed {
            self.precision.seed = s;
        }
    }

    /// Grid from the config (or `default`), with flag overrides on top.
    pub fn grid_or(&self, default: LambdaGrid, o: &Overrides) -> LambdaGrid {
        let mut g = self.grid.clone().unwrap_or(default);
        if let Some(v) = o.grid_max {
            g.lambda_max = v;
        }
        if let Some(v) = o.grid_ratio {
            g.ratio = v;
        }
        if let Some(v) = o.grid_count {
            g.count = v;
        }
        if let Some(v) = o.theta {
            g.theta = v;
        }
        g
    }
}

/// Sets `pointer` in `doc`, creating intermediate objects as needed.
pub fn set_pointer(doc: &mut Value, pointer: &str, value: Value) -> Result<()> {
    if pointer.is_empty() {
        *doc = value;
        return Ok(());
    }
    let Some(rest) = pointer.strip_prefix('/') else {
        return Err(Error::InvalidArgument(format!(
            "JSON pointer must start with '/': {pointer}"
        )));
    };
    let mut cur = doc;
    let tokens: Vec<String> = rest
        .split('/')
        .map(|t| t.replace("~1", "/").replace("~0", "~"))
        .collect();
    for (i, tok) in tokens.iter().enumerate() {
        let last = i + 1 == tokens.len();
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(tok.clone(), value);
                    return Ok(());
                }
                map.entry(tok.clone()).or_insert(Value::Null)
            }
            Value::Array(items) => {
                let idx: usize = tok.parse().map_err(|_| {
                    Error::InvalidArgument(format!("bad array index {tok:?} in {pointer}"))
                })?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or(Error::IndexOutOfRange { index: idx, len })?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "cannot descend into a scalar at {pointer}"
                )))
            }
        };
    }
    unreachable!("loop returns on the last token")
}
