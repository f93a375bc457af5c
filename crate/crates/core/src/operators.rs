//! Finite-dimensional truncations of quasinilpotent operators.
//!
//! Every operator here is strictly lower triangular in the standard basis
//! `e_0, e_1, …`, hence nilpotent: the finite stand-in for "spectrum `{0}`".
//! An [`OperatorSpec`] is the serializable description; [`Operator`] is the
//! materialized action in extended precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Complex, Real};

/// Quadrature rule used to discretize the Volterra operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolterraRule {
    /// Left-endpoint rectangles on `t_i = i/N`: entry `(i, j) = 1/N` for `j < i`.
    #[default]
    LeftEndpoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// `T e_k = e_{k+1}`, `T e_{n-1} = 0`.
    JordanNilpotent { n: usize },
    /// Weighted shift `A e_{k-1} = (1/k) e_k`, truncated to `trunc_dim`.
    WeightedShiftA { trunc_dim: usize },
    Scaled {
        factor: f64,
        inner: Box<OperatorSpec>,
    },
    DirectSum { parts: Vec<OperatorSpec> },
    VolterraGrid {
        grid_size: usize,
        #[serde(default)]
        rule: VolterraRule,
    },
    /// `bands[d][j]` is the entry at row `j + d + 1`, column `j`.
    ExplicitLowerTriangular { dim: usize, bands: Vec<Vec<f64>> },
}

impl OperatorSpec {
    pub fn jordan(n: usize) -> Self {
        OperatorSpec::JordanNilpotent { n }
    }

    pub fn shift(trunc_dim: usize) -> Self {
        OperatorSpec::WeightedShiftA { trunc_dim }
    }

    pub fn scaled(factor: f64, inner: OperatorSpec) -> Self {
        OperatorSpec::Scaled {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn dim(&self) -> Result<usize> {
        let d = match self {
            OperatorSpec::JordanNilpotent { n } => *n,
            OperatorSpec::WeightedShiftA { trunc_dim } => *trunc_dim,
            OperatorSpec::Scaled { inner, .. } => inner.dim()?,
            OperatorSpec::DirectSum { parts } => {
                if parts.is_empty() {
                    return Err(Error::EmptyDirectSum);
                }
                let mut total = 0;
                for p in parts {
                    total += p.dim()?;
                }
                total
            }
            OperatorSpec::VolterraGrid { grid_size, .. } => *grid_size,
            OperatorSpec::ExplicitLowerTriangular { dim, .. } => *dim,
        };
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(d)
    }

    /// True when the operator is a (direct sum of) truncated weighted shifts,
    /// i.e. every block has nonzero entries on the first subdiagonal only.
    pub fn is_weighted_shift_family(&self) -> bool {
        match self {
            OperatorSpec::JordanNilpotent { .. } | OperatorSpec::WeightedShiftA { .. } => true,
            OperatorSpec::Scaled { inner, .. } => inner.is_weighted_shift_family(),
            OperatorSpec::DirectSum { parts } => {
                !parts.is_empty() && parts.iter().all(|p| p.is_weighted_shift_family())
            }
            OperatorSpec::VolterraGrid { grid_size, .. } => *grid_size <= 2,
            OperatorSpec::ExplicitLowerTriangular { bands, .. } => {
                bands.iter().skip(1).all(|b| b.iter().all(|&x| x == 0.0))
            }
        }
    }
}

/// Left-endpoint discretization of the Volterra operator on `N` grid points.
pub fn volterra_matrix(grid_size: usize) -> Result<OperatorSpec> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "Volterra grid needs at least 2 points, got {grid_size}"
        )));
    }
    let h = 1.0 / grid_size as f64;
    let bands = (1..grid_size).map(|d| vec![h; grid_size - d]).collect();
    Ok(OperatorSpec::ExplicitLowerTriangular {
        dim: grid_size,
        bands,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl Coefficient {
    fn parts(&self) -> (f64, f64) {
        match *self {
            Coefficient::Real(x) => (x, 0.0),
            Coefficient::Complex([re, im]) => (re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSpec {
    Basis { index: usize },
    Dense { coefficients: Vec<Coefficient> },
    /// A vector living in one summand of a direct sum.
    Summand { part: usize, inner: Box<VectorSpec> },
}

impl VectorSpec {
    pub fn basis(index: usize) -> Self {
        VectorSpec::Basis { index }
    }

    pub fn dense_real(values: &[f64]) -> Self {
        VectorSpec::Dense {
            coefficients: values.iter().map(|&x| Coefficient::Real(x)).collect(),
        }
    }

    /// Coordinates against `spec`'s basis. Fails on a dimension mismatch or a
    /// zero vector.
    pub fn materialize(&self, spec: &OperatorSpec, bits: usize) -> Result<Vec<Complex>> {
        let dim = spec.dim()?;
        let v = self.coordinates(spec, dim, bits)?;
        if v.iter().all(Complex::is_zero) {
            return Err(Error::ZeroVector);
        }
        Ok(v)
    }

    fn coordinates(&self, spec: &OperatorSpec, dim: usize, bits: usize) -> Result<Vec<Complex>> {
        match self {
            VectorSpec::Basis { index } => {
                if *index >= dim {
                    return Err(Error::IndexOutOfRange {
                        index: *index,
                        len: dim,
                    });
                }
                let mut v = vec![Complex::zero(bits); dim];
                v[*index] = Complex::one(bits);
                Ok(v)
            }
            VectorSpec::Dense { coefficients } => {
                if coefficients.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: coefficients.len(),
                    });
                }
                Ok(coefficients
                    .iter()
                    .map(|c| {
                        let (re, im) = c.parts();
                        Complex::from_f64(re, im, bits)
                    })
                    .collect())
            }
            VectorSpec::Summand { .. } => {
                let global = embed_summand_any(spec, self)?;
                global.coordinates(spec, dim, bits)
            }
        }
    }
}

/// Embeds a vector of summand `part` into the global coordinates of the
/// direct sum `spec`.
pub fn embed_summand(spec: &OperatorSpec, part: usize, local: &VectorSpec) -> Result<VectorSpec> {
    let parts = match spec {
        OperatorSpec::DirectSum { parts } => parts,
        OperatorSpec::Scaled { inner, .. } => return embed_summand(inner, part, local),
        _ => {
            return Err(Error::Unsupported(
                "summand embedding needs a direct sum".into(),
            ))
        }
    };
    if part >= parts.len() {
        return Err(Error::IndexOutOfRange {
            index: part,
            len: parts.len(),
        });
    }
    let mut offset = 0;
    for p in &parts[..part] {
        offset += p.dim()?;
    }
    let total = spec.dim()?;
    let inner_spec = &parts[part];
    let local = embed_summand_any(inner_spec, local)?;
    match local {
        VectorSpec::Basis { index } => {
            let d = inner_spec.dim()?;
            if index >= d {
                return Err(Error::IndexOutOfRange { index, len: d });
            }
            Ok(VectorSpec::Basis {
                index: offset + index,
            })
        }
        VectorSpec::Dense { coefficients } => {
            let d = inner_spec.dim()?;
            if coefficients.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: coefficients.len(),
                });
            }
            let mut global = vec![Coefficient::Real(0.0); total];
            for (slot, c) in global[offset..offset + d].iter_mut().zip(coefficients) {
                *slot = c;
            }
            Ok(VectorSpec::Dense {
                coefficients: global,
            })
        }
        VectorSpec::Summand { .. } => unreachable!("flattened by embed_summand_any"),
    }
}

/// Resolves nested `Summand` wrappers; other vectors are returned unchanged.
fn embed_summand_any(spec: &OperatorSpec, v: &VectorSpec) -> Result<VectorSpec> {
    match v {
        VectorSpec::Summand { part, inner } => embed_summand(spec, *part, inner),
        other => Ok(other.clone()),
    }
}

/// Structure of a materialized strictly lower-triangular operator.
#[derive(Clone, Debug)]
pub(crate) enum Kernel {
    /// `sub[k]` is the entry `(k, k-1)`; `sub[0]` is unused and zero.
    Bidiagonal { sub: Vec<Real> },
    /// Every entry below the diagonal equals `weight`.
    UniformLower { weight: Real },
    /// `bands[d][j]` is the entry `(j + d + 1, j)`.
    Banded { bands: Vec<Vec<Real>> },
    BlockDiagonal {
        parts: Vec<Operator>,
        offsets: Vec<usize>,
    },
}

/// A materialized operator action on `C^dim`.
#[derive(Clone, Debug)]
pub struct Operator {
    dim: usize,
    pub(crate) kernel: Kernel,
}

/// Builds the extended-precision action of `spec`.
pub fn materialize(spec: &OperatorSpec, bits: usize) -> Result<Operator> {
    let dim = spec.dim()?;
    let kernel = match spec {
        OperatorSpec::JordanNilpotent { n } => {
            let mut sub = vec![Real::one(bits); *n];
            sub[0] = Real::zero(bits);
            Kernel::Bidiagonal { sub }
        }
        OperatorSpec::WeightedShiftA { trunc_dim } => {
            let sub = (0..*trunc_dim)
                .map(|k| {
                    if k == 0 {
                        Real::zero(bits)
                    } else {
                        Real::recip_int(k as u64, bits)
                    }
                })
                .collect();
            Kernel::Bidiagonal { sub }
        }
        OperatorSpec::Scaled { factor, inner } => {
            if !(factor.is_finite() && *factor >= 0.0) {
                return Err(Error::NegativeScale(*factor));
            }
            let inner = materialize(inner, bits)?;
            return Ok(inner.scaled(&Real::from_f64(*factor, bits)));
        }
        OperatorSpec::DirectSum { parts } => {
            let mut ops = Vec::with_capacity(parts.len());
            let mut offsets = Vec::with_capacity(parts.len());
            let mut off = 0;
            for p in parts {
                let op = materialize(p, bits)?;
                offsets.push(off);
                off += op.dim;
                ops.push(op);
            }
            Kernel::BlockDiagonal {
                parts: ops,
                offsets,
            }
        }
        OperatorSpec::VolterraGrid { grid_size, rule } => {
            if *grid_size < 2 {
                return Err(Error::InvalidArgument(format!(
                    "Volterra grid needs at least 2 points, got {grid_size}"
                )));
            }
            match rule {
                VolterraRule::LeftEndpoint => Kernel::UniformLower {
                    weight: Real::recip_int(*grid_size as u64, bits),
                },
            }
        }
        OperatorSpec::ExplicitLowerTriangular { dim, bands } => {
            if bands.len() >= *dim && bands.iter().skip(*dim - 1).any(|b| !b.is_empty()) {
                return Err(Error::InvalidArgument(format!(
                    "a {dim}-dimensional lower-triangular matrix has at most {} subdiagonals",
                    dim - 1
                )));
            }
            let mut out = Vec::with_capacity(bands.len());
            for (d, band) in bands.iter().enumerate().take(dim.saturating_sub(1)) {
                let want = dim - d - 1;
                if band.len() != want {
                    return Err(Error::InvalidArgument(format!(
                        "subdiagonal {} must have {want} entries, got {}",
                        d + 1,
                        band.len()
                    )));
                }
                if band.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite matrix entry".into()));
                }
                out.push(band.iter().map(|&x| Real::from_f64(x, bits)).collect());
            }
            Kernel::Banded { bands: out }
        }
    };
    Ok(Operator { dim, kernel })
}

impl Operator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn scaled(self, r: &Real) -> Operator {
        let kernel = match self.kernel {
            Kernel::Bidiagonal { sub } => Kernel::Bidiagonal {
                sub: sub.iter().map(|w| w * r).collect(),
            },
            Kernel::UniformLower { weight } => Kernel::UniformLower { weight: weight * r },
            Kernel::Banded { bands } => Kernel::Banded {
                bands: bands
                    .iter()
                    .map(|b| b.iter().map(|w| w * r).collect())
                    .collect(),
            },
            Kernel::BlockDiagonal { parts, offsets } => Kernel::BlockDiagonal {
                parts: parts.into_iter().map(|p| p.scaled(r)).collect(),
                offsets,
            },
        };
        Operator {
            dim: self.dim,
            kernel,
        }
    }

    /// `T v`.
    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.dim, "vector length must match the operator");
        let bits = v.first().map(Complex::precision).unwrap_or(64);
        let mut out = vec![Complex::zero(bits); self.dim];
        match &self.kernel {
            Kernel::Bidiagonal { sub } => {
                for k in 1..self.dim {
                    out[k] = v[k - 1].scale(&sub[k]);
                }
            }
            Kernel::UniformLower { weight } => {
                let mut acc = Complex::zero(bits);
                for i in 1..self.dim {
                    acc = &acc + &v[i - 1];
                    out[i] = acc.scale(weight);
                }
            }
            Kernel::Banded { bands } => {
                for (d, band) in bands.iter().enumerate() {
                    for (j, w) in band.iter().enumerate() {
                        if !w.is_zero() {
                            let i = j + d + 1;
                            out[i] = &out[i] + &v[j].scale(w);
                        }
                    }
                }
            }
            Kernel::BlockDiagonal { parts, offsets } => {
                for (p, &off) in parts.iter().zip(offsets) {
                    let y = p.apply(&v[off..off + p.dim]);
                    out[off..off + p.dim].clone_from_slice(&y);
                }
            }
        }
        out
    }

    /// `T* v` (entries are real, so this is the transpose).
    pub fn apply_adjoint(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(v.len(), self.dim, "vector length must match the operator");
        let bits = v.first().map(Complex::precision).unwrap_or(64);
        let mut out = vec![Complex::zero(bits); self.dim];
        match &self.kernel {
            Kernel::Bidiagonal { sub } => {
                for k in 1..self.dim {
                    out[k - 1] = v[k].scale(&sub[k]);
                }
            }
            Kernel::UniformLower { weight } => {
                let mut acc = Complex::zero(bits);
                for i in (0..self.dim - 1).rev() {
                    acc = &acc + &v[i + 1];
                    out[i] = acc.scale(weight);
                }
            }
            Kernel::Banded { bands } => {
                for (d, band) in bands.iter().enumerate() {
                    for (j, w) in band.iter().enumerate() {
                        if !w.is_zero() {
                            out[j] = &out[j] + &v[j + d + 1].scale(w);
                        }
                    }
                }
            }
            Kernel::BlockDiagonal { parts, offsets } => {
                for (p, &off) in parts.iter().zip(offsets) {
                    let y = p.apply_adjoint(&v[off..off + p.dim]);
                    out[off..off + p.dim].clone_from_slice(&y);
                }
            }
        }
        out
    }

    /// Dense copy of the matrix in machine precision, row-major.
    pub fn to_dense_f64(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        self.fill_dense(&mut m, 0);
        m
    }

    fn fill_dense(&self, m: &mut [Vec<f64>], off: usize) {
        match &self.kernel {
            Kernel::Bidiagonal { sub } => {
                for k in 1..self.dim {
                    m[off + k][off + k - 1] = sub[k].to_f64();
                }
            }
            Kernel::UniformLower { weight } => {
                let w = weight.to_f64();
                for i in 0..self.dim {
                    for j in 0..i {
                        m[off + i][off + j] = w;
                    }
                }
            }
            Kernel::Banded { bands } => {
                for (d, band) in bands.iter().enumerate() {
                    for (j, w) in band.iter().enumerate() {
                        m[off + j + d + 1][off + j] = w.to_f64();
                    }
                }
            }
            Kernel::BlockDiagonal { parts, offsets } => {
                for (p, &o) in parts.iter().zip(offsets) {
                    p.fill_dense(m, off + o);
                }
            }
        }
    }

    /// `sqrt(‖T‖₁ ‖T‖_∞)`, an upper bound for the spectral norm.
    pub fn norm_upper_bound(&self) -> f64 {
        let m = self.to_dense_f64();
        let row = m
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let col = (0..self.dim)
            .map(|j| m.iter().map(|r| r[j].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        (row * col).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BITS: usize = 128;

    fn basis(dim: usize, k: usize) -> Vec<Complex> {
        let mut v = vec![Complex::zero(BITS); dim];
        v[k] = Complex::one(BITS);
        v
    }

    fn re(v: &[Complex]) -> Vec<f64> {
        v.iter().map(|c| c.re.to_f64()).collect()
    }

    #[test]
    fn jordan_block_shifts_basis() {
        let t = materialize(&OperatorSpec::jordan(2), BITS).unwrap();
        assert_eq!(re(&t.apply(&basis(2, 0))), vec![0.0, 1.0]);
        assert_eq!(re(&t.apply(&basis(2, 1))), vec![0.0, 0.0]);
    }

    #[test]
    fn weighted_shift_weights() {
        let a = materialize(&OperatorSpec::shift(4), BITS).unwrap();
        assert_eq!(re(&a.apply(&basis(4, 1))), vec![0.0, 0.0, 0.5, 0.0]);
        let y = a.apply(&basis(4, 2));
        assert!((y[3].re.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn zero_scale_gives_zero_operator() {
        let z = materialize(&OperatorSpec::scaled(0.0, OperatorSpec::shift(4)), BITS).unwrap();
        let v: Vec<Complex> = (0..4).map(|k| Complex::from_f64(k as f64 + 1.0, -1.0, BITS)).collect();
        assert!(z.apply(&v).iter().all(Complex::is_zero));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(matches!(
            materialize(&OperatorSpec::jordan(0), BITS),
            Err(Error::ZeroDimension)
        ));
        assert!(matches!(
            materialize(&OperatorSpec::scaled(-1.0, OperatorSpec::shift(3)), BITS),
            Err(Error::NegativeScale(_))
        ));
        assert!(matches!(
            materialize(&OperatorSpec::DirectSum { parts: vec![] }, BITS),
            Err(Error::EmptyDirectSum)
        ));
        let bad = OperatorSpec::ExplicitLowerTriangular {
            dim: 3,
            bands: vec![vec![1.0]],
        };
        assert!(materialize(&bad, BITS).is_err());
    }

    #[test]
    fn volterra_matrix_small_grid() {
        let spec = volterra_matrix(2).unwrap();
        let m = materialize(&spec, BITS).unwrap().to_dense_f64();
        assert_eq!(m, vec![vec![0.0, 0.0], vec![0.5, 0.0]]);
        assert!(volterra_matrix(1).is_err());
    }

    #[test]
    fn volterra_matrix_integrates_constants() {
        let n = 1000;
        let t = materialize(&volterra_matrix(n).unwrap(), 64).unwrap();
        let ones: Vec<Complex> = vec![Complex::one(64); n];
        let vf = t.apply(&ones);
        let sup = (0..n)
            .map(|i| (vf[i].re.to_f64() - i as f64 / n as f64).abs())
            .fold(0.0, f64::max);
        assert!(sup <= 1.0 / n as f64);

        // V²1 = t²/2
        let v2f = t.apply(&vf);
        let sup2 = (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                (v2f[i].re.to_f64() - x * x / 2.0).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup2 <= 1.0 / n as f64, "sup2 = {sup2}");
    }

    #[test]
    fn volterra_grid_kernel_matches_explicit_matrix() {
        let n = 7;
        let fast = materialize(
            &OperatorSpec::VolterraGrid {
                grid_size: n,
                rule: VolterraRule::LeftEndpoint,
            },
            BITS,
        )
        .unwrap();
        let slow = materialize(&volterra_matrix(n).unwrap(), BITS).unwrap();
        let v: Vec<Complex> = (0..n).map(|k| Complex::from_f64(k as f64, 0.5, BITS)).collect();
        // the explicit matrix stores 1/7 rounded to f64
        let close = |a: &Complex, b: &Complex| {
            (&a.re - &b.re).abs().to_f64() < 1e-15 && (&a.im - &b.im).abs().to_f64() < 1e-15
        };
        for (a, b) in fast.apply(&v).iter().zip(slow.apply(&v)) {
            assert!(close(a, &b), "{a:?} vs {b:?}");
        }
        for (a, b) in fast.apply_adjoint(&v).iter().zip(slow.apply_adjoint(&v)) {
            assert!(close(a, &b), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn summand_offsets() {
        let two3 = OperatorSpec::DirectSum {
            parts: vec![OperatorSpec::jordan(3), OperatorSpec::jordan(3)],
        };
        assert_eq!(
            embed_summand(&two3, 1, &VectorSpec::basis(0)).unwrap(),
            VectorSpec::basis(3)
        );
        assert_eq!(
            embed_summand(&two3, 0, &VectorSpec::basis(0)).unwrap(),
            VectorSpec::basis(0)
        );
        let mixed = OperatorSpec::DirectSum {
            parts: vec![
                OperatorSpec::jordan(2),
                OperatorSpec::shift(3),
                OperatorSpec::jordan(4),
            ],
        };
        assert_eq!(
            embed_summand(&mixed, 2, &VectorSpec::basis(1)).unwrap(),
            VectorSpec::basis(6)
        );
        assert!(matches!(
            embed_summand(&mixed, 3, &VectorSpec::basis(0)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn summand_vector_materializes_on_its_block() {
        let spec = OperatorSpec::DirectSum {
            parts: vec![OperatorSpec::jordan(2), OperatorSpec::shift(3)],
        };
        let v = VectorSpec::Summand {
            part: 1,
            inner: Box::new(VectorSpec::dense_real(&[1.0, 2.0, 3.0])),
        };
        let x = v.materialize(&spec, BITS).unwrap();
        assert_eq!(re(&x), vec![0.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(
            VectorSpec::dense_real(&[0.0, 0.0]).materialize(&OperatorSpec::jordan(2), BITS),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn spec_json_shape() {
        let spec = OperatorSpec::DirectSum {
            parts: vec![OperatorSpec::scaled(0.5, OperatorSpec::shift(10))],
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            s,
            r#"{"type":"direct_sum","parts":[{"type":"scaled","factor":0.5,"inner":{"type":"weighted_shift_a","trunc_dim":10}}]}"#
        );
        let back: OperatorSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let v: VectorSpec =
            serde_json::from_str(r#"{"type":"dense","coefficients":[1.0,[0.0,2.0]]}"#).unwrap();
        assert_eq!(
            v,
            VectorSpec::Dense {
                coefficients: vec![Coefficient::Real(1.0), Coefficient::Complex([0.0, 2.0])]
            }
        );
    }

    #[test]
    fn weighted_shift_family_detection() {
        assert!(OperatorSpec::scaled(0.3, OperatorSpec::shift(5)).is_weighted_shift_family());
        assert!(!volterra_matrix(4).unwrap().is_weighted_shift_family());
    }
}
