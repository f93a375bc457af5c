//! Right-closed subsets of `[0, 1]` and operators realizing them.
//!
//! A set is stored as finitely many disjoint intervals plus finitely many
//! isolated points. In this representation the supremum of any subset is a
//! member or the right endpoint of an interval, so a set is right closed
//! exactly when every interval contains its right endpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorSpec;

/// Deepest dyadic level scanned when enumerating interval meshes.
const MAX_DYADIC_LEVEL: u32 = 52;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub l: f64,
    pub r: f64,
    /// Endpoint flags default to closed, so `[l, r]` parses as a closed interval.
    #[serde(default = "closed_flag")]
    pub lc: bool,
    #[serde(default = "closed_flag")]
    pub rc: bool,
}

fn closed_flag() -> bool {
    true
}

impl Interval {
    pub fn new(l: f64, r: f64, lc: bool, rc: bool) -> Self {
        Interval { l, r, lc, rc }
    }

    pub fn closed(l: f64, r: f64) -> Self {
        Self::new(l, r, true, true)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.l < x && x < self.r) || (self.lc && x == self.l) || (self.rc && x == self.r)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    #[serde(default)]
    intervals: Vec<Interval>,
    #[serde(default)]
    points: Vec<f64>,
}

/// Finite union of intervals and isolated points in `[0, 1]`, kept in
/// canonical form: intervals sorted, disjoint and non-touching; points sorted,
/// distinct and outside every interval's closure-with-flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet")]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    points: Vec<f64>,
}

impl TryFrom<RawSet> for IntervalSet {
    type Error = Error;
    fn try_from(raw: RawSet) -> Result<Self> {
        IntervalSet::new(raw.intervals, raw.points)
    }
}

impl IntervalSet {
    pub fn new(intervals: Vec<Interval>, points: Vec<f64>) -> Result<Self> {
        for iv in &intervals {
            if !(iv.l.is_finite() && iv.r.is_finite() && 0.0 <= iv.l && iv.l < iv.r && iv.r <= 1.0)
            {
                return Err(Error::InvalidArgument(format!(
                    "interval endpoints must satisfy 0 ≤ l < r ≤ 1, got ({}, {})",
                    iv.l, iv.r
                )));
            }
        }
        if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!(
                "isolated point {p} outside [0, 1]"
            )));
        }
        let mut set = IntervalSet { intervals, points };
        set.canonicalize();
        Ok(set)
    }

    pub fn points_only(points: &[f64]) -> Result<Self> {
        Self::new(Vec::new(), points.to_vec())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.points.contains(&x) || self.intervals.iter().any(|iv| iv.contains(x))
    }

    fn canonicalize(&mut self) {
        self.intervals
            .sort_by(|a, b| a.l.total_cmp(&b.l).then(b.lc.cmp(&a.lc)));
        self.points.sort_by(f64::total_cmp);
        self.points.dedup();

        // points on an open endpoint close it; points inside are absorbed
        let mut kept = Vec::new();
        for &p in &self.points {
            let mut absorbed = false;
            for iv in &mut self.intervals {
                if iv.contains(p) {
                    absorbed = true;
                } else if p == iv.l {
                    iv.lc = true;
                    absorbed = true;
                } else if p == iv.r {
                    iv.rc = true;
                    absorbed = true;
                }
            }
            if !absorbed {
                kept.push(p);
            }
        }
        self.points = kept;

        let mut merged: Vec<Interval> = Vec::with_capacity(self.intervals.len());
        for iv in self.intervals.drain(..) {
            if let Some(last) = merged.last_mut() {
                let joins = iv.l < last.r || (iv.l == last.r && (last.rc || iv.lc));
                if joins {
                    if iv.l == last.l {
                        last.lc |= iv.lc;
                    }
                    if iv.r > last.r {
                        last.r = iv.r;
                        last.rc = iv.rc;
                    } else if iv.r == last.r {
                        last.rc |= iv.rc;
                    }
                    continue;
                }
            }
            merged.push(iv);
        }
        self.intervals = merged;
    }

    /// Members with nothing of the set immediately to their left: isolated
    /// points and included left endpoints.
    pub fn left_isolated(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.points.clone();
        out.extend(self.intervals.iter().filter(|iv| iv.lc).map(|iv| iv.l));
        out.sort_by(f64::total_cmp);
        out
    }
}

/// True iff the supremum of every nonempty subset belongs to the set.
pub fn is_right_closed(s: &IntervalSet) -> Result<bool> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(s.intervals.iter().all(|iv| iv.rc))
}

/// Smallest right-closed set containing `s`.
pub fn right_closure(s: &IntervalSet) -> Result<IntervalSet> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut out = s.clone();
    for iv in &mut out.intervals {
        iv.rc = true;
    }
    out.canonicalize();
    Ok(out)
}

/// Odd-numerator dyadics `m/2^level` inside `iv`, increasing.
fn dyadics_at_level(iv: &Interval, level: u32) -> impl Iterator<Item = f64> + '_ {
    let den = (1u64 << level) as f64;
    let lo = (iv.l * den).floor() as u64;
    let hi = (iv.r * den).ceil() as u64;
    (lo..=hi)
        .filter(|m| m % 2 == 1)
        .map(move |m| m as f64 / den)
        .filter(move |&x| iv.contains(x))
}

/// First `k` terms of a sequence `r_1 = 1, r_2, …` in `s` whose right closure
/// is `s`.
///
/// Order: `1`, then the remaining left-isolated members ascending, then the
/// dyadic rationals of each interval by increasing denominator (interval by
/// interval, numerators increasing). A finite set is repeated cyclically.
pub fn extract_sequence(s: &IntervalSet, k: usize) -> Result<Vec<f64>> {
    if !is_right_closed(s)? {
        return Err(Error::NotRightClosed(
            "some interval omits its right endpoint".into(),
        ));
    }
    if !s.contains(1.0) {
        return Err(Error::MissingOne);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("sequence length must be positive".into()));
    }
    let mut seq = vec![1.0];
    let push = |seq: &mut Vec<f64>, x: f64| {
        if !seq.contains(&x) {
            seq.push(x);
        }
    };
    for x in s.left_isolated() {
        if seq.len() >= k {
            break;
        }
        push(&mut seq, x);
    }
    'levels: for level in 1..=MAX_DYADIC_LEVEL {
        for iv in &s.intervals {
            for x in dyadics_at_level(iv, level) {
                if seq.len() >= k {
                    break 'levels;
                }
                push(&mut seq, x);
            }
        }
    }
    let distinct = seq.len();
    while seq.len() < k {
        let x = seq[seq.len() % distinct];
        seq.push(x);
    }
    seq.truncate(k);
    Ok(seq)
}

/// `⊕_{k=1}^{K} r_k A_N` with `r` from [`extract_sequence`].
pub fn build_theorem_b_operator(s: &IntervalSet, k: usize, n: usize) -> Result<OperatorSpec> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "per-summand truncation must be at least 2, got {n}"
        )));
    }
    let rates = extract_sequence(s, k)?;
    Ok(OperatorSpec::DirectSum {
        parts: rates
            .into_iter()
            .map(|r| OperatorSpec::scaled(r, OperatorSpec::shift(n)))
            .collect(),
    })
}

/// Rates of a spec produced by [`build_theorem_b_operator`].
pub fn summand_rates(spec: &OperatorSpec) -> Option<Vec<f64>> {
    match spec {
        OperatorSpec::DirectSum { parts } => parts
            .iter()
            .map(|p| match p {
                OperatorSpec::Scaled { factor, inner } => match **inner {
                    OperatorSpec::WeightedShiftA { .. } => Some(*factor),
                    _ => None,
                },
                OperatorSpec::WeightedShiftA { .. } => Some(1.0),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open(l: f64, r: f64) -> Interval {
        Interval::new(l, r, false, false)
    }

    #[test]
    fn right_closed_examples() {
        let half_open = IntervalSet::new(vec![Interval::new(0.5, 1.0, false, true)], vec![]).unwrap();
        assert!(is_right_closed(&half_open).unwrap());
        let both_open = IntervalSet::new(vec![open(0.5, 1.0)], vec![]).unwrap();
        assert!(!is_right_closed(&both_open).unwrap());
        let finite = IntervalSet::points_only(&[0.2, 0.5, 1.0]).unwrap();
        assert!(is_right_closed(&finite).unwrap());
        let empty = IntervalSet::new(vec![], vec![]).unwrap();
        assert!(matches!(is_right_closed(&empty), Err(Error::EmptySet)));
    }

    #[test]
    fn closure_examples() {
        let s = IntervalSet::new(vec![open(0.5, 1.0)], vec![]).unwrap();
        let c = right_closure(&s).unwrap();
        assert_eq!(c.intervals(), &[Interval::new(0.5, 1.0, false, true)]);
        assert_eq!(right_closure(&c).unwrap(), c);

        let s = IntervalSet::new(vec![Interval::new(0.0, 0.3, true, false)], vec![0.9]).unwrap();
        let c = right_closure(&s).unwrap();
        assert_eq!(c.intervals(), &[Interval::closed(0.0, 0.3)]);
        assert_eq!(c.points(), &[0.9]);
    }

    #[test]
    fn canonical_form_merges_and_absorbs() {
        let s = IntervalSet::new(
            vec![Interval::new(0.5, 1.0, false, true), Interval::new(0.0, 0.5, true, false)],
            vec![0.5, 0.7, 0.2],
        )
        .unwrap();
        assert_eq!(s.intervals(), &[Interval::closed(0.0, 1.0)]);
        assert!(s.points().is_empty());

        // (0.1, 0.2) ∪ (0.2, 0.3) stays split: 0.2 is missing
        let s = IntervalSet::new(vec![open(0.2, 0.3), open(0.1, 0.2)], vec![]).unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert!(!s.contains(0.2));
        let c = right_closure(&s).unwrap();
        assert_eq!(c.intervals(), &[Interval::new(0.1, 0.3, false, true)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(IntervalSet::new(vec![open(0.5, 0.5)], vec![]).is_err());
        assert!(IntervalSet::new(vec![open(0.5, 1.5)], vec![]).is_err());
        assert!(IntervalSet::points_only(&[-0.1]).is_err());
    }

    #[test]
    fn sequence_from_finite_sets() {
        let one = IntervalSet::points_only(&[1.0]).unwrap();
        assert_eq!(extract_sequence(&one, 3).unwrap(), vec![1.0, 1.0, 1.0]);
        let two = IntervalSet::points_only(&[0.3, 1.0]).unwrap();
        assert_eq!(extract_sequence(&two, 4).unwrap(), vec![1.0, 0.3, 1.0, 0.3]);
    }

    #[test]
    fn sequence_order_for_mixed_set() {
        let s = IntervalSet::new(vec![Interval::closed(0.6, 0.8)], vec![0.3, 1.0]).unwrap();
        let seq = extract_sequence(&s, 12).unwrap();
        assert_eq!(
            seq,
            vec![
                1.0, 0.3, 0.6, 0.75, 0.625, 0.6875, 0.65625, 0.71875, 0.78125, 0.609375,
                0.640625, 0.671875
            ]
        );
    }

    #[test]
    fn sequence_for_half_open_interval() {
        let s = IntervalSet::new(vec![Interval::new(0.5, 1.0, false, true)], vec![]).unwrap();
        let seq = extract_sequence(&s, 20).unwrap();
        assert_eq!(seq[0], 1.0);
        assert_eq!(&seq[1..4], &[0.75, 0.625, 0.875]);
        assert!(seq.iter().all(|&x| x > 0.5 && x <= 1.0));
        // the mesh gets within 2^-4 of the missing infimum
        assert!(seq.iter().any(|&x| x < 0.5 + 1.0 / 16.0));
    }

    #[test]
    fn sequence_preconditions() {
        let no_one = IntervalSet::points_only(&[0.5]).unwrap();
        assert!(matches!(extract_sequence(&no_one, 3), Err(Error::MissingOne)));
        let not_rc = IntervalSet::new(vec![open(0.5, 1.0)], vec![1.0]).unwrap();
        // the point 1 closes the interval, so this one is fine
        assert!(extract_sequence(&not_rc, 3).is_ok());
        let not_rc = IntervalSet::new(vec![open(0.2, 0.4)], vec![1.0]).unwrap();
        assert!(matches!(
            extract_sequence(&not_rc, 3),
            Err(Error::NotRightClosed(_))
        ));
    }

    #[test]
    fn theorem_b_operator_shape() {
        let s = IntervalSet::points_only(&[0.3, 0.7, 1.0]).unwrap();
        let spec = build_theorem_b_operator(&s, 3, 50).unwrap();
        assert_eq!(summand_rates(&spec).unwrap(), vec![1.0, 0.3, 0.7]);
        assert_eq!(spec.dim().unwrap(), 150);
        let single = build_theorem_b_operator(&IntervalSet::points_only(&[1.0]).unwrap(), 1, 50)
            .unwrap();
        assert_eq!(
            single,
            OperatorSpec::DirectSum {
                parts: vec![OperatorSpec::scaled(1.0, OperatorSpec::shift(50))]
            }
        );
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"intervals":[{"l":0.6,"r":0.8,"lc":true,"rc":true}],"points":[1.0,0.3]}"#;
        let s: IntervalSet = serde_json::from_str(text).unwrap();
        assert_eq!(s.points(), &[0.3, 1.0]);
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(
            back,
            r#"{"intervals":[{"l":0.6,"r":0.8,"lc":true,"rc":true}],"points":[0.3,1.0]}"#
        );
        assert!(serde_json::from_str::<IntervalSet>(r#"{"intervals":[{"l":0.9,"r":0.1,"lc":true,"rc":true}]}"#).is_err());
    }
}
