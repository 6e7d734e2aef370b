//! Exact verification of the finite identities over parameter grids.
//!
//! Every identity is a pair of evaluators (left and right side) over one
//! parameter point and one `q`. A check passes when the two canonical
//! rationals are equal; there is no tolerance anywhere in this module.

mod certificates;
mod evaluators;
mod oracle;
mod report;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rug::Rational;
use thiserror::Error;

use crate::mhs::MhsError;
use crate::qkernel::{QKernel, QPoint};
use crate::strings::{Ending, IndexString, StringError};

pub use oracle::validate_reconstructions;
pub use report::{check_record, CheckRecord, ValueRecord, WITNESS_DIGITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("{identity}: {message}")]
    Constraint { identity: IdentityId, message: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("reconstruction {identity} failed at {params} q = {q}: lhs {lhs} != rhs {rhs}")]
    Reconstruction { identity: String, params: String, q: String, lhs: String, rhs: String },
    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),
    #[error(transparent)]
    Mhs(#[from] MhsError),
    #[error(transparent)]
    Strings(#[from] StringError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    Eq11,
    Eq12,
    Eq13,
    Eq14,
    Cert15,
    Cert16,
    Cert17,
    Cert19,
    Eq20,
    Eq21,
    Eq22,
    Eq23,
    Eq26,
    Eq32,
    Eq33,
    Eq34,
}

impl IdentityId {
    pub const ALL: [IdentityId; 16] = [
        IdentityId::Eq11,
        IdentityId::Eq12,
        IdentityId::Eq13,
        IdentityId::Eq14,
        IdentityId::Cert15,
        IdentityId::Cert16,
        IdentityId::Cert17,
        IdentityId::Cert19,
        IdentityId::Eq20,
        IdentityId::Eq21,
        IdentityId::Eq22,
        IdentityId::Eq23,
        IdentityId::Eq26,
        IdentityId::Eq32,
        IdentityId::Eq33,
        IdentityId::Eq34,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Eq11 => "eq11",
            IdentityId::Eq12 => "eq12",
            IdentityId::Eq13 => "eq13",
            IdentityId::Eq14 => "eq14",
            IdentityId::Cert15 => "cert15",
            IdentityId::Cert16 => "cert16",
            IdentityId::Cert17 => "cert17",
            IdentityId::Cert19 => "cert19",
            IdentityId::Eq20 => "eq20",
            IdentityId::Eq21 => "eq21",
            IdentityId::Eq22 => "eq22",
            IdentityId::Eq23 => "eq23",
            IdentityId::Eq26 => "eq26",
            IdentityId::Eq32 => "eq32",
            IdentityId::Eq33 => "eq33",
            IdentityId::Eq34 => "eq34",
        }
    }

    /// Classical identities are evaluated at `q = 1` and ignore q points.
    pub fn is_classical(self) -> bool {
        matches!(self, IdentityId::Eq33 | IdentityId::Eq34)
    }

    pub fn is_certificate(self) -> bool {
        matches!(self, IdentityId::Cert15 | IdentityId::Cert16 | IdentityId::Cert17 | IdentityId::Cert19)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_lowercase();
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == wanted)
            .ok_or_else(|| VerifyError::UnknownIdentity(s.to_string()))
    }
}

/// Named integer parameters of one grid point, plus the index string for
/// the string-valued identities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    ints: Vec<(&'static str, i64)>,
    string: Option<IndexString>,
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &'static str, value: i64) -> Self {
        self.ints.push((name, value));
        self
    }

    pub fn with_string(mut self, s: IndexString) -> Self {
        self.string = Some(s);
        self
    }

    pub fn get(&self, name: &str) -> Option<i64> {
        self.ints.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }

    pub fn ints(&self) -> &[(&'static str, i64)] {
        &self.ints
    }

    pub fn string(&self) -> Option<&IndexString> {
        self.string.as_ref()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if let Some(s) = &self.string {
            parts.push(format!("s=({s})"));
        }
        parts.extend(self.ints.iter().map(|(k, v)| format!("{k}={v}")));
        write!(f, "{}", parts.join(" "))
    }
}

/// One evaluated grid point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub identity: String,
    pub params: Params,
    pub q: Rational,
    pub lhs: Rational,
    /// Second left-hand route (the recurrence for `H*`), when the identity has one.
    pub lhs_alt: Option<Rational>,
    pub rhs: Rational,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.lhs == self.rhs && self.lhs_alt.as_ref().map_or(true, |alt| *alt == self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub identity: String,
    pub q_points: Vec<Rational>,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn pass_count(&self) -> usize {
        self.checks.iter().filter(|c| c.pass()).count()
    }

    /// Failing checks with their exact left and right sides.
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass()).collect()
    }

    /// Distinct parameter points in grid order.
    pub fn grid(&self) -> Vec<&Params> {
        let mut out: Vec<&Params> = Vec::new();
        for c in &self.checks {
            if !out.contains(&&c.params) {
                out.push(&c.params);
            }
        }
        out
    }
}

/// Bounds for the default parameter grids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridBounds {
    pub n_max: u32,
    pub k_max: u32,
    pub a_max: u32,
    pub b_max: u32,
    /// Largest number of 1s in a two-one string.
    pub m_max: u32,
    /// Largest exponent sum of a two-one string.
    pub s_max: u32,
}

impl Default for GridBounds {
    fn default() -> Self {
        GridBounds { n_max: 12, k_max: 12, a_max: 3, b_max: 3, m_max: 3, s_max: 4 }
    }
}

/// Default q points for verification.
pub fn default_q_points() -> Vec<QPoint> {
    [(1, 2), (1, 3), (2, 3), (7, 10)].into_iter().map(|(n, d)| QPoint::from_ratio(n, d)).collect()
}

fn all_exponent_lists(len: usize, sum_max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=sum_max - used).map(move |x| [v.clone(), vec![x]].concat())
            })
            .collect();
    }
    out
}

/// Two-one strings ending with 1, with `1 <= m <= m_max` ones and exponent sum at most `s_max`.
pub fn strings_ending_with_one(m_max: u32, s_max: u32) -> Vec<IndexString> {
    (1..=m_max as usize)
        .flat_map(|m| all_exponent_lists(m, s_max))
        .map(|e| IndexString::new(e, Ending::One).expect("m >= 1"))
        .collect()
}

/// Two-one strings ending with 2, with `0 <= m <= m_max` ones, final run at
/// least 1 and exponent sum (final run included) at most `s_max`.
pub fn strings_ending_with_two(m_max: u32, s_max: u32) -> Vec<IndexString> {
    (1..=m_max as usize + 1)
        .flat_map(|len| all_exponent_lists(len, s_max))
        .filter_map(|e| IndexString::new(e, Ending::Two).ok())
        .collect()
}

fn range_grid(names: [&'static str; 2], outer: RangeInclusive<i64>, inner: impl Fn(i64) -> RangeInclusive<i64>) -> Vec<Params> {
    outer
        .flat_map(|x| inner(x).map(move |y| Params::new().with(names[0], x).with(names[1], y)))
        .collect()
}

/// The parameter grid of `identity` under `bounds`.
pub fn grid(identity: IdentityId, bounds: &GridBounds) -> Result<Vec<Params>, VerifyError> {
    let n = i64::from(bounds.n_max);
    let k = i64::from(bounds.k_max);
    let a = i64::from(bounds.a_max);
    let b = i64::from(bounds.b_max);
    if identity == IdentityId::Eq22 && bounds.b_max == 0 {
        return Err(VerifyError::Constraint { identity, message: "b >= 1 required (b_max = 0)".into() });
    }
    let points = match identity {
        IdentityId::Eq11 | IdentityId::Eq12 => range_grid(["n", "l"], 1..=n, |n| 0..=n),
        IdentityId::Eq13 => (1..=n).map(|n| Params::new().with("n", n)).collect(),
        IdentityId::Eq14 => range_grid(["n", "l"], 1..=n, |n| 1..=n),
        IdentityId::Cert15 | IdentityId::Cert16 => range_grid(["n", "k"], 1..=n, |_| 1..=k),
        IdentityId::Cert17 => range_grid(["m", "k"], 0..=n, |_| 1..=k),
        IdentityId::Cert19 => range_grid(["l", "k"], 1..=n, |_| 1..=k),
        IdentityId::Eq20 | IdentityId::Eq21 => range_grid(["a", "n"], 0..=a, |_| 1..=n),
        IdentityId::Eq22 => (0..=a)
            .flat_map(|a| (1..=b).flat_map(move |b| (1..=n).map(move |n| Params::new().with("a", a).with("b", b).with("n", n))))
            .collect(),
        IdentityId::Eq23 => (0..=a)
            .flat_map(|a| (1..=n).flat_map(move |n| (1..=n).map(move |k| Params::new().with("a", a).with("n", n).with("k", k))))
            .collect(),
        IdentityId::Eq26 | IdentityId::Eq33 => string_grid(strings_ending_with_one(bounds.m_max, bounds.s_max), 1..=bounds.n_max),
        IdentityId::Eq32 | IdentityId::Eq34 => string_grid(strings_ending_with_two(bounds.m_max, bounds.s_max), 1..=bounds.n_max),
    };
    if points.is_empty() {
        return Err(VerifyError::InvalidGrid(format!("{identity} grid is empty under {bounds:?}")));
    }
    Ok(points)
}

fn string_grid(strings: Vec<IndexString>, n_range: RangeInclusive<u32>) -> Vec<Params> {
    strings
        .into_iter()
        .flat_map(|s| n_range.clone().map(move |n| Params::new().with_string(s.clone()).with("n", i64::from(n))))
        .collect()
}

/// Evaluates both sides of `identity` at one point. Violated constraints
/// are errors, never silently evaluated.
pub fn evaluate(identity: IdentityId, params: &Params, kernel: &QKernel) -> Result<Check, VerifyError> {
    evaluators::evaluate(identity, params, kernel)
}

fn run_grid(identity: IdentityId, points: &[Params], q_points: &[QPoint]) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let per_q: Vec<Result<Vec<Check>, VerifyError>> = if identity.is_classical() {
        vec![points.iter().map(|p| evaluators::evaluate_classical(identity, p)).collect()]
    } else {
        q_points
            .par_iter()
            .map(|q| {
                let kernel = QKernel::new(q.clone());
                points.iter().map(|p| evaluate(identity, p, &kernel)).collect()
            })
            .collect()
    };
    let mut checks = Vec::new();
    for batch in per_q {
        checks.extend(batch?);
    }
    let q_points = if identity.is_classical() {
        vec![Rational::from(1)]
    } else {
        q_points.iter().map(|q| q.value().clone()).collect()
    };
    Ok(VerificationReport { identity: identity.name().to_string(), q_points, checks, elapsed: started.elapsed() })
}

/// Runs `identity` on its grid at every q point (checks ordered by q, then grid).
pub fn verify(identity: IdentityId, bounds: &GridBounds, q_points: &[QPoint]) -> Result<VerificationReport, VerifyError> {
    if q_points.is_empty() && !identity.is_classical() {
        return Err(VerifyError::InvalidGrid("no q points".into()));
    }
    let points = grid(identity, bounds)?;
    run_grid(identity, &points, q_points)
}

/// The telescoping relation of one certificate pair on `1 <= k <= k_max`
/// and the first argument up to `n_max` (from 0 for CERT17).
pub fn verify_certificates(identity: IdentityId, n_max: u32, k_max: u32, q_points: &[QPoint]) -> Result<VerificationReport, VerifyError> {
    if !identity.is_certificate() {
        return Err(VerifyError::UnknownIdentity(format!("{identity} is not a certificate")));
    }
    let bounds = GridBounds { n_max, k_max, ..GridBounds::default() };
    verify(identity, &bounds, q_points)
}

/// The finite two-one identity for one string: EQ26 for strings ending with
/// 1, EQ32 for strings ending with 2.
pub fn verify_two_one_finite(s: &IndexString, n_range: RangeInclusive<u32>, q_points: &[QPoint]) -> Result<VerificationReport, VerifyError> {
    let identity = match s.ending() {
        Ending::One => IdentityId::Eq26,
        Ending::Two => IdentityId::Eq32,
    };
    if q_points.is_empty() {
        return Err(VerifyError::InvalidGrid("no q points".into()));
    }
    run_grid(identity, &string_grid(vec![s.clone()], n_range), q_points)
}

/// The classical identity EQ33 / EQ34 for one string.
pub fn verify_classical(identity: IdentityId, s: &IndexString, n_range: RangeInclusive<u32>) -> Result<VerificationReport, VerifyError> {
    let expected = match s.ending() {
        Ending::One => IdentityId::Eq33,
        Ending::Two => IdentityId::Eq34,
    };
    if identity != expected {
        return Err(VerifyError::Constraint {
            identity,
            message: format!("string {s} belongs to {expected}"),
        });
    }
    run_grid(identity, &string_grid(vec![s.clone()], n_range), &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> QKernel {
        QKernel::new(QPoint::from_ratio(1, 2))
    }

    #[test]
    fn identity_names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.name().parse::<IdentityId>().unwrap(), id);
        }
        assert!("eq99".parse::<IdentityId>().is_err());
        assert_eq!("EQ13".parse::<IdentityId>().unwrap(), IdentityId::Eq13);
    }

    #[test]
    fn eq13_at_n_one() {
        let c = evaluate(IdentityId::Eq13, &Params::new().with("n", 1), &half()).unwrap();
        assert_eq!(c.lhs, Rational::from((1, 2)));
        assert_eq!(c.rhs, Rational::from((1, 2)));
        assert!(c.pass());
    }

    #[test]
    fn constraints_are_rejected() {
        let k = half();
        let bad = [
            (IdentityId::Eq14, Params::new().with("n", 3).with("l", 0)),
            (IdentityId::Eq22, Params::new().with("a", 1).with("b", 0).with("n", 3)),
            (IdentityId::Eq11, Params::new().with("n", 0).with("l", 0)),
            (IdentityId::Eq12, Params::new().with("n", 2).with("l", 3)),
            (IdentityId::Cert17, Params::new().with("m", -1).with("k", 1)),
            (IdentityId::Eq23, Params::new().with("a", 0).with("n", 2).with("k", 3)),
            (IdentityId::Eq20, Params::new().with("n", 2)),
        ];
        for (id, p) in bad {
            assert!(matches!(evaluate(id, &p, &k), Err(VerifyError::Constraint { .. })), "{id} {p}");
        }
        let bounds = GridBounds { b_max: 0, ..GridBounds::default() };
        assert!(matches!(verify(IdentityId::Eq22, &bounds, &default_q_points()), Err(VerifyError::Constraint { .. })));
        let s = IndexString::ends_with_one(&[1]).unwrap();
        assert!(evaluate(IdentityId::Eq32, &Params::new().with_string(s).with("n", 2), &k).is_err());
    }

    #[test]
    fn eq21_at_a_zero_matches_eq13() {
        let q = default_q_points();
        let bounds = GridBounds { n_max: 8, ..GridBounds::default() };
        let eq13 = verify(IdentityId::Eq13, &bounds, &q).unwrap();
        let eq21 = verify(IdentityId::Eq21, &GridBounds { a_max: 0, ..bounds }, &q).unwrap();
        assert!(eq13.passed() && eq21.passed());
        let rhs13: Vec<_> = eq13.checks.iter().map(|c| c.rhs.clone()).collect();
        let lhs21: Vec<_> = eq21.checks.iter().map(|c| c.lhs.clone()).collect();
        assert_eq!(rhs13, lhs21);
    }

    #[test]
    fn eq26_single_block_matches_eq21() {
        let k = QKernel::new(QPoint::from_ratio(2, 3));
        for a in 0..4u32 {
            let s = IndexString::ends_with_one(&[a]).unwrap();
            for n in 1..8 {
                let c26 = evaluate(IdentityId::Eq26, &Params::new().with_string(s.clone()).with("n", n), &k).unwrap();
                let c21 = evaluate(IdentityId::Eq21, &Params::new().with("a", a.into()).with("n", n), &k).unwrap();
                assert!(c26.pass() && c21.pass());
                assert_eq!(c26.rhs, c21.rhs);
            }
        }
    }

    #[test]
    fn eq32_without_ones_matches_eq20() {
        let k = QKernel::new(QPoint::from_ratio(7, 10));
        for a in 1..4u32 {
            let s = IndexString::ends_with_two(&[a]).unwrap();
            for n in 1..8 {
                let c32 = evaluate(IdentityId::Eq32, &Params::new().with_string(s.clone()).with("n", n), &k).unwrap();
                let c20 = evaluate(IdentityId::Eq20, &Params::new().with("a", a.into()).with("n", n), &k).unwrap();
                assert!(c32.pass() && c20.pass());
                assert_eq!(c32.rhs, c20.rhs);
            }
        }
    }

    #[test]
    fn two_one_at_n_one() {
        let k = half();
        for s in strings_ending_with_one(3, 3) {
            let c = evaluate(IdentityId::Eq26, &Params::new().with_string(s.clone()).with("n", 1), &k).unwrap();
            let e = s.exponents().iter().sum::<u32>() + s.ones() as u32;
            assert_eq!(c.lhs, rug::ops::Pow::pow(Rational::from((1, 2)), e));
            assert!(c.pass());
        }
    }

    #[test]
    fn two_one_single_string_report() {
        let s = IndexString::ends_with_one(&[1, 1]).unwrap();
        let r = verify_two_one_finite(&s, 1..=5, &[QPoint::from_ratio(1, 2)]).unwrap();
        assert_eq!(r.checks.len(), 5);
        assert!(r.passed());
        assert!(r.checks.iter().all(|c| c.lhs_alt.is_some()));
    }

    #[test]
    fn classical_examples() {
        let s = IndexString::ends_with_one(&[0]).unwrap();
        let r = verify_classical(IdentityId::Eq33, &s, 1..=10).unwrap();
        assert!(r.passed());
        assert_eq!(r.q_points, vec![Rational::from(1)]);
        let t = IndexString::ends_with_two(&[1]).unwrap();
        assert!(verify_classical(IdentityId::Eq34, &t, 1..=10).unwrap().passed());
        assert!(verify_classical(IdentityId::Eq33, &t, 1..=3).is_err());
    }

    #[test]
    fn certificate_edges() {
        let k = half();
        // CERT19 at l = k: G(l, l) carries the factor 1 - q^0
        for l in 1..6 {
            assert_eq!(certificates::cert19_g(&k, l, l), 0);
        }
        let r = verify_certificates(IdentityId::Cert15, 1, 1, &[QPoint::from_ratio(1, 2)]).unwrap();
        assert!(r.passed());
        assert!(verify_certificates(IdentityId::Eq13, 1, 1, &default_q_points()).is_err());
    }

    #[test]
    fn cert16_sums_to_eq12_rhs() {
        let k = QKernel::new(QPoint::from_ratio(1, 3));
        for n in 1..8u32 {
            for l in 0..=n {
                let summed: Rational = ((l + 1)..=n).map(|j| certificates::cert16_f(&k, n, j)).sum();
                // (1 - q) times the EQ12 left side
                let eq12 = evaluate(IdentityId::Eq12, &Params::new().with("n", n.into()).with("l", l.into()), &k).unwrap();
                let one_minus_q = Rational::from(1 - k.q().value());
                assert_eq!(summed, eq12.rhs * one_minus_q);
            }
        }
    }

    #[test]
    fn grids_have_expected_shapes() {
        let b = GridBounds { n_max: 4, k_max: 3, a_max: 1, b_max: 2, m_max: 2, s_max: 2 };
        assert_eq!(grid(IdentityId::Eq11, &b).unwrap().len(), 2 + 3 + 4 + 5);
        assert_eq!(grid(IdentityId::Eq14, &b).unwrap().len(), 1 + 2 + 3 + 4);
        assert_eq!(grid(IdentityId::Cert17, &b).unwrap().len(), 5 * 3);
        assert_eq!(grid(IdentityId::Eq22, &b).unwrap().len(), 2 * 2 * 4);
        // m = 1: 3 strings, m = 2: 6 strings
        assert_eq!(strings_ending_with_one(2, 2).len(), 9);
        assert!(strings_ending_with_two(2, 2).iter().all(|s| *s.exponents().last().unwrap() >= 1));
        assert!(grid(IdentityId::Eq13, &GridBounds { n_max: 0, ..b }).is_err());
    }
}
