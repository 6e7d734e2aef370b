//! The infinite q-series `ζ*_q[s]`, `ẑ_q[s; t]` and `z̄_q[s; t]` with proven
//! truncation bounds, the two-one formulas built from them, and the `q -> 1`
//! limit probe.
//!
//! Each series is summed over its outermost index `k_1 <= K`. The remainder
//! is bounded by a majorant `b_k` on the total absolute contribution of the
//! terms with `k_1 = k`, together with a ratio `rho_K < 1` such that
//! `b_{k+1} <= rho_K b_k` for all `k > K`. The tail is then at most
//! `b_{K+1} / (1 - rho_K)`. The bound is evaluated in exact arithmetic; a
//! floating-point estimate is only used to guess `K`.
//!
//! * `ζ*_q[s]`, depth `m`: every factor `q^{k_j} / [k_j]^{s_j}` is at most 1
//!   and there are `C(k+m-2, m-1)` inner tuples below `k_1 = k`, so
//!   `b_k = q^k / [k]^{s_1} C(k+m-2, m-1)` and `b_{k+1}/b_k <= q (k+m-1)/k`,
//!   giving `rho_K = q (K+m) / (K+1)`.
//! * `ẑ_q[s; t]`, depth `r`, all `s_j >= 0`: each `(1 + q^{k_j})` is at most 2,
//!   `1/[k_j]^{s_j} <= 1`, and for `j >= 2` (where `k_j < k_1`)
//!   `q^{(t_j-1)k_j} <= q^{min(0, t_j-1) k_1}`. With
//!   `c = (t_1 - 1) + sum_{j>=2} min(0, t_j - 1)` this gives
//!   `b_k = 2^r C(k-1, r-1) q^{k^2 + ck}` and
//!   `rho_K = (K+1)/(K+2-r) q^{2K+3+c}`.
//! * `z̄_q[s; t]`: as for `ẑ_q`, using `k_1^2 - k_r(k_r-1)/2 >= k_1(k_1+1)/2`,
//!   so `b_k = 2^r C(k-1, r-1) q^{k(k+1)/2 + ck}` and
//!   `rho_K = (K+1)/(K+2-r) q^{K+2+c}`.
//!
//! The classical `ζ(w)` targets of the limit probe are enclosed by dyadic
//! fixed-point partial sums plus the convexity bounds on the tail
//! `sum_{k>N} k^{-w}`: the trapezoid rule gives the lower bound
//! `(N+1)^{1-w}/(w-1) + (N+1)^{-w}/2`, the midpoint rule the upper bound
//! `(N+1/2)^{1-w}/(w-1)`.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::decimal::{to_decimal, upper_scientific};
use crate::mhs::{self, bar_inner_table, script_h_table, strict_factor, MhsError};
use crate::qkernel::{exact_string, QArith, QKernel, QPoint};
use crate::strings::{enumerate_compositions, CompositionString, Ending, IndexString, StringError};

pub const DEFAULT_TERM_CAP: u64 = 10_000;
pub const TERM_CAP_ENV: &str = "QZETA_TERM_CAP";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("eps must be positive, got {0}")]
    NonPositiveEps(String),
    #[error("tail bound {eps} not reached within the term cap of {cap}")]
    TermCap { cap: u64, eps: String },
    #[error("invalid exponents: {0}")]
    Exponents(String),
    #[error("invalid term cap {0:?}")]
    BadTermCap(String),
    #[error("no classical target for {0}")]
    Unsupported(String),
    #[error(transparent)]
    Mhs(#[from] MhsError),
    #[error(transparent)]
    Strings(#[from] StringError),
}

/// A truncated series value with a proven bound on the omitted remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedValue {
    pub partial_sum: Rational,
    pub tail_bound: Rational,
    pub terms_used: u64,
}

/// JSON form of a [`BoundedValue`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueJson {
    pub exact_partial: String,
    pub decimal: String,
    pub tail_bound_decimal: String,
    pub terms: u64,
}

impl BoundedValue {
    pub fn exact(value: Rational) -> Self {
        BoundedValue { partial_sum: value, tail_bound: Rational::new(), terms_used: 1 }
    }

    /// Enclosure of the sum: partial sums and tail bounds add.
    pub fn combine(&self, other: &BoundedValue) -> BoundedValue {
        BoundedValue {
            partial_sum: Rational::from(&self.partial_sum + &other.partial_sum),
            tail_bound: Rational::from(&self.tail_bound + &other.tail_bound),
            terms_used: self.terms_used.max(other.terms_used),
        }
    }

    /// Whether the two enclosures can describe the same number.
    pub fn consistent_with(&self, other: &BoundedValue) -> bool {
        let gap = Rational::from(&self.partial_sum - &other.partial_sum).abs();
        gap <= Rational::from(&self.tail_bound + &other.tail_bound)
    }

    /// The value rendered with `digits` digits after the point; the tail
    /// bound is rounded upwards to three significant digits.
    pub fn to_json(&self, digits: usize) -> ValueJson {
        ValueJson {
            exact_partial: exact_string(&self.partial_sum),
            decimal: to_decimal(&self.partial_sum, digits),
            tail_bound_decimal: upper_scientific(&self.tail_bound, 3),
            terms: self.terms_used,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesConfig {
    pub term_cap: u64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { term_cap: DEFAULT_TERM_CAP }
    }
}

impl SeriesConfig {
    /// The default configuration, with the term cap taken from
    /// `QZETA_TERM_CAP` when it is set.
    pub fn from_env() -> Result<Self, SeriesError> {
        match std::env::var(TERM_CAP_ENV) {
            Ok(text) => match text.trim().parse::<u64>() {
                Ok(cap) if cap > 0 => Ok(SeriesConfig { term_cap: cap }),
                _ => Err(SeriesError::BadTermCap(text)),
            },
            Err(_) => Ok(SeriesConfig::default()),
        }
    }
}

/// One of the three series families with its exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Series {
    ZetaStar { s: Vec<i64> },
    ZHat { s: Vec<i64>, t: Vec<i64> },
    ZBar { s: Vec<i64>, t: Vec<i64> },
}

fn ln_rational(x: &Rational) -> f64 {
    let (mn, en) = x.numer().to_f64_exp();
    let (md, ed) = x.denom().to_f64_exp();
    mn.abs().ln() - md.ln() + (f64::from(en) - f64::from(ed)) * LN_2
}

fn ln_binomial(n: u64, k: u64) -> f64 {
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

fn binomial(n: u64, k: u64) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

fn int_pow(base: u64, e: u32) -> Integer {
    Integer::from(Integer::u_pow_u(u32::try_from(base).expect("base fits in u32"), e))
}

fn check_eps(eps: &Rational) -> Result<(), SeriesError> {
    if *eps <= 0 {
        return Err(SeriesError::NonPositiveEps(eps.to_string()));
    }
    Ok(())
}

impl Series {
    pub fn zeta_star(s: &[u32]) -> Result<Self, SeriesError> {
        if let Some(i) = s.iter().position(|&x| x == 0) {
            return Err(SeriesError::Exponents(format!("s_{} = 0, need s_j >= 1", i + 1)));
        }
        Ok(Series::ZetaStar { s: s.iter().map(|&x| i64::from(x)).collect() })
    }

    fn check_pair(s: &[i64], t: &[i64]) -> Result<(), SeriesError> {
        if s.len() != t.len() {
            return Err(MhsError::LengthMismatch { s: s.len(), t: t.len() }.into());
        }
        if let Some(i) = s.iter().position(|&x| x < 0) {
            return Err(SeriesError::Exponents(format!("s_{} = {} is negative", i + 1, s[i])));
        }
        Ok(())
    }

    pub fn zhat(s: &[i64], t: &[i64]) -> Result<Self, SeriesError> {
        Self::check_pair(s, t)?;
        Ok(Series::ZHat { s: s.to_vec(), t: t.to_vec() })
    }

    pub fn zbar(s: &[i64], t: &[i64]) -> Result<Self, SeriesError> {
        Self::check_pair(s, t)?;
        Ok(Series::ZBar { s: s.to_vec(), t: t.to_vec() })
    }

    fn depth(&self) -> usize {
        match self {
            Series::ZetaStar { s } | Series::ZHat { s, .. } | Series::ZBar { s, .. } => s.len(),
        }
    }

    fn shift(t: &[i64]) -> i64 {
        (t[0] - 1) + t[1..].iter().map(|&x| (x - 1).min(0)).sum::<i64>()
    }

    fn min_terms(&self) -> u64 {
        match self {
            Series::ZetaStar { .. } => 1,
            _ => self.depth().max(1) as u64,
        }
    }

    /// The partial sum over outer indices `1..=terms`.
    pub fn partial(&self, q: &QKernel, terms: u64) -> Rational {
        if self.depth() == 0 {
            return Rational::from(1);
        }
        let kmax = u32::try_from(terms).expect("term count fits in u32");
        match self {
            Series::ZetaStar { s } => mhs::h_star(q, kmax, s).expect("exponents validated"),
            Series::ZHat { s, t } => {
                let inner = script_h_table(q, kmax - 1, &s[1..], &t[1..]);
                (1..=kmax)
                    .map(|k| {
                        let k64 = i64::from(k);
                        q.q_pow(k64 * k64) * strict_factor(q, k, s[0], t[0]) * &inner[k as usize - 1]
                    })
                    .sum()
            }
            Series::ZBar { s, t } if s.len() == 1 => (1..=kmax)
                .map(|k| {
                    let k64 = i64::from(k);
                    let term = q.q_pow(k64 * k64 - k64 * (k64 - 1) / 2) * strict_factor(q, k, s[0], t[0]);
                    if k % 2 == 1 {
                        term
                    } else {
                        -term
                    }
                })
                .sum(),
            Series::ZBar { s, t } => {
                // the inner table carries (-1)^{k_r}; the series wants (-1)^{k_r - 1}
                let inner = bar_inner_table(q, kmax - 1, &s[1..], &t[1..]);
                let total: Rational = (1..=kmax)
                    .map(|k| {
                        let k64 = i64::from(k);
                        q.q_pow(k64 * k64) * strict_factor(q, k, s[0], t[0]) * &inner[k as usize - 1]
                    })
                    .sum();
                -total
            }
        }
    }

    /// Exact majorant of the remainder after `terms` outer indices, or
    /// `None` when the geometric ratio is not yet below 1.
    pub fn tail_bound(&self, q: &QKernel, terms: u64) -> Option<Rational> {
        let r = self.depth() as u64;
        if r == 0 {
            return Some(Rational::new());
        }
        let big_k = terms as i64;
        let next = terms + 1;
        let (b, rho) = match self {
            Series::ZetaStar { s } => {
                let rho = q.q().value() * Rational::from((big_k + r as i64, big_k + 1));
                let b = q.q_pow(big_k + 1) * q.q_int_pow(next as u32, -s[0]) * binomial(terms + r - 1, r - 1);
                (b, rho)
            }
            Series::ZHat { t, .. } | Series::ZBar { t, .. } => {
                if terms + 1 < r {
                    return None;
                }
                let c = Self::shift(t);
                let (exp_b, exp_rho) = if matches!(self, Series::ZHat { .. }) {
                    ((big_k + 1) * (big_k + 1) + c * (big_k + 1), 2 * big_k + 3 + c)
                } else {
                    ((big_k + 1) * (big_k + 2) / 2 + c * (big_k + 1), big_k + 2 + c)
                };
                let rho = q.q_pow(exp_rho) * Rational::from((big_k + 1, big_k + 2 - r as i64));
                let b = q.q_pow(exp_b) * Integer::from(Integer::u_pow_u(2, r as u32)) * binomial(terms, r - 1);
                (b, rho)
            }
        };
        if rho >= 1 {
            return None;
        }
        Some(b / (1 - rho))
    }

    /// Floating-point logarithm of [`Series::tail_bound`], used to guess `K`.
    fn ln_tail_estimate(&self, lnq: f64, terms: u64) -> Option<f64> {
        let r = self.depth() as u64;
        let k = terms as f64;
        let (ln_b, rho) = match self {
            Series::ZetaStar { s } => {
                let ln_qint = (-(lnq * (k + 1.0)).exp_m1()).ln() - (-lnq.exp_m1()).ln();
                let ln_b = (k + 1.0) * lnq - s[0] as f64 * ln_qint + ln_binomial(terms + r - 1, r - 1);
                (ln_b, lnq.exp() * (k + r as f64) / (k + 1.0))
            }
            Series::ZHat { t, .. } | Series::ZBar { t, .. } => {
                if terms + 1 < r {
                    return None;
                }
                let c = Self::shift(t) as f64;
                let (exp_b, exp_rho) = if matches!(self, Series::ZHat { .. }) {
                    ((k + 1.0) * (k + 1.0) + c * (k + 1.0), 2.0 * k + 3.0 + c)
                } else {
                    ((k + 1.0) * (k + 2.0) / 2.0 + c * (k + 1.0), k + 2.0 + c)
                };
                let ln_b = r as f64 * LN_2 + ln_binomial(terms, r - 1) + exp_b * lnq;
                (ln_b, (exp_rho * lnq).exp() * (k + 1.0) / (k + 2.0 - r as f64))
            }
        };
        (rho < 1.0).then(|| ln_b - (1.0 - rho).ln())
    }

    /// Sums enough terms for a proven tail bound of at most `eps`.
    pub fn evaluate(&self, q: &QPoint, eps: &Rational, config: &SeriesConfig) -> Result<BoundedValue, SeriesError> {
        check_eps(eps)?;
        if self.depth() == 0 {
            return Ok(BoundedValue::exact(Rational::from(1)));
        }
        let cap_error = || SeriesError::TermCap { cap: config.term_cap, eps: eps.to_string() };
        let lnq = ln_rational(q.value());
        let target = ln_rational(eps);
        let mut terms = self.min_terms();
        while self.ln_tail_estimate(lnq, terms).map_or(true, |e| e > target) {
            terms += 1;
            if terms > config.term_cap {
                return Err(cap_error());
            }
        }
        let kernel = QKernel::new(q.clone());
        loop {
            if let Some(bound) = self.tail_bound(&kernel, terms) {
                if bound <= *eps {
                    let partial_sum = self.partial(&kernel, terms);
                    return Ok(BoundedValue { partial_sum, tail_bound: bound, terms_used: terms });
                }
            }
            terms += 1;
            if terms > config.term_cap {
                return Err(cap_error());
            }
        }
    }
}

/// `ζ*_q[s] = sum_{k_1 >= ... >= k_m >= 1} prod q^{k_j} / [k_j]^{s_j}`.
pub fn zeta_star_q_direct(s: &[u32], q: &QPoint, eps: &Rational, config: &SeriesConfig) -> Result<BoundedValue, SeriesError> {
    Series::zeta_star(s)?.evaluate(q, eps, config)
}

/// `ẑ_q[s; t] = sum_k q^{k^2 + (t_1-1)k} (1 + q^k) / [k]^{s_1} H_{k-1}[s_2, ...; t_2, ...]`.
pub fn zhat_q(s: &[i64], t: &[i64], q: &QPoint, eps: &Rational, config: &SeriesConfig) -> Result<BoundedValue, SeriesError> {
    Series::zhat(s, t)?.evaluate(q, eps, config)
}

/// `z̄_q[s; t] = sum_{k_1 > ... > k_r >= 1} (-1)^{k_r - 1} q^{k_1^2 - k_r(k_r-1)/2} prod factor_j(k_j)`.
pub fn zbar_q(s: &[i64], t: &[i64], q: &QPoint, eps: &Rational, config: &SeriesConfig) -> Result<BoundedValue, SeriesError> {
    Series::zbar(s, t)?.evaluate(q, eps, config)
}

/// The series of the two-one formula for `s`, one per composition in mask order.
pub fn two_one_series(s: &IndexString) -> Result<Vec<(CompositionString, Series)>, SeriesError> {
    enumerate_compositions(s)?
        .into_iter()
        .map(|c| {
            let (p, pt) = c.signed();
            let series = match s.ending() {
                Ending::One => Series::zhat(&p, &pt)?,
                Ending::Two => Series::zbar(&p, &pt)?,
            };
            Ok((c, series))
        })
        .collect()
}

/// Every composition's series evaluated with an equal share `eps / 2^(B-1)`
/// of the budget, in mask order.
pub fn two_one_parts(
    s: &IndexString,
    q: &QPoint,
    eps: &Rational,
    config: &SeriesConfig,
) -> Result<Vec<(CompositionString, Series, BoundedValue)>, SeriesError> {
    check_eps(eps)?;
    let parts = two_one_series(s)?;
    let share = Rational::from(eps / parts.len() as u64);
    parts
        .into_par_iter()
        .map(|(c, series)| {
            let value = series.evaluate(q, &share, config)?;
            Ok((c, series, value))
        })
        .collect()
}

/// `ζ*_q` on a two-one string via the sum of `ẑ_q` (strings ending with 1)
/// or `z̄_q` (strings ending with 2) over all compositions.
pub fn two_one_eval(s: &IndexString, q: &QPoint, eps: &Rational, config: &SeriesConfig) -> Result<BoundedValue, SeriesError> {
    let parts = two_one_parts(s, q, eps, config)?;
    let zero = BoundedValue { partial_sum: Rational::new(), tail_bound: Rational::new(), terms_used: 1 };
    Ok(parts.iter().fold(zero, |acc, (_, _, v)| acc.combine(v)))
}

/// Rigorous enclosure of `ζ(w)`, `w >= 2`, returned as midpoint and half-width.
pub fn zeta_classical(w: u32, eps: &Rational) -> Result<BoundedValue, SeriesError> {
    check_eps(eps)?;
    if w < 2 {
        return Err(SeriesError::Unsupported(format!("zeta({w}) diverges")));
    }
    let wm1 = Rational::from(w - 1);
    let tail_bounds = |n: u64| {
        let lower = Rational::from((1, int_pow(n + 1, w - 1))) / &wm1 + Rational::from((1, int_pow(n + 1, w) * 2u32));
        let upper = Rational::from((int_pow(2, w - 1), int_pow(2 * n + 1, w - 1))) / &wm1;
        (lower, upper)
    };
    let mut n: u64 = 16;
    while {
        let (lower, upper) = tail_bounds(n);
        upper - lower > *eps
    } {
        n *= 2;
    }
    // fixed point with 2^-bits resolution: n rounding errors of at most 2^-bits each
    let bits = n.ilog2() + 2 + (ln_rational(&Rational::from(eps.recip_ref())) / LN_2).ceil().max(0.0) as u32;
    let scale = Integer::from(Integer::u_pow_u(2, bits));
    let mut floor_sum = Integer::new();
    let mut ceil_sum = Integer::new();
    for k in 1..=n {
        let kw = int_pow(k, w);
        let (quot, rem) = Integer::from(&scale).div_rem_floor(kw);
        floor_sum += &quot;
        ceil_sum += quot;
        if rem != 0 {
            ceil_sum += 1;
        }
    }
    let (lower, upper) = tail_bounds(n);
    let lo = Rational::from((floor_sum, scale.clone())) + lower;
    let hi = Rational::from((ceil_sum, scale)) + upper;
    let partial_sum = Rational::from(&lo + &hi) / 2u32;
    let tail_bound = (hi - lo) / 2u32;
    Ok(BoundedValue { partial_sum, tail_bound, terms_used: n })
}

/// The classical value that `ζ*_q` on a two-one string tends to as `q -> 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitTarget {
    /// `ζ*({2}^a, 1) = 2 ζ(2a + 1)`, `a >= 1`.
    TwiceOddZeta { a: u32 },
    /// `ζ*({2}^b) = 2 (1 - 2^{1-2b}) ζ(2b)`, `b >= 1`.
    EvenZeta { b: u32 },
}

impl LimitTarget {
    pub fn for_string(s: &IndexString) -> Result<Self, SeriesError> {
        match (s.ending(), s.exponents()) {
            (Ending::One, &[a]) if a >= 1 => Ok(LimitTarget::TwiceOddZeta { a }),
            (Ending::One, &[0]) => Err(SeriesError::Unsupported(format!("{s} (the classical series diverges)"))),
            (Ending::Two, &[b]) => Ok(LimitTarget::EvenZeta { b }),
            _ => Err(SeriesError::Unsupported(format!("{s} (no single-zeta classical value)"))),
        }
    }

    fn weight_and_factor(&self) -> (u32, Rational) {
        match *self {
            LimitTarget::TwiceOddZeta { a } => (2 * a + 1, Rational::from(2)),
            LimitTarget::EvenZeta { b } => {
                let half_power = Rational::from((1, Integer::from(Integer::u_pow_u(2, 2 * b - 1))));
                (2 * b, 2 * (1 - half_power))
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            LimitTarget::TwiceOddZeta { a } => format!("2*zeta({})", 2 * a + 1),
            LimitTarget::EvenZeta { b } => format!("2*(1-2^{})*zeta({})", 1 - 2 * i64::from(b), 2 * b),
        }
    }

    pub fn evaluate(&self, eps: &Rational) -> Result<BoundedValue, SeriesError> {
        let (w, factor) = self.weight_and_factor();
        let z = zeta_classical(w, &Rational::from(eps / &factor))?;
        Ok(BoundedValue {
            partial_sum: z.partial_sum * &factor,
            tail_bound: z.tail_bound * &factor,
            terms_used: z.terms_used,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitRow {
    pub q: QPoint,
    pub value: BoundedValue,
    /// `|value.partial_sum - target.partial_sum|`.
    pub distance: Rational,
    /// Combined tail bounds of the value and the target.
    pub uncertainty: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitProbe {
    pub string: IndexString,
    pub target: LimitTarget,
    pub target_value: BoundedValue,
    pub rows: Vec<LimitRow>,
}

impl LimitProbe {
    /// True when the true distances provably decrease along the rows:
    /// `d_{i+1} + u_{i+1} < d_i - u_i` for each consecutive pair.
    pub fn distances_decrease(&self) -> bool {
        self.rows.windows(2).all(|w| {
            Rational::from(&w[1].distance + &w[1].uncertainty) < Rational::from(&w[0].distance - &w[0].uncertainty)
        })
    }
}

/// Largest tail bound allowed for the classical target.
pub fn target_eps() -> Rational {
    Rational::from((1, int_pow(10, 15)))
}

/// Evaluates the two-one formula at each `q` and reports the distance to the
/// classical value. Makes no claim about the rate of convergence.
pub fn limit_probe(s: &IndexString, q_list: &[QPoint], eps: &Rational, config: &SeriesConfig) -> Result<LimitProbe, SeriesError> {
    check_eps(eps)?;
    let target = LimitTarget::for_string(s)?;
    let t_eps = if *eps < target_eps() { eps.clone() } else { target_eps() };
    let target_value = target.evaluate(&t_eps)?;
    let rows = q_list
        .iter()
        .map(|q| {
            let value = two_one_eval(s, q, eps, config)?;
            let distance = Rational::from(&value.partial_sum - &target_value.partial_sum).abs();
            let uncertainty = Rational::from(&value.tail_bound + &target_value.tail_bound);
            Ok(LimitRow { q: q.clone(), value, distance, uncertainty })
        })
        .collect::<Result<Vec<_>, SeriesError>>()?;
    Ok(LimitProbe { string: s.clone(), target, target_value, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qkernel::parse_rational;

    fn eps30() -> Rational {
        Rational::from((1, int_pow(10, 30)))
    }

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn empty_series_is_one() {
        let q = QPoint::from_ratio(1, 2);
        let v = zeta_star_q_direct(&[], &q, &eps30(), &cfg()).unwrap();
        assert_eq!(v, BoundedValue::exact(Rational::from(1)));
        assert_eq!(zhat_q(&[], &[], &q, &eps30(), &cfg()).unwrap().partial_sum, 1);
    }

    #[test]
    fn zbar_zero_zero_telescopes() {
        for q in [QPoint::from_ratio(1, 2), QPoint::from_ratio(2, 3)] {
            let kernel = QKernel::new(q.clone());
            let series = Series::zbar(&[0], &[0]).unwrap();
            for big_k in 1..=50u64 {
                let k = big_k as i64;
                let closed = if big_k % 2 == 1 { 1 + kernel.q_pow(k * (k + 1) / 2) } else { 1 - kernel.q_pow(k * (k + 1) / 2) };
                assert_eq!(series.partial(&kernel, big_k), closed);
            }
            let v = series.evaluate(&q, &eps30(), &cfg()).unwrap();
            assert!(v.tail_bound <= eps30());
            assert!(BoundedValue::exact(Rational::from(1)).consistent_with(&v));
        }
    }

    #[test]
    fn zhat_first_term() {
        let q = QKernel::new(QPoint::from_ratio(1, 3));
        let series = Series::zhat(&[3], &[2]).unwrap();
        let qv = q.q().value().clone();
        assert_eq!(series.partial(&q, 1), Rational::from(&qv * &qv) * (1 + qv));
    }

    #[test]
    fn eq10_series_for_two_one() {
        let q = QPoint::from_ratio(1, 2);
        let kernel = QKernel::new(q.clone());
        let s = IndexString::ends_with_one(&[1]).unwrap();
        let parts = two_one_parts(&s, &q, &eps30(), &cfg()).unwrap();
        assert_eq!(parts.len(), 1);
        let (_, series, value) = &parts[0];
        let direct: Rational = (1..=value.terms_used as u32)
            .map(|k| {
                let k64 = i64::from(k);
                (1 + kernel.q_pow(k64)) * kernel.q_pow(k64 * (k64 + 1)) * kernel.q_int_pow(k, -3)
            })
            .sum();
        assert_eq!(series.partial(&kernel, value.terms_used), direct);
    }

    #[test]
    fn corollary_cross_checks() {
        for q in [QPoint::from_ratio(1, 2), QPoint::from_ratio(2, 3)] {
            for a in 1..3u32 {
                let hat = zhat_q(&[2 * i64::from(a) + 1], &[i64::from(a) + 1], &q, &eps30(), &cfg()).unwrap();
                let mut s = vec![2; a as usize];
                s.push(1);
                let direct = zeta_star_q_direct(&s, &q, &eps30(), &cfg()).unwrap();
                assert!(hat.consistent_with(&direct), "a = {a}");
                let bar = zbar_q(&[2 * i64::from(a)], &[i64::from(a)], &q, &eps30(), &cfg()).unwrap();
                let twos = zeta_star_q_direct(&vec![2; a as usize], &q, &eps30(), &cfg()).unwrap();
                assert!(bar.consistent_with(&twos), "a = {a}");
            }
        }
    }

    #[test]
    fn tails_are_sound_and_additive() {
        let q = QPoint::from_ratio(2, 3);
        let kernel = QKernel::new(q.clone());
        let eps = Rational::from((1, 10_000_000_000u64));
        for text in ["1", "2,1", "1,1", "2", "1,2", "2,1,2"] {
            let s = IndexString::parse(text).unwrap().unwrap();
            let parts = two_one_parts(&s, &q, &eps, &cfg()).unwrap();
            let total: Rational = parts.iter().map(|(_, _, v)| v.tail_bound.clone()).sum();
            assert!(total <= eps);
            for (_, series, v) in &parts {
                let longer = series.partial(&kernel, 2 * v.terms_used);
                assert!(Rational::from(&longer - &v.partial_sum).abs() < v.tail_bound, "{text}");
            }
            let direct = Series::zeta_star(&s.expanded()).unwrap();
            let d = direct.evaluate(&q, &eps, &cfg()).unwrap();
            assert!(Rational::from(&direct.partial(&kernel, 2 * d.terms_used) - &d.partial_sum).abs() < d.tail_bound);
        }
    }

    #[test]
    fn errors() {
        let q = QPoint::from_ratio(1, 2);
        assert!(matches!(zeta_star_q_direct(&[2], &q, &Rational::new(), &cfg()), Err(SeriesError::NonPositiveEps(_))));
        let tiny = SeriesConfig { term_cap: 5 };
        assert!(matches!(zeta_star_q_direct(&[2, 1], &q, &eps30(), &tiny), Err(SeriesError::TermCap { .. })));
        assert!(zeta_star_q_direct(&[0, 1], &q, &eps30(), &cfg()).is_err());
        assert!(zhat_q(&[1], &[], &q, &eps30(), &cfg()).is_err());
    }

    #[test]
    fn classical_zeta_encloses_known_values() {
        let eps = target_eps();
        let z3 = zeta_classical(3, &eps).unwrap();
        let known = parse_rational("1.2020569031595942853997381615114499907649862923405").unwrap();
        assert!(z3.tail_bound <= eps);
        assert!(Rational::from(&z3.partial_sum - &known).abs() <= z3.tail_bound);
        let z2 = zeta_classical(2, &eps).unwrap();
        let known2 = parse_rational("1.6449340668482264364724151666460251892189499012068").unwrap();
        assert!(Rational::from(&z2.partial_sum - &known2).abs() <= z2.tail_bound);
        assert!(zeta_classical(1, &eps).is_err());
    }

    #[test]
    fn limit_targets() {
        let parse = |t: &str| IndexString::parse(t).unwrap().unwrap();
        assert_eq!(LimitTarget::for_string(&parse("2,1")).unwrap(), LimitTarget::TwiceOddZeta { a: 1 });
        assert_eq!(LimitTarget::for_string(&parse("2,2,1")).unwrap(), LimitTarget::TwiceOddZeta { a: 2 });
        assert_eq!(LimitTarget::for_string(&parse("2")).unwrap(), LimitTarget::EvenZeta { b: 1 });
        for bad in ["1", "1,2", "2,1,2", "2,1,2,1"] {
            assert!(matches!(LimitTarget::for_string(&parse(bad)), Err(SeriesError::Unsupported(_))), "{bad}");
        }
        // 2(1 - 2^{-1}) zeta(2) is zeta(2)
        let even = LimitTarget::EvenZeta { b: 1 }.evaluate(&target_eps()).unwrap();
        let z2 = zeta_classical(2, &target_eps()).unwrap();
        assert!(even.consistent_with(&z2));
    }

    #[test]
    fn limit_probe_reports_distances() {
        let s = IndexString::ends_with_two(&[1]).unwrap();
        let qs = [QPoint::from_ratio(1, 2), QPoint::from_ratio(9, 10)];
        let eps = Rational::from((1, 1_000_000_000_000u64));
        let probe = limit_probe(&s, &qs, &eps, &cfg()).unwrap();
        assert_eq!(probe.rows.len(), 2);
        assert!(probe.distances_decrease());
    }
}
