//! Exact rational arithmetic and the q-combinatorial primitives: q-integers,
//! q-Pochhammer symbols, Gaussian binomials and the binomial weight
//! `B(n, k) = [n, k] / [n + k, k]`.
//!
//! Every quantity is evaluated at a fixed rational point `0 < q < 1`. A
//! [`QKernel`] owns one such point together with a memo table; the sums in
//! [`crate::mhs`] are written against the [`QArith`] trait so that the same
//! code can also be driven at the classical point `q = 1` through [`QOne`].

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
pub use rug::Rational;
use rug::{Complete, Integer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("q must satisfy 0 < q < 1, got {0}")]
    QOutOfRange(String),
    #[error("binomial weight B({n}, {k}) requires 0 <= k <= n")]
    WeightIndex { n: u32, k: u32 },
    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),
}

/// Parses an exact rational from `"num/den"`, an integer, or a terminating
/// decimal such as `"0.7"` or `"-1.25"`. Exponent notation is not accepted.
pub fn parse_rational(text: &str) -> Result<Rational, KernelError> {
    let text = text.trim();
    let err = || KernelError::Parse(text.to_string());
    if text.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: Integer = num.trim().parse().map_err(|_| err())?;
        let den: Integer = den.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        return Ok(Rational::from((num, den)));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let num: Integer = if digits.is_empty() { Integer::new() } else { digits.parse().map_err(|_| err())? };
    let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
    let value = Rational::from((num, den));
    Ok(if negative { -value } else { value })
}

/// Renders a rational as `"num/den"`, always with an explicit denominator.
pub fn exact_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// A point `q` with `0 < q < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoint(Rational);

impl QPoint {
    pub fn new(q: Rational) -> Result<Self, KernelError> {
        if q > 0 && q < 1 {
            Ok(QPoint(q))
        } else {
            Err(KernelError::QOutOfRange(q.to_string()))
        }
    }

    /// Shorthand for `num/den`; panics when the fraction is not in (0, 1).
    pub fn from_ratio(num: i64, den: i64) -> Self {
        QPoint::new(Rational::from((num, den))).expect("q in (0, 1)")
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl FromStr for QPoint {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QPoint::new(parse_rational(s)?)
    }
}

impl fmt::Display for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Arithmetic at a single evaluation point of the q-deformation.
///
/// The nested sums only ever touch `q` through these four primitives, which
/// lets them run unchanged at `q = 1`.
pub trait QArith {
    /// `q^e` for any integer `e`.
    fn q_pow(&self, e: i64) -> Rational;
    /// `[n]_q = 1 + q + ... + q^(n-1)`.
    fn q_int(&self, n: u32) -> Rational;
    /// `[n]_q^s`; `n >= 1` is required when `s < 0`.
    fn q_int_pow(&self, n: u32, s: i64) -> Rational;
    /// `B(n, k)`, extended by zero for `k > n`.
    fn weight(&self, n: u32, k: u32) -> Rational;
}

#[derive(Default)]
struct MemoTable {
    powers: HashMap<i64, Rational>,
    q_ints: HashMap<u32, Rational>,
    q_int_powers: HashMap<(u32, i64), Rational>,
    // Pascal rows: gauss_rows[n][m] = [n, m] for 0 <= m <= n.
    gauss_rows: Vec<Vec<Rational>>,
}

/// The primitives at one fixed `q`, with optional memoization.
///
/// The memo table lives behind a `RefCell`, so a kernel belongs to one task;
/// concurrent callers create one kernel each.
pub struct QKernel {
    q: QPoint,
    memo: Option<RefCell<MemoTable>>,
}

impl QKernel {
    pub fn new(q: QPoint) -> Self {
        QKernel { q, memo: Some(RefCell::new(MemoTable::default())) }
    }

    /// A kernel that recomputes every value from scratch.
    pub fn uncached(q: QPoint) -> Self {
        QKernel { q, memo: None }
    }

    pub fn q(&self) -> &QPoint {
        &self.q
    }

    fn raw_pow(&self, e: i64) -> Rational {
        let q = self.q.value();
        let magnitude = u32::try_from(e.unsigned_abs()).expect("exponent fits in u32");
        let p = Rational::from(q.pow(magnitude));
        if e < 0 {
            p.recip()
        } else {
            p
        }
    }

    fn raw_q_int(&self, n: u32) -> Rational {
        let one_minus_q = Rational::from(1 - self.q.value());
        (1 - self.q_pow(i64::from(n))) / one_minus_q
    }

    /// `(a; q)_n = prod_{k=0}^{n-1} (1 - a q^k)`; `(a; q)_0 = 1`.
    pub fn q_pochhammer(&self, a: &Rational, n: u32) -> Rational {
        let mut acc = Rational::from(1);
        for k in 0..n {
            acc *= 1 - Rational::from(a * &self.q_pow(i64::from(k)));
        }
        acc
    }

    fn pascal_rows(&self, upto: usize, rows: &mut Vec<Vec<Rational>>) {
        if rows.is_empty() {
            rows.push(vec![Rational::from(1)]);
        }
        while rows.len() <= upto {
            let n = rows.len();
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(Rational::from(1));
            for m in 1..n {
                // [n, m] = [n-1, m-1] + q^m [n-1, m]
                let shifted = Rational::from(&prev[m] * &self.q_pow(m as i64));
                row.push(shifted + &prev[m - 1]);
            }
            row.push(Rational::from(1));
            rows.push(row);
        }
    }

    /// Gaussian binomial `[n, m]`: `(q)_n / ((q)_m (q)_{n-m})` for
    /// `0 <= m <= n` and zero otherwise. Filled by the q-Pascal recurrence.
    pub fn gauss_binomial(&self, n: i64, m: i64) -> Rational {
        if n < 0 || m < 0 || m > n {
            return Rational::new();
        }
        let (n, m) = (n as usize, m as usize);
        match &self.memo {
            Some(memo) => {
                let mut table = memo.borrow_mut();
                let mut rows = std::mem::take(&mut table.gauss_rows);
                drop(table);
                self.pascal_rows(n, &mut rows);
                let value = rows[n][m].clone();
                memo.borrow_mut().gauss_rows = rows;
                value
            }
            None => {
                let mut rows = Vec::new();
                self.pascal_rows(n, &mut rows);
                rows[n][m].clone()
            }
        }
    }

    /// `B(n, k) = [n, k] / [n + k, k]`, defined for `0 <= k <= n`.
    pub fn binomial_weight(&self, n: u32, k: u32) -> Result<Rational, KernelError> {
        if k > n {
            return Err(KernelError::WeightIndex { n, k });
        }
        Ok(self.weight(n, k))
    }
}

impl QArith for QKernel {
    fn q_pow(&self, e: i64) -> Rational {
        let Some(memo) = &self.memo else {
            return self.raw_pow(e);
        };
        if let Some(v) = memo.borrow().powers.get(&e) {
            return v.clone();
        }
        let v = self.raw_pow(e);
        memo.borrow_mut().powers.insert(e, v.clone());
        v
    }

    fn q_int(&self, n: u32) -> Rational {
        let Some(memo) = &self.memo else {
            return self.raw_q_int(n);
        };
        if let Some(v) = memo.borrow().q_ints.get(&n) {
            return v.clone();
        }
        let v = self.raw_q_int(n);
        memo.borrow_mut().q_ints.insert(n, v.clone());
        v
    }

    fn q_int_pow(&self, n: u32, s: i64) -> Rational {
        let compute = || {
            let base = self.q_int(n);
            let magnitude = u32::try_from(s.unsigned_abs()).expect("exponent fits in u32");
            let p = Rational::from((&base).pow(magnitude));
            if s < 0 {
                p.recip()
            } else {
                p
            }
        };
        let Some(memo) = &self.memo else {
            return compute();
        };
        if let Some(v) = memo.borrow().q_int_powers.get(&(n, s)) {
            return v.clone();
        }
        let v = compute();
        memo.borrow_mut().q_int_powers.insert((n, s), v.clone());
        v
    }

    fn weight(&self, n: u32, k: u32) -> Rational {
        if k > n {
            return Rational::new();
        }
        let top = self.gauss_binomial(i64::from(n), i64::from(k));
        let bottom = self.gauss_binomial(i64::from(n + k), i64::from(k));
        top / bottom
    }
}

/// The classical point `q = 1`: `[n]_1 = n` and `B(n, k) = C(n, k) / C(n + k, k)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct QOne;

impl QArith for QOne {
    fn q_pow(&self, _e: i64) -> Rational {
        Rational::from(1)
    }

    fn q_int(&self, n: u32) -> Rational {
        Rational::from(n)
    }

    fn q_int_pow(&self, n: u32, s: i64) -> Rational {
        let magnitude = u32::try_from(s.unsigned_abs()).expect("exponent fits in u32");
        let p = Rational::from(Integer::u_pow_u(n, magnitude).complete());
        if s < 0 {
            p.recip()
        } else {
            p
        }
    }

    fn weight(&self, n: u32, k: u32) -> Rational {
        if k > n {
            return Rational::new();
        }
        let top = Integer::from(Integer::binomial_u(n, k));
        let bottom = Integer::from(Integer::binomial_u(n + k, k));
        Rational::from((top, bottom))
    }
}
