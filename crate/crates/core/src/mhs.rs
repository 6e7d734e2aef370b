//! Finite multiple harmonic sums and their q-analogues.
//!
//! * `H*_n[s]`: non-strict nested sum `n >= k_1 >= ... >= k_m >= 1` of
//!   `prod q^{k_j} / [k_j]^{s_j}`.
//! * `H_n[s; t]` ([`script_h`]): strict nested sum of
//!   `prod q^{(t_j - 1) k_j} (1 + q^{k_j}) / [k_j]^{s_j}`.
//! * `Ĥ_n[s; t]` ([`hat_h`]) and `H̄_n[s; t]` ([`bar_h`]): the same strict
//!   products weighted by `B(n, k_1)` with the extra powers of `q` that make
//!   the two-one identities work.
//!
//! All of them are generic over [`QArith`], so the same code also evaluates
//! at `q = 1`. The classical sums in [`classical_sums`] are a separate integer
//! code path used as the independent side of the `q -> 1` identities.

use rug::ops::NegAssign;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::qkernel::{QArith, QKernel};
use crate::strings::Ending;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MhsError {
    #[error("exponent s_{index} = {value} must be positive")]
    NonPositiveExponent { index: usize, value: i64 },
    #[error("s has {s} entries but t has {t}")]
    LengthMismatch { s: usize, t: usize },
    #[error("A_(n,k) requires 1 <= k <= n, got n = {n}, k = {k}")]
    AuxIndex { n: u32, k: u32 },
    #[error("{0:?} takes no t exponents")]
    UnexpectedT(Family),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    HStar,
    ScriptH,
    HatH,
    BarH,
    HStarClassical,
    HatHClassical,
    BarHClassical,
}

/// Selector and parameters of one finite sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSpec {
    pub family: Family,
    pub n: u32,
    pub s: Vec<i64>,
    pub t: Vec<i64>,
}

impl SumSpec {
    pub fn new(family: Family, n: u32, s: Vec<i64>, t: Vec<i64>) -> Result<Self, MhsError> {
        match family {
            Family::ScriptH | Family::HatH | Family::BarH => {
                if s.len() != t.len() {
                    return Err(MhsError::LengthMismatch { s: s.len(), t: t.len() });
                }
            }
            _ => {
                if !t.is_empty() {
                    return Err(MhsError::UnexpectedT(family));
                }
                check_positive(&s)?;
            }
        }
        Ok(SumSpec { family, n, s, t })
    }

    /// Evaluates the sum; classical families ignore the kernel's `q`.
    pub fn evaluate(&self, kernel: &QKernel) -> Result<Rational, MhsError> {
        let positive = || self.s.iter().map(|&x| x as u32).collect::<Vec<_>>();
        match self.family {
            Family::HStar => h_star(kernel, self.n, &self.s),
            Family::ScriptH => script_h(kernel, self.n, &self.s, &self.t),
            Family::HatH => hat_h(kernel, self.n, &self.s, &self.t),
            Family::BarH => bar_h(kernel, self.n, &self.s, &self.t),
            family => classical_sums(family, self.n, &positive()),
        }
    }
}

fn check_positive(s: &[i64]) -> Result<(), MhsError> {
    match s.iter().position(|&x| x <= 0) {
        Some(i) => Err(MhsError::NonPositiveExponent { index: i + 1, value: s[i] }),
        None => Ok(()),
    }
}

fn check_lengths(s: &[i64], t: &[i64]) -> Result<(), MhsError> {
    if s.len() == t.len() {
        Ok(())
    } else {
        Err(MhsError::LengthMismatch { s: s.len(), t: t.len() })
    }
}

/// `q^{(t-1)k} (1 + q^k) / [k]^s`.
pub(crate) fn strict_factor<A: QArith>(a: &A, k: u32, s: i64, t: i64) -> Rational {
    let k64 = i64::from(k);
    let mut f = a.q_pow((t - 1) * k64) * (1 + a.q_pow(k64));
    f *= a.q_int_pow(k, -s);
    f
}

// Strict nested sums over n >= k_1 > ... > k_r >= 1 for every n in 0..=n_max.
// levels[j][k] is the level-j factor at index k (index 0 unused).
fn strict_table(levels: &[Vec<Rational>], n_max: u32) -> Vec<Rational> {
    let len = n_max as usize + 1;
    let mut below = vec![Rational::from(1); len];
    for level in levels.iter().rev() {
        let mut acc = vec![Rational::new(); len];
        for k in 1..len {
            let term = Rational::from(&level[k] * &below[k - 1]);
            acc[k] = term + &acc[k - 1];
        }
        below = acc;
    }
    below
}

fn factor_levels<A: QArith>(a: &A, n_max: u32, s: &[i64], t: &[i64]) -> Vec<Vec<Rational>> {
    s.iter()
        .zip(t)
        .map(|(&sj, &tj)| {
            std::iter::once(Rational::new())
                .chain((1..=n_max).map(|k| strict_factor(a, k, sj, tj)))
                .collect()
        })
        .collect()
}

/// `H_k[s; t]` for every `k` in `0..=n_max`.
pub(crate) fn script_h_table<A: QArith>(a: &A, n_max: u32, s: &[i64], t: &[i64]) -> Vec<Rational> {
    strict_table(&factor_levels(a, n_max, s, t), n_max)
}

/// The inner sums of `H̄` and of the barred series: for every `N` in
/// `0..=n_max`, the strict sum over `N >= k_2 > ... > k_m >= 1` of
/// `(-1)^{k_m} q^{-k_m(k_m-1)/2} prod_{j>=2} factor_j(k_j)`.
pub(crate) fn bar_inner_table<A: QArith>(a: &A, n_max: u32, s: &[i64], t: &[i64]) -> Vec<Rational> {
    let mut levels = factor_levels(a, n_max, s, t);
    if let Some(last) = levels.last_mut() {
        for (k, f) in last.iter_mut().enumerate().skip(1) {
            let k = k as i64;
            *f *= a.q_pow(-k * (k - 1) / 2);
            if k % 2 == 1 {
                f.neg_assign();
            }
        }
    }
    strict_table(&levels, n_max)
}

/// `H*_k[s]` for every `k` in `0..=n_max`.
pub(crate) fn h_star_table<A: QArith>(a: &A, n_max: u32, s: &[i64]) -> Result<Vec<Rational>, MhsError> {
    check_positive(s)?;
    let len = n_max as usize + 1;
    let mut inner = vec![Rational::from(1); len];
    for &sj in s.iter().rev() {
        let mut acc = vec![Rational::new(); len];
        for k in 1..len {
            let kk = k as u32;
            let term = a.q_pow(i64::from(kk)) * a.q_int_pow(kk, -sj) * &inner[k];
            acc[k] = term + &acc[k - 1];
        }
        inner = acc;
    }
    Ok(inner)
}

/// `H*_n[s]` from the definition.
pub fn h_star<A: QArith>(a: &A, n: u32, s: &[i64]) -> Result<Rational, MhsError> {
    Ok(h_star_table(a, n, s)?.swap_remove(n as usize))
}

/// `H*_n` on the two-one string with the given exponent data, computed by
/// peeling off the leading run of 2s:
///
/// `H*_n[{2}^l, 1, R] = sum_{l'=0}^{l} q^{n(l-l')} / [n]^{2(l-l')} H*_{n-1}[{2}^{l'}, 1, R]
///                      + q^{(l+1)n} / [n]^{2l+1} H*_n[R]`
///
/// and, for a final run, `H*_n[{2}^l] = sum_{l'} q^{n(l-l')} / [n]^{2(l-l')} H*_{n-1}[{2}^{l'}]`.
/// Empty exponent data with [`Ending::One`] is the empty string.
pub fn h_star_recurrence<A: QArith>(a: &A, n: u32, exponents: &[u32], ending: Ending) -> Rational {
    let blocks = exponents.len();
    let is_final_run = |i: usize| ending == Ending::Two && i + 1 == blocks;
    // state[i][l] = H*_N[{2}^l, (1), blocks i+1..] at the current N; index
    // `blocks` is the empty suffix.
    let empty_at_zero = |i: usize, l: u32| i == blocks || (is_final_run(i) && l == 0);
    let mut prev: Vec<Vec<Rational>> = (0..=blocks)
        .map(|i| {
            let top = if i == blocks { 0 } else { exponents[i] };
            (0..=top)
                .map(|l| if empty_at_zero(i, l) { Rational::from(1) } else { Rational::new() })
                .collect()
        })
        .collect();
    for level in 1..=n {
        let mut cur: Vec<Vec<Rational>> = prev.iter().map(|row| vec![Rational::new(); row.len()]).collect();
        cur[blocks][0] = Rational::from(1);
        let nn = i64::from(level);
        let lead = a.q_pow(nn) * a.q_int_pow(level, -2);
        for i in (0..blocks).rev() {
            for l in 0..=exponents[i] as usize {
                let mut acc = Rational::new();
                let mut weight = Rational::from(1);
                // weight = (q^n / [n]^2)^(l - l'), walking l' downwards
                for lp in (0..=l).rev() {
                    acc += Rational::from(&weight * &prev[i][lp]);
                    weight *= &lead;
                }
                if !is_final_run(i) {
                    let rest = if i + 1 == blocks { Rational::from(1) } else { cur[i + 1][exponents[i + 1] as usize].clone() };
                    let l = l as i64;
                    let coeff = a.q_pow((l + 1) * nn) * a.q_int_pow(level, -(2 * l + 1));
                    acc += coeff * rest;
                }
                cur[i][l] = acc;
            }
        }
        prev = cur;
    }
    if blocks == 0 {
        Rational::from(1)
    } else {
        prev[0][exponents[0] as usize].clone()
    }
}

/// `H_n[s; t]`; any integer exponents are allowed.
pub fn script_h<A: QArith>(a: &A, n: u32, s: &[i64], t: &[i64]) -> Result<Rational, MhsError> {
    check_lengths(s, t)?;
    Ok(script_h_table(a, n, s, t).swap_remove(n as usize))
}

/// `Ĥ_n[s; t] = sum_{k=1}^n B(n,k) q^{k^2 + (t_1 - 1)k} (1 + q^k) / [k]^{s_1} H_{k-1}[s_2..; t_2..]`.
pub fn hat_h<A: QArith>(a: &A, n: u32, s: &[i64], t: &[i64]) -> Result<Rational, MhsError> {
    check_lengths(s, t)?;
    if s.is_empty() {
        return Ok(Rational::from(1));
    }
    if n == 0 {
        return Ok(Rational::new());
    }
    let inner = script_h_table(a, n - 1, &s[1..], &t[1..]);
    let mut total = Rational::new();
    for k in 1..=n {
        let k64 = i64::from(k);
        let mut term = a.weight(n, k) * a.q_pow(k64 * k64);
        term *= strict_factor(a, k, s[0], t[0]);
        term *= &inner[k as usize - 1];
        total += term;
    }
    Ok(total)
}

/// `H̄_n[s; t]`: strict sum of
/// `(-1)^{k_m} B(n, k_1) q^{k_1^2 - k_m(k_m-1)/2} prod factor_j(k_j)`.
pub fn bar_h<A: QArith>(a: &A, n: u32, s: &[i64], t: &[i64]) -> Result<Rational, MhsError> {
    check_lengths(s, t)?;
    if s.is_empty() {
        return Ok(Rational::from(1));
    }
    if n == 0 {
        return Ok(Rational::new());
    }
    let mut total = Rational::new();
    if s.len() == 1 {
        for k in 1..=n {
            let k64 = i64::from(k);
            let mut term = a.weight(n, k) * a.q_pow(k64 * k64 - k64 * (k64 - 1) / 2);
            term *= strict_factor(a, k, s[0], t[0]);
            if k % 2 == 1 {
                total -= term;
            } else {
                total += term;
            }
        }
        return Ok(total);
    }
    let inner = bar_inner_table(a, n - 1, &s[1..], &t[1..]);
    for k in 1..=n {
        let k64 = i64::from(k);
        let mut term = a.weight(n, k) * a.q_pow(k64 * k64);
        term *= strict_factor(a, k, s[0], t[0]);
        term *= &inner[k as usize - 1];
        total += term;
    }
    Ok(total)
}

/// `A_{n,k} = (1 + q^k) B(n, k) q^{k(k-1)/2}` for `1 <= k <= n`.
pub fn aux_a(kernel: &QKernel, n: u32, k: u32) -> Result<Rational, MhsError> {
    if k == 0 || k > n {
        return Err(MhsError::AuxIndex { n, k });
    }
    let k64 = i64::from(k);
    Ok((1 + kernel.q_pow(k64)) * kernel.weight(n, k) * kernel.q_pow(k64 * (k64 - 1) / 2))
}

/// `V_k(2s) = sum_{j=1}^k (-1)^j (1 + q^j) q^{sj - j(j+1)/2} / [j]^{2s}`; `V_0 = 0`.
pub fn aux_v<A: QArith>(a: &A, k: u32, s: i64) -> Rational {
    let mut total = Rational::new();
    for j in 1..=k {
        let j64 = i64::from(j);
        let term = (1 + a.q_pow(j64)) * a.q_pow(s * j64 - j64 * (j64 + 1) / 2) * a.q_int_pow(j, -2 * s);
        if j % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

fn reciprocal_power(k: u32, p: u32) -> Rational {
    Rational::from((Integer::from(1), Integer::from(Integer::u_pow_u(k, p))))
}

fn classical_binomial_ratio(n: u32, k: u32) -> Rational {
    Rational::from((
        Integer::from(Integer::binomial_u(n, k)),
        Integer::from(Integer::binomial_u(n + k, n)),
    ))
}

/// Strict classical sums over `n >= k_1 > ... > k_r >= 1`, indexed by `n`.
fn classical_strict(n_max: u32, p: &[u32], alternate_last: bool) -> Vec<Rational> {
    let len = n_max as usize + 1;
    let mut below = vec![Rational::from(1); len];
    for (depth, &pj) in p.iter().enumerate().rev() {
        let signed = alternate_last && depth + 1 == p.len();
        let mut acc = vec![Rational::new(); len];
        for k in 1..len {
            let mut term = reciprocal_power(k as u32, pj) * &below[k - 1];
            // (-1)^{k_r - 1}
            if signed && k % 2 == 0 {
                term = -term;
            }
            acc[k] = term + &acc[k - 1];
        }
        below = acc;
    }
    below
}

/// The classical (`q = 1`) sums:
///
/// * `H*_n(p) = sum_{n >= k_1 >= ... >= k_r >= 1} 1/(k_1^{p_1} ... k_r^{p_r})`
/// * `Ĥ_n(p)`: strict, weighted by `C(n, k_1) / C(n + k_1, n)`
/// * `H̄_n(p)`: as `Ĥ_n` with the extra sign `(-1)^{k_r - 1}`
pub fn classical_sums(family: Family, n: u32, p: &[u32]) -> Result<Rational, MhsError> {
    if let Some(i) = p.iter().position(|&x| x == 0) {
        return Err(MhsError::NonPositiveExponent { index: i + 1, value: 0 });
    }
    if p.is_empty() {
        return Ok(Rational::from(1));
    }
    match family {
        Family::HStarClassical => {
            let mut inner = vec![Rational::from(1); n as usize + 1];
            for &pj in p.iter().rev() {
                let mut acc = Rational::new();
                let mut next = vec![Rational::new(); n as usize + 1];
                for k in 1..=n {
                    acc += reciprocal_power(k, pj) * &inner[k as usize];
                    next[k as usize] = acc.clone();
                }
                inner = next;
            }
            Ok(inner.swap_remove(n as usize))
        }
        Family::HatHClassical | Family::BarHClassical => {
            let alternate = family == Family::BarHClassical;
            if n == 0 {
                return Ok(Rational::new());
            }
            let mut total = Rational::new();
            if p.len() == 1 {
                for k in 1..=n {
                    let mut term = classical_binomial_ratio(n, k) * reciprocal_power(k, p[0]);
                    if alternate && k % 2 == 0 {
                        term = -term;
                    }
                    total += term;
                }
                return Ok(total);
            }
            let inner = classical_strict(n - 1, &p[1..], alternate);
            for k in 1..=n {
                total += classical_binomial_ratio(n, k) * reciprocal_power(k, p[0]) * &inner[k as usize - 1];
            }
            Ok(total)
        }
        other => panic!("{other:?} is not a classical family"),
    }
}
