//! Left and right sides of each identity at one parameter point.

use rug::ops::Pow;
use rug::Rational;

use super::{certificates, Check, IdentityId, Params, VerifyError};
use crate::mhs::{self, classical_sums, Family};
use crate::qkernel::{QArith, QKernel, QOne};
use crate::strings::{enumerate_compositions, Ending, IndexString};

fn constraint(identity: IdentityId, message: impl Into<String>) -> VerifyError {
    VerifyError::Constraint { identity, message: message.into() }
}

fn require(identity: IdentityId, params: &Params, name: &str, min: i64) -> Result<u32, VerifyError> {
    let v = params.get(name).ok_or_else(|| constraint(identity, format!("missing parameter {name}")))?;
    if v < min {
        return Err(constraint(identity, format!("{name} >= {min} required, got {v}")));
    }
    u32::try_from(v).map_err(|_| constraint(identity, format!("{name} = {v} out of range")))
}

fn require_string(identity: IdentityId, params: &Params, ending: Ending) -> Result<IndexString, VerifyError> {
    let s = params.string().ok_or_else(|| constraint(identity, "missing index string"))?;
    if s.ending() != ending {
        let which = if ending == Ending::One { "1" } else { "2" };
        return Err(constraint(identity, format!("string {s} must end with {which}")));
    }
    Ok(s.clone())
}

fn signed(v: &[u32]) -> Vec<i64> {
    v.iter().map(|&x| i64::from(x)).collect()
}

fn alternating(k: u32, x: Rational) -> Rational {
    if k % 2 == 0 {
        x
    } else {
        -x
    }
}

fn check(identity: IdentityId, params: &Params, q: Rational, lhs: Rational, rhs: Rational) -> Check {
    Check { identity: identity.name().to_string(), params: params.clone(), q, lhs, lhs_alt: None, rhs }
}

pub(super) fn evaluate(identity: IdentityId, params: &Params, q: &QKernel) -> Result<Check, VerifyError> {
    if identity.is_classical() {
        return Err(constraint(identity, "classical identity takes no q"));
    }
    let id = identity;
    let (lhs, rhs, lhs_alt) = match identity {
        IdentityId::Eq11 => {
            let n = require(id, params, "n", 1)?;
            let l = require(id, params, "l", 0)?;
            if l > n {
                return Err(constraint(id, format!("l <= n required, got l = {l}, n = {n}")));
            }
            let lhs: Rational = (l + 1..=n)
                .map(|k| {
                    let k64 = i64::from(k);
                    alternating(k, (1 + q.q_pow(k64)) * q.weight(n, k) * q.q_pow(k64 * (k64 - 1) / 2))
                })
                .sum();
            let l64 = i64::from(l);
            let rhs = (q.q_int(l) - q.q_int(n)) / q.q_int(n) * q.weight(n, l) * q.q_pow(l64 * (l64 - 1) / 2);
            (lhs, alternating(l, rhs), None)
        }
        IdentityId::Eq12 => {
            let n = require(id, params, "n", 1)?;
            let l = require(id, params, "l", 0)?;
            if l > n {
                return Err(constraint(id, format!("l <= n required, got l = {l}, n = {n}")));
            }
            let lhs: Rational = (l + 1..=n)
                .map(|k| {
                    let k64 = i64::from(k);
                    (1 + q.q_pow(k64)) * q.q_int(k) * q.weight(n, k) * q.q_pow(k64 * (k64 - 1))
                })
                .sum();
            let l64 = i64::from(l);
            let rhs = (q.q_int(n) - q.q_int(l)) * q.weight(n, l) * q.q_pow(l64 * l64);
            (lhs, rhs, None)
        }
        IdentityId::Eq13 => {
            let n = require(id, params, "n", 1)?;
            let lhs: Rational = (1..=n)
                .map(|k| {
                    let k64 = i64::from(k);
                    (1 + q.q_pow(k64)) * q.q_int_pow(k, -1) * q.weight(n, k) * q.q_pow(k64 * k64)
                })
                .sum();
            let rhs: Rational = (1..=n).map(|m| q.q_pow(i64::from(m)) * q.q_int_pow(m, -1)).sum();
            (lhs, rhs, None)
        }
        IdentityId::Eq14 => {
            let n = require(id, params, "n", 1)?;
            let l = require(id, params, "l", 1)?;
            if l > n {
                return Err(constraint(id, format!("l <= n required, got l = {l}, n = {n}")));
            }
            let lhs: Rational = (l..=n).map(|k| q.q_pow(i64::from(k)) * q.q_int_pow(k, -2) * q.weight(k, l)).sum();
            let rhs = q.q_pow(i64::from(l)) * q.q_int_pow(l, -2) * q.weight(n, l);
            (lhs, rhs, None)
        }
        IdentityId::Cert15 | IdentityId::Cert16 | IdentityId::Cert17 | IdentityId::Cert19 => {
            let (first, min) = match identity {
                IdentityId::Cert15 | IdentityId::Cert16 => ("n", 1),
                IdentityId::Cert17 => ("m", 0),
                _ => ("l", 1),
            };
            let a = require(id, params, first, min)?;
            let k = require(id, params, "k", 1)?;
            let (lhs, rhs) = match identity {
                IdentityId::Cert15 => certificates::cert15(q, a, k),
                IdentityId::Cert16 => certificates::cert16(q, a, k),
                IdentityId::Cert17 => certificates::cert17(q, a, k),
                _ => certificates::cert19(q, a, k),
            };
            (lhs, rhs, None)
        }
        IdentityId::Eq20 => {
            let a = require(id, params, "a", 0)?;
            let n = require(id, params, "n", 1)?;
            let lhs = mhs::h_star(q, n, &vec![2; a as usize])?;
            let a64 = i64::from(a);
            let rhs: Rational = (1..=n)
                .map(|k| {
                    let k64 = i64::from(k);
                    let t = (1 + q.q_pow(k64))
                        * q.q_int_pow(k, -2 * a64)
                        * q.weight(n, k)
                        * q.q_pow(k64 * (k64 - 1) / 2 + a64 * k64);
                    alternating(k + 1, t)
                })
                .sum();
            (lhs, rhs, None)
        }
        IdentityId::Eq21 => {
            let a = require(id, params, "a", 0)?;
            let n = require(id, params, "n", 1)?;
            let s = IndexString::ends_with_one(&[a])?;
            let lhs = mhs::h_star(q, n, &signed(&s.expanded()))?;
            let rhs = eq21_sum(q, n, i64::from(a), |_| Rational::from(1));
            (lhs, rhs, None)
        }
        IdentityId::Eq22 => {
            let a = require(id, params, "a", 0)?;
            let b = require(id, params, "b", 1)?;
            let n = require(id, params, "n", 1)?;
            let s = IndexString::ends_with_two(&[a, b])?;
            let lhs = mhs::h_star(q, n, &signed(&s.expanded()))?;
            let (a64, b64) = (i64::from(a), i64::from(b));
            let first: Rational = (1..=n)
                .map(|k| {
                    let k64 = i64::from(k);
                    let t = (1 + q.q_pow(k64))
                        * q.q_int_pow(k, -(2 * (a64 + b64) + 1))
                        * q.weight(n, k)
                        * q.q_pow(k64 * (k64 + 1) / 2 + (a64 + b64) * k64);
                    alternating(k, t)
                })
                .sum();
            let second = eq21_sum(q, n, a64, |k| mhs::aux_v(q, k - 1, b64));
            (lhs, -first - second, None)
        }
        IdentityId::Eq23 => {
            let a = require(id, params, "a", 0)?;
            let n = require(id, params, "n", 1)?;
            let k = require(id, params, "k", 1)?;
            if k > n {
                return Err(constraint(id, format!("k <= n required, got k = {k}, n = {n}")));
            }
            let (n64, k64, a64) = (i64::from(n), i64::from(k), i64::from(a));
            // A_{n-1,n} = 0 since the Gaussian binomial [n-1, n] vanishes
            let a_prev = if k < n { mhs::aux_a(q, n - 1, k)? } else { Rational::new() };
            let ratio = q.q_int(n) * q.q_int_pow(k, -1);
            let ratio_sq = Rational::from(&ratio * &ratio);
            let step = Rational::from(&ratio_sq * q.q_pow(k64 - n64));
            let mut geometric = Rational::new();
            let mut term = Rational::from(1);
            for _ in 0..=a {
                geometric += &term;
                term *= &step;
            }
            let top = ratio_sq.clone().pow(a) * q.q_pow((k64 - n64) * a64);
            let rhs = mhs::aux_a(q, n, k)? * (top - Rational::from(1 / ratio_sq) * q.q_pow(n64 - k64));
            (a_prev * geometric, rhs, None)
        }
        IdentityId::Eq26 | IdentityId::Eq32 => {
            let ending = if identity == IdentityId::Eq26 { Ending::One } else { Ending::Two };
            let s = require_string(id, params, ending)?;
            let n = require(id, params, "n", 1)?;
            let lhs = mhs::h_star(q, n, &signed(&s.expanded()))?;
            let alt = mhs::h_star_recurrence(q, n, s.exponents(), s.ending());
            let mut rhs = Rational::new();
            for c in enumerate_compositions(&s)? {
                let (p, pt) = c.signed();
                if ending == Ending::One {
                    rhs += mhs::hat_h(q, n, &p, &pt)?;
                } else {
                    rhs -= mhs::bar_h(q, n, &p, &pt)?;
                }
            }
            (lhs, rhs, Some(alt))
        }
        IdentityId::Eq33 | IdentityId::Eq34 => unreachable!("handled above"),
    };
    let mut c = check(identity, params, q.q().value().clone(), lhs, rhs);
    c.lhs_alt = lhs_alt;
    Ok(c)
}

/// `sum_{k=1}^n (1 + q^k) / [k]^{2a+1} B(n,k) q^{k^2 + ak} extra(k)`
fn eq21_sum(q: &QKernel, n: u32, a: i64, extra: impl Fn(u32) -> Rational) -> Rational {
    (1..=n)
        .map(|k| {
            let k64 = i64::from(k);
            (1 + q.q_pow(k64)) * q.q_int_pow(k, -(2 * a + 1)) * q.weight(n, k) * q.q_pow(k64 * k64 + a * k64) * extra(k)
        })
        .sum()
}

/// EQ33 / EQ34 at `q = 1` with integer arithmetic; the left side is also
/// computed by the leading-run recurrence at the classical point.
pub(super) fn evaluate_classical(identity: IdentityId, params: &Params) -> Result<Check, VerifyError> {
    let (ending, family) = match identity {
        IdentityId::Eq33 => (Ending::One, Family::HatHClassical),
        IdentityId::Eq34 => (Ending::Two, Family::BarHClassical),
        _ => return Err(constraint(identity, "not a classical identity")),
    };
    let s = require_string(identity, params, ending)?;
    let n = require(identity, params, "n", 1)?;
    let lhs = classical_sums(Family::HStarClassical, n, &s.expanded())?;
    let alt = mhs::h_star_recurrence(&QOne, n, s.exponents(), s.ending());
    let mut rhs = Rational::new();
    for c in enumerate_compositions(&s)? {
        rhs += classical_sums(family, n, &c.p)? * (1u64 << c.len());
    }
    let mut c = check(identity, params, Rational::from(1), lhs, rhs);
    c.lhs_alt = Some(alt);
    Ok(c)
}
