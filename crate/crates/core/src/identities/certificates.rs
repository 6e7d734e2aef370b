//! WZ-style certificate pairs `(F, G)`. Each pair satisfies a first-order
//! telescoping relation whose sum over `k` yields one of the lemma identities.

use rug::Rational;

use crate::qkernel::{QArith, QKernel};

fn one_minus(x: Rational) -> Rational {
    1 - x
}

fn sign(k: u32) -> i32 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(1 + q^k) B(n,k) (-1)^{k-1} q^{k(k-1)/2}`
pub(crate) fn cert15_f(q: &QKernel, n: u32, k: u32) -> Rational {
    let k64 = i64::from(k);
    (1 + q.q_pow(k64)) * q.weight(n, k) * q.q_pow(k64 * (k64 - 1) / 2) * -sign(k)
}

/// `(q^{n+k} - 1) / (q^k + 1) F(n,k)`
pub(crate) fn cert15_g(q: &QKernel, n: u32, k: u32) -> Rational {
    let k64 = i64::from(k);
    (q.q_pow(i64::from(n) + k64) - 1u32) / (q.q_pow(k64) + 1u32) * cert15_f(q, n, k)
}

/// `B(n,k) (1 - q^{2k}) q^{k(k-1)}`
pub(crate) fn cert16_f(q: &QKernel, n: u32, k: u32) -> Rational {
    let k64 = i64::from(k);
    q.weight(n, k) * one_minus(q.q_pow(2 * k64)) * q.q_pow(k64 * (k64 - 1))
}

/// `(1 - q^{n+k}) / (1 - q^{2k}) F(n,k)`, i.e. `B(n,k)(1 - q^{n+k}) q^{k(k-1)}`
/// (the quotient is taken symbolically so `k = 0` is defined).
pub(crate) fn cert16_g(q: &QKernel, n: u32, k: u32) -> Rational {
    let k64 = i64::from(k);
    q.weight(n, k) * one_minus(q.q_pow(i64::from(n) + k64)) * q.q_pow(k64 * (k64 - 1))
}

/// `B(m,k) (1 + q^k) / (1 - q^k) q^{k^2}`
pub(crate) fn cert17_f(q: &QKernel, m: u32, k: u32) -> Rational {
    let k64 = i64::from(k);
    q.weight(m, k) * (1 + q.q_pow(k64)) / one_minus(q.q_pow(k64)) * q.q_pow(k64 * k64)
}

/// `q^{m-k+1} q^{k^2} prod_{i=2}^{k} (1 - q^{m-k+i}) / ((q;q)_k [m+k, k])`.
///
/// For `k <= m` this is `q^{m-k+1} (1 - q^k) / ((1 + q^k)(1 - q^{m-k+1})) F(m,k)`;
/// that quotient has a pole at `k = m + 1`, and the product form is the
/// continuation that keeps the relation valid past `k = m`.
pub(crate) fn cert17_g(q: &QKernel, m: u32, k: u32) -> Rational {
    let (m64, k64) = (i64::from(m), i64::from(k));
    let mut num = q.q_pow(m64 - k64 + 1) * q.q_pow(k64 * k64);
    for i in 2..=k64 {
        num *= one_minus(q.q_pow(m64 - k64 + i));
    }
    if num == 0 {
        return num;
    }
    let den = q.q_pochhammer(q.q().value(), k) * q.gauss_binomial(m64 + k64, k64);
    num / den
}

/// `q^{k-l} / [k]^2 B(k,l)`
pub(crate) fn cert19_f(q: &QKernel, l: u32, k: u32) -> Rational {
    q.q_pow(i64::from(k) - i64::from(l)) * q.q_int_pow(k, -2) * q.weight(k, l)
}

/// `(1 - q^{k-l})(1 - q^{k+l}) / q^{k-l} F(l,k)`
pub(crate) fn cert19_g(q: &QKernel, l: u32, k: u32) -> Rational {
    let d = i64::from(k) - i64::from(l);
    one_minus(q.q_pow(d)) * one_minus(q.q_pow(i64::from(k) + i64::from(l))) / q.q_pow(d) * cert19_f(q, l, k)
}

/// `(lhs, rhs)` of the telescoping relation of each certificate.
pub(crate) fn cert15(q: &QKernel, n: u32, k: u32) -> (Rational, Rational) {
    let lhs = one_minus(q.q_pow(i64::from(n))) * cert15_f(q, n, k);
    (lhs, cert15_g(q, n, k + 1) - cert15_g(q, n, k))
}

pub(crate) fn cert16(q: &QKernel, n: u32, k: u32) -> (Rational, Rational) {
    (cert16_f(q, n, k), cert16_g(q, n, k) - cert16_g(q, n, k + 1))
}

pub(crate) fn cert17(q: &QKernel, m: u32, k: u32) -> (Rational, Rational) {
    (cert17_f(q, m, k) - cert17_f(q, m + 1, k), cert17_g(q, m, k + 1) - cert17_g(q, m, k))
}

pub(crate) fn cert19(q: &QKernel, l: u32, k: u32) -> (Rational, Rational) {
    let factor = one_minus(q.q_pow(i64::from(l)));
    let lhs = Rational::from(&factor * &factor) * cert19_f(q, l, k);
    (lhs, cert19_g(q, l, k + 1) - cert19_g(q, l, k))
}
