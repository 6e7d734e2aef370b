//! Independent check of the reconstructed closed forms.
//!
//! Everything here is recomputed from scratch with naive arithmetic (powers
//! by repeated multiplication, Gaussian binomials as products, `H*` by
//! enumeration over the largest index) so that a shared bug in the kernel
//! or the sum evaluators cannot hide a wrong reconstruction.

use std::collections::HashMap;
use std::time::Instant;

use rug::Rational;

use super::{Check, Params, VerificationReport, VerifyError};
use crate::qkernel::{QKernel, QPoint};

struct Naive {
    q: Rational,
}

impl Naive {
    fn pow(&self, e: i64) -> Rational {
        let mut out = Rational::from(1);
        for _ in 0..e.unsigned_abs() {
            out *= &self.q;
        }
        if e < 0 {
            out.recip_mut();
        }
        out
    }

    fn int(&self, k: u32) -> Rational {
        (0..k).map(|i| self.pow(i64::from(i))).sum()
    }

    fn int_pow(&self, k: u32, e: u32) -> Rational {
        let base = self.int(k);
        let mut out = Rational::from(1);
        for _ in 0..e {
            out *= &base;
        }
        out
    }

    fn gauss(&self, n: u32, m: u32) -> Rational {
        if m > n {
            return Rational::new();
        }
        let mut out = Rational::from(1);
        for i in 1..=m {
            out *= 1 - self.pow(i64::from(n - m + i));
            out /= 1 - self.pow(i64::from(i));
        }
        out
    }

    fn weight(&self, n: u32, k: u32) -> Rational {
        self.gauss(n, k) / self.gauss(n + k, k)
    }

    fn a(&self, n: u32, k: u32) -> Rational {
        let k64 = i64::from(k);
        (1 + self.pow(k64)) * self.weight(n, k) * self.pow(k64 * (k64 - 1) / 2)
    }

    fn v(&self, k: u32, s: i64) -> Rational {
        (1..=k)
            .map(|j| {
                let j64 = i64::from(j);
                let t: Rational = (1 + self.pow(j64)) * self.pow(s * j64 - j64 * (j64 + 1) / 2) / self.int_pow(j, 2 * s as u32);
                if j % 2 == 1 {
                    -t
                } else {
                    t
                }
            })
            .sum()
    }

    /// `H*_n[s]` by splitting on the largest index: `sum_{k<=n} f_1(k) H*_k[s_2..]`.
    fn h_star(&self, n: u32, s: &[u32], memo: &mut HashMap<(u32, usize), Rational>) -> Rational {
        if s.is_empty() {
            return Rational::from(1);
        }
        if let Some(v) = memo.get(&(n, s.len())) {
            return v.clone();
        }
        let mut total = Rational::new();
        for k in 1..=n {
            let f = self.pow(i64::from(k)) / self.int_pow(k, s[0]);
            total += f * self.h_star(k, &s[1..], memo);
        }
        memo.insert((n, s.len()), total.clone());
        total
    }

    fn h_star_fresh(&self, n: u32, s: &[u32]) -> Rational {
        self.h_star(n, s, &mut HashMap::new())
    }
}

fn sign(k: u32) -> i32 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

fn twos_one_twos(a: u32, b: Option<u32>) -> Vec<u32> {
    let mut s = vec![2; a as usize];
    if let Some(b) = b {
        s.push(1);
        s.extend(std::iter::repeat(2).take(b as usize));
    }
    s
}

/// Recomputes the reconstructed closed forms with independent arithmetic on
/// `1 <= n <= n_max`, failing hard on the first mismatch.
pub fn validate_reconstructions(q_points: &[QPoint], n_max: u32) -> Result<VerificationReport, VerifyError> {
    let started = Instant::now();
    let mut checks = Vec::new();
    for qp in q_points {
        let o = Naive { q: qp.value().clone() };
        let kernel = QKernel::new(qp.clone());
        let mut push = |label: &str, params: Params, lhs: Rational, rhs: Rational| -> Result<(), VerifyError> {
            let c = Check { identity: format!("reconstruction:{label}"), params, q: o.q.clone(), lhs, lhs_alt: None, rhs };
            if !c.pass() {
                return Err(VerifyError::Reconstruction {
                    identity: c.identity.clone(),
                    params: c.params.to_string(),
                    q: qp.to_string(),
                    lhs: c.lhs.to_string(),
                    rhs: c.rhs.to_string(),
                });
            }
            checks.push(c);
            Ok(())
        };
        for n in 1..=n_max {
            for l in 0..=n {
                let p = || Params::new().with("n", i64::from(n)).with("l", i64::from(l));
                let l64 = i64::from(l);
                let lhs11: Rational = (l + 1..=n)
                    .map(|k| {
                        let k64 = i64::from(k);
                        (1 + o.pow(k64)) * o.weight(n, k) * o.pow(k64 * (k64 - 1) / 2) * sign(k)
                    })
                    .sum();
                let display = (o.int(l) - o.int(n)) / o.int(n) * o.weight(n, l) * o.pow(l64 * (l64 - 1) / 2) * sign(l);
                let telescoped = -Rational::from(1 - o.pow(i64::from(n - l))) / (1 - o.pow(i64::from(n)))
                    * o.weight(n, l)
                    * o.pow(l64 * (l64 + 1) / 2)
                    * sign(l);
                push("eq11", p(), lhs11.clone(), display)?;
                push("eq11-telescoped", p(), lhs11, telescoped)?;

                let lhs12: Rational = (l + 1..=n)
                    .map(|k| {
                        let k64 = i64::from(k);
                        (1 + o.pow(k64)) * o.int(k) * o.weight(n, k) * o.pow(k64 * (k64 - 1))
                    })
                    .sum();
                push("eq12", p(), lhs12, (o.int(n) - o.int(l)) * o.weight(n, l) * o.pow(l64 * l64))?;

                if l >= 1 {
                    let lhs14: Rational =
                        (l..=n).map(|k| o.pow(i64::from(k)) / o.int_pow(k, 2) * o.weight(k, l)).sum();
                    push("eq14", p(), lhs14, o.pow(l64) / o.int_pow(l, 2) * o.weight(n, l))?;
                }
            }
            for a in 0..=3u32 {
                let a64 = i64::from(a);
                let rhs20: Rational = (1..=n)
                    .map(|k| {
                        let k64 = i64::from(k);
                        (1 + o.pow(k64)) / o.int_pow(k, 2 * a) * o.weight(n, k) * o.pow(k64 * (k64 - 1) / 2 + a64 * k64)
                            * -sign(k)
                    })
                    .sum();
                let p = Params::new().with("a", a64).with("n", i64::from(n));
                push("eq20", p, o.h_star_fresh(n, &twos_one_twos(a, None)), rhs20)?;
            }
            for a in 0..=2u32 {
                for b in 1..=2u32 {
                    let (a64, b64) = (i64::from(a), i64::from(b));
                    let lhs = o.h_star_fresh(n, &twos_one_twos(a, Some(b)));
                    let mut display = Rational::new();
                    let mut a_form = Rational::new();
                    for k in 1..=n {
                        let k64 = i64::from(k);
                        let w = o.weight(n, k);
                        display -= (1 + o.pow(k64)) / o.int_pow(k, 2 * (a + b) + 1)
                            * &w
                            * o.pow(k64 * (k64 + 1) / 2 + (a64 + b64) * k64)
                            * sign(k);
                        display -= (1 + o.pow(k64)) / o.int_pow(k, 2 * a + 1)
                            * &w
                            * o.pow(k64 * k64 + a64 * k64)
                            * o.v(k - 1, b64);
                        let ank = o.a(n, k);
                        a_form -= Rational::from(&ank * o.pow((a64 + b64 + 1) * k64)) / o.int_pow(k, 2 * (a + b) + 1) * sign(k);
                        a_form -= ank * o.pow(k64 * (k64 + 1) / 2 + a64 * k64) / o.int_pow(k, 2 * a + 1) * o.v(k - 1, b64);
                    }
                    let p = || Params::new().with("a", a64).with("b", b64).with("n", i64::from(n));
                    push("eq22", p(), lhs.clone(), display)?;
                    push("eq22-a-form", p(), lhs, a_form)?;
                }
            }
            for k in 1..=n {
                let lib = crate::mhs::aux_a(&kernel, n, k)?;
                push("aux-a", Params::new().with("n", i64::from(n)).with("k", i64::from(k)), lib, o.a(n, k))?;
            }
        }
    }
    Ok(VerificationReport {
        identity: "reconstructions".into(),
        q_points: q_points.iter().map(|q| q.value().clone()).collect(),
        checks,
        elapsed: started.elapsed(),
    })
}
