//! Two-one index strings `{2}^{s_1}, 1, ..., {2}^{s_m}, 1` (optionally
//! followed by a final run `{2}^{s_{m+1}}`) and their comma/plus
//! composition strings `(p, p~)`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Default bound on the number of blocks, so at most 128 compositions.
pub const DEFAULT_MAX_BLOCKS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StringError {
    #[error("a string ending with 1 needs at least one block")]
    NoBlocks,
    #[error("a string ending with 2 needs a final exponent of at least 1")]
    EmptyFinalRun,
    #[error("{blocks} blocks exceeds the limit of {limit}")]
    TooManyBlocks { blocks: usize, limit: usize },
    #[error("{0:?} is not a two-one string (tokens must be 2 or 1)")]
    NotTwoOne(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ending {
    One,
    Two,
}

/// Exponent data of a two-one string.
///
/// For [`Ending::One`] the exponents are `(s_1, ..., s_m)` and the string is
/// `{2}^{s_1}, 1, ..., {2}^{s_m}, 1`. For [`Ending::Two`] they are
/// `(s_1, ..., s_m, s_{m+1})` and a final run `{2}^{s_{m+1}}` follows the last 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexString {
    exponents: Vec<u32>,
    ending: Ending,
}

impl IndexString {
    pub fn new(exponents: Vec<u32>, ending: Ending) -> Result<Self, StringError> {
        match ending {
            Ending::One if exponents.is_empty() => return Err(StringError::NoBlocks),
            Ending::Two if exponents.last().copied().unwrap_or(0) == 0 => {
                return Err(StringError::EmptyFinalRun)
            }
            _ => {}
        }
        Ok(IndexString { exponents, ending })
    }

    pub fn ends_with_one(exponents: &[u32]) -> Result<Self, StringError> {
        Self::new(exponents.to_vec(), Ending::One)
    }

    pub fn ends_with_two(exponents: &[u32]) -> Result<Self, StringError> {
        Self::new(exponents.to_vec(), Ending::Two)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn ending(&self) -> Ending {
        self.ending
    }

    /// Number of 1s in the string.
    pub fn ones(&self) -> usize {
        match self.ending {
            Ending::One => self.exponents.len(),
            Ending::Two => self.exponents.len() - 1,
        }
    }

    pub fn block_count(&self) -> usize {
        self.exponents.len()
    }

    /// The entries of the string itself, e.g. `[2, 2, 1]` for `{2}^2, 1`.
    pub fn expanded(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let last = self.exponents.len() - 1;
        for (i, &s) in self.exponents.iter().enumerate() {
            out.extend(std::iter::repeat(2).take(s as usize));
            if self.ending == Ending::One || i < last {
                out.push(1);
            }
        }
        out
    }

    pub fn weight(&self) -> u32 {
        2 * self.exponents.iter().sum::<u32>() + self.ones() as u32
    }

    /// Block values before merging: `2s_i + 1` and `s_i + 1`, with a final
    /// `2s_{m+1}` and `s_{m+1}` when the string ends with 2.
    pub fn blocks(&self) -> (Vec<u32>, Vec<u32>) {
        let last = self.exponents.len() - 1;
        self.exponents
            .iter()
            .enumerate()
            .map(|(i, &s)| match self.ending {
                Ending::Two if i == last => (2 * s, s),
                _ => (2 * s + 1, s + 1),
            })
            .unzip()
    }

    /// Parses the expanded comma form, e.g. `"2,2,1,2,1"` or `"1,2"`.
    /// The empty string parses to `None`.
    pub fn parse(text: &str) -> Result<Option<Self>, StringError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(None);
        }
        let mut exponents = Vec::new();
        let mut run = 0u32;
        for token in text.split(',') {
            match token.trim() {
                "2" => run += 1,
                "1" => {
                    exponents.push(run);
                    run = 0;
                }
                _ => return Err(StringError::NotTwoOne(text.to_string())),
            }
        }
        let ending = if run > 0 {
            exponents.push(run);
            Ending::Two
        } else {
            Ending::One
        };
        Self::new(exponents, ending).map(Some)
    }
}

impl fmt::Display for IndexString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.expanded().iter().map(u32::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// One comma/plus choice: `mask[i]` is `true` when separator `i` (between
/// block `i` and block `i + 1`) is a plus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CompositionString {
    pub mask: Vec<bool>,
    pub p: Vec<u32>,
    pub p_tilde: Vec<u32>,
}

impl CompositionString {
    /// `l(p)`, the number of entries.
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn commas(&self) -> usize {
        self.mask.iter().filter(|&&plus| !plus).count()
    }

    pub fn mask_string(&self) -> String {
        self.mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// `p` and `p~` as signed exponent lists for the nested sums.
    pub fn signed(&self) -> (Vec<i64>, Vec<i64>) {
        (
            self.p.iter().map(|&x| i64::from(x)).collect(),
            self.p_tilde.iter().map(|&x| i64::from(x)).collect(),
        )
    }
}

pub fn enumerate_compositions(s: &IndexString) -> Result<Vec<CompositionString>, StringError> {
    enumerate_compositions_with_limit(s, DEFAULT_MAX_BLOCKS)
}

/// All `2^(B-1)` compositions in lexicographic mask order, all commas first.
pub fn enumerate_compositions_with_limit(
    s: &IndexString,
    max_blocks: usize,
) -> Result<Vec<CompositionString>, StringError> {
    let blocks = s.block_count();
    if blocks > max_blocks {
        return Err(StringError::TooManyBlocks { blocks, limit: max_blocks });
    }
    let (heads, tildes) = s.blocks();
    let separators = blocks - 1;
    let mut out = Vec::with_capacity(1 << separators);
    for code in 0u64..(1 << separators) {
        // separator 0 is the most significant bit, giving lexicographic order
        let mask: Vec<bool> = (0..separators).map(|i| code >> (separators - 1 - i) & 1 == 1).collect();
        let mut p = vec![heads[0]];
        let mut p_tilde = vec![tildes[0]];
        for (i, &plus) in mask.iter().enumerate() {
            if plus {
                *p.last_mut().unwrap() += heads[i + 1];
                *p_tilde.last_mut().unwrap() += tildes[i + 1];
            } else {
                p.push(heads[i + 1]);
                p_tilde.push(tildes[i + 1]);
            }
        }
        out.push(CompositionString { mask, p, p_tilde });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn invariants_reject_bad_strings() {
        assert_eq!(IndexString::ends_with_one(&[]), Err(StringError::NoBlocks));
        assert_eq!(IndexString::ends_with_two(&[1, 0]), Err(StringError::EmptyFinalRun));
        assert_eq!(IndexString::ends_with_two(&[]), Err(StringError::EmptyFinalRun));
        assert!(IndexString::ends_with_two(&[0, 1]).is_ok());
    }

    #[test]
    fn block_counts() {
        assert_eq!(IndexString::ends_with_one(&[0]).unwrap().block_count(), 1);
        assert_eq!(IndexString::ends_with_two(&[0, 1]).unwrap().block_count(), 2);
        assert_eq!(IndexString::ends_with_one(&[1, 0, 2]).unwrap().block_count(), 3);
    }

    #[test]
    fn single_block() {
        let s = IndexString::ends_with_one(&[3]).unwrap();
        let c = enumerate_compositions(&s).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].p, vec![7]);
        assert_eq!(c[0].p_tilde, vec![4]);
    }

    #[test]
    fn two_blocks_by_hand() {
        let s = IndexString::ends_with_one(&[1, 1]).unwrap();
        let c = enumerate_compositions(&s).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].p.clone(), c[0].p_tilde.clone()), (vec![3, 3], vec![2, 2]));
        assert_eq!((c[1].p.clone(), c[1].p_tilde.clone()), (vec![6], vec![4]));
        assert_eq!(c[0].mask, vec![false]);
    }

    #[test]
    fn ends_with_two_blocks() {
        let s = IndexString::ends_with_two(&[1, 0, 2]).unwrap();
        let c = enumerate_compositions(&s).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[0].p, vec![3, 1, 4]);
        assert_eq!(c[0].p_tilde, vec![2, 1, 2]);
        assert_eq!(c[3].p, vec![8]);
        assert_eq!(c[3].p_tilde, vec![5]);
        assert_eq!(c[1].mask_string(), "01");
    }

    #[test]
    fn limit_is_enforced() {
        let s = IndexString::ends_with_one(&[0; 9]).unwrap();
        assert_eq!(
            enumerate_compositions(&s),
            Err(StringError::TooManyBlocks { blocks: 9, limit: 8 })
        );
        assert_eq!(enumerate_compositions_with_limit(&s, 9).unwrap().len(), 256);
    }

    #[test]
    fn parse_and_display() {
        let s = IndexString::parse("2,2,1,2,1").unwrap().unwrap();
        assert_eq!(s.exponents(), &[2, 1]);
        assert_eq!(s.ending(), Ending::One);
        assert_eq!(s.to_string(), "2,2,1,2,1");
        let t = IndexString::parse("1,2").unwrap().unwrap();
        assert_eq!(t.exponents(), &[0, 1]);
        assert_eq!(t.ending(), Ending::Two);
        assert_eq!(IndexString::parse("2").unwrap().unwrap().exponents(), &[1]);
        assert_eq!(IndexString::parse(" ").unwrap(), None);
        assert!(IndexString::parse("3").is_err());
        assert!(IndexString::parse("3,1").is_err());
        assert!(IndexString::parse("2,,1").is_err());
    }

    fn all_exponent_lists(blocks: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..blocks {
            out = out
                .into_iter()
                .flat_map(|v| (0..=max).map(move |x| [v.clone(), vec![x]].concat()))
                .collect();
        }
        out
    }

    #[test]
    fn merge_structure_and_weight() {
        for m in 1..=6 {
            for exps in all_exponent_lists(m, 2) {
                let s = IndexString::ends_with_one(&exps).unwrap();
                let comps = enumerate_compositions(&s).unwrap();
                assert_eq!(comps.len(), 1 << (m - 1));
                let masks: HashSet<_> = comps.iter().map(|c| c.mask.clone()).collect();
                assert_eq!(masks.len(), comps.len());
                for c in &comps {
                    assert_eq!(c.p.len(), c.p_tilde.len());
                    assert_eq!(c.p.len(), c.commas() + 1);
                    assert_eq!(c.p.iter().sum::<u32>(), s.weight());
                    // entry counts: c_entry blocks merged, sum c_entry = m
                    let mut counts = vec![1u32];
                    for &plus in &c.mask {
                        if plus {
                            *counts.last_mut().unwrap() += 1;
                        } else {
                            counts.push(1);
                        }
                    }
                    assert_eq!(counts.iter().sum::<u32>() as usize, m);
                    for ((&p, &pt), &cnt) in c.p.iter().zip(&c.p_tilde).zip(&counts) {
                        assert_eq!(p, 2 * pt - cnt);
                    }
                }
            }
            if m > 4 {
                continue;
            }
            for exps in all_exponent_lists(m, 2) {
                let Ok(s) = IndexString::ends_with_two(&exps) else { continue };
                for c in enumerate_compositions(&s).unwrap() {
                    assert_eq!(c.p.iter().sum::<u32>(), s.weight());
                    assert_eq!(s.expanded().iter().sum::<u32>(), s.weight());
                }
            }
        }
    }
}
