//! Stable JSON lines for verification checks.

use std::collections::BTreeMap;

use rug::Rational;
use serde::Serialize;

use super::Check;
use crate::decimal::to_decimal;
use crate::qkernel::exact_string;

/// Digits after the point in the decimal rendering of exact values.
pub const WITNESS_DIGITS: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueRecord {
    pub exact: String,
    pub decimal: String,
}

impl ValueRecord {
    pub fn new(value: &Rational) -> Self {
        ValueRecord { exact: exact_string(value), decimal: to_decimal(value, WITNESS_DIGITS) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub identity: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub q: String,
    pub pass: bool,
    pub lhs: ValueRecord,
    pub rhs: ValueRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs_recurrence: Option<ValueRecord>,
}

pub fn check_record(c: &Check) -> CheckRecord {
    let mut params: BTreeMap<String, serde_json::Value> =
        c.params.ints().iter().map(|(k, v)| (k.to_string(), serde_json::Value::from(*v))).collect();
    if let Some(s) = c.params.string() {
        params.insert("s".into(), serde_json::Value::from(s.to_string()));
    }
    CheckRecord {
        identity: c.identity.clone(),
        params,
        q: exact_string(&c.q),
        pass: c.pass(),
        lhs: ValueRecord::new(&c.lhs),
        rhs: ValueRecord::new(&c.rhs),
        lhs_recurrence: c.lhs_alt.as_ref().map(ValueRecord::new),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::Params;

    #[test]
    fn record_fields() {
        let c = Check {
            identity: "eq13".into(),
            params: Params::new().with("n", 1),
            q: Rational::from((1, 2)),
            lhs: Rational::from((1, 2)),
            lhs_alt: None,
            rhs: Rational::from((1, 2)),
        };
        let line = serde_json::to_string(&check_record(&c)).unwrap();
        assert_eq!(
            line,
            r#"{"identity":"eq13","params":{"n":1},"q":"1/2","pass":true,"lhs":{"exact":"1/2","decimal":"0.5000000000000000000000000000000000000000"},"rhs":{"exact":"1/2","decimal":"0.5000000000000000000000000000000000000000"}}"#
        );
    }
}
