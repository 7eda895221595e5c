//! Verification reports. Everything here is deterministic given the inputs and
//! the seed; wall-clock timing is deliberately left out so reruns are byte-identical.

use std::collections::BTreeMap;

use serde::Serialize;

use super::files::InputRecord;
use crate::exact::{Verdict, ZeroTest};
use crate::exterior::Multivector;
use crate::qdybe::DynTensor;

/// One residual coefficient that did not test as zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermVerdict {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hbar: Option<usize>,
    pub key: String,
    pub value: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of residual coefficients that were zero-tested.
    pub terms_checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<TermVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl Check {
    pub fn flag(name: &str, passed: bool, message: Option<String>) -> Self {
        Check { name: name.to_string(), passed, terms_checked: 0, failures: Vec::new(), message }
    }

    /// Zero-tests every coefficient of a multivector residual.
    pub fn multivector(name: &str, residual: &Multivector, labels: &[String], strategy: ZeroTest) -> Self {
        let verdicts = residual.verdicts(strategy);
        let terms_checked = verdicts.len();
        let failures: Vec<TermVerdict> = verdicts
            .into_iter()
            .filter(|(_, v)| !v.zero)
            .map(|(word, verdict)| TermVerdict {
                hbar: None,
                key: word.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("^"),
                value: residual.coeff(&word).to_expr_string(),
                verdict,
            })
            .collect();
        Check { name: name.to_string(), passed: failures.is_empty(), terms_checked, failures, message: None }
    }

    /// Zero-tests every coefficient of a tensor residual, order by order.
    pub fn tensor(name: &str, residual: &DynTensor, labels: &[String], strategy: ZeroTest) -> Self {
        let verdicts = residual.verdicts(strategy);
        let terms_checked = verdicts.len();
        let failures: Vec<TermVerdict> = verdicts
            .into_iter()
            .filter(|(_, _, v)| !v.zero)
            .map(|(k, legs, verdict)| TermVerdict {
                hbar: Some(k),
                key: legs
                    .iter()
                    .map(|w| if w.is_empty() { "1".to_string() } else { w.iter().map(|&i| labels[i].as_str()).collect::<Vec<_>>().join("*") })
                    .collect::<Vec<_>>()
                    .join(" (x) "),
                value: residual.get(k, &legs).to_expr_string(),
                verdict,
            })
            .collect();
        Check { name: name.to_string(), passed: failures.is_empty(), terms_checked, failures, message: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportFile {
    pub command: String,
    pub inputs: BTreeMap<String, InputRecord>,
    pub seed: u64,
    pub zero_test: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<serde_json::Value>,
}

impl ReportFile {
    pub fn new(command: &str, seed: u64, zero_test: &str) -> Self {
        ReportFile {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            seed,
            zero_test: zero_test.to_string(),
            order: None,
            checks: Vec::new(),
            passed: false,
            error: None,
            output: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
