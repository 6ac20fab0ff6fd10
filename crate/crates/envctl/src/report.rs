//! Query reports: exact bounds with display-only decimal annotations,
//! rendered as aligned text or JSON.

use envelope_core::envelopes::{CaseTag, EnvelopeResult};
use envelope_core::rational::Q;
use serde_json::{json, Value};

use crate::rationals::{decimal, format_q};

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Agree,
    Mismatch { lower: Q, upper: Q },
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub lower: Q,
    pub upper: Q,
    pub case_tag: Option<CaseTag>,
    pub dual_case_tag: Option<CaseTag>,
    pub index_sets: Option<(Vec<usize>, Vec<usize>, Vec<usize>)>,
    /// One-line certificate, e.g. the weight allocation attaining a bound.
    pub witness: Option<String>,
    pub oracle: Option<OracleOutcome>,
}

#[derive(Debug, Clone)]
pub enum QueryStatus {
    Bounds(Box<BoundsReport>),
    Unsupported { reason: String },
}

#[derive(Debug, Clone)]
pub struct QueryReport {
    pub f: String,
    pub k: String,
    pub kind: String,
    pub status: QueryStatus,
}

impl BoundsReport {
    pub fn from_envelope(r: &EnvelopeResult) -> Self {
        BoundsReport {
            lower: r.lower.clone(),
            upper: r.upper.clone(),
            case_tag: Some(r.case_tag),
            dual_case_tag: Some(r.dual_case_tag),
            index_sets: r
                .index_sets
                .as_ref()
                .map(|s| (s.i1.clone(), s.i2.clone(), s.i3.clone())),
            witness: None,
            oracle: None,
        }
    }
}

pub fn tag_name(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::Tautology => "tautology",
        CaseTag::PositiveRatio => "positive-ratio",
        CaseTag::NullCellMinimum => "null-cell-minimum",
        CaseTag::NullCellInfimum => "null-cell-infimum",
        CaseTag::EnclosingRatio => "enclosing-ratio",
        CaseTag::VacuousAtNull => "vacuous-at-null",
        CaseTag::AllocationMinimum => "allocation-minimum",
        CaseTag::EssentialIntegral => "essential-integral",
        CaseTag::PartitionSupremum => "partition-supremum",
        CaseTag::VacuousZero => "vacuous-zero",
    }
}

fn ones(indices: &[usize]) -> String {
    let parts: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn bound_text(v: &Q) -> String {
    format!("{} (~{:.6})", format_q(v), decimal(v))
}

pub fn render_text(reports: &[QueryReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{} | {}   kind={}\n", r.f, r.k, r.kind));
        match &r.status {
            QueryStatus::Unsupported { reason } => {
                out.push_str(&format!("  unsupported: {reason}\n"));
            }
            QueryStatus::Bounds(b) => {
                out.push_str(&format!("  lower = {}\n", bound_text(&b.lower)));
                out.push_str(&format!("  upper = {}\n", bound_text(&b.upper)));
                if let (Some(t), Some(d)) = (b.case_tag, b.dual_case_tag) {
                    out.push_str(&format!("  cases = {} / {}\n", tag_name(t), tag_name(d)));
                }
                if let Some((i1, i2, i3)) = &b.index_sets {
                    out.push_str(&format!(
                        "  index sets: I1={} I2={} I3={}\n",
                        ones(i1),
                        ones(i2),
                        ones(i3)
                    ));
                }
                if let Some(w) = &b.witness {
                    out.push_str(&format!("  witness: {w}\n"));
                }
                match &b.oracle {
                    Some(OracleOutcome::Agree) => out.push_str("  oracle: agree\n"),
                    Some(OracleOutcome::Mismatch { lower, upper }) => {
                        out.push_str(&format!(
                            "  oracle: MISMATCH, oracle interval [{}, {}]\n",
                            format_q(lower),
                            format_q(upper)
                        ));
                    }
                    None => {}
                }
            }
        }
    }
    out
}

pub fn to_json(reports: &[QueryReport]) -> Value {
    let queries: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut obj = json!({
                "f": r.f,
                "k": r.k,
                "kind": r.kind,
            });
            match &r.status {
                QueryStatus::Unsupported { reason } => {
                    obj["status"] = json!("unsupported");
                    obj["reason"] = json!(reason);
                }
                QueryStatus::Bounds(b) => {
                    obj["status"] = json!("ok");
                    obj["lower"] = json!(format_q(&b.lower));
                    obj["upper"] = json!(format_q(&b.upper));
                    obj["lower_decimal"] = json!(decimal(&b.lower));
                    obj["upper_decimal"] = json!(decimal(&b.upper));
                    if let Some(t) = b.case_tag {
                        obj["case_tag"] = json!(tag_name(t));
                    }
                    if let Some(t) = b.dual_case_tag {
                        obj["dual_case_tag"] = json!(tag_name(t));
                    }
                    if let Some((i1, i2, i3)) = &b.index_sets {
                        obj["index_sets"] = json!({
                            "i1": i1.iter().map(|i| i + 1).collect::<Vec<_>>(),
                            "i2": i2.iter().map(|i| i + 1).collect::<Vec<_>>(),
                            "i3": i3.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        });
                    }
                    if let Some(w) = &b.witness {
                        obj["witness"] = json!(w);
                    }
                    match &b.oracle {
                        Some(OracleOutcome::Agree) => obj["oracle"] = json!("agree"),
                        Some(OracleOutcome::Mismatch { lower, upper }) => {
                            obj["oracle"] = json!({
                                "mismatch": true,
                                "lower": format_q(lower),
                                "upper": format_q(upper),
                            });
                        }
                        None => {}
                    }
                }
            }
            obj
        })
        .collect();
    json!({ "queries": queries })
}
