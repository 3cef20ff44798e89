//! JSON shape of an explanation run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Condition, ExplainError, Explanation, ExplanationMetrics, Literal, Predicate};
use crate::dataset::ClusterId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateRecord {
    pub attribute: String,
    /// `==`, `!=` or `between`.
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Literal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
}

impl From<&Predicate> for PredicateRecord {
    fn from(p: &Predicate) -> Self {
        let (op, value, lo, hi) = match &p.condition {
            Condition::Eq(v) => ("==", Some(v.clone()), None, None),
            Condition::Neq(v) => ("!=", Some(v.clone()), None, None),
            Condition::Between { lo, hi } => ("between", None, Some(*lo), Some(*hi)),
        };
        PredicateRecord {
            attribute: p.attribute.clone(),
            op: op.to_string(),
            value,
            lo,
            hi,
        }
    }
}

impl TryFrom<&PredicateRecord> for Predicate {
    type Error = ExplainError;

    fn try_from(r: &PredicateRecord) -> Result<Self, ExplainError> {
        let value = || {
            r.value.clone().ok_or_else(|| {
                ExplainError::Schema(format!(
                    "`{}` predicate on `{}` lacks a value",
                    r.op, r.attribute
                ))
            })
        };
        match r.op.as_str() {
            "==" => Ok(Predicate::eq(r.attribute.clone(), value()?)),
            "!=" => Ok(Predicate::neq(r.attribute.clone(), value()?)),
            "between" => match (r.lo, r.hi) {
                (Some(lo), Some(hi)) => Predicate::between(r.attribute.clone(), lo, hi),
                _ => Err(ExplainError::Schema(format!(
                    "between on `{}` needs lo and hi",
                    r.attribute
                ))),
            },
            other => Err(ExplainError::Schema(format!("unknown operator `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub predicates: Vec<PredicateRecord>,
    pub coverage: f64,
    pub separation_error: f64,
    pub conciseness: f64,
    pub qse: f64,
}

impl ExplanationRecord {
    pub fn from_explanation(e: &Explanation) -> Result<Self, ExplainError> {
        let m = e.metrics_or_err()?;
        Ok(ExplanationRecord {
            predicates: e.predicates().iter().map(PredicateRecord::from).collect(),
            coverage: m.coverage,
            separation_error: m.separation_error,
            conciseness: m.conciseness,
            qse: m.qse(),
        })
    }

    /// The explanation with the recorded metrics attached.
    pub fn to_explanation(&self, cluster: ClusterId) -> Result<Explanation, ExplainError> {
        let predicates = self
            .predicates
            .iter()
            .map(Predicate::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        let mut e = Explanation::new(cluster, predicates)?;
        e.metrics = Some(self.metrics());
        Ok(e)
    }

    pub fn metrics(&self) -> ExplanationMetrics {
        ExplanationMetrics {
            coverage: self.coverage,
            separation_error: self.separation_error,
            conciseness: self.conciseness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    /// A JSON number when the label is an integer, else a string.
    pub cluster: Value,
    pub explanations: Vec<ExplanationRecord>,
}

impl ClusterRecord {
    pub fn new(cluster: &ClusterId, explanations: &[Explanation]) -> Result<Self, ExplainError> {
        Ok(ClusterRecord {
            cluster: cluster.to_json(),
            explanations: explanations
                .iter()
                .map(ExplanationRecord::from_explanation)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn cluster_id(&self) -> Result<ClusterId, ExplainError> {
        match &self.cluster {
            Value::String(s) => Ok(ClusterId(s.clone())),
            Value::Number(n) => Ok(ClusterId(n.to_string())),
            other => Err(ExplainError::Schema(format!(
                "cluster id must be a number or string, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub clusters: Vec<ClusterRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_attributes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub config: Value,
    #[serde(default)]
    pub timings_ms: BTreeMap<String, f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_records_round_trip() {
        let preds = [
            Predicate::eq("sex", Literal::Text("Male".into())),
            Predicate::neq("relationship", Literal::Text("Husband".into())),
            Predicate::eq("age", Literal::Number(25.0)),
            Predicate::between("age", 16.0, 35.0).unwrap(),
        ];
        for p in &preds {
            let json = serde_json::to_string(&PredicateRecord::from(p)).unwrap();
            let back: PredicateRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(&Predicate::try_from(&back).unwrap(), p);
        }
        let json = serde_json::to_value(PredicateRecord::from(&preds[3])).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"attribute": "age", "op": "between", "lo": 16.0, "hi": 35.0})
        );
        let json = serde_json::to_value(PredicateRecord::from(&preds[1])).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"attribute": "relationship", "op": "!=", "value": "Husband"})
        );
    }

    #[test]
    fn malformed_records_are_rejected() {
        let r = PredicateRecord {
            attribute: "a".into(),
            op: "<".into(),
            value: None,
            lo: None,
            hi: None,
        };
        assert!(matches!(
            Predicate::try_from(&r),
            Err(ExplainError::Schema(_))
        ));
        let r = PredicateRecord {
            op: "between".into(),
            lo: Some(1.0),
            ..r
        };
        assert!(Predicate::try_from(&r).is_err());
        let r = PredicateRecord {
            op: "==".into(),
            lo: None,
            ..r
        };
        assert!(Predicate::try_from(&r).is_err());
    }

    #[test]
    fn cluster_ids_in_json() {
        let rec = ClusterRecord::new(&ClusterId::from(3), &[]).unwrap();
        assert_eq!(rec.cluster, serde_json::json!(3));
        assert_eq!(rec.cluster_id().unwrap(), ClusterId::from(3));
        let rec = ClusterRecord::new(&ClusterId::from("c0"), &[]).unwrap();
        assert_eq!(rec.cluster, serde_json::json!("c0"));
    }
}
