//! Line-delimited record formats read and written by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::domain::{DomainBounds, ProblemInstance};
use crate::error::Error;

/// One input instance. Fields left out fall back to the command-line
/// defaults (`p = 2`, `a = 0`, `b = 1` unless overridden).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

/// Values used for fields a record leaves out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub eps: Option<f64>,
    pub p: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            eps: None,
            p: 2.0,
            a: 0.0,
            b: 1.0,
        }
    }
}

impl InstanceRecord {
    pub fn from_json(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn eps_or(&self, defaults: &Defaults) -> Result<f64, Error> {
        self.eps
            .or(defaults.eps)
            .ok_or_else(|| Error::InvalidParameter("eps missing from record and flags".into()))
    }

    pub fn p_or(&self, defaults: &Defaults) -> f64 {
        self.p.unwrap_or(defaults.p)
    }

    pub fn bounds_or(&self, defaults: &Defaults) -> Result<DomainBounds, Error> {
        DomainBounds::new(self.a.unwrap_or(defaults.a), self.b.unwrap_or(defaults.b))
    }

    /// Builds the instance, requiring `delta`.
    pub fn to_instance(&self, defaults: &Defaults) -> Result<ProblemInstance, Error> {
        let delta = self
            .delta
            .clone()
            .ok_or_else(|| Error::InvalidParameter("delta missing from record".into()))?;
        self.to_instance_with(delta, defaults)
    }

    pub fn to_instance_with(
        &self,
        delta: Vec<f64>,
        defaults: &Defaults,
    ) -> Result<ProblemInstance, Error> {
        ProblemInstance::new(
            self.x.clone(),
            delta,
            self.eps_or(defaults)?,
            self.p_or(defaults),
            self.bounds_or(defaults)?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Unreachable,
    ZeroDelta,
    /// The record could not be parsed or failed validation.
    #[default]
    Invalid,
    /// Gradient requested at `eps = 0`.
    Degenerate,
}

impl Status {
    pub fn is_ok(self) -> bool {
        self == Status::Ok
    }
}

/// Result of solving one record.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SolutionRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub achieved_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturated_count: Option<usize>,
    /// Attainable maximum, reported when the target is unreachable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_norm: Option<f64>,
    /// `clip(x + eta * delta)`, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SolutionRecord {
    /// Failure record for `err`, classified by status.
    pub fn failed(id: Option<String>, err: &Error) -> Self {
        let mut rec = SolutionRecord {
            id,
            status: status_of(err),
            ..Default::default()
        };
        match err {
            Error::Unreachable { max_norm } => rec.max_norm = Some(*max_norm),
            Error::ZeroDelta => {}
            other => rec.error = Some(other.to_string()),
        }
        rec
    }
}

pub fn status_of(err: &Error) -> Status {
    match err {
        Error::Unreachable { .. } => Status::Unreachable,
        Error::ZeroDelta => Status::ZeroDelta,
        Error::DegenerateGradient => Status::Degenerate,
        _ => Status::Invalid,
    }
}

/// Noise output: the solution for the drawn direction plus the norm that
/// plain rescale-then-clip would have achieved with the same draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    #[serde(flatten)]
    pub solution: SolutionRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naive_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GradientRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_breakpoint: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NormRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Norm of the perturbation after clipping.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_norm: Option<f64>,
    /// `eta * ||delta||_p`, the norm before clipping.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unclipped_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_minimal_record_with_defaults() {
        let rec = InstanceRecord::from_json(r#"{"x":[0.9,0.5],"delta":[1,1],"eps":0.5}"#).unwrap();
        let inst = rec.to_instance(&Defaults::default()).unwrap();
        assert_eq!(inst.p().value(), 2.0);
        assert_eq!(inst.bounds(), DomainBounds::unit());
        assert_eq!(inst.eps(), 0.5);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(InstanceRecord::from_json(r#"{"x":[0.5],"delta":[1],"eps":0.1,"q":3}"#).is_err());
    }

    #[test]
    fn flag_defaults_fill_missing_fields() {
        let rec = InstanceRecord::from_json(r#"{"x":[5.0],"delta":[1]}"#).unwrap();
        let defaults = Defaults {
            eps: Some(1.0),
            p: 1.0,
            a: 0.0,
            b: 255.0,
        };
        let inst = rec.to_instance(&defaults).unwrap();
        assert_eq!(inst.bounds().upper(), 255.0);
        assert_eq!(inst.p().value(), 1.0);
        assert!(rec.to_instance(&Defaults::default()).is_err());
    }

    #[test]
    fn failure_records_carry_status() {
        let rec = SolutionRecord::failed(Some("r".into()), &Error::Unreachable { max_norm: 0.1 });
        assert_eq!(rec.status, Status::Unreachable);
        assert_eq!(rec.max_norm, Some(0.1));
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(json, r#"{"id":"r","status":"unreachable","max_norm":0.1}"#);
        assert_eq!(
            SolutionRecord::failed(None, &Error::ZeroDelta).status,
            Status::ZeroDelta
        );
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL
    }

    fn record() -> impl Strategy<Value = InstanceRecord> {
        (
            prop::option::of("[a-z0-9_\\-\" ]{0,8}"),
            prop::collection::vec(finite(), 0..6),
            prop::option::of(prop::collection::vec(finite(), 0..6)),
            prop::option::of(finite()),
            prop::option::of(finite()),
            prop::option::of(finite()),
            prop::option::of(finite()),
        )
            .prop_map(|(id, x, delta, eps, p, a, b)| InstanceRecord {
                id,
                x,
                delta,
                eps,
                p,
                a,
                b,
            })
    }

    proptest! {
        #[test]
        fn record_round_trip(rec in record()) {
            let parsed = InstanceRecord::from_json(&rec.to_json()).unwrap();
            prop_assert_eq!(&parsed, &rec);
            prop_assert_eq!(InstanceRecord::from_json(&parsed.to_json()).unwrap(), parsed);
        }
    }
}
