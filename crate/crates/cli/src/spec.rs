//! Curve specification files.

use std::path::Path;

use pgc_core::pipeline::CurveSource;
use pgc_core::reconstruct::IntrinsicSpec;
use pgc_core::sampled::SampledCurve;
use pgc_core::{parse, Expr, Graph, Vector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SAMPLES: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Graph,
    Intrinsic,
    Samples,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    /// Initial hyperbolic angle of the normal.
    #[serde(default)]
    pub u0: f64,
    #[serde(default)]
    pub c4: Option<f64>,
    #[serde(default)]
    pub c5: f64,
    /// Start of the indefinite integrals; the domain start when absent.
    #[serde(default)]
    pub anchor: Option<f64>,
    /// (y, z) of α at the anchor.
    #[serde(default)]
    pub start_point: Option<[f64; 2]>,
    /// (y, z) of T at the anchor.
    #[serde(default)]
    pub start_tangent: Option<[f64; 2]>,
}

/// The JSON document as written by the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub form: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<Constants>,
    /// Rows `[s, x, y, z]` for the samples form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 3]>,
}

/// A validated specification ready for the pipeline.
#[derive(Clone, Debug)]
pub struct CurveSpec {
    pub file: SpecFile,
    pub name: String,
    pub source: CurveSource<f64>,
    pub samples: usize,
    pub origin: Vector,
}

impl CurveSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve"))
    }

    pub fn from_json(text: &str, fallback_name: &str) -> Result<Self, CliError> {
        let file: SpecFile = serde_json::from_str(text)
            .map_err(|e| CliError::Spec(format!("spec file, line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_file(file, fallback_name)
    }

    pub fn from_file(file: SpecFile, fallback_name: &str) -> Result<Self, CliError> {
        let name = file.name.clone().unwrap_or_else(|| fallback_name.to_string());
        let samples = odd(file.samples.unwrap_or(DEFAULT_SAMPLES))?;
        let origin = file.origin.map(|[x, y, z]| Vector::new(x, y, z)).unwrap_or(Vector::zero());
        let domain = || -> Result<(f64, f64), CliError> {
            let [a, b] = file.domain.ok_or_else(|| missing("domain"))?;
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(CliError::Spec(format!("field `domain`: need finite a < b, got [{a}, {b}]")));
            }
            Ok((a, b))
        };
        let source = match file.form {
            Form::Graph => {
                let y = expr("y", file.y.as_deref(), "x")?;
                let z = expr("z", file.z.as_deref(), "x")?;
                CurveSource::Graph(Graph::new(y, z, domain()?))
            }
            Form::Intrinsic => {
                let k = expr("kappa", file.kappa.as_deref(), "s")?;
                let t = expr("tau", file.tau.as_deref(), "s")?;
                let mut spec = IntrinsicSpec::new(k, t, domain()?);
                let c = file.constants.clone().unwrap_or_default();
                spec.c0 = c.c0;
                spec.c1 = c.c1;
                spec.c2 = c.c2;
                spec.u0 = c.u0;
                spec.anchor = c.anchor;
                spec.start_point = c.start_point.unwrap_or([0.0; 2]);
                spec.start_tangent = c.start_tangent.unwrap_or([0.0; 2]);
                CurveSource::Intrinsic(spec)
            }
            Form::Samples => {
                let rows = file.points.as_deref().ok_or_else(|| missing("points"))?;
                CurveSource::Sampled(
                    SampledCurve::new(rows).map_err(|e| CliError::Spec(format!("field `points`: {e}")))?,
                )
            }
        };
        Ok(Self { file, name, source, samples, origin })
    }

    pub fn constants(&self) -> Constants {
        self.file.constants.clone().unwrap_or_default()
    }
}

fn missing(field: &str) -> CliError {
    CliError::Spec(format!("field `{field}` is required for this form"))
}

fn expr(field: &str, text: Option<&str>, var: &str) -> Result<Expr, CliError> {
    let text = text.ok_or_else(|| missing(field))?;
    parse(text, var).map_err(|e| CliError::Spec(format!("field `{field}`: {e}")))
}

/// Grid sizes are odd so the midpoint is a node; at least nine.
pub fn odd(n: usize) -> Result<usize, CliError> {
    if n < 9 {
        return Err(CliError::Spec(format!("field `samples`: need at least 9, got {n}")));
    }
    Ok(if n % 2 == 0 { n + 1 } else { n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_name_field_and_column() {
        let e = CurveSpec::from_json(r#"{"form":"graph","y":"2*+x","z":"x^2","domain":[0,1]}"#, "t").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("`y`") && msg.contains("column 3"), "{msg}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn samples_forced_odd_and_defaults() {
        let s = CurveSpec::from_json(r#"{"form":"graph","y":"x^3","z":"x^2","domain":[0,1],"samples":100}"#, "t").unwrap();
        assert_eq!(s.samples, 101);
        assert_eq!(s.name, "t");
        assert_eq!(s.origin, Vector::zero());
        let s = CurveSpec::from_json(r#"{"form":"graph","y":"x^3","z":"x^2","domain":[0,1]}"#, "t").unwrap();
        assert_eq!(s.samples, DEFAULT_SAMPLES);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_domains() {
        assert!(CurveSpec::from_json(r#"{"form":"graph","y":"x","z":"x","domain":[0,1],"bogus":1}"#, "t").is_err());
        let e = CurveSpec::from_json(r#"{"form":"graph","y":"x","z":"x","domain":[1,0]}"#, "t").unwrap_err();
        assert!(e.to_string().contains("`domain`"));
        let e = CurveSpec::from_json(r#"{"form":"intrinsic","kappa":"1","domain":[0,1]}"#, "t").unwrap_err();
        assert!(e.to_string().contains("`tau`"));
    }
}
