//! Run configuration (TOML) and its resolution into flows and fields.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lieflow_core::expr::{parse_with_params, Expr, Params};
use lieflow_core::kinematics::{FlowMap, MassField, CATALOG, DEFAULT_DT};
use lieflow_core::tensor::{reference_from_expressions, transported_field, EulerianField, Variance};
use lieflow_core::Point;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("unknown flow `{name}`; catalog: {}", CATALOG.join(", "))]
    UnknownFlow { name: String },
    #[error("unknown check `{name}`; available: {}", checks::names().join(", "))]
    UnknownCheck { name: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Output format of per-check series files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    /// Catalog name, or a free label when `velocity` is given.
    pub name: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Three velocity components in `t, x1, x2, x3`; selects trajectory integration.
    pub velocity: Option<Vec<String>>,
    /// RK4 step for trajectory integration.
    pub dt: Option<f64>,
    /// Integrate trajectories even for a catalog flow.
    #[serde(default)]
    pub integrate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub name: String,
    pub variance: String,
    /// Components of `v₀(X)`, written in `x1, x2, x3`; the field is carried by the flow.
    pub reference: Option<Vec<String>>,
    /// Components of `v(t, x)` given directly.
    pub eulerian: Option<Vec<String>>,
    /// Whether the field is expected to move with the fluid. Defaults to
    /// `true` for `reference` fields and `false` for `eulerian` ones.
    pub transported: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_points() -> usize {
    100
}

fn default_times() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            points: default_points(),
            times: default_times(),
            seed: 0,
        }
    }
}

/// Quadrature resolution for the material-integral checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralConfig {
    #[serde(default = "default_segments")]
    pub curve_segments: usize,
    #[serde(default = "default_surface")]
    pub surface_grid: usize,
    #[serde(default = "default_volume")]
    pub volume_grid: usize,
}

fn default_segments() -> usize {
    512
}

fn default_surface() -> usize {
    64
}

fn default_volume() -> usize {
    32
}

impl Default for IntegralConfig {
    fn default() -> Self {
        IntegralConfig {
            curve_segments: default_segments(),
            surface_grid: default_surface(),
            volume_grid: default_volume(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    /// Reference mass density `ρ₀(X)`, positive.
    #[serde(default = "default_rho0")]
    pub rho0: String,
    /// Reference charge density `q₀(X)`, any sign.
    #[serde(default = "default_q0")]
    pub q0: String,
}

fn default_rho0() -> String {
    "1".into()
}

fn default_q0() -> String {
    "1 + x1^2 - 0.5*x2".into()
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig {
            rho0: default_rho0(),
            q0: default_q0(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub flow: FlowConfig,
    /// Parameters visible to every expression in the file.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub fields: Vec<FieldConfig>,
    /// Check names; empty means every check.
    #[serde(default)]
    pub checks: Vec<String>,
    /// Per-check tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub integrals: IntegralConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// A configuration running every check on a catalog flow.
    pub fn for_flow(name: &str) -> Self {
        RunConfig {
            flow: FlowConfig {
                name: Some(name.into()),
                ..FlowConfig::default()
            },
            ..RunConfig::default()
        }
    }

    /// Checks to run, in order.
    pub fn check_names(&self) -> Result<Vec<String>, ConfigError> {
        for name in self.checks.iter().chain(self.tolerances.keys()) {
            if checks::find(name).is_none() {
                return Err(ConfigError::UnknownCheck { name: name.clone() });
            }
        }
        if self.checks.is_empty() {
            Ok(checks::names().iter().map(|s| s.to_string()).collect())
        } else {
            Ok(self.checks.clone())
        }
    }

    pub fn resolve(&self) -> Result<Scenario, ConfigError> {
        self.check_names()?;
        if self.sampling.times.is_empty() || self.sampling.times.iter().any(|t| !t.is_finite()) {
            return Err(ConfigError::Invalid("sampling.times must be a non-empty list of finite times".into()));
        }
        if self.sampling.points == 0 {
            return Err(ConfigError::Invalid("sampling.points must be positive".into()));
        }
        let flow = self.resolve_flow()?;
        let params = self.expression_params();
        let rho0 = scalar_of_reference("material.rho0", &self.material.rho0, &params)?;
        let mass = MassField::new(flow.clone(), move |p| rho0(p));
        let q0 = scalar_of_reference("material.q0", &self.material.q0, &params)?;
        let mut fields = Vec::new();
        for fc in &self.fields {
            fields.push(resolve_field(fc, &flow, &params)?);
        }
        Ok(Scenario {
            flow,
            mass,
            charge0: Arc::new(move |p| q0(p)),
            fields,
            samples: crate::sampling::sample_points(self.sampling.seed, self.sampling.points),
            times: self.sampling.times.clone(),
            seed: self.sampling.seed,
            integrals: self.integrals.clone(),
        })
    }

    fn expression_params(&self) -> Params {
        let mut p: Params = self.flow.params.clone();
        p.extend(self.params.iter().map(|(k, v)| (k.clone(), *v)));
        p
    }

    fn resolve_flow(&self) -> Result<FlowMap, ConfigError> {
        let fc = &self.flow;
        let dt = fc.dt.unwrap_or(DEFAULT_DT);
        if let Some(components) = &fc.velocity {
            if components.len() != 3 {
                return Err(ConfigError::Invalid(format!("flow.velocity needs 3 components, got {}", components.len())));
            }
            let params = self.expression_params();
            let names: Vec<&str> = params.keys().map(String::as_str).collect();
            let exprs = components
                .iter()
                .map(|src| {
                    parse_with_params(src, &names)
                        .map_err(|e| ConfigError::Invalid(format!("flow.velocity `{src}`: {e}")))
                })
                .collect::<Result<Vec<Expr>, _>>()?;
            let exprs: [Expr; 3] = exprs.try_into().expect("three components");
            let name = fc.name.clone().unwrap_or_else(|| "velocity".into());
            return FlowMap::from_expressions(name, exprs, params, dt).map_err(|e| ConfigError::Invalid(e.to_string()));
        }
        let name = fc
            .name
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("flow needs either `name` or `velocity`".into()))?;
        if !CATALOG.contains(&name) {
            return Err(ConfigError::UnknownFlow { name: name.into() });
        }
        let flow = FlowMap::from_name(name, &fc.params).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if fc.integrate {
            flow.integrated(dt).map_err(|e| ConfigError::Invalid(e.to_string()))
        } else {
            Ok(flow)
        }
    }
}

type ReferenceScalar = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

fn scalar_of_reference(what: &str, src: &str, params: &Params) -> Result<ReferenceScalar, ConfigError> {
    let names: Vec<&str> = params.keys().map(String::as_str).collect();
    let e = parse_with_params(src, &names).map_err(|e| ConfigError::Invalid(format!("{what} `{src}`: {e}")))?;
    if e.depends_on_time() {
        return Err(ConfigError::Invalid(format!("{what} is a reference quantity and cannot depend on t")));
    }
    e.eval(0.0, &[0.0; 3], params)
        .map_err(|err| ConfigError::Invalid(format!("{what} `{src}`: {err}")))?;
    let params = params.clone();
    Ok(Arc::new(move |p: &Point| e.eval(0.0, &[p[0], p[1], p[2]], &params).unwrap_or(f64::NAN)))
}

fn resolve_field(fc: &FieldConfig, flow: &FlowMap, params: &Params) -> Result<ConfiguredField, ConfigError> {
    let err = |message: String| ConfigError::Field {
        field: fc.name.clone(),
        message,
    };
    let variance = Variance::from_name(&fc.variance).ok_or_else(|| {
        let all: Vec<&str> = Variance::ALL.iter().map(|v| v.name()).collect();
        err(format!("unknown variance `{}`; expected one of {}", fc.variance, all.join(", ")))
    })?;
    let names: Vec<&str> = params.keys().map(String::as_str).collect();
    let parse_all = |srcs: &[String]| -> Result<Vec<Expr>, ConfigError> {
        srcs.iter()
            .map(|s| parse_with_params(s, &names).map_err(|e| err(format!("`{s}`: {e}"))))
            .collect()
    };
    let (field, default_transported) = match (&fc.reference, &fc.eulerian) {
        (Some(srcs), None) => {
            let exprs = parse_all(srcs)?;
            if exprs.iter().any(Expr::depends_on_time) {
                return Err(err("reference components cannot depend on t".into()));
            }
            let v0 = reference_from_expressions(variance, exprs, params.clone()).map_err(|e| err(e.to_string()))?;
            (transported_field(flow, variance, v0).renamed(fc.name.clone()), true)
        }
        (None, Some(srcs)) => {
            let exprs = parse_all(srcs)?;
            let field = EulerianField::from_expressions(fc.name.clone(), variance, exprs, params.clone())
                .map_err(|e| err(e.to_string()))?;
            (field, false)
        }
        _ => return Err(err("give exactly one of `reference` or `eulerian`".into())),
    };
    Ok(ConfiguredField {
        field,
        transported: fc.transported.unwrap_or(default_transported),
    })
}

#[derive(Debug, Clone)]
pub struct ConfiguredField {
    pub field: EulerianField,
    pub transported: bool,
}

/// A resolved configuration: everything the checks need.
#[derive(Clone)]
pub struct Scenario {
    pub flow: FlowMap,
    pub mass: MassField,
    pub charge0: ReferenceScalar,
    pub fields: Vec<ConfiguredField>,
    pub samples: Vec<(f64, Point)>,
    pub times: Vec<f64>,
    pub seed: u64,
    pub integrals: IntegralConfig,
}

impl Scenario {
    pub fn fields_of(&self, variance: Variance, transported: bool) -> impl Iterator<Item = &EulerianField> {
        self.fields
            .iter()
            .filter(move |f| f.field.variance() == variance && f.transported == transported)
            .map(|f| &f.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_flow_lists_catalog() {
        let cfg = RunConfig::from_toml_str("[flow]\nname = \"vortexx\"\n").unwrap();
        let msg = cfg.resolve().err().unwrap().to_string();
        assert!(msg.contains("vortexx"));
        for name in CATALOG {
            assert!(msg.contains(name));
        }
    }

    #[test]
    fn parses_full_config() {
        let text = r#"
            checks = ["kelvin", "transport-all-variances"]
            [flow]
            name = "shear"
            params = { gamma = 1.5 }
            [params]
            k = 2.0
            [[fields]]
            name = "C"
            variance = "covector"
            reference = ["-x2", "x1", "k"]
            [[fields]]
            name = "s"
            variance = "scalar"
            eulerian = ["x1 - gamma*t*x2"]
            transported = true
            [sampling]
            points = 10
            seed = 7
            [output]
            formats = ["csv", "json"]
        "#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        let sc = cfg.resolve().unwrap();
        assert!(matches!(sc.flow, FlowMap::Shear { gamma } if gamma == 1.5));
        assert_eq!(sc.samples.len(), 10);
        assert_eq!(sc.fields.len(), 2);
        assert!(sc.fields.iter().all(|f| f.transported));
        assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Json]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = [
            "[flow]\nname = \"shear\"\nparams = { omega = 1.0 }\n",
            "[flow]\nvelocity = [\"x2\", \"0\"]\n",
            "[flow]\nname = \"zero\"\n[[fields]]\nname = \"f\"\nvariance = \"spinor\"\nreference = [\"1\"]\n",
            "[flow]\nname = \"zero\"\n[[fields]]\nname = \"f\"\nvariance = \"scalar\"\nreference = [\"t\"]\n",
            "checks = [\"kelvn\"]\n[flow]\nname = \"zero\"\n",
            "[flow]\nname = \"zero\"\n[material]\nrho0 = \"log(0)\"\n",
        ];
        for text in bad {
            assert!(RunConfig::from_toml_str(text).unwrap().resolve().is_err(), "{text}");
        }
        assert!(RunConfig::from_toml_str("[flow]\nname = \"zero\"\nbogus = 1\n").is_err());
    }

    #[test]
    fn expression_flow_uses_trajectory_mode() {
        let cfg = RunConfig::from_toml_str("[flow]\nname = \"swirl\"\nvelocity = [\"-x2\", \"x1\", \"0\"]\ndt = 0.01\n").unwrap();
        let sc = cfg.resolve().unwrap();
        assert!(!sc.flow.has_analytic_f());
        assert_eq!(sc.flow.name(), "swirl");
    }
}
