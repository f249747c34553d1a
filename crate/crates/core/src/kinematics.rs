//! Flow maps, velocity gradients and the deformation gradient.
//!
//! A [`FlowMap`] carries reference points `X` to current points
//! `x = φ_t(X)`. Catalog flows are linear, `u = L x`, with closed-form maps
//! `φ_t = exp(tL)`; velocity-only flows are realised by integrating
//! trajectories with fixed-step RK4.

use std::fmt;
use std::sync::Arc;

use nalgebra::SVector;

use crate::expr::{Expr, Params};
use crate::fd::{self, H_SPACE};
use crate::tensor::{EulerianField, Provenance, TensorValue, Variance};
use crate::{Error, Mat3, Point, Result, Vec3};

/// Below this `|det F|` a map is treated as degenerate.
pub const DET_FLOOR: f64 = 1e-10;

/// Default RK4 step for trajectory integration.
pub const DEFAULT_DT: f64 = 1e-3;

/// Names of the catalog flows, in listing order.
pub const CATALOG: [&str; 5] = ["zero", "rotation", "shear", "expansion", "nilpotent"];

#[derive(Debug, Clone)]
pub enum FlowMap {
    /// `u = 0`.
    Zero,
    /// Rigid rotation about `e₃`: `u = Ω e₃ × x`.
    Rotation { omega: f64 },
    /// Simple shear: `u = (γ x₂, 0, 0)`.
    Shear { gamma: f64 },
    /// Isotropic expansion: `u = a x`.
    Expansion { rate: f64 },
    /// Steady `u = (x₂, x₃, 0)`; its vorticity is not frozen in.
    Nilpotent,
    /// A flow known only through its velocity; map and inverse are integrated.
    Integrated(Arc<IntegratedFlow>),
}

/// Velocity-only flow. The forward map integrates `dx/dt = u(t, x)` from 0
/// to `t`; the inverse integrates back from `t` to 0.
#[derive(Debug, Clone)]
pub struct IntegratedFlow {
    pub name: String,
    pub velocity: VelocitySource,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub enum VelocitySource {
    /// Three scalar expressions for the velocity components.
    Expressions { components: [Expr; 3], params: Params },
    /// The velocity of another flow; its closed-form map is ignored.
    Flow(FlowMap),
}

impl fmt::Display for FlowMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())?;
        let params = self.params();
        if !params.is_empty() {
            let list: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", list.join(", "))?;
        }
        Ok(())
    }
}

impl FlowMap {
    /// Catalog flows with their default parameters.
    pub fn catalog() -> Vec<FlowMap> {
        CATALOG
            .iter()
            .map(|n| FlowMap::from_name(n, &Params::new()).expect("catalog name"))
            .collect()
    }

    /// Builds a catalog flow, filling unspecified parameters with defaults.
    pub fn from_name(name: &str, params: &Params) -> Result<FlowMap> {
        let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
        let allowed: &[&str] = match name {
            "zero" | "nilpotent" => &[],
            "rotation" => &["omega"],
            "shear" => &["gamma"],
            "expansion" => &["a"],
            _ => {
                return Err(Error::Argument(format!(
                    "unknown flow `{name}`; catalog: {}",
                    CATALOG.join(", ")
                )))
            }
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Argument(format!(
                "flow `{name}` has no parameter `{bad}` (accepted: [{}])",
                allowed.join(", ")
            )));
        }
        let flow = match name {
            "zero" => FlowMap::Zero,
            "rotation" => FlowMap::Rotation { omega: get("omega", 1.0) },
            "shear" => FlowMap::Shear { gamma: get("gamma", 2.0) },
            "expansion" => FlowMap::Expansion { rate: get("a", 0.5) },
            _ => FlowMap::Nilpotent,
        };
        if flow.params().iter().any(|(_, v)| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite parameter for flow `{name}`")));
        }
        Ok(flow)
    }

    /// A velocity-only flow defined by three component expressions.
    pub fn from_expressions(name: impl Into<String>, components: [Expr; 3], params: Params, dt: f64) -> Result<FlowMap> {
        if !(dt > 0.0) {
            return Err(Error::Argument(format!("integration step must be positive, got {dt}")));
        }
        Ok(FlowMap::Integrated(Arc::new(IntegratedFlow {
            name: name.into(),
            velocity: VelocitySource::Expressions { components, params },
            dt,
        })))
    }

    /// The same velocity field, but with the map obtained by trajectory integration.
    pub fn integrated(&self, dt: f64) -> Result<FlowMap> {
        if !(dt > 0.0) {
            return Err(Error::Argument(format!("integration step must be positive, got {dt}")));
        }
        Ok(FlowMap::Integrated(Arc::new(IntegratedFlow {
            name: format!("{}~integrated", self.name()),
            velocity: VelocitySource::Flow(self.clone()),
            dt,
        })))
    }

    pub fn name(&self) -> String {
        match self {
            FlowMap::Zero => "zero".into(),
            FlowMap::Rotation { .. } => "rotation".into(),
            FlowMap::Shear { .. } => "shear".into(),
            FlowMap::Expansion { .. } => "expansion".into(),
            FlowMap::Nilpotent => "nilpotent".into(),
            FlowMap::Integrated(i) => i.name.clone(),
        }
    }

    pub fn params(&self) -> Vec<(String, f64)> {
        match self {
            FlowMap::Zero | FlowMap::Nilpotent => vec![],
            FlowMap::Rotation { omega } => vec![("omega".into(), *omega)],
            FlowMap::Shear { gamma } => vec![("gamma".into(), *gamma)],
            FlowMap::Expansion { rate } => vec![("a".into(), *rate)],
            FlowMap::Integrated(i) => match &i.velocity {
                VelocitySource::Expressions { params, .. } => {
                    params.iter().map(|(k, v)| (k.clone(), *v)).collect()
                }
                VelocitySource::Flow(f) => f.params(),
            },
        }
    }

    /// Velocity independent of time.
    pub fn is_steady(&self) -> bool {
        match self {
            FlowMap::Integrated(i) => match &i.velocity {
                VelocitySource::Expressions { components, .. } => {
                    components.iter().all(|c| !c.depends_on_time())
                }
                VelocitySource::Flow(f) => f.is_steady(),
            },
            _ => true,
        }
    }

    /// Whether `F` is available in closed form.
    pub fn has_analytic_f(&self) -> bool {
        !matches!(self, FlowMap::Integrated(_))
    }

    /// Constant velocity gradient `L` of a catalog flow (`u = L x`).
    fn linear_gradient(&self) -> Option<Mat3> {
        Some(match self {
            FlowMap::Zero => Mat3::zeros(),
            FlowMap::Rotation { omega } => {
                Mat3::new(0.0, -omega, 0.0, *omega, 0.0, 0.0, 0.0, 0.0, 0.0)
            }
            FlowMap::Shear { gamma } => Mat3::new(0.0, *gamma, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            FlowMap::Expansion { rate } => Mat3::identity() * *rate,
            FlowMap::Nilpotent => Mat3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
            FlowMap::Integrated(_) => return None,
        })
    }

    /// Closed-form `F = ∂φ_t/∂X`; independent of `X` for the linear catalog.
    pub fn analytic_f(&self, t: f64, _reference: &Point) -> Option<Mat3> {
        Some(match self {
            FlowMap::Zero => Mat3::identity(),
            FlowMap::Rotation { omega } => {
                let (s, c) = (omega * t).sin_cos();
                Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
            }
            FlowMap::Shear { gamma } => Mat3::new(1.0, gamma * t, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0),
            FlowMap::Expansion { rate } => Mat3::identity() * (rate * t).exp(),
            FlowMap::Nilpotent => {
                Mat3::new(1.0, t, 0.5 * t * t, 0.0, 1.0, t, 0.0, 0.0, 1.0)
            }
            FlowMap::Integrated(_) => return None,
        })
    }

    /// Closed-form `F⁻¹ = exp(-tL)`.
    fn analytic_f_inv(&self, t: f64) -> Option<Mat3> {
        match self {
            FlowMap::Integrated(_) => None,
            FlowMap::Shear { .. } | FlowMap::Rotation { .. } | FlowMap::Nilpotent => {
                self.analytic_f(-t, &Point::zeros())
            }
            FlowMap::Expansion { rate } => Some(Mat3::identity() * (-rate * t).exp()),
            FlowMap::Zero => Some(Mat3::identity()),
        }
    }

    pub fn velocity(&self, t: f64, x: &Point) -> Result<Vec3> {
        match self {
            FlowMap::Integrated(i) => i.velocity(t, x),
            _ => Ok(self.linear_gradient().expect("catalog flow") * x),
        }
    }

    pub fn forward(&self, t: f64, reference: &Point) -> Result<Point> {
        match self {
            FlowMap::Integrated(i) => i.integrate(0.0, t, reference),
            _ => Ok(self.analytic_f(t, reference).expect("catalog flow") * reference),
        }
    }

    pub fn inverse(&self, t: f64, x: &Point) -> Result<Point> {
        match self {
            FlowMap::Integrated(i) => i.integrate(t, 0.0, x),
            _ => Ok(self.analytic_f_inv(t).expect("catalog flow") * x),
        }
    }

    /// Deformation state by the most accurate route available: closed form
    /// for catalog flows, RK4 evolution for integrated ones.
    pub fn deformation(&self, t: f64, reference: &Point) -> Result<DeformationState> {
        match self {
            FlowMap::Integrated(i) => integrate_deformation(self, reference, t, i.dt),
            _ => {
                let f = self.analytic_f(t, reference).expect("catalog flow");
                let f_inv = self.analytic_f_inv(t).expect("catalog flow");
                DeformationState::from_parts(f, f_inv, t, *reference)
            }
        }
    }
}

impl IntegratedFlow {
    fn velocity(&self, t: f64, x: &Point) -> Result<Vec3> {
        let u = match &self.velocity {
            VelocitySource::Expressions { components, params } => {
                let p = [x[0], x[1], x[2]];
                let mut u = Vec3::zeros();
                for (k, c) in components.iter().enumerate() {
                    u[k] = c.eval(t, &p, params)?;
                }
                u
            }
            VelocitySource::Flow(f) => f.velocity(t, x)?,
        };
        if u.iter().all(|v| v.is_finite()) {
            Ok(u)
        } else {
            Err(Error::non_finite("velocity", t, x))
        }
    }

    fn integrate(&self, t0: f64, t1: f64, start: &Point) -> Result<Point> {
        rk4(|t, y: &SVector<f64, 3>| self.velocity(t, y), t0, *start, t1, self.dt)
    }
}

/// Classical fixed-step RK4 from `t0` to `t1`. The number of steps is
/// `ceil(|t1 - t0| / dt)`, spaced uniformly.
pub fn rk4<const N: usize, F>(f: F, t0: f64, y0: SVector<f64, N>, t1: f64, dt: f64) -> Result<SVector<f64, N>>
where
    F: Fn(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let n = (span.abs() / dt).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut y = y0;
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let k1 = f(t, &y)?;
        let k2 = f(t + 0.5 * h, &(y + k1 * (0.5 * h)))?;
        let k3 = f(t + 0.5 * h, &(y + k2 * (0.5 * h)))?;
        let k4 = f(t + h, &(y + k3 * h))?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    Ok(y)
}

/// `F`, `F⁻¹` and `det F` at a reference point and time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationState {
    pub f: Mat3,
    pub f_inv: Mat3,
    pub det_f: f64,
    pub t: f64,
    pub reference: Point,
}

impl DeformationState {
    /// Builds the state from `F`, inverting it.
    pub fn from_matrix(f: Mat3, t: f64, reference: Point) -> Result<Self> {
        let det = f.determinant();
        let degenerate = Error::DegenerateMap {
            det,
            t,
            point: [reference[0], reference[1], reference[2]],
        };
        if !(det.abs() >= DET_FLOOR) || det < 0.0 {
            return Err(degenerate);
        }
        let f_inv = f.try_inverse().ok_or(degenerate)?;
        Self::from_parts(f, f_inv, t, reference)
    }

    /// Builds the state from an independently computed `F` and `F⁻¹`.
    pub fn from_parts(f: Mat3, f_inv: Mat3, t: f64, reference: Point) -> Result<Self> {
        let det_f = f.determinant();
        if !(det_f >= DET_FLOOR) {
            return Err(Error::DegenerateMap {
                det: det_f,
                t,
                point: [reference[0], reference[1], reference[2]],
            });
        }
        Ok(DeformationState { f, f_inv, det_f, t, reference })
    }

    pub fn identity(t: f64, reference: Point) -> Self {
        DeformationState {
            f: Mat3::identity(),
            f_inv: Mat3::identity(),
            det_f: 1.0,
            t,
            reference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeformationMethod {
    Analytic,
    FiniteDifference,
}

/// `∂u/∂x`, closed form for catalog flows, central differences otherwise.
pub fn velocity_gradient(flow: &FlowMap, t: f64, x: &Point) -> Result<Mat3> {
    match flow.linear_gradient() {
        Some(l) => {
            flow.velocity(t, x)?;
            Ok(l)
        }
        None => fd::jacobian(|p| flow.velocity(t, p), x, H_SPACE),
    }
}

pub fn deformation_gradient(
    flow: &FlowMap,
    t: f64,
    reference: &Point,
    method: DeformationMethod,
) -> Result<DeformationState> {
    match method {
        DeformationMethod::Analytic => {
            let f = flow.analytic_f(t, reference).ok_or_else(|| {
                Error::Argument(format!("flow `{}` has no closed-form deformation gradient", flow.name()))
            })?;
            DeformationState::from_matrix(f, t, *reference)
        }
        DeformationMethod::FiniteDifference => {
            let f = fd::jacobian(|p| flow.forward(t, p), reference, H_SPACE)?;
            DeformationState::from_matrix(f, t, *reference)
        }
    }
}

/// Integrates `dF/dt = L F` and `dF⁻¹/dt = -F⁻¹ L` together with the
/// trajectory, from `F(0) = F⁻¹(0) = I`, with fixed-step RK4.
pub fn evolve_deformation(flow: &FlowMap, reference: &Point, t_end: f64, dt: f64) -> Result<DeformationState> {
    if !(dt > 0.0) {
        return Err(Error::Argument(format!("step must be positive, got {dt}")));
    }
    if !(t_end > 0.0) {
        return Err(Error::Argument(format!("end time must be positive, got {t_end}")));
    }
    integrate_deformation(flow, reference, t_end, dt)
}

fn integrate_deformation(flow: &FlowMap, reference: &Point, t_end: f64, dt: f64) -> Result<DeformationState> {
    let mut y0 = SVector::<f64, 21>::zeros();
    y0.fixed_rows_mut::<3>(0).copy_from(reference);
    for k in 0..3 {
        y0[3 + 4 * k] = 1.0;
        y0[12 + 4 * k] = 1.0;
    }
    let rhs = |t: f64, y: &SVector<f64, 21>| -> Result<SVector<f64, 21>> {
        let x = Point::new(y[0], y[1], y[2]);
        let l = velocity_gradient(flow, t, &x)?;
        let f = unpack(y, 3);
        let f_inv = unpack(y, 12);
        let mut dy = SVector::<f64, 21>::zeros();
        dy.fixed_rows_mut::<3>(0).copy_from(&flow.velocity(t, &x)?);
        pack(&mut dy, 3, &(l * f));
        pack(&mut dy, 12, &(-(f_inv * l)));
        Ok(dy)
    };
    let y = rk4(rhs, 0.0, y0, t_end, dt)?;
    DeformationState::from_parts(unpack(&y, 3), unpack(&y, 12), t_end, *reference)
}

fn unpack(y: &SVector<f64, 21>, offset: usize) -> Mat3 {
    Mat3::from_row_slice(&y.as_slice()[offset..offset + 9])
}

fn pack(y: &mut SVector<f64, 21>, offset: usize, m: &Mat3) {
    for r in 0..3 {
        for c in 0..3 {
            y[offset + 3 * r + c] = m[(r, c)];
        }
    }
}

type ReferenceDensity = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Mass distribution in the reference configuration, carried by a flow so
/// that `ρ det F = ρ₀(X)`.
#[derive(Clone)]
pub struct MassField {
    pub rho0: ReferenceDensity,
    pub flow: FlowMap,
}

impl fmt::Debug for MassField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MassField").field("flow", &self.flow).finish_non_exhaustive()
    }
}

impl MassField {
    pub fn new(flow: FlowMap, rho0: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        MassField { rho0: Arc::new(rho0), flow }
    }

    pub fn uniform(flow: FlowMap, rho0: f64) -> Self {
        Self::new(flow, move |_| rho0)
    }

    /// The density as an Eulerian 3-form field.
    pub fn density_field(&self) -> EulerianField {
        let mass = self.clone();
        EulerianField::new("rho", Variance::ThreeForm, Provenance::Transported, move |t, x| {
            Ok(TensorValue::ThreeForm(mass_density(&mass, t, x)?))
        })
    }
}

/// `ρ(t, x) = ρ₀(X) / det F` with `X = φ_t⁻¹(x)`.
pub fn mass_density(mass: &MassField, t: f64, x: &Point) -> Result<f64> {
    let reference = mass.flow.inverse(t, x)?;
    let state = mass.flow.deformation(t, &reference)?;
    let rho0 = (mass.rho0)(&reference);
    if !rho0.is_finite() {
        return Err(Error::non_finite("reference density", t, &reference));
    }
    if rho0 <= 0.0 {
        return Err(Error::Domain(format!("reference density {rho0} is not positive")));
    }
    Ok(rho0 / state.det_f)
}
