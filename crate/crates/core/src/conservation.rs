//! Conservation laws in divergence form, Clebsch potentials, and the
//! electromagnetic transport scenarios.

use std::fmt;
use std::sync::Arc;

use crate::fd::{self, Stencil};
use crate::kinematics::{mass_density, FlowMap, MassField};
use crate::lie::{lie_derivative_with, material_derivative_with};
use crate::report::{CheckReport, Sample};
use crate::tensor::{derived_gradient_with, pull_back, EulerianField, Provenance, TensorValue, Variance};
use crate::{Error, Point, Result, Vec3};

fn require(field: &EulerianField, variance: Variance, role: &str) -> Result<()> {
    if field.variance() == variance {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "{role} must be a {variance} field, `{}` is {}",
            field.name(),
            field.variance()
        )))
    }
}

/// `∂(ρβ)/∂t + div(ρβu)`. Equals `ρ dβ/dt` when mass is conserved.
pub fn divergence_law_residual(beta: &EulerianField, mass: &MassField, flow: &FlowMap, t: f64, x: &Point) -> Result<f64> {
    divergence_law_residual_with(beta, mass, flow, t, x, Stencil::DEFAULT)
}

pub fn divergence_law_residual_with(
    beta: &EulerianField,
    mass: &MassField,
    flow: &FlowMap,
    t: f64,
    x: &Point,
    stencil: Stencil,
) -> Result<f64> {
    require(beta, Variance::Scalar, "the conserved quantity")?;
    let density = |tau: f64, p: &Point| -> Result<f64> { Ok(mass_density(mass, tau, p)? * beta.scalar(tau, p)?) };
    let time = fd::central(|tau| density(tau, x), t, stencil.h_time)?;
    let flux = fd::divergence(|p| Ok(flow.velocity(t, p)? * density(t, p)?), x, stencil.h_space)?;
    Ok(time + flux)
}

type PotentialFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `ρJ = f(s, η) grad s × grad η` assembled from two scalar potentials.
#[derive(Clone)]
pub struct ClebschData {
    pub f: PotentialFn,
    pub s: EulerianField,
    pub eta: EulerianField,
    pub rho_j: EulerianField,
}

impl fmt::Debug for ClebschData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClebschData")
            .field("s", &self.s)
            .field("eta", &self.eta)
            .finish_non_exhaustive()
    }
}

impl ClebschData {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, s: EulerianField, eta: EulerianField) -> Result<Self> {
        Self::with_stencil(f, s, eta, Stencil::DEFAULT)
    }

    pub fn with_stencil(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        s: EulerianField,
        eta: EulerianField,
        stencil: Stencil,
    ) -> Result<Self> {
        require(&s, Variance::Scalar, "s")?;
        require(&eta, Variance::Scalar, "eta")?;
        let f: PotentialFn = Arc::new(f);
        let grad_s = derived_gradient_with(&s, stencil)?;
        let grad_eta = derived_gradient_with(&eta, stencil)?;
        let (ff, sc, ec) = (f.clone(), s.clone(), eta.clone());
        let rho_j = EulerianField::new(
            format!("f({}, {}) grad {} x grad {}", s.name(), eta.name(), s.name(), eta.name()),
            Variance::Vector,
            Provenance::Derived,
            move |t, x| {
                let gs = grad_s.eval(t, x)?.as_covector().expect("covector").transpose();
                let ge = grad_eta.eval(t, x)?.as_covector().expect("covector").transpose();
                let k = ff(sc.scalar(t, x)?, ec.scalar(t, x)?);
                Ok(TensorValue::Vector(gs.cross(&ge) * k))
            },
        );
        Ok(ClebschData { f, s, eta, rho_j })
    }

    /// `J = ρJ / ρ`.
    pub fn specific(&self, mass: &MassField) -> EulerianField {
        let (rho_j, mass) = (self.rho_j.clone(), mass.clone());
        EulerianField::new("J", Variance::Vector, Provenance::Derived, move |t, x| {
            let rho = mass_density(&mass, t, x)?;
            Ok(TensorValue::Vector(rho_j.eval(t, x)?.as_vector().expect("vector") / rho))
        })
    }
}

/// Residual labels of [`clebsch_verify`], in sample order.
pub const CLEBSCH_COMPONENTS: [&str; 5] = ["div_rho_j", "grad_s_dot_j", "ds_dt", "deta_dt", "lie_j_norm"];

/// Checks the premises and the conclusion of the Clebsch construction at
/// each sample; the sample norm is the largest absolute component.
pub fn clebsch_verify(
    data: &ClebschData,
    mass: &MassField,
    flow: &FlowMap,
    samples: &[(f64, Point)],
    tolerance: f64,
) -> Result<CheckReport> {
    clebsch_verify_with(data, mass, flow, samples, tolerance, Stencil::DEFAULT)
}

pub fn clebsch_verify_with(
    data: &ClebschData,
    mass: &MassField,
    flow: &FlowMap,
    samples: &[(f64, Point)],
    tolerance: f64,
    stencil: Stencil,
) -> Result<CheckReport> {
    let j = data.specific(mass);
    let grad_s = derived_gradient_with(&data.s, stencil)?;
    let rows = samples
        .iter()
        .map(|&(t, x)| {
            let rho = mass_density(mass, t, &x)?;
            if rho <= 0.0 {
                return Err(Error::Domain(format!("density {rho} is not positive at t = {t}")));
            }
            let div = fd::divergence(|p| Ok(data.rho_j.eval(t, p)?.as_vector().expect("vector")), &x, stencil.h_space)?;
            let jv = j.eval(t, &x)?.as_vector().expect("vector");
            let orth = (grad_s.eval(t, &x)?.as_covector().expect("covector") * jv)[0];
            let ds = material_derivative_with(&data.s, flow, t, &x, stencil)?;
            let deta = material_derivative_with(&data.eta, flow, t, &x, stencil)?;
            let lie = lie_derivative_with(&j, flow, t, &x, stencil)?.value.norm();
            Ok(Sample::sup(t, [x[0], x[1], x[2]], vec![div, orth, ds, deta, lie]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport::new(
        "clebsch",
        "clebsch-representation",
        CLEBSCH_COMPONENTS.iter().map(|s| s.to_string()).collect(),
        rows,
        tolerance,
    ))
}

type ReferenceCharge = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Volumetric charge carried by a flow, `q det F = q₀(X)`.
#[derive(Clone)]
pub struct ChargeField {
    pub q0: ReferenceCharge,
    pub flow: FlowMap,
}

impl fmt::Debug for ChargeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChargeField").field("flow", &self.flow).finish_non_exhaustive()
    }
}

impl ChargeField {
    pub fn new(flow: FlowMap, q0: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        ChargeField { q0: Arc::new(q0), flow }
    }
}

/// `q(t, x) = q₀(X) / det F`; unlike mass, any sign is allowed.
pub fn charge_density(charge: &ChargeField, t: f64, x: &Point) -> Result<f64> {
    let reference = charge.flow.inverse(t, x)?;
    let state = charge.flow.deformation(t, &reference)?;
    let q0 = (charge.q0)(&reference);
    if !q0.is_finite() {
        return Err(Error::non_finite("reference charge", t, &reference));
    }
    Ok(q0 / state.det_f)
}

/// `∂q/∂t + div(q u)`.
pub fn charge_conservation_residual(charge: &ChargeField, t: f64, x: &Point) -> Result<f64> {
    charge_conservation_residual_with(charge, t, x, Stencil::DEFAULT)
}

pub fn charge_conservation_residual_with(charge: &ChargeField, t: f64, x: &Point, stencil: Stencil) -> Result<f64> {
    let time = fd::central(|tau| charge_density(charge, tau, x), t, stencil.h_time)?;
    let flux = fd::divergence(
        |p| Ok(charge.flow.velocity(t, p)? * charge_density(charge, t, p)?),
        x,
        stencil.h_space,
    )?;
    Ok(time + flux)
}

/// `D₀ = det F · F⁻¹ D` at the particle `X = φ_t⁻¹(x)`.
pub fn electric_pullback(d: &EulerianField, flow: &FlowMap, t: f64, x: &Point) -> Result<Vec3> {
    require(d, Variance::Vector, "D")?;
    let reference = flow.inverse(t, x)?;
    let state = flow.deformation(t, &reference)?;
    let value = TensorValue::TwoForm(d.eval(t, x)?.as_vector().expect("vector"));
    Ok(pull_back(&value, &state)?.as_vector().expect("2-form"))
}

/// `max_t |D₀(t, X) − D₀(t₀, X)|` following one particle. Zero exactly when
/// `D` moves with the fluid as a 2-form.
pub fn electric_reference_variation(d: &EulerianField, flow: &FlowMap, reference: &Point, times: &[f64]) -> Result<f64> {
    let pulled = times
        .iter()
        .map(|&t| electric_pullback(d, flow, t, &flow.forward(t, reference)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(match pulled.first() {
        None => 0.0,
        Some(first) => pulled.iter().fold(0.0f64, |m, p| m.max((p - first).norm())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionResidual {
    /// `∂H/∂t + (∂H/∂x) u + H div u − (∂u/∂x) H`
    pub residual: Vec3,
    pub div_h: f64,
    /// `∂H/∂t − curl(u × H)`, which differs from `residual` by `u div H`.
    pub curl_form: Vec3,
}

/// Magnetic induction for a field `H` read as a 2-form.
pub fn induction_residual(h: &EulerianField, flow: &FlowMap, t: f64, x: &Point) -> Result<InductionResidual> {
    induction_residual_with(h, flow, t, x, Stencil::DEFAULT)
}

pub fn induction_residual_with(h: &EulerianField, flow: &FlowMap, t: f64, x: &Point, stencil: Stencil) -> Result<InductionResidual> {
    require(h, Variance::Vector, "H")?;
    let field = |tau: f64, p: &Point| -> Result<Vec3> { Ok(h.eval(tau, p)?.as_vector().expect("vector")) };
    let hv = field(t, x)?;
    let u = flow.velocity(t, x)?;
    let l = crate::kinematics::velocity_gradient(flow, t, x)?;
    let dh_dt = (field(t + stencil.h_time, x)? - field(t - stencil.h_time, x)?) / (2.0 * stencil.h_time);
    let grad_h = fd::jacobian(|p| field(t, p), x, stencil.h_space)?;
    let residual = dh_dt + grad_h * u + hv * l.trace() - l * hv;
    let div_h = grad_h.trace();
    let curl = fd::jacobian(|p| Ok(flow.velocity(t, p)?.cross(&field(t, p)?)), x, stencil.h_space)?;
    Ok(InductionResidual {
        residual,
        div_h,
        curl_form: dh_dt - fd::curl_of_jacobian(&curl),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::transported_field;

    fn scalar(name: &str, f: impl Fn(f64, &Point) -> f64 + Send + Sync + 'static) -> EulerianField {
        EulerianField::new(name, Variance::Scalar, Provenance::Builtin, move |t, x| Ok(TensorValue::Scalar(f(t, x))))
    }

    fn vector(name: &str, f: impl Fn(f64, &Point) -> Vec3 + Send + Sync + 'static) -> EulerianField {
        EulerianField::new(name, Variance::Vector, Provenance::Builtin, move |t, x| Ok(TensorValue::Vector(f(t, x))))
    }

    fn grid() -> Vec<(f64, Point)> {
        let mut out = Vec::new();
        for t in [0.0, 0.4, 0.9] {
            for x in [Point::new(0.3, -0.7, 0.2), Point::new(-0.5, 0.5, 0.9), Point::new(0.1, 0.8, -0.6)] {
                out.push((t, x));
            }
        }
        out
    }

    #[test]
    fn mass_law_on_catalog() {
        let one = EulerianField::constant("1", TensorValue::Scalar(1.0));
        for flow in FlowMap::catalog() {
            let mass = MassField::new(flow.clone(), |p| 1.0 + 0.5 * p[0].sin());
            for (t, x) in grid() {
                let r = divergence_law_residual(&one, &mass, &flow, t, &x).unwrap();
                assert!(r.abs() <= 1e-5, "{} {r}", flow.name());
            }
        }
    }

    #[test]
    fn scalar_law_examples() {
        let flow = FlowMap::Shear { gamma: 2.0 };
        let mass = MassField::uniform(flow.clone(), 1.0);
        let beta = scalar("x1-2t x2", |t, x| x[0] - 2.0 * t * x[1]);
        for (t, x) in grid() {
            assert!(divergence_law_residual(&beta, &mass, &flow, t, &x).unwrap().abs() <= 1e-5);
        }
        let x1 = scalar("x1", |_, x| x[0]);
        let r = divergence_law_residual(&x1, &mass, &flow, 0.3, &Point::new(0.0, 1.0, 0.0)).unwrap();
        assert!((r - 2.0).abs() < 1e-6);
    }

    #[test]
    fn clebsch_static() {
        let flow = FlowMap::Zero;
        let data = ClebschData::new(|_, _| 1.0, scalar("x3", |_, x| x[2]), scalar("x1", |_, x| x[0])).unwrap();
        let mass = MassField::uniform(flow.clone(), 1.0);
        let rj = data.rho_j.eval(0.0, &Point::new(0.2, 0.3, 0.4)).unwrap().as_vector().unwrap();
        assert!((rj - Vec3::y()).norm() < 1e-12);
        let report = clebsch_verify(&data, &mass, &flow, &grid(), 1e-10).unwrap();
        assert!(report.passed, "{}", report.max_residual);
    }

    #[test]
    fn clebsch_shear_valid_and_broken() {
        let gamma = 2.0;
        let flow = FlowMap::Shear { gamma };
        let mass = MassField::uniform(flow.clone(), 1.0);
        let s = scalar("x3", |_, x| x[2]);
        let good = ClebschData::new(|_, _| 1.0, s.clone(), scalar("eta", move |t, x| x[0] - gamma * t * x[1])).unwrap();
        assert!(clebsch_verify(&good, &mass, &flow, &grid(), 1e-4).unwrap().passed);

        let broken = ClebschData::new(|_, _| 1.0, s, scalar("x1", |_, x| x[0])).unwrap();
        let report = clebsch_verify(&broken, &mass, &flow, &grid(), 1e-4).unwrap();
        assert!(!report.passed);
        for sample in &report.samples {
            let predicted = gamma * sample.x[1].abs();
            assert!((sample.residual[3].abs() - predicted).abs() <= 0.1 * predicted);
        }
    }

    #[test]
    fn nonpositive_density_is_a_domain_error() {
        let flow = FlowMap::Zero;
        let data = ClebschData::new(|_, _| 1.0, scalar("x3", |_, x| x[2]), scalar("x1", |_, x| x[0])).unwrap();
        let mass = MassField::new(flow.clone(), |p| p[0]);
        let err = clebsch_verify(&data, &mass, &flow, &[(0.0, Point::new(-1.0, 0.0, 0.0))], 1e-6).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn charge_examples() {
        let cases = [
            ChargeField::new(FlowMap::Expansion { rate: 0.5 }, |_| 1.0),
            ChargeField::new(FlowMap::Zero, |p| p[0] * p[1] - 3.0),
            ChargeField::new(FlowMap::Rotation { omega: 1.0 }, |p| p[0] * p[0] + p[1] * p[1]),
            ChargeField::new(FlowMap::Shear { gamma: 2.0 }, |p| -p[1].cos()),
        ];
        for charge in &cases {
            for (t, x) in grid() {
                assert!(charge_conservation_residual(charge, t, &x).unwrap().abs() <= 1e-5);
            }
        }
        let q = charge_density(&cases[0], 1.0, &Point::zeros()).unwrap();
        assert!((q - (-1.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn electric_pullback_examples() {
        let flow = FlowMap::Shear { gamma: 2.0 };
        let d = transported_field(&flow, Variance::TwoForm, |p| Ok(TensorValue::TwoForm(Vec3::new(p[1], 1.0, p[0] * p[2]))));
        let d = EulerianField::new("D", Variance::Vector, Provenance::Transported, move |t, x| {
            Ok(TensorValue::Vector(d.eval(t, x)?.as_vector().unwrap()))
        });
        let times = [0.0, 0.25, 0.5, 1.0];
        assert!(electric_reference_variation(&d, &flow, &Point::new(0.3, -0.4, 0.5), &times).unwrap() <= 1e-6);

        let growing = vector("t e3", |t, _| Vec3::z() * t);
        let d0 = electric_pullback(&growing, &FlowMap::Zero, 0.7, &Point::new(1.0, 2.0, 3.0)).unwrap();
        assert!((d0 - Vec3::z() * 0.7).norm() < 1e-15);
        let v = electric_reference_variation(&growing, &FlowMap::Zero, &Point::zeros(), &times).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn induction_examples() {
        let a = 0.5;
        let expansion = FlowMap::Expansion { rate: a };
        let transported = vector("H", move |t, _| Vec3::z() * (-2.0 * a * t).exp());
        let frozen = vector("e3", |_, _| Vec3::z());
        for (t, x) in grid() {
            let r = induction_residual(&transported, &expansion, t, &x).unwrap();
            assert!(r.residual.norm() <= 1e-8);
            assert!(r.div_h.abs() <= 1e-8);
            let r = induction_residual(&frozen, &expansion, t, &x).unwrap();
            assert!((r.residual - Vec3::z() * (2.0 * a)).norm() <= 1e-6);
            assert!(induction_residual(&frozen, &FlowMap::Zero, t, &x).unwrap().residual.norm() == 0.0);
        }

        let rotation = FlowMap::Rotation { omega: 1.0 };
        let h = transported_field(&rotation, Variance::TwoForm, |_| Ok(TensorValue::TwoForm(Vec3::z())));
        let h = EulerianField::new("H", Variance::Vector, Provenance::Transported, move |t, x| {
            Ok(TensorValue::Vector(h.eval(t, x)?.as_vector().unwrap()))
        });
        for (t, x) in grid() {
            let r = induction_residual(&h, &rotation, t, &x).unwrap();
            assert!(r.residual.norm() <= 1e-8);
            assert!(r.curl_form.norm() <= 1e-8);
        }
    }

    #[test]
    fn induction_matches_two_form_lie_derivative() {
        let flow = FlowMap::Shear { gamma: 2.0 };
        let h = vector("H", |t, x| Vec3::new(x[1] * t, x[0].sin(), x[2] * x[0]));
        let w = EulerianField::new("W", Variance::TwoForm, Provenance::Builtin, |t, x| {
            Ok(TensorValue::TwoForm(Vec3::new(x[1] * t, x[0].sin(), x[2] * x[0])))
        });
        for (t, x) in grid() {
            let a = induction_residual(&h, &flow, t, &x).unwrap().residual;
            let b = lie_derivative_with(&w, &flow, t, &x, Stencil::DEFAULT).unwrap().value.as_vector().unwrap();
            assert!((a - b).norm() <= 1e-12);
        }
    }
}
