//! Numerical Lie derivatives along the space-time velocity `(1, u)`.
//!
//! For every variance the Lie derivative is assembled from the material
//! derivative `d/dt = ∂/∂t + (u·∇)`, applied componentwise with central
//! differences, plus the variance-specific stretching terms:
//!
//! | variance | `d_L`                               |
//! |----------|-------------------------------------|
//! | scalar   | `ds/dt`                             |
//! | vector   | `dJ/dt − L J`                       |
//! | covector | `dC/dt + C L`                       |
//! | 2-form   | `dW/dt + W div u − L W`             |
//! | 3-form   | `dv/dt + v div u`                   |
//! | matrix   | `dM/dt + M L − L M`                 |
//!
//! with `L = ∂u/∂x`.

use std::fmt;

use crate::fd::{self, Stencil};
use crate::kinematics::{mass_density, velocity_gradient, FlowMap, MassField};
use crate::tensor::{derived_gradient_with, pull_back, push_forward, EulerianField, Provenance, TensorValue, Variance};
use crate::{Covec3, Error, Point, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiePart {
    /// `∂v/∂t`
    Time,
    /// `(∂v/∂x) u`
    Convection,
    /// `v div u` (2- and 3-forms)
    Dilatation,
    /// the `L`-dependent terms
    Stretching,
}

impl fmt::Display for LiePart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiePart::Time => "time",
            LiePart::Convection => "convection",
            LiePart::Dilatation => "dilatation",
            LiePart::Stretching => "stretching",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LieResult {
    pub variance: Variance,
    pub value: TensorValue,
    pub parts: Vec<(LiePart, TensorValue)>,
}

impl LieResult {
    fn assemble(variance: Variance, parts: Vec<(LiePart, TensorValue)>) -> Result<Self> {
        let mut value = TensorValue::zero(variance);
        for (_, p) in &parts {
            value = value.add(p)?;
        }
        Ok(LieResult { variance, value, parts })
    }

    pub fn part(&self, which: LiePart) -> Option<&TensorValue> {
        self.parts.iter().find(|(p, _)| *p == which).map(|(_, v)| v)
    }
}

/// `∂v/∂t` and `(∂v/∂x) u` componentwise.
fn material_parts(field: &EulerianField, u: &Vec3, t: f64, x: &Point, stencil: Stencil) -> Result<(TensorValue, TensorValue)> {
    let variance = field.variance();
    let dt = fd::central_components(|tau| field.components(tau, x), t, stencil.h_time)?;
    let mut conv = vec![0.0; variance.len()];
    for j in 0..3 {
        if u[j] == 0.0 {
            continue;
        }
        let dx = fd::central_components(
            |s| field.components(t, &(x + fd::axis(j) * s)),
            0.0,
            stencil.h_space,
        )?;
        for (c, d) in conv.iter_mut().zip(dx) {
            *c += u[j] * d;
        }
    }
    Ok((
        TensorValue::from_components(variance, &dt)?,
        TensorValue::from_components(variance, &conv)?,
    ))
}

/// `ds/dt = ∂s/∂t + (∂s/∂x) u`.
pub fn material_derivative(s: &EulerianField, flow: &FlowMap, t: f64, x: &Point) -> Result<f64> {
    material_derivative_with(s, flow, t, x, Stencil::DEFAULT)
}

pub fn material_derivative_with(s: &EulerianField, flow: &FlowMap, t: f64, x: &Point, stencil: Stencil) -> Result<f64> {
    if s.variance() != Variance::Scalar {
        return Err(Error::Argument(format!("material derivative needs a scalar field, got {}", s.variance())));
    }
    let u = flow.velocity(t, x)?;
    let (dt, conv) = material_parts(s, &u, t, x, stencil)?;
    Ok(dt.as_scalar().unwrap() + conv.as_scalar().unwrap())
}

pub fn lie_derivative(field: &EulerianField, flow: &FlowMap, t: f64, x: &Point) -> Result<LieResult> {
    lie_derivative_with(field, flow, t, x, Stencil::DEFAULT)
}

pub fn lie_derivative_with(field: &EulerianField, flow: &FlowMap, t: f64, x: &Point, stencil: Stencil) -> Result<LieResult> {
    let value = field.eval(t, x)?;
    let u = flow.velocity(t, x)?;
    let l = velocity_gradient(flow, t, x)?;
    let (dt, conv) = material_parts(field, &u, t, x, stencil)?;
    let mut parts = vec![(LiePart::Time, dt), (LiePart::Convection, conv)];
    let div = l.trace();
    match value {
        TensorValue::Scalar(_) => {}
        TensorValue::Vector(j) => parts.push((LiePart::Stretching, TensorValue::Vector(-(l * j)))),
        TensorValue::Covector(c) => parts.push((LiePart::Stretching, TensorValue::Covector(c * l))),
        TensorValue::TwoForm(w) => {
            parts.push((LiePart::Dilatation, TensorValue::TwoForm(w * div)));
            parts.push((LiePart::Stretching, TensorValue::TwoForm(-(l * w))));
        }
        TensorValue::ThreeForm(v) => parts.push((LiePart::Dilatation, TensorValue::ThreeForm(v * div))),
        TensorValue::Matrix(m) => parts.push((LiePart::Stretching, TensorValue::Matrix(m * l - l * m))),
    }
    LieResult::assemble(field.variance(), parts)
}

/// The Lie derivative by the reference-space route: pull the field back to
/// a fixed particle `X`, differentiate in time there, push the rate forward.
/// Independent of [`lie_derivative`]; used as its oracle.
pub fn diagram_lie_derivative(field: &EulerianField, flow: &FlowMap, t: f64, x: &Point, stencil: Stencil) -> Result<TensorValue> {
    let reference = flow.inverse(t, x)?;
    let pulled = |tau: f64| -> Result<Vec<f64>> {
        let here = flow.forward(tau, &reference)?;
        let state = flow.deformation(tau, &reference)?;
        Ok(pull_back(&field.eval(tau, &here)?, &state)?.components())
    };
    let rate = fd::central_components(pulled, t, stencil.h_time)?;
    let rate = TensorValue::from_components(field.variance(), &rate)?;
    push_forward(&rate, &flow.deformation(t, &reference)?)
}

/// The field `(t, x) ↦ d_L v(t, x)`, same variance as `v`.
pub fn lie_field(field: &EulerianField, flow: &FlowMap, stencil: Stencil) -> EulerianField {
    let (field, flow) = (field.clone(), flow.clone());
    EulerianField::new(format!("d_L {}", field.name()), field.variance(), Provenance::Derived, move |t, x| {
        Ok(lie_derivative_with(&field, &flow, t, x, stencil)?.value)
    })
}

/// `ω = curl u`, from the velocity gradient.
pub fn vorticity(flow: &FlowMap, t: f64, x: &Point) -> Result<Vec3> {
    Ok(fd::curl_of_jacobian(&velocity_gradient(flow, t, x)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzTerms {
    /// `∂ω/∂t`
    pub time: Vec3,
    /// `(∂ω/∂x) u`
    pub convection: Vec3,
    /// `ω div u`
    pub dilatation: Vec3,
    /// `−(∂u/∂x) ω`
    pub stretching: Vec3,
    pub total: Vec3,
}

/// `∂ω/∂t + (∂ω/∂x) u + ω div u − (∂u/∂x) ω`, zero where vorticity is a
/// frozen-in 2-form.
pub fn helmholtz_residual(flow: &FlowMap, t: f64, x: &Point) -> Result<HelmholtzTerms> {
    helmholtz_residual_with(flow, t, x, Stencil::DEFAULT)
}

pub fn helmholtz_residual_with(flow: &FlowMap, t: f64, x: &Point, stencil: Stencil) -> Result<HelmholtzTerms> {
    let u = flow.velocity(t, x)?;
    let l = velocity_gradient(flow, t, x)?;
    let omega = fd::curl_of_jacobian(&l);
    let h = stencil.h_time;
    let time = (vorticity(flow, t + h, x)? - vorticity(flow, t - h, x)?) / (2.0 * h);
    let grad_omega = fd::jacobian(|p| vorticity(flow, t, p), x, stencil.h_space)?;
    let convection = grad_omega * u;
    let dilatation = omega * l.trace();
    let stretching = -(l * omega);
    Ok(HelmholtzTerms {
        time,
        convection,
        dilatation,
        stretching,
        total: time + convection + dilatation + stretching,
    })
}

/// `D/Dt(ω/ρ) − (∂u/∂x)(ω/ρ)` with `ρ` the transported density. Multiplied
/// by `ρ` it equals [`helmholtz_residual`] whenever mass is conserved.
pub fn helmholtz_density_form(flow: &FlowMap, mass: &MassField, t: f64, x: &Point) -> Result<Vec3> {
    helmholtz_density_form_with(flow, mass, t, x, Stencil::DEFAULT)
}

pub fn helmholtz_density_form_with(flow: &FlowMap, mass: &MassField, t: f64, x: &Point, stencil: Stencil) -> Result<Vec3> {
    let (f, m) = (flow.clone(), mass.clone());
    let specific = EulerianField::new("omega/rho", Variance::Vector, Provenance::Derived, move |t, x| {
        let rho = mass_density(&m, t, x)?;
        Ok(TensorValue::Vector(vorticity(&f, t, x)? / rho))
    });
    let lie = lie_derivative_with(&specific, flow, t, x, stencil)?;
    Ok(lie.value.as_vector().expect("vector"))
}

/// `d_L(grad s) − grad(d_L s)`; vanishes because the Lie derivative
/// commutes with the exterior derivative.
pub fn commutation_defect(s: &EulerianField, flow: &FlowMap, t: f64, x: &Point) -> Result<Covec3> {
    commutation_defect_with(s, flow, t, x, Stencil::DEFAULT)
}

pub fn commutation_defect_with(s: &EulerianField, flow: &FlowMap, t: f64, x: &Point, stencil: Stencil) -> Result<Covec3> {
    let grad = derived_gradient_with(s, stencil)?;
    let lie_of_grad = lie_derivative_with(&grad, flow, t, x, stencil)?.value;
    let grad_of_lie = fd::gradient(|p| material_derivative_with(s, flow, t, p, stencil), x, stencil.h_space)?;
    Ok(lie_of_grad.as_covector().expect("covector") - grad_of_lie)
}
