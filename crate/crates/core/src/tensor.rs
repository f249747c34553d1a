//! Variance-tagged tensor values and their transport by a flow.
//!
//! | variance   | stored as           | push-forward      |
//! |------------|---------------------|-------------------|
//! | scalar     | `s`                 | `s₀`              |
//! | vector     | column `J`          | `F J₀`            |
//! | covector   | row `C`             | `C₀ F⁻¹`          |
//! | 2-form     | axial vector `W`    | `F W₀ / det F`    |
//! | 3-form     | density `v`         | `v₀ / det F`      |
//! | matrix     | `M`                 | `F M₀ F⁻¹`        |
//!
//! A 2-form `ω` is represented by the vector `W` with
//! `ω(v₁, v₂) = det(W, v₁, v₂)`; a 3-form `v det` by its density `v`.

use std::fmt;
use std::sync::Arc;

use crate::expr::{Expr, Params};
use crate::fd::{self, Stencil};
use crate::kinematics::{mass_density, DeformationState, FlowMap, MassField};
use crate::{Covec3, Error, Mat3, Point, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    Scalar,
    Vector,
    Covector,
    TwoForm,
    ThreeForm,
    Matrix,
}

impl Variance {
    pub const ALL: [Variance; 6] = [
        Variance::Scalar,
        Variance::Vector,
        Variance::Covector,
        Variance::TwoForm,
        Variance::ThreeForm,
        Variance::Matrix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variance::Scalar => "scalar",
            Variance::Vector => "vector",
            Variance::Covector => "covector",
            Variance::TwoForm => "two_form",
            Variance::ThreeForm => "three_form",
            Variance::Matrix => "matrix",
        }
    }

    pub fn from_name(name: &str) -> Option<Variance> {
        Variance::ALL.into_iter().find(|v| v.name() == name)
    }

    /// Number of stored components.
    pub fn len(self) -> usize {
        match self {
            Variance::Scalar | Variance::ThreeForm => 1,
            Variance::Vector | Variance::Covector | Variance::TwoForm => 3,
            Variance::Matrix => 9,
        }
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TensorValue {
    Scalar(f64),
    Vector(Vec3),
    Covector(Covec3),
    TwoForm(Vec3),
    ThreeForm(f64),
    Matrix(Mat3),
}

impl TensorValue {
    pub fn variance(&self) -> Variance {
        match self {
            TensorValue::Scalar(_) => Variance::Scalar,
            TensorValue::Vector(_) => Variance::Vector,
            TensorValue::Covector(_) => Variance::Covector,
            TensorValue::TwoForm(_) => Variance::TwoForm,
            TensorValue::ThreeForm(_) => Variance::ThreeForm,
            TensorValue::Matrix(_) => Variance::Matrix,
        }
    }

    pub fn zero(variance: Variance) -> Self {
        match variance {
            Variance::Scalar => TensorValue::Scalar(0.0),
            Variance::Vector => TensorValue::Vector(Vec3::zeros()),
            Variance::Covector => TensorValue::Covector(Covec3::zeros()),
            Variance::TwoForm => TensorValue::TwoForm(Vec3::zeros()),
            Variance::ThreeForm => TensorValue::ThreeForm(0.0),
            Variance::Matrix => TensorValue::Matrix(Mat3::zeros()),
        }
    }

    /// Flat components; matrices are row-major.
    pub fn components(&self) -> Vec<f64> {
        match self {
            TensorValue::Scalar(s) | TensorValue::ThreeForm(s) => vec![*s],
            TensorValue::Vector(v) | TensorValue::TwoForm(v) => v.iter().copied().collect(),
            TensorValue::Covector(c) => c.iter().copied().collect(),
            TensorValue::Matrix(m) => (0..3).flat_map(|r| (0..3).map(move |c| m[(r, c)])).collect(),
        }
    }

    /// Inverse of [`components`](Self::components); rejects a length mismatch.
    pub fn from_components(variance: Variance, data: &[f64]) -> Result<Self> {
        if data.len() != variance.len() {
            return Err(Error::Argument(format!(
                "{variance} value needs {} components, got {}",
                variance.len(),
                data.len()
            )));
        }
        Ok(match variance {
            Variance::Scalar => TensorValue::Scalar(data[0]),
            Variance::ThreeForm => TensorValue::ThreeForm(data[0]),
            Variance::Vector => TensorValue::Vector(Vec3::from_column_slice(data)),
            Variance::TwoForm => TensorValue::TwoForm(Vec3::from_column_slice(data)),
            Variance::Covector => TensorValue::Covector(Covec3::from_row_slice(data)),
            Variance::Matrix => TensorValue::Matrix(Mat3::from_row_slice(data)),
        })
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// Euclidean (Frobenius for matrices) norm of the components.
    pub fn norm(&self) -> f64 {
        self.components().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    fn zip(&self, other: &TensorValue, f: impl Fn(f64, f64) -> f64) -> Result<TensorValue> {
        if self.variance() != other.variance() {
            return Err(Error::Argument(format!(
                "cannot combine {} with {}",
                self.variance(),
                other.variance()
            )));
        }
        let data: Vec<f64> = self
            .components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| f(*a, b))
            .collect();
        TensorValue::from_components(self.variance(), &data)
    }

    pub fn add(&self, other: &TensorValue) -> Result<TensorValue> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TensorValue) -> Result<TensorValue> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> TensorValue {
        let data: Vec<f64> = self.components().iter().map(|c| c * k).collect();
        TensorValue::from_components(self.variance(), &data).expect("same shape")
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            TensorValue::Scalar(s) | TensorValue::ThreeForm(s) => Some(*s),
            _ => None,
        }
    }

    /// The 3-vector carried by a vector or 2-form value.
    pub fn as_vector(&self) -> Option<Vec3> {
        match self {
            TensorValue::Vector(v) | TensorValue::TwoForm(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_covector(&self) -> Option<Covec3> {
        match self {
            TensorValue::Covector(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<Mat3> {
        match self {
            TensorValue::Matrix(m) => Some(*m),
            _ => None,
        }
    }
}

fn check_finite(value: &TensorValue) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("non-finite {} value", value.variance())))
    }
}

/// Carries a reference-space value to the current configuration.
pub fn push_forward(value0: &TensorValue, state: &DeformationState) -> Result<TensorValue> {
    check_finite(value0)?;
    let (f, f_inv, det) = (&state.f, &state.f_inv, state.det_f);
    Ok(match value0 {
        TensorValue::Scalar(s) => TensorValue::Scalar(*s),
        TensorValue::Vector(j) => TensorValue::Vector(f * j),
        TensorValue::Covector(c) => TensorValue::Covector(c * f_inv),
        TensorValue::TwoForm(w) => TensorValue::TwoForm(f * w / det),
        TensorValue::ThreeForm(v) => TensorValue::ThreeForm(v / det),
        TensorValue::Matrix(m) => TensorValue::Matrix(f * m * f_inv),
    })
}

/// Carries a current-configuration value back to the reference space.
pub fn pull_back(value: &TensorValue, state: &DeformationState) -> Result<TensorValue> {
    check_finite(value)?;
    let (f, f_inv, det) = (&state.f, &state.f_inv, state.det_f);
    Ok(match value {
        TensorValue::Scalar(s) => TensorValue::Scalar(*s),
        TensorValue::Vector(j) => TensorValue::Vector(f_inv * j),
        TensorValue::Covector(c) => TensorValue::Covector(c * f),
        TensorValue::TwoForm(w) => TensorValue::TwoForm(f_inv * w * det),
        TensorValue::ThreeForm(v) => TensorValue::ThreeForm(v * det),
        TensorValue::Matrix(m) => TensorValue::Matrix(f_inv * m * f),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Builtin,
    Expression,
    Transported,
    Derived,
}

type FieldFn = dyn Fn(f64, &Point) -> Result<TensorValue> + Send + Sync;

/// A tensor field on the current configuration, `(t, x) ↦ value`.
#[derive(Clone)]
pub struct EulerianField {
    name: String,
    variance: Variance,
    provenance: Provenance,
    eval: Arc<FieldFn>,
}

impl fmt::Debug for EulerianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EulerianField")
            .field("name", &self.name)
            .field("variance", &self.variance)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl EulerianField {
    pub fn new(
        name: impl Into<String>,
        variance: Variance,
        provenance: Provenance,
        eval: impl Fn(f64, &Point) -> Result<TensorValue> + Send + Sync + 'static,
    ) -> Self {
        EulerianField {
            name: name.into(),
            variance,
            provenance,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Evaluates the field, checking the declared variance and finiteness.
    pub fn eval(&self, t: f64, x: &Point) -> Result<TensorValue> {
        let v = (self.eval)(t, x)?;
        if v.variance() != self.variance {
            return Err(Error::Argument(format!(
                "field `{}` declared {} but produced {}",
                self.name,
                self.variance,
                v.variance()
            )));
        }
        if !v.is_finite() {
            return Err(Error::non_finite(format!("value of field `{}`", self.name), t, x));
        }
        Ok(v)
    }

    pub fn components(&self, t: f64, x: &Point) -> Result<Vec<f64>> {
        Ok(self.eval(t, x)?.components())
    }

    pub fn scalar(&self, t: f64, x: &Point) -> Result<f64> {
        Ok(self.eval(t, x)?.as_scalar().expect("scalar-like variance checked by caller"))
    }

    /// Field constant in space and time.
    pub fn constant(name: impl Into<String>, value: TensorValue) -> Self {
        EulerianField::new(name, value.variance(), Provenance::Builtin, move |_, _| Ok(value))
    }

    /// The velocity of `flow` viewed as a vector field.
    pub fn velocity_of(flow: &FlowMap) -> Self {
        let flow = flow.clone();
        EulerianField::new(format!("u[{}]", flow.name()), Variance::Vector, Provenance::Builtin, move |t, x| {
            Ok(TensorValue::Vector(flow.velocity(t, x)?))
        })
    }

    /// A field given by one expression per component over `(t, x1, x2, x3)`.
    pub fn from_expressions(name: impl Into<String>, variance: Variance, exprs: Vec<Expr>, params: Params) -> Result<Self> {
        let name = name.into();
        if exprs.len() != variance.len() {
            return Err(Error::Argument(format!(
                "field `{name}`: {variance} needs {} expressions, got {}",
                variance.len(),
                exprs.len()
            )));
        }
        Ok(EulerianField::new(name, variance, Provenance::Expression, move |t, x| {
            let p = [x[0], x[1], x[2]];
            let data = exprs.iter().map(|e| e.eval(t, &p, &params)).collect::<std::result::Result<Vec<_>, _>>()?;
            TensorValue::from_components(variance, &data)
        }))
    }
}

/// Reference-space field given by one expression per component in `x1, x2, x3`
/// (read as the Lagrangian coordinates; `t` is bound to 0).
pub fn reference_from_expressions(
    variance: Variance,
    exprs: Vec<Expr>,
    params: Params,
) -> Result<impl Fn(&Point) -> Result<TensorValue> + Send + Sync + Clone + 'static> {
    if exprs.len() != variance.len() {
        return Err(Error::Argument(format!(
            "{variance} needs {} expressions, got {}",
            variance.len(),
            exprs.len()
        )));
    }
    let exprs = Arc::new(exprs);
    Ok(move |x: &Point| {
        let p = [x[0], x[1], x[2]];
        let data = exprs.iter().map(|e| e.eval(0.0, &p, &params)).collect::<std::result::Result<Vec<_>, _>>()?;
        TensorValue::from_components(variance, &data)
    })
}

/// The Eulerian field `v(t, x) = push_forward(v₀(X), F(t, X))`, `X = φ_t⁻¹(x)`.
/// Moving with the fluid by construction.
pub fn transported_field(
    flow: &FlowMap,
    variance: Variance,
    field0: impl Fn(&Point) -> Result<TensorValue> + Send + Sync + 'static,
) -> EulerianField {
    let flow = flow.clone();
    EulerianField::new(
        format!("transported {variance}"),
        variance,
        Provenance::Transported,
        move |t, x| {
            let reference = flow.inverse(t, x)?;
            let state = flow.deformation(t, &reference)?;
            let v0 = field0(&reference)?;
            if v0.variance() != variance {
                return Err(Error::Argument(format!(
                    "reference field produced {} for a {variance} field",
                    v0.variance()
                )));
            }
            push_forward(&v0, &state)
        },
    )
}

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

/// `∂s/∂x` as a covector field.
pub fn derived_gradient(s: &EulerianField) -> Result<EulerianField> {
    derived_gradient_with(s, Stencil::DEFAULT)
}

pub fn derived_gradient_with(s: &EulerianField, stencil: Stencil) -> Result<EulerianField> {
    require(s, Variance::Scalar, "gradient operand")?;
    let s = s.clone();
    Ok(EulerianField::new(format!("grad {}", s.name()), Variance::Covector, Provenance::Derived, move |t, x| {
        Ok(TensorValue::Covector(fd::gradient(|p| s.scalar(t, p), x, stencil.h_space)?))
    }))
}

/// `(1/ρ) curl Cᵀ` as a vector field.
pub fn derived_curl_over_rho(c: &EulerianField, mass: &MassField) -> Result<EulerianField> {
    derived_curl_over_rho_with(c, mass, Stencil::DEFAULT)
}

pub fn derived_curl_over_rho_with(c: &EulerianField, mass: &MassField, stencil: Stencil) -> Result<EulerianField> {
    require(c, Variance::Covector, "curl operand")?;
    let (c, mass) = (c.clone(), mass.clone());
    Ok(EulerianField::new(format!("curl {} / rho", c.name()), Variance::Vector, Provenance::Derived, move |t, x| {
        let jac = fd::jacobian(
            |p| Ok(c.eval(t, p)?.as_covector().expect("covector").transpose()),
            x,
            stencil.h_space,
        )?;
        let rho = positive_density(&mass, t, x)?;
        Ok(TensorValue::Vector(fd::curl_of_jacobian(&jac) / rho))
    }))
}

/// `div(ρ J)`, tagged as the density of a 3-form.
pub fn derived_div_rho_j(j: &EulerianField, mass: &MassField) -> Result<EulerianField> {
    derived_div_rho_j_with(j, mass, Stencil::DEFAULT)
}

pub fn derived_div_rho_j_with(j: &EulerianField, mass: &MassField, stencil: Stencil) -> Result<EulerianField> {
    require(j, Variance::Vector, "divergence operand")?;
    let (j, mass) = (j.clone(), mass.clone());
    Ok(EulerianField::new(format!("div(rho {})", j.name()), Variance::ThreeForm, Provenance::Derived, move |t, x| {
        let div = fd::divergence(
            |p| Ok(j.eval(t, p)?.as_vector().expect("vector") * mass_density(&mass, t, p)?),
            x,
            stencil.h_space,
        )?;
        Ok(TensorValue::ThreeForm(div))
    }))
}

/// `∂α/∂x ∧ ∂β/∂x` as a 2-form, i.e. the axial vector `grad α × grad β`.
pub fn derived_wedge(alpha: &EulerianField, beta: &EulerianField) -> Result<EulerianField> {
    derived_wedge_with(alpha, beta, Stencil::DEFAULT)
}

pub fn derived_wedge_with(alpha: &EulerianField, beta: &EulerianField, stencil: Stencil) -> Result<EulerianField> {
    require(alpha, Variance::Scalar, "wedge operand")?;
    require(beta, Variance::Scalar, "wedge operand")?;
    let (a, b) = (alpha.clone(), beta.clone());
    Ok(EulerianField::new(
        format!("grad {} ^ grad {}", a.name(), b.name()),
        Variance::TwoForm,
        Provenance::Derived,
        move |t, x| {
            let ga = fd::gradient(|p| a.scalar(t, p), x, stencil.h_space)?;
            let gb = fd::gradient(|p| b.scalar(t, p), x, stencil.h_space)?;
            Ok(TensorValue::TwoForm(ga.transpose().cross(&gb.transpose())))
        },
    ))
}

fn positive_density(mass: &MassField, t: f64, x: &Point) -> Result<f64> {
    let rho = mass_density(mass, t, x)?;
    if rho > 0.0 {
        Ok(rho)
    } else {
        Err(Error::Domain(format!("density {rho} is not positive")))
    }
}

/// Pointwise products of transported fields.
///
/// `RhoW` and `RhoCW` are the literal products `ρ W` and `ρ (C·W)`; they
/// move with the fluid only where `det F` stays 1. `WOverRho` and
/// `CDotWOverRho` are the quotients `W / ρ` and `(C·W) / ρ`, which move with
/// the fluid in every flow. `DetJOuterC` is identically zero for a rank-one
/// `J C`, so its transport check is vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// `C J`: (covector, vector) → scalar.
    CDotJ,
    /// `ρ C J`: (3-form, covector, vector) → 3-form.
    RhoCJ,
    /// `J C`: (vector, covector) → matrix.
    JOuterC,
    /// `det(J C)`: (vector, covector) → scalar.
    DetJOuterC,
    /// `ρ W`: (3-form, 2-form) → vector.
    RhoW,
    /// `ρ C W`: (3-form, covector, 2-form) → scalar.
    RhoCW,
    /// `W / ρ`: (3-form, 2-form) → vector.
    WOverRho,
    /// `C W / ρ`: (3-form, covector, 2-form) → scalar.
    CDotWOverRho,
}

impl ProductKind {
    pub const ALL: [ProductKind; 8] = [
        ProductKind::CDotJ,
        ProductKind::RhoCJ,
        ProductKind::JOuterC,
        ProductKind::DetJOuterC,
        ProductKind::RhoW,
        ProductKind::RhoCW,
        ProductKind::WOverRho,
        ProductKind::CDotWOverRho,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProductKind::CDotJ => "C_dot_J",
            ProductKind::RhoCJ => "rho_C_J",
            ProductKind::JOuterC => "J_outer_C",
            ProductKind::DetJOuterC => "det_J_outer_C",
            ProductKind::RhoW => "rho_W",
            ProductKind::RhoCW => "rho_C_W",
            ProductKind::WOverRho => "W_over_rho",
            ProductKind::CDotWOverRho => "C_dot_W_over_rho",
        }
    }

    pub fn operands(self) -> &'static [Variance] {
        use Variance::*;
        match self {
            ProductKind::CDotJ => &[Covector, Vector],
            ProductKind::RhoCJ => &[ThreeForm, Covector, Vector],
            ProductKind::JOuterC | ProductKind::DetJOuterC => &[Vector, Covector],
            ProductKind::RhoW | ProductKind::WOverRho => &[ThreeForm, TwoForm],
            ProductKind::RhoCW | ProductKind::CDotWOverRho => &[ThreeForm, Covector, TwoForm],
        }
    }

    pub fn result(self) -> Variance {
        match self {
            ProductKind::CDotJ | ProductKind::DetJOuterC | ProductKind::RhoCW | ProductKind::CDotWOverRho => {
                Variance::Scalar
            }
            ProductKind::RhoCJ => Variance::ThreeForm,
            ProductKind::JOuterC => Variance::Matrix,
            ProductKind::RhoW | ProductKind::WOverRho => Variance::Vector,
        }
    }

    /// Whether the product moves with the fluid in every flow, given
    /// transported operands.
    pub fn always_transported(self) -> bool {
        !matches!(self, ProductKind::RhoW | ProductKind::RhoCW)
    }

    fn combine(self, v: &[TensorValue]) -> Result<TensorValue> {
        let cov = |i: usize| v[i].as_covector().expect("covector");
        let vec = |i: usize| v[i].as_vector().expect("vector");
        let sca = |i: usize| v[i].as_scalar().expect("scalar");
        Ok(match self {
            ProductKind::CDotJ => TensorValue::Scalar((cov(0) * vec(1))[0]),
            ProductKind::RhoCJ => TensorValue::ThreeForm(sca(0) * (cov(1) * vec(2))[0]),
            ProductKind::JOuterC => TensorValue::Matrix(vec(0) * cov(1)),
            ProductKind::DetJOuterC => TensorValue::Scalar((vec(0) * cov(1)).determinant()),
            ProductKind::RhoW => TensorValue::Vector(vec(1) * sca(0)),
            ProductKind::RhoCW => TensorValue::Scalar(sca(0) * (cov(1) * vec(2))[0]),
            ProductKind::WOverRho | ProductKind::CDotWOverRho => {
                let rho = sca(0);
                if !(rho > 0.0) {
                    return Err(Error::Domain(format!("density {rho} is not positive")));
                }
                if self == ProductKind::WOverRho {
                    TensorValue::Vector(vec(1) / rho)
                } else {
                    TensorValue::Scalar((cov(1) * vec(2))[0] / rho)
                }
            }
        })
    }
}

impl std::str::FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProductKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown product kind `{s}`")))
    }
}

/// Pointwise product field of the given kind.
pub fn product_field(kind: ProductKind, operands: &[&EulerianField]) -> Result<EulerianField> {
    let want = kind.operands();
    if operands.len() != want.len() {
        return Err(Error::Argument(format!(
            "{} takes {} operands, got {}",
            kind.name(),
            want.len(),
            operands.len()
        )));
    }
    for (field, variance) in operands.iter().zip(want) {
        require(field, *variance, kind.name())?;
    }
    let fields: Vec<EulerianField> = operands.iter().map(|f| (*f).clone()).collect();
    let names: Vec<&str> = fields.iter().map(|f| f.name()).collect();
    let name = format!("{}({})", kind.name(), names.join(", "));
    Ok(EulerianField::new(name, kind.result(), Provenance::Derived, move |t, x| {
        let values = fields.iter().map(|f| f.eval(t, x)).collect::<Result<Vec<_>>>()?;
        kind.combine(&values)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{deformation_gradient, DeformationMethod};

    fn shear_state() -> DeformationState {
        deformation_gradient(&FlowMap::Shear { gamma: 2.0 }, 0.5, &Point::zeros(), DeformationMethod::Analytic).unwrap()
    }

    #[test]
    fn push_forward_examples() {
        let d = shear_state();
        let j = push_forward(&TensorValue::Vector(Vec3::new(0.0, 1.0, 0.0)), &d).unwrap();
        assert_eq!(j, TensorValue::Vector(Vec3::new(1.0, 1.0, 0.0)));
        let c = push_forward(&TensorValue::Covector(Covec3::new(1.0, 0.0, 0.0)), &d).unwrap();
        assert_eq!(c, TensorValue::Covector(Covec3::new(1.0, -1.0, 0.0)));
        assert_eq!(push_forward(&TensorValue::Scalar(5.0), &d).unwrap(), TensorValue::Scalar(5.0));

        let e = deformation_gradient(&FlowMap::Expansion { rate: 1.0 }, 1.0, &Point::zeros(), DeformationMethod::Analytic).unwrap();
        let w = push_forward(&TensorValue::TwoForm(Vec3::z()), &e).unwrap().as_vector().unwrap();
        assert!((w - Vec3::z() * (-2f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn pull_back_examples() {
        let d = shear_state();
        let j = pull_back(&TensorValue::Vector(Vec3::new(1.0, 1.0, 0.0)), &d).unwrap();
        assert_eq!(j, TensorValue::Vector(Vec3::new(0.0, 1.0, 0.0)));
        let id = DeformationState::identity(0.0, Point::zeros());
        let m = TensorValue::Matrix(Mat3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0));
        assert_eq!(pull_back(&m, &id).unwrap(), m);
        let m0 = TensorValue::Matrix(Mat3::from_diagonal(&Vec3::new(1.0, 2.0, 3.0)));
        let back = pull_back(&push_forward(&m0, &d).unwrap(), &d).unwrap();
        assert!(back.sub(&m0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let d = shear_state();
        assert!(push_forward(&TensorValue::Scalar(f64::NAN), &d).is_err());
        assert!(pull_back(&TensorValue::Vector(Vec3::new(f64::INFINITY, 0.0, 0.0)), &d).is_err());
        assert!(TensorValue::from_components(Variance::Matrix, &[1.0; 4]).is_err());
    }

    #[test]
    fn transported_scalar_in_shear() {
        let gamma = 2.0;
        let s = transported_field(&FlowMap::Shear { gamma }, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[0])));
        let (t, x) = (0.7, Point::new(0.4, -1.3, 0.2));
        let expect = x[0] - gamma * t * x[1];
        assert!((s.scalar(t, &x).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn transported_field_in_zero_flow_is_reference_field() {
        let s = transported_field(&FlowMap::Zero, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[0].sin() * p[2])));
        let x = Point::new(0.4, -1.3, 0.2);
        for t in [0.0, 0.5, 3.0] {
            assert_eq!(s.scalar(t, &x).unwrap(), x[0].sin() * x[2]);
        }
    }

    #[test]
    fn transported_vector_in_shear() {
        let j = transported_field(&FlowMap::Shear { gamma: 2.0 }, Variance::Vector, |_| Ok(TensorValue::Vector(Vec3::y())));
        let t = 0.3;
        let v = j.eval(t, &Point::new(1.0, 2.0, 3.0)).unwrap().as_vector().unwrap();
        assert!((v - Vec3::new(2.0 * t, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn transported_field_checks_reference_variance() {
        let bad = transported_field(&FlowMap::Zero, Variance::Vector, |_| Ok(TensorValue::Scalar(1.0)));
        assert!(bad.eval(0.0, &Point::zeros()).is_err());
    }

    fn scalar_expr(src: &str) -> EulerianField {
        EulerianField::from_expressions(src, Variance::Scalar, vec![crate::expr::parse(src).unwrap()], Params::from([("g".into(), 2.0)])).unwrap()
    }

    fn covector_expr(srcs: [&str; 3]) -> EulerianField {
        let exprs = srcs.iter().map(|s| crate::expr::parse(s).unwrap()).collect();
        EulerianField::from_expressions("C", Variance::Covector, exprs, Params::new()).unwrap()
    }

    fn vector_expr(srcs: [&str; 3]) -> EulerianField {
        let exprs = srcs.iter().map(|s| crate::expr::parse(s).unwrap()).collect();
        EulerianField::from_expressions("J", Variance::Vector, exprs, Params::new()).unwrap()
    }

    #[test]
    fn gradient_examples() {
        let x = Point::new(0.3, 0.6, -0.2);
        let g = derived_gradient(&scalar_expr("x1")).unwrap().eval(0.5, &x).unwrap();
        assert!(g.sub(&TensorValue::Covector(Covec3::new(1.0, 0.0, 0.0))).unwrap().norm() < 1e-10);
        let g = derived_gradient(&scalar_expr("x1 - g*t*x2")).unwrap().eval(0.5, &x).unwrap();
        assert!(g.sub(&TensorValue::Covector(Covec3::new(1.0, -1.0, 0.0))).unwrap().norm() < 1e-10);
        let g = derived_gradient(&scalar_expr("4.2")).unwrap().eval(0.5, &x).unwrap();
        assert_eq!(g.norm(), 0.0);
        assert!(derived_gradient(&vector_expr(["1", "0", "0"])).is_err());
    }

    #[test]
    fn curl_over_rho_examples() {
        let x = Point::new(0.3, 0.6, -0.2);
        let unit = MassField::uniform(FlowMap::Zero, 1.0);
        let v = derived_curl_over_rho(&covector_expr(["-x2/2", "x1/2", "0"]), &unit).unwrap();
        assert!((v.eval(0.0, &x).unwrap().as_vector().unwrap() - Vec3::z()).norm() < 1e-10);
        let grad = derived_gradient(&scalar_expr("x1*x2 + sin(x3)")).unwrap();
        let v = derived_curl_over_rho(&grad, &unit).unwrap();
        assert!(v.eval(0.0, &x).unwrap().norm() < 1e-6);
        let two = MassField::uniform(FlowMap::Zero, 2.0);
        let v = derived_curl_over_rho(&covector_expr(["0", "x1", "0"]), &two).unwrap();
        assert!((v.eval(0.0, &x).unwrap().as_vector().unwrap() - Vec3::z() * 0.5).norm() < 1e-10);
    }

    #[test]
    fn div_rho_j_examples() {
        let x = Point::new(0.3, 0.6, -0.2);
        let unit = MassField::uniform(FlowMap::Zero, 1.0);
        let d = derived_div_rho_j(&vector_expr(["x1", "x2", "x3"]), &unit).unwrap();
        assert_eq!(d.variance(), Variance::ThreeForm);
        assert!((d.scalar(0.0, &x).unwrap() - 3.0).abs() < 1e-10);
        let d = derived_div_rho_j(&vector_expr(["1", "-2", "0.5"]), &MassField::uniform(FlowMap::Zero, 3.0)).unwrap();
        assert!(d.scalar(0.0, &x).unwrap().abs() < 1e-10);
        let d = derived_div_rho_j(&vector_expr(["x2", "0", "0"]), &unit).unwrap();
        assert!(d.scalar(0.0, &x).unwrap().abs() < 1e-10);
    }

    #[test]
    fn wedge_examples() {
        let x = Point::new(0.3, 0.6, -0.2);
        let w = derived_wedge(&scalar_expr("x3"), &scalar_expr("x1")).unwrap();
        assert!((w.eval(0.0, &x).unwrap().as_vector().unwrap() - Vec3::y()).norm() < 1e-10);
        let w = derived_wedge(&scalar_expr("x1*x2"), &scalar_expr("x1*x2")).unwrap();
        assert_eq!(w.eval(0.0, &x).unwrap().norm(), 0.0);
        let w = derived_wedge(&scalar_expr("x1"), &scalar_expr("x2")).unwrap();
        assert!((w.eval(0.0, &x).unwrap().as_vector().unwrap() - Vec3::z()).norm() < 1e-10);
    }

    #[test]
    fn product_examples() {
        let x = Point::new(0.3, 0.6, -0.2);
        let t = 0.4;
        let gt = 2.0 * t;
        let c = EulerianField::constant("C", TensorValue::Covector(Covec3::new(1.0, -gt, 0.0)));
        let j = EulerianField::constant("J", TensorValue::Vector(Vec3::new(gt, 1.0, 0.0)));
        let cj = product_field(ProductKind::CDotJ, &[&c, &j]).unwrap();
        assert!(cj.scalar(t, &x).unwrap().abs() < 1e-15);

        let j = EulerianField::constant("J", TensorValue::Vector(Vec3::x()));
        let c = EulerianField::constant("C", TensorValue::Covector(Covec3::new(0.0, 1.0, 0.0)));
        let m = product_field(ProductKind::JOuterC, &[&j, &c]).unwrap().eval(t, &x).unwrap().as_matrix().unwrap();
        let mut expect = Mat3::zeros();
        expect[(0, 1)] = 1.0;
        assert_eq!(m, expect);
        let det = product_field(ProductKind::DetJOuterC, &[&j, &c]).unwrap();
        assert_eq!(det.scalar(t, &x).unwrap(), 0.0);

        assert!(product_field(ProductKind::CDotJ, &[&j, &c]).is_err());
        assert!(product_field(ProductKind::CDotJ, &[&c]).is_err());
    }

    #[test]
    fn rho_w_in_expansion_is_componentwise_product() {
        let a = 0.5;
        let flow = FlowMap::Expansion { rate: a };
        let rho0 = |p: &Point| 1.0 + 0.25 * p[0] * p[0];
        let mass = MassField::new(flow.clone(), rho0);
        let w0 = |p: &Point| Vec3::new(p[1], 1.0, 0.5 * p[2]);
        let w = transported_field(&flow, Variance::TwoForm, move |p| Ok(TensorValue::TwoForm(w0(p))));
        let rw = product_field(ProductKind::RhoW, &[&mass.density_field(), &w]).unwrap();
        let t = 0.8;
        let reference = Point::new(0.2, -0.4, 0.9);
        let x = flow.forward(t, &reference).unwrap();
        let got = rw.eval(t, &x).unwrap().as_vector().unwrap();
        let expect = w0(&reference) * rho0(&reference) * (-5.0 * a * t).exp();
        assert!((got - expect).norm() < 1e-14);
    }
}
