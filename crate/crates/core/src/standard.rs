//! Standard reference fields and non-transported witnesses.
//!
//! Every check in the harness and the test suites draws its inputs from
//! here so that the same fields are exercised everywhere.

use std::sync::Arc;

use crate::kinematics::FlowMap;
use crate::tensor::{transported_field, EulerianField, Provenance, TensorValue, Variance};
use crate::{Covec3, Mat3, Point, Result, Vec3};

pub type ReferenceField = Arc<dyn Fn(&Point) -> Result<TensorValue> + Send + Sync>;

/// A smooth, non-constant reference field `v₀(X)` of the given variance.
pub fn reference_field(variance: Variance) -> ReferenceField {
    match variance {
        Variance::Scalar => Arc::new(|p: &Point| Ok(TensorValue::Scalar(p[0].sin() + p[1] * p[2]))),
        Variance::Vector => Arc::new(|p: &Point| Ok(TensorValue::Vector(Vec3::new(p[1], p[0].cos(), 1.0 + p[2] * p[2])))),
        Variance::Covector => Arc::new(|p: &Point| Ok(TensorValue::Covector(Covec3::new(1.0 + p[1], p[2] * p[0], p[1].sin())))),
        Variance::TwoForm => Arc::new(|p: &Point| Ok(TensorValue::TwoForm(Vec3::new(p[2].cos(), p[0], 1.0)))),
        Variance::ThreeForm => Arc::new(|p: &Point| Ok(TensorValue::ThreeForm(1.0 + p[0] * p[0] + 0.5 * p[1]))),
        Variance::Matrix => Arc::new(|p: &Point| {
            Ok(TensorValue::Matrix(Mat3::new(
                1.0 + p[0],
                p[1],
                p[2].sin(),
                p[0] * p[1],
                2.0,
                p[2],
                p[0].cos(),
                p[1] * p[1],
                1.0 + p[2],
            )))
        }),
    }
}

/// [`reference_field`] carried by `flow`.
pub fn transported(flow: &FlowMap, variance: Variance) -> EulerianField {
    let v0 = reference_field(variance);
    transported_field(flow, variance, move |p| v0(p)).renamed(format!("transported {variance}"))
}

/// `(1 + t)` times the transported field: never moving with the fluid, its
/// Lie derivative is the transported field itself.
pub fn ramped(flow: &FlowMap, variance: Variance) -> EulerianField {
    let field = transported(flow, variance);
    EulerianField::new(format!("(1+t) {variance}"), variance, Provenance::Derived, move |t, x| {
        Ok(field.eval(t, x)?.scale(1.0 + t))
    })
}

/// Time-independent Eulerian fields that the shear flow does not carry.
pub fn frozen_in_shear(variance: Variance) -> EulerianField {
    let value = move |x: &Point| match variance {
        Variance::Scalar => TensorValue::Scalar(x[0]),
        Variance::Vector => TensorValue::Vector(Vec3::y()),
        Variance::Covector => TensorValue::Covector(Covec3::new(1.0, 0.0, 0.0)),
        Variance::TwoForm => TensorValue::TwoForm(Vec3::y()),
        Variance::ThreeForm => TensorValue::ThreeForm(1.0 + x[0]),
        Variance::Matrix => {
            let mut m = Mat3::zeros();
            m[(1, 0)] = 1.0;
            TensorValue::Matrix(m)
        }
    };
    EulerianField::new(format!("frozen {variance}"), variance, Provenance::Builtin, move |_, x| Ok(value(x)))
}

/// Five polynomial and trigonometric scalar fields, some time-dependent.
pub fn scalar_suite() -> Vec<EulerianField> {
    type S = fn(f64, &Point) -> f64;
    let fields: [(&str, S); 5] = [
        ("x1 x2", |_, x| x[0] * x[1]),
        ("sin x1 + x3^2", |_, x| x[0].sin() + x[2] * x[2]),
        ("exp(0.3 x2) cos x3", |_, x| (0.3 * x[1]).exp() * x[2].cos()),
        ("x1 x2 x3 + t", |t, x| x[0] * x[1] * x[2] + t),
        ("t sin(x1 + x2)", |t, x| t * (x[0] + x[1]).sin()),
    ];
    fields
        .into_iter()
        .map(|(name, f)| EulerianField::new(name, Variance::Scalar, Provenance::Builtin, move |t, x| Ok(TensorValue::Scalar(f(t, x)))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_fields_have_declared_variance() {
        for v in Variance::ALL {
            assert_eq!(reference_field(v)(&Point::new(0.1, 0.2, 0.3)).unwrap().variance(), v);
            let f = frozen_in_shear(v);
            assert_eq!(f.eval(0.0, &Point::zeros()).unwrap().variance(), v);
        }
        assert_eq!(scalar_suite().len(), 5);
    }

    #[test]
    fn ramped_is_scaled_transported() {
        let flow = FlowMap::Rotation { omega: 1.0 };
        let x = Point::new(0.4, -0.2, 0.7);
        let a = transported(&flow, Variance::Covector).eval(0.5, &x).unwrap();
        let b = ramped(&flow, Variance::Covector).eval(0.5, &x).unwrap();
        assert!(b.sub(&a.scale(1.5)).unwrap().norm() < 1e-15);
    }
}
