mod common;

use lieflow_core::kinematics::{FlowMap, MassField};
use lieflow_core::lie::lie_derivative;
use lieflow_core::standard::transported;
use lieflow_core::tensor::{
    derived_curl_over_rho, derived_div_rho_j, derived_gradient, derived_wedge, product_field, transported_field,
    EulerianField, ProductKind, TensorValue, Variance,
};
use lieflow_core::Point;

fn mass(flow: &FlowMap) -> MassField {
    MassField::new(flow.clone(), |p| 1.5 + 0.5 * (p[0] + p[2]).sin())
}

fn second_scalar(flow: &FlowMap) -> EulerianField {
    transported_field(flow, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[0] * p[1] + p[2].cos())))
}

fn max_lie(field: &EulerianField, flow: &FlowMap, pts: &[(f64, Point)]) -> f64 {
    pts.iter()
        .map(|(t, x)| lie_derivative(field, flow, *t, x).unwrap().value.norm())
        .fold(0.0, f64::max)
}

#[test]
fn derived_fields_of_transported_inputs_are_transported() {
    let pts = common::samples(21, 30);
    for flow in FlowMap::catalog() {
        let m = mass(&flow);
        let derived = [
            derived_gradient(&transported(&flow, Variance::Scalar)).unwrap(),
            derived_curl_over_rho(&transported(&flow, Variance::Covector), &m).unwrap(),
            derived_div_rho_j(&transported(&flow, Variance::Vector), &m).unwrap(),
            derived_wedge(&transported(&flow, Variance::Scalar), &second_scalar(&flow)).unwrap(),
        ];
        for field in &derived {
            let d = max_lie(field, &flow, &pts);
            assert!(d <= 1e-4, "{} {}: {d:e}", flow.name(), field.name());
        }
    }
}

fn operands(kind: ProductKind, flow: &FlowMap) -> Vec<EulerianField> {
    kind.operands()
        .iter()
        .map(|v| match v {
            Variance::ThreeForm => mass(flow).density_field(),
            other => transported(flow, *other),
        })
        .collect()
}

#[test]
fn products_of_transported_operands_are_transported() {
    let pts = common::samples(22, 30);
    for flow in FlowMap::catalog() {
        let div_u = lieflow_core::kinematics::velocity_gradient(&flow, 0.0, &Point::zeros()).unwrap().trace();
        for kind in ProductKind::ALL {
            if !kind.always_transported() && div_u != 0.0 {
                continue;
            }
            let ops = operands(kind, &flow);
            let refs: Vec<&EulerianField> = ops.iter().collect();
            let field = product_field(kind, &refs).unwrap();
            let d = max_lie(&field, &flow, &pts);
            assert!(d <= 1e-4, "{} {}: {d:e}", flow.name(), kind.name());
        }
    }
}

#[test]
fn literal_density_products_in_expansion_decay_at_twice_the_dilatation() {
    let a = 0.5;
    let flow = FlowMap::Expansion { rate: a };
    let pts = common::samples(23, 20);
    for kind in [ProductKind::RhoW, ProductKind::RhoCW] {
        let ops = operands(kind, &flow);
        let refs: Vec<&EulerianField> = ops.iter().collect();
        let field = product_field(kind, &refs).unwrap();
        for (t, x) in &pts {
            let lie = lie_derivative(&field, &flow, *t, x).unwrap().value;
            let predicted = field.eval(*t, x).unwrap().scale(-2.0 * 3.0 * a);
            assert!(lie.sub(&predicted).unwrap().norm() <= 1e-4, "{}", kind.name());
        }
    }
}

#[test]
fn products_reject_wrong_operands() {
    let flow = FlowMap::Zero;
    let s = transported(&flow, Variance::Scalar);
    let j = transported(&flow, Variance::Vector);
    assert!(product_field(ProductKind::CDotJ, &[&s, &j]).is_err());
    assert!(product_field(ProductKind::CDotJ, &[&j]).is_err());
    assert!(derived_gradient(&j).is_err());
}
