//! The named checks. Each evaluates one transport law on a [`Scenario`].

use std::f64::consts::PI;
use std::time::Instant;

use lieflow_core::conservation::{
    charge_conservation_residual, clebsch_verify, divergence_law_residual, electric_reference_variation,
    induction_residual, ChargeField, ClebschData, CLEBSCH_COMPONENTS,
};
use lieflow_core::fd::{self, Stencil};
use lieflow_core::integrals::{
    circulation, flux, integral_rate, material_integral, observed_orders, MaterialCurve, MaterialDomain,
    MaterialSurface, MaterialVolume,
};
use lieflow_core::kinematics::{
    deformation_gradient, evolve_deformation, velocity_gradient, DeformationMethod, FlowMap, DEFAULT_DT,
};
use lieflow_core::lie::{
    commutation_defect, diagram_lie_derivative, helmholtz_density_form, helmholtz_residual, lie_derivative,
};
use lieflow_core::report::{CheckReport, Sample};
use lieflow_core::standard::{frozen_in_shear, ramped, scalar_suite, transported};
use lieflow_core::tensor::{
    derived_curl_over_rho, derived_div_rho_j, derived_gradient, derived_wedge, product_field, transported_field,
    EulerianField, ProductKind, Provenance, TensorValue, Variance,
};
use lieflow_core::{Point, Result, Vec3};

use crate::config::Scenario;

/// Lie-derivative magnitude a non-transported witness must exceed somewhere.
pub const WITNESS_FLOOR: f64 = 1e-2;

type Runner = fn(&Scenario) -> Result<Outcome>;

/// A registered check.
pub struct CheckSpec {
    pub name: &'static str,
    pub theorem: &'static str,
    pub tolerance: f64,
    pub description: &'static str,
    run: Runner,
}

/// What a runner produces; the tolerance is applied by [`run_check`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub components: Vec<String>,
    pub samples: Vec<Sample>,
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(components: &[&str]) -> Self {
        Outcome {
            components: components.iter().map(|s| s.to_string()).collect(),
            ..Outcome::default()
        }
    }

    fn labelled(components: Vec<String>) -> Self {
        Outcome {
            components,
            ..Outcome::default()
        }
    }
}

pub static CHECKS: &[CheckSpec] = &[
    CheckSpec {
        name: "deformation",
        theorem: "deformation-gradient",
        tolerance: 1e-6,
        description: "F by finite differences of the map, and RK4-evolved F at t = 1, against the reference F",
        run: deformation,
    },
    CheckSpec {
        name: "trajectory",
        theorem: "trajectory-integration",
        tolerance: 1e-6,
        description: "map, inverse and F from trajectory integration against the closed form (or a halved step)",
        run: trajectory,
    },
    CheckSpec {
        name: "jacobi",
        theorem: "jacobi-determinant",
        tolerance: 1e-5,
        description: "d(det F)/dt = det F div u, relative",
        run: jacobi,
    },
    CheckSpec {
        name: "mass",
        theorem: "mass-conservation",
        tolerance: 1e-5,
        description: "pointwise d(rho)/dt + div(rho u) for the constructed density",
        run: mass,
    },
    CheckSpec {
        name: "volume",
        theorem: "volume-constancy",
        tolerance: 1e-5,
        description: "drift of the mass in a material cube",
        run: volume,
    },
    CheckSpec {
        name: "transport-all-variances",
        theorem: "transport-zero-lie-derivative",
        tolerance: 1e-4,
        description: "|d_L v| for a transported field of every variance and every configured transported field",
        run: transport_all,
    },
    CheckSpec {
        name: "witnesses",
        theorem: "transport-witness",
        tolerance: 1.0,
        description: "non-transported witnesses reach |d_L v| > 1e-2; sample norm is 1e-2 / peak",
        run: witnesses,
    },
    CheckSpec {
        name: "diagram",
        theorem: "commutative-diagram",
        tolerance: 1e-4,
        description: "d_L v against the push-forward of the time derivative of the pulled-back field",
        run: diagram,
    },
    CheckSpec {
        name: "commutation",
        theorem: "exterior-derivative-commutation",
        tolerance: 1e-4,
        description: "d_L(grad s) - grad(ds/dt) on the scalar suite and configured scalars",
        run: commutation,
    },
    CheckSpec {
        name: "helmholtz",
        theorem: "helmholtz-vorticity",
        tolerance: 1e-6,
        description: "vorticity transport residual",
        run: helmholtz,
    },
    CheckSpec {
        name: "helmholtz-density",
        theorem: "helmholtz-specific-vorticity",
        tolerance: 1e-6,
        description: "rho times the specific-vorticity form minus the vorticity form",
        run: helmholtz_density,
    },
    CheckSpec {
        name: "kelvin",
        theorem: "kelvin-circulation",
        tolerance: 1e-6,
        description: "circulation drift of transported covectors around closed material curves",
        run: kelvin,
    },
    CheckSpec {
        name: "flux",
        theorem: "flux-constancy",
        tolerance: 1e-4,
        description: "flux drift of transported 2-forms through material surfaces",
        run: flux_constancy,
    },
    CheckSpec {
        name: "flux-convergence",
        theorem: "flux-convergence-order",
        tolerance: 0.0,
        description: "observed midpoint-rule order of the transported e3 flux; sample norm is max(0, 2 - order)",
        run: flux_convergence,
    },
    CheckSpec {
        name: "integral-rate",
        theorem: "material-integral-rate",
        tolerance: 2e-3,
        description: "d/dt of a material integral against the integral of the Lie derivative",
        run: integral_rate_check,
    },
    CheckSpec {
        name: "derived",
        theorem: "derived-fields",
        tolerance: 1e-4,
        description: "|d_L| of grad s, curl C / rho, div(rho J) and grad a ^ grad b built from transported inputs",
        run: derived,
    },
    CheckSpec {
        name: "products",
        theorem: "product-fields",
        tolerance: 1e-4,
        description: "d_L of pointwise products against the predicted value",
        run: products,
    },
    CheckSpec {
        name: "divergence-law",
        theorem: "divergence-form-conservation",
        tolerance: 1e-5,
        description: "d(rho b)/dt + div(rho b u) for transported scalars b",
        run: divergence_law,
    },
    CheckSpec {
        name: "clebsch",
        theorem: "clebsch-representation",
        tolerance: 1e-4,
        description: "premises and conclusion of the Clebsch construction from transported potentials",
        run: clebsch,
    },
    CheckSpec {
        name: "charge",
        theorem: "charge-conservation",
        tolerance: 1e-5,
        description: "dq/dt + div(q u) for the constructed charge density",
        run: charge,
    },
    CheckSpec {
        name: "induction",
        theorem: "magnetic-induction",
        tolerance: 1e-8,
        description: "induction residual and div H for a transported magnetic field",
        run: induction,
    },
    CheckSpec {
        name: "electric",
        theorem: "electric-displacement",
        tolerance: 1e-6,
        description: "time variation of the pulled-back displacement along particles",
        run: electric,
    },
];

pub fn names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

pub fn find(name: &str) -> Option<&'static CheckSpec> {
    CHECKS.iter().find(|c| c.name == name)
}

/// Runs one check. Errors become a failed report so the suite can continue.
pub fn run_check(spec: &CheckSpec, scenario: &Scenario, tolerance: f64) -> CheckReport {
    let start = Instant::now();
    let mut report = match (spec.run)(scenario) {
        Ok(out) => {
            let mut r = CheckReport::new(spec.name, spec.theorem, out.components, out.samples, tolerance);
            for (k, v) in out.metrics {
                r = r.with_metric(k, v);
            }
            r.notes = out.notes;
            r
        }
        Err(e) => CheckReport::failed(spec.name, spec.theorem, e.to_string()),
    };
    report.seed = Some(scenario.seed);
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn arr(x: &Point) -> [f64; 3] {
    [x[0], x[1], x[2]]
}

fn field_names<'a>(fields: impl Iterator<Item = &'a EulerianField>) -> Vec<String> {
    fields.map(|f| f.name().to_string()).collect()
}

fn lie_norm(field: &EulerianField, flow: &FlowMap, t: f64, x: &Point) -> Result<f64> {
    Ok(lie_derivative(field, flow, t, x)?.value.norm())
}

fn deformation(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["fd_vs_reference", "rk4_t1_vs_reference"]);
    let flow = &sc.flow;
    for (t, reference) in &sc.samples {
        let fd = deformation_gradient(flow, *t, reference, DeformationMethod::FiniteDifference)?;
        let exact = flow.deformation(*t, reference)?;
        let at_one = match flow.analytic_f(1.0, reference) {
            Some(f) => f,
            None => flow.deformation(1.0, reference)?.f,
        };
        let evolved = evolve_deformation(flow, reference, 1.0, DEFAULT_DT)?;
        out.samples.push(Sample::sup(
            *t,
            arr(reference),
            vec![(fd.f - exact.f).norm(), (evolved.f - at_one).norm()],
        ));
    }
    if !flow.has_analytic_f() {
        out.notes.push("no closed-form F: reference is the trajectory-integrated F".into());
    }
    Ok(out)
}

fn trajectory(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["forward", "inverse", "deformation"]);
    let (reference_flow, integrated) = match &sc.flow {
        FlowMap::Integrated(inner) => {
            out.notes.push(format!("no closed form: step {} against step {}", inner.dt, inner.dt / 2.0));
            (sc.flow.clone(), sc.flow.integrated(inner.dt / 2.0)?)
        }
        flow => (flow.clone(), flow.integrated(DEFAULT_DT)?),
    };
    for (t, reference) in &sc.samples {
        let x = reference_flow.forward(*t, reference)?;
        let fwd = (integrated.forward(*t, reference)? - x).norm();
        let inv = (integrated.inverse(*t, &x)? - reference).norm();
        let f = (integrated.deformation(*t, reference)?.f - reference_flow.deformation(*t, reference)?.f).norm();
        out.samples.push(Sample::sup(*t, arr(reference), vec![fwd, inv, f]));
    }
    Ok(out)
}

fn jacobi(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["relative_mismatch"]);
    let flow = &sc.flow;
    for (t, reference) in &sc.samples {
        let det = |tau: f64| flow.deformation(tau, reference).map(|s| s.det_f);
        let rate = fd::central(det, *t, Stencil::DEFAULT.h_time)?;
        let x = flow.forward(*t, reference)?;
        let expected = det(*t)? * velocity_gradient(flow, *t, &x)?.trace();
        out.samples.push(Sample::sup(*t, arr(reference), vec![(rate - expected) / expected.abs().max(1.0)]));
    }
    Ok(out)
}

fn mass(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["div_rho_u"]);
    let one = EulerianField::constant("1", TensorValue::Scalar(1.0));
    for (t, x) in &sc.samples {
        let r = divergence_law_residual(&one, &sc.mass, &sc.flow, *t, x)?;
        out.samples.push(Sample::sup(*t, arr(x), vec![r]));
    }
    Ok(out)
}

fn volume(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["mass_drift"]);
    let n = sc.integrals.volume_grid;
    let cube = MaterialDomain::Volume(MaterialVolume::cuboid(Point::new(-0.5, -0.5, -0.5), Point::new(0.5, 0.5, 0.5), n)?);
    let rho = sc.mass.density_field();
    let values = sc
        .times
        .iter()
        .map(|&t| material_integral(&rho, &sc.flow, &cube, t))
        .collect::<Result<Vec<_>>>()?;
    for (t, m) in sc.times.iter().zip(&values) {
        out.samples.push(Sample::sup(*t, [0.0; 3], vec![m - values[0]]));
    }
    out.metrics.push(("mass_t0".into(), values[0]));
    out.notes.push(format!("cube [-0.5, 0.5]^3, {n}^3 midpoint cells"));
    Ok(out)
}

fn transported_suite(sc: &Scenario) -> Vec<EulerianField> {
    let mut fields: Vec<EulerianField> = Variance::ALL.iter().map(|v| transported(&sc.flow, *v)).collect();
    fields.extend(sc.fields.iter().filter(|f| f.transported).map(|f| f.field.clone()));
    fields
}

fn transport_all(sc: &Scenario) -> Result<Outcome> {
    let fields = transported_suite(sc);
    let mut out = Outcome::labelled(field_names(fields.iter()));
    for (t, x) in &sc.samples {
        let r = fields.iter().map(|f| lie_norm(f, &sc.flow, *t, x)).collect::<Result<Vec<_>>>()?;
        out.samples.push(Sample::sup(*t, arr(x), r));
    }
    Ok(out)
}

fn witnesses(sc: &Scenario) -> Result<Outcome> {
    let mut fields: Vec<EulerianField> = Variance::ALL.iter().map(|v| ramped(&sc.flow, *v)).collect();
    if matches!(sc.flow, FlowMap::Shear { .. }) {
        fields.extend(Variance::ALL.iter().map(|v| frozen_in_shear(*v)));
    }
    fields.extend(sc.fields.iter().filter(|f| !f.transported).map(|f| f.field.clone()));
    let mut out = Outcome::new(&["peak_lie_norm"]);
    for field in &fields {
        let mut peak = (0.0, 0.0, Point::zeros());
        for (t, x) in &sc.samples {
            let n = lie_norm(field, &sc.flow, *t, x)?;
            if n > peak.0 {
                peak = (n, *t, *x);
            }
        }
        out.samples.push(Sample {
            t: peak.1,
            x: arr(&peak.2),
            residual: vec![peak.0],
            norm: WITNESS_FLOOR / peak.0,
        });
        out.notes.push(format!("{}: peak |d_L| = {:e}", field.name(), peak.0));
    }
    Ok(out)
}

fn diagram(sc: &Scenario) -> Result<Outcome> {
    let mut fields: Vec<EulerianField> = Variance::ALL.iter().map(|v| ramped(&sc.flow, *v)).collect();
    fields.extend(sc.fields.iter().map(|f| f.field.clone()));
    let mut out = Outcome::labelled(field_names(fields.iter()));
    for (t, x) in &sc.samples {
        let r = fields
            .iter()
            .map(|f| {
                let direct = lie_derivative(f, &sc.flow, *t, x)?.value;
                let oracle = diagram_lie_derivative(f, &sc.flow, *t, x, Stencil::DEFAULT)?;
                Ok(direct.sub(&oracle)?.norm())
            })
            .collect::<Result<Vec<_>>>()?;
        out.samples.push(Sample::sup(*t, arr(x), r));
    }
    Ok(out)
}

fn commutation(sc: &Scenario) -> Result<Outcome> {
    let mut fields = scalar_suite();
    fields.extend(sc.fields.iter().filter(|f| f.field.variance() == Variance::Scalar).map(|f| f.field.clone()));
    let mut out = Outcome::labelled(field_names(fields.iter()));
    for (t, x) in &sc.samples {
        let r = fields
            .iter()
            .map(|s| Ok(commutation_defect(s, &sc.flow, *t, x)?.norm()))
            .collect::<Result<Vec<_>>>()?;
        out.samples.push(Sample::sup(*t, arr(x), r));
    }
    Ok(out)
}

fn helmholtz(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["r1", "r2", "r3"]);
    for (t, x) in &sc.samples {
        let r = helmholtz_residual(&sc.flow, *t, x)?.total;
        out.samples.push(Sample::euclidean(*t, arr(x), r.iter().copied().collect()));
    }
    Ok(out)
}

fn helmholtz_density(sc: &Scenario) -> Result<Outcome> {
    let mut out = Outcome::new(&["d1", "d2", "d3"]);
    for (t, x) in &sc.samples {
        let rho = lieflow_core::kinematics::mass_density(&sc.mass, *t, x)?;
        let d = helmholtz_density_form(&sc.flow, &sc.mass, *t, x)? * rho - helmholtz_residual(&sc.flow, *t, x)?.total;
        out.samples.push(Sample::euclidean(*t, arr(x), d.iter().copied().collect()));
    }
    Ok(out)
}

fn curves(n: usize) -> Result<Vec<(&'static str, Point, MaterialCurve)>> {
    let c1 = Point::zeros();
    let c2 = Point::new(0.1, -0.2, 0.3);
    Ok(vec![
        ("unit-circle", c1, MaterialCurve::circle(c1, 1.0, n)?),
        (
            "tilted-ellipse",
            c2,
            MaterialCurve::ellipse(c2, Vec3::new(0.6, 0.1, 0.2), Vec3::new(-0.1, 0.5, 0.3), n)?,
        ),
    ])
}

fn kelvin(sc: &Scenario) -> Result<Outcome> {
    let mut fields = vec![transported(&sc.flow, Variance::Covector)];
    fields.extend(sc.fields_of(Variance::Covector, true).cloned());
    let mut out = Outcome::new(&["circulation_drift"]);
    for (label, center, curve) in curves(sc.integrals.curve_segments)? {
        for field in &fields {
            let values = sc
                .times
                .iter()
                .map(|&t| circulation(field, &sc.flow, &curve, t))
                .collect::<Result<Vec<_>>>()?;
            for (t, g) in sc.times.iter().zip(&values) {
                out.samples.push(Sample::sup(*t, arr(&center), vec![g - values[0]]));
            }
            out.metrics.push((format!("circulation[{label}/{}]", field.name()), values[0]));
        }
    }
    out.notes.push(format!("{} segments per curve", sc.integrals.curve_segments));
    Ok(out)
}

fn e3_flux_field(flow: &FlowMap) -> EulerianField {
    transported_field(flow, Variance::TwoForm, |_| Ok(TensorValue::TwoForm(Vec3::z()))).renamed("transported e3")
}

fn flux_constancy(sc: &Scenario) -> Result<Outcome> {
    let n = sc.integrals.surface_grid;
    let surfaces = [
        ("unit-disk", Point::zeros(), MaterialSurface::disk(Point::zeros(), 1.0, n, n)?),
        (
            "curved-patch",
            Point::new(0.0, 0.5, 0.0),
            MaterialSurface::new(|s1, s2| Point::new(s1 - 0.5, s2 * s2, 0.3 * s1 * s2), n, n)?,
        ),
    ];
    let mut fields = vec![e3_flux_field(&sc.flow), transported(&sc.flow, Variance::TwoForm)];
    fields.extend(sc.fields_of(Variance::TwoForm, true).cloned());
    let mut out = Outcome::new(&["flux_drift"]);
    for (label, center, surface) in &surfaces {
        for field in &fields {
            let values = sc
                .times
                .iter()
                .map(|&t| flux(field, &sc.flow, surface, t))
                .collect::<Result<Vec<_>>>()?;
            for (t, v) in sc.times.iter().zip(&values) {
                out.samples.push(Sample::sup(*t, arr(center), vec![v - values[0]]));
            }
            out.metrics.push((format!("flux[{label}/{}]", field.name()), values[0]));
        }
    }
    out.notes.push(format!("{n}x{n} midpoint grid"));
    Ok(out)
}

fn flux_convergence(sc: &Scenario) -> Result<Outcome> {
    let finest = sc.integrals.surface_grid.max(16);
    let grids: Vec<usize> = [finest / 8, finest / 4, finest / 2, finest].into_iter().filter(|&n| n >= 2).collect();
    let t = *sc.times.last().expect("non-empty times");
    let w = e3_flux_field(&sc.flow);
    let errors = grids
        .iter()
        .map(|&n| {
            let disk = MaterialSurface::disk_sine_spaced(Point::zeros(), 1.0, n, n)?;
            Ok((flux(&w, &sc.flow, &disk, t)? - PI).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    let orders = observed_orders(&errors);
    let mut out = Outcome::new(&["observed_order"]);
    for (k, p) in orders.iter().enumerate() {
        out.samples.push(Sample {
            t,
            x: [0.0; 3],
            residual: vec![*p],
            norm: if p.is_nan() { f64::NAN } else { (2.0 - p).max(0.0) },
        });
        out.metrics.push((format!("order[{}->{}]", grids[k], grids[k + 1]), *p));
    }
    for (n, e) in grids.iter().zip(&errors) {
        out.metrics.push((format!("error[{n}]"), *e));
    }
    out.notes.push("flux of transported e3 through the unit disk with r = sin(pi s1 / 2), exact value pi".into());
    Ok(out)
}

fn integral_rate_check(sc: &Scenario) -> Result<Outcome> {
    let x1 = EulerianField::new("x1", Variance::ThreeForm, Provenance::Builtin, |_, x| Ok(TensorValue::ThreeForm(x[0])));
    let w = EulerianField::new("(x2, t, 1 + x1^2)", Variance::TwoForm, Provenance::Builtin, |t, x| {
        Ok(TensorValue::TwoForm(Vec3::new(x[1], t, 1.0 + x[0] * x[0])))
    });
    let c = EulerianField::new("(x2, x1 x3, 1)", Variance::Covector, Provenance::Builtin, |_, x| {
        Ok(TensorValue::Covector(lieflow_core::Covec3::new(x[1], x[0] * x[2], 1.0)))
    });
    let n = sc.integrals.volume_grid.min(12);
    let cases = [
        ("unit-cube", Point::new(0.5, 0.5, 0.5), x1, MaterialDomain::Volume(MaterialVolume::cuboid(Point::zeros(), Point::new(1.0, 1.0, 1.0), n)?)),
        ("disk", Point::new(0.2, 0.1, 0.0), w, MaterialDomain::Surface(MaterialSurface::disk(Point::new(0.2, 0.1, 0.0), 0.5, 24, 24)?)),
        ("circle", Point::zeros(), c, MaterialDomain::Curve(MaterialCurve::circle(Point::zeros(), 0.7, 128)?)),
    ];
    let mut out = Outcome::new(&["rate_mismatch"]);
    for (label, center, field, domain) in &cases {
        for &t in &sc.times {
            let r = integral_rate(field, &sc.flow, domain, t, Stencil::DEFAULT)?;
            out.samples.push(Sample::sup(t, arr(center), vec![r.finite_difference - r.lie_integral]));
            if t == sc.times[0] {
                out.metrics.push((format!("rate[{label}/{}]", field.name()), r.lie_integral));
            }
        }
    }
    Ok(out)
}

fn derived_suite(sc: &Scenario) -> Result<Vec<EulerianField>> {
    let second = transported_field(&sc.flow, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[0] * p[1] + p[2].cos())));
    Ok(vec![
        derived_gradient(&transported(&sc.flow, Variance::Scalar))?,
        derived_curl_over_rho(&transported(&sc.flow, Variance::Covector), &sc.mass)?,
        derived_div_rho_j(&transported(&sc.flow, Variance::Vector), &sc.mass)?,
        derived_wedge(&transported(&sc.flow, Variance::Scalar), &second)?,
    ])
}

fn derived(sc: &Scenario) -> Result<Outcome> {
    let fields = derived_suite(sc)?;
    let mut out = Outcome::labelled(field_names(fields.iter()));
    for (t, x) in &sc.samples {
        let r = fields.iter().map(|f| lie_norm(f, &sc.flow, *t, x)).collect::<Result<Vec<_>>>()?;
        out.samples.push(Sample::sup(*t, arr(x), r));
    }
    Ok(out)
}

fn products(sc: &Scenario) -> Result<Outcome> {
    let fields = ProductKind::ALL
        .iter()
        .map(|kind| {
            let ops: Vec<EulerianField> = kind
                .operands()
                .iter()
                .map(|v| match v {
                    Variance::ThreeForm => sc.mass.density_field(),
                    other => transported(&sc.flow, *other),
                })
                .collect();
            let refs: Vec<&EulerianField> = ops.iter().collect();
            Ok((*kind, product_field(*kind, &refs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Outcome::labelled(fields.iter().map(|(k, _)| k.name().to_string()).collect());
    for (t, x) in &sc.samples {
        let div_u = velocity_gradient(&sc.flow, *t, x)?.trace();
        let r = fields
            .iter()
            .map(|(kind, f)| {
                let lie = lie_derivative(f, &sc.flow, *t, x)?.value;
                let predicted = if kind.always_transported() {
                    TensorValue::zero(f.variance())
                } else {
                    f.eval(*t, x)?.scale(-2.0 * div_u)
                };
                Ok(lie.sub(&predicted)?.norm())
            })
            .collect::<Result<Vec<_>>>()?;
        out.samples.push(Sample::sup(*t, arr(x), r));
    }
    out.notes.push("rho_W and rho_C_W are compared with -2 div u times their value; all others with 0".into());
    Ok(out)
}

fn divergence_law(sc: &Scenario) -> Result<Outcome> {
    let mut fields = vec![transported(&sc.flow, Variance::Scalar)];
    fields.extend(sc.fields_of(Variance::Scalar, true).cloned());
    let mut out = Outcome::labelled(field_names(fields.iter()));
    for (t, x) in &sc.samples {
        let r = fields
            .iter()
            .map(|b| divergence_law_residual(b, &sc.mass, &sc.flow, *t, x))
            .collect::<Result<Vec<_>>>()?;
        out.samples.push(Sample::sup(*t, arr(x), r));
    }
    Ok(out)
}

fn clebsch(sc: &Scenario) -> Result<Outcome> {
    let s = transported_field(&sc.flow, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[2]))).renamed("X3");
    let eta = transported_field(&sc.flow, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[0]))).renamed("X1");
    let data = ClebschData::new(|s, eta| 1.0 + 0.25 * s * eta, s, eta)?;
    let report = clebsch_verify(&data, &sc.mass, &sc.flow, &sc.samples, f64::INFINITY)?;
    let mut out = Outcome::new(&CLEBSCH_COMPONENTS);
    out.samples = report.samples;
    out.notes.push("f(s, eta) = 1 + s eta / 4 with s, eta the transported coordinates X3, X1".into());
    Ok(out)
}

fn charge(sc: &Scenario) -> Result<Outcome> {
    let q0 = sc.charge0.clone();
    let field = ChargeField::new(sc.flow.clone(), move |p| q0(p));
    let mut out = Outcome::new(&["div_q_u"]);
    for (t, x) in &sc.samples {
        out.samples.push(Sample::sup(*t, arr(x), vec![charge_conservation_residual(&field, *t, x)?]));
    }
    Ok(out)
}

fn as_vector_field(w: EulerianField, name: &str) -> EulerianField {
    EulerianField::new(name, Variance::Vector, Provenance::Transported, move |t, x| {
        Ok(TensorValue::Vector(w.eval(t, x)?.as_vector().expect("2-form")))
    })
}

fn induction(sc: &Scenario) -> Result<Outcome> {
    let h = as_vector_field(e3_flux_field(&sc.flow), "H");
    let mut out = Outcome::new(&["r1", "r2", "r3", "div_h"]);
    let mut curl_form = 0.0f64;
    for (t, x) in &sc.samples {
        let r = induction_residual(&h, &sc.flow, *t, x)?;
        curl_form = curl_form.max(r.curl_form.norm());
        out.samples.push(Sample::euclidean(*t, arr(x), vec![r.residual[0], r.residual[1], r.residual[2], r.div_h]));
    }
    out.metrics.push(("max_curl_form".into(), curl_form));
    out.notes.push("H is the transported 2-form with H0 = e3".into());
    Ok(out)
}

fn electric(sc: &Scenario) -> Result<Outcome> {
    let d = as_vector_field(transported(&sc.flow, Variance::TwoForm), "D");
    let mut out = Outcome::new(&["d0_variation"]);
    for (_, reference) in sc.samples.iter().take(10) {
        let v = electric_reference_variation(&d, &sc.flow, reference, &sc.times)?;
        out.samples.push(Sample::sup(sc.times[0], arr(reference), vec![v]));
    }
    Ok(out)
}
