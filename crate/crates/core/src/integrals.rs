//! Material curves, surfaces and volumes, and integrals of forms over them.
//!
//! A material domain is parametrised once in the reference configuration
//! and carried by the flow, so its image at time `t` is always made of the
//! same particles. Tangent vectors are pushed forward with `F`, which keeps
//! the quadrature in the reference parameter:
//!
//! * closed curves: trapezoid rule in `s ∈ [0, 1)`, spectrally accurate on
//!   smooth periodic integrands;
//! * surfaces and volumes: tensor-product midpoint rule.
//!
//! Flux orientation follows the parametrisation, `∂x/∂s₁ × ∂x/∂s₂`.
//! Sums are accumulated pairwise in a fixed order.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::fd::Stencil;
use crate::kinematics::FlowMap;
use crate::lie::lie_field;
use crate::tensor::{EulerianField, Variance};
use crate::{Error, Mat3, Point, Result, Vec3};

const PARAM_STEP: f64 = 1e-6;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

type CurveFn = Arc<dyn Fn(f64) -> Point + Send + Sync>;
type CurveTangentFn = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;

/// A closed curve `s ∈ [0, 1] ↦ X(s)` in the reference configuration.
#[derive(Clone)]
pub struct MaterialCurve {
    param: CurveFn,
    tangent: Option<CurveTangentFn>,
    n_segments: usize,
}

impl fmt::Debug for MaterialCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaterialCurve").field("n_segments", &self.n_segments).finish_non_exhaustive()
    }
}

impl MaterialCurve {
    /// Validates closure (gap ≤ 1e-12), `n_segments ≥ 8` and distinct nodes.
    pub fn new(param: impl Fn(f64) -> Point + Send + Sync + 'static, n_segments: usize) -> Result<Self> {
        if n_segments < 8 {
            return Err(Error::Argument(format!("a material curve needs at least 8 segments, got {n_segments}")));
        }
        let gap = (param(1.0) - param(0.0)).norm();
        if !(gap <= 1e-12) {
            return Err(Error::Argument(format!("curve is not closed: endpoint gap {gap:e}")));
        }
        let nodes: Vec<Point> = (0..n_segments).map(|k| param(k as f64 / n_segments as f64)).collect();
        if nodes.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Argument("curve parametrisation is not finite".into()));
        }
        for (i, a) in nodes.iter().enumerate() {
            if let Some(j) = nodes[i + 1..].iter().position(|b| (a - b).norm() <= 1e-12 * (1.0 + a.norm())) {
                return Err(Error::Argument(format!("curve nodes {i} and {} coincide", i + 1 + j)));
            }
        }
        Ok(MaterialCurve {
            param: Arc::new(param),
            tangent: None,
            n_segments,
        })
    }

    /// Supplies the exact `dX/ds` instead of differentiating the parametrisation.
    pub fn with_tangent(mut self, tangent: impl Fn(f64) -> Vec3 + Send + Sync + 'static) -> Self {
        self.tangent = Some(Arc::new(tangent));
        self
    }

    /// `X(s) = c + cos(2πs) a + sin(2πs) b`.
    pub fn ellipse(center: Point, a: Vec3, b: Vec3, n_segments: usize) -> Result<Self> {
        let curve = MaterialCurve::new(move |s| center + a * (TAU * s).cos() + b * (TAU * s).sin(), n_segments)?;
        Ok(curve.with_tangent(move |s| (b * (TAU * s).cos() - a * (TAU * s).sin()) * TAU))
    }

    /// Circle of the given radius in the plane `X₃ = center₃`, counter-clockwise about `e₃`.
    pub fn circle(center: Point, radius: f64, n_segments: usize) -> Result<Self> {
        Self::ellipse(center, Vec3::x() * radius, Vec3::y() * radius, n_segments)
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn point(&self, s: f64) -> Point {
        (self.param)(s)
    }

    fn tangent_at(&self, s: f64) -> Vec3 {
        match &self.tangent {
            Some(t) => t(s),
            None => {
                let h = PARAM_STEP;
                let wrap = |s: f64| s.rem_euclid(1.0);
                ((self.param)(wrap(s + h)) - (self.param)(wrap(s - h))) / (2.0 * h)
            }
        }
    }

    /// Quadrature nodes `s_k = k/n` with `X(s_k)` and `dX/ds`.
    pub fn nodes(&self) -> Vec<(Point, Vec3)> {
        (0..self.n_segments)
            .map(|k| {
                let s = k as f64 / self.n_segments as f64;
                (self.point(s), self.tangent_at(s))
            })
            .collect()
    }
}

type SurfaceFn = Arc<dyn Fn(f64, f64) -> Point + Send + Sync>;
type SurfaceTangentFn = Arc<dyn Fn(f64, f64) -> (Vec3, Vec3) + Send + Sync>;

/// A parametric patch `(s₁, s₂) ∈ [0, 1]² ↦ X` in the reference configuration.
#[derive(Clone)]
pub struct MaterialSurface {
    param: SurfaceFn,
    tangents: Option<SurfaceTangentFn>,
    n1: usize,
    n2: usize,
}

impl fmt::Debug for MaterialSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaterialSurface").field("n1", &self.n1).field("n2", &self.n2).finish_non_exhaustive()
    }
}

impl MaterialSurface {
    pub fn new(param: impl Fn(f64, f64) -> Point + Send + Sync + 'static, n1: usize, n2: usize) -> Result<Self> {
        Self::build(Arc::new(param), None, n1, n2)
    }

    pub fn with_tangents(
        param: impl Fn(f64, f64) -> Point + Send + Sync + 'static,
        tangents: impl Fn(f64, f64) -> (Vec3, Vec3) + Send + Sync + 'static,
        n1: usize,
        n2: usize,
    ) -> Result<Self> {
        Self::build(Arc::new(param), Some(Arc::new(tangents)), n1, n2)
    }

    fn build(param: SurfaceFn, tangents: Option<SurfaceTangentFn>, n1: usize, n2: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::Argument("surface grid must be at least 1×1".into()));
        }
        let surface = MaterialSurface { param, tangents, n1, n2 };
        for (_, a, b, _) in surface.nodes() {
            let area = a.cross(&b).norm();
            if !(area > 1e-14) {
                return Err(Error::Argument(format!("surface parametrisation is not an immersion (|a×b| = {area:e})")));
            }
        }
        Ok(surface)
    }

    /// Disk in the plane `X₃ = center₃`, `X = c + r(cos θ, sin θ, 0)`
    /// with `r = R s₁`, `θ = 2π s₂`; normal `+e₃`.
    pub fn disk(center: Point, radius: f64, n1: usize, n2: usize) -> Result<Self> {
        Self::disk_with_profile(center, radius, n1, n2, |s| (s, 1.0))
    }

    /// Same disk, radial parameter `r = R sin(π s₁ / 2)`. The midpoint rule
    /// is not exact here, which makes it useful for convergence studies.
    pub fn disk_sine_spaced(center: Point, radius: f64, n1: usize, n2: usize) -> Result<Self> {
        let k = std::f64::consts::FRAC_PI_2;
        Self::disk_with_profile(center, radius, n1, n2, move |s| ((k * s).sin(), k * (k * s).cos()))
    }

    /// `profile(s) = (r/R, d(r/R)/ds)`.
    fn disk_with_profile(
        center: Point,
        radius: f64,
        n1: usize,
        n2: usize,
        profile: impl Fn(f64) -> (f64, f64) + Send + Sync + Clone + 'static,
    ) -> Result<Self> {
        let p = profile.clone();
        Self::with_tangents(
            move |s1, s2| {
                let r = radius * p(s1).0;
                let (sn, cs) = (TAU * s2).sin_cos();
                center + Vec3::new(r * cs, r * sn, 0.0)
            },
            move |s1, s2| {
                let (rho, drho) = profile(s1);
                let (sn, cs) = (TAU * s2).sin_cos();
                let a = Vec3::new(cs, sn, 0.0) * (radius * drho);
                let b = Vec3::new(-sn, cs, 0.0) * (radius * rho * TAU);
                (a, b)
            },
            n1,
            n2,
        )
    }

    /// Midpoint nodes with `X`, `∂X/∂s₁`, `∂X/∂s₂` and the cell weight.
    pub fn nodes(&self) -> Vec<(Point, Vec3, Vec3, f64)> {
        let w = 1.0 / (self.n1 * self.n2) as f64;
        let mut out = Vec::with_capacity(self.n1 * self.n2);
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                let s1 = (i as f64 + 0.5) / self.n1 as f64;
                let s2 = (j as f64 + 0.5) / self.n2 as f64;
                let (a, b) = match &self.tangents {
                    Some(t) => t(s1, s2),
                    None => {
                        let h = PARAM_STEP;
                        (
                            ((self.param)(s1 + h, s2) - (self.param)(s1 - h, s2)) / (2.0 * h),
                            ((self.param)(s1, s2 + h) - (self.param)(s1, s2 - h)) / (2.0 * h),
                        )
                    }
                };
                out.push(((self.param)(s1, s2), a, b, w));
            }
        }
        out
    }
}

type VolumeFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
type VolumeJacobianFn = Arc<dyn Fn(&Point) -> Mat3 + Send + Sync>;

/// A parametric cell `s ∈ [0, 1]³ ↦ X` in the reference configuration.
#[derive(Clone)]
pub struct MaterialVolume {
    param: VolumeFn,
    jacobian: Option<VolumeJacobianFn>,
    n: [usize; 3],
}

impl fmt::Debug for MaterialVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MaterialVolume").field("n", &self.n).finish_non_exhaustive()
    }
}

impl MaterialVolume {
    pub fn new(param: impl Fn(&Point) -> Point + Send + Sync + 'static, n: [usize; 3]) -> Result<Self> {
        Self::build(Arc::new(param), None, n)
    }

    fn build(param: VolumeFn, jacobian: Option<VolumeJacobianFn>, n: [usize; 3]) -> Result<Self> {
        if n.contains(&0) {
            return Err(Error::Argument("volume grid must be at least 1×1×1".into()));
        }
        let volume = MaterialVolume { param, jacobian, n };
        for (_, j, _) in volume.nodes() {
            let det = j.determinant();
            if !(det > 0.0) {
                return Err(Error::Argument(format!("volume parametrisation has det = {det:e} ≤ 0")));
            }
        }
        Ok(volume)
    }

    /// Axis-aligned box `[lo, hi]` with `n` cells per side.
    pub fn cuboid(lo: Point, hi: Point, n: usize) -> Result<Self> {
        let ext = hi - lo;
        Self::build(
            Arc::new(move |s: &Point| lo + ext.component_mul(s)),
            Some(Arc::new(move |_: &Point| Mat3::from_diagonal(&ext))),
            [n, n, n],
        )
    }

    /// Midpoint nodes with `X`, `∂X/∂s` and the cell weight.
    pub fn nodes(&self) -> Vec<(Point, Mat3, f64)> {
        let [n1, n2, n3] = self.n;
        let w = 1.0 / (n1 * n2 * n3) as f64;
        let mut out = Vec::with_capacity(n1 * n2 * n3);
        for i in 0..n1 {
            for j in 0..n2 {
                for k in 0..n3 {
                    let s = Point::new(
                        (i as f64 + 0.5) / n1 as f64,
                        (j as f64 + 0.5) / n2 as f64,
                        (k as f64 + 0.5) / n3 as f64,
                    );
                    let jac = match &self.jacobian {
                        Some(f) => f(&s),
                        None => crate::fd::jacobian(|p| Ok((self.param)(p)), &s, PARAM_STEP).expect("infallible"),
                    };
                    out.push(((self.param)(&s), jac, w));
                }
            }
        }
        out
    }
}

fn require(field: &EulerianField, variance: Variance, what: &str) -> Result<()> {
    if field.variance() == variance {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "{what} integrates a {variance} field, `{}` is {}",
            field.name(),
            field.variance()
        )))
    }
}

/// `∮ C · dx` over the image of a closed material curve at time `t`.
pub fn circulation(c: &EulerianField, flow: &FlowMap, curve: &MaterialCurve, t: f64) -> Result<f64> {
    require(c, Variance::Covector, "circulation")?;
    let terms = curve
        .nodes()
        .iter()
        .map(|(reference, tangent)| {
            let x = flow.forward(t, reference)?;
            let dx = flow.deformation(t, reference)?.f * tangent;
            Ok((c.eval(t, &x)?.as_covector().expect("covector") * dx)[0])
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms) / curve.n_segments() as f64)
}

/// `∬ det(W, ∂x/∂s₁, ∂x/∂s₂) ds₁ ds₂` over the image of a material surface.
pub fn flux(w: &EulerianField, flow: &FlowMap, surface: &MaterialSurface, t: f64) -> Result<f64> {
    require(w, Variance::TwoForm, "flux")?;
    let terms = surface
        .nodes()
        .iter()
        .map(|(reference, a, b, weight)| {
            let x = flow.forward(t, reference)?;
            let f = flow.deformation(t, reference)?.f;
            let wv = w.eval(t, &x)?.as_vector().expect("2-form");
            Ok(wv.dot(&(f * a).cross(&(f * b))) * weight)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

/// `∭ v det(∂x/∂s₁, ∂x/∂s₂, ∂x/∂s₃) ds` over the image of a material volume.
pub fn volume_integral(v: &EulerianField, flow: &FlowMap, volume: &MaterialVolume, t: f64) -> Result<f64> {
    require(v, Variance::ThreeForm, "volume integral")?;
    let terms = volume
        .nodes()
        .iter()
        .map(|(reference, jac, weight)| {
            let x = flow.forward(t, reference)?;
            let f = flow.deformation(t, reference)?.f;
            Ok(v.scalar(t, &x)? * (f * jac).determinant() * weight)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

/// A curve, surface or volume, integrating covectors, 2-forms or 3-forms.
#[derive(Debug, Clone)]
pub enum MaterialDomain {
    Curve(MaterialCurve),
    Surface(MaterialSurface),
    Volume(MaterialVolume),
}

pub fn material_integral(field: &EulerianField, flow: &FlowMap, domain: &MaterialDomain, t: f64) -> Result<f64> {
    match domain {
        MaterialDomain::Curve(c) => circulation(field, flow, c, t),
        MaterialDomain::Surface(s) => flux(field, flow, s, t),
        MaterialDomain::Volume(v) => volume_integral(field, flow, v, t),
    }
}

/// `max |q(tᵢ) − q(t₀)|`.
pub fn drift(values: &[f64]) -> f64 {
    match values.first() {
        None => 0.0,
        Some(q0) => values.iter().fold(0.0f64, |m, q| m.max((q - q0).abs())),
    }
}

/// Drift of a time-dependent quantity over the given times.
pub fn invariance_drift(quantity: impl Fn(f64) -> Result<f64>, times: &[f64]) -> Result<f64> {
    let values = times.iter().map(|&t| quantity(t)).collect::<Result<Vec<_>>>()?;
    Ok(drift(&values))
}

/// Both sides of `d/dt ∫_Ω π = ∫_Ω d_L π` for a form carried over a material domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralRate {
    /// Central difference in `t` of the integral.
    pub finite_difference: f64,
    /// Integral of the Lie derivative.
    pub lie_integral: f64,
}

impl IntegralRate {
    pub fn mismatch(&self) -> f64 {
        (self.finite_difference - self.lie_integral).abs()
    }
}

pub fn integral_rate(field: &EulerianField, flow: &FlowMap, domain: &MaterialDomain, t: f64, stencil: Stencil) -> Result<IntegralRate> {
    let h = stencil.h_time;
    let finite_difference =
        (material_integral(field, flow, domain, t + h)? - material_integral(field, flow, domain, t - h)?) / (2.0 * h);
    let lie_integral = material_integral(&lie_field(field, flow, stencil), flow, domain, t)?;
    Ok(IntegralRate {
        finite_difference,
        lie_integral,
    })
}

/// Observed orders `log₂(eₖ / eₖ₊₁)` for errors on grids refined by 2.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::MassField;
    use crate::tensor::{derived_gradient, transported_field, TensorValue};
    use crate::Covec3;
    use std::f64::consts::PI;

    #[test]
    fn curve_validation() {
        assert!(MaterialCurve::new(|s| Point::new(s, 0.0, 0.0), 16).is_err());
        assert!(MaterialCurve::circle(Point::zeros(), 1.0, 4).is_err());
        assert!(MaterialCurve::new(|s| Point::new((TAU * s).cos(), (TAU * s).sin(), 0.0), 8).is_ok());
        assert!(MaterialCurve::new(|s| Point::new((2.0 * TAU * s).cos(), (2.0 * TAU * s).sin(), 0.0), 8).is_err());
    }

    #[test]
    fn rotation_circulation_is_two_pi() {
        let flow = FlowMap::Rotation { omega: 1.0 };
        let c = transported_field(&flow, Variance::Covector, |p| Ok(TensorValue::Covector(Covec3::new(-p[1], p[0], 0.0))));
        let curve = MaterialCurve::circle(Point::zeros(), 1.0, 512).unwrap();
        let values: Vec<f64> = [0.0, 0.5, 1.0].iter().map(|&t| circulation(&c, &flow, &curve, t).unwrap()).collect();
        for v in &values {
            assert!((v - TAU).abs() < 1e-10);
        }
        assert!(drift(&values) <= 1e-8);
    }

    #[test]
    fn zero_covector_and_exact_forms() {
        let flow = FlowMap::Shear { gamma: 2.0 };
        let curve = MaterialCurve::ellipse(Point::new(0.2, 0.1, 0.3), Vec3::new(0.5, 0.2, 0.0), Vec3::new(0.0, 0.3, 0.4), 64).unwrap();
        let zero = EulerianField::constant("0", TensorValue::zero(Variance::Covector));
        assert_eq!(circulation(&zero, &flow, &curve, 0.5).unwrap(), 0.0);
        let s = transported_field(&flow, Variance::Scalar, |p| Ok(TensorValue::Scalar(p[0].sin() * p[1] + p[2])));
        let g = derived_gradient(&s).unwrap();
        assert!(circulation(&g, &flow, &curve, 0.5).unwrap().abs() < 1e-8);
    }

    #[test]
    fn generic_curve_uses_numerical_tangent() {
        let flow = FlowMap::Rotation { omega: 1.0 };
        let c = transported_field(&flow, Variance::Covector, |p| Ok(TensorValue::Covector(Covec3::new(-p[1], p[0], 0.0))));
        let curve = MaterialCurve::new(|s| Point::new((TAU * s).cos(), (TAU * s).sin(), 0.0), 256).unwrap();
        assert!((circulation(&c, &flow, &curve, 0.3).unwrap() - TAU).abs() < 1e-8);
    }

    #[test]
    fn expansion_flux_is_pi() {
        let flow = FlowMap::Expansion { rate: 1.0 };
        let w = transported_field(&flow, Variance::TwoForm, |_| Ok(TensorValue::TwoForm(Vec3::z())));
        let disk = MaterialSurface::disk(Point::zeros(), 1.0, 64, 64).unwrap();
        for t in [0.0, 0.3, 0.7] {
            assert!((flux(&w, &flow, &disk, t).unwrap() - PI).abs() < 1e-4);
        }
        let zero = EulerianField::constant("0", TensorValue::zero(Variance::TwoForm));
        assert_eq!(flux(&zero, &flow, &disk, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn surface_orientation_follows_parametrisation() {
        let square = MaterialSurface::new(|s1, s2| Point::new(s1, s2, 0.0), 4, 4).unwrap();
        let flipped = MaterialSurface::new(|s1, s2| Point::new(s2, s1, 0.0), 4, 4).unwrap();
        let w = EulerianField::constant("e3", TensorValue::TwoForm(Vec3::z()));
        assert!((flux(&w, &FlowMap::Zero, &square, 0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((flux(&w, &FlowMap::Zero, &flipped, 0.0).unwrap() + 1.0).abs() < 1e-9);
        assert!(MaterialSurface::new(|s1, _| Point::new(s1, 0.0, 0.0), 4, 4).is_err());
    }

    #[test]
    fn volume_examples() {
        let flow = FlowMap::Expansion { rate: 0.5 };
        let cube = MaterialVolume::cuboid(Point::zeros(), Point::new(1.0, 1.0, 1.0), 8).unwrap();
        let rho = MassField::uniform(flow.clone(), 1.0).density_field();
        for t in [0.0, 0.5, 1.0] {
            assert!((volume_integral(&rho, &flow, &cube, t).unwrap() - 1.0).abs() < 1e-12);
        }
        let zero = EulerianField::constant("0", TensorValue::zero(Variance::ThreeForm));
        assert_eq!(volume_integral(&zero, &flow, &cube, 0.4).unwrap(), 0.0);
        let x1 = EulerianField::new("x1", Variance::ThreeForm, crate::tensor::Provenance::Builtin, |_, x| Ok(TensorValue::ThreeForm(x[0])));
        for t in [0.0, 2.0] {
            assert!((volume_integral(&x1, &FlowMap::Zero, &cube, t).unwrap() - 0.5).abs() < 1e-14);
        }
        assert!(MaterialVolume::new(|s| Point::new(s[1], s[0], s[2]), [2, 2, 2]).is_err());
    }

    #[test]
    fn drift_arithmetic() {
        assert_eq!(drift(&[1.0, 1.0, 1.0]), 0.0);
        assert!((drift(&[PI, PI + 1e-9, PI - 2e-9]) - 2e-9).abs() < 1e-15);
        assert_eq!(drift(&[]), 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }

    #[test]
    fn variance_mismatch_is_rejected() {
        let curve = MaterialCurve::circle(Point::zeros(), 1.0, 16).unwrap();
        let s = EulerianField::constant("s", TensorValue::Scalar(1.0));
        assert!(circulation(&s, &FlowMap::Zero, &curve, 0.0).is_err());
    }
}
