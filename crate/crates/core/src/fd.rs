//! Central finite differences.
//!
//! All derivatives in this crate that are not available in closed form go
//! through these helpers, so truncation error is uniformly O(h²).

use crate::{Covec3, Mat3, Point, Result, Vec3};

/// Default spatial step for central differences.
pub const H_SPACE: f64 = 1e-4;
/// Default time step for central differences.
pub const H_TIME: f64 = 1e-4;

/// Step sizes used for spatial and temporal central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub h_space: f64,
    pub h_time: f64,
}

impl Stencil {
    pub const DEFAULT: Stencil = Stencil {
        h_space: H_SPACE,
        h_time: H_TIME,
    };

    pub fn new(h_space: f64, h_time: f64) -> Self {
        Stencil { h_space, h_time }
    }
}

impl Default for Stencil {
    fn default() -> Self {
        Stencil::DEFAULT
    }
}

/// Unit vector along axis `j`.
pub fn axis(j: usize) -> Vec3 {
    let mut e = Vec3::zeros();
    e[j] = 1.0;
    e
}

/// Central difference of a scalar function of one variable.
pub fn central<F>(f: F, at: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(at + h)? - f(at - h)?) / (2.0 * h))
}

/// Componentwise central difference of a vector-valued function of one variable.
pub fn central_components<F>(f: F, at: f64, h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let plus = f(at + h)?;
    let minus = f(at - h)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect())
}

/// Gradient (as a row) of a scalar function of position.
pub fn gradient<F>(f: F, x: &Point, h: f64) -> Result<Covec3>
where
    F: Fn(&Point) -> Result<f64>,
{
    let mut g = Covec3::zeros();
    for j in 0..3 {
        let e = axis(j) * h;
        g[j] = (f(&(x + e))? - f(&(x - e))?) / (2.0 * h);
    }
    Ok(g)
}

/// Jacobian `∂v/∂x` of a vector function of position; column `j` holds `∂v/∂x_j`.
pub fn jacobian<F>(f: F, x: &Point, h: f64) -> Result<Mat3>
where
    F: Fn(&Point) -> Result<Vec3>,
{
    let mut m = Mat3::zeros();
    for j in 0..3 {
        let e = axis(j) * h;
        let col = (f(&(x + e))? - f(&(x - e))?) / (2.0 * h);
        m.set_column(j, &col);
    }
    Ok(m)
}

/// Divergence of a vector function of position.
pub fn divergence<F>(f: F, x: &Point, h: f64) -> Result<f64>
where
    F: Fn(&Point) -> Result<Vec3>,
{
    let mut div = 0.0;
    for j in 0..3 {
        let e = axis(j) * h;
        div += (f(&(x + e))?[j] - f(&(x - e))?[j]) / (2.0 * h);
    }
    Ok(div)
}

/// Curl read off a Jacobian `∂v/∂x`.
pub fn curl_of_jacobian(m: &Mat3) -> Vec3 {
    Vec3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    )
}
