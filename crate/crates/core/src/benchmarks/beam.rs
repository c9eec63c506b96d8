//! Thick cantilever under a parabolic end shear (plane stress), with its
//! closed-form elasticity solution.
//!
//! The beam occupies `[0, L] × [-D/2, D/2]`. The `x = 0` end is held by the
//! exact displacement field and the `x = L` end carries the parabolic shear
//! traction whose resultant is `-P`.

use nalgebra::{Vector2, Vector3};

use crate::error::Result;
use crate::geometry::{point, Point};
use crate::smoothing::Material;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimoshenkoBeam {
    pub length: f64,
    pub height: f64,
    pub thickness: f64,
    pub young: f64,
    pub poisson: f64,
    pub load: f64,
}

/// Strain energy of the closed-form solution for the default beam.
pub const EXACT_STRAIN_ENERGY: f64 = 0.0398333;

impl Default for TimoshenkoBeam {
    fn default() -> Self {
        Self {
            length: 8.0,
            height: 4.0,
            thickness: 1.0,
            young: 3e7,
            poisson: 0.3,
            load: 250.0,
        }
    }
}

impl TimoshenkoBeam {
    /// `I = t D³ / 12`.
    pub fn second_moment(&self) -> f64 {
        self.thickness * self.height.powi(3) / 12.0
    }

    pub fn material(&self) -> Result<Material> {
        Material::plane_stress(self.young, self.poisson, self.thickness)
    }

    pub fn exact_displacement(&self, p: &Point) -> (f64, f64) {
        let (x, y) = (p.x, p.y);
        let (l, d, e, nu, pl) = (self.length, self.height, self.young, self.poisson, self.load);
        let i = self.second_moment();
        let ux = pl * y / (6.0 * e * i) * ((6.0 * l - 3.0 * x) * x + (2.0 + nu) * (y * y - d * d / 4.0));
        let uy = -pl / (6.0 * e * i)
            * (3.0 * nu * y * y * (l - x) + (4.0 + 5.0 * nu) * d * d * x / 4.0 + (3.0 * l - x) * x * x);
        (ux, uy)
    }

    /// `(σxx, σyy, τxy)`.
    pub fn exact_stress(&self, p: &Point) -> Vector3<f64> {
        let i = self.second_moment();
        let d2 = self.height * self.height / 4.0;
        Vector3::new(
            self.load * (self.length - p.x) * p.y / i,
            0.0,
            -self.load / (2.0 * i) * (d2 - p.y * p.y),
        )
    }

    /// `(εxx, εyy, γxy)` from the stress through the plane-stress compliance.
    pub fn exact_strain(&self, p: &Point) -> Vector3<f64> {
        let s = self.exact_stress(p);
        let (e, nu) = (self.young, self.poisson);
        Vector3::new((s.x - nu * s.y) / e, (s.y - nu * s.x) / e, 2.0 * (1.0 + nu) * s.z / e)
    }

    /// Traction on the free end `x = L` (outward normal `+x`).
    pub fn end_traction(&self, p: &Point) -> Vector2<f64> {
        let s = self.exact_stress(p);
        Vector2::new(s.x, s.z)
    }

    /// `½ ∫ σ : ε dΩ` of the closed-form field, by `gauss × gauss` Gauss
    /// points on each cell of an `nx × ny` grid.
    pub fn integrated_strain_energy(&self, nx: usize, ny: usize, gauss: usize) -> Result<f64> {
        let rule = crate::quadrature::gauss_legendre_unit(gauss)?;
        let (hx, hy) = (self.length / nx as f64, self.height / ny as f64);
        let mut total = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                let (x0, y0) = (i as f64 * hx, -0.5 * self.height + j as f64 * hy);
                for &(sx, wx) in &rule {
                    for &(sy, wy) in &rule {
                        let p = point(x0 + sx * hx, y0 + sy * hy);
                        total += wx * wy * hx * hy * self.exact_stress(&p).dot(&self.exact_strain(&p));
                    }
                }
            }
        }
        Ok(0.5 * total * self.thickness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_fixed() {
        assert_eq!(
            TimoshenkoBeam::default().exact_displacement(&point(0.0, 0.0)),
            (0.0, 0.0)
        );
    }

    #[test]
    fn reference_stresses() {
        let b = TimoshenkoBeam::default();
        assert_eq!(b.second_moment(), 64.0 / 12.0);
        assert_eq!(b.exact_stress(&point(8.0, 1.3)).x, 0.0);
        assert!((b.exact_stress(&point(0.0, 2.0)).x - 750.0).abs() < 1e-10);
        assert_eq!(b.exact_stress(&point(3.0, 2.0)).z, 0.0);
        assert_eq!(b.exact_stress(&point(3.0, -2.0)).z, 0.0);
    }

    #[test]
    fn strain_is_gradient_of_displacement() {
        let b = TimoshenkoBeam::default();
        let h = 1e-5;
        for &(x, y) in &[(1.0, 0.5), (5.5, -1.7), (7.9, 1.9)] {
            let u = |x: f64, y: f64| b.exact_displacement(&point(x, y));
            let dux_dx = (u(x + h, y).0 - u(x - h, y).0) / (2.0 * h);
            let duy_dy = (u(x, y + h).1 - u(x, y - h).1) / (2.0 * h);
            let gxy = (u(x, y + h).0 - u(x, y - h).0 + u(x + h, y).1 - u(x - h, y).1) / (2.0 * h);
            let e = b.exact_strain(&point(x, y));
            let scale = e.amax();
            assert!((dux_dx - e.x).abs() < 1e-6 * scale);
            assert!((duy_dy - e.y).abs() < 1e-6 * scale);
            assert!((gxy - e.z).abs() < 1e-6 * scale);
        }
    }

    #[test]
    fn end_shear_resultant() {
        // ∫ τ dy over [-D/2, D/2] with 3 Gauss points is exact for the parabola
        let b = TimoshenkoBeam::default();
        let rule = crate::quadrature::gauss_legendre_unit(3).unwrap();
        let total: f64 = rule
            .iter()
            .map(|&(s, w)| w * b.height * b.end_traction(&point(b.length, -2.0 + 4.0 * s)).y)
            .sum();
        assert!((total + 250.0).abs() < 1e-10);
    }
}
