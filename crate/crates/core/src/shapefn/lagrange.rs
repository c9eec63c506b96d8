//! Non-mapped Lagrange shape functions: the span of `{1, x, y, xy}` fitted
//! through the four nodes in physical coordinates.
//!
//! The moment matrix is formed in coordinates centred on the vertex average
//! and scaled by the element diameter, so the existence test is independent
//! of element size and position.

use nalgebra::{Matrix4, RowVector4, Vector2};

use super::{ShapeFunctions, ShapeValues};
use crate::error::{Error, Result};
use crate::geometry::{diameter, vertex_average, Point};

const EXISTENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeBasis {
    /// Inverse of the moment matrix with rows `[1, ξ_i, η_i, ξ_i η_i]`.
    coeffs: Matrix4<f64>,
    determinant: f64,
    center: Point,
    scale: f64,
}

pub fn build_lagrange(quad: &[Point; 4]) -> Result<LagrangeBasis> {
    let center = vertex_average(quad);
    let scale = diameter(quad);
    if !(scale > 0.0) {
        return Err(Error::NonExistent { determinant: 0.0 });
    }
    let mut moments = Matrix4::zeros();
    for (i, p) in quad.iter().enumerate() {
        let (xi, eta) = ((p.x - center.x) / scale, (p.y - center.y) / scale);
        moments.set_row(i, &RowVector4::new(1.0, xi, eta, xi * eta));
    }
    let determinant = moments.determinant();
    if !(determinant.abs() >= EXISTENCE_TOL) {
        return Err(Error::NonExistent { determinant });
    }
    let coeffs = moments.try_inverse().ok_or(Error::NonExistent { determinant })?;
    Ok(LagrangeBasis {
        coeffs,
        determinant,
        center,
        scale,
    })
}

impl LagrangeBasis {
    pub fn coeffs(&self) -> &Matrix4<f64> {
        &self.coeffs
    }

    /// Determinant of the scaled moment matrix.
    pub fn determinant(&self) -> f64 {
        self.determinant
    }

    fn local(&self, p: &Point) -> (f64, f64) {
        ((p.x - self.center.x) / self.scale, (p.y - self.center.y) / self.scale)
    }

    pub fn gradients(&self, p: &Point) -> [Vector2<f64>; 4] {
        let (xi, eta) = self.local(p);
        let dx = RowVector4::new(0.0, 1.0, 0.0, eta) * self.coeffs / self.scale;
        let dy = RowVector4::new(0.0, 0.0, 1.0, xi) * self.coeffs / self.scale;
        std::array::from_fn(|i| Vector2::new(dx[i], dy[i]))
    }
}

impl ShapeFunctions for LagrangeBasis {
    fn values(&self, p: &Point) -> Result<ShapeValues> {
        let (xi, eta) = self.local(p);
        let row = RowVector4::new(1.0, xi, eta, xi * eta) * self.coeffs;
        Ok(ShapeValues {
            n: [row[0], row[1], row[2], row[3]],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn unit_square_is_bilinear() {
        let q = [point(0.0, 0.0), point(1.0, 0.0), point(1.0, 1.0), point(0.0, 1.0)];
        let b = build_lagrange(&q).unwrap();
        let (x, y) = (0.2, 0.65);
        let n = b.values(&point(x, y)).unwrap().n;
        assert!((n[0] - (1.0 - x) * (1.0 - y)).abs() < 1e-14);
        let g = b.gradients(&point(0.5, 0.5));
        assert!((g[0] - Vector2::new(-0.5, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn parallelogram_is_negative_at_side_midpoint() {
        let q = [point(0.0, 0.0), point(1.0, 0.0), point(1.5, 1.0), point(0.5, 1.0)];
        let n = build_lagrange(&q).unwrap().values(&point(0.25, 0.5)).unwrap().n;
        let expected = [0.375, 0.125, -0.125, 0.625];
        for i in 0..4 {
            assert!((n[i] - expected[i]).abs() < 1e-12, "{n:?}");
        }
    }

    #[test]
    fn collinear_nodes_do_not_exist() {
        let q = [point(0.0, 0.0), point(1.0, 1.0), point(2.0, 2.0), point(3.0, 3.0)];
        assert!(matches!(build_lagrange(&q), Err(Error::NonExistent { .. })));
    }

    #[test]
    fn convex_quad_on_a_hyperbola_does_not_exist() {
        // a parallelogram with all four nodes on xy = 1
        let q = [point(2.0, 0.5), point(1.0, 1.0), point(-2.0, -0.5), point(-1.0, -1.0)];
        assert!(crate::geometry::signed_area(&q) > 0.0 && crate::geometry::is_convex(&q));
        let r = build_lagrange(&q);
        assert!(matches!(r, Err(Error::NonExistent { .. })), "{r:?}");
    }
}
