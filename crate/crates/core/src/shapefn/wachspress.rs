//! Wachspress rational interpolants on a quadrilateral, built directly in
//! physical coordinates.
//!
//! Node `i` owns the wedge `w_i = κ_i l_{i+1} l_{i+2}`, the product of the
//! lines of the two sides not touching it (indices mod 4, side `i` joins
//! nodes `i` and `i + 1`). The shape functions are `N_i = w_i / Σ_j w_j`.
//!
//! The wedge constants are `κ_i ∝ C_i |e_{i+1}| |e_{i+2}|`, where `C_i` is
//! the signed area of the corner triangle `(x_{i-1}, x_i, x_{i+1})`. With
//! unit-normal lines this is the area form `C_i A_{i+1}(x) A_{i+2}(x)` of the
//! wedge, which is what makes the basis linear on every side and linearly
//! complete on arbitrary quads. The constants are scaled so that the adjoint
//! `Σ w_j` equals one at the vertex average; on a parallelogram the adjoint
//! is then identically one.

use nalgebra::Vector2;

use super::line::{line_through, LineEquation};
use super::{ShapeFunctions, ShapeValues};
use crate::error::{Error, Result};
use crate::geometry::{diameter, triangle_area, vertex_average, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct WachspressBasis {
    lines: [LineEquation; 4],
    kappas: [f64; 4],
    nodes: [Point; 4],
}

const KRONECKER_TOL: f64 = 1e-12;
const WEDGE_TOL: f64 = 1e-14;
const ADJOINT_TOL: f64 = 1e-12;

#[inline]
fn opposite_sides(i: usize) -> (usize, usize) {
    ((i + 1) % 4, (i + 2) % 4)
}

pub fn build_wachspress(quad: &[Point; 4]) -> Result<WachspressBasis> {
    let mut lines = [LineEquation { a: 0.0, b: 0.0, c: 0.0 }; 4];
    for i in 0..4 {
        lines[i] = line_through(&quad[i], &quad[(i + 1) % 4])?;
    }
    let h = diameter(quad);
    let mut kappas = [0.0; 4];
    for i in 0..4 {
        let (j, k) = opposite_sides(i);
        let corner = triangle_area(&quad[(i + 3) % 4], &quad[i], &quad[(i + 1) % 4]);
        let own = lines[j].eval(&quad[i]) * lines[k].eval(&quad[i]);
        if corner.abs() <= WEDGE_TOL * h * h || own.abs() <= WEDGE_TOL * h * h {
            return Err(Error::WedgeDegenerate { node: i });
        }
        let len_j = (quad[(j + 1) % 4] - quad[j]).norm();
        let len_k = (quad[(k + 1) % 4] - quad[k]).norm();
        kappas[i] = corner * len_j * len_k;
    }

    let mut basis = WachspressBasis {
        lines,
        kappas,
        nodes: *quad,
    };
    let scale = basis.adjoint(&vertex_average(quad));
    let scale = if scale.abs() > WEDGE_TOL {
        scale
    } else {
        kappas.iter().map(|k| k.abs()).fold(0.0, f64::max)
    };
    for k in basis.kappas.iter_mut() {
        *k /= scale;
    }

    for (j, node) in quad.iter().enumerate() {
        let n = basis.values(node).map_err(|_| Error::WedgeDegenerate { node: j })?;
        for i in 0..4 {
            let delta = if i == j { 1.0 } else { 0.0 };
            if (n.n[i] - delta).abs() > KRONECKER_TOL {
                return Err(Error::WedgeDegenerate { node: i });
            }
        }
    }
    Ok(basis)
}

impl WachspressBasis {
    pub fn lines(&self) -> &[LineEquation; 4] {
        &self.lines
    }

    pub fn kappas(&self) -> &[f64; 4] {
        &self.kappas
    }

    pub fn nodes(&self) -> &[Point; 4] {
        &self.nodes
    }

    pub fn wedges(&self, p: &Point) -> [f64; 4] {
        std::array::from_fn(|i| {
            let (j, k) = opposite_sides(i);
            self.kappas[i] * self.lines[j].eval(p) * self.lines[k].eval(p)
        })
    }

    /// The denominator `Σ w_i(p)`.
    pub fn adjoint(&self, p: &Point) -> f64 {
        self.wedges(p).iter().sum()
    }

    fn checked_adjoint(&self, p: &Point, w: &[f64; 4]) -> Result<f64> {
        let sum: f64 = w.iter().sum();
        let scale: f64 = w.iter().map(|v| v.abs()).sum();
        if !(sum.abs() > ADJOINT_TOL * scale) {
            return Err(Error::AdjointZero { x: p.x, y: p.y });
        }
        Ok(sum)
    }

    /// Analytic gradients by the quotient rule.
    pub fn gradients(&self, p: &Point) -> Result<[Vector2<f64>; 4]> {
        let w = self.wedges(p);
        let sum = self.checked_adjoint(p, &w)?;
        let dw: [Vector2<f64>; 4] = std::array::from_fn(|i| {
            let (j, k) = opposite_sides(i);
            let (lj, lk) = (&self.lines[j], &self.lines[k]);
            (lj.gradient() * lk.eval(p) + lk.gradient() * lj.eval(p)) * self.kappas[i]
        });
        let dsum = dw.iter().fold(Vector2::zeros(), |acc, g| acc + g);
        Ok(std::array::from_fn(|i| (dw[i] - dsum * (w[i] / sum)) / sum))
    }
}

impl ShapeFunctions for WachspressBasis {
    fn values(&self, p: &Point) -> Result<ShapeValues> {
        let w = self.wedges(p);
        let sum = self.checked_adjoint(p, &w)?;
        Ok(ShapeValues {
            n: w.map(|wi| wi / sum),
        })
    }
}
