//! Strain smoothing by boundary integration.
//!
//! For a smoothing cell `C` with outward unit normal `n`, the smoothed
//! strain-displacement operator of node `I` is
//!
//! ```text
//!            1   ⌠  ⎡ N_I n_x     0    ⎤
//! B̃_I   =  ───  ⎮  ⎢    0     N_I n_y ⎥ dΓ
//!           A_C  ⌡∂C⎣ N_I n_y  N_I n_x ⎦
//! ```
//!
//! integrated segment by segment with Gauss–Legendre rules, and the element
//! stiffness is `K_e = Σ_C B̃_Cᵀ D B̃_C A_C t`. Only shape-function values on
//! cell boundaries are needed, never their derivatives.

use std::fmt;

use nalgebra::{Matrix3, SMatrix, SymmetricEigen, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{element_geometry, subdivide, SmoothingCell, Subdivision};
use crate::quadrature::gauss_legendre_unit;
use crate::shapefn::{ElementBasis, Scheme, ShapeFunctions};

pub type BMatrix = SMatrix<f64, 3, 8>;
pub type StiffnessMatrix = SMatrix<f64, 8, 8>;

/// Isotropic plane-stress material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    young: f64,
    poisson: f64,
    thickness: f64,
}

impl Material {
    pub fn plane_stress(young: f64, poisson: f64, thickness: f64) -> Result<Self> {
        if !(young > 0.0 && young.is_finite()) {
            return Err(Error::InvalidInput(format!("Young's modulus {young} must be positive")));
        }
        if !(0.0..0.5).contains(&poisson) {
            return Err(Error::InvalidInput(format!("Poisson ratio {poisson} outside [0, 0.5)")));
        }
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::InvalidInput(format!("thickness {thickness} must be positive")));
        }
        Ok(Self {
            young,
            poisson,
            thickness,
        })
    }

    pub fn young(&self) -> f64 {
        self.young
    }

    pub fn poisson(&self) -> f64 {
        self.poisson
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }

    pub fn elasticity_matrix(&self) -> Matrix3<f64> {
        elasticity_matrix(self)
    }
}

/// Plane-stress `D` in Voigt order `(εxx, εyy, γxy)`.
pub fn elasticity_matrix(material: &Material) -> Matrix3<f64> {
    let nu = material.poisson;
    let c = material.young / (1.0 - nu * nu);
    Matrix3::new(c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * 0.5 * (1.0 - nu))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedBMatrix {
    /// Columns `2I, 2I + 1` belong to node `I`.
    pub b: BMatrix,
    pub cell_area: f64,
    /// Smallest shape-function value met at a quadrature point.
    pub min_shape_value: f64,
}

impl SmoothedBMatrix {
    /// Cell strain `(εxx, εyy, γxy)` for element displacements
    /// `(u1x, u1y, ..., u4x, u4y)`.
    pub fn strain(&self, u: &[f64; 8]) -> Vector3<f64> {
        self.b * SMatrix::<f64, 8, 1>::from_column_slice(u)
    }
}

pub fn smoothed_b(cell: &SmoothingCell, shape: &impl ShapeFunctions, gauss_points: usize) -> Result<SmoothedBMatrix> {
    if !(cell.area > 0.0) {
        return Err(Error::ZeroArea { area: cell.area });
    }
    let rule = gauss_legendre_unit(gauss_points)?;
    let mut b = BMatrix::zeros();
    let mut min_shape_value = f64::INFINITY;
    for (p, q) in cell.segments() {
        let d = q - p;
        // outward normal times segment length, for a counter-clockwise cell
        let nl = Vector2::new(d.y, -d.x);
        for &(s, w) in &rule {
            let x = p + d * s;
            let n = shape.values(&x)?;
            min_shape_value = min_shape_value.min(n.min());
            for (i, ni) in n.n.iter().enumerate() {
                let (fx, fy) = (w * ni * nl.x, w * ni * nl.y);
                b[(0, 2 * i)] += fx;
                b[(1, 2 * i + 1)] += fy;
                b[(2, 2 * i)] += fy;
                b[(2, 2 * i + 1)] += fx;
            }
        }
    }
    Ok(SmoothedBMatrix {
        b: b / cell.area,
        cell_area: cell.area,
        min_shape_value,
    })
}

/// Scheme, smoothing cells and boundary quadrature of an SFEM model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discretization {
    pub scheme: Scheme,
    pub subdivision: Subdivision,
    quadrature: usize,
}

impl Discretization {
    pub fn new(scheme: Scheme, subdivision: Subdivision) -> Self {
        Self {
            scheme,
            subdivision,
            quadrature: scheme.default_quadrature(),
        }
    }

    /// Gauss points per cell segment, 1 to 4.
    pub fn with_quadrature(mut self, points: usize) -> Result<Self> {
        gauss_legendre_unit(points)?;
        self.quadrature = points;
        Ok(self)
    }

    pub fn quadrature(&self) -> usize {
        self.quadrature
    }
}

/// Non-fatal findings attached to stiffness and solution results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Warning {
    ConcaveElement { element: usize },
    NegativeShapeValue { element: usize, value: f64 },
    SpuriousModes { element: usize, rank: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ConcaveElement { element } => write!(f, "element {element} is concave"),
            Self::NegativeShapeValue { element, value } => {
                write!(
                    f,
                    "element {element}: shape function value {value:e} < 0 on a cell boundary"
                )
            }
            Self::SpuriousModes { element, rank } => {
                write!(
                    f,
                    "element {element}: stiffness rank {rank} < 5 (spurious zero-energy modes)"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementStiffness {
    pub k: StiffnessMatrix,
    /// Numerical rank; 5 for a well-formed element with three rigid modes.
    pub rank: usize,
    pub cells: Vec<(SmoothingCell, SmoothedBMatrix)>,
    pub warnings: Vec<Warning>,
}

const NEGATIVE_TOL: f64 = 1e-12;
const RANK_TOL: f64 = 1e-10;

pub fn element_stiffness(
    quad: &[Point; 4],
    element: usize,
    discretization: &Discretization,
    material: &Material,
) -> Result<ElementStiffness> {
    let geometry = element_geometry(quad)?;
    let basis = ElementBasis::new(discretization.scheme, quad, discretization.subdivision)?;
    let d = material.elasticity_matrix();
    let mut k = StiffnessMatrix::zeros();
    let mut cells = Vec::with_capacity(discretization.subdivision.count());
    let mut min_shape_value = f64::INFINITY;
    for cell in subdivide(quad, discretization.subdivision, element) {
        let b = smoothed_b(&cell, &basis, discretization.quadrature)?;
        k += b.b.transpose() * d * b.b * (b.cell_area * material.thickness);
        min_shape_value = min_shape_value.min(b.min_shape_value);
        cells.push((cell, b));
    }

    let rank = numerical_rank(&k);
    let mut warnings = Vec::new();
    if !geometry.is_convex {
        warnings.push(Warning::ConcaveElement { element });
    }
    if min_shape_value < -NEGATIVE_TOL {
        warnings.push(Warning::NegativeShapeValue {
            element,
            value: min_shape_value,
        });
    }
    if rank < 5 {
        warnings.push(Warning::SpuriousModes { element, rank });
    }
    Ok(ElementStiffness {
        k,
        rank,
        cells,
        warnings,
    })
}

fn numerical_rank(k: &StiffnessMatrix) -> usize {
    let eig = SymmetricEigen::new(*k);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eig.eigenvalues.iter().filter(|v| v.abs() > RANK_TOL * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use crate::mesh::Sc2Split;

    fn unit_square() -> [Point; 4] {
        [point(0.0, 0.0), point(1.0, 0.0), point(1.0, 1.0), point(0.0, 1.0)]
    }

    fn parallelogram() -> [Point; 4] {
        [point(0.0, 0.0), point(1.0, 0.0), point(1.5, 1.0), point(0.5, 1.0)]
    }

    fn nodal(quad: &[Point; 4], f: impl Fn(&Point) -> (f64, f64)) -> [f64; 8] {
        let mut u = [0.0; 8];
        for (i, p) in quad.iter().enumerate() {
            let (ux, uy) = f(p);
            u[2 * i] = ux;
            u[2 * i + 1] = uy;
        }
        u
    }

    #[test]
    fn elasticity_matrix_values() {
        let d = elasticity_matrix(&Material::plane_stress(1.0, 0.0, 1.0).unwrap());
        assert_eq!(d, Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.5)));
        let d = elasticity_matrix(&Material::plane_stress(3e7, 0.3, 1.0).unwrap());
        assert!((d[(0, 0)] - 3e7 / 0.91).abs() < 1e-6);
        assert_eq!(d, d.transpose());
        assert!(d.symmetric_eigenvalues().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn material_validation() {
        assert!(Material::plane_stress(0.0, 0.3, 1.0).is_err());
        assert!(Material::plane_stress(1.0, 0.5, 1.0).is_err());
        assert!(Material::plane_stress(1.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn translation_gives_zero_strain() {
        let q = parallelogram();
        for scheme in Scheme::ALL {
            let basis = ElementBasis::new(scheme, &q, Subdivision::Quarters).unwrap();
            for cell in subdivide(&q, Subdivision::Quarters, 0) {
                let b = smoothed_b(&cell, &basis, scheme.default_quadrature()).unwrap();
                let e = b.strain(&nodal(&q, |_| (1.0, 0.0)));
                assert!(e.norm() < 1e-12, "{scheme}: {e}");
            }
        }
    }

    #[test]
    fn uniaxial_stretch_on_single_cell() {
        let q = unit_square();
        let basis = ElementBasis::new(Scheme::Wachspress, &q, Subdivision::Single).unwrap();
        let cell = &subdivide(&q, Subdivision::Single, 0)[0];
        let b = smoothed_b(cell, &basis, 2).unwrap();
        let e = b.strain(&nodal(&q, |p| (p.x, 0.0)));
        assert!((e - Vector3::new(1.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn averaged_midpoint_rule_matches_wachspress_on_square_cell() {
        let q = unit_square();
        let cell = &subdivide(&q, Subdivision::Quarters, 0)[0];
        let a = smoothed_b(
            cell,
            &ElementBasis::new(Scheme::Wachspress, &q, Subdivision::Quarters).unwrap(),
            2,
        )
        .unwrap();
        let b = smoothed_b(
            cell,
            &ElementBasis::new(Scheme::Averaged, &q, Subdivision::Quarters).unwrap(),
            1,
        )
        .unwrap();
        assert!((a.b - b.b).amax() < 1e-12);
    }

    #[test]
    fn zero_area_cell() {
        let cell = SmoothingCell::new(vec![point(0.0, 0.0), point(1.0, 0.0), point(2.0, 0.0)], 0);
        let basis = ElementBasis::new(Scheme::Wachspress, &unit_square(), Subdivision::Single).unwrap();
        assert!(matches!(smoothed_b(&cell, &basis, 2), Err(Error::ZeroArea { .. })));
    }

    #[test]
    fn stiffness_rank_and_rigid_modes() {
        let m = Material::plane_stress(1.0, 0.3, 1.0).unwrap();
        let q = parallelogram();
        for sub in [Subdivision::Quarters, Subdivision::Halves(Sc2Split::Edge12To34)] {
            let ke = element_stiffness(&q, 0, &Discretization::new(Scheme::Wachspress, sub), &m).unwrap();
            assert_eq!(ke.rank, 5);
            assert!(ke.warnings.is_empty());
            let u = SMatrix::<f64, 8, 1>::from_column_slice(&nodal(&q, |p| (-p.y, p.x)));
            assert!((ke.k * u).norm() < 1e-9 * ke.k.norm() * u.norm());
        }
        let ke = element_stiffness(&q, 7, &Discretization::new(Scheme::Wachspress, Subdivision::Single), &m).unwrap();
        assert_eq!(ke.rank, 3);
        assert_eq!(ke.warnings, vec![Warning::SpuriousModes { element: 7, rank: 3 }]);
    }

    #[test]
    fn quadrature_override_is_validated() {
        let d = Discretization::new(Scheme::Averaged, Subdivision::Quarters);
        assert_eq!(d.quadrature(), 1);
        assert_eq!(d.with_quadrature(3).unwrap().quadrature(), 3);
        assert!(d.with_quadrature(0).is_err());
    }
}
