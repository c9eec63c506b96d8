//! Global assembly, boundary conditions and the linear solve.

use std::collections::BTreeMap;

use nalgebra::{DVector, Vector2, Vector3};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{BoundaryTag, Mesh, SmoothingCell};
use crate::quadrature::gauss_legendre_unit;
use crate::smoothing::{element_stiffness, Discretization, Material, SmoothedBMatrix, Warning};

/// Node `n` owns dofs `2n` (x) and `2n + 1` (y).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    nodes: usize,
}

impl DofMap {
    pub fn new(nodes: usize) -> Self {
        Self { nodes }
    }

    #[inline]
    pub fn ux(&self, node: usize) -> usize {
        2 * node
    }

    #[inline]
    pub fn uy(&self, node: usize) -> usize {
        2 * node + 1
    }

    pub fn total_dofs(&self) -> usize {
        2 * self.nodes
    }

    pub fn element_dofs(&self, node_ids: &[usize; 4]) -> [usize; 8] {
        std::array::from_fn(|i| 2 * node_ids[i / 2] + i % 2)
    }
}

/// A smoothing cell with its operator and the global dofs it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOperator {
    pub element: usize,
    pub cell: SmoothingCell,
    pub b: SmoothedBMatrix,
    pub dofs: [usize; 8],
}

impl CellOperator {
    pub fn strain(&self, u: &DVector<f64>) -> Vector3<f64> {
        self.b.strain(&self.dofs.map(|d| u[d]))
    }
}

#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub dofs: DofMap,
    pub stiffness: CscMatrix<f64>,
    pub load: DVector<f64>,
    /// Prescribed dof values.
    pub fixed: BTreeMap<usize, f64>,
    pub cells: Vec<CellOperator>,
    pub material: Material,
    pub warnings: Vec<Warning>,
}

/// Builds the global stiffness. Element stiffnesses are computed in
/// parallel and scattered in element order, so the result is deterministic.
pub fn assemble(mesh: &Mesh, discretization: &Discretization, material: &Material) -> Result<GlobalSystem> {
    let dofs = DofMap::new(mesh.nodes.len());
    let elements: Vec<_> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|e| {
            element_stiffness(&mesh.element_points(e), e, discretization, material).map_err(|err| err.in_element(e))
        })
        .collect::<Result<_>>()?;

    let n = dofs.total_dofs();
    let mut coo = CooMatrix::new(n, n);
    let mut cells = Vec::with_capacity(elements.len() * discretization.subdivision.count());
    let mut warnings = Vec::new();
    for (e, ke) in elements.into_iter().enumerate() {
        let edofs = dofs.element_dofs(&mesh.elements[e].node_ids);
        for (a, &i) in edofs.iter().enumerate() {
            for (b, &j) in edofs.iter().enumerate() {
                coo.push(i, j, ke.k[(a, b)]);
            }
        }
        warnings.extend(ke.warnings);
        cells.extend(ke.cells.into_iter().map(|(cell, b)| CellOperator {
            element: e,
            cell,
            b,
            dofs: edofs,
        }));
    }
    Ok(GlobalSystem {
        dofs,
        stiffness: CscMatrix::from(&coo),
        load: DVector::zeros(n),
        fixed: BTreeMap::new(),
        cells,
        material: *material,
        warnings,
    })
}

/// Consistent nodal forces for a traction (force per unit area) on the
/// edges tagged `tag`, using linear edge interpolation and two Gauss points
/// per edge. Includes the thickness.
pub fn apply_tractions(
    mesh: &Mesh,
    tag: BoundaryTag,
    thickness: f64,
    traction: impl Fn(&Point) -> Vector2<f64>,
) -> Result<DVector<f64>> {
    let dofs = DofMap::new(mesh.nodes.len());
    let mut f = DVector::zeros(dofs.total_dofs());
    let rule = gauss_legendre_unit(2)?;
    let mut any = false;
    for edge in mesh.edges_with_tag(tag) {
        any = true;
        let [a, b] = mesh.edge_nodes(edge);
        let (pa, pb) = (mesh.nodes[a].point(), mesh.nodes[b].point());
        let len = (pb - pa).norm();
        for &(s, w) in &rule {
            let t = traction(&(pa + (pb - pa) * s)) * (w * len * thickness);
            f[dofs.ux(a)] += (1.0 - s) * t.x;
            f[dofs.uy(a)] += (1.0 - s) * t.y;
            f[dofs.ux(b)] += s * t.x;
            f[dofs.uy(b)] += s * t.y;
        }
    }
    if !any {
        return Err(Error::UnknownTag(tag));
    }
    Ok(f)
}

/// Prescribes both displacement components of `nodes` from `field`.
pub fn apply_dirichlet(
    system: &mut GlobalSystem,
    mesh: &Mesh,
    nodes: &[usize],
    field: impl Fn(&Point) -> (f64, f64),
) -> Result<()> {
    for &n in nodes {
        let (ux, uy) = field(&mesh.nodes[n].point());
        if !ux.is_finite() || !uy.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite prescribed displacement at node {n}"
            )));
        }
        system.fixed.insert(system.dofs.ux(n), ux);
        system.fixed.insert(system.dofs.uy(n), uy);
    }
    Ok(())
}

/// The free-dof system left after eliminating prescribed dofs.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem<'a> {
    pub system: &'a GlobalSystem,
    pub free: Vec<usize>,
    pub reduced: CscMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl GlobalSystem {
    pub fn constrain(&self) -> Result<ConstrainedSystem<'_>> {
        let n = self.dofs.total_dofs();
        let mut reduced_index = vec![usize::MAX; n];
        let mut free = Vec::with_capacity(n - self.fixed.len());
        for d in (0..n).filter(|d| !self.fixed.contains_key(d)) {
            reduced_index[d] = free.len();
            free.push(d);
        }
        if free.is_empty() {
            return Err(Error::AllDofsFixed);
        }
        let mut rhs = DVector::from_iterator(free.len(), free.iter().map(|&d| self.load[d]));
        let mut coo = CooMatrix::new(free.len(), free.len());
        for (i, j, &v) in self.stiffness.triplet_iter() {
            let ri = reduced_index[i];
            if ri == usize::MAX {
                continue;
            }
            match self.fixed.get(&j) {
                Some(&uj) => rhs[ri] -= v * uj,
                None => coo.push(ri, reduced_index[j], v),
            }
        }
        Ok(ConstrainedSystem {
            system: self,
            free,
            reduced: CscMatrix::from(&coo),
            rhs,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    #[default]
    Cholesky,
    /// Jacobi-preconditioned conjugate gradients.
    ConjugateGradient,
}

pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CellStrain {
    pub element: usize,
    pub centroid: Point,
    pub area: f64,
    /// `(εxx, εyy, γxy)`, constant over the cell.
    pub strain: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: DVector<f64>,
    /// `½ uᵀ K u` with the unreduced stiffness.
    pub strain_energy: f64,
    pub per_cell_strains: Vec<CellStrain>,
    /// `K u − f` at each prescribed dof.
    pub reactions: Vec<(usize, f64)>,
    /// `‖K_ff u_f − f_f‖ / ‖f_f‖` of the reduced system.
    pub relative_residual: f64,
    pub warnings: Vec<Warning>,
}

pub fn solve(constrained: &ConstrainedSystem<'_>, method: LinearSolver) -> Result<Solution> {
    let system = constrained.system;
    let k = &constrained.reduced;
    let f = &constrained.rhs;
    let singular = || Error::SingularSystem {
        free_dofs: constrained.free.len(),
        hint: if system
            .warnings
            .iter()
            .any(|w| matches!(w, Warning::SpuriousModes { .. }))
        {
            "elements carry spurious zero-energy modes (SC1Q4)".into()
        } else {
            "rigid-body motion not suppressed by the prescribed dofs".into()
        },
    };

    let f_norm = f.norm();
    let uf = if f_norm == 0.0 {
        DVector::zeros(f.len())
    } else {
        match method {
            LinearSolver::Cholesky => {
                let chol = CscCholesky::factor(k).map_err(|_| singular())?;
                chol.solve(f).column(0).into_owned()
            }
            LinearSolver::ConjugateGradient => conjugate_gradient(k, f).ok_or_else(singular)?,
        }
    };
    if uf.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    let relative_residual = if f_norm == 0.0 {
        0.0
    } else {
        (k * &uf - f).norm() / f_norm
    };
    if !(relative_residual < RESIDUAL_TOL) {
        return Err(Error::ResidualTooLarge {
            residual: relative_residual,
            tolerance: RESIDUAL_TOL,
        });
    }

    let mut u = DVector::zeros(system.dofs.total_dofs());
    for (&d, &v) in &system.fixed {
        u[d] = v;
    }
    for (r, &d) in constrained.free.iter().enumerate() {
        u[d] = uf[r];
    }
    let ku = &system.stiffness * &u;
    let strain_energy = 0.5 * u.dot(&ku);
    let reactions = system.fixed.keys().map(|&d| (d, ku[d] - system.load[d])).collect();
    let per_cell_strains = system
        .cells
        .iter()
        .map(|c| CellStrain {
            element: c.element,
            centroid: c.cell.centroid(),
            area: c.cell.area,
            strain: c.strain(&u),
        })
        .collect();
    Ok(Solution {
        u,
        strain_energy,
        per_cell_strains,
        reactions,
        relative_residual,
        warnings: system.warnings.clone(),
    })
}

fn conjugate_gradient(k: &CscMatrix<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    let n = f.len();
    let mut diag = DVector::from_element(n, 0.0);
    for (i, j, &v) in k.triplet_iter() {
        if i == j {
            diag[i] += v;
        }
    }
    if diag.iter().any(|&d| !(d > 0.0)) {
        return None;
    }
    let precondition = |r: &DVector<f64>| r.component_div(&diag);
    let mut x = DVector::zeros(n);
    let mut r = f.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let target = 1e-2 * RESIDUAL_TOL * f.norm();
    for _ in 0..(20 * n).max(100) {
        let kp = k * &p;
        let pkp = p.dot(&kp);
        if !(pkp > 0.0) {
            return None;
        }
        let alpha = rz / pkp;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &kp, 1.0);
        if r.norm() < target {
            return Some(x);
        }
        z = precondition(&r);
        let rz_next = r.dot(&z);
        p = &z + &p * (rz_next / rz);
        rz = rz_next;
    }
    None
}
