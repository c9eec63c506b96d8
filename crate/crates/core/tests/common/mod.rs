//! Random quads and invariant checks shared by the property tests and the
//! acceptance runner. Each check returns a description of the first
//! violation it finds.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, SMatrix, Vector2, Vector3};
use rand::Rng;
use sfem_core::geometry::{diameter, is_convex, signed_area};
use sfem_core::mesh::{subdivide, Sc2Split, Subdivision};
use sfem_core::prelude::*;
use sfem_core::shapefn::build_wachspress;
use sfem_core::smoothing::smoothed_b;

pub type Check = Result<(), String>;

pub const SUBDIVISIONS: [Subdivision; 4] = [
    Subdivision::Single,
    Subdivision::Halves(Sc2Split::Edge12To34),
    Subdivision::Halves(Sc2Split::Edge23To41),
    Subdivision::Quarters,
];

/// Parameters of a convex quad: a perturbed square inscribed in a circle,
/// stretched, rotated and moved.
#[derive(Debug, Clone, Copy)]
pub struct QuadParams {
    pub angle_offsets: [f64; 4],
    pub radii: [f64; 4],
    pub rotation: f64,
    pub stretch: f64,
    pub scale: f64,
    pub shift: [f64; 2],
}

impl QuadParams {
    pub fn sample(rng: &mut impl Rng) -> Self {
        Self {
            angle_offsets: std::array::from_fn(|_| rng.random_range(-0.6..0.6)),
            radii: std::array::from_fn(|_| rng.random_range(0.4..1.6)),
            rotation: rng.random_range(0.0..std::f64::consts::TAU),
            stretch: rng.random_range(0.3..3.0),
            scale: 10f64.powf(rng.random_range(-2.0..2.0)),
            shift: [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)],
        }
    }

    pub fn quad(&self) -> [Point; 4] {
        let (s, c) = self.rotation.sin_cos();
        std::array::from_fn(|i| {
            let t = i as f64 * FRAC_PI_2 + self.angle_offsets[i];
            let (x, y) = (self.radii[i] * t.cos() * self.stretch, self.radii[i] * t.sin());
            point(
                self.scale * (c * x - s * y) + self.shift[0],
                self.scale * (s * x + c * y) + self.shift[1],
            )
        })
    }
}

/// Convex with every interior angle in [0.15, π − 0.15].
pub fn well_shaped(q: &[Point; 4]) -> bool {
    if !is_convex(q) || signed_area(q) <= 0.0 {
        return false;
    }
    (0..4).all(|i| {
        let a = q[(i + 3) % 4] - q[i];
        let b = q[(i + 1) % 4] - q[i];
        let angle = (a.dot(&b) / (a.norm() * b.norm())).acos();
        (0.15..=std::f64::consts::PI - 0.15).contains(&angle)
    })
}

pub fn random_convex_quad(rng: &mut impl Rng) -> [Point; 4] {
    loop {
        let q = QuadParams::sample(rng).quad();
        if well_shaped(&q) {
            return q;
        }
    }
}

/// Axis-aligned rectangle with corner `(x0, y0)`.
pub fn rectangle(x0: f64, y0: f64, w: f64, h: f64) -> [Point; 4] {
    [
        point(x0, y0),
        point(x0 + w, y0),
        point(x0 + w, y0 + h),
        point(x0, y0 + h),
    ]
}

/// Image of `(s, t)` in the unit square under the bilinear map; interior
/// for convex quads.
pub fn bilinear_point(q: &[Point; 4], s: f64, t: f64) -> Point {
    let w = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
    Point::from((0..4).fold(Vector2::zeros(), |acc, i| acc + q[i].coords * w[i]))
}

pub fn interior_points(q: &[Point; 4], count: usize, rng: &mut impl Rng) -> Vec<Point> {
    (0..count)
        .map(|_| bilinear_point(q, rng.random_range(0.001..0.999), rng.random_range(0.001..0.999)))
        .collect()
}

fn fail(what: &str, q: &[Point; 4], detail: String) -> Check {
    Err(format!("{what} on {q:?}: {detail}"))
}

pub fn check_partition_of_unity(q: &[Point; 4], points: &[Point]) -> Check {
    for scheme in [Scheme::Wachspress, Scheme::Lagrange] {
        let basis = match ElementBasis::new(scheme, q, Subdivision::Quarters) {
            Ok(b) => b,
            Err(Error::NonExistent { .. }) if scheme == Scheme::Lagrange => continue,
            Err(e) => return fail("partition of unity", q, e.to_string()),
        };
        for p in points {
            let s = basis.values(p).map_err(|e| e.to_string())?.sum();
            if (s - 1.0).abs() >= 1e-12 {
                return fail("partition of unity", q, format!("{scheme} sums to {s} at {p}"));
            }
        }
    }
    Ok(())
}

pub fn check_kronecker(q: &[Point; 4]) -> Check {
    for scheme in Scheme::ALL {
        let basis = match ElementBasis::new(scheme, q, Subdivision::Quarters) {
            Ok(b) => b,
            Err(Error::NonExistent { .. }) if scheme == Scheme::Lagrange => continue,
            Err(e) => return fail("Kronecker delta", q, e.to_string()),
        };
        for (j, node) in q.iter().enumerate() {
            let n = basis.values(node).map_err(|e| e.to_string())?.n;
            for (i, v) in n.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (v - expected).abs() >= 1e-12 {
                    return fail(
                        "Kronecker delta",
                        q,
                        format!("{scheme}: N{}(node {}) = {v}", i + 1, j + 1),
                    );
                }
            }
        }
    }
    Ok(())
}

/// Adjacent-node functions must match the chord through their end values
/// and the other two must vanish.
pub fn check_edge_linearity(q: &[Point; 4]) -> Check {
    let basis = build_wachspress(q).map_err(|e| e.to_string())?;
    for side in 0..4 {
        let (a, b) = (side, (side + 1) % 4);
        for step in 1..20 {
            let t = step as f64 / 20.0;
            let n = basis.values(&(q[a] + (q[b] - q[a]) * t)).map_err(|e| e.to_string())?.n;
            let dev = (n[a] - (1.0 - t)).abs().max((n[b] - t).abs());
            if dev >= 1e-10 {
                return fail("edge linearity", q, format!("side {side}, t = {t}: deviation {dev:e}"));
            }
            for other in (0..4).filter(|i| *i != a && *i != b) {
                if n[other].abs() >= 1e-12 {
                    return fail(
                        "edge linearity",
                        q,
                        format!("side {side}: N{} = {:e}", other + 1, n[other]),
                    );
                }
            }
        }
    }
    Ok(())
}

pub fn check_linear_completeness(q: &[Point; 4], points: &[Point]) -> Check {
    let basis = build_wachspress(q).map_err(|e| e.to_string())?;
    // relative to element size so the check is scale free
    let h = diameter(q);
    for p in points {
        let n = basis.values(p).map_err(|e| e.to_string())?.n;
        let x = (0..4).fold(Vector2::zeros(), |acc, i| acc + q[i].coords * n[i]);
        let err = (x - p.coords).norm() / h;
        if err >= 1e-10 {
            return fail("linear completeness", q, format!("error {err:e} at {p}"));
        }
    }
    Ok(())
}

pub fn check_positivity(q: &[Point; 4], points: &[Point]) -> Check {
    let basis = build_wachspress(q).map_err(|e| e.to_string())?;
    for p in points {
        let m = basis.values(p).map_err(|e| e.to_string())?.min();
        if m < -1e-12 {
            return fail("positivity", q, format!("min N = {m:e} at {p}"));
        }
    }
    Ok(())
}

pub fn check_gradients(q: &[Point; 4], points: &[Point]) -> Check {
    let basis = build_wachspress(q).map_err(|e| e.to_string())?;
    let h = 1e-6 * diameter(q);
    for p in points {
        let g = basis.gradients(p).map_err(|e| e.to_string())?;
        let scale = g.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (axis, d) in [Vector2::new(h, 0.0), Vector2::new(0.0, h)].into_iter().enumerate() {
            let plus = basis.values(&(p + d)).map_err(|e| e.to_string())?.n;
            let minus = basis.values(&(p - d)).map_err(|e| e.to_string())?.n;
            for i in 0..4 {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                let rel = (fd - g[i][axis]).abs() / scale;
                if rel >= 1e-6 {
                    return fail(
                        "gradient",
                        q,
                        format!("dN{}/d{} at {p}: relative error {rel:e}", i + 1, ["x", "y"][axis]),
                    );
                }
            }
        }
    }
    Ok(())
}

pub fn check_cell_closure(q: &[Point; 4]) -> Check {
    let h = diameter(q);
    for sub in SUBDIVISIONS {
        for cell in subdivide(q, sub, 0) {
            let closure = cell
                .segments()
                .fold(Vector2::zeros(), |acc, (a, b)| acc + Vector2::new(b.y - a.y, a.x - b.x));
            if closure.norm() > 1e-14 * h {
                return fail("normal closure", q, format!("{sub}: |∮ n dΓ| = {:e}", closure.norm()));
            }
        }
        let cells: f64 = subdivide(q, sub, 0).iter().map(|c| c.area).sum();
        let area = signed_area(q);
        if ((cells - area) / area).abs() >= 1e-12 {
            return fail("tiling", q, format!("{sub}: cells {cells} vs element {area}"));
        }
    }
    Ok(())
}

fn nodal(q: &[Point; 4], f: impl Fn(&Point) -> Vector2<f64>) -> [f64; 8] {
    let mut u = [0.0; 8];
    for (i, p) in q.iter().enumerate() {
        let v = f(p);
        u[2 * i] = v.x;
        u[2 * i + 1] = v.y;
    }
    u
}

/// Smoothed strains of affine fields equal the exact constant strain.
pub fn check_linear_field(q: &[Point; 4], grad: &Matrix2<f64>) -> Check {
    let basis = ElementBasis::new(Scheme::Wachspress, q, Subdivision::Quarters).map_err(|e| e.to_string())?;
    let u = nodal(q, |p| grad * p.coords + Vector2::new(0.3, -0.7));
    let exact = Vector3::new(grad[(0, 0)], grad[(1, 1)], grad[(0, 1)] + grad[(1, 0)]);
    for cell in subdivide(q, Subdivision::Quarters, 0) {
        let b = smoothed_b(&cell, &basis, 2).map_err(|e| e.to_string())?;
        let err = (b.strain(&u) - exact).norm() / grad.norm().max(1.0);
        if err >= 1e-10 {
            return fail("linear-field reproduction", q, format!("relative strain error {err:e}"));
        }
    }
    Ok(())
}

/// Symmetry, rank 5 and the three rigid modes for SC2Q4 and SC4Q4.
pub fn check_stiffness(q: &[Point; 4], material: &Material) -> Check {
    let rigid = [
        nodal(q, |_| Vector2::new(1.0, 0.0)),
        nodal(q, |_| Vector2::new(0.0, 1.0)),
        nodal(q, |p| Vector2::new(-p.y, p.x)),
    ];
    for sub in [Subdivision::Halves(Sc2Split::Edge12To34), Subdivision::Quarters] {
        for scheme in [Scheme::Wachspress, Scheme::Averaged] {
            let ke = element_stiffness(q, 0, &Discretization::new(scheme, sub), material).map_err(|e| e.to_string())?;
            let norm = ke.k.norm();
            let asym = (ke.k - ke.k.transpose()).norm() / norm;
            if asym >= 1e-12 {
                return fail("stiffness symmetry", q, format!("{scheme} {sub}: {asym:e}"));
            }
            if ke.rank != 5 {
                return fail("stiffness rank", q, format!("{scheme} {sub}: rank {}", ke.rank));
            }
            for r in &rigid {
                let r = SMatrix::<f64, 8, 1>::from_column_slice(r);
                let res = (ke.k * r).norm() / (norm * r.norm());
                if res >= 1e-12 {
                    return fail("rigid-body null space", q, format!("{scheme} {sub}: |K r| = {res:e}"));
                }
            }
        }
    }
    Ok(())
}

/// Schemes A and C agree pointwise and A, B, C give the same stiffness.
pub fn check_rectangle(q: &[Point; 4], points: &[Point], material: &Material) -> Check {
    let a = ElementBasis::new(Scheme::Wachspress, q, Subdivision::Quarters).map_err(|e| e.to_string())?;
    let c = ElementBasis::new(Scheme::Lagrange, q, Subdivision::Quarters).map_err(|e| e.to_string())?;
    for p in points {
        let (na, nc) = (a.values(p).unwrap().n, c.values(p).unwrap().n);
        let d = (0..4).map(|i| (na[i] - nc[i]).abs()).fold(0.0, f64::max);
        if d >= 1e-12 {
            return fail("rectangle degeneracy", q, format!("A and C differ by {d:e} at {p}"));
        }
    }
    for sub in SUBDIVISIONS {
        let k = |s: Scheme| {
            element_stiffness(q, 0, &Discretization::new(s, sub), material)
                .map(|ke| ke.k)
                .map_err(|e| e.to_string())
        };
        let (ka, kb, kc) = (k(Scheme::Wachspress)?, k(Scheme::Averaged)?, k(Scheme::Lagrange)?);
        let rel = (ka - kb).norm().max((ka - kc).norm()) / ka.norm();
        if rel >= 1e-10 {
            return fail("rectangle stiffness", q, format!("{sub}: schemes differ by {rel:e}"));
        }
    }
    Ok(())
}

pub fn unit_material() -> Material {
    Material::plane_stress(1.0, 0.3, 1.0).unwrap()
}

pub fn random_gradient(rng: &mut impl Rng) -> Matrix2<f64> {
    Matrix2::from_fn(|_, _| rng.random_range(-1.0..1.0))
}
