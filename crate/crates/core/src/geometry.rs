//! Planar polygon helpers shared by the mesh, shape-function and smoothing code.

use nalgebra::{Point2, Vector2};

pub type Point = Point2<f64>;

#[inline]
pub fn point(x: f64, y: f64) -> Point {
    Point2::new(x, y)
}

#[inline]
pub fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of the triangle (a, b, c); positive when counter-clockwise.
#[inline]
pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * cross(&(b - a), &(c - a))
}

/// Shoelace signed area, taken relative to the first vertex so that small
/// polygons far from the origin keep their precision.
pub fn signed_area(vertices: &[Point]) -> f64 {
    let Some(o) = vertices.first() else {
        return 0.0;
    };
    let twice: f64 = vertices
        .windows(2)
        .skip(1)
        .map(|w| cross(&(w[0] - o), &(w[1] - o)))
        .sum();
    0.5 * twice
}

/// Area centroid of a simple polygon with non-zero area.
pub fn polygon_centroid(vertices: &[Point]) -> Point {
    let o = vertices[0];
    let area = signed_area(vertices);
    let mut c = Vector2::zeros();
    for w in vertices.windows(2).skip(1) {
        let (p, q) = (w[0] - o, w[1] - o);
        c += (p + q) * cross(&p, &q);
    }
    o + c / (6.0 * area)
}

pub fn vertex_average(vertices: &[Point]) -> Point {
    let n = vertices.len() as f64;
    let (sx, sy) = vertices.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    point(sx / n, sy / n)
}

pub fn midpoint(a: &Point, b: &Point) -> Point {
    point(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
}

/// Largest vertex-to-vertex distance.
pub fn diameter(vertices: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in vertices.iter().enumerate() {
        for q in &vertices[i + 1..] {
            d = d.max((q - p).norm());
        }
    }
    d
}

/// True when all turns of the closed polygon have the same sign.
pub fn is_convex(vertices: &[Point]) -> bool {
    let n = vertices.len();
    let mut positive = false;
    let mut negative = false;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let c = &vertices[(i + 2) % n];
        let turn = cross(&(b - a), &(c - b));
        if turn > 0.0 {
            positive = true;
        } else if turn < 0.0 {
            negative = true;
        }
    }
    !(positive && negative)
}

/// Proper or touching intersection of the closed segments [p1, p2] and [q1, q2].
pub fn segments_intersect(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> bool {
    let d1 = triangle_area(q1, q2, p1);
    let d2 = triangle_area(q1, q2, p2);
    let d3 = triangle_area(p1, p2, q1);
    let d4 = triangle_area(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: &Point, b: &Point, c: &Point, d: f64| {
        d == 0.0 && c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// A quadrilateral is simple when neither pair of opposite edges meets.
pub fn quad_is_simple(q: &[Point; 4]) -> bool {
    !segments_intersect(&q[0], &q[1], &q[2], &q[3]) && !segments_intersect(&q[1], &q[2], &q[3], &q[0])
}

/// Distance from `p` to the segment [a, b] and the clamped parameter of the closest point.
pub fn project_on_segment(p: &Point, a: &Point, b: &Point) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let closest = a + ab * t;
    ((p - closest).norm(), t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shoelace_and_centroid_of_unit_square() {
        let sq = [point(0.0, 0.0), point(1.0, 0.0), point(1.0, 1.0), point(0.0, 1.0)];
        assert_eq!(signed_area(&sq), 1.0);
        assert_eq!(polygon_centroid(&sq), point(0.5, 0.5));
        assert!(is_convex(&sq));
        assert!(quad_is_simple(&sq));
    }

    #[test]
    fn bow_tie_is_not_simple() {
        let q = [point(0.0, 0.0), point(1.0, 1.0), point(1.0, 0.0), point(0.0, 1.0)];
        assert!(!quad_is_simple(&q));
    }

    #[test]
    fn projection_clamps() {
        let (d, t) = project_on_segment(&point(2.0, 1.0), &point(0.0, 0.0), &point(1.0, 0.0));
        assert_eq!(t, 1.0);
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }
}
