use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// `l(x, y) = a x + b y + c` with a unit normal `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineEquation {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineEquation {
    #[inline]
    pub fn eval(&self, p: &Point) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    #[inline]
    pub fn gradient(&self) -> Vector2<f64> {
        Vector2::new(self.a, self.b)
    }
}

/// Line through `p` and `q`, positive on the left of the direction `p → q`.
///
/// For a counter-clockwise polygon edge this is the interior side, and
/// `l(x)` is the signed distance from `x` to the edge's line.
pub fn line_through(p: &Point, q: &Point) -> Result<LineEquation> {
    let d = q - p;
    let len = d.norm();
    if len == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let (a, b) = (-d.y / len, d.x / len);
    Ok(LineEquation {
        a,
        b,
        c: -(a * p.x + b * p.y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{midpoint, point};

    #[test]
    fn x_axis() {
        let l = line_through(&point(0.0, 0.0), &point(1.0, 0.0)).unwrap();
        assert_eq!((l.a, l.b, l.c), (0.0, 1.0, 0.0));
    }

    #[test]
    fn parallelogram_side_two_three() {
        let (p, q) = (point(1.0, 0.0), point(1.5, 1.0));
        let l = line_through(&p, &q).unwrap();
        assert!(l.eval(&p).abs() < 1e-15 && l.eval(&q).abs() < 1e-15);
        // -(x - y/2 - 1) / sqrt(5/4)
        let s = 1.25f64.sqrt();
        assert!((l.a + 1.0 / s).abs() < 1e-15);
        assert!((l.b - 0.5 / s).abs() < 1e-15);
        assert!((l.c - 1.0 / s).abs() < 1e-15);
        assert!(l.eval(&point(0.75, 0.5)) > 0.0);
    }

    #[test]
    fn midpoint_lies_on_line() {
        let (p, q) = (point(-3.0, 2.5), point(7.25, -1.0));
        let l = line_through(&p, &q).unwrap();
        assert!(l.eval(&midpoint(&p, &q)).abs() < 1e-14);
        assert!((l.a * l.a + l.b * l.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coincident_points() {
        let p = point(1.0, 1.0);
        assert_eq!(line_through(&p, &p), Err(Error::CoincidentPoints));
    }
}
