//! The three quadrilateral approximations compared by the solver:
//!
//! * [`Scheme::Wachspress`]: rational Wachspress interpolants in physical
//!   coordinates, defined everywhere the adjoint does not vanish;
//! * [`Scheme::Averaged`]: tabulated site values, linear along the
//!   smoothing-cell skeleton, defined only on that skeleton;
//! * [`Scheme::Lagrange`]: non-mapped `{1, x, y, xy}` interpolation, which
//!   may fail to exist and may go negative.

mod averaged;
mod lagrange;
mod line;
mod wachspress;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::Subdivision;

pub use averaged::{build_averaged, eval_averaged, AveragedBasis, SITE_VALUES};
pub use lagrange::{build_lagrange, LagrangeBasis};
pub use line::{line_through, LineEquation};
pub use wachspress::{build_wachspress, WachspressBasis};

/// `N_1 .. N_4` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeValues {
    pub n: [f64; 4],
}

impl ShapeValues {
    pub fn sum(&self) -> f64 {
        self.n.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.n.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ N_i x_i` for nodal values `x_i`.
    pub fn interpolate(&self, nodal: &[f64; 4]) -> f64 {
        self.n.iter().zip(nodal).map(|(n, v)| n * v).sum()
    }
}

pub trait ShapeFunctions {
    fn values(&self, p: &Point) -> Result<ShapeValues>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Wachspress,
    Averaged,
    Lagrange,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Self::Wachspress, Self::Averaged, Self::Lagrange];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Wachspress => "wachspress",
            Self::Averaged => "averaged",
            Self::Lagrange => "lagrange",
        }
    }

    /// Gauss points per smoothing-cell segment used unless overridden.
    pub fn default_quadrature(&self) -> usize {
        match self {
            Self::Averaged => 1,
            Self::Wachspress | Self::Lagrange => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown scheme `{s}`")))
    }
}

/// A scheme instantiated on one element.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementBasis {
    Wachspress(WachspressBasis),
    Averaged(AveragedBasis),
    Lagrange(LagrangeBasis),
}

impl ElementBasis {
    /// The subdivision only matters for the averaged scheme, whose domain is
    /// the cell skeleton.
    pub fn new(scheme: Scheme, quad: &[Point; 4], subdivision: Subdivision) -> Result<Self> {
        Ok(match scheme {
            Scheme::Wachspress => Self::Wachspress(build_wachspress(quad)?),
            Scheme::Averaged => Self::Averaged(build_averaged(quad, subdivision)),
            Scheme::Lagrange => Self::Lagrange(build_lagrange(quad)?),
        })
    }
}

impl ShapeFunctions for ElementBasis {
    fn values(&self, p: &Point) -> Result<ShapeValues> {
        match self {
            Self::Wachspress(b) => b.values(p),
            Self::Averaged(b) => b.values(p),
            Self::Lagrange(b) => b.values(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("bilinear".parse::<Scheme>().is_err());
    }
}
