//! Averaged shape functions: fixed values at the nine sites of a quad
//! (nodes, side midpoints, bimedian intersection), interpolated linearly
//! along the smoothing-cell skeleton between sites and undefined elsewhere.

use super::{ShapeFunctions, ShapeValues};
use crate::error::{Error, Result};
use crate::geometry::{diameter, project_on_segment, Point};
use crate::mesh::{quad_sites, Sc2Split, Subdivision};

/// Shape-function values at the nine sites, in site order.
pub const SITE_VALUES: [[f64; 4]; 9] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.5, 0.5, 0.0, 0.0],
    [0.0, 0.5, 0.5, 0.0],
    [0.0, 0.0, 0.5, 0.5],
    [0.5, 0.0, 0.0, 0.5],
    [0.25, 0.25, 0.25, 0.25],
];

const SKELETON_TOL: f64 = 1e-10;

const SIDE_SEGMENTS: [(usize, usize); 8] = [(0, 4), (4, 1), (1, 5), (5, 2), (2, 6), (6, 3), (3, 7), (7, 0)];
const BIMEDIAN_12_34: [(usize, usize); 2] = [(4, 8), (8, 6)];
const BIMEDIAN_23_41: [(usize, usize); 2] = [(5, 8), (8, 7)];

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedBasis {
    sites: [Point; 9],
    segments: Vec<(usize, usize)>,
    tolerance: f64,
}

pub fn build_averaged(quad: &[Point; 4], subdivision: Subdivision) -> AveragedBasis {
    let mut segments = SIDE_SEGMENTS.to_vec();
    match subdivision {
        Subdivision::Single => {}
        Subdivision::Halves(Sc2Split::Edge12To34) => segments.extend(BIMEDIAN_12_34),
        Subdivision::Halves(Sc2Split::Edge23To41) => segments.extend(BIMEDIAN_23_41),
        Subdivision::Quarters => {
            segments.extend(BIMEDIAN_12_34);
            segments.extend(BIMEDIAN_23_41);
        }
    }
    AveragedBasis {
        sites: quad_sites(quad),
        segments,
        tolerance: SKELETON_TOL * diameter(quad),
    }
}

/// One-shot evaluation of the averaged scheme at `p`.
pub fn eval_averaged(quad: &[Point; 4], subdivision: Subdivision, p: &Point) -> Result<ShapeValues> {
    build_averaged(quad, subdivision).values(p)
}

impl AveragedBasis {
    pub fn sites(&self) -> &[Point; 9] {
        &self.sites
    }
}

impl ShapeFunctions for AveragedBasis {
    fn values(&self, p: &Point) -> Result<ShapeValues> {
        for &(a, b) in &self.segments {
            for site in [a, b] {
                if (p - self.sites[site]).norm() <= self.tolerance {
                    return Ok(ShapeValues { n: SITE_VALUES[site] });
                }
            }
        }
        for &(a, b) in &self.segments {
            let (dist, t) = project_on_segment(p, &self.sites[a], &self.sites[b]);
            if dist <= self.tolerance {
                let (va, vb) = (SITE_VALUES[a], SITE_VALUES[b]);
                return Ok(ShapeValues {
                    n: std::array::from_fn(|i| (1.0 - t) * va[i] + t * vb[i]),
                });
            }
        }
        Err(Error::OffSkeleton { x: p.x, y: p.y })
    }
}
