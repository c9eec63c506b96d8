//! Structured quadrilateral meshes, random interior-node distortion and the
//! smoothing-cell subdivisions used by the SCkQ4 family.
//!
//! Nodes and elements are numbered from zero. Element nodes are stored
//! counter-clockwise and local edge `i` runs from local node `i` to `i + 1`
//! (mod 4). Sites of the averaged scheme follow the element numbering: the
//! midpoint of local edge `i` and the bimedian intersection.

mod io;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{self, midpoint, point, Point};

pub use io::{read_mesh, write_mesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl Node {
    pub fn point(&self) -> Point {
        point(self.x, self.y)
    }
}

/// Four node indices, counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quad4Element {
    pub node_ids: [usize; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    Left,
    Right,
    Top,
    Bottom,
}

impl BoundaryTag {
    pub const ALL: [BoundaryTag; 4] = [Self::Left, Self::Right, Self::Top, Self::Bottom];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Left => "left",
            Self::Right => "right",
            Self::Top => "top",
            Self::Bottom => "bottom",
        }
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown boundary tag `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub element: usize,
    pub local_edge: usize,
    pub tag: BoundaryTag,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<Quad4Element>,
    pub boundary_edges: Vec<BoundaryEdge>,
}

impl Mesh {
    /// Checks the structural invariants: node ids match positions, element
    /// nodes are in range and distinct, every element has positive area, and
    /// every boundary edge is used by exactly one element.
    pub fn validate(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::InvalidInput(format!("node at position {i} has id {}", node.id)));
            }
            if !node.x.is_finite() || !node.y.is_finite() {
                return Err(Error::InvalidInput(format!("node {i} has non-finite coordinates")));
            }
        }
        let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, el) in self.elements.iter().enumerate() {
            let ids = el.node_ids;
            if ids.iter().any(|&n| n >= self.nodes.len()) {
                return Err(Error::InvalidInput(format!("element {e} references a missing node")));
            }
            if (0..4).any(|i| (i + 1..4).any(|j| ids[i] == ids[j])) {
                return Err(Error::InvalidInput(format!("element {e} repeats a node")));
            }
            element_geometry(&self.element_points(e)).map_err(|err| err.in_element(e))?;
            for i in 0..4 {
                *edge_use.entry(edge_key(ids[i], ids[(i + 1) % 4])).or_default() += 1;
            }
        }
        for b in &self.boundary_edges {
            if b.element >= self.elements.len() || b.local_edge >= 4 {
                return Err(Error::InvalidInput(format!(
                    "boundary edge ({}, {}) out of range",
                    b.element, b.local_edge
                )));
            }
            let ids = self.elements[b.element].node_ids;
            let key = edge_key(ids[b.local_edge], ids[(b.local_edge + 1) % 4]);
            if edge_use.get(&key) != Some(&1) {
                return Err(Error::InvalidInput(format!(
                    "boundary edge ({}, {}) is shared by several elements",
                    b.element, b.local_edge
                )));
            }
        }
        Ok(())
    }

    pub fn element_points(&self, element: usize) -> [Point; 4] {
        self.elements[element].node_ids.map(|n| self.nodes[n].point())
    }

    /// The two node ids of a boundary edge, in element (counter-clockwise) order.
    pub fn edge_nodes(&self, edge: &BoundaryEdge) -> [usize; 2] {
        let ids = self.elements[edge.element].node_ids;
        [ids[edge.local_edge], ids[(edge.local_edge + 1) % 4]]
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(move |b| b.tag == tag)
    }

    /// Sorted ids of the nodes lying on edges with `tag`.
    pub fn nodes_with_tag(&self, tag: BoundaryTag) -> Vec<usize> {
        let set: BTreeSet<usize> = self.edges_with_tag(tag).flat_map(|b| self.edge_nodes(b)).collect();
        set.into_iter().collect()
    }

    pub fn boundary_nodes(&self) -> BTreeSet<usize> {
        self.boundary_edges.iter().flat_map(|b| self.edge_nodes(b)).collect()
    }

    /// Elements that are simple but not convex.
    pub fn concave_elements(&self) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&e| !geometry::is_convex(&self.element_points(e)))
            .collect()
    }

    /// Fails with [`Error::InvalidElement`] on the first element whose
    /// smoothing cells under `subdivision` do not all have positive area.
    /// Strongly concave quads can fold a bimedian cell even though the quad
    /// itself is simple.
    pub fn check_smoothing_cells(&self, subdivision: Subdivision) -> Result<()> {
        for e in 0..self.elements.len() {
            if self.subdivide_element(e, subdivision).iter().any(|c| !(c.area > 0.0)) {
                return Err(Error::InvalidElement { element: e });
            }
        }
        Ok(())
    }

    pub fn subdivide_element(&self, element: usize, subdivision: Subdivision) -> Vec<SmoothingCell> {
        subdivide(&self.element_points(element), subdivision, element)
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Regular `nx` × `ny` grid over `[0, length] × [-height/2, height/2]`.
///
/// Node `j * (nx + 1) + i` sits at column `i`, row `j`; element `j * nx + i`
/// has its first node at the lower-left corner.
pub fn generate_structured_mesh(nx: usize, ny: usize, length: f64, height: f64) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidInput("nx and ny must be at least 1".into()));
    }
    if !(length > 0.0 && height > 0.0 && length.is_finite() && height.is_finite()) {
        return Err(Error::InvalidInput("length and height must be positive".into()));
    }
    let dx = length / nx as f64;
    let dy = height / ny as f64;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        // snap the last row/column so the domain corners are exact
        let y = if j == ny {
            0.5 * height
        } else {
            -0.5 * height + j as f64 * dy
        };
        for i in 0..=nx {
            let x = if i == nx { length } else { i as f64 * dx };
            nodes.push(Node { id: nodes.len(), x, y });
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(nx * ny);
    let mut boundary_edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let e = elements.len();
            elements.push(Quad4Element {
                node_ids: [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
            });
            let mut tag = |local_edge, tag| {
                boundary_edges.push(BoundaryEdge {
                    element: e,
                    local_edge,
                    tag,
                })
            };
            if j == 0 {
                tag(0, BoundaryTag::Bottom);
            }
            if i == nx - 1 {
                tag(1, BoundaryTag::Right);
            }
            if j == ny - 1 {
                tag(2, BoundaryTag::Top);
            }
            if i == 0 {
                tag(3, BoundaryTag::Left);
            }
        }
    }
    Ok(Mesh {
        nodes,
        elements,
        boundary_edges,
    })
}

/// Amplitude and seed of the random interior-node perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionSpec {
    alpha_ir: f64,
    seed: u64,
}

impl DistortionSpec {
    pub const MAX_ALPHA: f64 = 0.5;

    pub fn new(alpha_ir: f64, seed: u64) -> Result<Self> {
        if !(0.0..=Self::MAX_ALPHA).contains(&alpha_ir) {
            return Err(Error::InvalidInput(format!(
                "irregularity factor {alpha_ir} outside [0, 0.5]"
            )));
        }
        Ok(Self { alpha_ir, seed })
    }

    pub fn alpha_ir(&self) -> f64 {
        self.alpha_ir
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Moves every interior node by `(2r - 1) * alpha_ir * (dx, dy)` with an
/// independent `r` in `[0, 1)` per axis.
///
/// Draws come from ChaCha8 seeded with `spec.seed()`, in increasing node id
/// order, x before y; boundary nodes consume no draws. Fails with
/// [`Error::InvalidElement`] on the first element that is inverted or
/// self-intersecting afterwards. Concave elements are accepted.
pub fn distort_mesh(mesh: &Mesh, spec: &DistortionSpec, dx: f64, dy: f64) -> Result<Mesh> {
    if !(dx > 0.0 && dy > 0.0) {
        return Err(Error::InvalidInput("element sizes must be positive".into()));
    }
    let mut out = mesh.clone();
    if spec.alpha_ir == 0.0 {
        return Ok(out);
    }
    let boundary = mesh.boundary_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for node in out.nodes.iter_mut().filter(|n| !boundary.contains(&n.id)) {
        let rx: f64 = rng.random();
        let ry: f64 = rng.random();
        node.x += (2.0 * rx - 1.0) * spec.alpha_ir * dx;
        node.y += (2.0 * ry - 1.0) * spec.alpha_ir * dy;
    }
    for e in 0..out.elements.len() {
        let q = out.element_points(e);
        if geometry::signed_area(&q) <= 0.0 || !geometry::quad_is_simple(&q) {
            return Err(Error::InvalidElement { element: e });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub centroid: Point,
    pub is_convex: bool,
}

pub fn element_geometry(quad: &[Point; 4]) -> Result<ElementGeometry> {
    let area = geometry::signed_area(quad);
    if !(area > 0.0) {
        return Err(Error::DegenerateElement { area });
    }
    Ok(ElementGeometry {
        area,
        centroid: geometry::polygon_centroid(quad),
        is_convex: geometry::is_convex(quad),
    })
}

/// Which bimedian splits an element into two smoothing cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sc2Split {
    /// Midpoint of edge 1-2 to midpoint of edge 3-4.
    #[default]
    Edge12To34,
    /// Midpoint of edge 2-3 to midpoint of edge 4-1.
    Edge23To41,
}

impl fmt::Display for Sc2Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Edge12To34 => "12-34",
            Self::Edge23To41 => "23-41",
        })
    }
}

impl FromStr for Sc2Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "12-34" => Ok(Self::Edge12To34),
            "23-41" => Ok(Self::Edge23To41),
            _ => Err(Error::InvalidInput(format!("unknown SC2 split `{s}` (12-34 or 23-41)"))),
        }
    }
}

/// Number and layout of smoothing cells per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subdivision {
    Single,
    Halves(Sc2Split),
    Quarters,
}

impl Subdivision {
    pub fn from_count(k: usize, split: Sc2Split) -> Result<Self> {
        match k {
            1 => Ok(Self::Single),
            2 => Ok(Self::Halves(split)),
            4 => Ok(Self::Quarters),
            _ => Err(Error::UnsupportedSubdivision(k)),
        }
    }

    pub fn count(&self) -> usize {
        match self {
            Self::Single => 1,
            Self::Halves(_) => 2,
            Self::Quarters => 4,
        }
    }
}

impl fmt::Display for Subdivision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SC{}Q4", self.count())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingCell {
    /// Counter-clockwise.
    pub vertices: Vec<Point>,
    pub area: f64,
    pub parent_element: usize,
}

impl SmoothingCell {
    pub fn new(vertices: Vec<Point>, parent_element: usize) -> Self {
        let area = geometry::signed_area(&vertices);
        Self {
            vertices,
            area,
            parent_element,
        }
    }

    pub fn centroid(&self) -> Point {
        geometry::polygon_centroid(&self.vertices)
    }

    /// Boundary segments in counter-clockwise order.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// The nine averaged-scheme sites of a quad: four nodes, four edge midpoints
/// (edge `i` from node `i` to `i + 1`) and the bimedian intersection.
pub fn quad_sites(quad: &[Point; 4]) -> [Point; 9] {
    let m = |i: usize| midpoint(&quad[i], &quad[(i + 1) % 4]);
    [
        quad[0],
        quad[1],
        quad[2],
        quad[3],
        m(0),
        m(1),
        m(2),
        m(3),
        geometry::vertex_average(quad),
    ]
}

/// Splits a quad into smoothing cells. Quarters use both bimedians; halves
/// use the one selected by the [`Sc2Split`].
pub fn subdivide(quad: &[Point; 4], subdivision: Subdivision, parent: usize) -> Vec<SmoothingCell> {
    let [n1, n2, n3, n4, s5, s6, s7, s8, s9] = quad_sites(quad);
    let cells = match subdivision {
        Subdivision::Single => vec![vec![n1, n2, n3, n4]],
        Subdivision::Halves(Sc2Split::Edge12To34) => vec![vec![n1, s5, s7, n4], vec![s5, n2, n3, s7]],
        Subdivision::Halves(Sc2Split::Edge23To41) => vec![vec![n1, n2, s6, s8], vec![s8, s6, n3, n4]],
        Subdivision::Quarters => vec![
            vec![n1, s5, s9, s8],
            vec![s5, n2, s6, s9],
            vec![s9, s6, n3, s7],
            vec![s8, s9, s7, n4],
        ],
    };
    cells.into_iter().map(|v| SmoothingCell::new(v, parent)).collect()
}
