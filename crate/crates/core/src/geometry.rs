//! Closed polygons in the plane: distance, even-odd containment with a
//! boundary band, simplicity and symmetry checks.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Where a point sits relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    OnBoundary,
    Outside,
}

/// Closed polygon stored as its vertex loop (the closing edge is implicit).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<S> {
    vertices: Vec<[S; 2]>,
}

impl<S: Real> Polygon<S> {
    pub fn new(mut vertices: Vec<[S; 2]>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::DegeneratePolygon("fewer than three vertices"));
        }
        if vertices
            .iter()
            .any(|v| !(v[0].is_finite() && v[1].is_finite()))
        {
            return Err(Error::DegeneratePolygon("non-finite vertex"));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[[S; 2]] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` pairs including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = ([S; 2], [S; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Signed area, positive for counterclockwise orientation.
    pub fn signed_area(&self) -> S {
        let two: S = lit(2.0);
        self.edges()
            .fold(S::zero(), |acc, (a, b)| acc + (a[0] * b[1] - b[0] * a[1]))
            / two
    }

    /// Euclidean distance from `pt` to the polygon boundary.
    pub fn boundary_distance(&self, pt: [S; 2]) -> S {
        self.edges()
            .map(|(a, b)| segment_distance(pt, a, b))
            .fold(S::infinity(), S::min)
    }

    /// Even-odd ray casting.
    pub fn contains(&self, pt: [S; 2]) -> bool {
        let [px, py] = pt;
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > py) != (b[1] > py) {
                let x = a[0] + (py - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if px < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Classifies `pt`, treating everything within `band` of an edge as on
    /// the boundary.
    pub fn classify(&self, pt: [S; 2], band: S) -> Location {
        if self.boundary_distance(pt) <= band {
            Location::OnBoundary
        } else if self.contains(pt) {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Signed distance: negative inside, positive outside.
    pub fn signed_distance(&self, pt: [S; 2]) -> S {
        let d = self.boundary_distance(pt);
        if self.contains(pt) {
            -d
        } else {
            d
        }
    }

    /// True when no two non-adjacent edges intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        let boxes: Vec<_> = edges
            .iter()
            .map(|(a, b)| {
                (
                    a[0].min(b[0]),
                    a[0].max(b[0]),
                    a[1].min(b[1]),
                    a[1].max(b[1]),
                )
            })
            .collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (bi, bj) = (boxes[i], boxes[j]);
                if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return false;
                }
            }
        }
        true
    }

    /// Largest distance from a reflected vertex `(-x, y)` to the boundary.
    pub fn mirror_defect(&self) -> S {
        self.vertices
            .iter()
            .map(|v| self.boundary_distance([-v[0], v[1]]))
            .fold(S::zero(), S::max)
    }

    /// Symmetric vertex-to-boundary Hausdorff distance.
    pub fn hausdorff(&self, other: &Polygon<S>) -> S {
        let one = self
            .vertices
            .iter()
            .map(|&v| other.boundary_distance(v))
            .fold(S::zero(), S::max);
        let two = other
            .vertices
            .iter()
            .map(|&v| self.boundary_distance(v))
            .fold(S::zero(), S::max);
        one.max(two)
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance<S: Real>(p: [S; 2], a: [S; 2], b: [S; 2]) -> S {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > S::zero() {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2)
            .max(S::zero())
            .min(S::one())
    } else {
        S::zero()
    };
    let (qx, qy) = (a[0] + t * dx, a[1] + t * dy);
    (p[0] - qx).hypot(p[1] - qy)
}

fn orient<S: Real>(a: [S; 2], b: [S; 2], c: [S; 2]) -> S {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment<S: Real>(a: [S; 2], b: [S; 2], p: [S; 2]) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test.
pub fn segments_intersect<S: Real>(p1: [S; 2], p2: [S; 2], q1: [S; 2], q2: [S; 2]) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    let z = S::zero();
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(q1, q2, p1))
        || (d2 == z && on_segment(q1, q2, p2))
        || (d3 == z && on_segment(p1, p2, q1))
        || (d4 == z && on_segment(p1, p2, q2))
}
