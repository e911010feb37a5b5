//! Planar primitives: points, bounding boxes, rings, signed area, containment and span.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Boundary tolerance in world units.
pub const EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, other: Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    /// Bit-level key; `-0.0` and `0.0` map to the same key.
    pub(crate) fn key(self) -> (u64, u64) {
        ((self.x + 0.0).to_bits(), (self.y + 0.0).to_bits())
    }

    pub(crate) fn lex_cmp(self, other: Point) -> Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap_or(Ordering::Equal)
            .then(self.y.partial_cmp(&other.y).unwrap_or(Ordering::Equal))
    }
}

#[inline]
pub(crate) fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Distance from `p` to the closed segment `a`-`b`.
pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    let t = t.clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

/// Axis-aligned minimum bounding rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mbr {
    pub lo: Point,
    pub hi: Point,
}

impl Mbr {
    /// Builds the box spanned by two corners, in any order.
    pub fn new(a: Point, b: Point) -> Self {
        Mbr {
            lo: Point::new(a.x.min(b.x), a.y.min(b.y)),
            hi: Point::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    pub fn from_coords(xlo: f64, ylo: f64, xhi: f64, yhi: f64) -> Self {
        Mbr::new(Point::new(xlo, ylo), Point::new(xhi, yhi))
    }

    /// Tight box around `points`; `None` when empty.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut mbr = Mbr { lo: first, hi: first };
        for p in it {
            mbr.lo.x = mbr.lo.x.min(p.x);
            mbr.lo.y = mbr.lo.y.min(p.y);
            mbr.hi.x = mbr.hi.x.max(p.x);
            mbr.hi.y = mbr.hi.y.max(p.y);
        }
        Some(mbr)
    }

    /// Square of side `2 * half` centred at `c`.
    pub fn square(c: Point, half: f64) -> Self {
        Mbr {
            lo: Point::new(c.x - half, c.y - half),
            hi: Point::new(c.x + half, c.y + half),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.lo.x + self.hi.x), 0.5 * (self.lo.y + self.hi.y))
    }

    /// Closed-interval overlap: touching boxes intersect.
    pub fn intersects(&self, other: &Mbr) -> bool {
        self.lo.x <= other.hi.x
            && other.lo.x <= self.hi.x
            && self.lo.y <= other.hi.y
            && other.lo.y <= self.hi.y
    }

    pub fn contains_point(&self, p: Point) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    pub fn contains(&self, other: &Mbr) -> bool {
        other.lo.x >= self.lo.x
            && other.hi.x <= self.hi.x
            && other.lo.y >= self.lo.y
            && other.hi.y <= self.hi.y
    }

    /// `other` lies inside with a margin on every side.
    pub fn contains_strictly(&self, other: &Mbr) -> bool {
        other.lo.x > self.lo.x
            && other.hi.x < self.hi.x
            && other.lo.y > self.lo.y
            && other.hi.y < self.hi.y
    }

    pub fn union(&self, other: &Mbr) -> Mbr {
        Mbr {
            lo: Point::new(self.lo.x.min(other.lo.x), self.lo.y.min(other.lo.y)),
            hi: Point::new(self.hi.x.max(other.hi.x), self.hi.y.max(other.hi.y)),
        }
    }

    pub fn expand(&self, by: f64) -> Mbr {
        Mbr {
            lo: Point::new(self.lo.x - by, self.lo.y - by),
            hi: Point::new(self.hi.x + by, self.hi.y + by),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo.x <= self.hi.x && self.lo.y <= self.hi.y
    }
}

/// Closed-interval MBR overlap test.
pub fn mbr_intersects(a: &Mbr, b: &Mbr) -> bool {
    a.intersects(b)
}

/// Larger side length of a bounding box.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Span(pub f64);

impl Span {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn span_of(b: &Mbr) -> Span {
    let w = b.width();
    let h = b.height();
    Span(if w >= h { w } else { h })
}

/// The original segment an edge was cut from.
///
/// Boolean operations carry these through every split so that output vertices
/// can be rebuilt from the input geometry alone, independent of the order in
/// which operations were applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    /// Stores the endpoints in lexicographic order so direction does not matter.
    pub fn new(p: Point, q: Point) -> Self {
        if p.lex_cmp(q) == Ordering::Greater {
            Segment { a: q, b: p }
        } else {
            Segment { a: p, b: q }
        }
    }

    fn cmp_key(&self, other: &Segment) -> Ordering {
        self.a.lex_cmp(other.a).then(self.b.lex_cmp(other.b))
    }
}

/// Vertex between two consecutive supporting segments.
///
/// A shared endpoint is returned verbatim; otherwise the line intersection is
/// evaluated with the operands in a fixed order. Ill-conditioned cases fall
/// back to `fallback`.
pub(crate) fn canonical_vertex(s1: &Segment, s2: &Segment, fallback: Point) -> Point {
    for p in [s1.a, s1.b] {
        if p == s2.a || p == s2.b {
            return p;
        }
    }
    let (p, q) = if s1.cmp_key(s2) == Ordering::Greater {
        (s2, s1)
    } else {
        (s1, s2)
    };
    let d1x = p.b.x - p.a.x;
    let d1y = p.b.y - p.a.y;
    let d2x = q.b.x - q.a.x;
    let d2y = q.b.y - q.a.y;
    let den = d1x * d2y - d1y * d2x;
    let scale = libm::hypot(d1x, d1y) * libm::hypot(d2x, d2y);
    if den == 0.0 || libm::fabs(den) <= 1e-12 * scale {
        return fallback;
    }
    let t = ((q.a.x - p.a.x) * d2y - (q.a.y - p.a.y) * d2x) / den;
    let v = Point::new(p.a.x + t * d1x, p.a.y + t * d1y);
    if v.is_finite() && v.dist(fallback) <= 1e-7 {
        v
    } else {
        fallback
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    OnBoundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryError {
    NonFinite,
    TooFewVertices(usize),
    ZeroArea,
    NotRectangle,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::NonFinite => write!(f, "polygon has a non-finite coordinate"),
            GeometryError::TooFewVertices(n) => {
                write!(f, "polygon needs at least 3 distinct vertices, got {n}")
            }
            GeometryError::ZeroArea => write!(f, "polygon has zero area"),
            GeometryError::NotRectangle => write!(f, "polygon is not an axis-aligned rectangle"),
        }
    }
}

impl core::error::Error for GeometryError {}

/// A closed ring, stored counterclockwise, with its cached bounding box.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
    supports: Vec<Segment>,
    mbr: Mbr,
}

impl SimplePolygon {
    /// Validates and normalizes a ring.
    ///
    /// Consecutive duplicates (including a repeated closing vertex) are dropped
    /// and the ring is reoriented counterclockwise. Self-intersection is not
    /// checked here; see [`SimplePolygon::is_simple`].
    pub fn new(mut vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let supports = own_supports(&vertices);
        Ok(Self::from_parts(vertices, supports))
    }

    /// Axis-aligned rectangle spanned by two corners.
    pub fn rectangle(mbr: Mbr) -> Result<Self, GeometryError> {
        let Mbr { lo, hi } = mbr;
        SimplePolygon::new(alloc::vec![
            lo,
            Point::new(hi.x, lo.y),
            hi,
            Point::new(lo.x, hi.y),
        ])
    }

    pub(crate) fn from_parts(vertices: Vec<Point>, supports: Vec<Segment>) -> Self {
        debug_assert_eq!(vertices.len(), supports.len());
        let mbr = Mbr::from_points(vertices.iter().copied()).expect("non-empty ring");
        SimplePolygon {
            vertices,
            supports,
            mbr,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub(crate) fn supports(&self) -> &[Segment] {
        &self.supports
    }

    pub fn mbr(&self) -> &Mbr {
        &self.mbr
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        libm::fabs(self.signed_area())
    }

    /// Lexicographically smallest vertex; used as a canonical sort key.
    pub(crate) fn min_vertex(&self) -> Point {
        self.vertices[min_vertex_index(&self.vertices)]
    }

    pub(crate) fn reversed_ring(&self) -> (Vec<Point>, Vec<Segment>) {
        let n = self.vertices.len();
        let pts = self.vertices.iter().rev().copied().collect();
        let sups = (0..n).map(|i| self.supports[(2 * n - 2 - i) % n]).collect();
        (pts, sups)
    }

    pub fn span(&self) -> Span {
        span_of(&self.mbr)
    }

    pub fn contains(&self, pt: Point) -> Containment {
        point_in_polygon(pt, self)
    }

    /// True when the four vertices form an axis-aligned rectangle.
    pub fn is_axis_aligned_rectangle(&self) -> bool {
        if self.vertices.len() != 4 {
            return false;
        }
        let m = self.mbr;
        self.vertices.iter().all(|v| {
            (v.x == m.lo.x || v.x == m.hi.x) && (v.y == m.lo.y || v.y == m.hi.y)
        }) && m.width() > 0.0
            && m.height() > 0.0
    }

    /// No two non-adjacent edges touch and adjacent edges meet only at their
    /// shared vertex. Quadratic in the vertex count.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let v = &self.vertices;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                let (c, d) = (v[j], v[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Folding back onto the previous edge.
                    let shared = if j == i + 1 { b } else { a };
                    let (other_a, other_b) = if j == i + 1 { (a, d) } else { (b, c) };
                    if libm::fabs(cross(shared, other_a, other_b)) <= EPSILON * shared.dist(other_a).max(shared.dist(other_b))
                        && (other_a.x - shared.x) * (other_b.x - shared.x)
                            + (other_a.y - shared.y) * (other_b.y - shared.y)
                            > 0.0
                    {
                        return false;
                    }
                    continue;
                }
                if segments_touch(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

pub(crate) fn own_supports(vertices: &[Point]) -> Vec<Segment> {
    let n = vertices.len();
    (0..n)
        .map(|i| Segment::new(vertices[i], vertices[(i + 1) % n]))
        .collect()
}

/// Shoelace sum, positive for counterclockwise rings.
///
/// Summation starts at the lexicographically smallest vertex, so any rotation
/// of the same cycle yields the same bits.
pub(crate) fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let start = min_vertex_index(v);
    let mut sum = 0.0;
    for k in 0..n {
        let p = v[(start + k) % n];
        let q = v[(start + k + 1) % n];
        sum += p.x * q.y - q.x * p.y;
    }
    0.5 * sum
}

pub(crate) fn min_vertex_index(v: &[Point]) -> usize {
    let mut best = 0;
    for (i, p) in v.iter().enumerate().skip(1) {
        if p.lex_cmp(v[best]) == Ordering::Less {
            best = i;
        }
    }
    best
}

/// Absolute shoelace area.
pub fn polygon_area(p: &SimplePolygon) -> f64 {
    p.area()
}

/// Closed segments `a-b` and `c-d` share at least one point (within `EPSILON`).
pub(crate) fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let ab = Mbr::new(a, b).expand(EPSILON);
    let cd = Mbr::new(c, d).expand(EPSILON);
    if !ab.intersects(&cd) {
        return false;
    }
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    segment_distance(c, a, b) <= EPSILON
        || segment_distance(d, a, b) <= EPSILON
        || segment_distance(a, c, d) <= EPSILON
        || segment_distance(b, c, d) <= EPSILON
}

/// Crossing-number containment for a single ring.
pub(crate) fn ring_containment(pt: Point, v: &[Point]) -> Containment {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = v[j];
        let b = v[i];
        let lo_x = a.x.min(b.x) - EPSILON;
        let hi_x = a.x.max(b.x) + EPSILON;
        let lo_y = a.y.min(b.y) - EPSILON;
        let hi_y = a.y.max(b.y) + EPSILON;
        if pt.x >= lo_x && pt.x <= hi_x && pt.y >= lo_y && pt.y <= hi_y
            && segment_distance(pt, a, b) <= EPSILON
        {
            return Containment::OnBoundary;
        }
        if (b.y > pt.y) != (a.y > pt.y) {
            let x_at = (a.x - b.x) * (pt.y - b.y) / (a.y - b.y) + b.x;
            if pt.x < x_at {
                inside = !inside;
            }
        }
        j = i;
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Ray-crossing point containment with an `EPSILON` boundary band.
pub fn point_in_polygon(pt: Point, p: &SimplePolygon) -> Containment {
    if !p.mbr.expand(EPSILON).contains_point(pt) {
        return Containment::Outside;
    }
    ring_containment(pt, &p.vertices)
}
