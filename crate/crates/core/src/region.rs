//! Regions with holes and the boolean operations that produce them.
//!
//! A [`Region`] is one outer ring plus any number of hole rings. Set
//! difference and intersection can split a region into several pieces, so
//! both return a [`RegionSet`] of interior-disjoint subdivisions.

use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{
    point_in_polygon, Containment, GeometryError, Mbr, Point, SimplePolygon, EPSILON,
};
use crate::overlay::{self, region_rings, Op, Ring};

#[derive(Clone, Debug, PartialEq)]
pub enum BooleanError {
    /// Fragment walk reached a vertex with no unused outgoing edge.
    OpenChain,
    /// A hole ring was produced that no outer ring contains.
    OrphanHole,
    /// Operand violates a precondition of the operation.
    InvalidInput(GeometryError),
}

impl fmt::Display for BooleanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanError::OpenChain => {
                write!(f, "topological degeneracy: boundary fragments do not close")
            }
            BooleanError::OrphanHole => {
                write!(f, "topological degeneracy: hole outside every outer ring")
            }
            BooleanError::InvalidInput(e) => write!(f, "invalid operand: {e}"),
        }
    }
}

impl core::error::Error for BooleanError {}

impl From<GeometryError> for BooleanError {
    fn from(e: GeometryError) -> Self {
        BooleanError::InvalidInput(e)
    }
}

/// Outer ring plus holes.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    outer: SimplePolygon,
    holes: Vec<SimplePolygon>,
}

impl Region {
    /// Builds a region, checking that every hole sits inside `outer` and that
    /// holes do not contain one another.
    pub fn new(outer: SimplePolygon, holes: Vec<SimplePolygon>) -> Result<Self, GeometryError> {
        for (i, h) in holes.iter().enumerate() {
            if !outer.mbr().contains(h.mbr())
                || h.vertices()
                    .iter()
                    .any(|v| point_in_polygon(*v, &outer) == Containment::Outside)
            {
                return Err(GeometryError::ZeroArea);
            }
            for (j, other) in holes.iter().enumerate() {
                if i != j
                    && other.mbr().intersects(h.mbr())
                    && point_in_polygon(h.vertices()[0], other) == Containment::Inside
                {
                    return Err(GeometryError::ZeroArea);
                }
            }
        }
        Ok(Region::from_parts(outer, holes))
    }

    pub fn from_polygon(outer: SimplePolygon) -> Self {
        Region {
            outer,
            holes: Vec::new(),
        }
    }

    pub(crate) fn from_parts(outer: SimplePolygon, mut holes: Vec<SimplePolygon>) -> Self {
        holes.sort_by(|a, b| a.min_vertex().lex_cmp(b.min_vertex()));
        Region { outer, holes }
    }

    pub(crate) fn push_hole(&mut self, hole: SimplePolygon) {
        let key = hole.min_vertex();
        let at = self
            .holes
            .partition_point(|h| h.min_vertex().lex_cmp(key) == core::cmp::Ordering::Less);
        self.holes.insert(at, hole);
    }

    pub fn outer(&self) -> &SimplePolygon {
        &self.outer
    }

    pub fn holes(&self) -> &[SimplePolygon] {
        &self.holes
    }

    /// The LBDS flag.
    pub fn has_holes(&self) -> bool {
        !self.holes.is_empty()
    }

    pub fn mbr(&self) -> &Mbr {
        self.outer.mbr()
    }

    pub fn area(&self) -> f64 {
        region_area(self)
    }

    pub fn contains(&self, pt: Point) -> bool {
        point_in_region(pt, self)
    }

    /// Three-way containment; hole boundaries count as boundary.
    pub fn containment(&self, pt: Point) -> Containment {
        match point_in_polygon(pt, &self.outer) {
            Containment::Outside => Containment::Outside,
            Containment::OnBoundary => Containment::OnBoundary,
            Containment::Inside => {
                for h in &self.holes {
                    match point_in_polygon(pt, h) {
                        Containment::Inside => return Containment::Outside,
                        Containment::OnBoundary => return Containment::OnBoundary,
                        Containment::Outside => {}
                    }
                }
                Containment::Inside
            }
        }
    }

    /// Total vertex count over all rings.
    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(|h| h.len()).sum::<usize>()
    }
}

/// Interior-disjoint subdivisions; empty when the result is empty.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RegionSet {
    subdivisions: Vec<Region>,
}

impl RegionSet {
    pub fn empty() -> Self {
        RegionSet::default()
    }

    pub fn single(r: Region) -> Self {
        RegionSet {
            subdivisions: alloc::vec![r],
        }
    }

    pub(crate) fn from_sorted(subdivisions: Vec<Region>) -> Self {
        RegionSet { subdivisions }
    }

    /// Sorts pieces into canonical order.
    pub fn new(mut subdivisions: Vec<Region>) -> Self {
        subdivisions.sort_by(|a, b| a.outer().min_vertex().lex_cmp(b.outer().min_vertex()));
        RegionSet { subdivisions }
    }

    pub fn subdivisions(&self) -> &[Region] {
        &self.subdivisions
    }

    pub fn into_subdivisions(self) -> Vec<Region> {
        self.subdivisions
    }

    pub fn len(&self) -> usize {
        self.subdivisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdivisions.is_empty()
    }

    pub fn area(&self) -> f64 {
        regionset_area(self)
    }

    pub fn contains(&self, pt: Point) -> bool {
        self.subdivisions.iter().any(|r| r.mbr().expand(EPSILON).contains_point(pt) && r.contains(pt))
    }

    pub fn mbr(&self) -> Option<Mbr> {
        let mut it = self.subdivisions.iter().map(|r| *r.mbr());
        let first = it.next()?;
        Some(it.fold(first, |a, b| a.union(&b)))
    }
}

/// Outer area minus hole areas.
pub fn region_area(a: &Region) -> f64 {
    let mut area = a.outer.area();
    for h in &a.holes {
        area -= h.area();
    }
    area
}

pub fn regionset_area(s: &RegionSet) -> f64 {
    s.subdivisions.iter().map(region_area).sum()
}

/// Inside the outer ring and not strictly inside any hole. Both outer and hole
/// boundaries count as part of the region.
pub fn point_in_region(pt: Point, a: &Region) -> bool {
    a.containment(pt) != Containment::Outside
}

/// `a \ p`, split into connected subdivisions.
pub fn region_subtract(a: &Region, p: &SimplePolygon) -> Result<RegionSet, BooleanError> {
    if !a.mbr().intersects(p.mbr()) {
        return Ok(RegionSet::single(a.clone()));
    }
    let pieces = overlay::overlay(region_rings(a), alloc::vec![Ring::outer(p)], Op::Difference)?;
    Ok(RegionSet::from_sorted(pieces))
}

/// Subtracts `p` from every subdivision, keeping all pieces.
pub fn regionset_subtract(s: &RegionSet, p: &SimplePolygon) -> Result<RegionSet, BooleanError> {
    let mut out = Vec::new();
    for d in &s.subdivisions {
        out.extend(region_subtract(d, p)?.into_subdivisions());
    }
    Ok(RegionSet::new(out))
}

/// `a ∩ r` for an axis-aligned rectangle: the outer ring is clipped first and
/// each hole is then subtracted from every resulting piece, in stored order.
pub fn region_intersect_rect(a: &Region, r: &SimplePolygon) -> Result<RegionSet, BooleanError> {
    if !r.is_axis_aligned_rectangle() {
        return Err(BooleanError::InvalidInput(GeometryError::NotRectangle));
    }
    if !a.mbr().intersects(r.mbr()) {
        return Ok(RegionSet::empty());
    }
    if r.mbr().contains(a.mbr()) {
        return Ok(RegionSet::single(a.clone()));
    }
    let phi = overlay::overlay(
        alloc::vec![Ring::outer(&a.outer)],
        alloc::vec![Ring::outer(r)],
        Op::Intersection,
    )?;
    let mut pieces = phi;
    for h in &a.holes {
        let mut next = Vec::with_capacity(pieces.len());
        for d in &pieces {
            next.extend(region_subtract(d, h)?.into_subdivisions());
        }
        pieces = next;
    }
    Ok(RegionSet::new(pieces))
}

/// General `a ∩ b` over all rings at once.
pub fn region_intersect(a: &Region, b: &Region) -> Result<RegionSet, BooleanError> {
    if !a.mbr().intersects(b.mbr()) {
        return Ok(RegionSet::empty());
    }
    let pieces = overlay::overlay(region_rings(a), region_rings(b), Op::Intersection)?;
    Ok(RegionSet::from_sorted(pieces))
}

/// General `a \ b` where `b` may itself have holes.
pub fn region_difference(a: &Region, b: &Region) -> Result<RegionSet, BooleanError> {
    if !a.mbr().intersects(b.mbr()) {
        return Ok(RegionSet::single(a.clone()));
    }
    let pieces = overlay::overlay(region_rings(a), region_rings(b), Op::Difference)?;
    Ok(RegionSet::from_sorted(pieces))
}
