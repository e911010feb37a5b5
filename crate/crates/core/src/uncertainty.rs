//! Uncertainty regions: where an object may be, given its last report and the
//! restricted areas it cannot enter.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::geometry::{
    point_in_polygon, segments_touch, span_of, Containment, GeometryError, Mbr, Point,
    SimplePolygon, EPSILON,
};
use crate::region::{region_subtract, BooleanError, Region, RegionSet};
use crate::overlay::{self, Op, Ring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AreaId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for AreaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Object with a recorded location and the distance it may travel before it
/// must report again.
#[derive(Clone, Debug, PartialEq)]
pub struct MovingObject {
    pub id: ObjectId,
    pub location: Point,
    pub tau: f64,
}

impl MovingObject {
    pub fn new(id: ObjectId, location: Point, tau: f64) -> Result<Self, UncertaintyError> {
        if !location.is_finite() {
            return Err(UncertaintyError::Geometry(GeometryError::NonFinite));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(UncertaintyError::InvalidTau(tau));
        }
        Ok(MovingObject { id, location, tau })
    }

    /// Square of side `2 tau` around the recorded location.
    pub fn circle_mbr(&self) -> Mbr {
        Mbr::square(self.location, self.tau)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedArea {
    pub id: AreaId,
    pub shape: SimplePolygon,
}

impl RestrictedArea {
    pub fn new(id: AreaId, shape: SimplePolygon) -> Self {
        RestrictedArea { id, shape }
    }

    pub fn mbr(&self) -> &Mbr {
        self.shape.mbr()
    }

    /// Number of edges.
    pub fn zeta(&self) -> usize {
        self.shape.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum UncertaintyError {
    InvalidXi(usize),
    InvalidTau(f64),
    /// No piece of the subtraction result contains the recorded location.
    SelectionFailure,
    Geometry(GeometryError),
    Boolean(BooleanError),
}

impl fmt::Display for UncertaintyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UncertaintyError::InvalidXi(xi) => write!(f, "polygon edge count {xi} is below 3"),
            UncertaintyError::InvalidTau(t) => write!(f, "distance threshold {t} is not positive"),
            UncertaintyError::SelectionFailure => {
                write!(f, "no subdivision contains the recorded location")
            }
            UncertaintyError::Geometry(e) => write!(f, "{e}"),
            UncertaintyError::Boolean(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for UncertaintyError {}

impl From<BooleanError> for UncertaintyError {
    fn from(e: BooleanError) -> Self {
        UncertaintyError::Boolean(e)
    }
}

impl From<GeometryError> for UncertaintyError {
    fn from(e: GeometryError) -> Self {
        UncertaintyError::Geometry(e)
    }
}

/// Work done while building or clipping uncertainty regions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UncertaintyCounters {
    /// Restricted-area subtractions applied to a piece.
    pub subtractions: u64,
    /// Candidate areas skipped because they miss the working bounding box.
    pub pruned_areas: u64,
    /// Candidate areas deferred because they lie strictly inside.
    pub postponed_areas: u64,
    /// Hole subtractions applied while clipping against a query range.
    pub hole_subtractions: u64,
    pub pruned_holes: u64,
    pub postponed_holes: u64,
}

impl UncertaintyCounters {
    pub fn add(&mut self, o: &UncertaintyCounters) {
        self.subtractions += o.subtractions;
        self.pruned_areas += o.pruned_areas;
        self.postponed_areas += o.postponed_areas;
        self.hole_subtractions += o.hole_subtractions;
        self.pruned_holes += o.pruned_holes;
        self.postponed_holes += o.postponed_holes;
    }
}

/// Regular `xi`-gon inscribed in the circle of radius `tau` around `center`.
pub fn approximate_circle(center: Point, tau: f64, xi: usize) -> Result<SimplePolygon, UncertaintyError> {
    if xi < 3 {
        return Err(UncertaintyError::InvalidXi(xi));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(UncertaintyError::InvalidTau(tau));
    }
    let step = 2.0 * core::f64::consts::PI / xi as f64;
    let pts = (0..xi)
        .map(|i| {
            let a = step * i as f64;
            Point::new(center.x + tau * libm::cos(a), center.y + tau * libm::sin(a))
        })
        .collect();
    Ok(SimplePolygon::new(pts)?)
}

/// Picks the piece containing `l`. Interior containment wins over boundary
/// contact; ties go to the first piece in canonical order.
fn select_containing(pieces: Vec<Region>, l: Point) -> Result<Region, UncertaintyError> {
    let mut boundary: Option<usize> = None;
    let mut inside: Option<usize> = None;
    for (i, d) in pieces.iter().enumerate() {
        if !d.mbr().expand(EPSILON).contains_point(l) {
            continue;
        }
        match d.containment(l) {
            Containment::Inside => {
                inside = Some(i);
                break;
            }
            Containment::OnBoundary if boundary.is_none() => boundary = Some(i),
            _ => {}
        }
    }
    match inside.or(boundary) {
        Some(i) => Ok(pieces.into_iter().nth(i).unwrap()),
        None => Err(UncertaintyError::SelectionFailure),
    }
}

/// Subtracts every candidate in order, carrying all pieces, and keeps the
/// piece that contains `l_r`.
pub fn compute_uncertainty_basic(
    e: &SimplePolygon,
    candidates: &[&RestrictedArea],
    l_r: Point,
) -> Result<Region, UncertaintyError> {
    compute_uncertainty_basic_counted(e, candidates, l_r, &mut UncertaintyCounters::default())
}

pub fn compute_uncertainty_basic_counted(
    e: &SimplePolygon,
    candidates: &[&RestrictedArea],
    l_r: Point,
    counters: &mut UncertaintyCounters,
) -> Result<Region, UncertaintyError> {
    let mut pieces = alloc::vec![Region::from_polygon(e.clone())];
    for r in candidates {
        let mut next = Vec::with_capacity(pieces.len() + 1);
        for d in &pieces {
            counters.subtractions += 1;
            next.extend(region_subtract(d, &r.shape)?.into_subdivisions());
        }
        pieces = next;
    }
    select_containing(RegionSet::new(pieces).into_subdivisions(), l_r)
}

/// `r` lies strictly inside `d`: bounding box inside `mbr`, a vertex strictly
/// inside, and no contact with any ring of `d`.
fn strictly_inside(r: &SimplePolygon, d: &Region, mbr: &Mbr) -> bool {
    if !mbr.contains_strictly(r.mbr()) {
        return false;
    }
    if d.containment(r.vertices()[0]) != Containment::Inside {
        return false;
    }
    let encloses_hole = d.holes().iter().any(|h| {
        r.mbr().contains(h.mbr()) && point_in_polygon(h.vertices()[0], r) != Containment::Outside
    });
    !encloses_hole && !touches_any_ring(r, d)
}

fn touches_any_ring(r: &SimplePolygon, d: &Region) -> bool {
    let rb = r.mbr().expand(EPSILON);
    let rings = core::iter::once(d.outer()).chain(d.holes().iter());
    for ring in rings {
        if !ring.mbr().expand(EPSILON).intersects(&rb) {
            continue;
        }
        for (a, b) in ring.edges() {
            let eb = Mbr::new(a, b).expand(EPSILON);
            if !eb.intersects(&rb) {
                continue;
            }
            if r.edges().any(|(c, d)| segments_touch(a, b, c, d)) {
                return true;
            }
        }
    }
    false
}

fn is_sliver(p: &SimplePolygon) -> bool {
    let perimeter: f64 = p.edges().map(|(a, b)| a.dist(b)).sum();
    p.area() <= EPSILON * perimeter
}

fn by_span_desc(a: &SimplePolygon, b: &SimplePolygon) -> Ordering {
    span_of(b.mbr())
        .partial_cmp(&span_of(a.mbr()))
        .unwrap_or(Ordering::Equal)
        .then_with(|| b.mbr().area().partial_cmp(&a.mbr().area()).unwrap_or(Ordering::Equal))
}

/// Same region as [`compute_uncertainty_basic`], computed with candidate
/// ordering by decreasing span, bounding-box pruning, deferred handling of
/// areas that fall strictly inside, and lazy bounding-box maintenance.
pub fn compute_uncertainty_optimized(
    e: &SimplePolygon,
    candidates: &[&RestrictedArea],
    l_r: Point,
) -> Result<Region, UncertaintyError> {
    compute_uncertainty_optimized_counted(e, candidates, l_r, &mut UncertaintyCounters::default())
}

pub fn compute_uncertainty_optimized_counted(
    e: &SimplePolygon,
    candidates: &[&RestrictedArea],
    l_r: Point,
    counters: &mut UncertaintyCounters,
) -> Result<Region, UncertaintyError> {
    let mut order: Vec<&RestrictedArea> = candidates.to_vec();
    order.sort_by(|a, b| by_span_desc(&a.shape, &b.shape).then_with(|| a.id.cmp(&b.id)));

    let mut working = Region::from_polygon(e.clone());
    let mut working_mbr = *e.mbr();
    let mut postponed: Vec<&RestrictedArea> = Vec::new();
    for r in order {
        if !working_mbr.intersects(r.mbr()) {
            counters.pruned_areas += 1;
            continue;
        }
        if strictly_inside(&r.shape, &working, &working_mbr) {
            counters.postponed_areas += 1;
            postponed.push(r);
            continue;
        }
        counters.subtractions += 1;
        let pieces = region_subtract(&working, &r.shape)?.into_subdivisions();
        match pieces.len() {
            0 => return Err(UncertaintyError::SelectionFailure),
            1 => working = pieces.into_iter().next().unwrap(),
            _ => {
                working = select_containing(pieces, l_r)?;
                working_mbr = *working.mbr();
            }
        }
    }

    for r in postponed {
        if strictly_inside(&r.shape, &working, &working_mbr) {
            if !is_sliver(&r.shape) {
                working.push_hole(r.shape.clone());
            }
        } else if working.mbr().intersects(r.mbr())
            && (working.containment(r.shape.vertices()[0]) != Containment::Outside
                || touches_any_ring(&r.shape, &working))
        {
            counters.subtractions += 1;
            let pieces = region_subtract(&working, &r.shape)?.into_subdivisions();
            working = select_containing(pieces, l_r)?;
        } else {
            counters.pruned_areas += 1;
        }
    }
    Ok(working)
}

#[derive(Clone)]
struct Piece {
    region: Region,
    mbr: Mbr,
}

/// `u ∩ rect`, retaining every piece. Holes are processed by increasing span,
/// holes that miss every piece are skipped, and holes lying strictly inside a
/// piece are attached last without a boolean operation.
pub fn intersect_with_query(u: &Region, rect: &SimplePolygon) -> Result<RegionSet, UncertaintyError> {
    intersect_with_query_counted(u, rect, &mut UncertaintyCounters::default())
}

pub fn intersect_with_query_counted(
    u: &Region,
    rect: &SimplePolygon,
    counters: &mut UncertaintyCounters,
) -> Result<RegionSet, UncertaintyError> {
    if !rect.is_axis_aligned_rectangle() {
        return Err(UncertaintyError::Geometry(GeometryError::NotRectangle));
    }
    if !rect.mbr().intersects(u.mbr()) {
        return Ok(RegionSet::empty());
    }
    if rect.mbr().contains(u.mbr()) {
        return Ok(RegionSet::single(u.clone()));
    }
    let phi = overlay::overlay(
        alloc::vec![Ring::outer(u.outer())],
        alloc::vec![Ring::outer(rect)],
        Op::Intersection,
    )?;
    let mut pieces: Vec<Piece> = phi
        .into_iter()
        .map(|region| Piece {
            mbr: *region.mbr(),
            region,
        })
        .collect();

    let mut holes: Vec<&SimplePolygon> = u.holes().iter().collect();
    holes.sort_by(|a, b| {
        span_of(a.mbr())
            .partial_cmp(&span_of(b.mbr()))
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.mbr().area().partial_cmp(&b.mbr().area()).unwrap_or(Ordering::Equal))
            .then_with(|| a.min_vertex().lex_cmp(b.min_vertex()))
    });

    let mut postponed: Vec<&SimplePolygon> = Vec::new();
    for h in holes {
        if pieces.is_empty() {
            break;
        }
        if !pieces.iter().any(|p| p.mbr.intersects(h.mbr())) {
            counters.pruned_holes += 1;
            continue;
        }
        if pieces.iter().any(|p| strictly_inside(h, &p.region, &p.mbr)) {
            counters.postponed_holes += 1;
            postponed.push(h);
            continue;
        }
        subtract_hole(&mut pieces, h, counters)?;
    }

    for h in postponed {
        match pieces.iter().position(|p| strictly_inside(h, &p.region, &p.mbr)) {
            Some(i) => {
                if !is_sliver(h) {
                    pieces[i].region.push_hole(h.clone());
                }
            }
            None => subtract_hole(&mut pieces, h, counters)?,
        }
    }
    Ok(RegionSet::new(pieces.into_iter().map(|p| p.region).collect()))
}

fn subtract_hole(
    pieces: &mut Vec<Piece>,
    h: &SimplePolygon,
    counters: &mut UncertaintyCounters,
) -> Result<(), UncertaintyError> {
    let mut next = Vec::with_capacity(pieces.len() + 1);
    for p in pieces.drain(..) {
        if !p.mbr.intersects(h.mbr()) {
            next.push(p);
            continue;
        }
        counters.hole_subtractions += 1;
        let out = region_subtract(&p.region, h)?.into_subdivisions();
        if out.len() == 1 {
            let region = out.into_iter().next().unwrap();
            next.push(Piece { region, mbr: p.mbr });
        } else {
            next.extend(out.into_iter().map(|region| Piece {
                mbr: *region.mbr(),
                region,
            }));
        }
    }
    *pieces = next;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> SimplePolygon {
        SimplePolygon::rectangle(Mbr::from_coords(x0, y0, x1, y1)).unwrap()
    }

    fn area(id: u64, p: SimplePolygon) -> RestrictedArea {
        RestrictedArea::new(AreaId(id), p)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol
    }

    #[test]
    fn circle_quarter_turns() {
        let p = approximate_circle(Point::new(0.0, 0.0), 1.0, 4).unwrap();
        let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        assert_eq!(p.len(), 4);
        for (v, w) in p.vertices().iter().zip(want) {
            assert!(close(v.x, w.0, 1e-15) && close(v.y, w.1, 1e-15));
        }
        assert_eq!(
            approximate_circle(Point::new(0.0, 0.0), 1.0, 2),
            Err(UncertaintyError::InvalidXi(2))
        );
    }

    #[test]
    fn basic_examples() {
        let e = rect(0.0, 0.0, 4.0, 4.0);
        let u = compute_uncertainty_basic(&e, &[], Point::new(2.0, 2.0)).unwrap();
        assert_eq!(u, Region::from_polygon(e.clone()));

        let strip = area(1, rect(1.5, -1.0, 2.5, 5.0));
        let u = compute_uncertainty_basic(&e, &[&strip], Point::new(0.5, 2.0)).unwrap();
        assert_eq!(*u.mbr(), Mbr::from_coords(0.0, 0.0, 1.5, 4.0));
        assert!(close(u.area(), 6.0, 1e-12));

        let inner = area(2, rect(1.0, 1.0, 2.0, 3.0));
        let u = compute_uncertainty_basic(&e, &[&inner], Point::new(0.5, 0.5)).unwrap();
        assert_eq!(u.holes().len(), 1);
        assert!(close(u.area(), 14.0, 1e-12));
    }

    #[test]
    fn optimized_matches_basic_examples() {
        let e = rect(0.0, 0.0, 4.0, 4.0);
        let strip = area(1, rect(1.5, -1.0, 2.5, 5.0));
        let inner = area(2, rect(0.2, 0.2, 0.8, 0.8));
        let far = area(3, rect(3.0, 3.0, 3.5, 3.5));
        let l = Point::new(0.5, 2.0);
        let cands = [&far, &inner, &strip];
        let b = compute_uncertainty_basic(&e, &cands, l).unwrap();
        let mut c = UncertaintyCounters::default();
        let o = compute_uncertainty_optimized_counted(&e, &cands, l, &mut c).unwrap();
        assert_eq!(b.area().to_bits(), o.area().to_bits());
        assert_eq!(b.holes().len(), 1);
        assert_eq!(o.holes().len(), 1);
        // The strip splits first, after which the far area misses the working box.
        assert_eq!(c.subtractions, 1);
        assert_eq!(c.pruned_areas, 1);
        assert_eq!(c.postponed_areas, 1);
    }

    #[test]
    fn all_inside_are_postponed() {
        let e = approximate_circle(Point::new(0.0, 0.0), 10.0, 32).unwrap();
        let cands: Vec<RestrictedArea> = (0..4)
            .map(|i| {
                let x = -5.0 + 2.5 * i as f64;
                area(i, rect(x, -1.0, x + 1.0, 1.0))
            })
            .collect();
        let refs: Vec<&RestrictedArea> = cands.iter().collect();
        let mut c = UncertaintyCounters::default();
        let o = compute_uncertainty_optimized_counted(&e, &refs, Point::new(0.0, 5.0), &mut c).unwrap();
        assert_eq!(o.holes().len(), 4);
        assert_eq!(c.postponed_areas, 4);
        assert_eq!(c.subtractions, 0);
        let b = compute_uncertainty_basic(&e, &refs, Point::new(0.0, 5.0)).unwrap();
        assert_eq!(b.area().to_bits(), o.area().to_bits());
    }

    #[test]
    fn selection_failure_when_location_is_covered() {
        let e = rect(0.0, 0.0, 4.0, 4.0);
        let strip = area(1, rect(1.5, -1.0, 2.5, 5.0));
        assert_eq!(
            compute_uncertainty_basic(&e, &[&strip], Point::new(2.0, 2.0)),
            Err(UncertaintyError::SelectionFailure)
        );
    }

    #[test]
    fn query_clip_examples() {
        let u = Region::new(rect(0.0, 0.0, 4.0, 4.0), vec![rect(1.0, 1.0, 3.0, 3.0)]).unwrap();
        let s = intersect_with_query(&u, &rect(-1.0, -1.0, 5.0, 5.0)).unwrap();
        assert_eq!(s.subdivisions(), core::slice::from_ref(&u));
        assert!(intersect_with_query(&u, &rect(6.0, 6.0, 7.0, 7.0)).unwrap().is_empty());
        let s = intersect_with_query(&u, &rect(0.0, 0.0, 4.0, 1.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(close(s.area(), 4.0, 1e-12));
    }

    #[test]
    fn query_clip_postpones_inner_holes() {
        let u = Region::new(
            rect(0.0, 0.0, 10.0, 10.0),
            vec![rect(1.0, 1.0, 2.0, 2.0), rect(4.0, -0.0 + 0.5, 5.0, 9.5), rect(7.0, 7.0, 8.0, 8.0)],
        )
        .unwrap();
        let r = rect(0.5, 0.5, 9.0, 6.0);
        let mut c = UncertaintyCounters::default();
        let s = intersect_with_query_counted(&u, &r, &mut c).unwrap();
        let oracle = crate::region::region_intersect_rect(&u, &r).unwrap();
        assert_eq!(s.area().to_bits(), oracle.area().to_bits());
        assert_eq!(s.len(), 2);
        assert_eq!(c.postponed_holes, 1);
        assert_eq!(c.pruned_holes, 1);
        assert_eq!(c.hole_subtractions, 1);
    }
}
