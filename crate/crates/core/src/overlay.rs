//! Edge-splitting polygon overlay for regions with holes.
//!
//! Both operands are sets of directed rings with the interior on the left
//! (outer rings counterclockwise, holes clockwise). Every edge is split at
//! every contact with the other operand, each fragment is classified against
//! the other operand, the fragments selected by the operation are walked back
//! into rings, and the rings are grouped into outer/hole regions.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::geometry::{
    canonical_vertex, cross, min_vertex_index, ring_containment, segment_distance, signed_area,
    Containment, Mbr, Point, Segment, SimplePolygon, EPSILON,
};
use crate::region::{BooleanError, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    Intersection,
    Difference,
}

/// Directed ring, interior on the left.
#[derive(Clone, Debug)]
pub(crate) struct Ring {
    pub pts: Vec<Point>,
    pub sups: Vec<Segment>,
}

impl Ring {
    pub fn outer(p: &SimplePolygon) -> Ring {
        Ring {
            pts: p.vertices().to_vec(),
            sups: p.supports().to_vec(),
        }
    }

    pub fn hole(p: &SimplePolygon) -> Ring {
        let (pts, sups) = p.reversed_ring();
        Ring { pts, sups }
    }
}

pub(crate) fn region_rings(r: &Region) -> Vec<Ring> {
    let mut rings = Vec::with_capacity(1 + r.holes().len());
    rings.push(Ring::outer(r.outer()));
    rings.extend(r.holes().iter().map(Ring::hole));
    rings
}

type Key = (u64, u64);

#[derive(Clone, Copy)]
struct Edge {
    from: Point,
    to: Point,
    sup: Segment,
    ring: usize,
}

#[derive(Clone, Copy)]
struct Frag {
    from: Point,
    to: Point,
    sup: Segment,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Class {
    Inside,
    Outside,
    SharedSame,
    SharedOpp,
}

struct Operand {
    rings: Vec<Ring>,
    edges: Vec<Edge>,
    splits: Vec<Vec<Point>>,
    touched: Vec<bool>,
    mbr: Mbr,
}

impl Operand {
    fn new(rings: Vec<Ring>) -> Option<Operand> {
        let mut edges = Vec::new();
        for (ri, ring) in rings.iter().enumerate() {
            let n = ring.pts.len();
            for i in 0..n {
                edges.push(Edge {
                    from: ring.pts[i],
                    to: ring.pts[(i + 1) % n],
                    sup: ring.sups[i],
                    ring: ri,
                });
            }
        }
        let mbr = Mbr::from_points(rings.iter().flat_map(|r| r.pts.iter().copied()))?;
        Some(Operand {
            splits: alloc::vec![Vec::new(); edges.len()],
            touched: alloc::vec![false; rings.len()],
            rings,
            edges,
            mbr,
        })
    }

    fn classify(&self, pt: Point) -> Containment {
        if !self.mbr.expand(EPSILON).contains_point(pt) {
            return Containment::Outside;
        }
        let mut inside = false;
        for ring in &self.rings {
            match ring_containment(pt, &ring.pts) {
                Containment::OnBoundary => return Containment::OnBoundary,
                Containment::Inside => inside = !inside,
                Containment::Outside => {}
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    /// Orientation of the nearest edge relative to `dir`.
    fn boundary_class(&self, pt: Point, dir: (f64, f64)) -> Class {
        let mut best = f64::INFINITY;
        let mut dot = 1.0;
        for e in &self.edges {
            let d = segment_distance(pt, e.from, e.to);
            if d < best {
                best = d;
                dot = dir.0 * (e.to.x - e.from.x) + dir.1 * (e.to.y - e.from.y);
            }
        }
        if dot >= 0.0 {
            Class::SharedSame
        } else {
            Class::SharedOpp
        }
    }
}

fn snap_onto(clip: &mut Vec<Ring>, subject: &[Ring]) {
    let mut anchors: Vec<Point> = subject.iter().flat_map(|r| r.pts.iter().copied()).collect();
    anchors.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(core::cmp::Ordering::Equal));
    let Some(box_) = Mbr::from_points(anchors.iter().copied()) else {
        return;
    };
    let box_ = box_.expand(EPSILON);
    for ring in clip.iter_mut() {
        for p in ring.pts.iter_mut() {
            if !box_.contains_point(*p) {
                continue;
            }
            let start = anchors.partition_point(|a| a.x < p.x - EPSILON);
            for a in &anchors[start..] {
                if a.x > p.x + EPSILON {
                    break;
                }
                if *a != *p && a.dist(*p) <= EPSILON {
                    *p = *a;
                    break;
                }
            }
        }
        // Drop edges collapsed by snapping.
        let n = ring.pts.len();
        let mut pts = Vec::with_capacity(n);
        let mut sups = Vec::with_capacity(n);
        for i in 0..n {
            if ring.pts[i] != ring.pts[(i + 1) % n] {
                pts.push(ring.pts[i]);
                sups.push(ring.sups[i]);
            }
        }
        ring.pts = pts;
        ring.sups = sups;
    }
    clip.retain(|r| r.pts.len() >= 3);
}

fn intersect_edges(s: &mut Operand, c: &mut Operand) {
    for ci in 0..c.edges.len() {
        let q = c.edges[ci];
        let qbox = Mbr::new(q.from, q.to).expand(EPSILON);
        if !qbox.intersects(&s.mbr) {
            continue;
        }
        for si in 0..s.edges.len() {
            let p = s.edges[si];
            if !qbox.intersects(&Mbr::new(p.from, p.to)) {
                continue;
            }
            let (p0, p1, q0, q1) = (p.from, p.to, q.from, q.to);
            let q0_on_p = segment_distance(q0, p0, p1) <= EPSILON;
            let q1_on_p = segment_distance(q1, p0, p1) <= EPSILON;
            let p0_on_q = segment_distance(p0, q0, q1) <= EPSILON;
            let p1_on_q = segment_distance(p1, q0, q1) <= EPSILON;
            if q0_on_p || q1_on_p || p0_on_q || p1_on_q {
                for (on, pt) in [(q0_on_p, q0), (q1_on_p, q1)] {
                    if on && pt != p0 && pt != p1 {
                        s.splits[si].push(pt);
                    }
                }
                for (on, pt) in [(p0_on_q, p0), (p1_on_q, p1)] {
                    if on && pt != q0 && pt != q1 {
                        c.splits[ci].push(pt);
                    }
                }
                s.touched[p.ring] = true;
                c.touched[q.ring] = true;
                continue;
            }
            let d1 = cross(p0, p1, q0);
            let d2 = cross(p0, p1, q1);
            let d3 = cross(q0, q1, p0);
            let d4 = cross(q0, q1, p1);
            let straddle_q = (d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0);
            let straddle_p = (d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0);
            if straddle_q && straddle_p {
                let t = d3 / (d3 - d4);
                let x = Point::new(p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y));
                s.splits[si].push(x);
                c.splits[ci].push(x);
                s.touched[p.ring] = true;
                c.touched[q.ring] = true;
            }
        }
    }
}

fn fragments(op: &Operand) -> Vec<(Frag, usize)> {
    let mut out = Vec::with_capacity(op.edges.len());
    for (ei, e) in op.edges.iter().enumerate() {
        let splits = &op.splits[ei];
        if splits.is_empty() {
            out.push((
                Frag {
                    from: e.from,
                    to: e.to,
                    sup: e.sup,
                },
                e.ring,
            ));
            continue;
        }
        let dx = e.to.x - e.from.x;
        let dy = e.to.y - e.from.y;
        let mut pts: Vec<(f64, Point)> = splits
            .iter()
            .filter(|p| **p != e.from && **p != e.to)
            .map(|p| ((p.x - e.from.x) * dx + (p.y - e.from.y) * dy, *p))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        pts.dedup_by(|a, b| a.1 == b.1);
        let mut prev = e.from;
        for (_, p) in pts {
            out.push((
                Frag {
                    from: prev,
                    to: p,
                    sup: e.sup,
                },
                e.ring,
            ));
            prev = p;
        }
        out.push((
            Frag {
                from: prev,
                to: e.to,
                sup: e.sup,
            },
            e.ring,
        ));
    }
    out
}

fn classify_fragments(
    frags: &[(Frag, usize)],
    own: &Operand,
    other: &Operand,
    other_keys: &BTreeMap<(Key, Key), ()>,
) -> Vec<Class> {
    let mut ring_cache: Vec<Option<Class>> = alloc::vec![None; own.rings.len()];
    let mut out = Vec::with_capacity(frags.len());
    for (f, ring) in frags {
        if !own.touched[*ring] {
            if let Some(c) = ring_cache[*ring] {
                out.push(c);
                continue;
            }
        }
        let fk = f.from.key();
        let tk = f.to.key();
        let class = if other_keys.contains_key(&(fk, tk)) {
            Class::SharedSame
        } else if other_keys.contains_key(&(tk, fk)) {
            Class::SharedOpp
        } else {
            let mid = Point::new(0.5 * (f.from.x + f.to.x), 0.5 * (f.from.y + f.to.y));
            match other.classify(mid) {
                Containment::Inside => Class::Inside,
                Containment::Outside => Class::Outside,
                Containment::OnBoundary => {
                    other.boundary_class(mid, (f.to.x - f.from.x, f.to.y - f.from.y))
                }
            }
        };
        if !own.touched[*ring] {
            ring_cache[*ring] = Some(class);
        }
        out.push(class);
    }
    out
}

/// Runs the overlay and groups the result into regions.
pub(crate) fn overlay(
    subject: Vec<Ring>,
    clip: Vec<Ring>,
    op: Op,
) -> Result<Vec<Region>, BooleanError> {
    let mut clip = clip;
    snap_onto(&mut clip, &subject);
    let Some(mut s) = Operand::new(subject) else {
        return Ok(Vec::new());
    };
    let Some(mut c) = Operand::new(clip) else {
        return match op {
            Op::Intersection => Ok(Vec::new()),
            Op::Difference => assemble(s.rings),
        };
    };
    intersect_edges(&mut s, &mut c);

    let s_frags = fragments(&s);
    let c_frags = fragments(&c);
    let s_keys: BTreeMap<(Key, Key), ()> =
        s_frags.iter().map(|(f, _)| ((f.from.key(), f.to.key()), ())).collect();
    let c_keys: BTreeMap<(Key, Key), ()> =
        c_frags.iter().map(|(f, _)| ((f.from.key(), f.to.key()), ())).collect();
    let s_class = classify_fragments(&s_frags, &s, &c, &c_keys);
    let c_class = classify_fragments(&c_frags, &c, &s, &s_keys);

    let mut kept: Vec<Frag> = Vec::new();
    for ((f, _), class) in s_frags.iter().zip(&s_class) {
        let keep = match op {
            Op::Intersection => matches!(class, Class::Inside | Class::SharedSame),
            Op::Difference => matches!(class, Class::Outside | Class::SharedOpp),
        };
        if keep {
            kept.push(*f);
        }
    }
    for ((f, _), class) in c_frags.iter().zip(&c_class) {
        if *class != Class::Inside {
            continue;
        }
        match op {
            Op::Intersection => kept.push(*f),
            Op::Difference => kept.push(Frag {
                from: f.to,
                to: f.from,
                sup: f.sup,
            }),
        }
    }
    let rings = link(&kept)?;
    assemble(rings)
}

fn turn_angle(din: (f64, f64), dout: (f64, f64)) -> f64 {
    let c = din.0 * dout.1 - din.1 * dout.0;
    let d = din.0 * dout.0 + din.1 * dout.1;
    libm::atan2(c, d)
}

/// Walks kept fragments into closed rings, always taking the sharpest left
/// turn at branching vertices.
fn link(frags: &[Frag]) -> Result<Vec<Ring>, BooleanError> {
    let mut outgoing: BTreeMap<Key, Vec<usize>> = BTreeMap::new();
    for (i, f) in frags.iter().enumerate() {
        outgoing.entry(f.from.key()).or_default().push(i);
    }
    let mut used = alloc::vec![false; frags.len()];
    let mut rings = Vec::new();
    for start in 0..frags.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let origin = frags[start].from.key();
        let mut pts = Vec::new();
        let mut sups = Vec::new();
        let mut cur = start;
        loop {
            let f = frags[cur];
            pts.push(f.from);
            sups.push(f.sup);
            let end = f.to.key();
            if end == origin {
                break;
            }
            let din = (f.to.x - f.from.x, f.to.y - f.from.y);
            let mut best: Option<(usize, f64)> = None;
            if let Some(cands) = outgoing.get(&end) {
                for &j in cands {
                    if used[j] {
                        continue;
                    }
                    let g = frags[j];
                    let a = turn_angle(din, (g.to.x - g.from.x, g.to.y - g.from.y));
                    if best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
            }
            let Some((next, _)) = best else {
                return Err(BooleanError::OpenChain);
            };
            used[next] = true;
            cur = next;
        }
        split_pinches(pts, sups, &mut rings);
    }
    Ok(rings)
}

/// Separates a cycle that visits a vertex more than once into simple cycles.
fn split_pinches(pts: Vec<Point>, sups: Vec<Segment>, out: &mut Vec<Ring>) {
    let mut stack_p: Vec<Point> = Vec::with_capacity(pts.len());
    let mut stack_s: Vec<Segment> = Vec::with_capacity(pts.len());
    let mut seen: BTreeMap<Key, usize> = BTreeMap::new();
    for (p, s) in pts.into_iter().zip(sups) {
        if let Some(&j) = seen.get(&p.key()) {
            let loop_p: Vec<Point> = stack_p.drain(j..).collect();
            let loop_s: Vec<Segment> = stack_s.drain(j..).collect();
            for q in &loop_p {
                seen.remove(&q.key());
            }
            out.push(Ring {
                pts: loop_p,
                sups: loop_s,
            });
        }
        seen.insert(p.key(), stack_p.len());
        stack_p.push(p);
        stack_s.push(s);
    }
    if !stack_p.is_empty() {
        out.push(Ring {
            pts: stack_p,
            sups: stack_s,
        });
    }
}

/// Merges collinear runs on the same support, rebuilds vertices from the
/// supports, and drops rings thinner than `EPSILON`.
fn finalize(ring: Ring) -> Option<Ring> {
    let n = ring.pts.len();
    if n < 3 {
        return None;
    }
    let start = (0..n).find(|&i| ring.sups[i] != ring.sups[(i + n - 1) % n])?;
    let mut pts = Vec::with_capacity(n);
    let mut sups: Vec<Segment> = Vec::with_capacity(n);
    for k in 0..n {
        let i = (start + k) % n;
        if k > 0 && ring.sups[i] == *sups.last().unwrap() {
            continue;
        }
        pts.push(ring.pts[i]);
        sups.push(ring.sups[i]);
    }
    let m = pts.len();
    if m < 3 {
        return None;
    }
    let rebuilt: Vec<Point> = (0..m)
        .map(|i| canonical_vertex(&sups[(i + m - 1) % m], &sups[i], pts[i]))
        .collect();
    let mut pts = rebuilt;
    loop {
        let m = pts.len();
        if m < 3 {
            return None;
        }
        match (0..m).find(|&i| pts[i] == pts[(i + 1) % m]) {
            Some(i) => {
                pts.remove(i);
                sups.remove(i);
            }
            None => break,
        }
    }
    let m = pts.len();
    let area = signed_area(&pts);
    let perimeter: f64 = (0..m).map(|i| pts[i].dist(pts[(i + 1) % m])).sum();
    if libm::fabs(area) <= EPSILON * perimeter {
        return None;
    }
    let r = min_vertex_index(&pts);
    pts.rotate_left(r);
    sups.rotate_left(r);
    Some(Ring { pts, sups })
}

fn reverse(ring: Ring) -> (Vec<Point>, Vec<Segment>) {
    let n = ring.pts.len();
    let pts = ring.pts.iter().rev().copied().collect();
    let sups = (0..n).map(|i| ring.sups[(2 * n - 2 - i) % n]).collect();
    (pts, sups)
}

/// Groups directed rings into regions: counterclockwise rings are outer
/// boundaries, clockwise rings are holes attached to the smallest outer ring
/// that contains them.
pub(crate) fn assemble(rings: Vec<Ring>) -> Result<Vec<Region>, BooleanError> {
    let mut outers: Vec<(SimplePolygon, f64)> = Vec::new();
    let mut holes: Vec<SimplePolygon> = Vec::new();
    for ring in rings {
        let Some(ring) = finalize(ring) else { continue };
        let area = signed_area(&ring.pts);
        if area > 0.0 {
            outers.push((SimplePolygon::from_parts(ring.pts, ring.sups), area));
        } else {
            let (pts, sups) = reverse(ring);
            holes.push(SimplePolygon::from_parts(pts, sups));
        }
    }
    outers.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
    let mut assigned: Vec<Vec<SimplePolygon>> = alloc::vec![Vec::new(); outers.len()];
    for hole in holes {
        let owner = outers.iter().position(|(outer, _)| {
            outer.mbr().expand(EPSILON).contains(hole.mbr()) && hole_inside(&hole, outer)
        });
        match owner {
            Some(i) => assigned[i].push(hole),
            None => return Err(BooleanError::OrphanHole),
        }
    }
    let mut regions: Vec<Region> = outers
        .into_iter()
        .zip(assigned)
        .map(|((outer, _), holes)| Region::from_parts(outer, holes))
        .collect();
    regions.sort_by(|a, b| a.outer().min_vertex().lex_cmp(b.outer().min_vertex()));
    Ok(regions)
}

fn hole_inside(hole: &SimplePolygon, outer: &SimplePolygon) -> bool {
    for v in hole.vertices() {
        match ring_containment(*v, outer.vertices()) {
            Containment::Inside => return true,
            Containment::Outside => return false,
            Containment::OnBoundary => {}
        }
    }
    for (a, b) in hole.edges() {
        let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        match ring_containment(mid, outer.vertices()) {
            Containment::Inside => return true,
            Containment::Outside => return false,
            Containment::OnBoundary => {}
        }
    }
    false
}
