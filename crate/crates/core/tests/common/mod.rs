#![allow(dead_code)]

use csprq_core::{
    AreaId, Mbr, MovingObject, ObjectId, Point, RestrictedArea, SimplePolygon,
};
use rand::Rng;

pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> SimplePolygon {
    SimplePolygon::rectangle(Mbr::from_coords(x0, y0, x1, y1)).unwrap()
}

pub fn ngon(c: Point, r: f64, n: usize, phase: f64) -> SimplePolygon {
    let pts = (0..n)
        .map(|i| {
            let a = phase + std::f64::consts::TAU * i as f64 / n as f64;
            Point::new(c.x + r * a.cos(), c.y + r * a.sin())
        })
        .collect();
    SimplePolygon::new(pts).unwrap()
}

/// Pairwise separated areas (boxes do not touch) inside `[0, side]^2`.
pub fn random_areas<R: Rng>(rng: &mut R, m: usize, side: f64) -> Vec<RestrictedArea> {
    let mut out: Vec<RestrictedArea> = Vec::new();
    let mut tries = 0;
    while out.len() < m && tries < m * 200 {
        tries += 1;
        let c = Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        let shape = match rng.gen_range(0..3) {
            0 => {
                let w = rng.gen_range(4.0..40.0);
                let h = rng.gen_range(4.0..40.0);
                rect(c.x - w / 2.0, c.y - h / 2.0, c.x + w / 2.0, c.y + h / 2.0)
            }
            1 => ngon(c, rng.gen_range(3.0..20.0), rng.gen_range(3..12), rng.gen_range(0.0..std::f64::consts::TAU)),
            _ => {
                // Long thin bar, likely to split a circle.
                let long = rng.gen_range(40.0..120.0);
                let thin = rng.gen_range(1.0..5.0);
                if rng.gen_bool(0.5) {
                    rect(c.x - long / 2.0, c.y - thin / 2.0, c.x + long / 2.0, c.y + thin / 2.0)
                } else {
                    rect(c.x - thin / 2.0, c.y - long / 2.0, c.x + thin / 2.0, c.y + long / 2.0)
                }
            }
        };
        let b = shape.mbr().expand(0.5);
        if out.iter().any(|a| a.mbr().intersects(&b)) {
            continue;
        }
        out.push(RestrictedArea::new(AreaId(out.len() as u64 * 7 + 3), shape));
    }
    out
}

pub fn random_objects<R: Rng>(
    rng: &mut R,
    n: usize,
    side: f64,
    areas: &[RestrictedArea],
) -> Vec<MovingObject> {
    let mut out = Vec::new();
    while out.len() < n {
        let p = Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        if areas
            .iter()
            .any(|a| a.mbr().contains_point(p) && csprq_core::point_in_polygon(p, &a.shape) != csprq_core::Containment::Outside)
        {
            continue;
        }
        let id = ObjectId(out.len() as u64 * 3 + 1);
        out.push(MovingObject::new(id, p, rng.gen_range(20.0..50.0)).unwrap());
    }
    out
}
