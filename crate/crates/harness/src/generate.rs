//! Synthetic workloads: disjoint restricted areas scattered uniformly, and
//! objects placed uniformly outside every area.

use std::collections::HashMap;

use csprq_core::{
    point_in_polygon, AreaId, Containment, Mbr, MovingObject, ObjectId, Point, RestrictedArea,
    SimplePolygon,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::Dataset;

pub const SPACE: f64 = 10_000.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AreaShape {
    Rect { w: f64, h: f64 },
    /// Regular polygon with `zeta` vertices at distance `radius` from its centre.
    Regular { zeta: usize, radius: f64 },
}

impl Default for AreaShape {
    fn default() -> Self {
        AreaShape::Rect { w: 40.0, h: 10.0 }
    }
}

impl AreaShape {
    fn extent(&self) -> (f64, f64) {
        match *self {
            AreaShape::Rect { w, h } => (w, h),
            AreaShape::Regular { radius, .. } => (2.0 * radius, 2.0 * radius),
        }
    }

    fn build(&self, c: Point) -> SimplePolygon {
        match *self {
            AreaShape::Rect { w, h } => SimplePolygon::rectangle(Mbr::from_coords(
                c.x - w / 2.0,
                c.y - h / 2.0,
                c.x + w / 2.0,
                c.y + h / 2.0,
            ))
            .expect("positive extent"),
            AreaShape::Regular { zeta, radius } => {
                let pts = (0..zeta)
                    .map(|i| {
                        let a = std::f64::consts::TAU * i as f64 / zeta as f64;
                        Point::new(c.x + radius * a.cos(), c.y + radius * a.sin())
                    })
                    .collect();
                SimplePolygon::new(pts).expect("regular polygon")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticConfig {
    pub n: usize,
    pub m: usize,
    pub shape: AreaShape,
    pub space: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub seed: u64,
    /// Attempts per item before giving up.
    pub max_tries: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n: 50_000,
            m: 50_000,
            shape: AreaShape::default(),
            space: SPACE,
            tau_min: 20.0,
            tau_max: 50.0,
            seed: 0,
            max_tries: 1000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("could not place {what} {placed} of {requested} after {tries} attempts; space too crowded")]
    Crowded {
        what: &'static str,
        placed: usize,
        requested: usize,
        tries: usize,
    },
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
}

/// Bucket grid over bounding boxes.
pub(crate) struct Grid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    pub(crate) fn new(cell: f64) -> Self {
        Grid {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn cells(&self, b: &Mbr) -> impl Iterator<Item = (i64, i64)> {
        let c = self.cell;
        let (x0, x1) = ((b.lo.x / c).floor() as i64, (b.hi.x / c).floor() as i64);
        let (y0, y1) = ((b.lo.y / c).floor() as i64, (b.hi.y / c).floor() as i64);
        (x0..=x1).flat_map(move |x| (y0..=y1).map(move |y| (x, y)))
    }

    pub(crate) fn insert(&mut self, b: &Mbr, idx: usize) {
        let cells: Vec<_> = self.cells(b).collect();
        for k in cells {
            self.buckets.entry(k).or_default().push(idx);
        }
    }

    pub(crate) fn near(&self, b: &Mbr) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .cells(b)
            .filter_map(|k| self.buckets.get(&k))
            .flatten()
            .copied()
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Closed containment: boundary points count as inside.
pub(crate) fn inside_any(p: Point, areas: &[RestrictedArea], grid: &Grid) -> bool {
    grid.near(&Mbr::new(p, p)).into_iter().any(|i| {
        areas[i].mbr().contains_point(p) && point_in_polygon(p, &areas[i].shape) != Containment::Outside
    })
}

pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<Dataset, GenerateError> {
    if !(cfg.space > 0.0) || !(cfg.tau_min > 0.0) || cfg.tau_max < cfg.tau_min {
        return Err(GenerateError::Invalid("space and tau range must be positive"));
    }
    if let AreaShape::Regular { zeta, radius } = cfg.shape {
        if zeta < 3 || !(radius > 0.0) {
            return Err(GenerateError::Invalid("regular areas need zeta >= 3 and radius > 0"));
        }
    }
    let (w, h) = cfg.shape.extent();
    if !(w > 0.0 && h > 0.0) || w >= cfg.space || h >= cfg.space {
        return Err(GenerateError::Invalid("area extent must fit in the space"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut grid = Grid::new(2.0 * w.max(h));
    let mut areas: Vec<RestrictedArea> = Vec::with_capacity(cfg.m);
    let tries_total = cfg.max_tries.max(1);
    for i in 0..cfg.m {
        let mut placed = false;
        for _ in 0..tries_total {
            let c = Point::new(
                rng.gen_range(w / 2.0..cfg.space - w / 2.0),
                rng.gen_range(h / 2.0..cfg.space - h / 2.0),
            );
            let shape = cfg.shape.build(c);
            let b = *shape.mbr();
            if grid.near(&b).into_iter().any(|j| areas[j].mbr().intersects(&b)) {
                continue;
            }
            grid.insert(&b, areas.len());
            areas.push(RestrictedArea::new(AreaId(i as u64), shape));
            placed = true;
            break;
        }
        if !placed {
            return Err(GenerateError::Crowded {
                what: "area",
                placed: i,
                requested: cfg.m,
                tries: tries_total,
            });
        }
    }

    let mut objects = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let mut placed = false;
        for _ in 0..tries_total {
            let p = Point::new(rng.gen_range(0.0..cfg.space), rng.gen_range(0.0..cfg.space));
            if inside_any(p, &areas, &grid) {
                continue;
            }
            let tau = if cfg.tau_max > cfg.tau_min {
                rng.gen_range(cfg.tau_min..cfg.tau_max)
            } else {
                cfg.tau_min
            };
            objects.push(MovingObject::new(ObjectId(i as u64), p, tau).expect("valid object"));
            placed = true;
            break;
        }
        if !placed {
            return Err(GenerateError::Crowded {
                what: "object",
                placed: i,
                requested: cfg.n,
                tries: tries_total,
            });
        }
    }
    Ok(Dataset { objects, areas })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_areas_means_free_placement() {
        let d = generate_synthetic(&SyntheticConfig {
            n: 100,
            m: 0,
            max_tries: 1,
            ..SyntheticConfig::default()
        })
        .unwrap();
        assert_eq!(d.objects.len(), 100);
        assert!(d.objects.iter().all(|o| (20.0..50.0).contains(&o.tau)));
    }

    #[test]
    fn objects_avoid_areas_and_areas_are_disjoint() {
        let d = generate_synthetic(&SyntheticConfig {
            n: 2000,
            m: 3000,
            space: 2000.0,
            seed: 9,
            ..SyntheticConfig::default()
        })
        .unwrap();
        for o in &d.objects {
            assert!(d.areas.iter().all(|a| point_in_polygon(o.location, &a.shape) == Containment::Outside));
        }
        for (i, a) in d.areas.iter().enumerate() {
            for b in &d.areas[i + 1..] {
                assert!(!a.mbr().intersects(b.mbr()));
            }
        }
    }

    #[test]
    fn crowded_space_fails() {
        let err = generate_synthetic(&SyntheticConfig {
            n: 0,
            m: 10_000,
            space: 200.0,
            max_tries: 50,
            ..SyntheticConfig::default()
        })
        .unwrap_err();
        assert!(matches!(err, GenerateError::Crowded { what: "area", .. }));
    }

    #[test]
    fn regular_areas_grow_toward_disc() {
        let area = |zeta| AreaShape::Regular { zeta, radius: 20.0 }.build(Point::new(0.0, 0.0)).area();
        let disc = std::f64::consts::PI * 400.0;
        assert!(area(4) < area(16) && area(16) < area(64) && area(64) < disc);
        assert!((area(4) - 800.0).abs() < 1e-9);
    }
}
