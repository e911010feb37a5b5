//! Loading point and rectangle collections from external sources.
//!
//! Each file is rescaled per axis onto `[0, space]`. Rectangles with zero
//! width or height are dropped, then rectangles that touch or overlap an
//! earlier surviving rectangle, then points that lie inside or on a surviving
//! rectangle.

use std::collections::BTreeSet;
use std::path::Path;

use csprq_core::{
    AccessStats, AreaId, Mbr, MovingObject, ObjectId, Point, RTree, RestrictedArea, SimplePolygon,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{data_lines, parse_f64, read_text, Dataset, DatasetError};
use crate::generate::SPACE;

#[derive(Clone, Debug)]
pub struct RealOptions {
    pub space: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Seeds the distance thresholds assigned to points.
    pub seed: u64,
}

impl Default for RealOptions {
    fn default() -> Self {
        RealOptions {
            space: SPACE,
            tau_min: 20.0,
            tau_max: 50.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub points_read: usize,
    pub points_inside_rects: usize,
    pub points_kept: usize,
    pub rects_read: usize,
    pub rects_degenerate: usize,
    pub rects_overlapping: usize,
    pub rects_kept: usize,
}

#[derive(Clone, Debug)]
pub struct RealLoad {
    pub dataset: Dataset,
    pub report: LoadReport,
}

fn err(path: &Path, line: usize, msg: String) -> DatasetError {
    DatasetError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    }
}

/// `x y` or `id x y` per line.
pub fn parse_raw_points(path: &Path, text: &str) -> Result<Vec<(u64, Point)>, DatasetError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, f) in data_lines(text) {
        let (id, x, y) = match f.len() {
            2 => (out.len() as u64, f[0], f[1]),
            3 => {
                let id = f[0]
                    .parse::<u64>()
                    .map_err(|_| err(path, line, format!("bad id {:?}", f[0])))?;
                (id, f[1], f[2])
            }
            n => return Err(err(path, line, format!("expected `x y` or `id x y`, found {n} fields"))),
        };
        if !seen.insert(id) {
            return Err(err(path, line, format!("duplicate id {id}")));
        }
        let x = parse_f64(x).map_err(|m| err(path, line, m))?;
        let y = parse_f64(y).map_err(|m| err(path, line, m))?;
        out.push((id, Point::new(x, y)));
    }
    Ok(out)
}

/// `xlo ylo xhi yhi` or `id xlo ylo xhi yhi` per line.
pub fn parse_raw_rects(path: &Path, text: &str) -> Result<Vec<(u64, Mbr)>, DatasetError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, f) in data_lines(text) {
        let (id, coords) = match f.len() {
            4 => (out.len() as u64, &f[..]),
            5 => {
                let id = f[0]
                    .parse::<u64>()
                    .map_err(|_| err(path, line, format!("bad id {:?}", f[0])))?;
                (id, &f[1..])
            }
            n => {
                return Err(err(
                    path,
                    line,
                    format!("expected `xlo ylo xhi yhi` with optional id, found {n} fields"),
                ))
            }
        };
        if !seen.insert(id) {
            return Err(err(path, line, format!("duplicate id {id}")));
        }
        let v: Vec<f64> = coords
            .iter()
            .map(|s| parse_f64(s))
            .collect::<Result<_, _>>()
            .map_err(|m| err(path, line, m))?;
        out.push((id, Mbr::new(Point::new(v[0], v[1]), Point::new(v[2], v[3]))));
    }
    Ok(out)
}

/// Per-axis affine map of `[min, max]` onto `[0, space]`.
#[derive(Clone, Copy, Debug)]
struct Scale {
    x0: f64,
    sx: f64,
    y0: f64,
    sy: f64,
}

impl Scale {
    fn fit<I: IntoIterator<Item = Point>>(pts: I, space: f64) -> Scale {
        let b = Mbr::from_points(pts).unwrap_or(Mbr::from_coords(0.0, 0.0, 1.0, 1.0));
        let sx = if b.width() > 0.0 { space / b.width() } else { 1.0 };
        let sy = if b.height() > 0.0 { space / b.height() } else { 1.0 };
        Scale {
            x0: b.lo.x,
            sx,
            y0: b.lo.y,
            sy,
        }
    }

    fn apply(&self, p: Point) -> Point {
        Point::new((p.x - self.x0) * self.sx, (p.y - self.y0) * self.sy)
    }
}

/// Normalizes and filters raw collections.
pub fn filter_real(points: &[(u64, Point)], rects: &[(u64, Mbr)], opts: &RealOptions) -> RealLoad {
    let mut report = LoadReport {
        points_read: points.len(),
        rects_read: rects.len(),
        ..LoadReport::default()
    };
    let ps = Scale::fit(points.iter().map(|p| p.1), opts.space);
    let rs = Scale::fit(rects.iter().flat_map(|r| [r.1.lo, r.1.hi]), opts.space);

    let mut index = RTree::new(csprq_core::DEFAULT_FANOUT).expect("fanout");
    let mut areas = Vec::new();
    for &(id, m) in rects {
        if !(m.width() > 0.0 && m.height() > 0.0) {
            report.rects_degenerate += 1;
            continue;
        }
        let b = Mbr::new(rs.apply(m.lo), rs.apply(m.hi));
        if !(b.width() > 0.0 && b.height() > 0.0) {
            report.rects_degenerate += 1;
            continue;
        }
        if !index.range_search(&b, &mut AccessStats::default()).is_empty() {
            report.rects_overlapping += 1;
            continue;
        }
        index.insert(b, id).expect("unique ids");
        areas.push(RestrictedArea::new(
            AreaId(id),
            SimplePolygon::rectangle(b).expect("positive extent"),
        ));
    }
    report.rects_kept = areas.len();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut objects = Vec::new();
    for &(id, p) in points {
        let q = ps.apply(p);
        let tau = if opts.tau_max > opts.tau_min {
            rng.gen_range(opts.tau_min..opts.tau_max)
        } else {
            opts.tau_min
        };
        if !index.range_search(&Mbr::new(q, q), &mut AccessStats::default()).is_empty() {
            report.points_inside_rects += 1;
            continue;
        }
        objects.push(MovingObject::new(ObjectId(id), q, tau).expect("finite point"));
    }
    report.points_kept = objects.len();
    RealLoad {
        dataset: Dataset { objects, areas },
        report,
    }
}

pub fn load_real(points_path: &Path, rects_path: Option<&Path>, opts: &RealOptions) -> Result<RealLoad, DatasetError> {
    let points = parse_raw_points(points_path, &read_text(points_path)?)?;
    let rects = match rects_path {
        Some(p) => parse_raw_rects(p, &read_text(p)?)?,
        None => Vec::new(),
    };
    Ok(filter_real(&points, &rects, opts))
}
