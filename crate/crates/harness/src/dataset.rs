//! Line-oriented text formats for objects and restricted areas.
//!
//! Points: `id x y tau`. Areas: `id x1 y1 x2 y2 ... xk yk` or
//! `id RECT xlo ylo xhi yhi`. Blank lines and lines starting with `#` are
//! ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use csprq_core::{
    AreaId, GeometryError, Mbr, MovingObject, ObjectId, Point, RestrictedArea, SimplePolygon,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub objects: Vec<MovingObject>,
    pub areas: Vec<RestrictedArea>,
}

pub(crate) fn read_text(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), DatasetError> {
    fs::write(path, text).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Yields `(line number, fields)` for every data line.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            return None;
        }
        let fields = line
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|f| !f.is_empty())
            .collect();
        Some((i + 1, fields))
    })
}

pub(crate) fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad number {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number {s:?}"))
    }
}

fn parse_id(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("bad id {s:?}"))
}

fn parse_error(path: &Path, line: usize, msg: String) -> DatasetError {
    DatasetError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    }
}

pub fn parse_points(path: &Path, text: &str) -> Result<Vec<MovingObject>, DatasetError> {
    let mut out = Vec::new();
    for (line, f) in data_lines(text) {
        let rec = || -> Result<MovingObject, String> {
            if f.len() != 4 {
                return Err(format!("expected `id x y tau`, found {} fields", f.len()));
            }
            let id = parse_id(f[0])?;
            let p = Point::new(parse_f64(f[1])?, parse_f64(f[2])?);
            let tau = parse_f64(f[3])?;
            MovingObject::new(ObjectId(id), p, tau).map_err(|e| e.to_string())
        };
        out.push(rec().map_err(|m| parse_error(path, line, m))?);
    }
    Ok(out)
}

pub fn parse_areas(path: &Path, text: &str) -> Result<Vec<RestrictedArea>, DatasetError> {
    let mut out = Vec::new();
    for (line, f) in data_lines(text) {
        let rec = || -> Result<RestrictedArea, String> {
            if f.len() < 2 {
                return Err("missing vertices".into());
            }
            let id = AreaId(parse_id(f[0])?);
            let shape = if f[1].eq_ignore_ascii_case("RECT") {
                if f.len() != 6 {
                    return Err("expected `id RECT xlo ylo xhi yhi`".into());
                }
                let v: Vec<f64> = f[2..].iter().map(|s| parse_f64(s)).collect::<Result<_, _>>()?;
                if !(v[0] < v[2] && v[1] < v[3]) {
                    return Err("rectangle has zero or negative extent".into());
                }
                SimplePolygon::rectangle(Mbr::from_coords(v[0], v[1], v[2], v[3]))
            } else {
                let v: Vec<f64> = f[1..].iter().map(|s| parse_f64(s)).collect::<Result<_, _>>()?;
                if !v.len().is_multiple_of(2) {
                    return Err("odd number of coordinates".into());
                }
                let pts = v.chunks(2).map(|c| Point::new(c[0], c[1])).collect();
                SimplePolygon::new(pts)
            };
            let shape = shape.map_err(|e: GeometryError| e.to_string())?;
            Ok(RestrictedArea::new(id, shape))
        };
        out.push(rec().map_err(|m| parse_error(path, line, m))?);
    }
    Ok(out)
}

pub fn read_points(path: &Path) -> Result<Vec<MovingObject>, DatasetError> {
    parse_points(path, &read_text(path)?)
}

pub fn read_areas(path: &Path) -> Result<Vec<RestrictedArea>, DatasetError> {
    parse_areas(path, &read_text(path)?)
}

pub fn read_dataset(points: &Path, areas: &Path) -> Result<Dataset, DatasetError> {
    Ok(Dataset {
        objects: read_points(points)?,
        areas: read_areas(areas)?,
    })
}

/// Shortest decimal that reads back to the same `f64`.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn format_points(objects: &[MovingObject]) -> String {
    let mut s = String::from("# id x y tau\n");
    for o in objects {
        let _ = writeln!(
            s,
            "{} {} {} {}",
            o.id,
            num(o.location.x),
            num(o.location.y),
            num(o.tau)
        );
    }
    s
}

pub fn format_areas(areas: &[RestrictedArea]) -> String {
    let mut s = String::from("# id x1 y1 ... xk yk | id RECT xlo ylo xhi yhi\n");
    for a in areas {
        if a.shape.is_axis_aligned_rectangle() && a.shape.len() == 4 {
            let b = a.mbr();
            let _ = writeln!(
                s,
                "{} RECT {} {} {} {}",
                a.id,
                num(b.lo.x),
                num(b.lo.y),
                num(b.hi.x),
                num(b.hi.y)
            );
        } else {
            let _ = write!(s, "{}", a.id);
            for v in a.shape.vertices() {
                let _ = write!(s, " {} {}", num(v.x), num(v.y));
            }
            s.push('\n');
        }
    }
    s
}

pub fn write_dataset(d: &Dataset, points: &Path, areas: &Path) -> Result<(), DatasetError> {
    write_text(points, &format_points(&d.objects))?;
    write_text(areas, &format_areas(&d.areas))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_area_forms() {
        let text = "# comment\n1 RECT 0 0 4 2\n\n2 0 0, 3 0, 0 3\n";
        let a = parse_areas(Path::new("a.txt"), text).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].shape.area(), 8.0);
        assert_eq!(a[1].shape.area(), 4.5);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "1 0 0 20\n2 x 0 20\n";
        let err = parse_points(Path::new("p.txt"), text).unwrap_err();
        assert!(err.to_string().starts_with("p.txt:2:"), "{err}");
        let err = parse_points(Path::new("p.txt"), "1 0 0 -3\n").unwrap_err();
        assert!(err.to_string().contains(":1:"));
    }

    #[test]
    fn round_trips() {
        let objs = vec![MovingObject::new(ObjectId(5), Point::new(0.1, 1.0 / 3.0), 25.5).unwrap()];
        let back = parse_points(Path::new("p"), &format_points(&objs)).unwrap();
        assert_eq!(back, objs);
        let areas = vec![
            RestrictedArea::new(AreaId(1), SimplePolygon::rectangle(Mbr::from_coords(0.0, 0.0, 40.0, 10.0)).unwrap()),
            RestrictedArea::new(
                AreaId(2),
                SimplePolygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.1), Point::new(0.3, 0.7)]).unwrap(),
            ),
        ];
        let back = parse_areas(Path::new("a"), &format_areas(&areas)).unwrap();
        assert_eq!(back, areas);
    }
}
