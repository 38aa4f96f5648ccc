//! Text format: a header `# d=<d> n=<n>`, then one point per line as `d`
//! reals followed by the integer id.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Point, PointSet};

pub fn format_point_set(p: &PointSet) -> String {
    let mut s = format!("# d={} n={}\n", p.dim(), p.len());
    for q in p.iter() {
        for c in &q.coords {
            write!(s, "{c} ").unwrap();
        }
        writeln!(s, "{}", q.id).unwrap();
    }
    s
}

pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let (d, n) = parse_header(header)?;
    let mut points = Vec::with_capacity(n);
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != d + 1 {
            return Err(Error::Parse(format!("line {}: expected {} fields, got {}", lineno + 2, d + 1, fields.len())));
        }
        let coords = fields[..d]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2))))
            .collect::<Result<Vec<f64>>>()?;
        let id = fields[d].parse::<u32>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
        points.push(Point::new(id, coords));
    }
    if points.len() != n {
        return Err(Error::Parse(format!("header says n={n}, found {} points", points.len())));
    }
    PointSet::new(d, points)
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad header {line:?}"));
    let rest = line.trim().strip_prefix('#').ok_or_else(bad)?;
    let (mut d, mut n) = (None, None);
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("d=") {
            d = Some(v.parse().map_err(|_| bad())?);
        } else if let Some(v) = tok.strip_prefix("n=") {
            n = Some(v.parse().map_err(|_| bad())?);
        }
    }
    Ok((d.ok_or_else(bad)?, n.ok_or_else(bad)?))
}

pub fn write_point_set(path: impl AsRef<Path>, p: &PointSet) -> Result<()> {
    std::fs::write(path, format_point_set(p))?;
    Ok(())
}

pub fn read_point_set(path: impl AsRef<Path>) -> Result<PointSet> {
    parse_point_set(&std::fs::read_to_string(path)?)
}
