//! File formats: CSV trajectories and energies, `|psi|` matrices with a
//! gnuplot companion, and small JSON records.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use cgle_core::{ComplexField, Point};
use serde::Serialize;

use crate::error::{LabError, Result};

pub const TRAJECTORY_HEADER: [&str; 5] = ["t", "vortex_id", "x", "y", "winding"];
pub const ENERGY_HEADER: [&str; 4] = ["t", "E_total", "E_kin", "E_int"];

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub id: usize,
    pub p: Point,
    pub winding: i8,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(LabError::io(path, None))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> LabError + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => LabError::Io {
            path: path.to_path_buf(),
            step: None,
            source,
        },
        other => LabError::Malformed {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

/// Rows are written sorted by time, then vortex id.
pub fn write_trajectories(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.id.cmp(&b.id)));
    let mut w = csv_writer(path)?;
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err(path))?;
    for r in &rows {
        w.write_record([fmt(r.t), r.id.to_string(), fmt(r.p.x), fmt(r.p.y), r.winding.to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(LabError::io(path, None))
}

pub fn write_energies(path: &Path, rows: &[(f64, [f64; 3])]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(ENERGY_HEADER).map_err(csv_err(path))?;
    for (t, e) in rows {
        w.write_record([fmt(*t), fmt(e[0]), fmt(e[1]), fmt(e[2])])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(LabError::io(path, None))
}

fn parse<T: std::str::FromStr>(path: &Path, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| LabError::Malformed {
        path: path.to_path_buf(),
        reason: format!("cannot parse {s:?}"),
    })
}

fn checked_reader(path: &Path, header: &[&str]) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(LabError::io(path, None))?;
    let mut r = csv::Reader::from_reader(file);
    let found = r.headers().map_err(csv_err(path))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(LabError::Malformed {
            path: path.to_path_buf(),
            reason: format!("unexpected header {found:?}"),
        });
    }
    Ok(r)
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let mut r = checked_reader(path, &TRAJECTORY_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        out.push(TrajectoryRow {
            t: parse(path, &rec[0])?,
            id: parse(path, &rec[1])?,
            p: Point::new(parse(path, &rec[2])?, parse(path, &rec[3])?),
            winding: parse(path, &rec[4])?,
        });
    }
    Ok(out)
}

pub fn read_energies(path: &Path) -> Result<Vec<(f64, [f64; 3])>> {
    let mut r = checked_reader(path, &ENERGY_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        let v: Vec<f64> = (0..4).map(|k| parse(path, &rec[k])).collect::<Result<_>>()?;
        out.push((v[0], [v[1], v[2], v[3]]));
    }
    Ok(out)
}

/// Per-vortex time series keyed by id, with the vortex winding.
pub fn group_by_vortex(rows: &[TrajectoryRow]) -> BTreeMap<usize, (i8, Vec<(f64, Point)>)> {
    let mut out: BTreeMap<usize, (i8, Vec<(f64, Point)>)> = BTreeMap::new();
    for r in rows {
        out.entry(r.id).or_insert_with(|| (r.winding, Vec::new())).1.push((r.t, r.p));
    }
    out
}

/// Writes `|psi|` as a plain matrix (one row per y node) and a gnuplot
/// script that draws its contours. Returns the matrix path.
pub fn write_snapshot(dir: &Path, field: &ComplexField, step: u64) -> Result<PathBuf> {
    let stem = format!("abs_psi_{step:09}");
    let data = dir.join(format!("{stem}.dat"));
    let g = field.grid();
    let m = field.modulus();
    {
        let file = File::create(&data).map_err(LabError::io(&data, Some(step)))?;
        let mut w = BufWriter::new(file);
        for j in 0..=g.ny() {
            let row: Vec<String> = (0..=g.nx()).map(|i| fmt(m[[i, j]])).collect();
            writeln!(w, "{}", row.join(" ")).map_err(LabError::io(&data, Some(step)))?;
        }
        w.flush().map_err(LabError::io(&data, Some(step)))?;
    }
    let (a, _, c, _) = g.bounds();
    let script = format!(
        "set view map\nset size ratio -1\nunset surface\nset contour base\n\
         set cntrparam levels incremental 0.1,0.1,0.9\n\
         splot '{stem}.dat' matrix using ({a}+$1*{hx}):({c}+$2*{hy}):3 with lines notitle\n",
        hx = g.hx(),
        hy = g.hy(),
    );
    let gp = dir.join(format!("{stem}.gp"));
    std::fs::write(&gp, script).map_err(LabError::io(&gp, Some(step)))?;
    Ok(data)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| LabError::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    std::fs::write(path, text + "\n").map_err(LabError::io(path, None))
}
