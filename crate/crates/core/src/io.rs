//! CSV and JSON serialization of fields, density matrices, trajectories and
//! residual reports.
//!
//! Floating-point values are written with 17 significant digits so that a
//! write/read cycle is lossless.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::grid::{Boundary, ComplexField, GridSpec, RealField};
use crate::residual::ResidualReport;
use crate::schrodinger::{PhysicalConstants, Potential, Trajectory};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

/// Writes `bytes` to a sibling temporary file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// `x,re,im` with one row per node.
pub fn write_complex_csv<W: Write>(mut w: W, f: &ComplexField) -> io::Result<()> {
    writeln!(w, "x,re,im")?;
    for (i, z) in f.values().iter().enumerate() {
        writeln!(w, "{},{},{}", fmt(f.grid().x(i)), fmt(z.re), fmt(z.im))?;
    }
    Ok(())
}

/// `x,value` with one row per node.
pub fn write_real_csv<W: Write>(mut w: W, f: &RealField) -> io::Result<()> {
    writeln!(w, "x,value")?;
    for (i, v) in f.values().iter().enumerate() {
        writeln!(w, "{},{}", fmt(f.grid().x(i)), fmt(*v))?;
    }
    Ok(())
}

fn read_rows<R: BufRead>(r: R, header: &str, width: usize) -> io::Result<Vec<Vec<f64>>> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| invalid("empty csv"))??;
    if first.trim() != header {
        return Err(invalid(format!("expected header `{header}`, got `{first}`")));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(format!("row {}: {e}", k + 2)))?;
        if row.len() != width {
            return Err(invalid(format!("row {}: expected {width} columns", k + 2)));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn grid_from_x(xs: &[f64], boundary: Boundary) -> io::Result<GridSpec> {
    if xs.len() < 2 {
        return Err(invalid("too few rows"));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    GridSpec::new(xs.len(), xs[0], dx, boundary).map_err(|e| invalid(e.to_string()))
}

pub fn read_complex_csv<R: BufRead>(r: R, boundary: Boundary) -> io::Result<ComplexField> {
    let rows = read_rows(r, "x,re,im", 3)?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = grid_from_x(&xs, boundary)?;
    ComplexField::new(grid, rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
        .map_err(|e| invalid(e.to_string()))
}

pub fn read_real_csv<R: BufRead>(r: R, boundary: Boundary) -> io::Result<RealField> {
    let rows = read_rows(r, "x,value", 2)?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = grid_from_x(&xs, boundary)?;
    RealField::new(grid, rows.iter().map(|r| r[1]).collect()).map_err(|e| invalid(e.to_string()))
}

/// Metadata written next to a density-matrix CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySidecar {
    pub grid: GridSpec,
    pub threshold: f64,
    pub entries_written: usize,
    pub mask: Vec<(usize, usize)>,
}

/// Rows `i,j,re,im` for every entry with `|rho(i,j)| > threshold`, preceded by
/// a `# threshold=` comment line. Returns the matching JSON sidecar.
pub fn write_density_csv<W: Write>(mut w: W, rho: &DensityMatrix, threshold: f64) -> io::Result<DensitySidecar> {
    writeln!(w, "# threshold={}", fmt(threshold))?;
    writeln!(w, "i,j,re,im")?;
    let n = rho.dim();
    let mut written = 0;
    for i in 0..n {
        for j in 0..n {
            let z = rho.get(i, j);
            if z.norm() > threshold {
                writeln!(w, "{i},{j},{},{}", fmt(z.re), fmt(z.im))?;
                written += 1;
            }
        }
    }
    Ok(DensitySidecar {
        grid: *rho.grid(),
        threshold,
        entries_written: written,
        mask: rho.masked().to_vec(),
    })
}

/// Rebuilds a matrix from its CSV rows; entries not listed are zero.
pub fn read_density_csv<R: BufRead>(r: R, sidecar: &DensitySidecar) -> io::Result<DensityMatrix> {
    let n = sidecar.grid.n_points();
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    let mut seen_header = false;
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != "i,j,re,im" {
                return Err(invalid(format!("unexpected header `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(invalid(format!("bad row `{line}`")));
        }
        let i: usize = parts[0].parse().map_err(|_| invalid("bad row index"))?;
        let j: usize = parts[1].parse().map_err(|_| invalid("bad column index"))?;
        let re: f64 = parts[2].parse().map_err(|_| invalid("bad real part"))?;
        let im: f64 = parts[3].parse().map_err(|_| invalid("bad imaginary part"))?;
        if i >= n || j >= n {
            return Err(invalid(format!("index ({i}, {j}) out of range")));
        }
        values[i * n + j] = Complex64::new(re, im);
    }
    DensityMatrix::new(sidecar.grid, values).map_err(|e| invalid(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub dt: f64,
    pub steps: usize,
    pub grid: GridSpec,
    pub potential: Potential,
    pub constants: PhysicalConstants,
    pub files: Vec<String>,
}

/// Writes `state_NNNNN.csv` for every saved state plus `manifest.json`.
pub fn write_trajectory(
    dir: &Path,
    traj: &Trajectory,
    potential: &Potential,
    constants: &PhysicalConstants,
) -> io::Result<TrajectoryManifest> {
    let grid = *traj.grid().ok_or_else(|| invalid("empty trajectory"))?;
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(traj.len());
    for (k, s) in traj.states().iter().enumerate() {
        let name = format!("state_{k:05}.csv");
        let mut buf = Vec::new();
        write_complex_csv(&mut buf, s)?;
        write_atomic(&dir.join(&name), &buf)?;
        files.push(name);
    }
    let manifest = TrajectoryManifest {
        dt: traj.dt(),
        steps: traj.len() - 1,
        grid,
        potential: potential.clone(),
        constants: *constants,
        files,
    };
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| invalid(e.to_string()))?;
    write_atomic(&dir.join("manifest.json"), &json)?;
    Ok(manifest)
}

pub fn read_trajectory(dir: &Path) -> io::Result<(TrajectoryManifest, Trajectory)> {
    let manifest: TrajectoryManifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)
        .map_err(|e| invalid(e.to_string()))?;
    let states = manifest
        .files
        .iter()
        .map(|f| {
            let file = io::BufReader::new(fs::File::open(dir.join(f))?);
            read_complex_csv(file, manifest.grid.boundary())
        })
        .collect::<io::Result<Vec<_>>>()?;
    let traj = Trajectory::new(manifest.dt, states).map_err(|e| invalid(e.to_string()))?;
    Ok((manifest, traj))
}

/// `t,residual_l2,field_l2,relative`.
pub fn write_residual_csv<W: Write>(mut w: W, report: &ResidualReport) -> io::Result<()> {
    writeln!(w, "t,residual_l2,field_l2,relative")?;
    for k in 0..report.times.len() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt(report.times[k]),
            fmt(report.residual_l2[k]),
            fmt(report.field_l2[k]),
            fmt(report.residual_l2[k] / report.field_l2[k])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::projector_from;
    use crate::grid::make_grid;

    #[test]
    fn complex_csv_layout() {
        let g = make_grid(8, 0.0, 7.0, Boundary::Dirichlet).unwrap();
        let f = ComplexField::from_fn(g, |x| Complex64::new(x, -0.1)).unwrap();
        let mut buf = Vec::new();
        write_complex_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,re,im"));
        assert_eq!(
            lines.next(),
            Some("0.0000000000000000e0,0.0000000000000000e0,-1.0000000000000001e-1")
        );
        assert_eq!(text.lines().count(), 9);
    }

    #[test]
    fn real_csv_round_trip() {
        let g = make_grid(16, -1.0, 2.0, Boundary::Dirichlet).unwrap();
        let f = RealField::from_fn(g, |x| (3.0 * x).sin() / 7.0).unwrap();
        let mut buf = Vec::new();
        write_real_csv(&mut buf, &f).unwrap();
        let back = read_real_csv(&buf[..], Boundary::Dirichlet).unwrap();
        assert_eq!(back.values(), f.values());
        assert!((back.grid().dx() - g.dx()).abs() < 1e-15);
    }

    #[test]
    fn bad_csv_is_rejected() {
        assert!(read_real_csv(&b"x,re,im\n"[..], Boundary::Dirichlet).is_err());
        assert!(read_real_csv(&b"x,value\n0,1\n1,zz\n"[..], Boundary::Dirichlet).is_err());
    }

    #[test]
    fn density_csv_with_threshold() {
        let g = make_grid(8, 0.0, 7.0, Boundary::Dirichlet).unwrap();
        let psi = ComplexField::from_fn(g, |x| Complex64::new((-(x - 3.5).powi(2)).exp(), 0.2)).unwrap();
        let rho = projector_from(&psi);
        let mut buf = Vec::new();
        let side = write_density_csv(&mut buf, &rho, 0.0).unwrap();
        assert_eq!(side.entries_written, 64);
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# threshold=0.0000000000000000e0\ni,j,re,im\n"));
        let back = read_density_csv(&buf[..], &side).unwrap();
        assert_eq!(back.values(), rho.values());

        let mut buf = Vec::new();
        let side = write_density_csv(&mut buf, &rho, 0.5).unwrap();
        assert!(side.entries_written < 64);
        let json = serde_json::to_string(&side).unwrap();
        assert!(json.contains("\"threshold\":0.5"));
    }
}
