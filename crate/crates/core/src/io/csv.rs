use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scenarios::{Snapshot, SnapshotSet};

/// Column names: `x[,y],rho,u…,b…,v…,flux_u…,flux_b…,flux_v…`, with `_x`/`_y`
/// suffixes on vector columns in 2D.
pub fn snapshot_header(dim: usize) -> String {
    let mut cols: Vec<String> = vec!["x".into()];
    if dim == 2 {
        cols.push("y".into());
    }
    cols.push("rho".into());
    for name in ["u", "b", "v", "flux_u", "flux_b", "flux_v"] {
        if dim == 1 {
            cols.push(name.into());
        } else {
            cols.push(format!("{name}_x"));
            cols.push(format!("{name}_y"));
        }
    }
    cols.join(",")
}

fn push_value(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("nan");
    } else {
        let _ = write!(out, "{v:.16e}");
    }
}

/// One snapshot as CSV text: 17 significant digits, rows in grid index
/// order, LF line endings, masked velocities written as `nan`.
pub fn snapshot_csv(snapshot: &Snapshot) -> String {
    let f = &snapshot.fields;
    let dim = f.dim();
    let mut out = String::with_capacity(f.rho.len() * 40 * (4 + 6 * dim));
    out.push_str(&snapshot_header(dim));
    out.push('\n');
    for i in 0..f.rho.len() {
        let p = f.grid.point(i);
        let mut row: Vec<f64> = p[..dim].to_vec();
        row.push(f.rho[i]);
        for field in [&f.u, &f.b, &f.v, &f.flux_u, &f.flux_b, &f.flux_v] {
            row.extend(field.iter().map(|c| c[i]));
        }
        for (k, v) in row.into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            push_value(&mut out, v);
        }
        out.push('\n');
    }
    out
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn snapshot_stem(index: usize) -> String {
    format!("snapshot_{index:03}")
}

/// Writes `snapshot_NNN.csv` for each snapshot into `dir`.
pub fn write_snapshots(set: &SnapshotSet, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::with_capacity(set.snapshots.len());
    for (k, snap) in set.snapshots.iter().enumerate() {
        let path = dir.join(format!("{}.csv", snapshot_stem(k)));
        write_file(&path, snapshot_csv(snap).as_bytes())?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{GridSpec, UnitsConfig};
    use crate::scenarios::{run_free_packet, run_ho_2d_rotating};

    #[test]
    fn one_dimensional_layout() {
        let grid = GridSpec::line(-40.0, 40.0, 1024).unwrap();
        let set = run_free_packet(1.0, &UnitsConfig::default(), &grid, &[0.0]).unwrap();
        let text = snapshot_csv(&set.snapshots[0]);
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines.len(), 1026);
        assert_eq!(lines[1025], "");
        assert_eq!(text.lines().count(), 1025);
        assert_eq!(lines[0], "x,rho,u,b,v,flux_u,flux_b,flux_v");
        assert!(!text.contains('\r'));
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 8);
        assert_eq!(first[0], "-4.0000000000000000e1");
        let mid: f64 = lines[513].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(mid, set.snapshots[0].fields.rho[512]);
    }

    #[test]
    fn two_dimensional_layout_and_masks() {
        let grid = GridSpec::square(-6.0, 6.0, 33).unwrap();
        let (set, _) = run_ho_2d_rotating(1.0, &UnitsConfig::default(), &grid, &[0.0]).unwrap();
        let text = snapshot_csv(&set.snapshots[0]);
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "x,y,rho,u_x,u_y,b_x,b_y,v_x,v_y,flux_u_x,flux_u_y,flux_b_x,flux_b_y,flux_v_x,flux_v_y"
        );
        // The node at the origin is masked.
        let centre = text.lines().nth(1 + 16 * 33 + 16).unwrap();
        assert!(centre.starts_with("0.0000000000000000e0,0.0000000000000000e0,"), "{centre}");
        assert!(centre.contains(",nan,"), "{centre}");
        // Second row steps along y.
        let second: Vec<f64> = text.lines().nth(2).unwrap().split(',').take(2).map(|v| v.parse().unwrap()).collect();
        assert_eq!(second, vec![-6.0, -5.625]);
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::line(-10.0, 10.0, 64).unwrap();
        let set = run_free_packet(1.0, &UnitsConfig::default(), &grid, &[0.0, 1.0]).unwrap();
        let a = write_snapshots(&set, dir.path()).unwrap();
        let first: Vec<Vec<u8>> = a.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let b = write_snapshots(&set, dir.path()).unwrap();
        assert_eq!(a, b);
        for (p, bytes) in b.iter().zip(first) {
            assert_eq!(std::fs::read(p).unwrap(), bytes);
        }
    }
}
