use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::table::{EquivalenceTable, TableRow};
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    (x0, x1, y0, y1)
}

/// A fixed-size line chart. Output depends only on the input numbers.
fn svg(title: &str, x_label: &str, series: &[Series]) -> String {
    let (x0, x1, y0, y1) = bounds(series);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            tick(v)
        );
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            tick(v)
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let mut pts = String::new();
        for &(x, y) in ser
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
        {
            let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            ser.color,
            pts.trim_end()
        );
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/>"#,
            MARGIN + 10.0,
            MARGIN + 30.0,
            ser.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            MARGIN + 36.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    format!("{:.4}", v)
        .trim_end_matches('0')
        .trim_end_matches('.')
        .to_string()
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn emit_row(row: &TableRow, outdir: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    let c = &row.curves;
    if !c.x.is_empty() {
        let pair = |ys: &[f64]| {
            c.x.iter()
                .copied()
                .zip(ys.iter().copied())
                .collect::<Vec<_>>()
        };
        let mut series = vec![Series {
            label: "F",
            color: "#1f77b4",
            points: pair(&c.f),
        }];
        let mut header = vec!["x", "F"];
        if let (Some(p), Some(n)) = (&c.p, &c.n) {
            series.push(Series {
                label: "p",
                color: "#d62728",
                points: pair(p),
            });
            series.push(Series {
                label: "n",
                color: "#2ca02c",
                points: pair(n),
            });
            header.extend(["p", "n"]);
        }
        let path = outdir.join(format!("{}_fpn.svg", row.name));
        std::fs::write(&path, svg(&format!("{}: F, p, n", row.name), "x", &series))?;
        files.push(path);
        let path = outdir.join(format!("{}_fpn.csv", row.name));
        write_csv(
            &path,
            &header,
            (0..c.x.len()).map(|i| {
                let mut r = vec![c.x[i], c.f[i]];
                if let (Some(p), Some(n)) = (&c.p, &c.n) {
                    r.extend([p[i], n[i]]);
                }
                r
            }),
        )?;
        files.push(path);
    }
    if let Some((xs, fs)) = &c.density {
        let pts: Vec<(f64, f64)> = xs.iter().copied().zip(fs.iter().copied()).collect();
        let path = outdir.join(format!("{}_density.svg", row.name));
        let series = [Series {
            label: "f",
            color: "#9467bd",
            points: pts.clone(),
        }];
        std::fs::write(
            &path,
            svg(&format!("{}: recovered density", row.name), "x", &series),
        )?;
        files.push(path);
        let path = outdir.join(format!("{}_density.csv", row.name));
        write_csv(&path, &["x", "f"], pts.iter().map(|&(x, y)| vec![x, y]))?;
        files.push(path);
    }
    if !c.omega.is_empty() {
        let path = outdir.join(format!("{}_omega.svg", row.name));
        let series = [Series {
            label: "omega",
            color: "#ff7f0e",
            points: c.omega.clone(),
        }];
        std::fs::write(
            &path,
            svg(&format!("{}: AC modulus", row.name), "delta", &series),
        )?;
        files.push(path);
        let path = outdir.join(format!("{}_omega.csv", row.name));
        write_csv(
            &path,
            &["delta", "omega"],
            c.omega.iter().map(|&(d, w)| vec![d, w]),
        )?;
        files.push(path);
    }
    Ok(())
}

/// Writes `<name>_{fpn,density,omega}.{svg,csv}` for every row that has the
/// curve, and returns the paths in row order.
pub fn emit_plots(table: &EquivalenceTable, outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir)?;
    let mut files = Vec::new();
    for row in &table.rows {
        emit_row(row, outdir, &mut files)?;
    }
    Ok(files)
}

/// `table.json` plus the plots.
pub fn write_report(table: &EquivalenceTable, outdir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir)?;
    let path = outdir.join("table.json");
    std::fs::write(&path, table.to_json()? + "\n")?;
    let mut files = vec![path];
    files.extend(emit_plots(table, outdir)?);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{default_corpus, run_corpus, Corpus, RunConfig};

    fn subset(names: &[&str]) -> Corpus {
        let mut c = default_corpus();
        c.entries.retain(|e| names.contains(&e.name.as_str()));
        c
    }

    #[test]
    fn plots_are_deterministic() {
        let c = subset(&["identity", "zigzag", "cantor_6"]);
        let cfg = RunConfig { grid_cells: 256 };
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let f1 = write_report(&run_corpus(&c, &cfg), d1.path()).unwrap();
        let f2 = write_report(&run_corpus(&c, &cfg), d2.path()).unwrap();
        assert_eq!(f1.len(), f2.len());
        for (a, b) in f1.iter().zip(&f2) {
            assert_eq!(a.file_name(), b.file_name());
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        }
        assert!(f1.iter().any(|p| p.ends_with("cantor_6_fpn.svg")));
    }

    fn read_fpn(dir: &Path, name: &str) -> Vec<Vec<f64>> {
        let mut r = csv::Reader::from_path(dir.join(format!("{name}_fpn.csv"))).unwrap();
        r.records()
            .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
            .collect()
    }

    #[test]
    fn sidecars_show_the_expected_curves() {
        let c = subset(&["identity", "zigzag", "cantor_6"]);
        let d = tempfile::tempdir().unwrap();
        emit_plots(&run_corpus(&c, &RunConfig { grid_cells: 256 }), d.path()).unwrap();
        // p = F for a non-decreasing map starting at 0
        for name in ["cantor_6", "identity"] {
            let rows = read_fpn(d.path(), name);
            assert_eq!(rows.len(), 1024);
            assert!(rows
                .iter()
                .all(|r| (r[1] - r[2]).abs() < 1e-12 && r[3].abs() < 1e-12));
        }
        // zigzag: p(x) = 4x
        for r in read_fpn(d.path(), "zigzag") {
            assert!((r[2] - 4.0 * r[0]).abs() < 1e-12);
        }
    }
}
