use std::fmt::Write as _;
use std::path::Path;

use crate::artifact_path;

/// A numeric table written as `<prefix>_<name>.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Self {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn column(&self, name: &str) -> usize {
        self.header.iter().position(|h| *h == name).expect("known column") + 1
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v)))?;
        }
        w.flush()
    }
}

/// Shortest round-trip form; non-finite values become `nan`.
fn format_value(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        "nan".to_owned()
    }
}

/// One gnuplot panel: `y` columns against `x` from one table.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub table: &'static str,
    pub title: &'static str,
    pub x: &'static str,
    pub y: Vec<&'static str>,
    pub style: &'static str,
    pub yrange: Option<(f64, f64)>,
}

pub(crate) fn write_gnuplot(path: &Path, prefix: &Path, tables: &[Table], plots: &[PlotSpec]) -> std::io::Result<()> {
    let png = artifact_path(prefix, ".png");
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile missing 'nan'");
    let _ = writeln!(s, "set terminal pngcairo size 900,{}", 420 * plots.len());
    let _ = writeln!(s, "set output '{}'", base(&png));
    let _ = writeln!(s, "set key outside");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set multiplot layout {},1", plots.len());
    for plot in plots {
        let table = tables
            .iter()
            .find(|t| t.name == plot.table)
            .expect("plot refers to a table");
        let file = base(&artifact_path(prefix, &format!("_{}.csv", table.name)));
        let _ = writeln!(s, "set title '{}'", plot.title);
        let _ = writeln!(s, "set xlabel '{}'", plot.x);
        match plot.yrange {
            Some((lo, hi)) => {
                let _ = writeln!(s, "set yrange [{lo:?}:{hi:?}]");
            }
            None => {
                let _ = writeln!(s, "set autoscale y");
            }
        }
        let series: Vec<String> = plot
            .y
            .iter()
            .map(|y| {
                format!(
                    "'{file}' using {}:{} skip 1 with {} title '{y}'",
                    table.column(plot.x),
                    table.column(y),
                    plot.style
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    std::fs::write(path, s)
}

fn base(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_and_missing_is_nan() {
        assert_eq!(format_value(0.1), "0.1");
        assert_eq!(format_value(-2.5e-12), "-2.5e-12");
        assert_eq!(format_value(f64::INFINITY), "nan");
        let v: f64 = format_value(1.0 / 3.0).parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }

    #[test]
    fn gnuplot_columns_follow_the_header() {
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("run");
        let mut t = Table::new("data", &["x", "a", "b"]);
        t.push(vec![0.0, 1.0, 2.0]);
        let plot = PlotSpec {
            table: "data",
            title: "t",
            x: "x",
            y: vec!["b"],
            style: "lines",
            yrange: None,
        };
        let gp = dir.path().join("run.gp");
        write_gnuplot(&gp, &prefix, &[t], &[plot]).unwrap();
        let text = std::fs::read_to_string(gp).unwrap();
        assert!(text.contains("'run_data.csv' using 1:3"));
        assert!(text.contains("set output 'run.png'"));
    }
}
