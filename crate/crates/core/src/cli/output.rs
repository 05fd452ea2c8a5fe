//! Report artifacts: JSON with fixed float formatting, CSV tables and an
//! SVG histogram of path probabilities.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::{CommandResult, EnsembleResult, ExperimentReport, OrderResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Pretty JSON where every float is written with 17 significant digits.
struct FixedFloat<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Deterministic JSON encoding, terminated by a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Io(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Named CSV tables for a report. Empty when the result has no tabular part.
pub fn csv_tables(report: &ExperimentReport) -> Result<Vec<(&'static str, String)>> {
    let mut tables = Vec::new();
    match &report.result {
        CommandResult::Simulate(r) | CommandResult::Pipeline(r) => {
            tables.push(("paths.csv", to_csv(&r.path_rows())?));
        }
        CommandResult::Maxent(m) => {
            #[derive(Serialize)]
            struct Row {
                index: usize,
                action: f64,
                probability: f64,
            }
            let rows: Vec<Row> = m
                .actions
                .iter()
                .zip(&m.solution.probabilities)
                .enumerate()
                .map(|(index, (&action, &probability))| Row { index, action, probability })
                .collect();
            tables.push(("maxent.csv", to_csv(&rows)?));
        }
        CommandResult::Order(OrderResult::RandomVariables { cdf_table, coupling, .. }) => {
            tables.push(("cdf.csv", to_csv(cdf_table)?));
            if let Some(c) = coupling {
                #[derive(Serialize)]
                struct Row {
                    level: f64,
                    z_prob: f64,
                    psi1: f64,
                    psi2: f64,
                }
                let rows: Vec<Row> = (0..c.levels.len())
                    .map(|m| Row { level: c.levels[m], z_prob: c.z_probs[m], psi1: c.psi1[m], psi2: c.psi2[m] })
                    .collect();
                tables.push(("coupling.csv", to_csv(&rows)?));
            }
        }
        CommandResult::Order(OrderResult::Paths { comparisons, .. }) => {
            tables.push(("comparisons.csv", to_csv(comparisons)?));
        }
        CommandResult::Ergodic(e) => {
            #[derive(Serialize)]
            struct Row {
                observable: super::Observable,
                time_average: f64,
                space_average: f64,
                abs_difference: f64,
                bound: f64,
                steady_state: bool,
            }
            let rows: Vec<Row> = e
                .observables
                .iter()
                .map(|o| Row {
                    observable: o.observable,
                    time_average: o.time_average,
                    space_average: o.space_average,
                    abs_difference: o.abs_difference,
                    bound: o.bound,
                    steady_state: o.steady_state,
                })
                .collect();
            tables.push(("ergodic.csv", to_csv(&rows)?));
        }
        CommandResult::Entropy(_) => {}
    }
    Ok(tables)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv emits UTF-8"))
}

/// Bar chart of path probabilities, most probable first.
pub fn probability_svg(r: &EnsembleResult) -> String {
    const W: f64 = 640.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let probs = r.distribution.probabilities();
    let labels = r.distribution.labels();
    let n = probs.len().max(1) as f64;
    let pmax = probs.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let bar = (W - 2.0 * PAD) / n;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ =
        writeln!(svg, r#"<line x1="{PAD}" y1="{y}" x2="{x2}" y2="{y}" stroke="black"/>"#, y = H - PAD, x2 = W - PAD);
    let _ = writeln!(svg, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{y}" stroke="black"/>"#, y = H - PAD);
    for (k, (&p, label)) in probs.iter().zip(labels).enumerate() {
        let h = (H - 2.0 * PAD) * p / pmax;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="steelblue"><title>{label}: {p:.6}</title></rect>"#,
            x = PAD + k as f64 * bar,
            y = H - PAD - h,
            w = (bar * 0.9).max(0.5),
        );
    }
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{y}" font-size="12">p max = {pmax:.6}</text>"#, y = PAD - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="12" text-anchor="end">{n} paths</text>"#,
        x = W - PAD,
        y = H - 12.0,
        n = probs.len()
    );
    svg.push_str("</svg>\n");
    svg
}

/// Writes `report.json`, the CSV tables and, when asked for and available,
/// `paths.svg` into `dir`. Returns the written paths.
pub fn write_artifacts(report: &ExperimentReport, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    put("report.json", &to_json(report)?)?;
    for (name, text) in csv_tables(report)? {
        put(name, &text)?;
    }
    if svg {
        if let CommandResult::Simulate(r) | CommandResult::Pipeline(r) = &report.result {
            put("paths.svg", &probability_svg(r))?;
        }
    }
    Ok(written)
}

/// Text for standard output: the JSON report, or its first CSV table
/// (falling back to JSON when there is none).
pub fn render(report: &ExperimentReport, format: Format) -> Result<String> {
    if format == Format::Csv {
        if let Some((_, text)) = csv_tables(report)?.into_iter().next() {
            return Ok(text);
        }
    }
    to_json(report)
}
