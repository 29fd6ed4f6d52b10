use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use anyhow::Context;

use crate::config::Format;
use crate::sweep::{SweepRow, COLUMNS};

/// Nine significant digits, so reruns give identical bytes.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn record(r: &SweepRow) -> Vec<String> {
    vec![
        r.p.to_string(),
        r.d.to_string(),
        r.family.clone(),
        r.trial.to_string(),
        opt(&r.set_size),
        opt(&r.prod_size),
        r.ratio.map(fmt_float).unwrap_or_default(),
        opt(&r.d_energy),
        opt(&r.d_star),
        opt(&r.m_energy),
        opt(&r.t_nde),
        opt(&r.t_de),
        opt(&r.t_star),
        opt(&r.degenerate_pairs),
        r.runtime_ms.map(fmt_float).unwrap_or_default(),
        r.seed.to_string(),
        opt(&r.error),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> anyhow::Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    out.write_record(COLUMNS)?;
    for r in rows {
        out.write_record(record(r))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut w: W) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, w: W) -> anyhow::Result<()> {
    match format {
        Format::Csv => write_csv(rows, w),
        Format::Json => write_json(rows, w),
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(rows: &[SweepRow], format: Format, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_rows(rows, format, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => write_rows(rows, format, io::stdout().lock()),
    }
}

pub fn read_csv<R: Read>(r: R) -> anyhow::Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    anyhow::ensure!(header == COLUMNS, "unexpected CSV header {header:?}");
    rdr.deserialize()
        .map(|row| row.context("parsing CSV row"))
        .collect()
}
