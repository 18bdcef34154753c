//! CSV, JSON and JSON-lines writers.
//!
//! Reals are written with 17 significant digits in `.`-decimal scientific
//! notation. Every file carries the configuration hash and seed: CSV files
//! in a leading `#` comment line, JSON documents and JSON lines as fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use spiral_erw_core::oracle::MomentTable;
use spiral_erw_core::stats::VerificationReport;
use spiral_erw_core::walk::{ErwPath, LatticePath};

/// Provenance stamped on every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub config_sha256: String,
    pub seed: u64,
}

impl Metadata {
    fn comment(&self) -> String {
        format!("# config_sha256={} seed={}\n", self.config_sha256, self.seed)
    }
}

/// `x` with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer(path: &Path, meta: &Metadata) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    out.write_all(meta.comment().as_bytes())?;
    Ok(csv::Writer::from_writer(out))
}

/// Long format: `path_id,n,re,im`.
pub fn write_paths_csv(path: &Path, meta: &Metadata, paths: &[ErwPath]) -> Result<()> {
    let mut w = csv_writer(path, meta)?;
    w.write_record(["path_id", "n", "re", "im"])?;
    for p in paths {
        let id = p.path_index().to_string();
        for (m, z) in p.positions().iter().enumerate() {
            w.write_record([id.as_str(), &(m + 1).to_string(), &real(z.re), &real(z.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One path: `n,re,im`.
pub fn write_path_csv(path: &Path, meta: &Metadata, p: &ErwPath) -> Result<()> {
    let mut w = csv_writer(path, meta)?;
    w.write_record(["n", "re", "im"])?;
    for (m, z) in p.positions().iter().enumerate() {
        w.write_record([(m + 1).to_string(), real(z.re), real(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: `path_id,n,x,y`.
pub fn write_lattice_csv(path: &Path, meta: &Metadata, paths: &[(u64, LatticePath)]) -> Result<()> {
    let mut w = csv_writer(path, meta)?;
    w.write_record(["path_id", "n", "x", "y"])?;
    for (id, p) in paths {
        for (m, [x, y]) in p.positions.iter().enumerate() {
            w.write_record([id.to_string(), (m + 1).to_string(), x.to_string(), y.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `n,re_a,im_a,u,re_q,im_q,v`.
pub fn write_moment_table_csv(path: &Path, meta: &Metadata, table: &MomentTable) -> Result<()> {
    let mut w = csv_writer(path, meta)?;
    w.write_record(["n", "re_a", "im_a", "u", "re_q", "im_q", "v"])?;
    for i in 0..table.len() {
        let (a, q) = (table.a_seq[i], table.q_seq[i]);
        w.write_record([
            (i + 1).to_string(),
            real(a.re),
            real(a.im),
            real(table.u_seq[i]),
            real(q.re),
            real(q.im),
            real(table.v_seq[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One branching run as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchingRecord {
    pub path_id: u64,
    pub n: u64,
    pub tau_n: f64,
    pub z1_re: f64,
    pub z1_im: f64,
    /// Absent outside the superdiffusive regime, where `W` does not exist.
    pub w_re: Option<f64>,
    pub w_im: Option<f64>,
    pub e: f64,
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    #[serde(flatten)]
    inner: &'a T,
    config_sha256: &'a str,
    seed: u64,
}

pub fn write_branching_jsonl(path: &Path, meta: &Metadata, records: &[BranchingRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let line = Stamped { inner: r, config_sha256: &meta.config_sha256, seed: meta.seed };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Pretty JSON document with the metadata fields added at top level.
pub fn write_json<T: Serialize>(path: &Path, meta: &Metadata, value: &T) -> Result<()> {
    let doc = Stamped { inner: value, config_sha256: &meta.config_sha256, seed: meta.seed };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn to_json_line<T: Serialize>(meta: &Metadata, value: &T) -> Result<String> {
    Ok(serde_json::to_string(&Stamped { inner: value, config_sha256: &meta.config_sha256, seed: meta.seed })?)
}

/// `kind,criterion,target,estimate,raw_estimate,stderr,tolerance,comparison,passed`.
pub fn write_summary_csv(path: &Path, meta: &Metadata, report: &VerificationReport) -> Result<()> {
    let mut w = csv_writer(path, meta)?;
    w.write_record(["kind", "criterion", "target", "estimate", "raw_estimate", "stderr", "tolerance", "comparison", "passed"])?;
    let opt = |x: Option<f64>| x.map(real).unwrap_or_default();
    for (kind, list) in [("criterion", &report.criteria), ("diagnostic", &report.diagnostics)] {
        for c in list {
            w.write_record([
                kind.to_string(),
                c.criterion.clone(),
                real(c.target),
                real(c.estimate),
                opt(c.raw_estimate),
                opt(c.stderr),
                real(c.tolerance),
                serde_json::to_value(c.comparison)?.as_str().unwrap_or_default().to_string(),
                c.passed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
