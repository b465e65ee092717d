//! Output files are assembled in memory, written next to their targets under
//! temporary names, and renamed only once every write has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use wavecomp::experiments::{ExperimentResult, Histogram, Profile};

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: String,
    pub kind: &'static str,
    pub file: String,
}

/// Top-level index written as `result.json`.
#[derive(Debug, Serialize)]
pub struct ResultIndex<'a, C: Serialize> {
    pub config: &'a C,
    pub seed: u64,
    pub version: &'static str,
    pub artifacts: &'a [Artifact],
}

#[derive(Debug, Default)]
pub struct Staged {
    files: Vec<(String, Vec<u8>)>,
    artifacts: Vec<Artifact>,
}

impl Staged {
    pub fn add(&mut self, name: &str, kind: &'static str, file: String, bytes: Vec<u8>) {
        self.artifacts.push(Artifact {
            name: name.to_owned(),
            kind,
            file: file.clone(),
        });
        self.files.push((file, bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, kind: &'static str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.add(name, kind, format!("{name}.json"), bytes);
        Ok(())
    }

    /// Writes every file plus `result.json` into `dir`.
    pub fn commit<C: Serialize>(mut self, dir: &Path, config: &C, seed: u64) -> Result<Vec<PathBuf>> {
        let index = ResultIndex {
            config,
            seed,
            version: wavecomp::VERSION,
            artifacts: &self.artifacts,
        };
        let mut bytes = serde_json::to_vec_pretty(&index)?;
        bytes.push(b'\n');
        self.files.push(("result.json".into(), bytes));

        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let pid = std::process::id();
        let mut staged = Vec::with_capacity(self.files.len());
        for (file, bytes) in &self.files {
            let tmp = dir.join(format!(".{file}.{pid}.tmp"));
            if let Err(e) = fs::write(&tmp, bytes) {
                staged.iter().for_each(|(t, _): &(PathBuf, PathBuf)| {
                    let _ = fs::remove_file(t);
                });
                let _ = fs::remove_file(&tmp);
                return Err(e).with_context(|| format!("cannot write {}", tmp.display()));
            }
            staged.push((tmp, dir.join(file)));
        }
        for (tmp, target) in &staged {
            fs::rename(tmp, target)
                .with_context(|| format!("cannot move output into {}", target.display()))?;
        }
        Ok(staged.into_iter().map(|(_, t)| t).collect())
    }
}

pub fn histogram_csv(h: &Histogram) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin_center_m", "counts"])?;
    for (x, c) in h.bin_centers.iter().zip(&h.counts) {
        w.write_record([x.to_string(), c.to_string()])?;
    }
    Ok(w.into_inner()?)
}

pub fn profile_csv(p: &Profile) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["position_m", "value"])?;
    for (x, v) in p.positions.iter().zip(&p.values) {
        w.write_record([x.to_string(), v.to_string()])?;
    }
    Ok(w.into_inner()?)
}

fn scalars_csv(result: &ExperimentResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "value"])?;
    for (k, v) in &result.scalars {
        w.write_record([k.clone(), v.to_string()])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Stages an experiment result. CSV output has one file per histogram and
/// profile; JSON output embeds everything in one document. Fits and node
/// lists are JSON records either way.
pub fn stage_result(result: &ExperimentResult, format: Format) -> Result<Staged> {
    let mut staged = Staged::default();
    match format {
        Format::Csv => {
            for (name, h) in &result.histograms {
                staged.add(name, "histogram", format!("histogram_{name}.csv"), histogram_csv(h)?);
            }
            for (name, p) in &result.profiles {
                staged.add(name, "profile", format!("profile_{name}.csv"), profile_csv(p)?);
            }
            staged.add("scalars", "scalars", "scalars.csv".into(), scalars_csv(result)?);
            if !result.fits.is_empty() {
                staged.add_json("fits", "fits", &result.fits)?;
            }
            for (name, values) in &result.series {
                staged.add_json(name, "series", values)?;
            }
        }
        Format::Json => staged.add_json(&result.experiment, "experiment", result)?,
    }
    Ok(staged)
}
