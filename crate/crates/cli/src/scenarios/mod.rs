//! Scenario execution: each subcommand composes core operations, writes
//! its artifacts, and records checks in the run manifest.

pub mod field_sample;
pub mod oracle;
pub mod report;
pub mod response;
pub mod simulate;
pub mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::RawConfig;
use crate::manifest::Manifest;
use crate::{CliError, RunArgs};

/// Everything a scenario needs: parsed configuration, effective seed,
/// output directory, and the manifest under construction.
pub struct Ctx {
    pub raw: RawConfig,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub quiet: bool,
    pub manifest: Manifest,
    started: Instant,
}

impl Ctx {
    fn prepare(scenario: &'static str, args: &RunArgs) -> Result<Self, CliError> {
        let raw = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Parse(format!("cannot read config `{}`: {e}", path.display()))
                })?;
                RawConfig::parse(&text)?
            }
            None => RawConfig::default(),
        };
        // --seed overrides the config-file seed.
        let file_seed = crate::config::Reader::new(&raw, scenario).opt_u64("seed")?;
        let seed = args.seed.or(file_seed);
        std::fs::create_dir_all(&args.out)?;
        let digest = {
            let mut blob = raw.canonical_text();
            blob.push_str(scenario);
            if let Some(s) = seed {
                blob.push_str(&format!("\nseed-override={s}"));
            }
            format!("{:016x}", zpflab_core::rng::fnv1a64(blob.as_bytes()))
        };
        Ok(Ctx {
            seed,
            out: args.out.clone(),
            quiet: args.quiet,
            manifest: Manifest::new(scenario, digest, seed),
            raw,
            started: Instant::now(),
        })
    }

    /// The seed, required for stochastic scenarios.
    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::Validation(format!(
                "scenario `{}` is stochastic: provide `seed` in the config or --seed",
                self.manifest.scenario
            ))
        })
    }

    pub fn artifact(&mut self, name: &str) -> PathBuf {
        self.manifest.artifacts.push(name.to_string());
        self.out.join(name)
    }

    pub fn say(&self, line: &str) {
        if !self.quiet {
            println!("{line}");
        }
    }

    fn finish(mut self) -> Result<bool, CliError> {
        self.manifest.wall_time_s = self.started.elapsed().as_secs_f64();
        self.manifest.write(&self.out)?;
        let ok = self.manifest.all_passed();
        self.say(&format!(
            "{}: {} checks, {} passed, {} failed -> {}",
            self.manifest.scenario,
            self.manifest.checks.len(),
            self.manifest.n_pass,
            self.manifest.n_fail,
            self.out.join("manifest.json").display()
        ));
        Ok(ok)
    }
}

/// Run one named scenario end to end; returns whether all checks passed.
pub fn run_scenario(name: &'static str, args: &RunArgs) -> Result<bool, CliError> {
    let mut ctx = Ctx::prepare(name, args)?;
    match name {
        "field-sample" => field_sample::run(&mut ctx)?,
        "simulate" => simulate::run(&mut ctx)?,
        "response" => response::run(&mut ctx)?,
        "oracle" => oracle::run(&mut ctx)?,
        "verify" => verify::run(&mut ctx)?,
        other => return Err(CliError::Validation(format!("unknown scenario `{other}`"))),
    }
    ctx.finish()
}

/// Shared helper: zip equally long f64 columns into formatted CSV rows.
pub(crate) fn float_rows<'a>(cols: &'a [&'a [f64]]) -> impl Iterator<Item = Vec<String>> + 'a {
    let n = cols.first().map(|c| c.len()).unwrap_or(0);
    (0..n).map(move |i| {
        cols.iter()
            .map(|c| crate::textio::fmt_f64(c[i]))
            .collect::<Vec<String>>()
    })
}

pub(crate) fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let body =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Environment(e.to_string()))?;
    std::fs::write(path, body + "\n")?;
    Ok(())
}
