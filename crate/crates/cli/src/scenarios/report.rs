//! `report`: consolidate manifests from several runs into one table.

use std::collections::BTreeMap;
use std::path::Path;

use crate::manifest::{Check, Manifest};
use crate::textio::{fmt_f64, write_csv};
use crate::{CliError, ReportArgs};

struct Run {
    id: String,
    manifest: Manifest,
}

/// A table row: one check definition, one value column per run.
struct Row {
    name: String,
    state_index: Option<usize>,
    target: f64,
    tolerance: f64,
    cells: BTreeMap<usize, (f64, bool)>, // run index -> (value, pass)
}

fn signature(c: &Check) -> (Option<usize>, u64, u64) {
    (c.state_index, c.target.to_bits(), c.tolerance.to_bits())
}

pub fn run(args: &ReportArgs) -> Result<bool, CliError> {
    let mut runs = Vec::new();
    for path in &args.manifests {
        let manifest = Manifest::read(path)?;
        let stem = Path::new(path)
            .parent()
            .and_then(|p| p.file_name())
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "run".to_string());
        let mut id = format!(
            "{stem}-{}",
            &manifest.config_hash[..8.min(manifest.config_hash.len())]
        );
        // Distinct ids even for identical configs run into the same dir.
        let mut k = 1;
        while runs.iter().any(|r: &Run| r.id == id) {
            id = format!("{stem}-{}-{k}", &manifest.config_hash[..8]);
            k += 1;
        }
        runs.push(Run { id, manifest });
    }

    // Merge by check name; a name reused with a different definition
    // (target/tolerance/state) is suffixed by run id, never merged.
    let mut rows: Vec<Row> = Vec::new();
    for (run_idx, run) in runs.iter().enumerate() {
        for check in &run.manifest.checks {
            let sig = signature(check);
            let existing = rows.iter_mut().find(|r| {
                r.name == check.check_name
                    && (r.state_index, r.target.to_bits(), r.tolerance.to_bits()) == sig
            });
            let row = match existing {
                Some(row) => row,
                None => {
                    let clash = rows.iter().any(|r| r.name == check.check_name);
                    let name = if clash {
                        format!("{}@{}", check.check_name, run.id)
                    } else {
                        check.check_name.clone()
                    };
                    rows.push(Row {
                        name,
                        state_index: check.state_index,
                        target: check.target,
                        tolerance: check.tolerance,
                        cells: BTreeMap::new(),
                    });
                    rows.last_mut().unwrap()
                }
            };
            // Duplicate name inside one run: suffix with the run id too.
            match row.cells.entry(run_idx) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert((check.value, check.pass));
                }
                std::collections::btree_map::Entry::Occupied(_) => {
                    rows.push(Row {
                        name: format!("{}@{}", check.check_name, run.id),
                        state_index: check.state_index,
                        target: check.target,
                        tolerance: check.tolerance,
                        cells: BTreeMap::from([(run_idx, (check.value, check.pass))]),
                    });
                }
            }
        }
    }
    rows.sort_by(|a, b| a.name.cmp(&b.name));

    // CSV: stable column order — row identity first, then one
    // (value, pass) pair per run in input order.
    std::fs::create_dir_all(&args.out)?;
    let mut header: Vec<String> = vec![
        "check_name".into(),
        "state_index".into(),
        "target".into(),
        "tolerance".into(),
    ];
    for run in &runs {
        header.push(format!("value:{}", run.id));
        header.push(format!("pass:{}", run.id));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let csv_rows = rows.iter().map(|row| {
        let mut cells = vec![
            row.name.clone(),
            row.state_index
                .map(|i| i.to_string())
                .unwrap_or_else(|| "-".into()),
            fmt_f64(row.target),
            fmt_f64(row.tolerance),
        ];
        for idx in 0..runs.len() {
            match row.cells.get(&idx) {
                Some((v, pass)) => {
                    cells.push(fmt_f64(*v));
                    cells.push(if *pass { "pass" } else { "fail" }.to_string());
                }
                None => {
                    cells.push("-".into());
                    cells.push("-".into());
                }
            }
        }
        cells
    });
    write_csv(&args.out.join("report.csv"), &header_refs, csv_rows)?;

    if !args.quiet {
        let name_width = rows.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
        let mut line = format!("{:name_width$}  {:>12}", "check", "tolerance");
        for run in &runs {
            line.push_str(&format!("  {:>22}", run.id));
        }
        println!("{line}");
        for row in &rows {
            let mut line = format!("{:name_width$}  {:>12.3e}", row.name, row.tolerance);
            for idx in 0..runs.len() {
                match row.cells.get(&idx) {
                    Some((v, pass)) => line.push_str(&format!(
                        "  {:>15.6e} {}",
                        v,
                        if *pass { "  ok " } else { " FAIL" }
                    )),
                    None => line.push_str(&format!("  {:>22}", "-")),
                }
            }
            println!("{line}");
        }
        println!(
            "report: {} checks across {} runs -> {}",
            rows.len(),
            runs.len(),
            args.out.join("report.csv").display()
        );
    }
    Ok(true)
}
