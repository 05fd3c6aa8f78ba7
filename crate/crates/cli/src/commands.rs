use bec_squeeze::observables::report::{discrepancy_report, Verdict};
use bec_squeeze::oracle::convergence_sweep;
use bec_squeeze::scenario::simulate as simulate_records;
use bec_squeeze::Source;
use rayon::prelude::*;

use crate::config::{parse_list, Overrides, RunConfig};
use crate::output::{float, opt_float, record_header, record_line, records_csv};
use crate::CliError;

/// What a command produced: the main output, an optional note for stderr,
/// and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub note: Option<String>,
    pub code: i32,
    /// Extra files to write next to the main output: `(suffix, contents)`.
    pub attachments: Vec<(&'static str, String)>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, note: None, code: 0, attachments: Vec::new() }
    }
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let records = simulate_records(&cfg.scenario, &cfg.times(), &cfg.sources)?;
    Ok(Outcome::ok(records_csv(&records)))
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if Source::ALL.iter().any(|s| !cfg.sources.contains(s)) {
        return Err(CliError::Config("verify needs all three sources (closed-form, moment-map, oracle)".into()));
    }
    let report = discrepancy_report(&cfg.scenario, &cfg.times(), cfg.tolerances)?;
    let unresolved = report.count(Verdict::Unresolved);
    Ok(Outcome {
        body: report.render_summary(),
        note: (unresolved > 0).then(|| format!("{unresolved} formula(s) UNRESOLVED")),
        code: if unresolved > 0 { 4 } else { 0 },
        attachments: vec![(".points.csv", report.render_rows())],
    })
}

pub const SWEEP_AXES: [&str; 8] = ["r", "phi", "m_re", "m_im", "theta", "omega0", "omega_a", "omega_r"];

fn set_axis(o: &mut Overrides, axis: &str, v: f64) {
    let slot = match axis {
        "r" => &mut o.r,
        "phi" => &mut o.phi,
        "m_re" => &mut o.m_re,
        "m_im" => &mut o.m_im,
        "theta" => &mut o.theta,
        "omega0" => &mut o.omega0,
        "omega_a" => &mut o.omega_a,
        "omega_r" => &mut o.omega_r,
        _ => unreachable!("axis validated"),
    };
    *slot = Some(v);
}

/// One simulate run per value, run concurrently, rows ordered by
/// (value, time, source).
pub fn sweep(base: &Overrides) -> Result<Outcome, CliError> {
    let axis = base
        .axis
        .as_deref()
        .map(|a| a.trim().replace('-', "_"))
        .ok_or_else(|| CliError::Config("sweep needs --axis".into()))?;
    if !SWEEP_AXES.contains(&axis.as_str()) {
        return Err(CliError::Config(format!("unknown axis {axis:?}; expected one of {}", SWEEP_AXES.join(", "))));
    }
    let values: Vec<f64> = parse_list(base.values.as_deref().ok_or_else(|| CliError::Config("sweep needs --values".into()))?)?;
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| {
            let mut o = base.clone();
            set_axis(&mut o, &axis, v);
            RunConfig::resolve(&o)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let runs: Vec<Result<String, CliError>> = configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(cfg, &v)| {
            let records = simulate_records(&cfg.scenario, &cfg.times(), &cfg.sources)?;
            let prefix = format!("{axis},{}", float(v));
            Ok(records.iter().map(|r| format!("{prefix},{}\n", record_line(r))).collect())
        })
        .collect();
    let mut body = format!("axis,value,{}\n", record_header());
    for run in runs {
        body.push_str(&run?);
    }
    Ok(Outcome::ok(body))
}

pub const DEFAULT_CUTOFFS: [usize; 3] = [32, 48, 64];

/// Oracle at each cutoff; exit 2 unless converged at the largest.
pub fn converge(cfg: &RunConfig, o: &Overrides) -> Result<Outcome, CliError> {
    let cutoffs = match o.values.as_deref() {
        Some(list) => parse_list::<usize>(list)?,
        None => DEFAULT_CUTOFFS.to_vec(),
    };
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] == 0 {
        return Err(CliError::Config("cutoff list must be positive and strictly increasing".into()));
    }
    let table = convergence_sweep(&cfg.scenario, &cfg.times(), &cutoffs)?;
    let mut body = format!("n_max,sufficient,input_tail_mass,norm_deficit,delta,{}\n", record_header());
    for (i, row) in table.rows.iter().enumerate() {
        let delta = opt_float(i.checked_sub(1).map(|j| table.deltas[j]));
        let prefix = format!("{},{},{},{},{}", row.n_max, row.sufficient, float(row.tail_mass), float(row.norm_deficit), delta);
        for rec in &row.records {
            body.push_str(&format!("{prefix},{}\n", record_line(rec)));
        }
    }
    let deltas: Vec<String> = table.deltas.iter().map(|d| format!("{d:.3e}")).collect();
    let last_ok = table.rows.last().is_some_and(|r| r.sufficient);
    let note = format!(
        "{} at n_max={} (deltas [{}], tolerance {:.0e}, final cutoff {})",
        if table.converged { "converged" } else { "not converged" },
        cutoffs[cutoffs.len() - 1],
        deltas.join(", "),
        table.tolerance,
        if last_ok { "within tail budget" } else { "exceeds tail budget" }
    );
    Ok(Outcome { body, note: Some(note), code: if table.converged { 0 } else { 2 }, attachments: Vec::new() })
}
