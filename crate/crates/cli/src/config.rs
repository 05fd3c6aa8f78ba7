//! Run configuration: built-in defaults, then a flat `key = value` file,
//! then command-line flags.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use bec_squeeze::fock::{Truncation, DEFAULT_TAIL_THRESHOLD};
use bec_squeeze::observables::report::Tolerances;
use bec_squeeze::{ModelParams, ScenarioConfig, Source, SqueezedInput};
use bec_squeeze::Complex;
use clap::Args;

use crate::CliError;

/// Every tunable, all optional so file values and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Overrides {
    /// Flat `key = value` file; flags given on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Squeeze magnitude r
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Squeeze angle phi
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Real part of the coherent amplitude m
    #[arg(long, allow_hyphen_values = true)]
    pub m_re: Option<f64>,
    /// Imaginary part of the coherent amplitude m
    #[arg(long, allow_hyphen_values = true)]
    pub m_im: Option<f64>,
    /// Coupling phase theta
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Atomic output-mode frequency
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Optical mode frequency
    #[arg(long, allow_hyphen_values = true)]
    pub omega_a: Option<f64>,
    /// Coupling (Rabi) frequency
    #[arg(long, allow_hyphen_values = true)]
    pub omega_r: Option<f64>,
    /// End of the time grid (excluded)
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub steps: Option<usize>,
    /// Per-mode Fock cutoff; chosen automatically when absent
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Comma-separated subset of closed-form, moment-map, oracle
    #[arg(long, value_name = "LIST")]
    pub sources: Option<String>,
    /// Output file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol_algebraic: Option<f64>,
    #[arg(long)]
    pub tol_oracle: Option<f64>,
    /// Swept parameter (sweep)
    #[arg(long, value_name = "NAME")]
    pub axis: Option<String>,
    /// Comma-separated values: swept values (sweep) or cutoffs (converge)
    #[arg(long, value_name = "CSVLIST", allow_hyphen_values = true)]
    pub values: Option<String>,
}

macro_rules! layer {
    ($base:expr, $top:expr, $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl Overrides {
    /// `self` with every field set in `top` replaced.
    pub fn layered(mut self, top: &Overrides) -> Self {
        layer!(
            self, top, config, r, phi, m_re, m_im, theta, omega0, omega_a, omega_r, t_max, steps, n_max, sources, out,
            tol_algebraic, tol_oracle, axis, values
        );
        self
    }

    /// Parses `key = value` lines; `#` starts a comment, keys accept `-` or `_`.
    pub fn parse_kv(text: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| CliError::Config(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            let num = || value.parse::<f64>().map_err(|_| bad("not a number"));
            let int = || value.parse::<usize>().map_err(|_| bad("not a nonnegative integer"));
            match key.as_str() {
                "r" => o.r = Some(num()?),
                "phi" => o.phi = Some(num()?),
                "m_re" => o.m_re = Some(num()?),
                "m_im" => o.m_im = Some(num()?),
                "theta" => o.theta = Some(num()?),
                "omega0" => o.omega0 = Some(num()?),
                "omega_a" => o.omega_a = Some(num()?),
                "omega_r" => o.omega_r = Some(num()?),
                "t_max" => o.t_max = Some(num()?),
                "steps" => o.steps = Some(int()?),
                "n_max" => o.n_max = Some(int()?),
                "sources" => o.sources = Some(value.to_string()),
                "out" => o.out = Some(PathBuf::from(value)),
                "tol_algebraic" => o.tol_algebraic = Some(num()?),
                "tol_oracle" => o.tol_oracle = Some(num()?),
                "axis" => o.axis = Some(value.to_string()),
                "values" => o.values = Some(value.to_string()),
                _ => return Err(bad("unknown key")),
            }
        }
        Ok(o)
    }

    /// Reads the `--config` file (if any) underneath these flags.
    pub fn with_config_file(&self) -> Result<Self, CliError> {
        match &self.config {
            None => Ok(self.clone()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                Ok(Self::parse_kv(&text)?.layered(self))
            }
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub t_max: f64,
    pub steps: usize,
    pub sources: Vec<Source>,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances<f64>,
    /// Whether the cutoff was chosen automatically.
    pub auto_truncation: bool,
}

pub fn parse_sources(list: &str) -> Result<Vec<Source>, CliError> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let s = Source::parse(item).ok_or_else(|| CliError::Config(format!("unknown source {item:?}")))?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("at least one source is required".into()));
    }
    out.sort();
    Ok(out)
}

pub fn parse_list<T: std::str::FromStr>(list: &str) -> Result<Vec<T>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Config(format!("bad list entry {s:?}"))))
        .collect()
}

impl RunConfig {
    pub fn resolve(o: &Overrides) -> Result<Self, CliError> {
        let omega = 4.0;
        let params = ModelParams::new(
            o.omega0.unwrap_or(omega),
            o.omega_a.unwrap_or(omega),
            o.omega_r.unwrap_or(1.0),
            o.theta.unwrap_or(0.0),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let input = SqueezedInput::new(
            o.r.unwrap_or(1.0),
            o.phi.unwrap_or(0.0),
            Complex::new(o.m_re.unwrap_or(0.0), o.m_im.unwrap_or(0.0)),
        )
        .map_err(|e| CliError::Config(e.to_string()))?;
        let sources = parse_sources(o.sources.as_deref().unwrap_or("closed-form,moment-map,oracle"))?;
        let t_max = o.t_max.unwrap_or(TAU);
        let steps = o.steps.unwrap_or(200);
        if steps < 2 || !(t_max > 0.0 && t_max.is_finite()) {
            return Err(CliError::Config(format!("need steps >= 2 and t_max > 0 (got {steps}, {t_max})")));
        }
        let tolerances = Tolerances {
            algebraic: o.tol_algebraic.unwrap_or(1e-8),
            oracle: o.tol_oracle.unwrap_or(1e-6),
        };
        let (truncation, auto_truncation) = match o.n_max {
            Some(n) => (Truncation::new(n).map_err(|e| CliError::Config(e.to_string()))?, false),
            None => match Truncation::auto(&input, DEFAULT_TAIL_THRESHOLD) {
                Ok(t) => (t, true),
                // nothing to truncate when only closed forms are requested
                Err(_) if sources == [Source::ClosedForm] => (Truncation::new(1).expect("valid cutoff"), true),
                Err(e) => return Err(e.into()),
            },
        };
        Ok(Self {
            scenario: ScenarioConfig { params, input, truncation },
            t_max,
            steps,
            sources,
            out: o.out.clone(),
            tolerances,
            auto_truncation,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        bec_squeeze::scenario::time_grid(self.t_max, self.steps).expect("validated in resolve")
    }

    pub fn out_path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::resolve(&Overrides::default()).unwrap();
        assert_eq!(c.scenario.input.r, 1.0);
        assert_eq!(c.scenario.params.omega0, 4.0);
        assert_eq!(c.scenario.params.omega_a, 4.0);
        assert_eq!(c.steps, 200);
        assert_eq!(c.sources, Source::ALL.to_vec());
        assert!(c.auto_truncation);
        assert!(c.scenario.truncation.n_max() >= 64);
    }

    #[test]
    fn kv_parsing_and_precedence() {
        let file = Overrides::parse_kv("# scenario\nr = 0.5\nm-re=1.5 # trailing\n\nsteps = 10\n").unwrap();
        assert_eq!(file.r, Some(0.5));
        assert_eq!(file.m_re, Some(1.5));
        let flags = Overrides { r: Some(0.25), ..Default::default() };
        let merged = file.layered(&flags);
        assert_eq!(merged.r, Some(0.25));
        assert_eq!(merged.steps, Some(10));
        assert!(Overrides::parse_kv("bogus = 1").is_err());
        assert!(Overrides::parse_kv("r 1").is_err());
        assert!(Overrides::parse_kv("steps = -3").is_err());
    }

    #[test]
    fn source_lists() {
        assert_eq!(parse_sources("oracle, literal").unwrap(), vec![Source::ClosedForm, Source::Oracle]);
        assert!(parse_sources("").is_err());
        assert!(parse_sources("oracle,nope").is_err());
    }

    #[test]
    fn validation() {
        let bad_steps = Overrides { steps: Some(1), ..Default::default() };
        assert!(matches!(RunConfig::resolve(&bad_steps), Err(CliError::Config(_))));
        let bad_r = Overrides { r: Some(-1.0), ..Default::default() };
        assert!(RunConfig::resolve(&bad_r).is_err());
        let huge = Overrides { r: Some(6.0), sources: Some("closed-form".into()), ..Default::default() };
        assert!(RunConfig::resolve(&huge).is_ok());
    }
}
