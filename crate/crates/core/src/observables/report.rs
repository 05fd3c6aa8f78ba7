//! Adjudicates each published closed form against the oracle.
//!
//! Every formula is evaluated where it claims to hold, alongside the moment
//! map and the oracle. A formula is [`Verdict::Confirmed`] if it matches the
//! oracle everywhere, [`Verdict::TypoSuspect`] if it does not but a
//! documented corrected form does, and [`Verdict::Unresolved`] otherwise.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex;

use crate::error::Result;
use crate::fock::{extract_moments, MomentSet, Mode, NormalMoments};
use crate::oracle::{build_hamiltonian, validate_times, Evolver};
use crate::propagator::{heisenberg_moment_map, propagator_at};
use crate::scalar::{cis, Real};
use crate::scenario::{initial_moments, initial_state};

use super::closed_form::{self as cf, is_real_amplitude, is_squeezed_vacuum, is_zero_phase, terms};
use super::{mandel_q, squeeze_coeffs, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Confirmed,
    TypoSuspect,
    Unresolved,
    /// Outside the formula's domain, or no usable evaluation point.
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "CONFIRMED",
            Verdict::TypoSuspect => "TYPO-SUSPECT",
            Verdict::Unresolved => "UNRESOLVED",
            Verdict::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Closed form vs moment map (pure algebra).
    pub algebraic: T,
    /// Anything vs the oracle, before truncation scaling.
    pub oracle: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self { algebraic: T::lit(1e-8), oracle: T::lit(1e-6) }
    }
}

/// Effective oracle tolerance: the requested one widened by the truncation
/// error scale `tail·(n_max+1)²`.
pub fn oracle_tolerance<T: Real>(base: T, tail_mass: T, n_max: usize) -> T {
    let d = T::from_index(n_max + 1);
    base + tail_mass * d * d
}

/// One evaluation point of one formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow<T> {
    pub t: T,
    pub literal: T,
    pub corrected: Option<T>,
    pub moment_map: Option<T>,
    pub oracle: T,
    /// `|literal − oracle|` (wrapped to `[0, π]` for phases).
    pub abs_dev: T,
    /// `abs_dev / max(1, |oracle|)`.
    pub rel_dev: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaEntry<T> {
    pub id: &'static str,
    pub observable: &'static str,
    pub literal_form: &'static str,
    pub corrected_form: Option<&'static str>,
    pub verdict: Verdict,
    pub rows: Vec<ReportRow<T>>,
    pub max_literal_dev: Option<T>,
    pub max_corrected_dev: Option<T>,
    pub max_literal_vs_moment_map: Option<T>,
    pub max_moment_map_vs_oracle: Option<T>,
    /// Why the entry is not applicable, when it is not.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport<T> {
    pub entries: Vec<FormulaEntry<T>>,
    pub oracle_n_max: usize,
    pub oracle_tail: T,
    pub tolerances: Tolerances<T>,
    pub effective_oracle_tol: T,
}

impl<T: Real> DiscrepancyReport<T> {
    pub fn entry(&self, id: &str) -> Option<&FormulaEntry<T>> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == verdict).count()
    }

    /// Verdict table, one line per formula.
    pub fn render_summary(&self) -> String {
        let mut out = String::new();
        let fmt_dev = |d: Option<T>| d.map_or_else(|| "-".to_string(), |d| format!("{:.3e}", d.as_f64()));
        let _ = writeln!(
            out,
            "# oracle n_max={} tail={:.3e} tol_oracle={:.3e} tol_algebraic={:.3e}",
            self.oracle_n_max,
            self.oracle_tail.as_f64(),
            self.effective_oracle_tol.as_f64(),
            self.tolerances.algebraic.as_f64()
        );
        let _ = writeln!(
            out,
            "{:<34} {:<14} {:>6} {:>11} {:>11} {:>11}  literal | corrected",
            "formula", "verdict", "points", "lit-oracle", "corr-oracle", "lit-mmap"
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<34} {:<14} {:>6} {:>11} {:>11} {:>11}  {} | {}{}",
                e.id,
                e.verdict.to_string(),
                e.rows.len(),
                fmt_dev(e.max_literal_dev),
                fmt_dev(e.max_corrected_dev),
                fmt_dev(e.max_literal_vs_moment_map),
                e.literal_form,
                e.corrected_form.unwrap_or("-"),
                e.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default()
            );
        }
        let _ = writeln!(
            out,
            "# confirmed={} typo-suspect={} unresolved={} not-applicable={}",
            self.count(Verdict::Confirmed),
            self.count(Verdict::TypoSuspect),
            self.count(Verdict::Unresolved),
            self.count(Verdict::NotApplicable)
        );
        out
    }

    /// Every evaluation point as CSV.
    pub fn render_rows(&self) -> String {
        let mut out = String::from("formula,t,literal,corrected,moment_map,oracle,abs_dev,rel_dev\n");
        let num = |v: T| format!("{:.16e}", v.as_f64());
        let opt = |v: Option<T>| v.map_or_else(|| "NA".to_string(), num);
        for e in &self.entries {
            for r in &e.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    e.id,
                    num(r.t),
                    num(r.literal),
                    opt(r.corrected),
                    opt(r.moment_map),
                    num(r.oracle),
                    num(r.abs_dev),
                    num(r.rel_dev)
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum TimeSet {
    Grid,
    /// `ω_R t = (n+½)π`.
    Conversion,
    /// `ωt + θ = nπ` with `sin(ω_R t) ≠ 0`.
    InPhase,
    /// `ωt + θ = (n+½)π` with `sin(ω_R t) ≠ 0`.
    QuadraturePhase,
}

#[derive(Clone, Copy)]
struct Sample<T> {
    t: T,
    oracle: (MomentSet<T>, MomentSet<T>),
    moment_map: (MomentSet<T>, MomentSet<T>),
}

enum Domain {
    Any,
    RealAmplitude,
    SqueezedVacuum,
    SqueezedVacuumZeroPhase,
}

impl Domain {
    fn holds<T: Real>(&self, cfg: &ScenarioConfig<T>) -> std::result::Result<(), &'static str> {
        let input = &cfg.input;
        let ok = match self {
            Domain::Any => true,
            Domain::RealAmplitude => is_zero_phase(input) && is_real_amplitude(input),
            Domain::SqueezedVacuum => is_squeezed_vacuum(input),
            Domain::SqueezedVacuumZeroPhase => is_squeezed_vacuum(input) && is_zero_phase(input),
        };
        ok.then_some(()).ok_or(match self {
            Domain::Any => "",
            Domain::RealAmplitude => "needs phi = 0 and real m",
            Domain::SqueezedVacuum => "needs m = 0",
            Domain::SqueezedVacuumZeroPhase => "needs m = 0 and phi = 0",
        })
    }
}

type Eval<'a, T> = Box<dyn Fn(T) -> Option<T> + 'a>;
type Observe<T> = fn(&MomentSet<T>, &MomentSet<T>) -> Option<T>;

struct Check<'a, T> {
    id: &'static str,
    observable: &'static str,
    literal_form: &'static str,
    corrected_form: Option<&'static str>,
    times: TimeSet,
    domain: Domain,
    literal: Eval<'a, T>,
    corrected: Option<Eval<'a, T>>,
    observe: Observe<T>,
    phase: bool,
}

/// Below this occupation `Q` comparisons are skipped; below this magnitude
/// so is the phase of `⟨b²⟩`.
const OCCUPATION_FLOOR: f64 = 1e-6;

fn q_of<T: Real>(m: &MomentSet<T>) -> Option<T> {
    (m.number_mean > T::lit(OCCUPATION_FLOOR)).then(|| mandel_q(m).ok()).flatten()
}

/// Runs every check at its evaluation points up to the last `time_grid` entry.
pub fn discrepancy_report<T: Real>(
    cfg: &ScenarioConfig<T>,
    time_grid: &[T],
    tolerances: Tolerances<T>,
) -> Result<DiscrepancyReport<T>> {
    validate_times(time_grid)?;
    let state0 = initial_state(cfg)?;
    let evolver = Evolver::new(&build_hamiltonian(&cfg.params, cfg.truncation), &state0)?;
    let oracle_tail = state0.tail_mass();
    let (a0, _, _) = initial_moments(cfg)?;
    let vacuum = NormalMoments::vacuum();
    let sample = |t: T| -> Result<Sample<T>> {
        let s = evolver.state_at(t);
        let (a, b) = heisenberg_moment_map(&propagator_at(&cfg.params, t), &a0, &vacuum)?;
        Ok(Sample {
            t,
            oracle: (extract_moments(&s, Mode::A), extract_moments(&s, Mode::B)),
            moment_map: (a.moment_set(), b.moment_set()),
        })
    };

    let t_max = time_grid.last().copied().unwrap_or(T::zero());
    let mut samples: BTreeMap<TimeSet, Vec<Sample<T>>> = BTreeMap::new();
    for set in [TimeSet::Grid, TimeSet::Conversion, TimeSet::InPhase, TimeSet::QuadraturePhase] {
        let times = match set {
            TimeSet::Grid => time_grid.to_vec(),
            _ => special_times(cfg, set, t_max),
        };
        samples.insert(set, times.into_iter().map(sample).collect::<Result<_>>()?);
    }

    let tol = oracle_tolerance(tolerances.oracle, oracle_tail, cfg.truncation.n_max());
    let entries = checks(cfg)
        .into_iter()
        .map(|c| {
            let set = c.times;
            adjudicate(cfg, c, &samples[&set], tol)
        })
        .collect();
    Ok(DiscrepancyReport {
        entries,
        oracle_n_max: cfg.truncation.n_max(),
        oracle_tail,
        tolerances,
        effective_oracle_tol: tol,
    })
}

fn special_times<T: Real>(cfg: &ScenarioConfig<T>, set: TimeSet, t_max: T) -> Vec<T> {
    let p = &cfg.params;
    let half = T::lit(0.5);
    let (rate, offset, shift) = match set {
        TimeSet::Conversion => (p.omega_r, T::zero(), half),
        TimeSet::InPhase => (p.omega0, p.theta, T::zero()),
        TimeSet::QuadraturePhase => (p.omega0, p.theta, half),
        TimeSet::Grid => unreachable!(),
    };
    if rate <= T::zero() {
        return Vec::new();
    }
    // rate·t + offset = (n + shift)π
    let first = ((offset / T::PI()) - shift).ceil().max(T::zero());
    let mut out = Vec::new();
    let mut n = first;
    loop {
        let t = ((n + shift) * T::PI() - offset) / rate;
        if t > t_max * (T::one() + T::lit(1e-12)) {
            break;
        }
        if t >= T::zero() && (set == TimeSet::Conversion || (p.omega_r * t).sin().abs() > T::lit(1e-6)) {
            out.push(t);
        }
        n = n + T::one();
    }
    out
}

fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let y = x - two_pi * (x / two_pi).round();
    y.abs()
}

fn adjudicate<T: Real>(cfg: &ScenarioConfig<T>, c: Check<'_, T>, samples: &[Sample<T>], tol: T) -> FormulaEntry<T> {
    let mut entry = FormulaEntry {
        id: c.id,
        observable: c.observable,
        literal_form: c.literal_form,
        corrected_form: c.corrected_form,
        verdict: Verdict::NotApplicable,
        rows: Vec::new(),
        max_literal_dev: None,
        max_corrected_dev: None,
        max_literal_vs_moment_map: None,
        max_moment_map_vs_oracle: None,
        note: None,
    };
    if let Err(e) = cfg.params.require_resonance() {
        entry.note = Some(e.to_string());
        return entry;
    }
    if let Err(why) = c.domain.holds(cfg) {
        entry.note = Some(why.to_string());
        return entry;
    }
    let dev = |x: T, y: T| if c.phase { wrap_angle(x - y) } else { (x - y).abs() };
    let rel = |d: T, y: T| if c.phase { d } else { d / y.abs().max(T::one()) };
    let bump = |slot: &mut Option<T>, d: T| *slot = Some(slot.map_or(d, |m: T| m.max(d)));
    let mut literal_ok = true;
    let mut corrected_ok = c.corrected.is_some();
    for s in samples {
        let Some(observed) = (c.observe)(&s.oracle.0, &s.oracle.1) else { continue };
        let Some(literal) = (c.literal)(s.t) else { continue };
        let corrected = c.corrected.as_ref().and_then(|f| f(s.t));
        let moment_map = (c.observe)(&s.moment_map.0, &s.moment_map.1);
        let abs_dev = dev(literal, observed);
        let rel_dev = rel(abs_dev, observed);
        literal_ok &= rel_dev <= tol;
        bump(&mut entry.max_literal_dev, rel_dev);
        if let Some(v) = corrected {
            let d = rel(dev(v, observed), observed);
            corrected_ok &= d <= tol;
            bump(&mut entry.max_corrected_dev, d);
        }
        if let Some(mm) = moment_map {
            bump(&mut entry.max_literal_vs_moment_map, rel(dev(literal, mm), mm));
            bump(&mut entry.max_moment_map_vs_oracle, rel(dev(mm, observed), observed));
        }
        entry.rows.push(ReportRow { t: s.t, literal, corrected, moment_map, oracle: observed, abs_dev, rel_dev });
    }
    entry.verdict = if entry.rows.is_empty() {
        entry.note = Some("no evaluation point in range".into());
        Verdict::NotApplicable
    } else if literal_ok {
        Verdict::Confirmed
    } else if corrected_ok {
        Verdict::TypoSuspect
    } else {
        Verdict::Unresolved
    };
    entry
}

fn checks<'a, T: Real>(cfg: &'a ScenarioConfig<T>) -> Vec<Check<'a, T>> {
    let p = &cfg.params;
    let input = &cfg.input;
    let two = T::lit(2.0);
    let k = move |t: T| terms(p, input, t).ok();
    let alpha2_sq = move |t: T| k(t).map(|k| k.a.alpha2 * k.a.alpha2);
    let thinning = move |t: T| k(t).map(|k| k.s * k.s * k.sin2 * k.cos2);

    let check = |id, observable, literal_form, times, domain, literal: Eval<'a, T>, observe: Observe<T>| Check {
        id,
        observable,
        literal_form,
        corrected_form: None,
        times,
        domain,
        literal,
        corrected: None,
        observe,
        phase: false,
    };
    let with_fix = |mut c: Check<'a, T>, form: &'static str, f: Eval<'a, T>| {
        c.corrected_form = Some(form);
        c.corrected = Some(f);
        c
    };

    let na_mean: Observe<T> = |a, _| Some(a.number_mean);
    let nb_mean: Observe<T> = |_, b| Some(b.number_mean);
    let na_var: Observe<T> = |a, _| Some(a.number_variance());
    let nb_var: Observe<T> = |_, b| Some(b.number_variance());
    let na_sq: Observe<T> = |a, _| Some(a.number_sq);
    let q_a: Observe<T> = |a, _| q_of(a);
    let q_b: Observe<T> = |_, b| q_of(b);
    let s1b: Observe<T> = |_, b| Some(squeeze_coeffs(b).0);
    let s2b: Observe<T> = |_, b| Some(squeeze_coeffs(b).1);
    let pair_abs: Observe<T> = |_, b| Some(b.sq_amp.norm());
    let pair_arg: Observe<T> = |_, b| (b.sq_amp.norm() > T::lit(OCCUPATION_FLOOR)).then(|| b.sq_amp.arg());

    let first = |f: fn(&ScenarioConfig<T>, T) -> Option<(T, T)>| -> Eval<'a, T> { Box::new(move |t| f(cfg, t).map(|v| v.0)) };
    let second = |f: fn(&ScenarioConfig<T>, T) -> Option<(T, T)>| -> Eval<'a, T> { Box::new(move |t| f(cfg, t).map(|v| v.1)) };

    let vars: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, t| cf::number_variances(&c.params, &c.input, t).ok();
    let vars_real: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> =
        |c, t| cf::number_variances_real_amplitude(&c.params, &c.input, t).ok();
    let vac_moments: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> =
        |c, t| cf::vacuum_optical_moments(&c.params, &c.input, t).ok();
    let vac_vars: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, t| cf::vacuum_variances(&c.params, &c.input, t).ok();
    let conv_vars: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, _| cf::conversion_variances(&c.params, &c.input).ok();
    let q_real: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, t| cf::mandel_q_real_amplitude(&c.params, &c.input, t).ok();
    let q_vac: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, t| {
        let k = terms(&c.params, &c.input, t).ok()?;
        Some((k.a.alpha1 * k.cos2, k.a.alpha1 * k.sin2))
    };
    let sb: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, t| cf::atomic_squeeze_coeffs(&c.params, &c.input, t).ok();
    let sb_in: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> = |c, t| cf::in_phase_squeeze_coeffs(&c.params, &c.input, t).ok();
    let sb_quad: fn(&ScenarioConfig<T>, T) -> Option<(T, T)> =
        |c, t| cf::quadrature_phase_squeeze_coeffs(&c.params, &c.input, t).ok();
    let pair: fn(&ScenarioConfig<T>, T) -> Option<(Complex<T>, T)> = |c, t| cf::atomic_pair_moments(&c.params, &c.input, t).ok();
    // 2 sinh r e^{r}·sin²(ω_R t)
    let anti_squeezed: Eval<'a, T> = Box::new(move |t| k(t).map(|k| two * k.s * input.r.exp() * k.sin2));
    let q_fixed = move |t: T, sin: bool| {
        let k = k(t)?;
        let e = k.a.alpha1 + two * k.a.alpha2;
        let m2 = input.m.re * input.m.re;
        let f = (m2 * e * e + two * k.a.alpha2 * k.a.alpha2) / (m2 * e + k.s * k.s) - T::one();
        Some(f * if sin { k.sin2 } else { k.cos2 })
    };

    use Domain::*;
    use TimeSet::*;
    vec![
        check(
            "complete-conversion",
            "<N_b> at conversion",
            "<N_b(t0)> = <N_a(0)>",
            Conversion,
            Any,
            Box::new(move |_| cf::optical_mean(p, input, T::zero()).ok()),
            nb_mean,
        ),
        check("optical-mean", "<N_a>", "(|m|^2 a1 + P a2 + sinh^2 r) cos^2", Grid, Any, Box::new(move |t| cf::optical_mean(p, input, t).ok()), na_mean),
        check("optical-variance", "<dN_a^2>", "X cos^4 + Y sin^2 cos^2", Grid, Any, first(vars), na_var),
        check("atomic-variance", "<dN_b^2>", "X sin^4 + Y sin^2 cos^2", Grid, Any, second(vars), nb_var),
        check("optical-variance-real-m", "<dN_a^2>", "[m^2(a1+2a2)^2 + 2a2^2] cos^4 + [sinh^2 r + (a1+2a2) m^2] sin^2 cos^2", Grid, RealAmplitude, first(vars_real), na_var),
        check("atomic-variance-real-m", "<dN_b^2>", "[m^2(a1+2a2)^2 + 2a2^2] sin^4 + [sinh^2 r + (a1+2a2) m^2] sin^2 cos^2", Grid, RealAmplitude, second(vars_real), nb_var),
        check("vacuum-optical-mean", "<N_a>", "sinh^2 r cos^2", Grid, SqueezedVacuum, first(vac_moments), na_mean),
        with_fix(
            check("vacuum-optical-second-moment", "<N_a^2>", "(2 a2 + sinh^4 r) cos^4", Grid, SqueezedVacuum, second(vac_moments), na_sq),
            "(2 a2^2 + sinh^4 r) cos^4 + sinh^2 r sin^2 cos^2",
            Box::new(move |t| Some((two * alpha2_sq(t)? + k(t)?.s.powi(4)) * k(t)?.cos2 * k(t)?.cos2 + thinning(t)?)),
        ),
        with_fix(
            check("vacuum-optical-variance", "<dN_a^2>", "sqrt2 sinh r cos^4", Grid, SqueezedVacuum, first(vac_vars), na_var),
            "2 a2^2 cos^4 + sinh^2 r sin^2 cos^2",
            Box::new(move |t| Some(two * alpha2_sq(t)? * k(t)?.cos2 * k(t)?.cos2 + thinning(t)?)),
        ),
        with_fix(
            check("vacuum-atomic-variance", "<dN_b^2>", "sqrt2 sinh r cosh r sin^4", Grid, SqueezedVacuum, second(vac_vars), nb_var),
            "2 a2^2 sin^4 + sinh^2 r sin^2 cos^2",
            Box::new(move |t| Some(two * alpha2_sq(t)? * k(t)?.sin2 * k(t)?.sin2 + thinning(t)?)),
        ),
        check("conversion-optical-variance", "<dN_a^2> at conversion", "0", Conversion, RealAmplitude, first(conv_vars), na_var),
        check("conversion-atomic-variance", "<dN_b^2> at conversion", "m^2(a1+2a2)^2 + 2a2^2", Conversion, RealAmplitude, second(conv_vars), nb_var),
        with_fix(
            check("mandel-q-optical", "Q_a", "[(m^2(a1+2a2)^2 + 2a2)/(m^2(a1+2a2) + sinh^2 r) - 1] cos^2", Grid, RealAmplitude, first(q_real), q_a),
            "[(m^2(a1+2a2)^2 + 2a2^2)/(m^2(a1+2a2) + sinh^2 r) - 1] cos^2",
            Box::new(move |t| q_fixed(t, false)),
        ),
        with_fix(
            check("mandel-q-atomic", "Q_b", "[(m^2(a1+2a2)^2 + 2a2)/(m^2(a1+2a2) + sinh^2 r) - 1] sin^2", Grid, RealAmplitude, second(q_real), q_b),
            "[(m^2(a1+2a2)^2 + 2a2^2)/(m^2(a1+2a2) + sinh^2 r) - 1] sin^2",
            Box::new(move |t| q_fixed(t, true)),
        ),
        check("vacuum-mandel-q-optical", "Q_a", "a1 cos^2", Grid, SqueezedVacuumZeroPhase, first(q_vac), q_a),
        check("vacuum-mandel-q-atomic", "Q_b", "a1 sin^2", Grid, SqueezedVacuumZeroPhase, second(q_vac), q_b),
        with_fix(
            check(
                "vacuum-atomic-occupation",
                "<b+b>",
                "sinh^2 r cosh^2 r sin^2",
                Grid,
                SqueezedVacuumZeroPhase,
                Box::new(move |t| pair(cfg, t).map(|v| v.1)),
                nb_mean,
            ),
            "sinh^2 r sin^2",
            Box::new(move |t| k(t).map(|k| k.s * k.s * k.sin2)),
        ),
        check(
            "vacuum-atomic-pair-amplitude",
            "|<b^2>|",
            "sinh r cosh r sin^2",
            Grid,
            SqueezedVacuumZeroPhase,
            Box::new(move |t| pair(cfg, t).map(|v| v.0.norm())),
            pair_abs,
        ),
        Check {
            phase: true,
            ..with_fix(
                check(
                    "vacuum-atomic-pair-phase",
                    "arg<b^2>",
                    "arg(-e^{-2i w t})",
                    Grid,
                    SqueezedVacuumZeroPhase,
                    Box::new(move |t| pair(cfg, t).and_then(|v| (v.0.norm() > T::zero()).then(|| v.0.arg()))),
                    pair_arg,
                ),
                "arg(-e^{-2i(w t + theta)})",
                Box::new(move |t| Some((-cis(-two * (p.omega0 * t + p.theta))).arg())),
            )
        },
        check("atomic-squeeze-s1", "S_1b", "2 sinh r {sinh r - cosh r cos[2(w t + theta)]} sin^2", Grid, SqueezedVacuumZeroPhase, first(sb), s1b),
        check("atomic-squeeze-s2", "S_2b", "2 sinh r {sinh r + cosh r cos[2(w t + theta)]} sin^2", Grid, SqueezedVacuumZeroPhase, second(sb), s2b),
        check("in-phase-squeeze-s1", "S_1b at w t + theta = n pi", "-2 sinh r e^{-r} sin^2", InPhase, SqueezedVacuumZeroPhase, first(sb_in), s1b),
        with_fix(
            check("in-phase-squeeze-s2", "S_2b at w t + theta = n pi", "2 sinh r e^{-r} sin^2", InPhase, SqueezedVacuumZeroPhase, second(sb_in), s2b),
            "2 sinh r e^{r} sin^2",
            anti_squeezed,
        ),
        with_fix(
            check(
                "quadrature-phase-squeeze-s1",
                "S_1b at w t + theta = (n+1/2) pi",
                "2 sinh r e^{-r} sin^2",
                QuadraturePhase,
                SqueezedVacuumZeroPhase,
                first(sb_quad),
                s1b,
            ),
            "2 sinh r e^{r} sin^2",
            Box::new(move |t| k(t).map(|k| two * k.s * input.r.exp() * k.sin2)),
        ),
        check(
            "quadrature-phase-squeeze-s2",
            "S_2b at w t + theta = (n+1/2) pi",
            "-2 sinh r e^{-r} sin^2",
            QuadraturePhase,
            SqueezedVacuumZeroPhase,
            second(sb_quad),
            s2b,
        ),
    ]
}
