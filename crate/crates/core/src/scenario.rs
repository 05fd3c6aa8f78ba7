//! Time series of [`ObservableRecord`]s from each source for one scenario.

use crate::error::{Error, Result};
use crate::fock::{squeezed_coherent_state, tensor_product, ModeVector, NormalMoments, TwoModeState, Truncation};
use crate::observables::{closed_form, ObservableRecord, ScenarioConfig, Source};
use crate::oracle::{build_hamiltonian, oracle_record, validate_times, Evolver};
use crate::propagator::{heisenberg_moment_map, propagator_at};
use crate::scalar::Real;

/// Tail budget for the state whose moments seed the moment map. Much
/// tighter than the oracle's, since the map is otherwise exact.
pub const MOMENT_MAP_TAIL: f64 = 1e-15;

/// Drift in norm or total excitation number treated as a broken invariant.
pub const CONSERVATION_TOL: f64 = 1e-9;

/// [`CONSERVATION_TOL`], widened to rounding level for single precision.
fn conservation_tol<T: Real>() -> T {
    T::lit(CONSERVATION_TOL).max(T::epsilon() * T::lit(1e4))
}

/// `steps` points `k·t_max/steps`, `k = 0..steps` (end point excluded), so
/// quarter periods of `t_max` land exactly on the grid for `steps % 4 == 0`.
pub fn time_grid<T: Real>(t_max: T, steps: usize) -> Result<Vec<T>> {
    if steps < 2 || !(t_max > T::zero() && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("time grid needs steps >= 2 and t_max > 0 (got {steps}, {t_max})")));
    }
    let dt = t_max / T::from_index(steps);
    Ok((0..steps).map(|k| dt * T::from_index(k)).collect())
}

/// `|0⟩_b ⊗ |input⟩_a` at the scenario's cutoff, enforcing its tail budget.
pub fn initial_state<T: Real>(cfg: &ScenarioConfig<T>) -> Result<TwoModeState<T>> {
    let a = squeezed_coherent_state(cfg.input, cfg.truncation)?;
    tensor_product(&ModeVector::vacuum(cfg.truncation), &a)
}

/// Initial optical moments for the moment map, with the cutoff and tail
/// they were extracted at.
///
/// Uses the tightest affordable cutoff (never below the scenario's); falls
/// back to the scenario's own cutoff if [`MOMENT_MAP_TAIL`] is out of reach.
pub fn initial_moments<T: Real>(cfg: &ScenarioConfig<T>) -> Result<(NormalMoments<T>, usize, T)> {
    let tight = Truncation::auto(&cfg.input, T::lit(MOMENT_MAP_TAIL).max(T::epsilon()))
        .ok()
        .filter(|t| t.n_max() >= cfg.truncation.n_max())
        .unwrap_or(cfg.truncation);
    let state = squeezed_coherent_state(cfg.input, tight)?;
    Ok((state.normal_moments(), tight.n_max(), state.tail_mass()))
}

pub fn closed_form_record<T: Real>(cfg: &ScenarioConfig<T>, t: T) -> ObservableRecord<T> {
    let mut rec = ObservableRecord::empty(t, Source::ClosedForm);
    let (p, input) = (&cfg.params, &cfg.input);
    rec.na_mean = closed_form::optical_mean(p, input, t).ok();
    if let Ok((va, vb)) = closed_form::number_variances(p, input, t) {
        rec.na_var = Some(va);
        rec.nb_var = Some(vb);
    }
    if let Ok((qa, qb)) = closed_form::mandel_q_pair(p, input, t) {
        rec.q_a = Some(qa);
        rec.q_b = Some(qb);
    }
    if let Ok((s1, s2)) = closed_form::atomic_squeeze_coeffs(p, input, t) {
        rec.s1b = Some(s1);
        rec.s2b = Some(s2);
    }
    rec
}

pub fn closed_form_records<T: Real>(cfg: &ScenarioConfig<T>, times: &[T]) -> Vec<ObservableRecord<T>> {
    times.iter().map(|&t| closed_form_record(cfg, t)).collect()
}

pub fn moment_map_records<T: Real>(cfg: &ScenarioConfig<T>, times: &[T]) -> Result<Vec<ObservableRecord<T>>> {
    validate_times(times)?;
    initial_state(cfg)?;
    let (a0, n_max, tail) = initial_moments(cfg)?;
    let vacuum = NormalMoments::vacuum();
    times
        .iter()
        .map(|&t| {
            let (a, b) = heisenberg_moment_map(&propagator_at(&cfg.params, t), &a0, &vacuum)?;
            Ok(ObservableRecord::from_moments(t, Source::MomentMap, &a.moment_set(), &b.moment_set(), Some(n_max), Some(tail)))
        })
        .collect()
}

/// Oracle records plus the conservation drifts seen along the way.
#[derive(Debug, Clone)]
pub struct OracleRun<T> {
    pub records: Vec<ObservableRecord<T>>,
    pub norm_drift: T,
    pub ntotal_drift: T,
}

/// Like [`crate::oracle::evolve`] but keeps only records, one state at a time.
pub fn oracle_records<T: Real>(cfg: &ScenarioConfig<T>, times: &[T]) -> Result<OracleRun<T>> {
    validate_times(times)?;
    let state0 = initial_state(cfg)?;
    let h = build_hamiltonian(&cfg.params, cfg.truncation);
    let evolver = Evolver::new(&h, &state0)?;
    let tail = state0.tail_mass();
    let initial = oracle_record(T::zero(), &state0, tail);
    let (n0, total0) = (state0.norm(), initial.ntotal.unwrap_or(T::zero()));
    let mut run = OracleRun { records: Vec::with_capacity(times.len()), norm_drift: T::zero(), ntotal_drift: T::zero() };
    for &t in times {
        let state = evolver.state_at(t);
        let rec = oracle_record(t, &state, tail);
        run.norm_drift = run.norm_drift.max((state.norm() - n0).abs());
        run.ntotal_drift = run.ntotal_drift.max((rec.ntotal.unwrap_or(total0) - total0).abs());
        run.records.push(rec);
    }
    Ok(run)
}

/// Physical sanity of computed records: nonnegative variances, squeeze
/// coefficients at or above −1, and the quadrature uncertainty bound
/// `(S₁+1)(S₂+1) ≥ 1`.
pub fn check_record<T: Real>(rec: &ObservableRecord<T>) -> Result<()> {
    let tol = conservation_tol::<T>();
    let fail = |what: &str| Err(Error::InvariantViolation(format!("{what} at t={} ({})", rec.t, rec.source)));
    for v in [rec.na_var, rec.nb_var].into_iter().flatten() {
        if v < -tol * v.abs().max(T::one()) {
            return fail("negative number variance");
        }
    }
    for pair in [(rec.s1a, rec.s2a), (rec.s1b, rec.s2b)] {
        if let (Some(s1), Some(s2)) = pair {
            if s1 < -T::one() - tol || s2 < -T::one() - tol {
                return fail("squeeze coefficient below -1");
            }
            if (s1 + T::one()) * (s2 + T::one()) < T::one() - tol * (s1.abs() + s2.abs()).max(T::one()) {
                return fail("quadrature uncertainty bound");
            }
        }
    }
    Ok(())
}

/// Records from every requested source, ordered by time then source.
///
/// Computed sources (moment map, oracle) are checked with [`check_record`];
/// oracle drifts above [`CONSERVATION_TOL`] are reported as violations.
pub fn simulate<T: Real>(cfg: &ScenarioConfig<T>, times: &[T], sources: &[Source]) -> Result<Vec<ObservableRecord<T>>> {
    validate_times(times)?;
    if sources.is_empty() {
        return Err(Error::InvalidParameter("no source selected".into()));
    }
    let mut per_source = Vec::new();
    let mut wanted: Vec<Source> = sources.to_vec();
    wanted.sort();
    wanted.dedup();
    for source in wanted {
        let records = match source {
            Source::ClosedForm => closed_form_records(cfg, times),
            Source::MomentMap => moment_map_records(cfg, times)?,
            Source::Oracle => {
                let run = oracle_records(cfg, times)?;
                let scale = run.records.first().and_then(|r| r.ntotal).unwrap_or(T::zero()).max(T::one());
                let tol = conservation_tol::<T>();
                if run.norm_drift > tol || run.ntotal_drift > tol * scale {
                    return Err(Error::InvariantViolation(format!(
                        "oracle drift: norm {:e}, total number {:e}",
                        run.norm_drift, run.ntotal_drift
                    )));
                }
                run.records
            }
        };
        if source != Source::ClosedForm {
            records.iter().try_for_each(check_record)?;
        }
        per_source.push(records);
    }
    let mut rows = Vec::with_capacity(per_source.len() * times.len());
    for i in 0..times.len() {
        rows.extend(per_source.iter().map(|records| records[i]));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SqueezedInput;
    use crate::propagator::ModelParams;
    use num_complex::Complex;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg(r: f64, m: Complex<f64>, n_max: usize) -> ScenarioConfig<f64> {
        ScenarioConfig {
            params: ModelParams::resonant(4.0, 1.0, 0.0).unwrap(),
            input: SqueezedInput::new(r, 0.0, m).unwrap(),
            truncation: Truncation::new(n_max).unwrap(),
        }
    }

    #[test]
    fn grid_layout() {
        let g = time_grid(2.0 * PI, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.0);
        assert!((g[50] - FRAC_PI_2).abs() < 1e-15);
        assert!(time_grid(1.0, 1).is_err());
        assert!(time_grid(0.0, 4).is_err());
    }

    #[test]
    fn three_sources_agree_on_squeezed_vacuum() {
        let c = ScenarioConfig::with_auto_truncation(ModelParams::resonant(4.0, 1.0, 0.0).unwrap(), SqueezedInput::squeezed_vacuum(0.5, 0.0)).unwrap();
        let times = time_grid(PI, 12).unwrap();
        let rows = simulate(&c, &times, &Source::ALL).unwrap();
        assert_eq!(rows.len(), 36);
        for chunk in rows.chunks(3) {
            let [lit, mm, or] = [chunk[0], chunk[1], chunk[2]];
            assert_eq!((lit.source, mm.source, or.source), (Source::ClosedForm, Source::MomentMap, Source::Oracle));
            assert!((lit.na_mean.unwrap() - mm.na_mean.unwrap()).abs() < 1e-10);
            for (x, y) in mm.fields().iter().zip(or.fields()) {
                if let (Some(x), Some(y)) = (x, y) {
                    assert!((x - y).abs() < 1e-6 * y.abs().max(1.0), "{x} {y} at {}", or.t);
                }
            }
        }
    }

    #[test]
    fn closed_form_outside_domain_leaves_gaps() {
        let mut c = cfg(0.4, Complex::new(0.3, 0.2), 40);
        let rec = closed_form_record(&c, 0.3);
        assert!(rec.na_mean.is_some() && rec.na_var.is_some());
        assert!(rec.q_a.is_none() && rec.s1b.is_none() && rec.s1a.is_none());
        c.params = ModelParams::new(5.0, 4.0, 1.0, 0.0).unwrap();
        assert!(closed_form_record(&c, 0.3).fields().iter().all(Option::is_none));
    }

    #[test]
    fn insufficient_cutoff_is_reported() {
        let c = cfg(3.0, Complex::new(0.0, 0.0), 16);
        assert!(matches!(simulate(&c, &[0.0], &[Source::Oracle]), Err(Error::TruncationInsufficient { .. })));
        assert!(matches!(simulate(&c, &[0.0], &[Source::MomentMap]), Err(Error::TruncationInsufficient { .. })));
        assert!(simulate(&c, &[0.0], &[Source::ClosedForm]).is_ok());
    }

    #[test]
    fn moment_map_runs_detuned() {
        let mut c = cfg(0.3, Complex::new(0.5, -0.2), 40);
        c.params = ModelParams::new(5.0, 4.0, 1.0, 0.4).unwrap();
        let times = time_grid(3.0, 6).unwrap();
        let mm = moment_map_records(&c, &times).unwrap();
        let or = oracle_records(&c, &times).unwrap();
        for (x, y) in mm.iter().zip(&or.records) {
            for (u, v) in x.fields().iter().zip(y.fields()) {
                if let (Some(u), Some(v)) = (u, v) {
                    assert!((u - v).abs() < 1e-6 * v.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn record_checks() {
        let mut rec = ObservableRecord::<f64>::empty(0.0, Source::Oracle);
        rec.s1b = Some(-0.8);
        rec.s2b = Some(0.2);
        assert!(matches!(check_record(&rec), Err(Error::InvariantViolation(_))));
        rec.s2b = Some(4.0);
        assert!(check_record(&rec).is_ok());
        rec.na_var = Some(-1.0);
        assert!(check_record(&rec).is_err());
    }
}
