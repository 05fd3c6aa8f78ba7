//! Brute-force reference: exact evolution in the truncated two-mode Fock
//! space under `H = ω₀b†b + ω_a a†a + ω_R(e^{−iθ} a b† + e^{iθ} a† b)`.
//!
//! `H` conserves `n_a + n_b`, so it splits into one tridiagonal block per
//! excitation number. Conjugating by `D = diag(e^{−iθ n_b})` removes the
//! phase from the hopping terms, leaving real symmetric blocks that are
//! diagonalized once and reused at every requested time.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{build_squeezed, extract_moments, Mode, ModeVector, TwoModeState, Truncation};
use crate::observables::{ObservableRecord, ScenarioConfig, Source};
use crate::propagator::ModelParams;
use crate::scalar::{cis, Real};
use crate::tridiag::{symmetric_tridiagonal_eigen, TridiagEigen};

/// One excitation-number sector, in the θ-gauged (real) frame.
#[derive(Debug, Clone)]
pub struct Block<T> {
    pub n_tot: usize,
    /// Smallest `n_b` in the sector; row `j` of the block is `n_b = n_b_lo + j`.
    pub n_b_lo: usize,
    pub diag: Vec<T>,
    /// `off[j]` couples `n_b_lo + j` and `n_b_lo + j + 1`.
    pub off: Vec<T>,
}

impl<T> Block<T> {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// True for sectors cut by the per-mode cutoff (`n_tot > n_max`).
    pub fn is_boundary(&self, n_max: usize) -> bool {
        self.n_tot > n_max
    }
}

/// The two-mode Hamiltonian over the truncated product basis, stored as its
/// excitation-number blocks.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix<T> {
    params: ModelParams<T>,
    truncation: Truncation<T>,
    blocks: Vec<Block<T>>,
}

pub fn build_hamiltonian<T: Real>(params: &ModelParams<T>, truncation: Truncation<T>) -> HamiltonianMatrix<T> {
    let n_max = truncation.n_max();
    let blocks = (0..=2 * n_max)
        .map(|n_tot| {
            let lo = n_tot.saturating_sub(n_max);
            let hi = n_tot.min(n_max);
            let diag = (lo..=hi)
                .map(|n_b| params.omega0 * T::from_index(n_b) + params.omega_a * T::from_index(n_tot - n_b))
                .collect();
            let off = (lo..hi)
                .map(|n_b| params.omega_r * (T::from_index(n_tot - n_b) * T::from_index(n_b + 1)).sqrt())
                .collect();
            Block { n_tot, n_b_lo: lo, diag, off }
        })
        .collect();
    HamiltonianMatrix { params: *params, truncation, blocks }
}

impl<T: Real> HamiltonianMatrix<T> {
    pub fn dimension(&self) -> usize {
        self.truncation.two_mode_dim()
    }

    pub fn truncation(&self) -> Truncation<T> {
        self.truncation
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    fn split(&self, index: usize) -> (usize, usize) {
        let dim = self.truncation.dim();
        (index / dim, index % dim)
    }

    /// `⟨row|H|col⟩` with basis index `n_b·(n_max+1) + n_a`.
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let (rb, ra) = self.split(row);
        let (cb, ca) = self.split(col);
        if rb + ra != cb + ca {
            return zero;
        }
        let block = &self.blocks[rb + ra];
        let (i, j) = (rb - block.n_b_lo, cb - block.n_b_lo);
        if i == j {
            Complex::new(block.diag[i], T::zero())
        } else if i == j + 1 {
            // a b† moves one excitation onto b and carries e^{−iθ}
            cis(-self.params.theta) * block.off[j]
        } else if j == i + 1 {
            cis(self.params.theta) * block.off[i]
        } else {
            zero
        }
    }

    /// Columns holding a structurally nonzero entry in `row`.
    pub fn row_support(&self, row: usize) -> Vec<usize> {
        let (n_b, n_a) = self.split(row);
        let dim = self.truncation.dim();
        let mut cols = vec![row];
        if n_a >= 1 && n_b + 1 < dim {
            cols.push(row + dim - 1);
        }
        if n_b >= 1 && n_a + 1 < dim {
            cols.push(row - dim + 1);
        }
        cols
    }

    /// Dense copy, for small truncations only.
    pub fn to_dense(&self) -> Array2<Complex<T>> {
        let n = self.dimension();
        Array2::from_shape_fn((n, n), |(i, j)| self.entry(i, j))
    }
}

/// Precomputed spectral data for propagating one initial state.
#[derive(Debug, Clone)]
pub struct Evolver<T> {
    truncation: Truncation<T>,
    theta: T,
    sectors: Vec<Sector<T>>,
}

#[derive(Debug, Clone)]
struct Sector<T> {
    n_tot: usize,
    n_b_lo: usize,
    eigen: TridiagEigen<T>,
    /// Initial gauged amplitudes expanded in the eigenbasis.
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Evolver<T> {
    /// Diagonalizes every sector the initial state populates.
    pub fn new(h: &HamiltonianMatrix<T>, state0: &TwoModeState<T>) -> Result<Self> {
        let truncation = h.truncation;
        if state0.truncation().n_max() != truncation.n_max() {
            return Err(Error::TruncationMismatch { left: state0.truncation().n_max(), right: truncation.n_max() });
        }
        let tail = state0.tail_mass();
        if tail > truncation.tail_threshold() {
            return Err(Error::TruncationInsufficient {
                n_max: truncation.n_max(),
                reason: format!("initial mass {tail:e} in high excitation blocks exceeds {}", truncation.tail_threshold()),
            });
        }
        let theta = h.params.theta;
        let mut sectors = Vec::new();
        for block in &h.blocks {
            let gauged: Vec<Complex<T>> = (0..block.len())
                .map(|j| {
                    let n_b = block.n_b_lo + j;
                    state0.amplitude(n_b, block.n_tot - n_b) * cis(theta * T::from_index(n_b))
                })
                .collect();
            if gauged.iter().all(|c| c.norm_sqr() == T::zero()) {
                continue;
            }
            let eigen = symmetric_tridiagonal_eigen(&block.diag, &block.off)?;
            let coeffs = (0..block.len())
                .map(|k| {
                    gauged
                        .iter()
                        .enumerate()
                        .fold(Complex::new(T::zero(), T::zero()), |acc, (j, &x)| acc + x * eigen.vectors[[j, k]])
                })
                .collect();
            sectors.push(Sector { n_tot: block.n_tot, n_b_lo: block.n_b_lo, eigen, coeffs });
        }
        Ok(Self { truncation, theta, sectors })
    }

    /// `e^{−iHt}|ψ(0)⟩`.
    pub fn state_at(&self, t: T) -> TwoModeState<T> {
        let dim = self.truncation.dim();
        let zero = Complex::new(T::zero(), T::zero());
        let mut amps = Array1::from_elem(dim * dim, zero);
        for sector in &self.sectors {
            let len = sector.coeffs.len();
            let phased: Vec<Complex<T>> = sector
                .coeffs
                .iter()
                .zip(&sector.eigen.values)
                .map(|(&c, &e)| c * cis(-e * t))
                .collect();
            for j in 0..len {
                let x = (0..len).fold(zero, |acc, k| acc + phased[k] * sector.eigen.vectors[[j, k]]);
                let n_b = sector.n_b_lo + j;
                amps[n_b * dim + (sector.n_tot - n_b)] = x * cis(-self.theta * T::from_index(n_b));
            }
        }
        TwoModeState::from_raw(amps, self.truncation).expect("dimension fixed by truncation")
    }

    /// Probability held by each populated sector; time-invariant.
    pub fn sector_weights(&self) -> Vec<(usize, T)> {
        self.sectors.iter().map(|s| (s.n_tot, s.coeffs.iter().map(|c| c.norm_sqr()).sum())).collect()
    }
}

/// States and oracle records at each requested time.
#[derive(Debug, Clone)]
pub struct EvolutionResult<T> {
    pub states: Vec<TwoModeState<T>>,
    pub records: Vec<ObservableRecord<T>>,
    /// `max_t |‖ψ(t)‖ − ‖ψ(0)‖|`.
    pub norm_drift: T,
    /// `max_t |⟨N_a + N_b⟩(t) − ⟨N_a + N_b⟩(0)|`.
    pub ntotal_drift: T,
}

pub(crate) fn validate_times<T: Real>(times: &[T]) -> Result<()> {
    let ok = times.iter().all(|t| t.is_finite() && *t >= T::zero()) && times.windows(2).all(|w| w[0] <= w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidTimes)
    }
}

/// Evolves `state0` to every time in `times` (sorted, nonnegative).
pub fn evolve<T: Real>(state0: &TwoModeState<T>, h: &HamiltonianMatrix<T>, times: &[T]) -> Result<EvolutionResult<T>> {
    validate_times(times)?;
    let evolver = Evolver::new(h, state0)?;
    let tail = state0.tail_mass();
    let n0 = state0.norm();
    let total0 = ntotal(state0);
    let mut out = EvolutionResult { states: Vec::new(), records: Vec::new(), norm_drift: T::zero(), ntotal_drift: T::zero() };
    for &t in times {
        let state = evolver.state_at(t);
        let record = oracle_record(t, &state, tail);
        out.norm_drift = out.norm_drift.max((state.norm() - n0).abs());
        if let Some(total) = record.ntotal {
            out.ntotal_drift = out.ntotal_drift.max((total - total0).abs());
        }
        out.records.push(record);
        out.states.push(state);
    }
    Ok(out)
}

fn ntotal<T: Real>(state: &TwoModeState<T>) -> T {
    extract_moments(state, Mode::A).number_mean + extract_moments(state, Mode::B).number_mean
}

pub(crate) fn oracle_record<T: Real>(t: T, state: &TwoModeState<T>, tail: T) -> ObservableRecord<T> {
    let a = extract_moments(state, Mode::A);
    let b = extract_moments(state, Mode::B);
    ObservableRecord::from_moments(t, Source::Oracle, &a, &b, Some(state.truncation().n_max()), Some(tail))
}

/// Observables at one cutoff of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow<T> {
    pub n_max: usize,
    pub tail_mass: T,
    pub norm_deficit: T,
    /// Whether this cutoff satisfies the scenario's tail budget and the
    /// projection-deficit bound.
    pub sufficient: bool,
    pub records: Vec<ObservableRecord<T>>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable<T> {
    pub rows: Vec<ConvergenceRow<T>>,
    /// `deltas[i]`: largest change of any record field between rows `i` and
    /// `i + 1`.
    pub deltas: Vec<T>,
    pub tolerance: T,
    pub converged: bool,
}

/// Delta below which successive cutoffs count as agreeing.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

/// Runs the oracle at each cutoff in `n_max_list` (strictly increasing).
///
/// Converged means the last two successive deltas (or the only one) are
/// below [`CONVERGENCE_TOLERANCE`] and the final cutoff is sufficient.
pub fn convergence_sweep<T: Real>(cfg: &ScenarioConfig<T>, times: &[T], n_max_list: &[usize]) -> Result<ConvergenceTable<T>> {
    validate_times(times)?;
    if n_max_list.is_empty() || n_max_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("cutoff list must be non-empty and strictly increasing".into()));
    }
    let budget = cfg.truncation.tail_threshold();
    let mut rows = Vec::with_capacity(n_max_list.len());
    for &n_max in n_max_list {
        let build = build_squeezed(&cfg.input, n_max)?;
        let open = Truncation::new(n_max)?.with_tail_threshold(T::infinity());
        let a_state = ModeVector::from_amplitudes(build.amplitudes, open)?;
        let state0 = crate::fock::tensor_product(&ModeVector::vacuum(open), &a_state)?;
        let h = build_hamiltonian(&cfg.params, open);
        let run = evolve(&state0, &h, times)?;
        let sufficient = build.tail_mass <= budget && build.norm_deficit <= crate::fock::projection_budget();
        rows.push(ConvergenceRow {
            n_max,
            tail_mass: build.tail_mass,
            norm_deficit: build.norm_deficit,
            sufficient,
            records: run.records,
        });
    }
    let deltas: Vec<T> = rows
        .windows(2)
        .map(|w| {
            w[0].records
                .iter()
                .zip(&w[1].records)
                .flat_map(|(x, y)| x.fields().into_iter().zip(y.fields()))
                .filter_map(|(x, y)| Some((x? - y?).abs()))
                .fold(T::zero(), T::max)
        })
        .collect();
    let tolerance = T::lit(CONVERGENCE_TOLERANCE);
    let recent = &deltas[deltas.len().saturating_sub(2)..];
    let converged = !recent.is_empty()
        && recent.iter().all(|d| *d < tolerance)
        && rows.last().is_some_and(|r| r.sufficient);
    Ok(ConvergenceTable { rows, deltas, tolerance, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, squeezed_coherent_state, tensor_product, SqueezedInput};
    use crate::propagator::propagator_at;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn trunc(n: usize) -> Truncation<f64> {
        Truncation::new(n).unwrap()
    }

    fn product_state(a: ModeVector<f64>) -> TwoModeState<f64> {
        tensor_product(&ModeVector::vacuum(a.truncation()), &a).unwrap()
    }

    #[test]
    fn single_excitation_block_is_pauli_x() {
        let p = ModelParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        let h = build_hamiltonian(&p, trunc(1));
        let dim = 2;
        let (s01, s10) = (dim, 1); // (n_b,n_a) = (1,0) and (0,1)
        assert_eq!(h.entry(s10, s10), C::new(0.0, 0.0));
        assert_eq!(h.entry(s10, s01), C::new(1.0, 0.0));
        assert_eq!(h.entry(s01, s10), C::new(1.0, 0.0));
        assert_eq!(h.entry(s01, s01), C::new(0.0, 0.0));
    }

    #[test]
    fn diagonal_and_hopping_elements() {
        let p = ModelParams::new(1.3, 0.7, 0.9, 0.4).unwrap();
        let h = build_hamiltonian(&p, trunc(5));
        let idx = |n_b: usize, n_a: usize| n_b * 6 + n_a;
        assert!((h.entry(idx(2, 3), idx(2, 3)).re - (2.0 * 1.3 + 3.0 * 0.7)).abs() < 1e-14);
        let hop = h.entry(idx(1, 1), idx(0, 2));
        assert!((hop.norm() - 0.9 * 2f64.sqrt()).abs() < 1e-14);
        assert!((hop - cis(-0.4) * (0.9 * 2f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn hamiltonian_is_hermitian_sparse_and_number_conserving() {
        let p = ModelParams::new(2.0, 1.5, 0.8, 1.1).unwrap();
        let h = build_hamiltonian(&p, trunc(4));
        let dense = h.to_dense();
        let n = h.dimension();
        let dim = 5;
        for i in 0..n {
            let nz = (0..n).filter(|&j| dense[[i, j]].norm() > 0.0).count();
            assert!(nz <= 3);
            assert!(h.row_support(i).len() <= 3);
            for j in 0..n {
                assert_eq!(dense[[i, j]], dense[[j, i]].conj());
                if dense[[i, j]].norm() > 0.0 {
                    assert_eq!(i / dim + i % dim, j / dim + j % dim);
                    assert!(h.row_support(i).contains(&j));
                }
            }
        }
        assert!(h.blocks().iter().filter(|b| b.is_boundary(4)).all(|b| b.len() < b.n_tot + 1));
    }

    #[test]
    fn evolution_matches_dense_exponential() {
        // independent route: Taylor series of the full dense H
        let p = ModelParams::new(1.7, 1.1, 0.6, 0.8).unwrap();
        let t_final = 0.9;
        let tr = trunc(6).with_tail_threshold(1e-3);
        let a = coherent_state(C::new(0.5, -0.3), tr).unwrap();
        let state0 = product_state(a);
        let h = build_hamiltonian(&p, tr);
        let dense = h.to_dense();
        let steps = 64;
        let gen = dense.mapv(|c| c * C::new(0.0, -t_final / steps as f64));
        let mut step = Array2::<C>::eye(h.dimension());
        let mut term = Array2::<C>::eye(h.dimension());
        for k in 1..30 {
            term = term.dot(&gen).mapv(|c| c / k as f64);
            step += &term;
        }
        let mut psi = state0.amplitudes().clone();
        for _ in 0..steps {
            psi = step.dot(&psi);
        }
        let run = evolve(&state0, &h, &[t_final]).unwrap();
        for (x, y) in run.states[0].amplitudes().iter().zip(psi.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn time_zero_returns_initial_state() {
        let p = ModelParams::new(4.0, 4.0, 1.0, 0.3).unwrap();
        let tr = trunc(40);
        let state0 = product_state(squeezed_coherent_state(SqueezedInput::new(0.4, 0.1, C::new(0.5, 0.2)).unwrap(), tr).unwrap());
        let run = evolve(&state0, &build_hamiltonian(&p, tr), &[0.0]).unwrap();
        for (x, y) in run.states[0].amplitudes().iter().zip(state0.amplitudes()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn single_photon_rabi_swap() {
        let p = ModelParams::resonant(4.0, 1.0, 0.0).unwrap();
        let tr = trunc(4).with_tail_threshold(1.0);
        let state0 = product_state(ModeVector::number_state(1, tr).unwrap());
        let run = evolve(&state0, &build_hamiltonian(&p, tr), &[PI / 2.0]).unwrap();
        let s = &run.states[0];
        assert!((s.amplitude(1, 0).norm() - 1.0).abs() < 1e-13);
        assert!(s.amplitude(0, 1).norm() < 1e-13);
        assert!((run.records[0].nb_mean.unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn squeezed_vacuum_full_conversion() {
        let p = ModelParams::resonant(4.0, 1.0, 0.0).unwrap();
        let tr = trunc(64).with_tail_threshold(1e-6);
        let state0 = product_state(squeezed_coherent_state(SqueezedInput::squeezed_vacuum(1.0, 0.0), tr).unwrap());
        let run = evolve(&state0, &build_hamiltonian(&p, tr), &[PI / 2.0]).unwrap();
        let rec = &run.records[0];
        assert!((rec.nb_mean.unwrap() - 1f64.sinh().powi(2)).abs() < 1e-6);
        assert!(rec.na_mean.unwrap() < 1e-8);
    }

    #[test]
    fn first_moments_follow_closed_form_propagator() {
        let tr = trunc(48);
        let input = SqueezedInput::new(0.3, 0.4, C::new(0.9, -0.6)).unwrap();
        let state0 = product_state(squeezed_coherent_state(input, tr).unwrap());
        let a0 = extract_moments(&state0, Mode::A).mean_amp;
        for p in [ModelParams::new(5.0, 4.0, 1.0, 0.7).unwrap(), ModelParams::new(0.5, 3.0, 0.4, 2.0).unwrap()] {
            let times: Vec<f64> = (0..8).map(|k| 0.7 * k as f64).collect();
            let run = evolve(&state0, &build_hamiltonian(&p, tr), &times).unwrap();
            for (state, &t) in run.states.iter().zip(&times) {
                let (b_want, a_want) = propagator_at(&p, t).apply(C::new(0.0, 0.0), a0);
                assert!((extract_moments(state, Mode::A).mean_amp - a_want).norm() < 1e-10);
                assert!((extract_moments(state, Mode::B).mean_amp - b_want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn conservation_and_sector_weights() {
        let p = ModelParams::new(3.0, 2.0, 1.3, 0.9).unwrap();
        let tr = trunc(50);
        let state0 = product_state(squeezed_coherent_state(SqueezedInput::new(0.5, 0.2, C::new(0.6, 0.1)).unwrap(), tr).unwrap());
        let h = build_hamiltonian(&p, tr);
        let times: Vec<f64> = (0..25).map(|k| 0.4 * k as f64).collect();
        let run = evolve(&state0, &h, &times).unwrap();
        assert!(run.norm_drift < 1e-10);
        assert!(run.ntotal_drift < 1e-9);
        let ev = Evolver::new(&h, &state0).unwrap();
        for (n_tot, w0) in ev.sector_weights() {
            for &t in &times {
                let s = ev.state_at(t);
                let w: f64 = (0..=n_tot).map(|n_b| s.amplitude(n_b, n_tot - n_b).norm_sqr()).sum();
                assert!((w - w0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = ModelParams::resonant(1.0, 1.0, 0.0).unwrap();
        let tr = trunc(8);
        let state0 = product_state(ModeVector::vacuum(tr));
        let h = build_hamiltonian(&p, tr);
        assert_eq!(evolve(&state0, &h, &[1.0, 0.5]).unwrap_err(), Error::InvalidTimes);
        assert_eq!(evolve(&state0, &h, &[-1.0]).unwrap_err(), Error::InvalidTimes);
        let other = build_hamiltonian(&p, trunc(9));
        assert!(matches!(evolve(&state0, &other, &[0.0]), Err(Error::TruncationMismatch { .. })));
        let open = tr.with_tail_threshold(1.0);
        let heavy = product_state(ModeVector::number_state(8, open).unwrap());
        let strict = TwoModeState::from_raw(heavy.amplitudes().clone(), tr).unwrap();
        assert!(matches!(evolve(&strict, &h, &[0.0]), Err(Error::TruncationInsufficient { .. })));
    }

    fn scenario(r: f64, m: C) -> ScenarioConfig<f64> {
        ScenarioConfig {
            params: ModelParams::resonant(4.0, 1.0, 0.0).unwrap(),
            input: SqueezedInput::new(r, 0.0, m).unwrap(),
            truncation: trunc(16),
        }
    }

    #[test]
    fn convergence_coherent_input_converges_early() {
        let times = [0.0, 0.5, 1.0];
        let table = convergence_sweep(&scenario(0.0, C::new(1.0, 0.0)), &times, &[16, 24, 32]).unwrap();
        assert!(table.converged, "{:?}", table.deltas);
    }

    #[test]
    fn convergence_vacuum_is_trivial() {
        let table = convergence_sweep(&scenario(0.0, C::new(0.0, 0.0)), &[0.0, 1.0], &[8, 16]).unwrap();
        assert!(table.converged);
        assert_eq!(table.deltas, vec![0.0]);
    }

    #[test]
    fn convergence_squeezed_vacuum_deltas_shrink() {
        let times = [0.0, 0.8, PI / 2.0];
        let table = convergence_sweep(&scenario(1.0, C::new(0.0, 0.0)), &times, &[40, 56, 72, 88]).unwrap();
        assert!(table.deltas.windows(2).all(|w| w[1] < w[0]), "{:?}", table.deltas);
    }

    #[test]
    fn convergence_flags_insufficient_cutoff() {
        let table = convergence_sweep(&scenario(2.0, C::new(0.0, 0.0)), &[0.0], &[16]).unwrap_or_else(|e| panic!("{e}"));
        assert!(!table.rows[0].sufficient);
        assert!(!table.converged);
        assert!(convergence_sweep(&scenario(0.0, C::new(0.0, 0.0)), &[0.0], &[16, 8]).is_err());
    }
}
