//! Truncated Fock-space representation of the optical and atomic modes.
//!
//! Two-mode amplitudes are stored row-major over `(n_b, n_a)` with `n_a`
//! varying fastest. Squeezing follows `S(ξ) = exp[ξ a†² − ξ* a²]` with
//! `ξ = (r/2)·e^{−2iφ}`, so a squeezed vacuum has `⟨N⟩ = sinh²r` and
//! `⟨a²⟩ = +e^{−2iφ} sinh r cosh r`.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, Real};
use crate::tridiag::symmetric_tridiagonal_eigen;

/// Largest single-mode cutoff the automatic truncation search will try.
pub const MAX_AUTO_N_MAX: usize = 512;

/// Norm lost when projecting the squeezed state back to `n_max` must stay
/// below this.
pub const MAX_PROJECTION_DEFICIT: f64 = 1e-8;

pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-10;

/// Highest retained occupation per mode, plus the tail-mass budget a state
/// must respect to count as adequately truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation<T> {
    n_max: usize,
    tail_threshold: T,
}

impl<T: Real> Truncation<T> {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidTruncation);
        }
        Ok(Self { n_max, tail_threshold: T::lit(DEFAULT_TAIL_THRESHOLD) })
    }

    /// Replaces the tail-mass budget. `T::infinity()` disables the check.
    pub fn with_tail_threshold(mut self, threshold: T) -> Self {
        self.tail_threshold = threshold;
        self
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_threshold(&self) -> T {
        self.tail_threshold
    }

    /// Single-mode dimension `n_max + 1`.
    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn two_mode_dim(&self) -> usize {
        self.dim() * self.dim()
    }

    /// First index of the top 10% of occupations (at least one index).
    pub fn tail_start(&self) -> usize {
        let dim = self.dim();
        dim - dim.div_ceil(10)
    }

    /// Starting guess `ceil(4(|m|e^r + e^r)² + 20)` for the cutoff.
    pub fn heuristic_n_max(input: &SqueezedInput<T>) -> usize {
        let er = input.r.exp();
        let scale = input.m.norm() * er + er;
        let guess = T::lit(4.0) * scale * scale + T::lit(20.0);
        guess.ceil().to_usize().unwrap_or(usize::MAX)
    }

    /// Smallest cutoff, starting from the heuristic and growing by 25%, at
    /// which the squeezed input passes the tail and projection checks.
    pub fn auto(input: &SqueezedInput<T>, tail_threshold: T) -> Result<Self> {
        let mut n_max = Self::heuristic_n_max(input).max(1);
        loop {
            if n_max > MAX_AUTO_N_MAX {
                return Err(Error::TruncationInsufficient {
                    n_max: MAX_AUTO_N_MAX,
                    reason: format!("no cutoff up to {MAX_AUTO_N_MAX} meets tail threshold {tail_threshold}"),
                });
            }
            let build = build_squeezed(input, n_max)?;
            if build.tail_mass <= tail_threshold && build.norm_deficit <= projection_budget::<T>() {
                return Ok(Self { n_max, tail_threshold });
            }
            n_max = (n_max * 5).div_ceil(4);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n_max != other.n_max {
            return Err(Error::TruncationMismatch { left: self.n_max, right: other.n_max });
        }
        Ok(())
    }
}

/// Initial optical field `S(ξ)|m⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedInput<T> {
    pub r: T,
    pub phi: T,
    pub m: Complex<T>,
}

impl<T: Real> SqueezedInput<T> {
    pub fn new(r: T, phi: T, m: Complex<T>) -> Result<Self> {
        if !(r >= T::zero() && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeeze magnitude r must be finite and >= 0, got {r}")));
        }
        if !phi.is_finite() || !m.re.is_finite() || !m.im.is_finite() {
            return Err(Error::InvalidParameter("squeeze angle and amplitude must be finite".into()));
        }
        Ok(Self { r, phi, m })
    }

    pub fn coherent(m: Complex<T>) -> Self {
        Self { r: T::zero(), phi: T::zero(), m }
    }

    pub fn squeezed_vacuum(r: T, phi: T) -> Self {
        Self { r, phi, m: Complex::new(T::zero(), T::zero()) }
    }

    /// Generator coefficient `ξ = (r/2)·e^{−2iφ}`.
    pub fn xi(&self) -> Complex<T> {
        cis(-(self.phi + self.phi)) * (self.r / T::lit(2.0))
    }
}

/// Which of the two dynamical modes: `A` is the optical field, `B` the
/// untrapped atomic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

/// Normalized single-mode state.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector<T> {
    amplitudes: Array1<Complex<T>>,
    truncation: Truncation<T>,
}

impl<T: Real> ModeVector<T> {
    /// Normalizes `amplitudes` and checks the tail budget.
    pub fn from_amplitudes(amplitudes: Array1<Complex<T>>, truncation: Truncation<T>) -> Result<Self> {
        if amplitudes.len() != truncation.dim() {
            return Err(Error::TruncationMismatch { left: amplitudes.len().saturating_sub(1), right: truncation.n_max });
        }
        let norm = l2_norm(amplitudes.iter());
        if !(norm > T::zero() && norm.is_finite()) {
            return Err(Error::InvalidParameter("state has zero or non-finite norm".into()));
        }
        let v = Self { amplitudes: amplitudes.mapv(|c| c / norm), truncation };
        let tail = v.tail_mass();
        if tail > truncation.tail_threshold {
            return Err(Error::TruncationInsufficient {
                n_max: truncation.n_max,
                reason: format!("tail mass {tail:e} exceeds {}", truncation.tail_threshold),
            });
        }
        Ok(v)
    }

    /// Fock state `|n⟩`.
    pub fn number_state(n: usize, truncation: Truncation<T>) -> Result<Self> {
        if n > truncation.n_max {
            return Err(Error::InvalidParameter(format!("|{n}> outside cutoff {}", truncation.n_max)));
        }
        let mut amps = Array1::from_elem(truncation.dim(), Complex::new(T::zero(), T::zero()));
        amps[n] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes: amps, truncation })
    }

    pub fn vacuum(truncation: Truncation<T>) -> Self {
        Self::number_state(0, truncation).expect("vacuum always fits")
    }

    pub fn amplitudes(&self) -> &Array1<Complex<T>> {
        &self.amplitudes
    }

    pub fn truncation(&self) -> Truncation<T> {
        self.truncation
    }

    pub fn norm(&self) -> T {
        l2_norm(self.amplitudes.iter())
    }

    /// Probability in the top 10% of occupation numbers.
    pub fn tail_mass(&self) -> T {
        self.amplitudes.iter().skip(self.truncation.tail_start()).map(|c| c.norm_sqr()).sum()
    }

    pub fn normal_moments(&self) -> NormalMoments<T> {
        let slice = self.amplitudes.as_slice().expect("contiguous amplitudes");
        NormalMoments::accumulate(std::iter::once(slice.iter().copied()), self.truncation.dim())
    }

    pub fn moments(&self) -> MomentSet<T> {
        self.normal_moments().moment_set()
    }
}

/// Normalized state over the truncated `(n_b, n_a)` product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState<T> {
    amplitudes: Array1<Complex<T>>,
    truncation: Truncation<T>,
}

impl<T: Real> TwoModeState<T> {
    /// Wraps raw amplitudes without renormalizing; callers own normalization.
    pub fn from_raw(amplitudes: Array1<Complex<T>>, truncation: Truncation<T>) -> Result<Self> {
        if amplitudes.len() != truncation.two_mode_dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                truncation.two_mode_dim(),
                amplitudes.len()
            )));
        }
        Ok(Self { amplitudes, truncation })
    }

    pub fn index(&self, n_b: usize, n_a: usize) -> usize {
        n_b * self.truncation.dim() + n_a
    }

    pub fn amplitude(&self, n_b: usize, n_a: usize) -> Complex<T> {
        self.amplitudes[self.index(n_b, n_a)]
    }

    pub fn amplitudes(&self) -> &Array1<Complex<T>> {
        &self.amplitudes
    }

    pub fn truncation(&self) -> Truncation<T> {
        self.truncation
    }

    pub fn norm(&self) -> T {
        l2_norm(self.amplitudes.iter())
    }

    /// Probability in excitation-number blocks `n_a + n_b ≥ tail_start`.
    pub fn tail_mass(&self) -> T {
        let dim = self.truncation.dim();
        let start = self.truncation.tail_start();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx / dim + idx % dim >= start)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    pub fn normal_moments(&self, mode: Mode) -> NormalMoments<T> {
        let dim = self.truncation.dim();
        let amps = &self.amplitudes;
        match mode {
            Mode::A => {
                let slice = amps.as_slice().expect("contiguous amplitudes");
                NormalMoments::accumulate(slice.chunks(dim).map(|row| row.iter().copied()), dim)
            }
            Mode::B => NormalMoments::accumulate(
                (0..dim).map(|n_a| (0..dim).map(move |n_b| amps[n_b * dim + n_a])),
                dim,
            ),
        }
    }
}

/// `⟨c⟩`, `⟨c²⟩`, `⟨c†c⟩` and `⟨(c†c)²⟩` for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet<T> {
    pub mean_amp: Complex<T>,
    pub sq_amp: Complex<T>,
    pub number_mean: T,
    pub number_sq: T,
}

impl<T: Real> MomentSet<T> {
    pub fn number_variance(&self) -> T {
        self.number_sq - self.number_mean * self.number_mean
    }
}

/// Normal-ordered moments `⟨c†ᵖ c^q⟩` for `p + q ≤ 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalMoments<T> {
    table: [[Complex<T>; 5]; 5],
}

impl<T: Real> NormalMoments<T> {
    pub const MAX_ORDER: usize = 4;

    pub fn vacuum() -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let mut table = [[zero; 5]; 5];
        table[0][0] = Complex::new(T::one(), T::zero());
        Self { table }
    }

    /// Builds a table from `f(p, q) = ⟨c†ᵖ c^q⟩`; entries with `p + q > 4`
    /// are left at zero.
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut out = Self::vacuum();
        for p in 0..=Self::MAX_ORDER {
            for q in 0..=Self::MAX_ORDER - p {
                out.table[p][q] = f(p, q);
            }
        }
        out
    }

    /// `⟨c†ᵖ c^q⟩`. Panics if `p + q > 4`.
    pub fn get(&self, p: usize, q: usize) -> Complex<T> {
        assert!(p + q <= Self::MAX_ORDER, "normal moment order {p}+{q} not tracked");
        self.table[p][q]
    }

    /// True when every moment except the trivial `⟨1⟩` vanishes within `tol`.
    pub fn is_vacuum(&self, tol: T) -> bool {
        (0..=Self::MAX_ORDER)
            .flat_map(|p| (0..=Self::MAX_ORDER - p).map(move |q| (p, q)))
            .filter(|&pq| pq != (0, 0))
            .all(|(p, q)| self.table[p][q].norm() <= tol)
    }

    pub fn moment_set(&self) -> MomentSet<T> {
        let n = self.table[1][1].re;
        MomentSet {
            mean_amp: self.table[0][1],
            sq_amp: self.table[0][2],
            number_mean: n,
            number_sq: self.table[2][2].re + n,
        }
    }

    /// Sums `Σ_k conj(c^p ψ)_k (c^q ψ)_k` over independent fibers (one per
    /// spectator-mode occupation).
    fn accumulate<I, F>(fibers: F, dim: usize) -> Self
    where
        F: IntoIterator<Item = I>,
        I: Iterator<Item = Complex<T>>,
    {
        let zero = Complex::new(T::zero(), T::zero());
        let mut table = [[zero; 5]; 5];
        // sqrt(n!/(n-q)!) for each n and q ≤ 4
        let falling: Vec<[T; 5]> = (0..dim)
            .map(|n| {
                let mut row = [T::zero(); 5];
                let mut acc = T::one();
                for (q, slot) in row.iter_mut().enumerate() {
                    if q > n {
                        break;
                    }
                    *slot = acc.sqrt();
                    acc = acc * T::from_index(n - q);
                }
                row
            })
            .collect();
        let mut fiber = Vec::with_capacity(dim);
        for f in fibers {
            fiber.clear();
            fiber.extend(f);
            for p in 0..=4usize {
                for q in 0..=4 - p {
                    let shift = p.max(q);
                    let mut sum = zero;
                    for k in 0..dim.saturating_sub(shift) {
                        let left = fiber[k + p] * falling[k + p][p];
                        let right = fiber[k + q] * falling[k + q][q];
                        sum = sum + left.conj() * right;
                    }
                    table[p][q] = table[p][q] + sum;
                }
            }
        }
        Self { table }
    }
}

/// Annihilation operator on the truncated single-mode space:
/// entry `(n−1, n)` is `√n`.
pub fn ladder_matrix<T: Real>(truncation: Truncation<T>) -> Array2<Complex<T>> {
    let dim = truncation.dim();
    let mut a = Array2::from_elem((dim, dim), Complex::new(T::zero(), T::zero()));
    for n in 1..dim {
        a[[n - 1, n]] = Complex::new(T::from_index(n).sqrt(), T::zero());
    }
    a
}

/// Conjugate transpose of a dense complex matrix.
pub fn adjoint<T: Real>(m: &Array2<Complex<T>>) -> Array2<Complex<T>> {
    m.t().mapv(|c| c.conj())
}

/// Glauber coherent state `|m⟩`, amplitudes `mⁿ/√n!` built by ratios.
pub fn coherent_state<T: Real>(m: Complex<T>, truncation: Truncation<T>) -> Result<ModeVector<T>> {
    ModeVector::from_amplitudes(coherent_amplitudes(m, truncation.dim()), truncation)
}

fn coherent_amplitudes<T: Real>(m: Complex<T>, dim: usize) -> Array1<Complex<T>> {
    let mut amps = Array1::from_elem(dim, Complex::new(T::zero(), T::zero()));
    let mut c = Complex::new((-m.norm_sqr() / T::lit(2.0)).exp(), T::zero());
    amps[0] = c;
    for n in 1..dim {
        c = c * m / T::from_index(n).sqrt();
        amps[n] = c;
    }
    amps
}

/// Deficit budget, widened to rounding level for single precision.
pub fn projection_budget<T: Real>() -> T {
    T::lit(MAX_PROJECTION_DEFICIT).max(T::epsilon() * T::lit(16.0))
}

/// `S(ξ)|m⟩` projected to the cutoff of `truncation`.
///
/// The squeeze is applied at working cutoff `2·n_max`; the projection back
/// must lose less than [`MAX_PROJECTION_DEFICIT`] of the norm and the result
/// must satisfy the truncation's tail budget.
pub fn squeezed_coherent_state<T: Real>(input: SqueezedInput<T>, truncation: Truncation<T>) -> Result<ModeVector<T>> {
    if input.r == T::zero() {
        return coherent_state(input.m, truncation);
    }
    let build = build_squeezed(&input, truncation.n_max)?;
    if build.norm_deficit > projection_budget::<T>() {
        return Err(Error::TruncationInsufficient {
            n_max: truncation.n_max,
            reason: format!("projection norm deficit {:e}", build.norm_deficit),
        });
    }
    ModeVector::from_amplitudes(build.amplitudes, truncation)
}

/// Squeezed input projected to `n_max` without enforcing any budget.
#[derive(Debug, Clone)]
pub struct SqueezeBuild<T> {
    /// Renormalized amplitudes on `0..=n_max`.
    pub amplitudes: Array1<Complex<T>>,
    pub norm_deficit: T,
    pub tail_mass: T,
}

pub fn build_squeezed<T: Real>(input: &SqueezedInput<T>, n_max: usize) -> Result<SqueezeBuild<T>> {
    let truncation = Truncation::<T>::new(n_max)?;
    let work = 2 * n_max;
    let mut amps = coherent_amplitudes(input.m, work + 1);
    let norm = l2_norm(amps.iter());
    amps.mapv_inplace(|c| c / norm);
    if input.r > T::zero() {
        apply_squeeze(amps.as_slice_mut().expect("contiguous"), input.r, input.phi)?;
    }
    let kept = amps.slice(ndarray::s![..=n_max]).to_owned();
    let kept_norm = l2_norm(kept.iter());
    let norm_deficit = T::one() - kept_norm * kept_norm;
    let kept = kept.mapv(|c| c / kept_norm);
    let tail_mass = kept.iter().skip(truncation.tail_start()).map(|c| c.norm_sqr()).sum();
    Ok(SqueezeBuild { amplitudes: kept, norm_deficit, tail_mass })
}

/// In-place `exp[ξa†² − ξ*a²]` on the space spanned by `psi`.
///
/// With `R = e^{−iφN}` the generator is `R·(r/2)(a†² − a²)·R†`. The inner
/// generator splits into even and odd chains, each a real antisymmetric
/// tridiagonal `A`; `A = D(−iS)D⁻¹` with `D = diag(iᵏ)` and `S` symmetric,
/// so `exp(A) = D·V e^{−iΛ} Vᵀ·D⁻¹`.
fn apply_squeeze<T: Real>(psi: &mut [Complex<T>], r: T, phi: T) -> Result<()> {
    let half_r = r / T::lit(2.0);
    for (n, c) in psi.iter_mut().enumerate() {
        *c = *c * cis(phi * T::from_index(n));
    }
    for parity in 0..2 {
        let sites: Vec<usize> = (parity..psi.len()).step_by(2).collect();
        let len = sites.len();
        if len < 2 {
            continue;
        }
        let coupling: Vec<T> = sites[..len - 1]
            .iter()
            .map(|&n| half_r * (T::from_index(n + 1) * T::from_index(n + 2)).sqrt())
            .collect();
        let eig = symmetric_tridiagonal_eigen(&vec![T::zero(); len], &coupling)?;
        // D⁻¹ applied: multiply site k by i^{−k}
        let chain: Vec<Complex<T>> = sites.iter().enumerate().map(|(k, &n)| psi[n] * i_pow(-(k as i64))).collect();
        let mut evolved = vec![Complex::new(T::zero(), T::zero()); len];
        for j in 0..len {
            let proj: Complex<T> = (0..len).map(|k| chain[k] * eig.vectors[[k, j]]).fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
            let phase = cis(-eig.values[j]) * proj;
            for k in 0..len {
                evolved[k] = evolved[k] + phase * eig.vectors[[k, j]];
            }
        }
        for (k, &n) in sites.iter().enumerate() {
            psi[n] = evolved[k] * i_pow(k as i64);
        }
    }
    for (n, c) in psi.iter_mut().enumerate() {
        *c = *c * cis(-phi * T::from_index(n));
    }
    Ok(())
}

fn i_pow<T: Real>(k: i64) -> Complex<T> {
    match k.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

/// `|b⟩ ⊗ |a⟩` with amplitude `b[n_b]·a[n_a]` at `(n_b, n_a)`.
pub fn tensor_product<T: Real>(b_state: &ModeVector<T>, a_state: &ModeVector<T>) -> Result<TwoModeState<T>> {
    b_state.truncation.check(&a_state.truncation)?;
    let dim = a_state.truncation.dim();
    let mut amps = Array1::from_elem(dim * dim, Complex::new(T::zero(), T::zero()));
    for (n_b, &cb) in b_state.amplitudes.iter().enumerate() {
        for (n_a, &ca) in a_state.amplitudes.iter().enumerate() {
            amps[n_b * dim + n_a] = cb * ca;
        }
    }
    Ok(TwoModeState { amplitudes: amps, truncation: a_state.truncation })
}

pub fn extract_moments<T: Real>(state: &TwoModeState<T>, mode: Mode) -> MomentSet<T> {
    state.normal_moments(mode).moment_set()
}

fn l2_norm<'a, T: Real>(it: impl Iterator<Item = &'a Complex<T>>) -> T {
    it.map(|c| c.norm_sqr()).sum::<T>().sqrt()
}
