//! Heisenberg-picture solution of the linearly coupled `(b, a)` pair.
//!
//! After the condensate mode is replaced by a c-number the field operators
//! obey `i d/dt (b, a)ᵀ = M (b, a)ᵀ` with
//! `M = [[ω₀, ω_R e^{−iθ}], [ω_R e^{iθ}, ω_a]]`, solved exactly by
//! [`propagator_at`]. Moments of the output modes then follow from the
//! input moments by [`heisenberg_moment_map`].

use std::ops::Mul;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::NormalMoments;
use crate::scalar::{cis, Real};

/// Frequencies in rad per (arbitrary) time unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Level splitting between trapped and untrapped states.
    pub omega0: T,
    /// Optical frequency.
    pub omega_a: T,
    /// Effective coupling `ω_R'·√N_c`.
    pub omega_r: T,
    /// Condensate phase.
    pub theta: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(omega0: T, omega_a: T, omega_r: T, theta: T) -> Result<Self> {
        if !(omega_r > T::zero() && omega_r.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega_r must be finite and > 0, got {omega_r}")));
        }
        if !omega0.is_finite() || !omega_a.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter("frequencies and phase must be finite".into()));
        }
        Ok(Self { omega0, omega_a, omega_r, theta })
    }

    pub fn resonant(omega: T, omega_r: T, theta: T) -> Result<Self> {
        Self::new(omega, omega, omega_r, theta)
    }

    /// `ω₀ = ω_a` up to rounding.
    pub fn is_resonant(&self) -> bool {
        let scale = T::one().max(self.omega0.abs()).max(self.omega_a.abs());
        (self.omega0 - self.omega_a).abs() <= T::lit(1e-12) * scale
    }

    pub fn require_resonance(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::NotAtResonance { omega0: self.omega0.as_f64(), omega_a: self.omega_a.as_f64() })
        }
    }

    /// `(ω₀ + ω_a)/2`, the carrier frequency of the global phase.
    pub fn mean_frequency(&self) -> T {
        (self.omega0 + self.omega_a) / T::lit(2.0)
    }
}

/// Detuning angle `ϑ` (`ω₀ − ω_a = 2ω_R tan ϑ`) and generalized Rabi
/// frequency `I = ω_R / cos ϑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningGeometry<T> {
    pub varphi: T,
    pub big_i: T,
}

pub fn detuning_geometry<T: Real>(params: &ModelParams<T>) -> DetuningGeometry<T> {
    let varphi = ((params.omega0 - params.omega_a) / (T::lit(2.0) * params.omega_r)).atan();
    DetuningGeometry { varphi, big_i: params.omega_r / varphi.cos() }
}

/// `U(t)` with `(b(t), a(t))ᵀ = global_phase · entries · (b(0), a(0))ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix<T> {
    entries: [[Complex<T>; 2]; 2],
    global_phase: Complex<T>,
    t: T,
}

impl<T: Real> PropagatorMatrix<T> {
    pub fn identity() -> Self {
        let (zero, one) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        Self { entries: [[one, zero], [zero, one]], global_phase: one, t: T::zero() }
    }

    pub fn entries(&self) -> [[Complex<T>; 2]; 2] {
        self.entries
    }

    pub fn global_phase(&self) -> Complex<T> {
        self.global_phase
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Entries with the global phase folded in.
    pub fn full(&self) -> [[Complex<T>; 2]; 2] {
        self.entries.map(|row| row.map(|c| c * self.global_phase))
    }

    /// `λ₋(t)`, the `b ← b` amplitude.
    pub fn lambda_minus(&self) -> Complex<T> {
        self.entries[0][0]
    }

    /// `λ₊(t)`, the `a ← a` amplitude.
    pub fn lambda_plus(&self) -> Complex<T> {
        self.entries[1][1]
    }

    /// `η(t)`, the magnitude of the off-diagonal transfer.
    pub fn eta(&self) -> T {
        self.entries[0][1].norm()
    }

    /// `max |U U† − I|` over entries.
    pub fn unitarity_defect(&self) -> T {
        let u = self.full();
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let dot = u[i][0] * u[j][0].conj() + u[i][1] * u[j][1].conj();
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((dot - Complex::new(want, T::zero())).norm());
            }
        }
        worst
    }

    /// Applies the map to first moments `(⟨b(0)⟩, ⟨a(0)⟩)`.
    pub fn apply(&self, b0: Complex<T>, a0: Complex<T>) -> (Complex<T>, Complex<T>) {
        let u = self.full();
        (u[0][0] * b0 + u[0][1] * a0, u[1][0] * b0 + u[1][1] * a0)
    }
}

impl<T: Real> Mul for PropagatorMatrix<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (x, y) = (self.entries, rhs.entries);
        let mut entries = x;
        for i in 0..2 {
            for j in 0..2 {
                entries[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        Self { entries, global_phase: self.global_phase * rhs.global_phase, t: self.t + rhs.t }
    }
}

/// Closed-form transfer matrix at time `t`:
/// `[[λ₋, −iη e^{−iθ}], [−iη e^{iθ}, λ₊]]·e^{−i(ω₀+ω_a)t/2}` with
/// `λ± = cos(It) ± i sin ϑ sin(It)` and `η = cos ϑ sin(It)`.
pub fn propagator_at<T: Real>(params: &ModelParams<T>, t: T) -> PropagatorMatrix<T> {
    let geo = detuning_geometry(params);
    let (s, c) = (geo.big_i * t).sin_cos();
    let sv = geo.varphi.sin();
    let eta = geo.varphi.cos() * s;
    let minus_i_eta = Complex::new(T::zero(), -eta);
    PropagatorMatrix {
        entries: [
            [Complex::new(c, -sv * s), minus_i_eta * cis(-params.theta)],
            [minus_i_eta * cis(params.theta), Complex::new(c, sv * s)],
        ],
        global_phase: cis(-params.mean_frequency() * t),
        t,
    }
}

/// Times `(n + ½)π/ω_R`, `n = 0..count`, at which the two modes fully swap.
pub fn conversion_times<T: Real>(params: &ModelParams<T>, count: usize) -> Result<Vec<T>> {
    params.require_resonance()?;
    if count == 0 {
        return Err(Error::InvalidParameter("conversion time count must be >= 1".into()));
    }
    Ok((0..count).map(|n| (T::from_index(n) + T::lit(0.5)) * T::PI() / params.omega_r).collect())
}

/// Output-mode moments for an input with the atomic mode in vacuum.
///
/// Each output is `c = β b(0) + γ a(0)`. With `b(0)` annihilating the
/// initial state, every normal-ordered product containing `b` or `b†`
/// vanishes, leaving `⟨c†ᵖ c^q⟩ = γ*ᵖ γ^q ⟨a†ᵖ a^q⟩`.
///
/// Returns `(a(t), b(t))` moments.
pub fn heisenberg_moment_map<T: Real>(
    u: &PropagatorMatrix<T>,
    initial_a: &NormalMoments<T>,
    initial_b: &NormalMoments<T>,
) -> Result<(NormalMoments<T>, NormalMoments<T>)> {
    if !initial_b.is_vacuum(T::lit(1e-12)) {
        return Err(Error::NonVacuumInput);
    }
    let full = u.full();
    let transform = |gamma: Complex<T>| {
        NormalMoments::from_fn(|p, q| gamma.conj().powu(p as u32) * gamma.powu(q as u32) * initial_a.get(p, q))
    };
    Ok((transform(full[1][1]), transform(full[0][1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{squeezed_coherent_state, ModeVector, SqueezedInput, Truncation};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// RK4 on `i d/dt v = M v`, test-only route independent of the closed form.
    fn integrate(p: &ModelParams<f64>, v0: [C; 2], t: f64, steps: usize) -> [C; 2] {
        let m = [
            [C::new(p.omega0, 0.0), cis(-p.theta) * p.omega_r],
            [cis(p.theta) * p.omega_r, C::new(p.omega_a, 0.0)],
        ];
        let f = |v: [C; 2]| -> [C; 2] {
            let mi = C::new(0.0, -1.0);
            [mi * (m[0][0] * v[0] + m[0][1] * v[1]), mi * (m[1][0] * v[0] + m[1][1] * v[1])]
        };
        let h = t / steps as f64;
        let mut v = v0;
        let axpy = |v: [C; 2], k: [C; 2], s: f64| [v[0] + k[0] * s, v[1] + k[1] * s];
        for _ in 0..steps {
            let k1 = f(v);
            let k2 = f(axpy(v, k1, h / 2.0));
            let k3 = f(axpy(v, k2, h / 2.0));
            let k4 = f(axpy(v, k3, h));
            v = [
                v[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
                v[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
            ];
        }
        v
    }

    fn squeezed_moments(r: f64, m: C) -> NormalMoments<f64> {
        squeezed_moments_at(r, m, 160)
    }

    fn squeezed_moments_at(r: f64, m: C, n_max: usize) -> NormalMoments<f64> {
        let t = Truncation::new(n_max).unwrap().with_tail_threshold(f64::INFINITY);
        squeezed_coherent_state(SqueezedInput::new(r, 0.0, m).unwrap(), t).unwrap().normal_moments()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 1.0, 0.0).is_err());
        assert!(ModelParams::resonant(4.0, 1.0, 0.0).unwrap().is_resonant());
        assert!(!ModelParams::new(5.0, 4.0, 1.0, 0.0).unwrap().is_resonant());
    }

    #[test]
    fn detuning_geometry_examples() {
        let g = detuning_geometry(&ModelParams::resonant(3.0, 1.5, 0.0).unwrap());
        assert_eq!(g.varphi, 0.0);
        assert_eq!(g.big_i, 1.5);

        let g = detuning_geometry(&ModelParams::new(4.0, 2.0, 1.0, 0.0).unwrap());
        assert!((g.varphi - PI / 4.0).abs() < 1e-15);
        assert!((g.big_i - 2f64.sqrt()).abs() < 1e-14);

        let g = detuning_geometry(&ModelParams::new(2.0, 4.0, 1.0, 0.0).unwrap());
        assert!((g.varphi + PI / 4.0).abs() < 1e-15);
        assert!((g.big_i - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn generalized_rabi_frequency_identity() {
        for &(w0, wa, wr) in &[(0.0, 3.0, 0.5), (7.0, 1.0, 2.0), (1.0, 1.0, 0.1)] {
            let p = ModelParams::new(w0, wa, wr, 0.0).unwrap();
            let g = detuning_geometry(&p);
            let want = (wr * wr + ((w0 - wa) / 2.0f64).powi(2)).sqrt();
            assert!((g.big_i - want).abs() < 1e-12);
            assert!(g.big_i >= wr);
        }
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let p = ModelParams::new(3.0, 1.0, 0.7, 1.2).unwrap();
        let u = propagator_at(&p, 0.0);
        assert_eq!(u.global_phase(), C::new(1.0, 0.0));
        let e = u.entries();
        assert!(close(e[0][0], C::new(1.0, 0.0), 1e-15) && close(e[1][1], C::new(1.0, 0.0), 1e-15));
        assert!(e[0][1].norm() < 1e-15 && e[1][0].norm() < 1e-15);
    }

    #[test]
    fn resonant_quarter_period_swaps_modes() {
        let p = ModelParams::resonant(4.0, 1.0, 0.0).unwrap();
        let t = PI / 2.0;
        let u = propagator_at(&p, t);
        let e = u.entries();
        assert!(e[0][0].norm() < 1e-15 && e[1][1].norm() < 1e-15);
        assert!(close(e[0][1], C::new(0.0, -1.0), 1e-15));
        assert!(close(e[1][0], C::new(0.0, -1.0), 1e-15));
        assert!(close(u.global_phase(), cis(-4.0 * t), 1e-15));
    }

    #[test]
    fn resonance_reduces_to_cosine_sine_form() {
        let (omega, wr, theta) = (2.5, 0.8, 0.4);
        let p = ModelParams::resonant(omega, wr, theta).unwrap();
        for k in 0..20 {
            let t = 0.37 * k as f64;
            let e = propagator_at(&p, t).entries();
            let (s, c) = (wr * t).sin_cos();
            assert!(close(e[0][0], C::new(c, 0.0), 1e-14));
            assert!(close(e[0][1], C::new(0.0, -s) * cis(-theta), 1e-14));
            assert!(close(e[1][0], C::new(0.0, -s) * cis(theta), 1e-14));
            assert!(close(e[1][1], C::new(c, 0.0), 1e-14));
        }
    }

    #[test]
    fn detuned_full_period_decouples() {
        // ϑ = π/4, I = √2, I·t = π
        let p = ModelParams::new(4.0, 2.0, 1.0, 0.3).unwrap();
        let u = propagator_at(&p, PI / 2f64.sqrt());
        assert!(close(u.lambda_minus(), C::new(-1.0, 0.0), 1e-14));
        assert!(close(u.lambda_plus(), C::new(-1.0, 0.0), 1e-14));
        assert!(u.eta() < 1e-14);
    }

    #[test]
    fn detuned_propagator_matches_direct_integration() {
        let cases = [
            (5.0, 4.0, 1.0, 0.0),
            (0.0, 3.0, 0.6, 1.1),
            (2.0, 9.0, 2.5, -0.4),
            (7.5, 7.0, 0.2, 2.9),
        ];
        for &(w0, wa, wr, th) in &cases {
            let p = ModelParams::new(w0, wa, wr, th).unwrap();
            let v0 = [C::new(0.3, -0.2), C::new(1.1, 0.5)];
            for &t in &[0.5, 1.7, 4.0] {
                let got = propagator_at(&p, t).apply(v0[0], v0[1]);
                let want = integrate(&p, v0, t, 20_000);
                assert!(close(got.0, want[0], 1e-10) && close(got.1, want[1], 1e-10), "{:?} t={t}", (w0, wa, wr, th));
            }
        }
    }

    #[test]
    fn detuned_composition_agrees_with_integration() {
        let p = ModelParams::new(3.0, 1.0, 0.9, 0.5).unwrap();
        let v0 = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let composed = propagator_at(&p, 1.3) * propagator_at(&p, 0.9);
        let got = composed.apply(v0[0], v0[1]);
        let want = integrate(&p, v0, 2.2, 20_000);
        assert!(close(got.0, want[0], 1e-10) && close(got.1, want[1], 1e-10));
    }

    #[test]
    fn conversion_times_examples() {
        let p = ModelParams::resonant(4.0, 1.0, 0.0).unwrap();
        assert_eq!(conversion_times(&p, 1).unwrap(), vec![PI / 2.0]);
        let p2 = ModelParams::resonant(4.0, 2.0, 0.0).unwrap();
        let ts = conversion_times(&p2, 2).unwrap();
        assert!((ts[0] - PI / 4.0).abs() < 1e-15 && (ts[1] - 3.0 * PI / 4.0).abs() < 1e-15);
        let detuned = ModelParams::new(5.0, 4.0, 1.0, 0.0).unwrap();
        assert!(matches!(conversion_times(&detuned, 1), Err(Error::NotAtResonance { .. })));
        assert!(conversion_times(&p, 0).is_err());
    }

    #[test]
    fn moment_map_identity_leaves_moments() {
        let a0 = squeezed_moments(0.5, C::new(0.4, 0.2));
        let (a, b) = heisenberg_moment_map(&PropagatorMatrix::identity(), &a0, &NormalMoments::vacuum()).unwrap();
        assert_eq!(a, a0);
        assert!(b.is_vacuum(0.0));
    }

    #[test]
    fn moment_map_conversion_transfers_number() {
        let r = 1.0;
        let p = ModelParams::resonant(4.0, 1.0, 0.0).unwrap();
        let a0 = squeezed_moments(r, C::new(0.0, 0.0));
        let (a, b) = heisenberg_moment_map(&propagator_at(&p, PI / 2.0), &a0, &NormalMoments::vacuum()).unwrap();
        assert!((b.moment_set().number_mean - r.sinh().powi(2)).abs() < 1e-9);
        assert!(a.moment_set().number_mean.abs() < 1e-25);
    }

    #[test]
    fn moment_map_third_period_occupation() {
        let p = ModelParams::resonant(4.0, 1.0, 0.0).unwrap();
        let a0 = squeezed_moments(1.0, C::new(0.0, 0.0));
        let (_, b) = heisenberg_moment_map(&propagator_at(&p, PI / 3.0), &a0, &NormalMoments::vacuum()).unwrap();
        assert!((b.moment_set().number_mean - 1.035_823_384_156_361_5).abs() < 1e-9);
    }

    #[test]
    fn moment_map_rejects_occupied_atomic_mode() {
        let t = Truncation::<f64>::new(8).unwrap();
        let excited = ModeVector::number_state(1, t).unwrap().normal_moments();
        let u = PropagatorMatrix::identity();
        assert_eq!(heisenberg_moment_map(&u, &excited, &excited), Err(Error::NonVacuumInput));
    }

    #[test]
    fn single_precision_propagator_is_unitary() {
        let p = ModelParams::new(3.0f32, 1.0, 0.7, 0.4).unwrap();
        assert!(propagator_at(&p, 2.3).unitarity_defect() < 1e-5);
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams<f64>> {
        (0.0..10.0f64, 0.0..10.0f64, 1e-3..5.0f64, 0.0..(2.0 * PI))
            .prop_map(|(w0, wa, wr, th)| ModelParams::new(w0, wa, wr, th).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn propagator_is_unitary(p in params_strategy(), t in 0.0..20.0f64) {
            let u = propagator_at(&p, t);
            prop_assert!(u.unitarity_defect() < 1e-12);
            let norm = u.lambda_minus().norm_sqr() + u.eta().powi(2);
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn resonant_propagators_compose(omega in 0.0..10.0f64, wr in 1e-2..5.0f64, th in 0.0..(2.0 * PI),
                                        t1 in 0.0..10.0f64, t2 in 0.0..10.0f64) {
            let p = ModelParams::resonant(omega, wr, th).unwrap();
            let lhs = propagator_at(&p, t1 + t2).full();
            let rhs = (propagator_at(&p, t1) * propagator_at(&p, t2)).full();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((lhs[i][j] - rhs[i][j]).norm() < 1e-10);
                }
            }
        }

        #[test]
        fn moment_map_conserves_excitations_and_ignores_theta(
            p in params_strategy(), t in 0.0..20.0f64, delta in 0.0..(2.0 * PI),
            r in 0.0..0.5f64, m_re in -0.7..0.7f64, m_im in -0.7..0.7f64,
        ) {
            let a0 = squeezed_moments_at(r, C::new(m_re, m_im), 40);
            let vac = NormalMoments::vacuum();
            let (a, b) = heisenberg_moment_map(&propagator_at(&p, t), &a0, &vac).unwrap();
            let total = a.moment_set().number_mean + b.moment_set().number_mean;
            prop_assert!((total - a0.moment_set().number_mean).abs() < 1e-10);

            let shifted = ModelParams { theta: p.theta + delta, ..p };
            let (a2, b2) = heisenberg_moment_map(&propagator_at(&shifted, t), &a0, &vac).unwrap();
            for (x, y) in [(a, a2), (b, b2)] {
                let (x, y) = (x.moment_set(), y.moment_set());
                prop_assert!((x.number_mean - y.number_mean).abs() < 1e-10);
                prop_assert!((x.number_variance() - y.number_variance()).abs() < 1e-10);
            }
        }
    }
}
