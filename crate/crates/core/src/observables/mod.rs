//! Derived observables, closed-form predictions and the discrepancy report.

pub mod closed_form;
pub mod report;

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{MomentSet, SqueezedInput, Truncation};
use crate::propagator::ModelParams;
use crate::scalar::Real;

/// One scenario: Hamiltonian, input state and the cutoff used by the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig<T> {
    pub params: ModelParams<T>,
    pub input: SqueezedInput<T>,
    pub truncation: Truncation<T>,
}

impl<T: Real> ScenarioConfig<T> {
    /// Picks the cutoff with [`Truncation::auto`] at the default tail budget.
    pub fn with_auto_truncation(params: ModelParams<T>, input: SqueezedInput<T>) -> Result<Self> {
        let truncation = Truncation::auto(&input, T::lit(crate::fock::DEFAULT_TAIL_THRESHOLD))?;
        Ok(Self { params, input, truncation })
    }
}

/// `α₁ = cosh 2r`, `α₂ = ½ sinh 2r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPair<T> {
    pub alpha1: T,
    pub alpha2: T,
}

impl<T: Real> AlphaPair<T> {
    pub fn new(r: T) -> Self {
        let two_r = r + r;
        Self { alpha1: two_r.cosh(), alpha2: two_r.sinh() / T::lit(2.0) }
    }
}

/// Where a record's numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    /// Resonant closed-form expressions, evaluated as printed.
    ClosedForm,
    /// Exact Heisenberg propagation of the initial normal-ordered moments.
    MomentMap,
    /// Brute-force evolution in the truncated Fock space.
    Oracle,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::ClosedForm, Source::MomentMap, Source::Oracle];

    pub fn label(self) -> &'static str {
        match self {
            Source::ClosedForm => "closed-form",
            Source::MomentMap => "moment-map",
            Source::Oracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "closed-form" | "literal" => Some(Source::ClosedForm),
            "moment-map" => Some(Source::MomentMap),
            "oracle" => Some(Source::Oracle),
            _ => None,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Observables of both modes at one time. `None` marks a quantity the
/// source cannot provide (closed forms outside their domain, `Q` of an
/// empty mode).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord<T> {
    pub t: T,
    pub source: Source,
    pub na_mean: Option<T>,
    pub na_var: Option<T>,
    pub nb_mean: Option<T>,
    pub nb_var: Option<T>,
    pub q_a: Option<T>,
    pub q_b: Option<T>,
    pub s1a: Option<T>,
    pub s2a: Option<T>,
    pub s1b: Option<T>,
    pub s2b: Option<T>,
    pub ntotal: Option<T>,
    pub n_max: Option<usize>,
    pub tail_mass: Option<T>,
}

impl<T: Real> ObservableRecord<T> {
    pub fn empty(t: T, source: Source) -> Self {
        Self {
            t,
            source,
            na_mean: None,
            na_var: None,
            nb_mean: None,
            nb_var: None,
            q_a: None,
            q_b: None,
            s1a: None,
            s2a: None,
            s1b: None,
            s2b: None,
            ntotal: None,
            n_max: None,
            tail_mass: None,
        }
    }

    pub fn from_moments(
        t: T,
        source: Source,
        a: &MomentSet<T>,
        b: &MomentSet<T>,
        n_max: Option<usize>,
        tail_mass: Option<T>,
    ) -> Self {
        let (s1a, s2a) = squeeze_coeffs(a);
        let (s1b, s2b) = squeeze_coeffs(b);
        Self {
            t,
            source,
            na_mean: Some(a.number_mean),
            na_var: Some(a.number_variance()),
            nb_mean: Some(b.number_mean),
            nb_var: Some(b.number_variance()),
            q_a: mandel_q(a).ok(),
            q_b: mandel_q(b).ok(),
            s1a: Some(s1a),
            s2a: Some(s2a),
            s1b: Some(s1b),
            s2b: Some(s2b),
            ntotal: Some(a.number_mean + b.number_mean),
            n_max,
            tail_mass,
        }
    }

    /// The physical fields, in CSV column order.
    pub fn fields(&self) -> [Option<T>; 11] {
        [
            self.na_mean,
            self.na_var,
            self.nb_mean,
            self.nb_var,
            self.q_a,
            self.q_b,
            self.s1a,
            self.s2a,
            self.s1b,
            self.s2b,
            self.ntotal,
        ]
    }
}

/// Occupation below which `Q` is reported as undefined.
pub const VACUUM_OCCUPATION: f64 = 1e-12;
/// `|Q|` inside this band classifies as Poissonian.
pub const POISSON_BAND: f64 = 1e-9;

/// Mandel `Q = ⟨ΔN²⟩/⟨N⟩ − 1`.
pub fn mandel_q<T: Real>(m: &MomentSet<T>) -> Result<T> {
    if m.number_mean <= T::lit(VACUUM_OCCUPATION) {
        return Err(Error::UndefinedForVacuum);
    }
    Ok(m.number_variance() / m.number_mean - T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhotonStatistics {
    SubPoissonian,
    Poissonian,
    SuperPoissonian,
}

pub fn classify_q<T: Real>(q: T) -> PhotonStatistics {
    if q.abs() <= T::lit(POISSON_BAND) {
        PhotonStatistics::Poissonian
    } else if q < T::zero() {
        PhotonStatistics::SubPoissonian
    } else {
        PhotonStatistics::SuperPoissonian
    }
}

/// Quadrature coefficients `(S₁, S₂)`:
/// `S₁ = 2⟨c†c⟩ + 2Re⟨c²⟩ − 4(Re⟨c⟩)²`, `S₂ = 2⟨c†c⟩ − 2Re⟨c²⟩ − 4(Im⟨c⟩)²`.
/// A value below zero means that quadrature is squeezed below vacuum.
pub fn squeeze_coeffs<T: Real>(m: &MomentSet<T>) -> (T, T) {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let n = m.number_mean;
    let sq = m.sq_amp.re;
    let Complex { re, im } = m.mean_amp;
    (two * n + two * sq - four * re * re, two * n - two * sq - four * im * im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, squeezed_coherent_state, ModeVector};

    type C = Complex<f64>;

    fn moments(mean_amp: C, sq_amp: C, n: f64, n2: f64) -> MomentSet<f64> {
        MomentSet { mean_amp, sq_amp, number_mean: n, number_sq: n2 }
    }

    #[test]
    fn alpha_pair_values() {
        let a = AlphaPair::new(1.0f64);
        assert!((a.alpha1 - 3.7621956910836314).abs() < 1e-14);
        assert!((a.alpha2 - 1.8134302039235093).abs() < 1e-14);
        let z = AlphaPair::new(0.0);
        assert_eq!((z.alpha1, z.alpha2), (1.0, 0.0));
    }

    #[test]
    fn mandel_q_examples() {
        let q = mandel_q(&moments(C::new(0.0, 0.0), C::new(0.0, 0.0), 2.0, 2.0 + 4.0)).unwrap();
        assert!(q.abs() < 1e-15);
        let sv = mandel_q(&moments(C::new(0.0, 0.0), C::new(0.0, 0.0), 1.3810978455418155, 1.3810978455418155f64.powi(2) + 6.57705820900412)).unwrap();
        assert!((sv - (6.57705820900412 / 1.3810978455418155 - 1.0)).abs() < 1e-12);
        assert!((sv - 3.7621956910836314).abs() < 1e-12);
        assert_eq!(mandel_q(&moments(C::new(0.0, 0.0), C::new(0.0, 0.0), 0.0, 0.0)), Err(Error::UndefinedForVacuum));
        let fock1 = ModeVector::number_state(1, Truncation::<f64>::new(4).unwrap()).unwrap();
        assert!((mandel_q(&fock1.moments()).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_q(-1.0), PhotonStatistics::SubPoissonian);
        assert_eq!(classify_q(1e-12), PhotonStatistics::Poissonian);
        assert_eq!(classify_q(0.3), PhotonStatistics::SuperPoissonian);
    }

    #[test]
    fn squeeze_coefficients_reference_states() {
        let vac = squeeze_coeffs(&moments(C::new(0.0, 0.0), C::new(0.0, 0.0), 0.0, 0.0));
        assert_eq!(vac, (0.0, 0.0));

        let t = Truncation::new(60).unwrap();
        let coh = coherent_state(C::new(1.2, -0.7), t).unwrap().moments();
        let (s1, s2) = squeeze_coeffs(&coh);
        assert!(s1.abs() < 1e-12 && s2.abs() < 1e-12);

        let t = Truncation::new(128).unwrap();
        let sv = squeezed_coherent_state(SqueezedInput::squeezed_vacuum(1.0, 0.0), t).unwrap().moments();
        let (s1, s2) = squeeze_coeffs(&sv);
        // 2 sinh r e^{±r}
        assert!((s1 - 2.0 * 1f64.sinh() * 1f64.exp()).abs() < 1e-10);
        assert!((s2 + 0.8646647167633873).abs() < 1e-10);
    }

    #[test]
    fn record_from_moments_and_fields() {
        let a = moments(C::new(0.0, 0.0), C::new(0.0, 0.0), 0.0, 0.0);
        let b = moments(C::new(1.0, 0.0), C::new(1.0, 0.0), 1.0, 2.0);
        let rec = ObservableRecord::from_moments(0.5, Source::Oracle, &a, &b, Some(10), Some(0.0));
        assert_eq!(rec.q_a, None);
        assert_eq!(rec.q_b, Some(0.0));
        assert_eq!(rec.ntotal, Some(1.0));
        assert_eq!(rec.fields().len(), 11);
        assert!(ObservableRecord::<f64>::empty(0.0, Source::ClosedForm).fields().iter().all(Option::is_none));
    }

    #[test]
    fn source_labels_round_trip() {
        for s in Source::ALL {
            assert_eq!(Source::parse(s.label()), Some(s));
        }
        assert_eq!(Source::parse("bogus"), None);
    }
}
