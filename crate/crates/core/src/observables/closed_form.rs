//! Resonant closed-form predictions, transcribed exactly as published so
//! they can be checked against the exact routes. Several of these are known
//! to be wrong; [`super::report`] holds the corrected versions.
//!
//! Every function requires `ω₀ = ω_a`. `ω` below is the common frequency,
//! `C = cos²(ω_R t)`, `S = sin²(ω_R t)`, and
//! `P = m*² e^{−2iφ} + m² e^{2iφ}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::SqueezedInput;
use crate::propagator::ModelParams;
use crate::scalar::{cis, Real};

use super::AlphaPair;

/// Tolerance for "φ = 0", "m real" and "m = 0" domain checks.
pub const DOMAIN_TOL: f64 = 1e-12;

pub(crate) struct Terms<T> {
    pub s: T,
    pub c: T,
    pub a: AlphaPair<T>,
    pub m2: T,
    pub p: T,
    pub cos2: T,
    pub sin2: T,
}

pub(crate) fn terms<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<Terms<T>> {
    params.require_resonance()?;
    let (sin, cos) = (params.omega_r * t).sin_cos();
    let phase = cis(input.phi + input.phi);
    Ok(Terms {
        s: input.r.sinh(),
        c: input.r.cosh(),
        a: AlphaPair::new(input.r),
        m2: input.m.norm_sqr(),
        p: (input.m * input.m * phase).re * T::lit(2.0),
        cos2: cos * cos,
        sin2: sin * sin,
    })
}

pub fn is_zero_phase<T: Real>(input: &SqueezedInput<T>) -> bool {
    input.phi.abs() <= T::lit(DOMAIN_TOL)
}

pub fn is_real_amplitude<T: Real>(input: &SqueezedInput<T>) -> bool {
    input.m.im.abs() <= T::lit(DOMAIN_TOL)
}

pub fn is_squeezed_vacuum<T: Real>(input: &SqueezedInput<T>) -> bool {
    input.m.norm() <= T::lit(DOMAIN_TOL)
}

pub(crate) fn require(cond: bool, what: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::OutsideFormulaDomain(what))
    }
}

/// `⟨N_a⟩ = (|m|²α₁ + Pα₂ + sinh²r)·C`.
pub fn optical_mean<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<T> {
    let k = terms(params, input, t)?;
    Ok((k.m2 * k.a.alpha1 + k.p * k.a.alpha2 + k.s * k.s) * k.cos2)
}

/// `(⟨ΔN_a²⟩, ⟨ΔN_b²⟩)` for arbitrary `m`, `φ`:
/// `X·C² + Y·SC` and `X·S² + Y·SC` with
/// `X = |m|²α₁² + 2α₂²(2|m|²+1) + 2α₁α₂P`, `Y = α₁|m|² + sinh²r + Pα₂`.
pub fn number_variances<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    let k = terms(params, input, t)?;
    let two = T::lit(2.0);
    let (a1, a2) = (k.a.alpha1, k.a.alpha2);
    let x = k.m2 * a1 * a1 + two * a2 * a2 * (two * k.m2 + T::one()) + two * a1 * a2 * k.p;
    let y = a1 * k.m2 + k.s * k.s + k.p * a2;
    let mixed = y * k.sin2 * k.cos2;
    Ok((x * k.cos2 * k.cos2 + mixed, x * k.sin2 * k.sin2 + mixed))
}

/// Variances specialized to `φ = 0`, real `m`:
/// `X = m²(α₁+2α₂)² + 2α₂²`, `Y = sinh²r + (α₁+2α₂)m²`.
pub fn number_variances_real_amplitude<T: Real>(
    params: &ModelParams<T>,
    input: &SqueezedInput<T>,
    t: T,
) -> Result<(T, T)> {
    require(is_zero_phase(input) && is_real_amplitude(input), "phi = 0 and real m")?;
    let k = terms(params, input, t)?;
    let two = T::lit(2.0);
    let e = k.a.alpha1 + two * k.a.alpha2;
    let m2 = input.m.re * input.m.re;
    let x = m2 * e * e + two * k.a.alpha2 * k.a.alpha2;
    let y = k.s * k.s + e * m2;
    let mixed = y * k.sin2 * k.cos2;
    Ok((x * k.cos2 * k.cos2 + mixed, x * k.sin2 * k.sin2 + mixed))
}

/// Squeezed vacuum: `(⟨N_a⟩, ⟨N_a²⟩) = (sinh²r·C, (2α₂ + sinh⁴r)·C²)`.
pub fn vacuum_optical_moments<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    require(is_squeezed_vacuum(input), "m = 0")?;
    let k = terms(params, input, t)?;
    let s2 = k.s * k.s;
    Ok((s2 * k.cos2, (T::lit(2.0) * k.a.alpha2 + s2 * s2) * k.cos2 * k.cos2))
}

/// Squeezed vacuum: `(√2 sinh r·C², √2 sinh r cosh r·S²)`.
pub fn vacuum_variances<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    require(is_squeezed_vacuum(input), "m = 0")?;
    let k = terms(params, input, t)?;
    let root2 = T::SQRT_2();
    Ok((root2 * k.s * k.cos2 * k.cos2, root2 * k.s * k.c * k.sin2 * k.sin2))
}

/// At `cos(ω_R t) = 0`, `φ = 0`, real `m`: `(0, m²(α₁+2α₂)² + 2α₂²)`.
pub fn conversion_variances<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>) -> Result<(T, T)> {
    require(is_zero_phase(input) && is_real_amplitude(input), "phi = 0 and real m")?;
    let k = terms(params, input, T::zero())?;
    let two = T::lit(2.0);
    let e = k.a.alpha1 + two * k.a.alpha2;
    let m2 = input.m.re * input.m.re;
    Ok((T::zero(), m2 * e * e + two * k.a.alpha2 * k.a.alpha2))
}

/// `(Q_a, Q_b) = [(m²(α₁+2α₂)² + 2α₂)/(m²(α₁+2α₂) + sinh²r) − 1]·(C, S)`,
/// for `φ = 0`, real `m`.
pub fn mandel_q_real_amplitude<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    require(is_zero_phase(input) && is_real_amplitude(input), "phi = 0 and real m")?;
    let k = terms(params, input, t)?;
    let two = T::lit(2.0);
    let e = k.a.alpha1 + two * k.a.alpha2;
    let m2 = input.m.re * input.m.re;
    let denom = m2 * e + k.s * k.s;
    if denom == T::zero() {
        return Err(Error::UndefinedForVacuum);
    }
    let f = (m2 * e * e + two * k.a.alpha2) / denom - T::one();
    Ok((f * k.cos2, f * k.sin2))
}

/// `(Q_a, Q_b)`: `α₁·(C, S)` for a squeezed vacuum, otherwise
/// [`mandel_q_real_amplitude`].
pub fn mandel_q_pair<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    if is_squeezed_vacuum(input) && is_zero_phase(input) {
        if input.r == T::zero() {
            return Err(Error::UndefinedForVacuum);
        }
        let k = terms(params, input, t)?;
        return Ok((k.a.alpha1 * k.cos2, k.a.alpha1 * k.sin2));
    }
    mandel_q_real_amplitude(params, input, t)
}

/// Squeezed vacuum at `φ = 0`:
/// `(⟨b²⟩, ⟨b†b⟩) = (−sinh r cosh r e^{−2iωt}·S, sinh²r cosh²r·S)`.
pub fn atomic_pair_moments<T: Real>(
    params: &ModelParams<T>,
    input: &SqueezedInput<T>,
    t: T,
) -> Result<(Complex<T>, T)> {
    require(is_squeezed_vacuum(input) && is_zero_phase(input), "m = 0 and phi = 0")?;
    let k = terms(params, input, t)?;
    let w = params.omega0 * t;
    let pair = -cis(-(w + w)) * (k.s * k.c * k.sin2);
    Ok((pair, k.s * k.s * k.c * k.c * k.sin2))
}

/// Squeezed vacuum at `φ = 0`:
/// `S_1b, S_2b = 2 sinh r {sinh r ∓ cosh r cos[2(ωt+θ)]}·S`.
pub fn atomic_squeeze_coeffs<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    require(is_squeezed_vacuum(input) && is_zero_phase(input), "m = 0 and phi = 0")?;
    let k = terms(params, input, t)?;
    let two = T::lit(2.0);
    let swing = k.c * (two * (params.omega0 * t + params.theta)).cos();
    Ok((two * k.s * (k.s - swing) * k.sin2, two * k.s * (k.s + swing) * k.sin2))
}

/// Values claimed where `ωt + θ = nπ`: `(−2 sinh r e^{−r}·S, 2 sinh r e^{−r}·S)`.
pub fn in_phase_squeeze_coeffs<T: Real>(params: &ModelParams<T>, input: &SqueezedInput<T>, t: T) -> Result<(T, T)> {
    require(is_squeezed_vacuum(input) && is_zero_phase(input), "m = 0 and phi = 0")?;
    let k = terms(params, input, t)?;
    let v = T::lit(2.0) * k.s * (-input.r).exp() * k.sin2;
    Ok((-v, v))
}

/// Values claimed where `ωt + θ = (n+½)π`: `(2 sinh r e^{−r}·S, −2 sinh r e^{−r}·S)`.
pub fn quadrature_phase_squeeze_coeffs<T: Real>(
    params: &ModelParams<T>,
    input: &SqueezedInput<T>,
    t: T,
) -> Result<(T, T)> {
    let (s1, s2) = in_phase_squeeze_coeffs(params, input, t)?;
    Ok((s2, s1))
}
