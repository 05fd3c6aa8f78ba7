//! Squeezing transfer between an optical mode and an outcoupled atomic mode
//! under linear (Bogoliubov) coupling.
//!
//! Three independent routes produce the same observables:
//! closed-form expressions ([`observables::closed_form`]), exact Heisenberg
//! propagation of initial moments ([`propagator`]), and brute-force state
//! evolution in a truncated Fock space ([`oracle`]). Everything is generic
//! over the real scalar; the aliases below fix it to `f64`.

pub mod error;
pub mod fock;
pub mod observables;
pub mod oracle;
pub mod propagator;
pub mod scalar;
pub mod scenario;
pub mod tridiag;

pub use error::{Error, Result};
pub use fock::Mode;
pub use observables::report::Verdict;
pub use observables::Source;
pub use scalar::Real;

pub type Complex = num_complex::Complex<f64>;
pub type Truncation = fock::Truncation<f64>;
pub type SqueezedInput = fock::SqueezedInput<f64>;
pub type ModeVector = fock::ModeVector<f64>;
pub type TwoModeState = fock::TwoModeState<f64>;
pub type MomentSet = fock::MomentSet<f64>;
pub type NormalMoments = fock::NormalMoments<f64>;
pub type ModelParams = propagator::ModelParams<f64>;
pub type PropagatorMatrix = propagator::PropagatorMatrix<f64>;
pub type ScenarioConfig = observables::ScenarioConfig<f64>;
pub type ObservableRecord = observables::ObservableRecord<f64>;
pub type AlphaPair = observables::AlphaPair<f64>;
pub type DiscrepancyReport = observables::report::DiscrepancyReport<f64>;
pub type HamiltonianMatrix = oracle::HamiltonianMatrix<f64>;
pub type EvolutionResult = oracle::EvolutionResult<f64>;
pub type ConvergenceTable = oracle::ConvergenceTable<f64>;
