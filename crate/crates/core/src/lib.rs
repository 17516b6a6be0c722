//! Finite element / leapfrog simulator for the 1-D Timoshenko beam under
//! linear and nonlinear damping, with discrete energy observers and a
//! least-squares classifier for the decay law of an energy trace.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the command line front end uses.
//!
//! ```
//! use timoshenko::{classify_decay, run_simulation, DecayModel, EnergyKind, FitOptions, Preset, RunConfig64};
//!
//! let config: RunConfig64 = Preset::Fig6.config()?;
//! let (_state, trace) = run_simulation(&config)?;
//! let fit = classify_decay(&trace, EnergyKind::Physical, &FitOptions::default())?;
//! assert_eq!(fit.selected, DecayModel::Polynomial);
//! # Ok::<(), timoshenko::Error>(())
//! ```

pub mod config;
pub mod decay;
pub mod energy;
pub mod error;
pub mod fem;
pub mod model;
pub mod output;
pub mod scalar;
pub mod simulation;
pub mod stepper;
pub mod sweep;
pub mod tridiag;

pub use config::{parse_config, Preset, Settings};
pub use decay::{classify_decay, classify_series, fit_line, Classification, DecayFit, DecayModel, FitOptions, LineFit};
pub use energy::{energy_paper, energy_physical, identity_residual, EnergyKind, EnergySample, EnergyTrace};
pub use error::{Error, Result};
pub use fem::{assemble_coupling, assemble_mass, assemble_stiffness, lump_mass, quadrature_oracle, Assembly, FormKind, Mesh};
pub use output::FitReport;
pub use model::{g_odd, DampingLaw, DampingModel, MassPairing, Materials};
pub use scalar::Scalar;
pub use simulation::{run_simulation, run_simulation_with, RunConfig, COURANT_MAX};
pub use sweep::{run_sweep, SweepRow, SweepTable};
pub use stepper::{initial_conditions, BeamState, InitialPreset, Level, System};
pub use tridiag::{thomas_solve, Structure, ThomasFactor, TriDiag};

pub type Mesh64 = Mesh<f64>;
pub type TriDiag64 = TriDiag<f64>;
pub type Level64 = Level<f64>;
pub type BeamState64 = BeamState<f64>;
pub type System64 = System<f64>;
pub type RunConfig64 = RunConfig<f64>;
pub type EnergyTrace64 = EnergyTrace<f64>;
pub type DecayFit64 = DecayFit<f64>;

pub type Mesh32 = Mesh<f32>;
pub type TriDiag32 = TriDiag<f32>;
pub type System32 = System<f32>;
pub type RunConfig32 = RunConfig<f32>;
