//! Bound-state counting for central potentials.

pub mod bounds;
pub mod counter;
pub mod error;
pub mod harness;
mod integrate;
mod ode;
pub mod potential;
pub mod quadrature;
pub mod susy;

pub use bounds::{evaluate_potential, BoundsReport, Gated, LBound};
pub use counter::{
    census, count_states, ground_state_wavefunction, solve_levels, CounterConfig, EffectivePotential, GroundState,
    LevelCensus, StateCount,
};
pub use error::{Error, Result};
pub use harness::{parse_potential_spec, run_sweep, SweepConfig, SweepReport, SweepRow};
pub use potential::{Family, PotentialClassification, RadialPotential, Table};
pub use quadrature::{compute_functionals, Functionals, QuadratureConfig};
pub use susy::{build_pair, SusyPair};
