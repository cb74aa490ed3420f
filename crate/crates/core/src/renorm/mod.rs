//! Renormalized couplings, effective models and observables.
//!
//! * [`renormalized_coupling`] builds `G̃^{(p)}` from transmon Fourier
//!   components.
//! * [`effective_hamiltonian`] assembles the joint model in the transmon
//!   Floquet frame with a chosen subset of `G̃`.
//! * [`observables`] turns dressed energies into Lamb shifts, pull,
//!   cross-nonlinearity and anharmonicity.
//! * [`amplitude_sweep`] and [`stark_ratios`] drive the Floquet solver
//!   for one Hamiltonian variant.

mod coupling;
mod effective;
mod observables;
mod stark;
mod sweep;

pub use coupling::{renormalized_coupling, transmon_frame, CouplingSummary, RenormalizedCoupling};
pub use effective::{effective_branches, effective_hamiltonian, CouplingSelection, COUPLING_RAMP};
pub use observables::{
    chi_scaling, joint_labels, observables, transmon_labels, DressedLevels, LambShifts,
    ObservableSet, OBSERVED_LEVELS, ZETA_SINGULAR,
};
pub use stark::{
    fit_stark_ratios, quadratic_fit, slope_through_origin, stark_grid, stark_ratios, StarkOptions,
    StarkRatios,
};
pub use sweep::{amplitude_sweep, AmplitudeSweep, BranchHealth, SweepOptions, SweepPoint};
