//! The monoid `M = ⟨A_ε ∪ B_ε ∪ C_ε⟩` with exact deciders, the lifting that
//! makes it a non-atomic-ring counterexample, and the checks it rests on.

mod claims;
mod deciders;
mod lift;
mod mcd;
mod params;

pub use claims::{atoms_report, claim1_check, claim2_check, random_small_element};
pub use deciders::{
    a_form, a_monoid, locate_generator, main_monoid, membership_a, membership_m, AForm, MainGen,
    MainOracle, Verdict,
};
pub use lift::{
    build_main_lift, s_generator, strongly_atomic_lifting_function, tau, Family, LiftRow, MainLift,
};
pub use mcd::{
    common_divisor_of_bc_subset, improve_common_divisor, improvement_chain, CommonDivisor,
    DivisibilityWitness,
};
pub use params::{build_default_params, CounterexampleParams, ParamsOverrides};
