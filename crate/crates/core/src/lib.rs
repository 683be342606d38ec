//! Vocal-tract area functions driven by a three-phase mixing function, their
//! transmission-line acoustics, and the Monte Carlo experiments built on them.
//!
//! Numerical modules are generic over [`Scalar`] (`f32` or `f64`); the crate
//! root re-exports `f64` aliases. Experiments and datasets are `f64` only.

pub mod acoustics;
pub mod analysis;
pub mod area;
pub mod error;
pub mod experiments;
pub mod generic_model;
pub mod hull;
pub mod mixing;
pub mod model;
pub mod scalar;
pub mod tube_models;

pub use acoustics::{
    find_formants, find_formants_with, formants_of, neutral_reference, transfer_spectrum, LossModel, Refinement,
};
pub use analysis::{
    dct_coefficients, functional_check, relative_deviations, se_estimate, Estimate, FunctionalReport,
};
pub use error::{Result, TractError};
pub use experiments::{run_condition, run_condition_serial, Condition, Dataset, ExperimentConfig, SimulationRecord};
pub use mixing::{components_from_coordination, eval_coordination, mix_threephase, to_coordination};
pub use model::ModelKind;
pub use scalar::Scalar;

pub type AcousticConstants = acoustics::AcousticConstants<f64>;
pub type ComponentTriple = mixing::ComponentTriple<f64>;
pub type CoordinationTriple = mixing::CoordinationTriple<f64>;
pub type ConvexHull = hull::ConvexHull<f64>;
pub type CyclePoint = mixing::CyclePoint<f64>;
pub type DctPair = analysis::DctPair<f64>;
pub type DeviationPair = analysis::DeviationPair<f64>;
pub type DrmConfig = tube_models::DrmConfig<f64>;
pub type DrmParams = tube_models::DrmParams<f64>;
pub type FantGeometry = tube_models::FantGeometry<f64>;
pub type FantParams = tube_models::FantParams<f64>;
pub type FormantSet = acoustics::FormantSet<f64>;
pub type FourierPair = generic_model::FourierPair<f64>;
pub type FrequencyGrid = acoustics::FrequencyGrid<f64>;
pub type GenericConfig = generic_model::GenericConfig<f64>;
pub type ModelSetup = model::ModelSetup<f64>;
pub type SampledAreaFunction = area::SampledAreaFunction<f64>;
pub type TransferSpectrum = acoustics::TransferSpectrum<f64>;

/// `f32` aliases of the numerical types.
pub mod single {
    pub type AcousticConstants = crate::acoustics::AcousticConstants<f32>;
    pub type CoordinationTriple = crate::mixing::CoordinationTriple<f32>;
    pub type CyclePoint = crate::mixing::CyclePoint<f32>;
    pub type FormantSet = crate::acoustics::FormantSet<f32>;
    pub type FrequencyGrid = crate::acoustics::FrequencyGrid<f32>;
    pub type ModelSetup = crate::model::ModelSetup<f32>;
    pub type SampledAreaFunction = crate::area::SampledAreaFunction<f32>;
}
