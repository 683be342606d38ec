//! Uniform access to the three area-function models.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::acoustics::AcousticConstants;
use crate::area::SampledAreaFunction;
use crate::error::{invalid_input, Result, TractError};
use crate::generic_model::{self, amplitude_coordination, FourierPair, GenericConfig};
use crate::mixing::{eval_coordination, CoordinationTriple, CyclePoint};
use crate::scalar::Scalar;
use crate::tube_models::{
    drm_area_function, drm_coordination, drm_profile, fant_area_function, fant_coordination,
    fant_profile, DrmConfig, DrmParams, FantGeometry, FantParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Generic,
    Drm,
    Fant,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Generic, ModelKind::Drm, ModelKind::Fant];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Generic => "generic",
            ModelKind::Drm => "drm",
            ModelKind::Fant => "fant",
        }
    }

    /// Number of entries in the model's parameter vector.
    pub fn parameter_count(self) -> usize {
        match self {
            ModelKind::Generic => 2,
            ModelKind::Drm | ModelKind::Fant => 4,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = TractError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "generic" => Ok(ModelKind::Generic),
            "drm" => Ok(ModelKind::Drm),
            "fant" => Ok(ModelKind::Fant),
            other => Err(TractError::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }
}

/// Geometry of all three models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ModelSetup<T> {
    pub generic: GenericConfig<T>,
    pub drm: DrmConfig<T>,
    pub fant: FantGeometry<T>,
}

impl<T: Scalar> Default for ModelSetup<T> {
    fn default() -> Self {
        Self {
            generic: GenericConfig::default(),
            drm: DrmConfig::default(),
            fant: FantGeometry::default(),
        }
    }
}

impl<T: Scalar> ModelSetup<T> {
    pub fn validate(&self) -> Result<()> {
        self.generic.validate()?;
        self.drm.validate()?;
        self.fant.validate()
    }

    /// Coordination triple driving the model's parameter vector.
    pub fn coordination(&self, kind: ModelKind) -> CoordinationTriple<T> {
        match kind {
            ModelKind::Generic => amplitude_coordination(),
            ModelKind::Drm => drm_coordination(),
            ModelKind::Fant => fant_coordination(&self.fant),
        }
    }

    pub fn parameters_at(&self, kind: ModelKind, point: CyclePoint<T>) -> Vec<T> {
        eval_coordination(&self.coordination(kind), point)
    }

    /// Reconstructs the rectified area function from a parameter vector:
    /// `(a1, a2)` for the generic model, `P1..P4` for the DRM, `{Xc, Ac, Al, L}` for Fant.
    pub fn area_from_parameters(&self, kind: ModelKind, params: &[T]) -> Result<SampledAreaFunction<T>> {
        self.check_len(kind, params)?;
        match kind {
            ModelKind::Generic => generic_model::area_function_from_amplitudes(
                FourierPair {
                    a1: params[0],
                    a2: params[1],
                },
                &self.generic,
            ),
            ModelKind::Drm => drm_area_function(DrmParams::from_slice(params)?, &self.drm),
            ModelKind::Fant => fant_area_function(FantParams::from_slice(params)?, &self.fant),
        }
    }

    /// Tubelet profile before soft rectification.
    pub fn profile_from_parameters(&self, kind: ModelKind, params: &[T]) -> Result<Vec<T>> {
        self.check_len(kind, params)?;
        match kind {
            ModelKind::Generic => {
                self.generic.validate()?;
                Ok(generic_model::unrectified_profile(
                    FourierPair {
                        a1: params[0],
                        a2: params[1],
                    },
                    &self.generic,
                ))
            }
            ModelKind::Drm => drm_profile(DrmParams::from_slice(params)?, &self.drm),
            ModelKind::Fant => fant_profile(FantParams::from_slice(params)?, &self.fant),
        }
    }

    pub fn area_at(&self, kind: ModelKind, point: CyclePoint<T>) -> Result<SampledAreaFunction<T>> {
        self.area_from_parameters(kind, &self.parameters_at(kind, point))
    }

    /// Area function of the cycle centre `ρ = 0`.
    pub fn neutral_area(&self, kind: ModelKind) -> Result<SampledAreaFunction<T>> {
        self.area_at(kind, CyclePoint::new(T::zero(), T::zero())?)
    }

    /// Loss setting used for each model: lossless for the generic model and
    /// the DRM, lossy for the Fant model.
    pub fn default_constants(&self, kind: ModelKind) -> AcousticConstants<T> {
        match kind {
            ModelKind::Generic | ModelKind::Drm => AcousticConstants::lossless(),
            ModelKind::Fant => AcousticConstants::lossy(),
        }
    }

    fn check_len(&self, kind: ModelKind, params: &[T]) -> Result<()> {
        if params.len() != kind.parameter_count() {
            return Err(invalid_input(format!(
                "{kind} model takes {} parameters, got {}",
                kind.parameter_count(),
                params.len()
            )));
        }
        Ok(())
    }
}
