//! The generic vocal-tract model.
//!
//! The unrectified profile is `1 + a1 cos(πx/L) + a2 cos(3πx/L)` with
//! `a1 = 2ρ cos θ` and `a2 = ρ α sin θ`, `α = (4/3) sin(π/3)`. The soft
//! rectifier maps it to strictly positive areas, and the result is sampled at
//! tubelet midpoints `x_i = (i − 1/2) L/n`.

use serde::{Deserialize, Serialize};

use crate::area::SampledAreaFunction;
use crate::error::{invalid_config, Result};
use crate::mixing::{ComponentTriple, CoordinationTriple, CyclePoint};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct GenericConfig<T> {
    pub length_cm: T,
    pub n_tubelets: usize,
}

impl<T: Scalar> Default for GenericConfig<T> {
    fn default() -> Self {
        Self {
            length_cm: T::lit(17.5),
            n_tubelets: 120,
        }
    }
}

impl<T: Scalar> GenericConfig<T> {
    pub const MIN_TUBELETS: usize = 100;

    pub fn validate(&self) -> Result<()> {
        if !(self.length_cm.is_finite() && self.length_cm > T::zero()) {
            return Err(invalid_config(format!(
                "generic length must be positive, got {}",
                self.length_cm
            )));
        }
        if self.n_tubelets < Self::MIN_TUBELETS {
            return Err(invalid_config(format!(
                "generic model needs at least {} tubelets, got {}",
                Self::MIN_TUBELETS,
                self.n_tubelets
            )));
        }
        Ok(())
    }

    pub fn tubelet_length_cm(&self) -> T {
        self.length_cm / T::from_usize_exact(self.n_tubelets)
    }

    /// Midpoint sample positions in cm.
    pub fn sample_positions_cm(&self) -> Vec<T> {
        let d = self.tubelet_length_cm();
        let half = T::lit(0.5);
        (0..self.n_tubelets)
            .map(|i| (T::from_usize_exact(i) + half) * d)
            .collect()
    }
}

/// Amplitudes of `cos(πx/L)` and `cos(3πx/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierPair<T> {
    pub a1: T,
    pub a2: T,
}

/// `α = (4/3) sin(π/3)`, the largest `|a2|` on the ring.
pub fn alpha<T: Scalar>() -> T {
    T::lit(4.0) / T::lit(3.0) * (T::PI() / T::lit(3.0)).sin()
}

pub fn fourier_amplitudes<T: Scalar>(point: CyclePoint<T>) -> FourierPair<T> {
    let (rho, theta) = (point.rho(), point.theta());
    FourierPair {
        a1: T::lit(2.0) * rho * theta.cos(),
        a2: rho * alpha::<T>() * theta.sin(),
    }
}

/// Soft rectifier: `exp(y − 1)` below 1, identity above. C¹ at `y = 1`.
pub fn soft_rectify<T: Scalar>(y: T) -> T {
    if y < T::one() {
        (y - T::one()).exp()
    } else {
        y
    }
}

/// Unrectified profile at distance `x_cm` from the glottis.
pub fn profile_at<T: Scalar>(pair: FourierPair<T>, x_cm: T, length_cm: T) -> T {
    let phase = T::PI() * x_cm / length_cm;
    T::one() + pair.a1 * phase.cos() + pair.a2 * (T::lit(3.0) * phase).cos()
}

/// Rectified area (cm²) of the continuous model at `x_cm`.
pub fn area_at<T: Scalar>(point: CyclePoint<T>, x_cm: T, length_cm: T) -> T {
    soft_rectify(profile_at(fourier_amplitudes(point), x_cm, length_cm))
}

/// Unrectified profile at the midpoint samples.
pub fn unrectified_profile<T: Scalar>(pair: FourierPair<T>, cfg: &GenericConfig<T>) -> Vec<T> {
    cfg.sample_positions_cm()
        .into_iter()
        .map(|x| profile_at(pair, x, cfg.length_cm))
        .collect()
}

/// Sampled, rectified area function for explicit amplitudes.
pub fn area_function_from_amplitudes<T: Scalar>(
    pair: FourierPair<T>,
    cfg: &GenericConfig<T>,
) -> Result<SampledAreaFunction<T>> {
    cfg.validate()?;
    let areas = unrectified_profile(pair, cfg)
        .into_iter()
        .map(soft_rectify)
        .collect();
    SampledAreaFunction::new(cfg.tubelet_length_cm(), areas)
}

pub fn generic_area_function<T: Scalar>(
    point: CyclePoint<T>,
    cfg: &GenericConfig<T>,
) -> Result<SampledAreaFunction<T>> {
    area_function_from_amplitudes(fourier_amplitudes(point), cfg)
}

/// The seed `{1 + v1 + v2, 1 − 2 v1, 1 + v1 − v2}` sampled at the midpoints.
pub fn generic_seed<T: Scalar>(cfg: &GenericConfig<T>) -> Result<ComponentTriple<T>> {
    cfg.validate()?;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let mut i = Vec::with_capacity(cfg.n_tubelets);
    let mut j = Vec::with_capacity(cfg.n_tubelets);
    let mut k = Vec::with_capacity(cfg.n_tubelets);
    for x in cfg.sample_positions_cm() {
        let phase = T::PI() * x / cfg.length_cm;
        let (v1, v2) = (phase.cos(), (three * phase).cos());
        i.push(T::one() + v1 + v2);
        j.push(T::one() - two * v1);
        k.push(T::one() + v1 - v2);
    }
    ComponentTriple::new(i, j, k)
}

/// Coordination triple of the model in amplitude space: parameters `(a1, a2)`
/// with `Ω = (0, 0)`, `Ψ1 = (2, α)`, `Ψ2 = (0, π/2)`.
pub fn amplitude_coordination<T: Scalar>() -> CoordinationTriple<T> {
    CoordinationTriple::new(
        vec![T::zero(), T::zero()],
        vec![T::lit(2.0), alpha()],
        vec![T::zero(), T::FRAC_PI_2()],
    )
    .expect("static coordination triple is valid")
}

/// One of the eight characteristic vowels of the cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VowelTarget<T> {
    /// IPA symbol.
    pub label: &'static str,
    /// ASCII name usable in file names.
    pub slug: &'static str,
    pub theta: T,
}

/// The eight vowels in cycle order, `θ = 0` first.
pub fn vowel_targets<T: Scalar>() -> Vec<VowelTarget<T>> {
    const TABLE: [(&str, &str, f64); 8] = [
        ("ɨ", "barred_i", 0.0),
        ("u", "u", 1.0 / 3.0),
        ("o", "o", 0.5),
        ("ɔ", "open_o", 2.0 / 3.0),
        ("a", "a", 1.0),
        ("ɛ", "open_e", 4.0 / 3.0),
        ("e", "e", 1.5),
        ("i", "i", 5.0 / 3.0),
    ];
    TABLE
        .iter()
        .map(|&(label, slug, frac)| VowelTarget {
            label,
            slug,
            theta: T::PI() * T::lit(frac),
        })
        .collect()
}

pub fn vowel_by_label<T: Scalar>(label: &str) -> Option<VowelTarget<T>> {
    vowel_targets()
        .into_iter()
        .find(|v| v.label == label || v.slug == label)
}
