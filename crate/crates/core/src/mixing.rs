//! Three-phase mixing of seed configurations and its coordination form.
//!
//! A seed is three parameter vectors `{i, j, k}` placed at the cycle angles
//! π/3, π and 5π/3. The mixing function blends them along the cycle
//!
//! ```text
//! P(θ) = Ω + 2/3 (i cos(θ − π/3) + j cos(θ − π) + k cos(θ − 5π/3)),   Ω = (i + j + k)/3
//! ```
//!
//! and the same curve, written per parameter as an offset, an amplitude and
//! a phase, is the coordination function
//!
//! ```text
//! P(ρ, θ) = Ω + ρ Ψ1 cos(Ψ2 − θ)
//! ```
//!
//! All operations are elementwise; vectors of different dimension are never
//! broadcast against each other.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Result};
use crate::scalar::{normalize_angle, Scalar};

/// Cycle angles of the three seed components.
pub fn seed_angles<T: Scalar>() -> [T; 3] {
    let pi = T::PI();
    [pi / T::lit(3.0), pi, pi * T::lit(5.0) / T::lit(3.0)]
}

fn check_vectors<T: Scalar>(what: &str, vs: [&[T]; 3]) -> Result<()> {
    let dim = vs[0].len();
    if dim == 0 {
        return Err(invalid_input(format!("{what}: vectors must have dimension >= 1")));
    }
    if vs.iter().any(|v| v.len() != dim) {
        return Err(invalid_input(format!(
            "{what}: dimension mismatch ({}, {}, {})",
            vs[0].len(),
            vs[1].len(),
            vs[2].len()
        )));
    }
    if vs.iter().flat_map(|v| v.iter()).any(|x| !x.is_finite()) {
        return Err(invalid_input(format!("{what}: non-finite entry")));
    }
    Ok(())
}

/// The three seed vectors `{i, j, k}` of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentTriple<T> {
    i: Vec<T>,
    j: Vec<T>,
    k: Vec<T>,
}

impl<T: Scalar> ComponentTriple<T> {
    pub fn new(i: Vec<T>, j: Vec<T>, k: Vec<T>) -> Result<Self> {
        check_vectors("component triple", [&i, &j, &k])?;
        Ok(Self { i, j, k })
    }

    pub fn dim(&self) -> usize {
        self.i.len()
    }

    pub fn i(&self) -> &[T] {
        &self.i
    }

    pub fn j(&self) -> &[T] {
        &self.j
    }

    pub fn k(&self) -> &[T] {
        &self.k
    }

    /// Mean of the three components (the cycle centre).
    pub fn omega(&self) -> Vec<T> {
        let third = T::one() / T::lit(3.0);
        self.zip3()
            .map(|(i, j, k)| (i + j + k) * third)
            .collect()
    }

    fn zip3(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.i
            .iter()
            .zip(&self.j)
            .zip(&self.k)
            .map(|((&i, &j), &k)| (i, j, k))
    }
}

/// The dual vectors `{Ω, Ψ1, Ψ2}`: offset, amplitude and phase (radians).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinationTriple<T> {
    omega: Vec<T>,
    psi1: Vec<T>,
    psi2: Vec<T>,
}

impl<T: Scalar> CoordinationTriple<T> {
    pub fn new(omega: Vec<T>, psi1: Vec<T>, psi2: Vec<T>) -> Result<Self> {
        check_vectors("coordination triple", [&omega, &psi1, &psi2])?;
        Ok(Self { omega, psi1, psi2 })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[T] {
        &self.omega
    }

    pub fn psi1(&self) -> &[T] {
        &self.psi1
    }

    pub fn psi2(&self) -> &[T] {
        &self.psi2
    }

    /// Per-parameter ranges `[Ω − |Ψ1|, Ω + |Ψ1|]` swept by the cycle.
    pub fn ranges(&self) -> Vec<(T, T)> {
        self.omega
            .iter()
            .zip(&self.psi1)
            .map(|(&o, &a)| (o - a.abs(), o + a.abs()))
            .collect()
    }
}

/// A point of the cycle domain: radius `rho ∈ [0, 1]`, angle `theta ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclePoint<T> {
    rho: T,
    theta: T,
}

impl<T: Scalar> CyclePoint<T> {
    /// Validates `rho` and reduces `theta` modulo 2π.
    pub fn new(rho: T, theta: T) -> Result<Self> {
        if !rho.is_finite() || rho < T::zero() || rho > T::one() {
            return Err(invalid_input(format!("rho must lie in [0, 1], got {rho}")));
        }
        if !theta.is_finite() {
            return Err(invalid_input("theta must be finite"));
        }
        Ok(Self {
            rho,
            theta: normalize_angle(theta),
        })
    }

    /// Point on the outer ring (`rho = 1`).
    pub fn on_ring(theta: T) -> Result<Self> {
        Self::new(T::one(), theta)
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn theta(&self) -> T {
        self.theta
    }
}

/// Evaluates the three-phase mixing function at `theta`.
pub fn mix_threephase<T: Scalar>(seed: &ComponentTriple<T>, theta: T) -> Vec<T> {
    let theta = normalize_angle(theta);
    let [ti, tj, tk] = seed_angles::<T>();
    let (ci, cj, ck) = ((theta - ti).cos(), (theta - tj).cos(), (theta - tk).cos());
    let two_thirds = T::lit(2.0) / T::lit(3.0);
    let third = T::one() / T::lit(3.0);
    seed.zip3()
        .map(|(i, j, k)| (i + j + k) * third + two_thirds * (i * ci + j * cj + k * ck))
        .collect()
}

/// Converts a seed into its coordination triple.
///
/// The phase is reported in `(−π/2, π/2]` with a possibly negative amplitude,
/// which matches the single-argument arctangent convention wherever that one
/// is defined. The quadrature components are solved with `atan2`/`hypot`, so
/// `(i + k)/2 = j` needs no special case. A zero-amplitude parameter gets
/// `Ψ1 = Ψ2 = 0`.
pub fn to_coordination<T: Scalar>(seed: &ComponentTriple<T>) -> CoordinationTriple<T> {
    let two_thirds = T::lit(2.0) / T::lit(3.0);
    let half = T::lit(0.5);
    let sin_third = (T::PI() / T::lit(3.0)).sin();
    let half_pi = T::FRAC_PI_2();

    let omega = seed.omega();
    let mut psi1 = Vec::with_capacity(seed.dim());
    let mut psi2 = Vec::with_capacity(seed.dim());
    for (i, j, k) in seed.zip3() {
        let cos_part = two_thirds * ((i + k) * half - j);
        let sin_part = two_thirds * (i - k) * sin_third;
        let amp = cos_part.hypot(sin_part);
        if amp == T::zero() {
            psi1.push(T::zero());
            psi2.push(T::zero());
            continue;
        }
        let phase = sin_part.atan2(cos_part);
        let (a, p) = if phase > half_pi {
            (-amp, phase - T::PI())
        } else if phase <= -half_pi {
            (-amp, phase + T::PI())
        } else {
            (amp, phase)
        };
        psi1.push(a);
        psi2.push(p);
    }
    CoordinationTriple { omega, psi1, psi2 }
}

/// Evaluates the coordination function at a cycle point.
pub fn eval_coordination<T: Scalar>(coord: &CoordinationTriple<T>, point: CyclePoint<T>) -> Vec<T> {
    let (rho, theta) = (point.rho(), point.theta());
    coord
        .omega
        .iter()
        .zip(&coord.psi1)
        .zip(&coord.psi2)
        .map(|((&o, &a), &p)| o + rho * a * (p - theta).cos())
        .collect()
}

/// Recovers `{i, j, k}` by evaluating the ring at the three seed angles.
pub fn components_from_coordination<T: Scalar>(coord: &CoordinationTriple<T>) -> ComponentTriple<T> {
    let [ti, tj, tk] = seed_angles::<T>();
    let at = |theta| eval_coordination(coord, CyclePoint { rho: T::one(), theta });
    ComponentTriple {
        i: at(ti),
        j: at(tj),
        k: at(tk),
    }
}
