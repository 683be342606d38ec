//! Chain-matrix transfer functions of sampled area functions and formant extraction.
//!
//! The glottis end is closed (volume-velocity source) and the lip end is open.
//! The transfer ratio is `U_lips / U_glottis = 1 / (C·Z_load + D)` where
//! `[[A, B], [C, D]]` is the product of the tubelet matrices, glottis first.

use std::io::{self, Write};
use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::area::SampledAreaFunction;
use crate::error::{invalid_config, invalid_input, Result, TractError};
use crate::model::{ModelKind, ModelSetup};
use crate::scalar::Scalar;

/// Smallest denominator magnitude kept before inversion.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Highest frequency a grid may reach, in Hz.
pub const MAX_FREQUENCY_HZ: f64 = 6000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossModel {
    Lossless,
    SimpleLossy,
}

impl LossModel {
    pub fn name(self) -> &'static str {
        match self {
            LossModel::Lossless => "lossless",
            LossModel::SimpleLossy => "simple_lossy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct AcousticConstants<T> {
    /// cm/s.
    pub sound_speed_c: T,
    /// g/cm³.
    pub air_density: T,
    pub loss_model: LossModel,
    /// Attenuation factor of `simple_lossy`; ignored when lossless.
    pub loss_coefficient: T,
    /// Piston radiation load at the lips; only used by `simple_lossy`.
    pub radiation_load: bool,
}

impl<T: Scalar> Default for AcousticConstants<T> {
    fn default() -> Self {
        Self::lossless()
    }
}

impl<T: Scalar> AcousticConstants<T> {
    pub fn lossless() -> Self {
        Self {
            sound_speed_c: T::lit(35000.0),
            air_density: T::lit(1.14e-3),
            loss_model: LossModel::Lossless,
            loss_coefficient: T::lit(0.007),
            radiation_load: true,
        }
    }

    pub fn lossy() -> Self {
        Self {
            loss_model: LossModel::SimpleLossy,
            ..Self::lossless()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sound_speed_c.is_finite() && self.sound_speed_c > T::zero()) {
            return Err(invalid_config("sound_speed_c must be positive"));
        }
        if !(self.air_density.is_finite() && self.air_density > T::zero()) {
            return Err(invalid_config("air_density must be positive"));
        }
        if !(self.loss_coefficient.is_finite() && self.loss_coefficient >= T::zero()) {
            return Err(invalid_config("loss_coefficient must be non-negative"));
        }
        Ok(())
    }

    fn is_lossy(&self) -> bool {
        self.loss_model == LossModel::SimpleLossy
    }

    /// Complex wavenumber in a section of area `area_cm2`.
    fn wavenumber(&self, f_hz: T, area_cm2: T) -> Complex<T> {
        let k = T::TAU() * f_hz / self.sound_speed_c;
        if self.is_lossy() {
            let damping = self.loss_coefficient / area_cm2.sqrt() * (f_hz / T::lit(1000.0)).sqrt();
            Complex::new(k, -k * damping)
        } else {
            Complex::new(k, T::zero())
        }
    }

    fn characteristic_impedance(&self, area_cm2: T) -> T {
        self.air_density * self.sound_speed_c / area_cm2
    }

    /// Lip termination: zero when lossless or when the radiation load is off.
    fn load_impedance(&self, f_hz: T, lip_area_cm2: T) -> Complex<T> {
        if !(self.is_lossy() && self.radiation_load) {
            return Complex::new(T::zero(), T::zero());
        }
        let ka = T::TAU() * f_hz / self.sound_speed_c * (lip_area_cm2 / T::PI()).sqrt();
        let z = self.characteristic_impedance(lip_area_cm2);
        Complex::new(z * T::lit(0.25) * ka * ka, z * T::lit(0.613) * ka)
    }
}

/// Uniform frequency grid `start_hz + i·step_hz`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FrequencyGrid<T> {
    pub start_hz: T,
    pub step_hz: T,
    pub count: usize,
}

impl<T: Scalar> Default for FrequencyGrid<T> {
    /// 20 Hz to 4000 Hz in 10 Hz steps.
    fn default() -> Self {
        Self {
            start_hz: T::lit(20.0),
            step_hz: T::lit(10.0),
            count: 399,
        }
    }
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(start_hz: T, step_hz: T, count: usize) -> Result<Self> {
        let grid = Self {
            start_hz,
            step_hz,
            count,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid covering `[start_hz, stop_hz]` inclusive.
    pub fn spanning(start_hz: T, stop_hz: T, step_hz: T) -> Result<Self> {
        let steps = ((stop_hz - start_hz) / step_hz + T::lit(1e-9)).floor();
        let count = steps
            .to_usize()
            .ok_or_else(|| invalid_config("frequency span must be non-negative"))?
            + 1;
        Self::new(start_hz, step_hz, count)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start_hz.is_finite() && self.start_hz > T::zero()) {
            return Err(invalid_config("grid start must be positive"));
        }
        if !(self.step_hz.is_finite() && self.step_hz > T::zero()) {
            return Err(invalid_config("grid step must be positive"));
        }
        if self.count < 3 {
            return Err(invalid_config("grid needs at least 3 frequencies"));
        }
        if self.stop_hz().as_f64() > MAX_FREQUENCY_HZ + 1e-9 {
            return Err(invalid_config(format!(
                "grid reaches {} Hz, above the {MAX_FREQUENCY_HZ} Hz limit",
                self.stop_hz()
            )));
        }
        Ok(())
    }

    pub fn frequency(&self, index: usize) -> T {
        self.start_hz + self.step_hz * T::from_usize_exact(index)
    }

    pub fn stop_hz(&self) -> T {
        self.frequency(self.count.saturating_sub(1))
    }

    pub fn frequencies(&self) -> Vec<T> {
        (0..self.count).map(|i| self.frequency(i)).collect()
    }
}

/// Acoustic two-port `[[a, b], [c, d]]` relating (pressure, volume velocity)
/// at the input to the output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Scalar> TwoPort<T> {
    pub fn identity() -> Self {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// Uniform section of length `length_cm` with wavenumber `k` and
    /// characteristic impedance `z_c`.
    pub fn section(k: Complex<T>, length_cm: T, z_c: T) -> Self {
        let phase = k * length_cm;
        let (cos, sin) = (phase.cos(), phase.sin());
        let i = Complex::new(T::zero(), T::one());
        Self {
            a: cos,
            b: i * sin * z_c,
            c: i * sin / z_c,
            d: cos,
        }
    }

    /// `U_out / U_in` with the output loaded by `z_load`.
    pub fn volume_velocity_ratio(&self, z_load: Complex<T>) -> Complex<T> {
        let mut den = self.c * z_load + self.d;
        if den.norm().as_f64() < DENOMINATOR_FLOOR {
            den = Complex::new(T::lit(DENOMINATOR_FLOOR), T::zero());
        }
        den.inv()
    }
}

impl<T: Scalar> Mul for TwoPort<T> {
    type Output = Self;

    /// Cascade: `self` nearer the source.
    fn mul(self, rhs: Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// Chain matrix of the whole tube at one frequency.
pub fn chain_matrix<T: Scalar>(sections: &[(T, T)], f_hz: T, constants: &AcousticConstants<T>) -> TwoPort<T> {
    sections
        .iter()
        .fold(TwoPort::identity(), |acc, &(length, area)| {
            acc * TwoPort::section(
                constants.wavenumber(f_hz, area),
                length,
                constants.characteristic_impedance(area),
            )
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferSpectrum<T> {
    grid: FrequencyGrid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> TransferSpectrum<T> {
    pub fn new(grid: FrequencyGrid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.count {
            return Err(invalid_input(format!(
                "{} values for a grid of {} frequencies",
                values.len(),
                grid.count
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn frequencies(&self) -> Vec<T> {
        self.grid.frequencies()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn mag_db(&self) -> Vec<T> {
        self.values
            .iter()
            .map(|v| T::lit(20.0) * v.norm().log10())
            .collect()
    }

    /// CSV with header `f_hz,re,im,mag_db`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "f_hz,re,im,mag_db")?;
        for (i, (v, db)) in self.values.iter().zip(self.mag_db()).enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                self.grid.frequency(i).as_f64(),
                v.re.as_f64(),
                v.im.as_f64(),
                db.as_f64()
            )?;
        }
        Ok(())
    }
}

pub fn transfer_spectrum<T: Scalar>(
    area: &SampledAreaFunction<T>,
    grid: &FrequencyGrid<T>,
    constants: &AcousticConstants<T>,
) -> Result<TransferSpectrum<T>> {
    grid.validate()?;
    constants.validate()?;
    let sections = area.sections();
    let lip = area.lip_area();
    let values = (0..grid.count)
        .map(|i| {
            let f = grid.frequency(i);
            chain_matrix(&sections, f, constants)
                .volume_velocity_ratio(constants.load_impedance(f, lip))
        })
        .collect();
    TransferSpectrum::new(*grid, values)
}

/// Quantity interpolated by the three-point parabola around a grid maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// `−|H|⁻²`, exactly quadratic near an isolated pole.
    #[default]
    InversePower,
    LogMagnitude,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormantSet<T> {
    pub f1: T,
    pub f2: T,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f3: Option<T>,
}

impl<T: Scalar> FormantSet<T> {
    pub fn new(f1: T, f2: T) -> Result<Self> {
        if !(f1 > T::zero() && f2 > f1) {
            return Err(invalid_input(format!("formants must satisfy 0 < f1 < f2, got ({f1}, {f2})")));
        }
        Ok(Self { f1, f2, f3: None })
    }

    pub fn pair(&self) -> (T, T) {
        (self.f1, self.f2)
    }
}

/// The `count` lowest peaks of `|H|`, refined on `−|H|⁻²`.
pub fn find_formants<T: Scalar>(tf: &TransferSpectrum<T>, count: usize) -> Result<FormantSet<T>> {
    find_formants_with(tf, count, Refinement::default())
}

pub fn find_formants_with<T: Scalar>(
    tf: &TransferSpectrum<T>,
    count: usize,
    refinement: Refinement,
) -> Result<FormantSet<T>> {
    if !(2..=3).contains(&count) {
        return Err(invalid_input(format!("formant count must be 2 or 3, got {count}")));
    }
    let mags = tf.magnitudes();
    let y: Vec<T> = match refinement {
        Refinement::InversePower | Refinement::None => mags.iter().map(|&m| -(m * m).recip()).collect(),
        Refinement::LogMagnitude => mags.iter().map(|&m| m.ln()).collect(),
    };
    let grid = tf.grid();
    let mut peaks = Vec::with_capacity(count);
    for i in 1..mags.len() - 1 {
        if mags[i] > mags[i - 1] && mags[i] >= mags[i + 1] {
            let offset = match refinement {
                Refinement::None => T::zero(),
                _ => parabolic_offset(y[i - 1], y[i], y[i + 1]),
            };
            peaks.push(grid.frequency(i) + offset * grid.step_hz);
            if peaks.len() == count {
                break;
            }
        }
    }
    if peaks.len() < count {
        return Err(TractError::ExtractionFailure {
            found: peaks.len(),
            wanted: count,
        });
    }
    Ok(FormantSet {
        f1: peaks[0],
        f2: peaks[1],
        f3: peaks.get(2).copied(),
    })
}

/// Vertex offset, in steps, of the parabola through three equally spaced samples.
fn parabolic_offset<T: Scalar>(left: T, centre: T, right: T) -> T {
    let den = left - T::lit(2.0) * centre + right;
    if den == T::zero() || !den.is_finite() {
        return T::zero();
    }
    let offset = T::lit(0.5) * (left - right) / den;
    if offset.is_finite() {
        offset.max(-T::lit(0.5)).min(T::lit(0.5))
    } else {
        T::zero()
    }
}

/// First two formants of an area function.
pub fn formants_of<T: Scalar>(
    area: &SampledAreaFunction<T>,
    grid: &FrequencyGrid<T>,
    constants: &AcousticConstants<T>,
) -> Result<FormantSet<T>> {
    find_formants(&transfer_spectrum(area, grid, constants)?, 2)
}

/// Formants of the model's `ρ = 0` configuration, `(f1n, f2n)`.
pub fn neutral_reference<T: Scalar>(
    kind: ModelKind,
    setup: &ModelSetup<T>,
    constants: &AcousticConstants<T>,
    grid: &FrequencyGrid<T>,
) -> Result<FormantSet<T>> {
    formants_of(&setup.neutral_area(kind)?, grid, constants)
}
