//! Sampled area functions: a chain of equal-length tubelets, glottis first.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{invalid_input, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledAreaFunction<T> {
    tubelet_length_cm: T,
    areas: Vec<T>,
}

impl<T: Scalar> SampledAreaFunction<T> {
    /// Areas in cm², index 0 at the glottis; every tubelet has the same length.
    pub fn new(tubelet_length_cm: T, areas: Vec<T>) -> Result<Self> {
        if !(tubelet_length_cm.is_finite() && tubelet_length_cm > T::zero()) {
            return Err(invalid_input(format!(
                "tubelet length must be positive, got {tubelet_length_cm}"
            )));
        }
        if areas.len() < 2 {
            return Err(invalid_input(format!(
                "an area function needs at least 2 tubelets, got {}",
                areas.len()
            )));
        }
        if let Some((idx, a)) = areas
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && **a > T::zero()))
        {
            return Err(invalid_input(format!(
                "tubelet {} has non-positive area {a}",
                idx + 1
            )));
        }
        Ok(Self {
            tubelet_length_cm,
            areas,
        })
    }

    /// Builds `n` tubelets spanning `total_length_cm`.
    pub fn with_total_length(total_length_cm: T, areas: Vec<T>) -> Result<Self> {
        let n = T::from_usize_exact(areas.len().max(1));
        Self::new(total_length_cm / n, areas)
    }

    pub fn n(&self) -> usize {
        self.areas.len()
    }

    pub fn tubelet_length_cm(&self) -> T {
        self.tubelet_length_cm
    }

    pub fn total_length_cm(&self) -> T {
        self.tubelet_length_cm * T::from_usize_exact(self.n())
    }

    pub fn areas(&self) -> &[T] {
        &self.areas
    }

    pub fn lip_area(&self) -> T {
        self.areas[self.areas.len() - 1]
    }

    /// Tubelet centres measured from the glottis, in cm.
    pub fn positions_cm(&self) -> Vec<T> {
        let half = T::lit(0.5);
        (0..self.n())
            .map(|i| (T::from_usize_exact(i) + half) * self.tubelet_length_cm)
            .collect()
    }

    /// Same tube, lips and glottis swapped.
    pub fn reversed(&self) -> Self {
        let mut areas = self.areas.clone();
        areas.reverse();
        Self {
            tubelet_length_cm: self.tubelet_length_cm,
            areas,
        }
    }

    /// Every area multiplied by `factor` (must be positive).
    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::new(
            self.tubelet_length_cm,
            self.areas.iter().map(|&a| a * factor).collect(),
        )
    }

    /// Splits every tubelet into `factor` equal pieces of the same area.
    pub fn subdivided(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(invalid_input("subdivision factor must be >= 1"));
        }
        let areas = self
            .areas
            .iter()
            .flat_map(|&a| std::iter::repeat_n(a, factor))
            .collect();
        Self::new(self.tubelet_length_cm / T::from_usize_exact(factor), areas)
    }

    /// Runs of consecutive tubelets with bit-identical area, as `(length_cm, area)`.
    pub fn sections(&self) -> Vec<(T, T)> {
        let mut out: Vec<(T, usize)> = Vec::new();
        for &a in &self.areas {
            match out.last_mut() {
                Some((last, count)) if *last == a => *count += 1,
                _ => out.push((a, 1)),
            }
        }
        out.into_iter()
            .map(|(a, count)| (self.tubelet_length_cm * T::from_usize_exact(count), a))
            .collect()
    }

    /// CSV with header `index,x_cm,area_cm2`, one row per tubelet (1-based index).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "index,x_cm,area_cm2")?;
        for (i, (x, a)) in self.positions_cm().iter().zip(&self.areas).enumerate() {
            writeln!(w, "{},{},{}", i + 1, x.as_f64(), a.as_f64())?;
        }
        Ok(())
    }
}
