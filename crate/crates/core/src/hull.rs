//! Planar convex hulls and point coverage.

use crate::error::{Result, TractError};
use crate::scalar::Scalar;

/// Convex polygon, vertices counter-clockwise, no repeated closing vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull<T> {
    vertices: Vec<(T, T)>,
}

fn cross<T: Scalar>(o: (T, T), a: (T, T), b: (T, T)) -> T {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

impl<T: Scalar> ConvexHull<T> {
    /// Andrew's monotone chain. Collinear boundary points are dropped.
    pub fn from_points(points: &[(T, T)]) -> Result<Self> {
        let mut pts: Vec<(T, T)> = points
            .iter()
            .copied()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .collect();
        if pts.len() < 3 {
            return Err(TractError::DegenerateHull(format!(
                "need at least 3 finite points, got {}",
                pts.len()
            )));
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
        pts.dedup();
        let mut lower: Vec<(T, T)> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero() {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<(T, T)> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero() {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() < 3 {
            return Err(TractError::DegenerateHull("all points are collinear".into()));
        }
        Ok(Self { vertices: lower })
    }

    pub fn vertices(&self) -> &[(T, T)] {
        &self.vertices
    }

    pub fn area(&self) -> T {
        let n = self.vertices.len();
        let twice: T = (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum();
        twice * T::lit(0.5)
    }

    /// Inside or on the boundary, up to rounding in the orientation test.
    pub fn contains(&self, p: (T, T)) -> bool {
        let n = self.vertices.len();
        let slack = T::epsilon() * T::lit(64.0);
        (0..n).all(|i| {
            let (o, a) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let scale = ((a.0 - o.0).abs() + (a.1 - o.1).abs()) * ((p.0 - o.0).abs() + (p.1 - o.1).abs());
            cross(o, a, p) >= -slack * scale
        })
    }

    /// Fraction of `points` inside the hull.
    pub fn coverage(&self, points: &[(T, T)]) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        let inside = points.iter().filter(|&&p| self.contains(p)).count();
        inside as f64 / points.len() as f64
    }
}
