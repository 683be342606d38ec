//! Four-tube models driven by the coordination function.
//!
//! * The reduced distinctive-region model (DRM): four piston sections cut at
//!   L/6, L/2 and 5L/6, occupying `{n/6, n/3, n/3, n/6}` tubelets.
//! * A circularised Fant model: a constant-length constriction sliding inside
//!   the front region, a lip section, and a main tube, with total length
//!   varying along the cycle.
//!
//! Parameters are pre-rectification values; the soft rectifier is applied
//! per tubelet when the area function is reconstructed.

use serde::{Deserialize, Serialize};

use crate::area::SampledAreaFunction;
use crate::error::{invalid_config, Result, TractError};
use crate::generic_model::soft_rectify;
use crate::mixing::CoordinationTriple;
use crate::scalar::{round_half_up, Scalar};

/// Pre-rectification section values of the DRM, glottis first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrmParams<T> {
    pub p1: T,
    pub p2: T,
    pub p3: T,
    pub p4: T,
}

impl<T: Scalar> DrmParams<T> {
    pub fn new(p1: T, p2: T, p3: T, p4: T) -> Self {
        Self { p1, p2, p3, p4 }
    }

    pub fn from_slice(values: &[T]) -> Result<Self> {
        match values {
            &[p1, p2, p3, p4] => Ok(Self { p1, p2, p3, p4 }),
            _ => Err(TractError::InvalidParams(format!(
                "DRM needs 4 parameters, got {}",
                values.len()
            ))),
        }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.p1, self.p2, self.p3, self.p4]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct DrmConfig<T> {
    pub n_tubelets: usize,
    pub length_cm: T,
}

impl<T: Scalar> Default for DrmConfig<T> {
    fn default() -> Self {
        Self {
            n_tubelets: 120,
            length_cm: T::lit(17.5),
        }
    }
}

impl<T: Scalar> DrmConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_tubelets == 0 || !self.n_tubelets.is_multiple_of(6) {
            return Err(invalid_config(format!(
                "DRM tubelet count must be a positive multiple of 6, got {}",
                self.n_tubelets
            )));
        }
        if !(self.length_cm.is_finite() && self.length_cm > T::zero()) {
            return Err(invalid_config(format!(
                "DRM length must be positive, got {}",
                self.length_cm
            )));
        }
        Ok(())
    }

    /// Tubelet counts of the four sections.
    pub fn section_sizes(&self) -> [usize; 4] {
        let sixth = self.n_tubelets / 6;
        [sixth, 2 * sixth, 2 * sixth, sixth]
    }

    /// Section boundaries in cm from the glottis.
    pub fn cut_positions_cm(&self) -> [T; 3] {
        let d = self.length_cm / T::from_usize_exact(self.n_tubelets);
        let [s1, s2, s3, _] = self.section_sizes();
        [
            d * T::from_usize_exact(s1),
            d * T::from_usize_exact(s1 + s2),
            d * T::from_usize_exact(s1 + s2 + s3),
        ]
    }
}

/// Coordination triple of the DRM sections (`Ω = 1` everywhere).
///
/// The two glottal sections take their phases from the generic seed sampled
/// at `x = 0` and `x = L/3`; the two front sections mirror them with negated
/// amplitudes, which keeps `P3 = 2 − P2` and `P4 = 2 − P1` on the whole domain.
pub fn drm_coordination<T: Scalar>() -> CoordinationTriple<T> {
    let sin_third = (T::PI() / T::lit(3.0)).sin();
    let phase_back = (T::lit(2.0) / T::lit(3.0) * sin_third).atan();
    let phase_mid = (-(T::lit(4.0) / T::lit(3.0)) * sin_third).atan();
    let amp_back = T::lit(2.0) / phase_back.cos();
    let amp_mid = T::one() / phase_mid.cos();
    CoordinationTriple::new(
        vec![T::one(); 4],
        vec![amp_back, amp_mid, -amp_mid, -amp_back],
        vec![phase_back, phase_mid, phase_mid, phase_back],
    )
    .expect("static coordination triple is valid")
}

/// Explicit reduction: `(p1, p2) → (p1, p2, 2 − p2, 2 − p1)`.
pub fn drm_reduce<T: Scalar>(p1: T, p2: T) -> DrmParams<T> {
    let two = T::lit(2.0);
    DrmParams::new(p1, p2, two - p2, two - p1)
}

/// Piecewise-constant pre-rectification profile, one value per tubelet.
pub fn drm_profile<T: Scalar>(params: DrmParams<T>, cfg: &DrmConfig<T>) -> Result<Vec<T>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.n_tubelets);
    for (value, size) in params.to_array().into_iter().zip(cfg.section_sizes()) {
        out.extend(std::iter::repeat_n(value, size));
    }
    Ok(out)
}

pub fn drm_area_function<T: Scalar>(
    params: DrmParams<T>,
    cfg: &DrmConfig<T>,
) -> Result<SampledAreaFunction<T>> {
    let areas = drm_profile(params, cfg)?
        .into_iter()
        .map(soft_rectify)
        .collect();
    SampledAreaFunction::with_total_length(cfg.length_cm, areas)
}

/// Geometry of the circularised Fant model.
///
/// Lengths are fractions of the tubelet count `n`; areas are pre-rectification
/// values in cm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FantGeometry<T> {
    pub n: usize,
    /// Fraction of the tube in which the constriction slides (from the glottis).
    pub region_fraction: T,
    /// Constriction length as a fraction of `n`.
    pub constriction_fraction: T,
    pub unit_area: T,
    pub mean_length: T,
    pub length_amplitude: T,
    /// Main-tube value outside the constriction and the lips.
    pub tube_area: T,
}

impl<T: Scalar> Default for FantGeometry<T> {
    fn default() -> Self {
        Self {
            n: 200,
            region_fraction: T::lit(0.9),
            constriction_fraction: T::lit(0.3),
            unit_area: T::one(),
            mean_length: T::lit(17.5),
            length_amplitude: T::lit(1.5),
            tube_area: T::lit(4.0),
        }
    }
}

impl<T: Scalar> FantGeometry<T> {
    pub fn validate(&self) -> Result<()> {
        let (lc, l) = (self.region_fraction, self.constriction_fraction);
        if !(l > T::zero() && l < lc && lc <= T::one()) {
            return Err(invalid_config(format!(
                "Fant fractions must satisfy 0 < l < Lc <= 1, got l = {l}, Lc = {lc}"
            )));
        }
        if self.n < 100 {
            return Err(invalid_config(format!(
                "Fant model needs at least 100 tubelets, got {}",
                self.n
            )));
        }
        if !(self.mean_length > self.length_amplitude.abs() && self.length_amplitude.is_finite()) {
            return Err(invalid_config("Fant length range must stay positive"));
        }
        if !(self.unit_area > T::zero() && self.tube_area.is_finite()) {
            return Err(invalid_config("Fant areas must be finite with a positive unit"));
        }
        Ok(())
    }

    fn n_scalar(&self) -> T {
        T::from_usize_exact(self.n)
    }

    /// Constriction block length in tubelets.
    pub fn constriction_tubelets(&self) -> usize {
        round_half_up(self.constriction_fraction * self.n_scalar()).max(0) as usize
    }

    /// Tubelets of the sliding region `[0, Lc·n)`.
    pub fn region_tubelets(&self) -> usize {
        round_half_up(self.region_fraction * self.n_scalar()).clamp(0, self.n as i64) as usize
    }

    /// Lip block length in tubelets.
    pub fn lip_tubelets(&self) -> usize {
        round_half_up((T::one() - self.region_fraction) * self.n_scalar()).clamp(0, self.n as i64)
            as usize
    }
}

/// `{Xc, Ac, Al, L}`: constriction centre (tubelet index), constriction and
/// lip pre-rectification areas, and total length in cm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FantParams<T> {
    pub xc: T,
    pub ac: T,
    pub al: T,
    pub total_length_cm: T,
}

impl<T: Scalar> FantParams<T> {
    pub fn from_slice(values: &[T]) -> Result<Self> {
        match values {
            &[xc, ac, al, total_length_cm] => Ok(Self {
                xc,
                ac,
                al,
                total_length_cm,
            }),
            _ => Err(TractError::InvalidParams(format!(
                "Fant model needs 4 parameters, got {}",
                values.len()
            ))),
        }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.xc, self.ac, self.al, self.total_length_cm]
    }
}

/// Coordination triple for `{Xc, Ac, Al, L}`.
pub fn fant_coordination<T: Scalar>(geom: &FantGeometry<T>) -> CoordinationTriple<T> {
    let pi = T::PI();
    let third = pi / T::lit(3.0);
    let n = geom.n_scalar();
    let (lc, l, a) = (geom.region_fraction, geom.constriction_fraction, geom.unit_area);
    CoordinationTriple::new(
        vec![
            lc * n / T::lit(2.0),
            T::lit(-1.5) * a,
            a / T::lit(2.0),
            geom.mean_length,
        ],
        vec![T::lit(0.3) * (lc - l) * n, T::lit(2.0) * a, -a, geom.length_amplitude],
        vec![T::lit(5.0) * third, pi, third, third],
    )
    .expect("static coordination triple is valid")
}

/// Pre-rectification profile of the Fant model, one value per tubelet.
///
/// The constriction block of `round(l·n)` tubelets is centred on
/// `round(xc)` and clipped to the sliding region; the last `round((1 − Lc)·n)`
/// tubelets are the lips; everything else is the main tube. Where blocks
/// overlap the constriction wins over the lips, which win over the tube.
pub fn fant_profile<T: Scalar>(params: FantParams<T>, geom: &FantGeometry<T>) -> Result<Vec<T>> {
    geom.validate()?;
    if !(params.xc.is_finite() && params.ac.is_finite() && params.al.is_finite()) {
        return Err(TractError::InvalidParams("non-finite Fant parameter".into()));
    }
    let n = geom.n;
    let mut profile = vec![geom.tube_area; n];

    let lips = geom.lip_tubelets();
    for v in &mut profile[n - lips..] {
        *v = params.al;
    }

    let block = geom.constriction_tubelets() as i64;
    let centre = round_half_up(params.xc);
    let start = centre - block / 2;
    let end = start + block;
    let (lo, hi) = (start.max(0), end.min(geom.region_tubelets() as i64));
    if lo >= hi {
        return Err(TractError::InvalidParams(format!(
            "constriction centred at {} falls outside the sliding region",
            params.xc
        )));
    }
    for v in &mut profile[lo as usize..hi as usize] {
        *v = params.ac;
    }
    Ok(profile)
}

pub fn fant_area_function<T: Scalar>(
    params: FantParams<T>,
    geom: &FantGeometry<T>,
) -> Result<SampledAreaFunction<T>> {
    if !(params.total_length_cm.is_finite() && params.total_length_cm > T::zero()) {
        return Err(TractError::InvalidParams(format!(
            "total length must be positive, got {}",
            params.total_length_cm
        )));
    }
    let areas = fant_profile(params, geom)?
        .into_iter()
        .map(soft_rectify)
        .collect();
    SampledAreaFunction::with_total_length(params.total_length_cm, areas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic_model::{fourier_amplitudes, profile_at};
    use crate::mixing::{eval_coordination, to_coordination, ComponentTriple, CyclePoint};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ring(theta: f64) -> CyclePoint<f64> {
        CyclePoint::on_ring(theta).unwrap()
    }

    fn assert_vec_eq(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(*x, *y, epsilon = tol);
        }
    }

    #[test]
    fn drm_coordination_examples() {
        let c = drm_coordination::<f64>();
        assert_vec_eq(&eval_coordination(&c, ring(PI / 3.0)), &[3.0, 0.5, 1.5, -1.0], 1e-12);
        assert_vec_eq(&eval_coordination(&c, ring(PI)), &[-1.0, 0.0, 2.0, 3.0], 1e-12);
        assert_eq!(eval_coordination(&c, CyclePoint::new(0.0, 1.0).unwrap()), vec![1.0; 4]);
    }

    #[test]
    fn drm_coordination_matches_converted_generic_seed() {
        // Generic seed evaluated at x/L ∈ {0, 1/3, 2/3, 1}.
        let xs = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        let v1: Vec<f64> = xs.iter().map(|x| (PI * x).cos()).collect();
        let v2: Vec<f64> = xs.iter().map(|x| (3.0 * PI * x).cos()).collect();
        let seed = ComponentTriple::new(
            v1.iter().zip(&v2).map(|(a, b)| 1.0 + a + b).collect(),
            v1.iter().map(|a| 1.0 - 2.0 * a).collect(),
            v1.iter().zip(&v2).map(|(a, b)| 1.0 + a - b).collect(),
        )
        .unwrap();
        let converted = to_coordination(&seed);
        let table = drm_coordination::<f64>();
        assert_vec_eq(converted.omega(), table.omega(), 1e-12);
        assert_vec_eq(converted.psi1(), table.psi1(), 1e-12);
        assert_vec_eq(converted.psi2(), table.psi2(), 1e-12);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(drm_reduce(1.0, 1.0), DrmParams::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(drm_reduce(3.0, 0.5), DrmParams::new(3.0, 0.5, 1.5, -1.0));
        assert_eq!(drm_reduce(-1.0, 0.0), DrmParams::new(-1.0, 0.0, 2.0, 3.0));
    }

    #[test]
    fn drm_area_examples() {
        let cfg = DrmConfig::default();
        let uniform = drm_area_function(DrmParams::new(1.0, 1.0, 1.0, 1.0), &cfg).unwrap();
        assert!(uniform.areas().iter().all(|&a| a == 1.0));

        let u = drm_area_function(DrmParams::new(3.0, 0.5, 1.5, -1.0), &cfg).unwrap();
        let sections = u.sections();
        assert_eq!(sections.len(), 4);
        let expect = [3.0, 0.606531, 1.5, 0.135335];
        for ((_, a), e) in sections.iter().zip(expect) {
            assert_abs_diff_eq!(*a, e, epsilon = 1e-6);
        }
        let lengths: Vec<f64> = sections.iter().map(|s| s.0).collect();
        assert_vec_eq(&lengths, &[17.5 / 6.0, 17.5 / 3.0, 17.5 / 3.0, 17.5 / 6.0], 1e-12);

        let cuts = cfg.cut_positions_cm();
        assert_vec_eq(&cuts, &[17.5 / 6.0, 17.5 / 2.0, 17.5 * 5.0 / 6.0], 1e-12);
    }

    #[test]
    fn drm_rejects_indivisible_count() {
        let cfg = DrmConfig { n_tubelets: 100, length_cm: 17.5 };
        assert!(matches!(
            drm_area_function(DrmParams::new(1.0, 1.0, 1.0, 1.0), &cfg),
            Err(TractError::InvalidConfig(_))
        ));
        assert!(DrmParams::<f64>::from_slice(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn drm_matches_generic_profile_at_cut_points() {
        for theta in [PI / 3.0, PI, 5.0 * PI / 3.0] {
            let p = eval_coordination(&drm_coordination::<f64>(), ring(theta));
            let pair = fourier_amplitudes(ring(theta));
            for (value, x) in p.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
                assert_abs_diff_eq!(*value, profile_at(pair, x * 17.5, 17.5), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn fant_coordination_examples() {
        let geom = FantGeometry::<f64>::default();
        let c = fant_coordination(&geom);
        let at_i = eval_coordination(&c, ring(5.0 * PI / 3.0));
        assert_abs_diff_eq!(at_i[0], 126.0, epsilon = 1e-9);
        let at_u = eval_coordination(&c, ring(PI / 3.0));
        assert_vec_eq(&at_u, &[72.0, -2.5, -0.5, 19.0], 1e-9);
        let at_a = eval_coordination(&c, ring(PI));
        assert_abs_diff_eq!(at_a[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(soft_rectify(at_a[1]), 0.606531, epsilon = 1e-6);
    }

    #[test]
    fn fant_neutral_layout() {
        let geom = FantGeometry::<f64>::default();
        let params = FantParams { xc: 90.0, ac: -1.5, al: 0.5, total_length_cm: 17.5 };
        let a = fant_area_function(params, &geom).unwrap();
        assert_eq!(a.n(), 200);
        assert_eq!(geom.lip_tubelets(), 20);
        assert_eq!(geom.constriction_tubelets(), 60);
        let areas = a.areas();
        assert_abs_diff_eq!(areas[60], 0.082085, epsilon = 1e-6);
        assert_abs_diff_eq!(areas[119], 0.082085, epsilon = 1e-6);
        assert_eq!(areas[59], soft_rectify(geom.tube_area));
        assert_eq!(areas[120], soft_rectify(geom.tube_area));
        assert_abs_diff_eq!(areas[180], 0.606531, epsilon = 1e-6);
        assert_abs_diff_eq!(areas[199], 0.606531, epsilon = 1e-6);
        assert_abs_diff_eq!(a.total_length_cm(), 17.5, epsilon = 1e-12);
    }

    #[test]
    fn fant_vowel_u_layout() {
        let geom = FantGeometry::<f64>::default();
        let v = eval_coordination(&fant_coordination(&geom), ring(PI / 3.0));
        let a = fant_area_function(FantParams::from_slice(&v).unwrap(), &geom).unwrap();
        assert_abs_diff_eq!(a.total_length_cm(), 19.0, epsilon = 1e-12);
        // Block centred at 72: tubelets [42, 102).
        assert_abs_diff_eq!(a.areas()[42], 0.030197, epsilon = 1e-6);
        assert_abs_diff_eq!(a.areas()[101], 0.030197, epsilon = 1e-6);
        assert_eq!(a.areas()[41], soft_rectify(geom.tube_area));
        assert_abs_diff_eq!(a.lip_area(), 0.223130, epsilon = 1e-6);
    }

    #[test]
    fn fant_out_of_range_constriction() {
        let geom = FantGeometry::<f64>::default();
        let p = FantParams { xc: 500.0, ac: 0.0, al: 0.0, total_length_cm: 17.5 };
        assert!(matches!(fant_area_function(p, &geom), Err(TractError::InvalidParams(_))));
        let p = FantParams { xc: -40.0, ac: 0.0, al: 0.0, total_length_cm: 17.5 };
        assert!(fant_area_function(p, &geom).is_err());
        // Partially outside: clipped, still valid.
        let p = FantParams { xc: 175.0, ac: -1.0, al: 0.3, total_length_cm: 17.5 };
        let prof = fant_profile(p, &geom).unwrap();
        assert_eq!(prof[179], -1.0);
        assert_eq!(prof[180], 0.3);
    }

    #[test]
    fn fant_geometry_validation() {
        let g = FantGeometry::<f64> { constriction_fraction: 0.95, ..Default::default() };
        assert!(g.validate().is_err());
        let g = FantGeometry::<f64> { n: 50, ..Default::default() };
        assert!(g.validate().is_err());
    }

    proptest! {
        #[test]
        fn reduction_equals_coordination(theta in 0.0..(2.0 * PI)) {
            let cfg = DrmConfig::default();
            let p = eval_coordination(&drm_coordination::<f64>(), ring(theta));
            let a = drm_area_function(DrmParams::from_slice(&p).unwrap(), &cfg).unwrap();
            let b = drm_area_function(drm_reduce(p[0], p[1]), &cfg).unwrap();
            for (x, y) in a.areas().iter().zip(b.areas()) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }

        #[test]
        fn drm_internal_antisymmetry(theta in 0.0..(2.0 * PI), rho in 0.0..=1.0f64) {
            let p = eval_coordination(&drm_coordination::<f64>(), CyclePoint::new(rho, theta).unwrap());
            prop_assert!((p[2] - (2.0 - p[1])).abs() <= 1e-12);
            prop_assert!((p[3] - (2.0 - p[0])).abs() <= 1e-12);
        }

        #[test]
        fn fant_reconstruction_invariants(theta in 0.0..(2.0 * PI), rho in 0.0..=1.0f64) {
            let geom = FantGeometry::<f64>::default();
            let v = eval_coordination(&fant_coordination(&geom), CyclePoint::new(rho, theta).unwrap());
            let params = FantParams::from_slice(&v).unwrap();
            let a = fant_area_function(params, &geom).unwrap();
            prop_assert_eq!(a.n(), geom.n);
            prop_assert!((a.total_length_cm() - params.total_length_cm).abs() <= 1e-12);
            prop_assert!(a.areas().iter().all(|&x| x > 0.0));
            // The block never leaves the sliding region on the domain.
            let prof = fant_profile(params, &geom).unwrap();
            let count = prof.iter().filter(|&&x| x == params.ac).count();
            prop_assert!(count >= geom.constriction_tubelets());
        }
    }
}
