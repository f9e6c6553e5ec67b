//! Explicit barriers for operators of Grushin type.
//!
//! The operator family is
//!
//! ```text
//! L u = a11 u_x1x1 + 2 a12 x1 u_x1x2 + a22 x1^2 u_x2x2,
//! ```
//!
//! with the coefficient matrix [[a11, a12], [a12, a22]] uniformly elliptic:
//! eigenvalues in [lambda, Lambda]. Powers of the anisotropic kernel
//! `sigma` from [`crate::geometry`] are L-subsolutions away from the pole
//! once the exponent is negative enough, and translating/scaling them yields
//! ring barriers with exact boundary values. Everything here is closed-form;
//! the `verify_subsolution` routine re-checks the sign claim by sampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Point2, Region};

/// Constant coefficient matrix of the operator at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coeffs {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl Coeffs {
    pub const IDENTITY: Coeffs = Coeffs { a11: 1.0, a12: 0.0, a22: 1.0 };

    /// Build from eigenvalues (e1, e2) and a rotation angle; the result has
    /// exactly those eigenvalues.
    pub fn rotated(e1: f64, e2: f64, theta: f64) -> Coeffs {
        let (s, c) = theta.sin_cos();
        Coeffs {
            a11: c * c * e1 + s * s * e2,
            a22: s * s * e1 + c * c * e2,
            a12: s * c * (e1 - e2),
        }
    }

    /// Eigenvalue interval of the symmetric matrix.
    pub fn eigen_range(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a11 + self.a22);
        let disc = (0.5 * (self.a11 - self.a22)).hypot(self.a12);
        (mean - disc, mean + disc)
    }

    pub fn is_admissible(&self, lambda: f64, big_lambda: f64, slack: f64) -> bool {
        let (lo, hi) = self.eigen_range();
        lo >= lambda - slack && hi <= big_lambda + slack
    }
}

/// L u at `x` from the second derivatives of u.
pub fn operator_value(c: &Coeffs, x: Point2, u_x1x1: f64, u_x1x2: f64, u_x2x2: f64) -> f64 {
    c.a11 * u_x1x1 + 2.0 * c.a12 * x.x1 * u_x1x2 + c.a22 * x.x1 * x.x1 * u_x2x2
}

/// Coefficients with eigenvalues drawn uniformly from [lambda, Lambda] and a
/// uniform rotation.
pub fn random_admissible(rng: &mut impl Rng, lambda: f64, big_lambda: f64) -> Coeffs {
    let e1 = rng.gen_range(lambda..=big_lambda);
    let e2 = rng.gen_range(lambda..=big_lambda);
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    Coeffs::rotated(e1, e2, theta)
}

/// Largest exponent that works for every admissible coefficient field:
/// alpha = 4 - 10 Lambda / lambda (at most -6).
pub fn barrier_alpha(lambda: f64, big_lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && big_lambda >= lambda && big_lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 < lambda <= Lambda, got lambda={lambda}, Lambda={big_lambda}"
        )));
    }
    Ok(4.0 - 10.0 * big_lambda / lambda)
}

/// sigma and its first and second partials in x.
#[derive(Clone, Copy, Debug)]
pub struct SigmaJet {
    pub sigma: f64,
    pub s_x1: f64,
    pub s_x2: f64,
    pub s_x1x1: f64,
    pub s_x1x2: f64,
    pub s_x2x2: f64,
}

/// Differentiating sigma^4 = (x1^2-y1^2)^2 + 2 y1^2 (x1-y1)^2 + 4 (x2-y2)^2
/// gives, with A = x1^3 - y1^3 and B = x2 - y2:
///
/// ```text
/// s_x1   = sigma^-3 A                 s_x2   = 2 sigma^-3 B
/// s_x1x1 = -3 sigma^-7 A^2 + 3 sigma^-3 x1^2
/// s_x1x2 = -6 sigma^-7 A B
/// s_x2x2 = -12 sigma^-7 B^2 + 2 sigma^-3
/// ```
///
/// Undefined at the pole x = y.
pub fn sigma_derivatives(x: Point2, y: Point2) -> Result<SigmaJet> {
    let sigma = geometry::sigma(x, y);
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput("sigma jet is undefined at the pole x = y".into()));
    }
    let a = x.x1 * x.x1 * x.x1 - y.x1 * y.x1 * y.x1;
    let b = x.x2 - y.x2;
    let s3 = sigma.powi(-3);
    let s7 = sigma.powi(-7);
    Ok(SigmaJet {
        sigma,
        s_x1: s3 * a,
        s_x2: 2.0 * s3 * b,
        s_x1x1: -3.0 * s7 * a * a + 3.0 * s3 * x.x1 * x.x1,
        s_x1x2: -6.0 * s7 * a * b,
        s_x2x2: -12.0 * s7 * b * b + 2.0 * s3,
    })
}

/// L(sigma^alpha) in closed form:
///
/// ```text
/// L(sigma^alpha) = alpha sigma^(alpha-8) [ (alpha-4) Gamma + x1^2 sigma^4 (3 a11 + 2 a22) ],
/// Gamma = a11 A^2 + 4 a12 x1 A B + 4 a22 x1^2 B^2.
/// ```
///
/// Gamma is the quadratic form of the coefficient matrix at (A, 2 x1 B), so
/// Gamma >= lambda (A^2 + 4 x1^2 B^2) for admissible coefficients.
pub fn l_sigma_power(alpha: f64, x: Point2, y: Point2, c: &Coeffs) -> Result<f64> {
    let sigma = geometry::sigma(x, y);
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput("L(sigma^alpha) is undefined at the pole x = y".into()));
    }
    let a = x.x1 * x.x1 * x.x1 - y.x1 * y.x1 * y.x1;
    let b = x.x2 - y.x2;
    let gamma = c.a11 * a * a
        + 4.0 * c.a12 * x.x1 * a * b
        + 4.0 * c.a22 * x.x1 * x.x1 * b * b;
    let s4 = geometry::sigma4(x, y);
    Ok(alpha * sigma.powf(alpha - 8.0) * ((alpha - 4.0) * gamma + x.x1 * x.x1 * s4 * (3.0 * c.a11 + 2.0 * c.a22)))
}

/// Position of the ring center relative to the degeneracy line x1 = 0,
/// measured in units of the inner radius. The four cases carry different
/// sigma-levels on the ring boundaries and hence different constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingCase {
    /// |y1| < r: all three boundaries sit on the sigma branch.
    Low,
    /// r <= |y1| < 2r: inner boundary on the far branch, outer two not.
    Mid,
    /// 2r <= |y1| < 3r: only the outermost boundary on the sigma branch.
    High,
    /// |y1| >= 3r: all three boundaries on the far branch.
    Far,
}

pub fn ring_case(y1_abs: f64, r: f64) -> RingCase {
    if y1_abs < r {
        RingCase::Low
    } else if y1_abs < 2.0 * r {
        RingCase::Mid
    } else if y1_abs < 3.0 * r {
        RingCase::High
    } else {
        RingCase::Far
    }
}

/// Barrier Phi = m2 sigma^alpha - m1 on the ring between the gauge balls of
/// radius r and 3r around y, normalised to Phi = 1 on the inner boundary and
/// Phi = 0 on the outer one; `m3` is the exact value on the middle boundary
/// (radius 2r) and is bounded below by [`gamma_floor`] uniformly in y.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RingBarrier {
    pub alpha: f64,
    pub y: Point2,
    pub r: f64,
    pub case: RingCase,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// sigma-levels of the three boundaries (inner, middle, outer).
    pub sigma_levels: (f64, f64, f64),
}

impl RingBarrier {
    /// Solve the boundary conditions for a negative exponent.
    pub fn new(alpha: f64, y: Point2, r: f64) -> Result<RingBarrier> {
        if !(alpha < 0.0) {
            return Err(Error::InvalidInput(format!(
                "ring barrier constants need a negative exponent, got alpha = {alpha}"
            )));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("ring radius must be positive, got {r}")));
        }
        let ay = y.x1.abs();
        let case = ring_case(ay, r);
        let h = alpha / 2.0;
        let p3a = 3.0f64.powf(alpha);
        let p3h = 3.0f64.powf(h);
        let (m1, m2, m3, levels) = match case {
            RingCase::Low => (
                p3a / (1.0 - p3a),
                1.0 / (r.powf(alpha) * (1.0 - p3a)),
                (2.0f64.powf(alpha) - p3a) / (1.0 - p3a),
                (r, 2.0 * r, 3.0 * r),
            ),
            RingCase::Far => (
                p3h / (1.0 - p3h),
                1.0 / ((r * ay).powf(h) * (1.0 - p3h)),
                (2.0f64.powf(h) - p3h) / (1.0 - p3h),
                ((r * ay).sqrt(), (2.0 * r * ay).sqrt(), (3.0 * r * ay).sqrt()),
            ),
            RingCase::Mid => {
                let s = ay / r;
                let den = s.powf(h) - p3a;
                (
                    p3a / den,
                    1.0 / ((r * ay).powf(h) - (3.0 * r).powf(alpha)),
                    (2.0f64.powf(alpha) - p3a) / den,
                    ((r * ay).sqrt(), 2.0 * r, 3.0 * r),
                )
            }
            RingCase::High => {
                let s = ay / r;
                let den = s.powf(h) - p3a;
                (
                    p3a / den,
                    1.0 / ((r * ay).powf(h) - (3.0 * r).powf(alpha)),
                    ((2.0 * s).powf(h) - p3a) / den,
                    ((r * ay).sqrt(), (2.0 * r * ay).sqrt(), 3.0 * r),
                )
            }
        };
        Ok(RingBarrier { alpha, y, r, case, m1, m2, m3, sigma_levels: levels })
    }

    /// Bare power sigma^alpha on the same ring (m2 = 1, m1 = 0); useful as a
    /// negative control with exponents that are not admissible.
    pub fn sigma_power(alpha: f64, y: Point2, r: f64) -> Result<RingBarrier> {
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("exponent must be nonzero, got {alpha}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("ring radius must be positive, got {r}")));
        }
        let base = if alpha < 0.0 {
            RingBarrier::new(alpha, y, r)?
        } else {
            RingBarrier::new(-alpha, y, r)?
        };
        Ok(RingBarrier { alpha, m1: 0.0, m2: 1.0, m3: f64::NAN, ..base })
    }

    pub fn eval(&self, x: Point2) -> f64 {
        self.m2 * geometry::sigma(x, self.y).powf(self.alpha) - self.m1
    }

    /// L Phi = m2 L(sigma^alpha).
    pub fn l_eval(&self, x: Point2, c: &Coeffs) -> Result<f64> {
        Ok(self.m2 * l_sigma_power(self.alpha, x, self.y, c)?)
    }

    /// Worst absolute deviation of Phi from its exact boundary values
    /// (1, m3, 0) over `n` traced samples of each ring boundary.
    pub fn boundary_residuals(&self, n: usize) -> Result<(f64, f64, f64)> {
        let mut out = [0.0f64; 3];
        for (k, (radius, target)) in [
            (self.r, 1.0),
            (2.0 * self.r, self.m3),
            (3.0 * self.r, 0.0),
        ]
        .into_iter()
        .enumerate()
        {
            let region = Region::h(self.y, radius)?;
            for p in geometry::boundary_samples(&region, n)? {
                out[k] = out[k].max((self.eval(p) - target).abs());
            }
        }
        Ok((out[0], out[1], out[2]))
    }
}

/// Uniform lower bound for the middle-boundary value m3 over all centers,
/// for a fixed negative exponent.
pub fn gamma_floor(alpha: f64) -> Result<f64> {
    if !(alpha < 0.0) {
        return Err(Error::InvalidInput(format!(
            "the middle-boundary floor needs a negative exponent, got {alpha}"
        )));
    }
    let h = alpha / 2.0;
    let low = (2.0f64.powf(alpha) - 3.0f64.powf(alpha)) / (1.0 - 3.0f64.powf(alpha));
    let far = (2.0f64.powf(h) - 3.0f64.powf(h)) / (1.0 - 3.0f64.powf(h));
    let high = (6.0f64.powf(h) - 3.0f64.powf(alpha)) / (2.0f64.powf(h) - 3.0f64.powf(alpha));
    Ok(low.min(far).min(high))
}

/// Draw `n` points uniformly from the open ring between the gauge balls of
/// radius `r_inner` and `r_outer` around `y`, by rejection from the bounding
/// box of the outer ball. Deterministic in `seed`.
pub fn sample_ring(
    y: Point2,
    r_inner: f64,
    r_outer: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<Point2>> {
    let ring = Region::ring_h(y, r_inner, r_outer)?;
    let (x1min, x1max, x2min, x2max) = ring.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    let budget = 1000 * n.max(64);
    while out.len() < n {
        attempts += 1;
        if attempts > budget {
            return Err(Error::SearchFailed(format!(
                "ring rejection sampling stalled after {attempts} draws ({} accepted)",
                out.len()
            )));
        }
        let p = Point2::new(rng.gen_range(x1min..x1max), rng.gen_range(x2min..x2max));
        if ring.contains(p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Numerical sign check of the subsolution claim.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SubsolutionCheck {
    pub min_value: f64,
    /// Natural magnitude of L Phi on the ring: |m2| r^(alpha-2).
    pub scale: f64,
    /// Pass iff min_value >= -tolerance = -1e-8 * scale.
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    pub worst: Point2,
}

/// Minimum of L Phi over sampled ring points with coefficients taken from
/// `field` at each point; every sampled matrix must have its eigenvalues in
/// [lambda, Lambda].
pub fn subsolution_check_for(
    barrier: &RingBarrier,
    field: impl Fn(Point2) -> Coeffs,
    lambda: f64,
    big_lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SubsolutionCheck> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("need at least one ring sample".into()));
    }
    let points = sample_ring(barrier.y, barrier.r, 3.0 * barrier.r, n_samples, seed)?;
    let mut min_value = f64::INFINITY;
    let mut worst = points[0];
    for p in points {
        let c = field(p);
        if !c.is_admissible(lambda, big_lambda, 1e-9) {
            return Err(Error::InvalidInput(format!(
                "coefficients at ({}, {}) have eigenvalues {:?} outside [{lambda}, {big_lambda}]",
                p.x1,
                p.x2,
                c.eigen_range()
            )));
        }
        let v = barrier.l_eval(p, &c)?;
        if v < min_value {
            min_value = v;
            worst = p;
        }
    }
    let scale = barrier.m2.abs() * barrier.r.powf(barrier.alpha - 2.0);
    let tolerance = 1e-8 * scale;
    Ok(SubsolutionCheck {
        min_value,
        scale,
        tolerance,
        pass: min_value >= -tolerance,
        samples: n_samples,
        worst,
    })
}

/// Build the ring barrier for (alpha, y, r) and check L Phi >= 0 on sampled
/// ring points against the coefficient field.
pub fn verify_subsolution(
    alpha: f64,
    y: Point2,
    r: f64,
    field: impl Fn(Point2) -> Coeffs,
    lambda: f64,
    big_lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SubsolutionCheck> {
    let barrier = RingBarrier::new(alpha, y, r)?;
    subsolution_check_for(&barrier, field, lambda, big_lambda, n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn admissible_exponent_worked_values() {
        assert_relative_eq!(barrier_alpha(1.0, 1.0).unwrap(), -6.0);
        assert_relative_eq!(barrier_alpha(1.0, 2.0).unwrap(), -16.0);
        assert_relative_eq!(barrier_alpha(0.5, 1.0).unwrap(), -16.0);
        assert!(barrier_alpha(0.0, 1.0).is_err());
        assert!(barrier_alpha(2.0, 1.0).is_err());
    }

    #[test]
    fn rotated_coeffs_have_prescribed_eigenvalues() {
        let c = Coeffs::rotated(0.7, 2.1, 0.93);
        let (lo, hi) = c.eigen_range();
        assert_relative_eq!(lo, 0.7, max_relative = 1e-12);
        assert_relative_eq!(hi, 2.1, max_relative = 1e-12);
        assert!(c.is_admissible(0.7, 2.1, 1e-9));
        assert!(!c.is_admissible(0.8, 2.1, 1e-9));
    }

    fn central_jet(x: Point2, y: Point2, h: f64) -> SigmaJet {
        let f = |p: Point2| geometry::sigma(p, y);
        let pp = |dx1: f64, dx2: f64| Point2::new(x.x1 + dx1, x.x2 + dx2);
        SigmaJet {
            sigma: f(x),
            s_x1: (f(pp(h, 0.0)) - f(pp(-h, 0.0))) / (2.0 * h),
            s_x2: (f(pp(0.0, h)) - f(pp(0.0, -h))) / (2.0 * h),
            s_x1x1: (f(pp(h, 0.0)) - 2.0 * f(x) + f(pp(-h, 0.0))) / (h * h),
            s_x2x2: (f(pp(0.0, h)) - 2.0 * f(x) + f(pp(0.0, -h))) / (h * h),
            s_x1x2: (f(pp(h, h)) - f(pp(h, -h)) - f(pp(-h, h)) + f(pp(-h, -h)))
                / (4.0 * h * h),
        }
    }

    #[test]
    fn sigma_jet_matches_finite_differences() {
        let y = Point2::new(0.4, -0.2);
        let points = [
            Point2::new(1.1, 0.3),
            Point2::new(-0.7, -0.9),
            Point2::new(0.4, 1.5),
            Point2::new(2.0, -0.2),
            Point2::new(-1.3, 0.8),
        ];
        for x in points {
            let jet = sigma_derivatives(x, y).unwrap();
            let fd = central_jet(x, y, 1e-5);
            assert_relative_eq!(jet.s_x1, fd.s_x1, max_relative = 1e-7, epsilon = 1e-9);
            assert_relative_eq!(jet.s_x2, fd.s_x2, max_relative = 1e-7, epsilon = 1e-9);
            assert_relative_eq!(jet.s_x1x1, fd.s_x1x1, max_relative = 1e-4, epsilon = 1e-6);
            assert_relative_eq!(jet.s_x1x2, fd.s_x1x2, max_relative = 1e-4, epsilon = 1e-6);
            assert_relative_eq!(jet.s_x2x2, fd.s_x2x2, max_relative = 1e-4, epsilon = 1e-6);
        }
    }

    #[test]
    fn sigma_jet_rejects_the_pole() {
        let y = Point2::new(0.3, 0.1);
        assert!(sigma_derivatives(y, y).is_err());
    }

    /// The closed form of L(sigma^alpha) must agree with assembling
    /// a11 phi_x1x1 + 2 a12 x1 phi_x1x2 + a22 x1^2 phi_x2x2 from the sigma
    /// jet by the chain rule.
    #[test]
    fn l_sigma_power_matches_chain_rule() {
        let y = Point2::new(0.5, -0.1);
        let c = Coeffs::rotated(0.8, 1.7, 0.4);
        for (alpha, x) in [
            (-6.0, Point2::new(1.3, 0.6)),
            (-16.0, Point2::new(-0.9, -0.4)),
            (2.0, Point2::new(0.2, 1.1)),
            (-7.5, Point2::new(2.4, -1.6)),
        ] {
            let jet = sigma_derivatives(x, y).unwrap();
            let s = jet.sigma;
            let phi_x1x1 = alpha * (alpha - 1.0) * s.powf(alpha - 2.0) * jet.s_x1 * jet.s_x1
                + alpha * s.powf(alpha - 1.0) * jet.s_x1x1;
            let phi_x1x2 = alpha * (alpha - 1.0) * s.powf(alpha - 2.0) * jet.s_x1 * jet.s_x2
                + alpha * s.powf(alpha - 1.0) * jet.s_x1x2;
            let phi_x2x2 = alpha * (alpha - 1.0) * s.powf(alpha - 2.0) * jet.s_x2 * jet.s_x2
                + alpha * s.powf(alpha - 1.0) * jet.s_x2x2;
            let assembled = operator_value(&c, x, phi_x1x1, phi_x1x2, phi_x2x2);
            let closed = l_sigma_power(alpha, x, y, &c).unwrap();
            assert_relative_eq!(closed, assembled, max_relative = 1e-11, epsilon = 1e-11);
        }
    }

    #[test]
    fn case_classification_boundaries() {
        assert_eq!(ring_case(0.0, 1.0), RingCase::Low);
        assert_eq!(ring_case(0.999, 1.0), RingCase::Low);
        assert_eq!(ring_case(1.0, 1.0), RingCase::Mid);
        assert_eq!(ring_case(1.999, 1.0), RingCase::Mid);
        assert_eq!(ring_case(2.0, 1.0), RingCase::High);
        assert_eq!(ring_case(2.999, 1.0), RingCase::High);
        assert_eq!(ring_case(3.0, 1.0), RingCase::Far);
        assert_eq!(ring_case(30.0, 1.0), RingCase::Far);
    }

    #[test]
    fn ring_constants_exact_values_at_minus_six() {
        // Low case, alpha = -6: m1 = 3^-6/(1-3^-6) = 1/728.
        let low = RingBarrier::new(-6.0, Point2::new(0.2, 0.0), 1.0).unwrap();
        assert_eq!(low.case, RingCase::Low);
        assert_relative_eq!(low.m1, 1.0 / 728.0, max_relative = 1e-14);
        assert_relative_eq!(low.m3, 665.0 / 46592.0, max_relative = 1e-13);
        // Far case: exponents halve, m1 = 3^-3/(1-3^-3) = 1/26.
        let far = RingBarrier::new(-6.0, Point2::new(5.0, 1.0), 1.0).unwrap();
        assert_eq!(far.case, RingCase::Far);
        assert_relative_eq!(far.m1, 1.0 / 26.0, max_relative = 1e-14);
        assert_relative_eq!(far.m3, 19.0 / 208.0, max_relative = 1e-13);
    }

    #[test]
    fn gamma_floor_worked_value() {
        // alpha = -6: min{665/46592, 19/208, 19/721} = 665/46592.
        let g = gamma_floor(-6.0).unwrap();
        assert_relative_eq!(g, 665.0 / 46592.0, max_relative = 1e-13);
        assert!(gamma_floor(2.0).is_err());
    }

    #[test]
    fn boundary_values_are_exact() {
        for y in [
            Point2::new(0.3, 0.2),   // Low
            Point2::new(-1.4, 0.0),  // Mid
            Point2::new(2.5, -0.7),  // High
            Point2::new(-4.2, 1.0),  // Far
        ] {
            let b = RingBarrier::new(-6.0, y, 1.0).unwrap();
            let (inner, middle, outer) = b.boundary_residuals(64).unwrap();
            assert!(inner < 1e-10, "{:?}: inner residual {inner}", b.case);
            assert!(middle < 1e-10, "{:?}: middle residual {middle}", b.case);
            assert!(outer < 1e-10, "{:?}: outer residual {outer}", b.case);
        }
    }

    #[test]
    fn subsolution_sign_holds_for_identity_coefficients() {
        for y in [
            Point2::new(0.3, 0.2),
            Point2::new(-1.4, 0.0),
            Point2::new(2.5, -0.7),
            Point2::new(-4.2, 1.0),
        ] {
            let check = verify_subsolution(
                -6.0,
                y,
                0.8,
                |_| Coeffs::IDENTITY,
                1.0,
                1.0,
                2000,
                7,
            )
            .unwrap();
            assert!(check.pass, "min {} at {:?}", check.min_value, check.worst);
        }
    }

    #[test]
    fn subsolution_sign_holds_for_rotated_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (lambda, big_lambda) = (0.8, 1.25);
        let alpha = barrier_alpha(lambda, big_lambda).unwrap();
        for _ in 0..5 {
            let c = random_admissible(&mut rng, lambda, big_lambda);
            let check = verify_subsolution(
                alpha,
                Point2::new(1.6, -0.3),
                0.7,
                |_| c,
                lambda,
                big_lambda,
                2000,
                13,
            )
            .unwrap();
            assert!(check.pass, "min {} for {c:?}", check.min_value);
        }
    }

    #[test]
    fn positive_exponent_is_not_a_subsolution() {
        let barrier = RingBarrier::sigma_power(2.0, Point2::new(0.3, 0.2), 0.8).unwrap();
        let check =
            subsolution_check_for(&barrier, |_| Coeffs::IDENTITY, 1.0, 1.0, 2000, 7).unwrap();
        assert!(!check.pass);
        assert!(check.min_value < -check.tolerance * 1e3);
    }

    #[test]
    fn inadmissible_field_is_rejected() {
        let c = Coeffs { a11: 3.0, a12: 0.0, a22: 1.0 };
        let err = verify_subsolution(
            -6.0,
            Point2::new(0.3, 0.2),
            0.8,
            |_| c,
            1.0,
            2.0,
            100,
            7,
        );
        assert!(err.is_err());
    }

    #[test]
    fn ring_samples_land_in_the_ring() {
        let y = Point2::new(0.9, -0.4);
        let ring = Region::ring_h(y, 0.5, 1.5).unwrap();
        let pts = sample_ring(y, 0.5, 1.5, 500, 3).unwrap();
        assert_eq!(pts.len(), 500);
        for p in pts {
            assert!(ring.contains(p));
        }
        // Determinism.
        assert_eq!(sample_ring(y, 0.5, 1.5, 10, 3).unwrap(), sample_ring(y, 0.5, 1.5, 10, 3).unwrap());
    }

    proptest! {
        /// The middle-boundary value always dominates the uniform floor.
        #[test]
        fn middle_value_dominates_floor(
            y1 in -6.0f64..6.0,
            y2 in -2.0f64..2.0,
            r in 0.05f64..2.0,
            alpha_mag in 6.0f64..20.0,
        ) {
            let alpha = -alpha_mag;
            let b = RingBarrier::new(alpha, Point2::new(y1, y2), r).unwrap();
            let floor = gamma_floor(alpha).unwrap();
            prop_assert!(b.m3 >= floor - 1e-12, "case {:?}: m3 = {} < floor = {}", b.case, b.m3, floor);
            prop_assert!(b.m3 < 1.0);
        }

        /// Phi decreases in sigma and stays within [0, 1] on the closed ring.
        #[test]
        fn barrier_is_monotone_and_bounded(
            y1 in -5.0f64..5.0,
            y2 in -2.0f64..2.0,
            seed in 0u64..1000,
        ) {
            let y = Point2::new(y1, y2);
            let b = RingBarrier::new(-6.0, y, 0.6).unwrap();
            let pts = sample_ring(y, 0.6, 1.8, 64, seed).unwrap();
            for w in pts.windows(2) {
                let (sa, sb) = (geometry::sigma(w[0], y), geometry::sigma(w[1], y));
                let (fa, fb) = (b.eval(w[0]), b.eval(w[1]));
                if sa < sb {
                    prop_assert!(fa >= fb - 1e-12);
                } else if sb < sa {
                    prop_assert!(fb >= fa - 1e-12);
                }
                prop_assert!(fa > -1e-9 && fa < 1.0 + 1e-9);
            }
        }
    }
}
