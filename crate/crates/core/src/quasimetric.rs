//! Empirical estimators for quasi-metric structure.
//!
//! Everything in this module is measurement, not proof: given a distance
//! function and finite samples, it reports witnessed lower bounds for the
//! quasi-triangle constant, the Hölder defect of the distance, doubling and
//! reverse-doubling ratios of a ball measure, and ring moduli. Estimates are
//! monotone under sample union, so growing a sample never weakens a witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Deterministic low-discrepancy point in [0,1): van der Corput radical
/// inverse of `index` in the given base.
pub fn halton(index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index + 1; // skip the zero point
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points (bases 2 and 3) mapped into the window
/// [x1min, x1max] x [x2min, x2max].
pub fn halton_points(window: (f64, f64, f64, f64), n: usize, skip: u64) -> Vec<Point2> {
    let (x1min, x1max, x2min, x2max) = window;
    (0..n as u64)
        .map(|k| {
            Point2::new(
                x1min + (x1max - x1min) * halton(skip + k, 2),
                x2min + (x2max - x2min) * halton(skip + k, 3),
            )
        })
        .collect()
}

/// Triples for the estimators: consecutive Halton points, three per triple.
pub fn halton_triples(window: (f64, f64, f64, f64), n_triples: usize) -> Vec<[Point2; 3]> {
    let pts = halton_points(window, 3 * n_triples, 0);
    pts.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TripleWitness {
    pub x: Point2,
    pub z: Point2,
    pub y: Point2,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KEstimate {
    /// Largest observed d(x,y) / (d(x,z) + d(z,y)); a lower bound for the
    /// true quasi-triangle constant.
    pub k_lower: f64,
    pub triples_used: usize,
    pub witness: TripleWitness,
}

/// Estimate the quasi-triangle constant of `d` over sampled triples.
///
/// Triples with d(x,z) + d(z,y) = 0 are skipped when d(x,y) = 0 too, and
/// rejected as a metric-axiom violation otherwise.
pub fn estimate_quasi_triangle_k(
    d: impl Fn(Point2, Point2) -> f64,
    triples: &[[Point2; 3]],
) -> Result<KEstimate> {
    let mut best: Option<TripleWitness> = None;
    let mut used = 0usize;
    for &[x, z, y] in triples {
        let num = d(x, y);
        let den = d(x, z) + d(z, y);
        if !(num.is_finite() && den.is_finite()) || num < 0.0 || den < 0.0 {
            return Err(Error::MetricViolation(format!(
                "distance must be finite and nonnegative, got d(x,y)={num}, d(x,z)+d(z,y)={den}"
            )));
        }
        if den == 0.0 {
            if num > 0.0 {
                return Err(Error::MetricViolation(format!(
                    "d(x,z)+d(z,y)=0 but d(x,y)={num} > 0 at x={x:?}, z={z:?}, y={y:?}"
                )));
            }
            continue;
        }
        used += 1;
        let value = num / den;
        if best.map_or(true, |w| value > w.value) {
            best = Some(TripleWitness { x, z, y, value });
        }
    }
    let witness =
        best.ok_or_else(|| Error::InvalidInput("no non-degenerate triples in sample".into()))?;
    Ok(KEstimate { k_lower: witness.value, triples_used: used, witness })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HolderReport {
    pub alpha: f64,
    pub beta: f64,
    /// max over triples of |d(x,y) - d(x,z)| - beta d(y,z)^alpha (d(x,y)+d(x,z))^(1-alpha);
    /// <= 0 means the tested (alpha, beta) certify the sample.
    pub max_defect: f64,
    /// Least beta that would certify the sample at this alpha.
    pub min_beta: f64,
    pub triples_used: usize,
    pub witness: TripleWitness,
}

/// Hölder-continuity defect of `d` in its second argument over triples
/// (x; y, z), at exponent `alpha` in (0,1] and coefficient `beta`.
pub fn holder_defect(
    d: impl Fn(Point2, Point2) -> f64,
    triples: &[[Point2; 3]],
    alpha: f64,
    beta: f64,
) -> Result<HolderReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0,1], got {alpha}")));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta must be positive, got {beta}")));
    }
    let mut used = 0usize;
    let mut max_defect = f64::NEG_INFINITY;
    let mut min_beta = 0.0f64;
    let mut witness: Option<TripleWitness> = None;
    for &[x, y, z] in triples {
        let dxy = d(x, y);
        let dxz = d(x, z);
        let dyz = d(y, z);
        let num = (dxy - dxz).abs();
        if dyz == 0.0 && num > 0.0 {
            return Err(Error::MetricViolation(format!(
                "d(y,z)=0 but |d(x,y)-d(x,z)|={num} > 0 at x={x:?}, y={y:?}, z={z:?}"
            )));
        }
        // 0^0 = 1 keeps the alpha = 1 case exact when both distances vanish.
        let envelope = dyz.powf(alpha) * (dxy + dxz).powf(1.0 - alpha);
        used += 1;
        let defect = num - beta * envelope;
        if defect > max_defect {
            max_defect = defect;
            witness = Some(TripleWitness { x, z, y, value: defect });
        }
        if envelope > 0.0 {
            min_beta = min_beta.max(num / envelope);
        }
    }
    let witness =
        witness.ok_or_else(|| Error::InvalidInput("empty triple sample".into()))?;
    Ok(HolderReport { alpha, beta, max_defect, min_beta, triples_used: used, witness })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BallWitness {
    pub center: Point2,
    pub radius: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DoublingEstimate {
    /// max over balls of mu(B_2r) / mu(B_r).
    pub c_d: f64,
    /// log2 of `c_d`, the associated homogeneity exponent.
    pub q: f64,
    pub witness: BallWitness,
}

fn checked_measure(
    mu: &impl Fn(Point2, f64) -> Result<f64>,
    center: Point2,
    r: f64,
) -> Result<f64> {
    let m = mu(center, r)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidMeasure(format!(
            "ball measure must be positive and finite, got {m} at {center:?}, r={r}"
        )));
    }
    Ok(m)
}

/// Doubling constant of a ball measure over the given (center, radius) family.
pub fn doubling_constant(
    measure_of_ball: impl Fn(Point2, f64) -> Result<f64>,
    balls: &[(Point2, f64)],
) -> Result<DoublingEstimate> {
    if balls.is_empty() {
        return Err(Error::InvalidInput("no balls supplied".into()));
    }
    let mut best: Option<BallWitness> = None;
    for &(center, r) in balls {
        let m1 = checked_measure(&measure_of_ball, center, r)?;
        let m2 = checked_measure(&measure_of_ball, center, 2.0 * r)?;
        let ratio = m2 / m1;
        if best.map_or(true, |w| ratio > w.value) {
            best = Some(BallWitness { center, radius: r, value: ratio });
        }
    }
    let witness = best.expect("non-empty ball family");
    Ok(DoublingEstimate { c_d: witness.value, q: witness.value.log2(), witness })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RingModulus {
    pub eps: f64,
    /// max over balls of mu(B_r \ B_{(1-eps) r}) / mu(B_r).
    pub omega: f64,
    pub witness: BallWitness,
}

/// Relative measure of the outer ring of thickness eps*r.
pub fn ring_modulus(
    measure_of_ball: impl Fn(Point2, f64) -> Result<f64>,
    balls: &[(Point2, f64)],
    eps: f64,
) -> Result<RingModulus> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidInput(format!("eps must lie in [0,1), got {eps}")));
    }
    if balls.is_empty() {
        return Err(Error::InvalidInput("no balls supplied".into()));
    }
    if eps == 0.0 {
        let &(center, radius) = &balls[0];
        return Ok(RingModulus { eps, omega: 0.0, witness: BallWitness { center, radius, value: 0.0 } });
    }
    let mut best: Option<BallWitness> = None;
    for &(center, r) in balls {
        let outer = checked_measure(&measure_of_ball, center, r)?;
        let inner = checked_measure(&measure_of_ball, center, (1.0 - eps) * r)?;
        let omega = ((outer - inner) / outer).max(0.0);
        if best.map_or(true, |w| omega > w.value) {
            best = Some(BallWitness { center, radius: r, value: omega });
        }
    }
    let witness = best.expect("non-empty ball family");
    Ok(RingModulus { eps, omega: witness.value, witness })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReverseDoubling {
    /// max over balls of mu(B_r) / mu(B_2r); < 1 certifies reverse doubling
    /// with that delta on the sample.
    pub delta: f64,
    pub witness: BallWitness,
}

pub fn reverse_doubling(
    measure_of_ball: impl Fn(Point2, f64) -> Result<f64>,
    balls: &[(Point2, f64)],
) -> Result<ReverseDoubling> {
    if balls.is_empty() {
        return Err(Error::InvalidInput("no balls supplied".into()));
    }
    let mut best: Option<BallWitness> = None;
    for &(center, r) in balls {
        let m1 = checked_measure(&measure_of_ball, center, r)?;
        let m2 = checked_measure(&measure_of_ball, center, 2.0 * r)?;
        let ratio = m1 / m2;
        if best.map_or(true, |w| ratio > w.value) {
            best = Some(BallWitness { center, radius: r, value: ratio });
        }
    }
    let witness = best.expect("non-empty ball family");
    Ok(ReverseDoubling { delta: witness.value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{box_area, dtilde, region_measure, Region};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn euclid(a: Point2, b: Point2) -> f64 {
        a.dist(b)
    }

    #[test]
    fn euclidean_triangle_constant_is_at_most_one() {
        let triples = halton_triples((-2.0, 2.0, -2.0, 2.0), 400);
        let est = estimate_quasi_triangle_k(euclid, &triples).unwrap();
        assert!(est.k_lower <= 1.0 + 1e-12, "{}", est.k_lower);
        assert!(est.triples_used > 0);
    }

    #[test]
    fn gauge_triple_hand_value() {
        // x = (0,0), z = (1,0), y = (1,1):
        //   d(x,z) = 1, d(z,y) = sqrt(6) - sqrt(2), d(x,y) = sqrt(5),
        // so the ratio is sqrt(5) / (1 + sqrt(6) - sqrt(2)) > 1: the gauge is
        // a genuine quasi-distance, not a distance.
        let triple = [[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)]];
        let est = estimate_quasi_triangle_k(dtilde, &triple).unwrap();
        let expected = 5.0f64.sqrt() / (1.0 + 6.0f64.sqrt() - 2.0f64.sqrt());
        assert_relative_eq!(est.k_lower, expected, max_relative = 1e-14);
        assert!(est.k_lower > 1.0);
    }

    #[test]
    fn degenerate_triples_are_skipped_or_rejected() {
        let p = Point2::new(0.3, -0.7);
        let q = Point2::new(1.0, 0.2);
        // fully degenerate triple is skipped; a sample of only those errors out
        let only_degenerate = [[p, p, p]];
        assert!(estimate_quasi_triangle_k(euclid, &only_degenerate).is_err());
        // zero denominator with positive numerator violates the axioms:
        // collapsing every distance through p makes the detour q -> p -> w
        // free while d(q, w) stays positive
        let broken = |a: Point2, b: Point2| if a == p || b == p { 0.0 } else { euclid(a, b) };
        let w = Point2::new(-0.4, 0.5);
        let bad = [[q, p, w]];
        assert!(matches!(
            estimate_quasi_triangle_k(broken, &bad),
            Err(Error::MetricViolation(_))
        ));
    }

    #[test]
    fn euclidean_distance_is_one_lipschitz_in_each_argument() {
        let triples = halton_triples((-2.0, 2.0, -2.0, 2.0), 400);
        let rep = holder_defect(euclid, &triples, 1.0, 1.0).unwrap();
        assert!(rep.max_defect <= 1e-12, "{}", rep.max_defect);
        assert!(rep.min_beta <= 1.0 + 1e-12);
    }

    #[test]
    fn gauge_holder_sweep_reports_finite_beta() {
        let triples = halton_triples((-2.0, 2.0, -2.0, 2.0), 1000);
        let rep = holder_defect(dtilde, &triples, 0.5, 1.0).unwrap();
        assert!(rep.min_beta.is_finite() && rep.min_beta > 0.0);
        // with beta at the reported minimum the defect closes to <= 0
        let certified = holder_defect(dtilde, &triples, 0.5, rep.min_beta.max(1e-9)).unwrap();
        assert!(certified.max_defect <= 1e-10 * (1.0 + rep.min_beta));
    }

    #[test]
    fn euclidean_disks_double_exactly_by_four() {
        let disks = |c: Point2, r: f64| {
            let _ = c;
            Ok(std::f64::consts::PI * r * r)
        };
        let balls = [(Point2::new(0.0, 0.0), 1.0), (Point2::new(1.0, 2.0), 0.5)];
        let est = doubling_constant(disks, &balls).unwrap();
        assert_relative_eq!(est.c_d, 4.0, max_relative = 1e-14);
        assert_relative_eq!(est.q, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn box_family_doubling_hand_values() {
        let boxes = |c: Point2, r: f64| Ok(box_area(c, r));
        // centered at the origin the ratio is 8; at (1,0) it is 48/8 = 6
        let origin = doubling_constant(boxes, &[(Point2::new(0.0, 0.0), 1.0)]).unwrap();
        assert_relative_eq!(origin.c_d, 8.0, max_relative = 1e-14);
        assert_relative_eq!(origin.q, 3.0, max_relative = 1e-14);
        let off = doubling_constant(boxes, &[(Point2::new(1.0, 0.0), 1.0)]).unwrap();
        assert_relative_eq!(off.c_d, 6.0, max_relative = 1e-14);
    }

    #[test]
    fn gauge_ball_doubling_is_finite_and_bounded() {
        let mu = |c: Point2, r: f64| {
            region_measure(&Region::metric_ball(c, r)?, 64).map(|m| m.value)
        };
        let balls = [
            (Point2::new(0.0, 0.0), 0.5),
            (Point2::new(1.0, 0.0), 0.5),
            (Point2::new(2.0, 1.0), 0.25),
        ];
        let est = doubling_constant(mu, &balls).unwrap();
        assert!(est.c_d > 1.0 && est.c_d < 32.0, "{}", est.c_d);
    }

    #[test]
    fn euclidean_ring_modulus_is_exact() {
        let disks = |_c: Point2, r: f64| Ok(std::f64::consts::PI * r * r);
        let balls = [(Point2::new(0.0, 0.0), 1.0)];
        for eps in [0.1, 0.05, 0.01] {
            let ring = ring_modulus(disks, &balls, eps).unwrap();
            assert_relative_eq!(ring.omega, 1.0 - (1.0 - eps) * (1.0 - eps), max_relative = 1e-12);
        }
        let zero = ring_modulus(disks, &balls, 0.0).unwrap();
        assert_eq!(zero.omega, 0.0);
        assert!(ring_modulus(disks, &balls, 1.0).is_err());
    }

    #[test]
    fn gauge_ring_modulus_is_roughly_linear_in_eps() {
        let mu = |c: Point2, r: f64| {
            region_measure(&Region::metric_ball(c, r)?, 96).map(|m| m.value)
        };
        let balls = [(Point2::new(0.5, 0.0), 0.5), (Point2::new(1.5, 0.5), 0.5)];
        let mut fitted_c = 0.0f64;
        for eps in [0.1, 0.05, 0.01] {
            let ring = ring_modulus(&mu, &balls, eps).unwrap();
            fitted_c = fitted_c.max(ring.omega / eps);
        }
        // the ring shrinks linearly; the fitted slope stays moderate
        assert!(fitted_c < 8.0, "fitted ring slope {fitted_c}");
    }

    #[test]
    fn reverse_doubling_hand_values() {
        let disks = |_c: Point2, r: f64| Ok(std::f64::consts::PI * r * r);
        let est = reverse_doubling(disks, &[(Point2::new(0.0, 0.0), 1.0)]).unwrap();
        assert_relative_eq!(est.delta, 0.25, max_relative = 1e-14);
        let boxes = |c: Point2, r: f64| Ok(box_area(c, r));
        let est = reverse_doubling(boxes, &[(Point2::new(0.0, 0.0), 1.0)]).unwrap();
        assert_relative_eq!(est.delta, 0.125, max_relative = 1e-14);
    }

    #[test]
    fn per_ball_doubling_product_is_one() {
        let boxes = |c: Point2, r: f64| Ok(box_area(c, r));
        for &(c, r) in &[(Point2::new(0.0, 0.0), 1.0), (Point2::new(1.0, 0.5), 0.3)] {
            let fam = [(c, r)];
            let d = doubling_constant(boxes, &fam).unwrap().c_d;
            let rd = reverse_doubling(boxes, &fam).unwrap().delta;
            assert_relative_eq!(d * rd, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn halton_is_deterministic_and_well_spread() {
        assert_eq!(halton(0, 2), 0.5);
        assert_eq!(halton(1, 2), 0.25);
        let pts = halton_points((-1.0, 1.0, -1.0, 1.0), 64, 0);
        assert_eq!(pts, halton_points((-1.0, 1.0, -1.0, 1.0), 64, 0));
        let mean1: f64 = pts.iter().map(|p| p.x1).sum::<f64>() / 64.0;
        assert!(mean1.abs() < 0.1);
    }

    proptest! {
        #[test]
        fn k_estimate_is_monotone_under_sample_union(n in 2usize..30) {
            let triples = halton_triples((-2.0, 2.0, -2.0, 2.0), n + 10);
            let small = estimate_quasi_triangle_k(dtilde, &triples[..n]).unwrap();
            let large = estimate_quasi_triangle_k(dtilde, &triples).unwrap();
            prop_assert!(large.k_lower >= small.k_lower);
        }

        #[test]
        fn ring_modulus_is_monotone_in_eps(e1 in 0.01f64..0.5, e2 in 0.01f64..0.5) {
            let disks = |_c: Point2, r: f64| Ok(std::f64::consts::PI * r * r);
            let balls = [(Point2::new(0.0, 0.0), 1.0)];
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a = ring_modulus(disks, &balls, lo).unwrap().omega;
            let b = ring_modulus(disks, &balls, hi).unwrap().omega;
            prop_assert!(a <= b + 1e-12);
        }
    }
}
