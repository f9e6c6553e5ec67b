//! Numerical survey of the quasimetric-space axioms for the gauge distance:
//! quasi-triangle constant, Hölder continuity in one argument, and the
//! doubling / thin-ring / reverse-doubling behaviour of box measures.

use grushin_harnack::geometry::{box_area, dilate, dtilde, Point2};
use grushin_harnack::quasimetric::{
    doubling_constant, estimate_quasi_triangle_k, halton_points, halton_triples, holder_defect,
    reverse_doubling, ring_modulus,
};

fn main() {
    let window = (-2.0, 2.0, -2.0, 2.0);

    // random triples almost never violate the plain triangle inequality, so
    // seed the sweep with dilates of the family x = 0, z = (t, 0), y = (t, t^2)
    let mut triples = halton_triples(window, 2000);
    for t in [0.25, 0.5, 1.0, 2.0] {
        let base = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0)];
        triples.push(base.map(|p| dilate(p, t)));
    }

    let k = estimate_quasi_triangle_k(dtilde, &triples).unwrap();
    println!("quasi-triangle constant over {} triples", k.triples_used);
    println!("  K >= {:.6}   (the seeded family alone gives ~1.0987)", k.k_lower);
    let w = k.witness;
    println!(
        "  witness: x = ({:.3}, {:.3}), z = ({:.3}, {:.3}), y = ({:.3}, {:.3})",
        w.x.x1, w.x.x2, w.z.x1, w.z.x2, w.y.x1, w.y.x2
    );

    let h = holder_defect(dtilde, &triples, 0.5, 2.0).unwrap();
    println!("\nHölder defect in the second argument, alpha = 1/2, beta = 2");
    println!("  max defect = {:.4e}   (<= 0 certifies the sample)", h.max_defect);
    println!("  least certifying beta at alpha = 1/2: {:.4}", h.min_beta);

    // the anisotropic boxes have exact closed-form area, so the measure
    // ratios below carry no quadrature error
    let balls: Vec<(Point2, f64)> = halton_points(window, 200, 0)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, 0.02 + 0.3 * (i as f64 / 200.0)))
        .collect();
    let mu = |c: Point2, r: f64| Ok(box_area(c, r));

    let d = doubling_constant(mu, &balls).unwrap();
    println!("\nbox-family measure ratios over {} (center, radius) pairs", balls.len());
    println!("  doubling  max |B_2r|/|B_r|  = {:.6}   (exact supremum: 8 at x1 = 0)", d.c_d);
    println!("  exponent  log2 of that      = {:.6}   (homogeneous dimension 3)", d.q);

    let ring = ring_modulus(mu, &balls, 0.1).unwrap();
    println!("  thin ring |B_r \\ B_0.9r|/|B_r| <= {:.6}   (must stay < 1)", ring.omega);

    let rd = reverse_doubling(mu, &balls).unwrap();
    println!("  reverse   max |B_r|/|B_2r|  = {:.6}   (exact supremum: 1/4)", rd.delta);
}
