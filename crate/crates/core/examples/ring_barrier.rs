//! Builds ring barriers in all four center/radius regimes, prints their
//! normalisation constants, and verifies the subsolution property against
//! identity, rotated, and randomly varying coefficient fields.

use grushin_harnack::barriers::{
    barrier_alpha, gamma_floor, random_admissible, subsolution_check_for, Coeffs, RingBarrier,
};
use grushin_harnack::geometry::Point2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;

fn main() {
    let (lambda, big_lambda) = (0.5, 2.0);
    let alpha = barrier_alpha(lambda, big_lambda).unwrap();
    println!("ellipticity window [{lambda}, {big_lambda}]  =>  exponent alpha = {alpha}");
    println!("middle-boundary floor gamma(alpha) = {:.4e}\n", gamma_floor(alpha).unwrap());

    let r = 0.25;
    // one center per regime: |y1| < r, < 2r, < 3r, >= 3r
    let centers = [0.1, 0.3, 0.55, 0.8].map(|y1| Point2::new(y1, -0.2));

    for (i, y) in centers.into_iter().enumerate() {
        let b = RingBarrier::new(alpha, y, r).unwrap();
        println!("case {:?}  (y1 = {}, r = {r})", b.case, y.x1);
        println!("  m1 = {:.6e}, m2 = {:.6e}, m3 = {:.6e}", b.m1, b.m2, b.m3);
        let (e1, e2, e3) = b.boundary_residuals(256).unwrap();
        println!("  boundary residuals (inner, middle, outer) = {:.1e}, {:.1e}, {:.1e}", e1, e2, e3);

        // a frozen rotated field, then a field that varies from point to point
        let rot = Coeffs::rotated(lambda, big_lambda, 0.7);
        let rng = RefCell::new(ChaCha8Rng::seed_from_u64(1000 + i as u64));
        let fields: [(&str, Box<dyn Fn(Point2) -> Coeffs>); 3] = [
            ("identity", Box::new(|_| Coeffs::IDENTITY)),
            ("rotated", Box::new(move |_| rot)),
            ("varying", Box::new(move |_| random_admissible(&mut *rng.borrow_mut(), lambda, big_lambda))),
        ];
        for (name, field) in fields {
            let check =
                subsolution_check_for(&b, field, lambda, big_lambda, 4000, 77 + i as u64).unwrap();
            println!(
                "  L Phi >= 0 on the ring  [{name:8}]: min = {:>12.4e}  (tolerance {:.1e})  {}",
                check.min_value,
                -check.tolerance,
                if check.pass { "ok" } else { "VIOLATED" }
            );
        }
        println!();
    }

    // positive exponents are not subsolutions: the same machinery must say no
    let control = RingBarrier::sigma_power(2.0, Point2::new(0.1, -0.2), r).unwrap();
    let check =
        subsolution_check_for(&control, |_| Coeffs::IDENTITY, lambda, big_lambda, 4000, 5).unwrap();
    println!(
        "negative control, exponent +2: min L Phi = {:.4e}  =>  pass = {}",
        check.min_value, check.pass
    );
}
