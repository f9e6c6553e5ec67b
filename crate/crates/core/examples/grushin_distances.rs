//! Hand-checkable values of the gauge distance, the kernels, and the level
//! functions, plus the dilation scaling law they all share.

use grushin_harnack::geometry::{
    box_area, dilate, dtilde, level_g, level_h, rho, sigma, Point2,
};

fn main() {
    let o = Point2::new(0.0, 0.0);
    let e2 = Point2::new(0.0, 1.0);
    let p = Point2::new(1.0, 1.0);

    println!("gauge distance");
    println!("  d((0,0),(0,1)) = {}   (exact: 2)", dtilde(o, e2));
    println!("  d((0,0),(1,1)) = {}   (exact: sqrt 5 = {})", dtilde(o, p), 5f64.sqrt());
    println!(
        "  d((1,0),(1,1)) = {}   (exact: sqrt 6 - sqrt 2 = {})",
        dtilde(Point2::new(1.0, 0.0), p),
        6f64.sqrt() - 2f64.sqrt()
    );

    println!("\nkernels at ((0,1),(0,0))");
    println!("  rho   = {}   (exact: 2^(1/2) = {})", rho(e2, o), 2f64.sqrt());
    println!("  sigma = {}", sigma(e2, o));

    // the whole geometry is 1-homogeneous under (x1, x2) -> (t x1, t^2 x2)
    println!("\ndilation scaling, t = 3");
    let (x, y) = (Point2::new(0.4, -0.2), Point2::new(-0.1, 0.7));
    let t = 3.0;
    println!("  d(dx, dy) / d(x, y)       = {}", dtilde(dilate(x, t), dilate(y, t)) / dtilde(x, y));
    println!("  rho(dx, dy) / rho(x, y)   = {}", rho(dilate(x, t), dilate(y, t)) / rho(x, y));
    println!(
        "  |Box(dx, t r)| / |Box(x, r)| = {}   (exact: t^3 = 27)",
        box_area(dilate(x, t), t * 0.5) / box_area(x, 0.5)
    );

    println!("\nlevel functions at x = (1.2, 0.3) around y = (0.5, 0.0), r = 0.25");
    let (x, y, r) = (Point2::new(1.2, 0.3), Point2::new(0.5, 0.0), 0.25);
    println!("  level_g = {}", level_g(x, y, r));
    println!("  level_h = {}", level_h(x, y, r));
    println!("  (x is in H(y, r) iff level_h < r = {r})");
}
