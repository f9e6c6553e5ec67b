//! The region families side by side: measures, diameters, and bounding boxes
//! for a box, a gauge ball, and the two level-set regions around one center.
//! Optionally dumps membership grids as CSV for plotting.

use grushin_harnack::geometry::{
    box_area, region_csv, region_diameter, region_measure, Point2, Region,
};
use std::env;
use std::fs;

fn main() {
    let y = Point2::new(0.6, -0.3);
    let r = 0.4;

    let regions = [
        ("box", Region::metric_box(y, r).unwrap()),
        ("ball", Region::metric_ball(y, r).unwrap()),
        ("g", Region::g(y, r).unwrap()),
        ("h", Region::h(y, r).unwrap()),
        ("ring_h", Region::ring_h(y, r, 3.0 * r).unwrap()),
    ];

    println!("center y = ({}, {}), radius r = {}\n", y.x1, y.x2, r);
    println!("{:<8} {:>12} {:>12} {:>10}  bounding box", "region", "measure", "+-", "diameter");
    for (name, region) in &regions {
        let m = region_measure(region, 256).unwrap();
        let d = region_diameter(region, 512).unwrap();
        let (a, b, c, dd) = region.bounding_box();
        println!(
            "{:<8} {:>12.6} {:>12.1e} {:>10.4}  [{:.3}, {:.3}] x [{:.3}, {:.3}]",
            name, m.value, m.error_bound, d, a, b, c, dd
        );
    }

    println!("\nclosed-form box area 4r^2(r + |y1|) = {}", box_area(y, r));

    // pass a directory to also write plottable membership grids
    if let Some(dir) = env::args().nth(1) {
        for (name, region) in &regions {
            let path = format!("{dir}/{name}.csv");
            fs::write(&path, region_csv(region, 200, 200)).unwrap();
            println!("wrote {path}");
        }
    }
}
