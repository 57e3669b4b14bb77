//! Project points of the joint (t, x) space onto a small two-class pattern.

use governing_pattern::{project_nearest, CurvePoint, GoverningPattern, PrincipalCurve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rising = PrincipalCurve::new(
        vec![
            CurvePoint::new(0.0, vec![0.0]),
            CurvePoint::new(5.0, vec![5.0]),
            CurvePoint::new(10.0, vec![5.0]),
        ],
        0,
    )?;
    let flat = PrincipalCurve::new(
        vec![CurvePoint::new(0.0, vec![-3.0]), CurvePoint::new(10.0, vec![-3.0])],
        1,
    )?;
    let pattern = GoverningPattern::new(vec![rising, flat])?;

    for p in [[1.0, 1.5], [7.0, 4.0], [4.0, -2.0], [12.0, 0.0]] {
        let proj = project_nearest(&p, &pattern)?;
        println!(
            "({:>4}, {:>4}) -> class {} segment {} foot ({:.3}, {:.3}) distance {:.3}",
            p[0], p[1], proj.class_id, proj.segment_index, proj.point.t, proj.point.y[0], proj.distance
        );
    }
    Ok(())
}
