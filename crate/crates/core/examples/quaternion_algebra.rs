//! Quaternion arithmetic and its 2×2 complex image.
//!
//! cargo run --example quaternion_algebra

use qsc::quaternion::{Quaternion, DEFAULT_SHAPE_TOL};

fn main() -> qsc::Result<()> {
    let (e1, e2, e3) = (Quaternion::I1, Quaternion::I2, Quaternion::I3);
    println!("e1 e2 = {}   e2 e1 = {}", e1 * e2, e2 * e1);
    println!("e1² = e2² = e3² = {}", e3 * e3);

    let x = Quaternion::new(1.0, -2.0, 0.5, 3.0);
    let y = Quaternion::new(0.25, 1.0, -1.0, 2.0);
    let xy = x * y;
    println!("\nx = {x}\ny = {y}\nxy = {xy}");
    println!("|xy| = {:.12}, |x||y| = {:.12}", xy.norm(), x.norm() * y.norm());

    let m = x.to_complex();
    println!("\nimage of x:");
    for r in 0..2 {
        println!("  [{:>8.3}  {:>8.3}]", m.get(r, 0), m.get(r, 1));
    }
    println!("det = {:.6} = |x|² = {:.6}", m.det(), x.norm_sqr());
    let prod_err = (x * y).to_complex().max_abs_diff(&(x.to_complex() * y.to_complex()));
    println!("|φ(xy) − φ(x)φ(y)|max = {prod_err:.2e}");
    println!("round trip exact: {}", Quaternion::from_complex(&m, DEFAULT_SHAPE_TOL)? == x);
    Ok(())
}
