//! Narrow-, small- and wide-slit closed forms against the quadrature oracle.

use popper_core::{
    delta_coeff, dk2sq_narrow, dk2sq_quadrature, dk2sq_small_a, dk2sq_wide, dy2sq_narrow,
    dy2sq_quadrature, dy2sq_small_a, PacketParams, QuadratureSpec,
};

fn main() -> popper_core::Result<()> {
    let q = QuadratureSpec::default();
    for t in [0.0, 0.2, 1.0] {
        let p = PacketParams::new(1.0, 3.0, 1.0, t)?;
        let c = delta_coeff(&p);
        println!(
            "t = {t}: narrow {:.6}, wide {:.6}, delta {:.6}, delta' {:.6}, flip at t = {:.4}",
            dk2sq_narrow(&p).value,
            dk2sq_wide(&p).value,
            c.delta,
            c.delta_prime,
            c.sign_flip_time
        );
        println!(
            "{:>8} {:>12} {:>12} {:>12} {:>12}",
            "a", "dk2 quad", "dk2 small-a", "dy2 quad", "dy2 small-a"
        );
        for a in [0.01, 0.05, 0.1, 0.3] {
            println!(
                "{a:>8} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
                dk2sq_quadrature(a, &p, &q)?.value,
                dk2sq_small_a(a, &p)?.value,
                dy2sq_quadrature(a, &p, &q)?.value,
                dy2sq_small_a(a, &p)?.value,
            );
        }
        println!("  dy2 narrow {:.8}", dy2sq_narrow(&p).value);
    }
    Ok(())
}
