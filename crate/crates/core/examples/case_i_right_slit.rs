//! Case (i): a real right slit of the same width against no right slit,
//! within a finite detector band.

use popper_core::{run_case_i, DetectorBand, PacketParams, QuadratureSpec};

fn main() -> popper_core::Result<()> {
    let p = PacketParams::new(1.0, 3.0, 1.0, 0.5)?;
    let q = QuadratureSpec::default();
    let a = 0.3;
    // A sharp slit has heavy k2 tails, so the spread depends on the band.
    for k_max in [10.0, 30.0, 100.0] {
        let r = run_case_i(a, &p, DetectorBand::new(k_max)?, &q)?;
        println!(
            "k_max = {k_max:>5}: dy2sq {:.6} | dk2sq with b = a {:.6}, without {:.6}, broadens {}",
            r.dy2sq.value,
            r.with_right_slit.value,
            r.without_right_slit.value,
            r.right_slit_broadens
        );
    }
    Ok(())
}
