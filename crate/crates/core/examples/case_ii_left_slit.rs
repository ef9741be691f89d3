//! Case (ii): narrow the left slit and watch the right particle's momentum
//! spread, with no slit on the right.

use popper_core::cli::parse_grid;
use popper_core::{delta_coeff, run_case_ii, PacketParams, QuadratureSpec};

fn main() -> popper_core::Result<()> {
    let widths = parse_grid("a-grid", "0.01:5:log:20")?;
    let flip = delta_coeff(&PacketParams::new(1.0, 3.0, 1.0, 0.0)?).sign_flip_time;
    for t in [0.0, 0.25, 2.0 * flip] {
        let p = PacketParams::new(1.0, 3.0, 1.0, t)?;
        let report = run_case_ii(&widths, &p, &QuadratureSpec::default())?;
        println!("t = {t:.4} (delta = {:+.5})", delta_coeff(&p).delta);
        for r in &report.rows {
            println!(
                "  a = {:<10.5} dk2sq = {:.8}",
                r.a,
                r.dk2sq_quadrature.unwrap_or(f64::NAN)
            );
        }
        println!(
            "  monotone non-increasing: {}",
            report.monotone_non_increasing
        );
        for n in &report.notes {
            println!("  note: {n}");
        }
    }
    Ok(())
}
