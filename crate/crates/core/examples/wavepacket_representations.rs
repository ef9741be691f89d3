//! The entangled state in momentum, mixed and position form, its free
//! spreading, and the normalization of each representation.

use popper_core::oracle::{heisenberg_product, total_probability, Representation};
use popper_core::{psi_mixed, psi_momentum, psi_position, PacketParams, QuadratureSpec};

fn main() -> popper_core::Result<()> {
    let q = QuadratureSpec::default();
    for t in [0.0, 0.5, 2.0] {
        let p = PacketParams::new(1.0, 3.0, 1.0, t)?;
        println!("t = {t}");
        println!("  psi(k1=1, k2=1)  = {:.6}", psi_momentum(1.0, 1.0, &p));
        println!("  psi(y1=0.2; k2=1) = {:.6}", psi_mixed(0.2, 1.0, &p)?);
        println!(
            "  psi(y1=0.2, y2=-0.2) = {:.6}",
            psi_position(0.2, -0.2, &p)?
        );
        println!(
            "  y-width {:.4}, k-width {:.4}",
            p.effective_y_width(),
            p.effective_k_width()
        );
        for rep in [
            Representation::Momentum,
            Representation::Mixed,
            Representation::Position,
        ] {
            println!(
                "  total probability ({rep:?}): {:.12}",
                total_probability(rep, &p, &q)?
            );
        }
    }
    // Gaussian source sits at the uncertainty minimum before it spreads.
    let p0 = PacketParams::new(1.0, 3.0, 1.0, 0.0)?;
    println!(
        "Heisenberg product at t = 0: {:.10}",
        heisenberg_product(&p0, &q)?
    );
    Ok(())
}
