//! Sampling estimates of both spreads next to the quadrature values.

use popper_core::{
    dk2sq_quadrature, dy2sq_quadrature, mc_estimate, mc_incoherent_position_spread, McMode, McSpec,
    PacketParams, QuadratureSpec,
};

fn main() -> popper_core::Result<()> {
    let q = QuadratureSpec::default();
    let n = 400_000;
    for (a, t) in [(0.3, 0.0), (0.3, 0.5), (1.0, 1.0)] {
        let p = PacketParams::new(1.0, 3.0, 1.0, t)?;
        let k = mc_estimate(a, &p, &McSpec::new(n, 1, McMode::MomentumSpread)?)?;
        let y = mc_estimate(a, &p, &McSpec::new(n, 1, McMode::PositionSpread)?)?;
        let kq = dk2sq_quadrature(a, &p, &q)?.value;
        let yq = dy2sq_quadrature(a, &p, &q)?.value;
        println!("a = {a}, t = {t}");
        println!(
            "  dk2sq: mc {:.5} +- {:.5}, quadrature {kq:.5}",
            k.value, k.error_estimate
        );
        println!(
            "  dy2sq: mc {:.5} +- {:.5}, quadrature {yq:.5}",
            y.value, y.error_estimate
        );
        let inc =
            mc_incoherent_position_spread(a, &p, &McSpec::new(n, 1, McMode::PositionSpread)?)?;
        println!(
            "  dy2sq if the slit acted on |psi|^2: {:.5} +- {:.5}",
            inc.value, inc.error_estimate
        );
    }
    Ok(())
}
