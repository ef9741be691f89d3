//! The same state written in Qureshi's (Omega0, sigma) variables.

use popper_core::{dk2sq_narrow, dk2sq_wide, from_qureshi, to_qureshi};

fn main() -> popper_core::Result<()> {
    for (omega0, sigma) in [(1.0, 1.5), (0.5, 3.0), (2.0, 0.5)] {
        let p = from_qureshi(omega0, sigma, 1.0, 0.0)?;
        let back = to_qureshi(&p);
        println!(
            "Omega0 = {omega0}, sigma = {sigma} -> sigma+ = {:.4}, sigma- = {:.4} (back: {:?}); narrow {:.4}, wide {:.4}",
            p.sigma_plus(),
            p.sigma_minus(),
            back,
            dk2sq_narrow(&p).value,
            dk2sq_wide(&p).value
        );
    }
    Ok(())
}
