//! A small grid sweep written as CSV to standard output.

use popper_core::cli::emit_csv;
use popper_core::{sweep, Method, QuadratureSpec, SweepGrid, SweepPlan};

fn main() -> popper_core::Result<()> {
    let grid = SweepGrid {
        a: vec![0.05, 0.2, 1.0],
        b: vec![None],
        t: vec![0.0, 0.5],
        sigma_plus: vec![1.0],
        sigma_minus: vec![2.0, 3.0],
        mass: vec![1.0],
    };
    let plan = SweepPlan::new(
        vec![
            Method::ClosedNarrow,
            Method::ClosedSmallA,
            Method::ClosedWide,
            Method::Quadrature,
        ],
        QuadratureSpec::default(),
    );
    let rows = sweep(&grid, &plan)?;
    emit_csv(&rows, &mut std::io::stdout().lock())
        .map_err(|e| popper_core::Error::Io(e.to_string()))?;
    Ok(())
}
