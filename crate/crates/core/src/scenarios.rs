//! The two experimental cases and parameter sweeps over every method.
//!
//! Case (ii): the left slit narrows while the right side stays open; the
//! right particle's momentum spread is read off in coincidence.
//! Case (i): a real right slit of half-width b is inserted as well; its effect
//! on the momentum spread is measured within a finite detector band.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::closed_form::{
    delta_coeff, dk2sq_narrow, dk2sq_small_a, dk2sq_wide, dy2sq_narrow, dy2sq_small_a, Method,
    SlitHalfWidth, SpreadEstimate, Warning,
};
use crate::error::{positive, Error, Result};
use crate::montecarlo::{mc_estimate, McMode, McSpec};
use crate::oracle::{
    dk2sq_quadrature, dy2sq_quadrature, even_second_moment, k2_moments, momentum_features,
    PositionKernel, INV_SQRT_2PI,
};
use crate::params::PacketParams;
use crate::quadrature::{integrate, panels, QuadratureSpec, Tolerance};
use crate::special::gaussian_window;

/// Half-widths of the left slit (a) and the right slit (b, `None` when absent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitConfig {
    a: f64,
    b: Option<f64>,
}

impl SlitConfig {
    pub fn new(a: f64, b: Option<f64>) -> Result<Self> {
        positive("a", a)?;
        let b = match b {
            Some(b) if b == f64::INFINITY => None,
            Some(b) => Some(positive("b", b)?),
            None => None,
        };
        Ok(Self { a, b })
    }

    pub fn left_half_width(&self) -> f64 {
        self.a
    }

    pub fn right_half_width(&self) -> Option<f64> {
        self.b
    }
}

/// Accepted momentum range |k₂| ≤ k_max of the right detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorBand {
    k_max: f64,
}

impl DetectorBand {
    pub fn new(k_max: f64) -> Result<Self> {
        Ok(Self {
            k_max: positive("k_max", k_max)?,
        })
    }

    /// Ten narrow-slit standard deviations.
    pub fn default_for(p: &PacketParams) -> Self {
        Self {
            k_max: 10.0 * dk2sq_narrow(p).value.sqrt(),
        }
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }
}

/// A method that failed at one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub column: &'static str,
    pub error: Error,
}

/// One grid point, every requested method side by side. Absent values are
/// methods that were not requested, do not apply, or failed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub a: f64,
    pub b: Option<f64>,
    pub t: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub mass: f64,
    pub dk2sq_narrow: Option<f64>,
    pub dk2sq_small_a: Option<f64>,
    pub dk2sq_wide: Option<f64>,
    pub dk2sq_quadrature: Option<f64>,
    pub dk2sq_quadrature_err: Option<f64>,
    pub dk2sq_mc: Option<f64>,
    pub dk2sq_mc_err: Option<f64>,
    pub dy2sq_narrow: Option<f64>,
    pub dy2sq_small_a: Option<f64>,
    pub dy2sq_quadrature: Option<f64>,
    pub dy2sq_quadrature_err: Option<f64>,
    pub dy2sq_mc: Option<f64>,
    pub dy2sq_mc_err: Option<f64>,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
    pub failures: Vec<CellFailure>,
}

impl SweepRow {
    fn blank(a: f64, b: Option<f64>, p: &PacketParams) -> Self {
        Self {
            a,
            b,
            t: p.time(),
            sigma_plus: p.sigma_plus(),
            sigma_minus: p.sigma_minus(),
            mass: p.mass(),
            ..Default::default()
        }
    }

    pub fn params(&self) -> Result<PacketParams> {
        PacketParams::new(self.sigma_plus, self.sigma_minus, self.mass, self.t)
    }

    fn flag(&mut self, f: impl ToString) {
        let f = f.to_string();
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    fn absorb(&mut self, est: &SpreadEstimate) {
        for w in &est.warnings {
            self.flag(w);
        }
    }

    fn fail(&mut self, column: &'static str, error: Error) {
        self.flag(format!("{column}_failed"));
        self.failures.push(CellFailure { column, error });
    }

    /// Records an estimate into (value, error) cells or the failure list.
    fn record(
        &mut self,
        column: &'static str,
        result: Result<SpreadEstimate>,
    ) -> Option<(f64, f64)> {
        match result {
            Ok(est) => {
                self.absorb(&est);
                Some((est.value, est.error_estimate))
            }
            Err(e) => {
                self.fail(column, e);
                None
            }
        }
    }

    /// Small-a expansions can turn negative far outside their regime; such
    /// values are dropped rather than reported.
    fn expansion(&mut self, result: Result<SpreadEstimate>) -> Option<f64> {
        let est = result.ok()?;
        self.absorb(&est);
        (est.value >= 0.0).then_some(est.value)
    }
}

/// Result of [`run_case_ii`].
#[derive(Debug, Clone, PartialEq)]
pub struct CaseIiReport {
    pub rows: Vec<SweepRow>,
    /// Quadrature column non-increasing in a, up to 1e-9 absolute.
    pub monotone_non_increasing: bool,
    pub notes: Vec<String>,
}

const MONOTONE_SLACK: f64 = 1e-9;

/// Case (ii): momentum spread of the right particle against the left slit
/// half-width, right side open.
pub fn run_case_ii(widths: &[f64], p: &PacketParams, q: &QuadratureSpec) -> Result<CaseIiReport> {
    if widths.is_empty() {
        return Err(Error::Domain {
            field: "widths",
            value: 0.0,
            reason: "at least one slit half-width is required",
        });
    }
    for &a in widths {
        positive("a", a)?;
    }
    if let Some(w) = widths.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain {
            field: "widths",
            value: w[1],
            reason: "slit half-widths must be strictly increasing",
        });
    }
    q.validate()?;

    let narrow = dk2sq_narrow(p).value;
    let wide = dk2sq_wide(p).value;
    let rows: Vec<SweepRow> = widths
        .par_iter()
        .map(|&a| {
            let mut row = SweepRow::blank(a, None, p);
            row.dk2sq_narrow = Some(narrow);
            row.dk2sq_wide = Some(wide);
            row.dk2sq_small_a = row.expansion(dk2sq_small_a(a, p));
            if let Some((v, e)) = row.record("dk2sq_quadrature", dk2sq_quadrature(a, p, q)) {
                row.dk2sq_quadrature = Some(v);
                row.dk2sq_quadrature_err = Some(e);
            }
            row
        })
        .collect();

    let column: Vec<f64> = rows.iter().filter_map(|r| r.dk2sq_quadrature).collect();
    let monotone_non_increasing = column.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);

    let mut notes = Vec::new();
    let c = delta_coeff(p);
    if c.delta < 0.0 {
        notes.push(format!(
            "t = {} is past the sign flip of delta at t = {}: for small a the spread grows \
             with a (inverted slope)",
            p.time(),
            c.sign_flip_time
        ));
        let a0 = 1e-2 * p.effective_y_width();
        if let (Ok(x), Ok(y)) = (dk2sq_quadrature(a0, p, q), dk2sq_quadrature(2.0 * a0, p, q)) {
            notes.push(format!(
                "quadrature at a = {a0} and {}: {} -> {} ({})",
                2.0 * a0,
                x.value,
                y.value,
                if y.value > x.value {
                    "increasing, confirms inverted slope"
                } else {
                    "not increasing"
                }
            ));
        }
    }
    if !monotone_non_increasing {
        notes.push("quadrature column is not monotone non-increasing in a".to_string());
    }
    Ok(CaseIiReport {
        rows,
        monotone_non_increasing,
        notes,
    })
}

/// Result of [`run_case_i`].
#[derive(Debug, Clone, PartialEq)]
pub struct CaseIReport {
    pub a: f64,
    pub band: DetectorBand,
    /// (Δy₂)² at the right-screen plane with only the left slit.
    pub dy2sq: SpreadEstimate,
    /// Band-limited (Δk₂)² behind a right slit with b = a.
    pub with_right_slit: SpreadEstimate,
    /// Band-limited (Δk₂)² with the right slit removed.
    pub without_right_slit: SpreadEstimate,
    pub right_slit_broadens: bool,
}

/// Case (i): compare the right particle's momentum spread with and without a
/// real right slit of the same width as the left one.
pub fn run_case_i(
    a: f64,
    p: &PacketParams,
    band: DetectorBand,
    q: &QuadratureSpec,
) -> Result<CaseIReport> {
    positive("a", a)?;
    let dy2sq = dy2sq_quadrature(a, p, q)?;
    let with_right_slit = post_slit_k2_spread(a, Some(a), band, p, q)?;
    let without_right_slit = post_slit_k2_spread(a, None, band, p, q)?;
    let right_slit_broadens = with_right_slit.value > without_right_slit.value;
    Ok(CaseIReport {
        a,
        band,
        dy2sq,
        with_right_slit,
        without_right_slit,
        right_slit_broadens,
    })
}

/// Momentum amplitude of the right particle behind a right slit |y₂| ≤ b, in
/// coincidence with the left particle passing |y₁| ≤ a.
pub fn post_slit_amplitude(
    k2: f64,
    a: f64,
    b: f64,
    p: &PacketParams,
    tol: Tolerance,
) -> Result<Complex64> {
    positive("a", a)?;
    positive("b", b)?;
    let kernel = PositionKernel::new(p)?;
    post_slit_amplitude_with(&kernel, k2, a, b, tol)
}

fn post_slit_amplitude_with(
    kernel: &PositionKernel,
    k2: f64,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Complex64> {
    let mut failure = None;
    let r = integrate(
        |y1| {
            // ∫₋ᵦᵇ Ψ(y₁, y₂) e^{−i k₂ y₂} dy₂ in closed form
            let linear = -kernel.half_diff * y1 - Complex64::new(0.0, k2);
            let shift = -kernel.quarter_sum * y1 * y1;
            match gaussian_window(kernel.quarter_sum, linear, -b, b, shift) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::default()
                }
            }
        },
        &panels(-a, a, 4, &[]),
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::Convergence {
            estimate: r.value.norm(),
            error_bound: r.error,
            subdivisions: r.subdivisions,
        });
    }
    Ok(kernel.prefactor * r.value * INV_SQRT_2PI)
}

/// Band-limited (Δk₂)² of the right particle after sharp apertures |y₁| ≤ a
/// and |y₂| ≤ b, normalized within |k₂| ≤ k_max. With `b = None` this is
/// the open-right-side spread restricted to the band.
///
/// A sharp right slit gives the spectrum 1/k₂² tails, so for finite b the
/// value grows without bound as k_max does; such estimates carry
/// [`Warning::BandDependent`].
pub fn post_slit_k2_spread(
    a: f64,
    b: Option<f64>,
    band: DetectorBand,
    p: &PacketParams,
    q: &QuadratureSpec,
) -> Result<SpreadEstimate> {
    let slits = SlitConfig::new(a, b)?;
    q.validate()?;
    let k_max = band.k_max();
    let moments = match slits.right_half_width() {
        None => k2_moments(a, p, k_max, q)?,
        Some(b) => {
            let kernel = PositionKernel::new(p)?;
            let inner = Tolerance {
                relative: (q.relative_tolerance * 1e-2).max(1e-14),
                absolute: 1e-300,
                max_subdivisions: q.max_subdivisions,
            };
            let mut features = momentum_features(p);
            features.extend((1..=8).map(|n| n as f64 * std::f64::consts::PI / b));
            even_second_moment(
                |k2| post_slit_amplitude_with(&kernel, k2, a, b, inner).map(|v| v.norm_sqr()),
                k_max,
                p.effective_k_width(),
                &features,
                q,
            )?
        }
    };
    let mut est = SpreadEstimate::closed(
        moments.variance,
        Method::Quadrature,
        p,
        SlitHalfWidth::Finite(a),
    );
    est.error_estimate = moments.error;
    if slits.right_half_width().is_some() {
        est.warnings.push(Warning::BandDependent);
    }
    Ok(est)
}

/// Cartesian grid of sweep parameters. `b` entries of `None` mean no right slit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub a: Vec<f64>,
    pub b: Vec<Option<f64>>,
    pub t: Vec<f64>,
    pub sigma_plus: Vec<f64>,
    pub sigma_minus: Vec<f64>,
    pub mass: Vec<f64>,
}

impl SweepGrid {
    /// Single-valued grid over one parameter set and slit.
    pub fn point(a: f64, b: Option<f64>, p: &PacketParams) -> Self {
        Self {
            a: vec![a],
            b: vec![b],
            t: vec![p.time()],
            sigma_plus: vec![p.sigma_plus()],
            sigma_minus: vec![p.sigma_minus()],
            mass: vec![p.mass()],
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
            * self.b.len()
            * self.t.len()
            * self.sigma_plus.len()
            * self.sigma_minus.len()
            * self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells in lexicographic order over (a, b, t, σ₊, σ₋, m), a slowest.
    pub fn cells(&self) -> Result<Vec<(SlitConfig, PacketParams)>> {
        let mut out = Vec::with_capacity(self.len());
        for &a in &self.a {
            for &b in &self.b {
                let slit = SlitConfig::new(a, b)?;
                for &t in &self.t {
                    for &sp in &self.sigma_plus {
                        for &sm in &self.sigma_minus {
                            for &m in &self.mass {
                                out.push((slit, PacketParams::new(sp, sm, m, t)?));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// What a sweep computes at each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub methods: Vec<Method>,
    pub quadrature: QuadratureSpec,
    /// Required when `methods` contains [`Method::MonteCarlo`]; its mode is
    /// ignored, both modes are run.
    pub mc: Option<McSpec>,
    /// Detector band for cells with a right slit; defaults per cell.
    pub band: Option<DetectorBand>,
    /// Fill the dk2sq columns.
    pub momentum: bool,
    /// Fill the dy2sq columns.
    pub position: bool,
}

impl SweepPlan {
    pub fn new(methods: Vec<Method>, quadrature: QuadratureSpec) -> Self {
        Self {
            methods,
            quadrature,
            mc: None,
            band: None,
            momentum: true,
            position: true,
        }
    }

    fn wants(&self, m: Method) -> bool {
        self.methods.contains(&m)
    }
}

/// Evaluates every requested method at every grid cell. Rows come back in
/// grid order; failures are recorded per cell and never abort the sweep.
///
/// With a right slit present only the band-limited quadrature momentum spread
/// applies (flag `post_slit_band`); the position columns always describe the
/// right-screen plane with the left slit only.
pub fn sweep(grid: &SweepGrid, plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Domain {
            field: "grid",
            value: 0.0,
            reason: "every grid axis needs at least one value",
        });
    }
    if plan.methods.is_empty() {
        return Err(Error::Domain {
            field: "methods",
            value: 0.0,
            reason: "at least one method is required",
        });
    }
    plan.quadrature.validate()?;
    if plan.wants(Method::MonteCarlo) {
        match &plan.mc {
            Some(mc) => mc.validate()?,
            None => {
                return Err(Error::Domain {
                    field: "mc",
                    value: 0.0,
                    reason: "monte-carlo requested without a sample specification",
                })
            }
        }
    }
    let cells = grid.cells()?;
    Ok(cells
        .par_iter()
        .map(|(slit, p)| evaluate_cell(slit, p, plan))
        .collect())
}

fn evaluate_cell(slit: &SlitConfig, p: &PacketParams, plan: &SweepPlan) -> SweepRow {
    let mut row = SweepRow::blank(slit.left_half_width(), slit.right_half_width(), p);
    if p.unusual_ordering() {
        row.flag(Warning::UnusualOrdering);
    }

    if plan.position {
        evaluate_position(&mut row, p, plan);
    }
    if plan.momentum {
        evaluate_momentum(&mut row, p, plan);
    }
    row
}

fn evaluate_position(row: &mut SweepRow, p: &PacketParams, plan: &SweepPlan) {
    let a = row.a;
    let q = &plan.quadrature;
    if plan.wants(Method::ClosedNarrow) {
        row.dy2sq_narrow = Some(dy2sq_narrow(p).value);
    }
    if plan.wants(Method::ClosedSmallA) {
        row.dy2sq_small_a = row.expansion(dy2sq_small_a(a, p));
    }
    if plan.wants(Method::Quadrature) {
        if let Some((v, e)) = row.record("dy2sq_quadrature", dy2sq_quadrature(a, p, q)) {
            row.dy2sq_quadrature = Some(v);
            row.dy2sq_quadrature_err = Some(e);
        }
    }
    if let (true, Some(mc)) = (plan.wants(Method::MonteCarlo), plan.mc) {
        let spec = McSpec {
            mode: McMode::PositionSpread,
            ..mc
        };
        if let Some((v, e)) = row.record("dy2sq_mc", mc_estimate(a, p, &spec)) {
            row.dy2sq_mc = Some(v);
            row.dy2sq_mc_err = Some(e);
        }
    }
}

fn evaluate_momentum(row: &mut SweepRow, p: &PacketParams, plan: &SweepPlan) {
    let (a, b) = (row.a, row.b);
    let q = &plan.quadrature;
    if b.is_some() {
        if plan.wants(Method::Quadrature) {
            let band = plan.band.unwrap_or_else(|| DetectorBand::default_for(p));
            row.flag("post_slit_band");
            if let Some((v, e)) =
                row.record("dk2sq_quadrature", post_slit_k2_spread(a, b, band, p, q))
            {
                row.dk2sq_quadrature = Some(v);
                row.dk2sq_quadrature_err = Some(e);
            }
        }
        return;
    }

    if plan.wants(Method::ClosedNarrow) {
        row.dk2sq_narrow = Some(dk2sq_narrow(p).value);
    }
    if plan.wants(Method::ClosedSmallA) {
        row.dk2sq_small_a = row.expansion(dk2sq_small_a(a, p));
    }
    if plan.wants(Method::ClosedWide) {
        row.dk2sq_wide = Some(dk2sq_wide(p).value);
    }
    if plan.wants(Method::Quadrature) {
        if let Some((v, e)) = row.record("dk2sq_quadrature", dk2sq_quadrature(a, p, q)) {
            row.dk2sq_quadrature = Some(v);
            row.dk2sq_quadrature_err = Some(e);
        }
    }
    if let (true, Some(mc)) = (plan.wants(Method::MonteCarlo), plan.mc) {
        let spec = McSpec {
            mode: McMode::MomentumSpread,
            ..mc
        };
        if let Some((v, e)) = row.record("dk2sq_mc", mc_estimate(a, p, &spec)) {
            row.dk2sq_mc = Some(v);
            row.dk2sq_mc_err = Some(e);
        }
    }
}

/// Rows for a case (i) run in sweep form: the right slit at b = a, then
/// removed. The momentum column holds the band-limited post-slit spread.
pub fn case_i_rows(report: &CaseIReport) -> Vec<SweepRow> {
    [
        (Some(report.a), &report.with_right_slit),
        (None, &report.without_right_slit),
    ]
    .into_iter()
    .map(|(b, est)| {
        let mut row = SweepRow::blank(report.a, b, &est.params);
        row.dk2sq_quadrature = Some(est.value);
        row.dk2sq_quadrature_err = Some(est.error_estimate);
        row.dy2sq_narrow = Some(dy2sq_narrow(&est.params).value);
        row.dy2sq_quadrature = Some(report.dy2sq.value);
        row.dy2sq_quadrature_err = Some(report.dy2sq.error_estimate);
        row.flag("post_slit_band");
        row.absorb(est);
        row
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(sp: f64, sm: f64, t: f64) -> PacketParams {
        PacketParams::new(sp, sm, 1.0, t).unwrap()
    }

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn slit_config_validation() {
        assert!(SlitConfig::new(0.0, None).is_err());
        assert!(SlitConfig::new(1.0, Some(-1.0)).is_err());
        assert_eq!(
            SlitConfig::new(1.0, Some(f64::INFINITY))
                .unwrap()
                .right_half_width(),
            None
        );
        assert!(DetectorBand::new(0.0).is_err());
    }

    #[test]
    fn case_ii_endpoints_and_monotone() {
        let p = params(1.0, 3.0, 0.0);
        let r = run_case_ii(&log_grid(0.01, 5.0, 12), &p, &QuadratureSpec::default()).unwrap();
        let first = r.rows.first().unwrap().dk2sq_quadrature.unwrap();
        let last = r.rows.last().unwrap().dk2sq_quadrature.unwrap();
        assert!((first - 2.5).abs() < 2e-3, "{first}");
        assert!((last - 0.9).abs() < 2e-2, "{last}");
        assert!(r.monotone_non_increasing);
        assert!(r.notes.is_empty());
    }

    #[test]
    fn case_ii_factorized_is_flat() {
        let p = params(1.0, 1.0, 0.0);
        let r = run_case_ii(&[0.01, 0.1, 1.0, 10.0], &p, &QuadratureSpec::default()).unwrap();
        for row in &r.rows {
            assert!((row.dk2sq_quadrature.unwrap() - 0.5).abs() < 1e-8);
        }
        assert!(r.monotone_non_increasing);
    }

    #[test]
    fn case_ii_past_sign_flip_notes_inverted_slope() {
        let p = params(1.0, 3.0, 1.0);
        let r = run_case_ii(&[0.05, 0.1], &p, &QuadratureSpec::default()).unwrap();
        assert!(r
            .notes
            .iter()
            .any(|n| n.contains("confirms inverted slope")));
        assert!(!r.monotone_non_increasing);
    }

    #[test]
    fn case_ii_rejects_unsorted_widths() {
        let p = params(1.0, 3.0, 0.0);
        let q = QuadratureSpec::default();
        assert!(run_case_ii(&[], &p, &q).is_err());
        assert!(run_case_ii(&[0.2, 0.1], &p, &q).is_err());
        assert!(run_case_ii(&[0.1, 0.1], &p, &q).is_err());
    }

    #[test]
    fn open_right_side_matches_band_limited_oracle() {
        let p = params(1.0, 3.0, 0.5);
        let q = QuadratureSpec::default();
        let band = DetectorBand::new(3.0).unwrap();
        let open = post_slit_k2_spread(0.3, None, band, &p, &q).unwrap();
        let oracle = crate::oracle::dk2sq_quadrature_band(0.3, &p, 3.0, &q).unwrap();
        assert_relative_eq!(open.value, oracle.value, max_relative = 1e-12);
        // A right slit far wider than the packet changes nothing either.
        let huge = post_slit_k2_spread(0.3, Some(40.0), band, &p, &q).unwrap();
        assert_relative_eq!(huge.value, oracle.value, max_relative = 1e-6);
        assert!(huge.has_warning(Warning::BandDependent));
        assert!(!open.has_warning(Warning::BandDependent));
    }

    #[test]
    fn post_slit_amplitude_without_truncation_is_slit_amplitude() {
        let p = params(0.7, 2.0, 0.9);
        for &k in &[0.0, 0.8, -2.1] {
            let direct = crate::oracle::slit_amplitude(k, 0.4, &p).unwrap();
            let via = post_slit_amplitude(k, 0.4, 60.0, &p, Tolerance::new(1e-13, 1e-300)).unwrap();
            assert!(
                (direct - via).norm() < 1e-10 * direct.norm(),
                "{direct} vs {via}"
            );
        }
    }

    #[test]
    fn right_slit_broadens_and_grows_with_band() {
        let p = params(1.0, 3.0, 0.5);
        let q = QuadratureSpec::default();
        let report = run_case_i(0.3, &p, DetectorBand::new(30.0).unwrap(), &q).unwrap();
        assert!(report.right_slit_broadens);
        let wider =
            post_slit_k2_spread(0.3, Some(0.3), DetectorBand::new(60.0).unwrap(), &p, &q).unwrap();
        assert!(wider.value > report.with_right_slit.value);
    }

    #[test]
    fn single_point_sweep_reproduces_ops() {
        let p = params(1.0, 3.0, 0.3);
        let q = QuadratureSpec::default();
        let plan = SweepPlan::new(
            vec![
                Method::ClosedNarrow,
                Method::ClosedSmallA,
                Method::ClosedWide,
                Method::Quadrature,
            ],
            q,
        );
        let rows = sweep(&SweepGrid::point(0.2, None, &p), &plan).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(
            r.dk2sq_quadrature,
            Some(dk2sq_quadrature(0.2, &p, &q).unwrap().value)
        );
        assert_eq!(
            r.dy2sq_quadrature,
            Some(dy2sq_quadrature(0.2, &p, &q).unwrap().value)
        );
        assert_eq!(r.dk2sq_narrow, Some(dk2sq_narrow(&p).value));
        assert_eq!(r.dk2sq_small_a, Some(dk2sq_small_a(0.2, &p).unwrap().value));
        assert!(r.dk2sq_mc.is_none() && r.failures.is_empty());
    }

    #[test]
    fn wide_column_constant_over_a() {
        let p = params(1.0, 3.0, 0.0);
        let mut grid = SweepGrid::point(0.1, None, &p);
        grid.a = vec![0.1, 1.0, 10.0];
        let rows = sweep(
            &grid,
            &SweepPlan::new(vec![Method::ClosedWide], QuadratureSpec::default()),
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.dk2sq_wide == rows[0].dk2sq_wide));
        assert_relative_eq!(rows[0].dk2sq_wide.unwrap(), 0.9, max_relative = 1e-14);
        assert!(rows.iter().all(|r| r.dk2sq_quadrature.is_none()));
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let p = params(1.0, 3.0, 0.0);
        let mut grid = SweepGrid::point(0.1, None, &p);
        grid.a = vec![0.1, 0.2];
        grid.t = vec![0.0, 0.5, 1.0];
        let rows = sweep(
            &grid,
            &SweepPlan::new(vec![Method::ClosedNarrow], QuadratureSpec::default()),
        )
        .unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.a, r.t)).collect();
        assert_eq!(
            keys,
            vec![
                (0.1, 0.0),
                (0.1, 0.5),
                (0.1, 1.0),
                (0.2, 0.0),
                (0.2, 0.5),
                (0.2, 1.0)
            ]
        );
    }

    #[test]
    fn failures_stay_in_their_cell() {
        let p = params(1.0, 3.0, 0.0);
        let mut grid = SweepGrid::point(1e-4, None, &p);
        grid.a = vec![1e-4, 0.5];
        let mut plan = SweepPlan::new(vec![Method::MonteCarlo], QuadratureSpec::default());
        plan.mc = Some(McSpec::new(1000, 1, McMode::PositionSpread).unwrap());
        let rows = sweep(&grid, &plan).unwrap();
        assert!(rows[0].dy2sq_mc.is_none());
        assert!(rows[0].flags.contains(&"dy2sq_mc_failed".to_string()));
        assert!(rows[1].dy2sq_mc.is_some() && rows[1].dk2sq_mc.is_some());
    }

    #[test]
    fn monte_carlo_needs_spec() {
        let p = params(1.0, 3.0, 0.0);
        let plan = SweepPlan::new(vec![Method::MonteCarlo], QuadratureSpec::default());
        assert!(sweep(&SweepGrid::point(0.3, None, &p), &plan).is_err());
    }

    #[test]
    fn right_slit_cells_only_carry_band_quadrature() {
        let p = params(1.0, 3.0, 0.5);
        let plan = SweepPlan::new(
            vec![Method::ClosedNarrow, Method::ClosedWide, Method::Quadrature],
            QuadratureSpec::default(),
        );
        let rows = sweep(&SweepGrid::point(0.3, Some(0.3), &p), &plan).unwrap();
        let r = &rows[0];
        assert!(r.dk2sq_narrow.is_none() && r.dk2sq_wide.is_none());
        assert!(r.dk2sq_quadrature.is_some() && r.dy2sq_quadrature.is_some());
        assert!(r.flags.contains(&"post_slit_band".to_string()));
        assert!(r.flags.contains(&"band_dependent".to_string()));
    }
}
