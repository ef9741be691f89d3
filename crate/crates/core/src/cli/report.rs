//! Plain-text run reports.

use std::fmt::Write;

use crate::closed_form::delta_coeff;
use crate::params::PacketParams;
use crate::scenarios::{CaseIReport, CaseIiReport, SweepRow};

pub const PROPENSITY_CASE_I: &str = "Popper propensity expectation (qualitative label, \
     not computed): with the right slit removed, no dispersion in k2 is induced by the left slit.";
pub const PROPENSITY_CASE_II: &str = "Popper propensity expectation (qualitative label, \
     not computed): narrowing the left slit does not widen the k2 dispersion.";

fn header(out: &mut String, title: &str, p: &PacketParams) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "sigma_plus = {}, sigma_minus = {}, mass = {}, t = {}",
        p.sigma_plus(),
        p.sigma_minus(),
        p.mass(),
        p.time()
    );
    let c = delta_coeff(p);
    let _ = writeln!(
        out,
        "delta = {}, delta_prime = {}, delta sign flip at t = {}",
        c.delta, c.delta_prime, c.sign_flip_time
    );
}

fn value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.10}"))
}

pub fn case_ii(report: &CaseIiReport, p: &PacketParams) -> String {
    let mut out = String::new();
    header(
        &mut out,
        "Case (ii): left slit narrowed, right side open",
        p,
    );
    let _ = writeln!(
        out,
        "{:>14} {:>16} {:>16}",
        "a", "dk2sq_quad", "dk2sq_small_a"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>14} {:>16} {:>16}",
            r.a,
            value(r.dk2sq_quadrature),
            value(r.dk2sq_small_a)
        );
    }
    if let Some(r) = report.rows.first() {
        let _ = writeln!(
            out,
            "narrow-slit limit {}, wide-slit limit {}",
            value(r.dk2sq_narrow),
            value(r.dk2sq_wide)
        );
    }
    let _ = writeln!(
        out,
        "quantum prediction: dk2sq monotone non-increasing in a: {}",
        report.monotone_non_increasing
    );
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "{PROPENSITY_CASE_II}");
    out
}

pub fn case_i(report: &CaseIReport, p: &PacketParams) -> String {
    let mut out = String::new();
    header(&mut out, "Case (i): right slit inserted versus removed", p);
    let _ = writeln!(
        out,
        "a = {}, detector band |k2| <= {}",
        report.a,
        report.band.k_max()
    );
    let _ = writeln!(
        out,
        "dy2sq at the right screen (left slit only): {:.10}",
        report.dy2sq.value
    );
    let _ = writeln!(
        out,
        "dk2sq with right slit b = a:   {:.10}",
        report.with_right_slit.value
    );
    let _ = writeln!(
        out,
        "dk2sq with right slit removed: {:.10}",
        report.without_right_slit.value
    );
    let _ = writeln!(
        out,
        "quantum prediction: right slit broadens k2: {}",
        report.right_slit_broadens
    );
    let _ = writeln!(
        out,
        "note: with a sharp right slit the k2 spread grows with the detector band"
    );
    let _ = writeln!(out, "{PROPENSITY_CASE_I}");
    out
}

pub fn rows(title: &str, rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}: {} row(s)", rows.len());
    for r in rows {
        let b = r.b.map_or_else(|| "inf".to_string(), |b| b.to_string());
        let _ = writeln!(
            out,
            "a = {}, b = {b}, t = {}, sigma = ({}, {}), m = {}: dk2sq quad {} narrow {} | dy2sq quad {} narrow {}",
            r.a,
            r.t,
            r.sigma_plus,
            r.sigma_minus,
            r.mass,
            value(r.dk2sq_quadrature),
            value(r.dk2sq_narrow),
            value(r.dy2sq_quadrature),
            value(r.dy2sq_narrow),
        );
        for f in &r.failures {
            let _ = writeln!(out, "  {} failed: {}", f.column, f.error);
        }
    }
    out
}
