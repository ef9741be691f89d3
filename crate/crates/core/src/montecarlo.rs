//! Monte Carlo estimates of the coincidence spreads, statistically independent
//! of the quadrature oracle.
//!
//! Draws are split into [`JACKKNIFE_GROUPS`] groups. Group `g` uses a ChaCha20
//! generator seeded from the [`McSpec`] seed with stream id `g`, and groups are
//! reduced in index order, so an estimate depends only on the seed and the
//! spec, never on the thread count.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::closed_form::{Method, SlitHalfWidth, SpreadEstimate};
use crate::error::{positive, Error, Result};
use crate::oracle::MixedKernel;
use crate::params::PacketParams;
use crate::wavepacket::PositionPrecision;

/// Number of groups used for both seeding and the jackknife error.
pub const JACKKNIFE_GROUPS: usize = 100;
/// Fewest accepted samples for which an estimate is returned.
pub const MIN_ACCEPTED: usize = 100;
const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    /// (Δy₂)² at the right screen.
    PositionSpread,
    /// (Δk₂)² of the right particle.
    MomentumSpread,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSpec {
    pub sample_count: usize,
    pub seed: u64,
    pub mode: McMode,
}

impl McSpec {
    pub fn new(sample_count: usize, seed: u64, mode: McMode) -> Result<Self> {
        let s = Self {
            sample_count,
            seed,
            mode,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < MIN_SAMPLES {
            return Err(Error::Domain {
                field: "sample_count",
                value: self.sample_count as f64,
                reason: "at least 1000 samples are required",
            });
        }
        Ok(())
    }

    fn group_size(&self, g: usize) -> usize {
        let base = self.sample_count / JACKKNIFE_GROUPS;
        base + usize::from(g < self.sample_count % JACKKNIFE_GROUPS)
    }

    fn rng(&self, g: usize) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(g as u64);
        rng
    }
}

/// Weighted power sums of one group.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    accepted: usize,
    w: f64,
    wx: f64,
    wxx: f64,
}

impl Sums {
    fn add(&mut self, x: f64, weight: f64) {
        self.accepted += 1;
        self.w += weight;
        self.wx += weight * x;
        self.wxx += weight * x * x;
    }

    fn merge(self, o: Sums) -> Sums {
        Sums {
            accepted: self.accepted + o.accepted,
            w: self.w + o.w,
            wx: self.wx + o.wx,
            wxx: self.wxx + o.wxx,
        }
    }

    fn minus(self, o: Sums) -> Sums {
        Sums {
            accepted: self.accepted - o.accepted,
            w: self.w - o.w,
            wx: self.wx - o.wx,
            wxx: self.wxx - o.wxx,
        }
    }

    fn variance(&self) -> f64 {
        let mean = self.wx / self.w;
        self.wxx / self.w - mean * mean
    }
}

fn run_groups<F>(spec: &McSpec, draw: F) -> Vec<Sums>
where
    F: Fn(&mut ChaCha20Rng, &mut Sums) + Sync,
{
    (0..JACKKNIFE_GROUPS)
        .into_par_iter()
        .map(|g| {
            let mut rng = spec.rng(g);
            let mut sums = Sums::default();
            for _ in 0..spec.group_size(g) {
                draw(&mut rng, &mut sums);
            }
            sums
        })
        .collect()
}

fn jackknife(groups: &[Sums], spec: &McSpec, a: f64, p: &PacketParams) -> Result<SpreadEstimate> {
    let total = groups.iter().fold(Sums::default(), |acc, s| acc.merge(*s));
    if total.accepted < MIN_ACCEPTED || total.w <= 0.0 {
        return Err(Error::Statistics {
            accepted: total.accepted,
            drawn: spec.sample_count,
            required: MIN_ACCEPTED,
        });
    }
    let value = total.variance();
    let leave_out: Vec<f64> = groups.iter().map(|s| total.minus(*s).variance()).collect();
    let n = leave_out.len() as f64;
    let mean = leave_out.iter().sum::<f64>() / n;
    let spread = leave_out.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    let mut est = SpreadEstimate::closed(value, Method::MonteCarlo, p, SlitHalfWidth::Finite(a));
    est.error_estimate = ((n - 1.0) / n * spread).sqrt();
    Ok(est)
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Monte Carlo estimate of the coincidence spread selected by `spec.mode`.
///
/// Position mode samples the coherent window density
/// |∫₋ₐ⁺ᵃ Ψ(y₁, y₂) dy₁|² by drawing replica triples (y₁, y₁′, y₂) from the
/// Gaussian |Ψ(y₁, y₂)||Ψ(y₁′, y₂)|, keeping those with both y₁, y₁′ inside the
/// slit and weighting by the cosine of the phase difference. At t = 0 every
/// weight is 1.
///
/// Momentum mode tabulates |slit_amplitude(k₂)|² on an adaptive piecewise
/// linear grid and samples it by inverse CDF.
pub fn mc_estimate(a: f64, p: &PacketParams, spec: &McSpec) -> Result<SpreadEstimate> {
    positive("a", a)?;
    spec.validate()?;
    match spec.mode {
        McMode::PositionSpread => position_spread(a, p, spec),
        McMode::MomentumSpread => momentum_spread(a, p, spec),
    }
}

fn position_spread(a: f64, p: &PacketParams, spec: &McSpec) -> Result<SpreadEstimate> {
    let prec = PositionPrecision::of(p);
    let (cd, co) = (prec.diagonal, prec.off_diagonal);
    let y2_sd = (cd / (2.0 * (cd * cd - co * co))).sqrt();
    let y1_sd = 1.0 / cd.sqrt();
    let slope = -co / cd;
    let w = p.widths();
    let im_quarter_sum = 0.25 * w.sum().im;
    let im_half_diff = 0.5 * w.diff().im;

    let groups = run_groups(spec, |rng, sums| {
        let y2 = y2_sd * normal(rng);
        let centre = slope * y2;
        let y1 = centre + y1_sd * normal(rng);
        let y1r = centre + y1_sd * normal(rng);
        if y1.abs() <= a && y1r.abs() <= a {
            let phase = -im_quarter_sum * (y1 * y1 - y1r * y1r) - im_half_diff * y2 * (y1 - y1r);
            sums.add(y2, phase.cos());
        }
    });
    jackknife(&groups, spec, a, p)
}

/// Rejection estimate that applies the slit to |Ψ|² instead of Ψ. Differs from
/// the coherent spread whenever the state is entangled and t > 0.
pub fn mc_incoherent_position_spread(
    a: f64,
    p: &PacketParams,
    spec: &McSpec,
) -> Result<SpreadEstimate> {
    positive("a", a)?;
    spec.validate()?;
    let prec = PositionPrecision::of(p);
    let (cd, co) = (prec.diagonal, prec.off_diagonal);
    let y2_sd = prec.marginal_variance().sqrt();
    let y1_sd = 1.0 / (2.0 * cd).sqrt();
    let slope = -co / cd;
    let groups = run_groups(spec, |rng, sums| {
        let y2 = y2_sd * normal(rng);
        let y1 = slope * y2 + y1_sd * normal(rng);
        if y1.abs() <= a {
            sums.add(y2, 1.0);
        }
    });
    jackknife(&groups, spec, a, p)
}

/// Piecewise-linear tabulation of an even density on [0, upper].
#[derive(Debug, Clone)]
pub(crate) struct LinearTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

const TABLE_CELLS: usize = 256;
const TABLE_TOLERANCE: f64 = 1e-7;
const TABLE_MAX_NODES: usize = 1 << 20;

impl LinearTable {
    /// Refines cells until linear interpolation at every cell midpoint is
    /// within `TABLE_TOLERANCE` of the peak value.
    pub(crate) fn build<F>(f: F, upper: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let mut nodes: Vec<f64> = (0..=TABLE_CELLS)
            .map(|i| upper * i as f64 / TABLE_CELLS as f64)
            .collect();
        let mut values = nodes.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        let mut refine = true;
        while refine {
            let peak = values.iter().copied().fold(0.0, f64::max);
            refine = false;
            let mut next_nodes = Vec::with_capacity(nodes.len() * 2);
            let mut next_values = Vec::with_capacity(nodes.len() * 2);
            for i in 0..nodes.len() - 1 {
                next_nodes.push(nodes[i]);
                next_values.push(values[i]);
                let mid = 0.5 * (nodes[i] + nodes[i + 1]);
                let fm = f(mid)?;
                if (fm - 0.5 * (values[i] + values[i + 1])).abs() > TABLE_TOLERANCE * peak {
                    next_nodes.push(mid);
                    next_values.push(fm);
                    refine = true;
                }
            }
            next_nodes.push(*nodes.last().unwrap());
            next_values.push(*values.last().unwrap());
            nodes = next_nodes;
            values = next_values;
            if nodes.len() > TABLE_MAX_NODES {
                return Err(Error::Convergence {
                    estimate: peak,
                    error_bound: TABLE_TOLERANCE * peak,
                    subdivisions: nodes.len(),
                });
            }
        }
        let mut cumulative = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..nodes.len() - 1 {
            acc += 0.5 * (values[i] + values[i + 1]) * (nodes[i + 1] - nodes[i]);
            cumulative.push(acc);
        }
        Ok(Self {
            nodes,
            values,
            cumulative,
        })
    }

    pub(crate) fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Inverse CDF of the tabulated density for u in [0, 1).
    pub(crate) fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total();
        let i = self
            .cumulative
            .partition_point(|&c| c <= target)
            .clamp(1, self.nodes.len() - 1)
            - 1;
        let h = self.nodes[i + 1] - self.nodes[i];
        let f0 = self.values[i];
        let slope = (self.values[i + 1] - f0) / h;
        let r = target - self.cumulative[i];
        // Root of f0·s + slope·s²/2 = r, written to avoid cancellation.
        let disc = (f0 * f0 + 2.0 * slope * r).max(0.0);
        let denom = f0 + disc.sqrt();
        let s = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        self.nodes[i] + s.clamp(0.0, h)
    }
}

fn momentum_spread(a: f64, p: &PacketParams, spec: &McSpec) -> Result<SpreadEstimate> {
    let kernel = MixedKernel::new(p)?;
    let upper = 12.0 * p.effective_k_width();
    let table = LinearTable::build(|k| kernel.window(k, a).map(|v| v.norm_sqr()), upper)?;
    if table.total().is_nan() || table.total() <= 0.0 {
        return Err(Error::Statistics {
            accepted: 0,
            drawn: spec.sample_count,
            required: MIN_ACCEPTED,
        });
    }
    let groups = run_groups(spec, |rng, sums| {
        let u: f64 = rng.random();
        let k = table.quantile(u);
        let k = if rng.random::<bool>() { k } else { -k };
        sums.add(k, 1.0);
    });
    jackknife(&groups, spec, a, p)
}
