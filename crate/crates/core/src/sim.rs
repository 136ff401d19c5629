//! Monte-Carlo experiment engine. Flow-level simulation: each connection's
//! hops are Bernoulli trials under saturated interference (every same-color
//! cell transmits from a uniformly chosen node, resampled per hop), and
//! goodput is injection rate x slot share x end-to-end success.
//!
//! Everything is deterministic in (config, seed): each connection owns an RNG
//! stream derived from the master seed, so parallel and serial runs produce
//! identical reports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deployment::{assign_destinations, deploy, max_injection_rate, NodeSet};
use crate::error::{ConfigError, SimError};
use crate::phy::{compute_sinr, success_prob, LinkModel, PhyParams};
use crate::rng::RngStream;
use crate::routing::{random_valid_route, straight_line_route, Route};
use crate::scheduling::{build_pi1, build_pi2, Policy, Schedule, ScheduleParams};
use crate::tessellation::{build_tessellation, CellGeometry, RhoConvention, Tessellation};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoutingKind {
    Straight,
    ArbitraryRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LambdaMode {
    /// lambda_n = 1/(50 ln n), the sustainable per-node injection rate.
    MaxInjection,
    Fixed { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub n_grid: Vec<u64>,
    pub alpha: f64,
    pub link_model: LinkModel,
    pub policy: Policy,
    pub routing: RoutingKind,
    pub replications: u32,
    pub connections_per_replication: u32,
    pub seed: u64,
    pub lambda_mode: LambdaMode,
    pub c5: f64,
    pub epsilon: f64,
    pub pi1_range_mult: f64,
    pub rho_convention: RhoConvention,
    pub power: f64,
    pub noise: f64,
    /// pi2 only: override the required-SINR target recorded in reports.
    #[serde(default)]
    pub beta_n_override: Option<f64>,
    /// pi2 only: drop the leading 1 inside the exclusion-radius growth factor
    /// (the misprinted form); kept for negative tests.
    #[serde(default)]
    pub radius_misprint: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "config schema_version {} unsupported (expected {})",
                self.schema_version, CONFIG_SCHEMA_VERSION
            )));
        }
        if self.n_grid.is_empty() {
            return Err(ConfigError::Invalid("n_grid must be non-empty".into()));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(ConfigError::Invalid(
                "n_grid must be strictly ascending".into(),
            ));
        }
        if self.replications == 0 {
            return Err(ConfigError::Invalid("replications must be >= 1".into()));
        }
        if self.connections_per_replication == 0 {
            return Err(ConfigError::Invalid(
                "connections_per_replication must be >= 1".into(),
            ));
        }
        if !(self.alpha > 2.0) {
            return Err(ConfigError::Invalid(format!(
                "alpha must exceed 2, got {}",
                self.alpha
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if !(self.c5 > 0.0) {
            return Err(ConfigError::Invalid("c5 must be positive".into()));
        }
        if self.pi1_range_mult < 0.0 {
            return Err(ConfigError::Invalid(
                "pi1_range_mult must be non-negative".into(),
            ));
        }
        if let LambdaMode::Fixed { value } = self.lambda_mode {
            if !(value > 0.0) {
                return Err(ConfigError::Invalid(
                    "fixed lambda must be positive".into(),
                ));
            }
        }
        self.link_model.validate()?;
        if self.policy == Policy::Pi1 {
            if self.beta_n_override.is_some() {
                return Err(ConfigError::Invalid(
                    "beta_n_override applies only to policy pi2".into(),
                ));
            }
            if self.radius_misprint {
                return Err(ConfigError::Invalid(
                    "radius_misprint applies only to policy pi2".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NRecord {
    pub n: u64,
    pub replication: u32,
    pub error: Option<String>,
    pub cells: usize,
    pub k_colors: usize,
    pub fallback_per_cell: bool,
    pub rho_n: f64,
    pub lambda_n: f64,
    pub connections: u32,
    pub dropped_connections: u32,
    pub mean_success: f64,
    pub ci_half_width: f64,
    pub goodput: f64,
    pub mean_hops: f64,
    /// Fraction of simulated connections whose end-to-end loss probability
    /// exceeds the configured epsilon.
    pub loss_over_epsilon_frac: f64,
    /// Estimated peak relayed traffic through any one cell, packets/slot.
    pub max_cell_load: f64,
    /// Smallest c5 with max_cell_load <= c5 lambda_n sqrt(n ln n).
    pub fitted_c5: f64,
    pub occupancy_ok: bool,
}

impl NRecord {
    fn failed(n: u64, replication: u32, error: String) -> Self {
        Self {
            n,
            replication,
            error: Some(error),
            cells: 0,
            k_colors: 0,
            fallback_per_cell: false,
            rho_n: f64::NAN,
            lambda_n: f64::NAN,
            connections: 0,
            dropped_connections: 0,
            mean_success: f64::NAN,
            ci_half_width: f64::NAN,
            goodput: f64::NAN,
            mean_hops: f64::NAN,
            loss_over_epsilon_frac: f64::NAN,
            max_cell_load: f64::NAN,
            fitted_c5: f64::NAN,
            occupancy_ok: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub records: Vec<NRecord>,
    pub slope: Option<SlopeFit>,
}

#[derive(Debug, Clone)]
pub struct ConnectionOutcome {
    /// Bernoulli sample: every hop succeeded.
    pub success: bool,
    /// Product of per-hop success probabilities.
    pub success_prob: f64,
    pub hop_sinrs: Vec<f64>,
    pub hops: usize,
}

/// Simulate one end-to-end packet: per hop, saturate every same-color cell
/// with a uniformly chosen transmitter, compute the SINR, and draw success.
pub fn simulate_connection(
    r: &Route,
    s: &Schedule,
    lm: &LinkModel,
    pp: &PhyParams,
    ns: &NodeSet,
    t: &Tessellation,
    rng: &mut RngStream,
) -> ConnectionOutcome {
    let sp = t.sphere();
    let mut success = true;
    let mut success_prob_acc = 1.0;
    let mut hop_sinrs = Vec::with_capacity(r.num_hops());
    for i in 0..r.num_hops() {
        let tx = r.nodes[i];
        let rx = r.nodes[i + 1];
        let tx_cell = ns.cell_of[tx];
        let color = s.color_of[tx_cell];
        let mut interferers = Vec::new();
        for c in 0..t.num_cells() {
            if c == tx_cell || s.color_of[c] != color {
                continue;
            }
            let pool = &ns.nodes_in[c];
            if pool.is_empty() {
                continue;
            }
            let node = pool[rng.uniform_usize(pool.len())];
            interferers.push(ns.positions[node]);
        }
        let sinr = compute_sinr(&ns.positions[rx], &ns.positions[tx], &interferers, pp, sp)
            .unwrap_or(f64::INFINITY);
        hop_sinrs.push(sinr);
        let p = success_prob(sinr, lm);
        success_prob_acc *= p;
        if !rng.bernoulli(p) {
            success = false;
        }
    }
    ConnectionOutcome {
        success,
        success_prob: success_prob_acc,
        hop_sinrs,
        hops: r.num_hops(),
    }
}

/// Proportion mean with a 95% interval half-width; Wilson interval when the
/// normal approximation collapses at the boundary.
pub fn proportion_ci(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = 1.959963984540054f64;
    if successes == 0 || successes == trials {
        // Wilson interval; the normal half-width degenerates to 0 here.
        let z2 = z * z;
        let half = (z / (1.0 + z2 / n)) * ((p * (1.0 - p) + z2 / (4.0 * n)) / n).sqrt();
        return (p, half);
    }
    (p, z * (p * (1.0 - p) / n).sqrt())
}

struct ReplicationSetup {
    t: Tessellation,
    ns: NodeSet,
    sched: Schedule,
    lambda: f64,
    rho: f64,
}

fn build_replication(
    cfg: &ExperimentConfig,
    n: u64,
    rep: u32,
    root: &RngStream,
) -> Result<ReplicationSetup, SimError> {
    let nf = n as f64;
    let sp = crate::SphereParams::from_area(nf)
        .map_err(|e| ConfigError::Invalid(e.to_string()))
        .map_err(SimError::from)?;
    let cg = CellGeometry::new(nf, &cfg.rho_convention)?;
    let mut trng = root.derive(&[n, rep as u64, 0]);
    let t = build_tessellation(&sp, &cg, &mut trng)?;
    let ns = deploy(n as usize, &t, &mut root.derive(&[n, rep as u64, 1]));
    let sched = match cfg.policy {
        Policy::Pi1 => build_pi1(
            &t,
            &ScheduleParams {
                pi1_range_mult: cfg.pi1_range_mult,
            },
        )?,
        Policy::Pi2 => {
            let mut s = build_pi2(&t, nf, cfg.alpha)?;
            if cfg.radius_misprint {
                // Misprinted growth factor lacks the leading 1: shrink the
                // radius accordingly and recheck the fallback condition.
                let r = s.exclusion_radius - 2.0 * cg.rho_n;
                s = if r >= sp.half_circumference() {
                    s
                } else {
                    let adj = rebuild_pi2_at_radius(&t, r);
                    adj
                };
            }
            s
        }
    };
    let lambda = match cfg.lambda_mode {
        LambdaMode::MaxInjection => max_injection_rate(nf)?,
        LambdaMode::Fixed { value } => value,
    };
    Ok(ReplicationSetup {
        t,
        ns,
        sched,
        lambda,
        rho: cg.rho_n,
    })
}

fn rebuild_pi2_at_radius(t: &Tessellation, radius: f64) -> Schedule {
    // Same greedy coloring pi2 uses, at an explicitly given radius.
    let m = t.num_cells();
    let mut adj = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            if t.cell_distance(i, j) <= radius {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| adj[b].len().cmp(&adj[a].len()).then(a.cmp(&b)));
    let mut color_of = vec![usize::MAX; m];
    let mut num_colors = 0usize;
    for &v in &order {
        let mut used = vec![false; num_colors + 1];
        for &u in &adj[v] {
            if color_of[u] != usize::MAX {
                used[color_of[u]] = true;
            }
        }
        let c = used.iter().position(|&b| !b).unwrap();
        color_of[v] = c;
        num_colors = num_colors.max(c + 1);
    }
    Schedule {
        policy: Policy::Pi2,
        color_of,
        num_colors,
        exclusion_radius: radius,
        fallback_per_cell: false,
    }
}

fn run_replication(cfg: &ExperimentConfig, n: u64, rep: u32) -> Result<NRecord, SimError> {
    let root = RngStream::new(cfg.seed);
    let setup = build_replication(cfg, n, rep, &root)?;
    let ReplicationSetup {
        t,
        ns,
        sched,
        lambda,
        rho,
    } = setup;
    let tm = assign_destinations(&ns, &mut root.derive(&[n, rep as u64, 2]));
    let pp = PhyParams {
        power_p: cfg.power,
        noise_n: cfg.noise,
        alpha: cfg.alpha,
        beta_threshold: match cfg.link_model.kind {
            crate::phy::LinkKind::Threshold { beta } => beta,
            _ => 0.0,
        },
    };

    let conns = cfg.connections_per_replication;
    let outcomes: Vec<Option<(ConnectionOutcome, Route)>> = (0..conns)
        .into_par_iter()
        .map(|ci| {
            let mut rng = root.derive(&[n, rep as u64, 3, ci as u64]);
            let src = rng.uniform_usize(ns.len());
            let dst = tm.dest_of[src];
            let route = match cfg.routing {
                RoutingKind::Straight => straight_line_route(src, dst, &ns, &t, &mut rng),
                RoutingKind::ArbitraryRandom => {
                    random_valid_route(src, dst, &ns, &t, 1_000_000, &mut rng)
                }
            };
            let route = match route {
                Ok(r) => r,
                Err(_) => return None,
            };
            let outcome =
                simulate_connection(&route, &sched, &cfg.link_model, &pp, &ns, &t, &mut rng);
            Some((outcome, route))
        })
        .collect();

    let mut successes = 0u64;
    let mut simulated = 0u64;
    let mut dropped = 0u32;
    let mut hop_sum = 0usize;
    let mut over_eps = 0u64;
    let mut cell_route_count = vec![0u64; t.num_cells()];
    for o in &outcomes {
        match o {
            Some((outcome, route)) => {
                simulated += 1;
                if outcome.success {
                    successes += 1;
                }
                hop_sum += outcome.hops;
                if 1.0 - outcome.success_prob > cfg.epsilon {
                    over_eps += 1;
                }
                for &c in &route.cells {
                    cell_route_count[c] += 1;
                }
            }
            None => dropped += 1,
        }
    }
    let (mean_success, ci_half_width) = proportion_ci(successes, simulated);
    let k = sched.num_colors.max(1) as f64;
    let goodput = lambda / k * mean_success;
    let max_count = cell_route_count.iter().copied().max().unwrap_or(0);
    // Scale the sampled route count up to all-n-sources traffic.
    let max_cell_load = if simulated > 0 {
        max_count as f64 / simulated as f64 * ns.len() as f64 * lambda
    } else {
        f64::NAN
    };
    let nf = n as f64;
    let fitted_c5 = max_cell_load / (lambda * (nf * nf.ln()).sqrt());
    Ok(NRecord {
        n,
        replication: rep,
        error: None,
        cells: t.num_cells(),
        k_colors: sched.num_colors,
        fallback_per_cell: sched.fallback_per_cell,
        rho_n: rho,
        lambda_n: lambda,
        connections: simulated as u32,
        dropped_connections: dropped,
        mean_success,
        ci_half_width,
        goodput,
        mean_hops: if simulated > 0 {
            hop_sum as f64 / simulated as f64
        } else {
            f64::NAN
        },
        loss_over_epsilon_frac: if simulated > 0 {
            over_eps as f64 / simulated as f64
        } else {
            f64::NAN
        },
        max_cell_load,
        fitted_c5,
        occupancy_ok: ns.cell_occupancy_ok(),
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SimReport, SimError> {
    cfg.validate().map_err(SimError::from)?;
    let mut records = Vec::new();
    for &n in &cfg.n_grid {
        for rep in 0..cfg.replications {
            let rec = match run_replication(cfg, n, rep) {
                Ok(rec) => rec,
                Err(e) => NRecord::failed(n, rep, e.to_string()),
            };
            records.push(rec);
        }
    }
    let slope = fit_scaling_slope_records(&records).ok();
    Ok(SimReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        records,
        slope,
    })
}

/// Cap the global worker pool. Call once, before any parallel work; later
/// calls fail once the pool exists.
pub fn install_thread_limit(jobs: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global()
}

/// Least-squares slope of ln y against ln x.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<SlopeFit, SimError> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(SimError::DegenerateGrid {
            need: 3,
            got: pts.len(),
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(SimError::DegenerateGrid { need: 3, got: 1 });
    }
    let slope = sxy / sxx;
    let sse: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - my - slope * (p.0 - mx);
            e * e
        })
        .sum();
    let stderr = if pts.len() > 2 {
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope,
        stderr,
        points: pts.len(),
    })
}

fn fit_scaling_slope_records(records: &[NRecord]) -> Result<SlopeFit, SimError> {
    use std::collections::BTreeMap;
    let mut by_n: BTreeMap<u64, (f64, u32)> = BTreeMap::new();
    for r in records {
        if r.error.is_none() && r.goodput.is_finite() && r.goodput > 0.0 {
            let e = by_n.entry(r.n).or_insert((0.0, 0));
            e.0 += r.goodput;
            e.1 += 1;
        }
    }
    let xs: Vec<f64> = by_n.keys().map(|&n| n as f64).collect();
    let ys: Vec<f64> = by_n.values().map(|&(s, c)| s / c as f64).collect();
    fit_slope(&xs, &ys)
}

/// Slope of mean goodput vs n from a finished report.
pub fn fit_scaling_slope(report: &SimReport) -> Result<SlopeFit, SimError> {
    fit_scaling_slope_records(&report.records)
}

pub const CSV_HEADER: &str = "n,replication,error,cells,k_colors,fallback_per_cell,rho_n,\
lambda_n,connections,dropped_connections,mean_success,ci_half_width,goodput,mean_hops,\
loss_over_epsilon_frac,max_cell_load,fitted_c5,occupancy_ok";

/// Flat CSV, one row per (n, replication), schema frozen as CSV_HEADER.
pub fn write_csv(report: &SimReport, out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.replication,
            r.error.as_deref().unwrap_or("").replace(',', ";"),
            r.cells,
            r.k_colors,
            r.fallback_per_cell,
            r.rho_n,
            r.lambda_n,
            r.connections,
            r.dropped_connections,
            r.mean_success,
            r.ci_half_width,
            r.goodput,
            r.mean_hops,
            r.loss_over_epsilon_frac,
            r.max_cell_load,
            r.fitted_c5,
            r.occupancy_ok,
        )?;
    }
    Ok(())
}
