//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line. Tolerances follow the bound statements; trend checks use
//! the pinned experiment configs below. Wall-clock budgets are only enforced
//! in release builds.

use std::time::{Duration, Instant};

use adhoc_capacity::analysis::{expected_delta_l, ni_bound, per_link_loss_budget, reuse_expansion, throughput_lower_pi2, throughput_upper_pi1};
use adhoc_capacity::deployment::{assign_destinations, deploy, NodeSet};
use adhoc_capacity::error::RoutingError;
use adhoc_capacity::phy::{LinkModel, PhyParams};
use adhoc_capacity::routing::{long_hop_count, hop_interferer_gap_count, random_valid_route, straight_line_route};
use adhoc_capacity::scheduling::{build_pi1, build_pi2, exclusion_radius_for_rho, required_sinr, verify_schedule, Policy, ScheduleParams};
use adhoc_capacity::sim::{run_experiment, simulate_connection, write_csv, ExperimentConfig, LambdaMode, RoutingKind, CONFIG_SCHEMA_VERSION};
use adhoc_capacity::sphere::{cap_area, geodesic_distance, pair_distance_cdf, sample_uniform_point};
use adhoc_capacity::tessellation::{build_tessellation, CellGeometry, RhoConvention, Tessellation};
use adhoc_capacity::{RngStream, SphereParams};

fn conclude(tag: &str, started: Instant, budget: Duration, failures: Vec<String>) {
    let elapsed = started.elapsed();
    if failures.is_empty() {
        println!("acceptance {tag}: pass ({elapsed:.1?})");
    } else {
        println!("acceptance {tag}: FAIL ({elapsed:.1?})");
        panic!("{}", failures.join("\n"));
    }
    // Debug builds blow every budget; only hold release runs to them.
    if !cfg!(debug_assertions) {
        assert!(elapsed <= budget, "{tag} took {elapsed:?}, budget {budget:?}");
    }
}

struct Deployed {
    rho: f64,
    t: Tessellation,
    ns: NodeSet,
}

fn deployed(n: f64, nodes: usize, seed: u64) -> Deployed {
    let sp = SphereParams::from_area(n).unwrap();
    let cg = CellGeometry::new(n, &RhoConvention::SqrtLog { c: 1.0 }).unwrap();
    let t = build_tessellation(&sp, &cg, &mut RngStream::new(seed)).unwrap();
    let ns = deploy(nodes, &t, &mut RngStream::new(seed + 1));
    Deployed { rho: cg.rho_n, t, ns }
}

/// Scaling-trend experiment under constant-reuse scheduling. The noise floor
/// is set so per-hop success falls with n instead of saturating at 1.
fn trend_config_pi1() -> ExperimentConfig {
    ExperimentConfig {
        schema_version: CONFIG_SCHEMA_VERSION,
        n_grid: vec![1024, 2048, 4096, 8192, 16384, 32768, 65536],
        alpha: 4.0,
        link_model: LinkModel::continuous(1.0),
        policy: Policy::Pi1,
        routing: RoutingKind::Straight,
        replications: 1,
        connections_per_replication: 1000,
        seed: 42,
        lambda_mode: LambdaMode::MaxInjection,
        c5: 1.0,
        epsilon: 0.05,
        pi1_range_mult: 12.0,
        rho_convention: RhoConvention::SqrtLog { c: 1.0 },
        power: 1.0,
        noise: 1e-4,
        beta_n_override: None,
        radius_misprint: false,
    }
}

/// Scaling-trend experiment under exclusion-radius scheduling. The power-law
/// cell scale keeps at least eight generators on the smallest sphere while
/// the color count still grows with n.
fn trend_config_pi2() -> ExperimentConfig {
    ExperimentConfig {
        policy: Policy::Pi2,
        rho_convention: RhoConvention::Power { c: 0.7, gamma: 0.25 },
        noise: 0.0,
        ..trend_config_pi1()
    }
}

#[test]
fn expected_attenuation_closed_form() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let n = 1e4;
    let delta = 0.99f64;
    let sp = SphereParams::from_area(n).unwrap();
    let mut rng = RngStream::new(101);
    let mut acc = 0.0f64;
    let pairs = 1_000_000u32;
    for _ in 0..pairs {
        let a = sample_uniform_point(&mut rng);
        let b = sample_uniform_point(&mut rng);
        acc += delta.powf(geodesic_distance(&a, &b, &sp));
    }
    let mc = acc / pairs as f64;
    let exact = expected_delta_l(delta, n).unwrap();
    let rel = (mc - exact).abs() / exact;
    if rel > 0.01 {
        failures.push(format!("monte carlo {mc} vs closed form {exact}: rel err {rel}"));
    }
    let at_one = expected_delta_l(1.0, n).unwrap();
    if at_one != 1.0 {
        failures.push(format!("delta = 1 must give exactly 1, got {at_one}"));
    }
    conclude("01 expected-attenuation", started, Duration::from_secs(10), failures);
}

#[test]
fn cell_area_bracketed_by_disk_area() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for k in 0..10 {
        let n = 100.0 * 10f64.powf(k as f64 * 0.45);
        let sp = SphereParams::from_area(n).unwrap();
        let half = sp.half_circumference();
        for i in 1..=100 {
            // Stay on the near half of the sphere, where the cap comparison
            // is meaningful.
            let rho = i as f64 / 100.0 * half / 2.0;
            let cap = cap_area(rho, &sp).unwrap();
            let disk = std::f64::consts::PI * rho * rho;
            if !(disk / 2.0 <= cap && cap <= disk) {
                failures.push(format!("n={n} rho={rho}: cap={cap} outside [{}, {disk}]", disk / 2.0));
            }
        }
    }
    conclude("02 cap-area-bracket", started, Duration::from_secs(1), failures);
}

#[test]
fn hop_count_bracketed_by_route_length() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let f = deployed(1e4, 50_000, 103);
    let tm = assign_destinations(&f.ns, &mut RngStream::new(104));
    let mut rng = RngStream::new(105);
    let (mut checked, mut short) = (0u32, 0u32);
    for i in 0..10_000usize {
        let r = match straight_line_route(i, tm.dest_of[i], &f.ns, &f.t, &mut rng) {
            Ok(r) => r,
            Err(RoutingError::EmptyRelayCell { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let l = r.straight_length;
        if l < 16.0 * f.rho {
            short += 1;
            continue;
        }
        checked += 1;
        let h = r.num_hops() as f64;
        let lo = l / (8.0 * f.rho);
        let hi = (16.0 / std::f64::consts::PI) * l / f.rho;
        if !(h >= lo - 1e-9 && h <= hi + 1e-9) {
            failures.push(format!("route {i}: H={h} outside [{lo}, {hi}] at L={l}"));
        }
    }
    println!("  checked {checked} routes, excluded {short} below the 16 rho floor");
    if checked + short < 10_000 {
        failures.push("route corpus came up short".into());
    }
    conclude("03 hop-count-bracket", started, Duration::from_secs(120), failures);
}

#[test]
fn long_hop_floor_on_straight_routes() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let f = deployed(1e4, 50_000, 106);
    let tm = assign_destinations(&f.ns, &mut RngStream::new(107));
    let mut rng = RngStream::new(108);
    let t_frac = 0.01;
    let factor = (1.0 - 16.0 * t_frac / std::f64::consts::PI) / (8.0 - t_frac);
    for i in 0..10_000usize {
        let r = match straight_line_route(i, tm.dest_of[i], &f.ns, &f.t, &mut rng) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if r.straight_length < 16.0 * f.rho {
            continue;
        }
        let bound = (r.straight_length / f.rho) * factor;
        let got = long_hop_count(&r, t_frac, f.rho) as f64;
        if got < bound - 1e-9 {
            failures.push(format!("route {i}: {got} long hops, floor {bound}"));
        }
    }
    conclude("04 long-hop-floor", started, Duration::from_secs(120), failures);
}

#[test]
fn interference_gap_hops_capped() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let f = deployed(1e4, 50_000, 109);
    let sched = build_pi1(&f.t, &ScheduleParams::default()).unwrap();
    let c1 = (sched.num_colors - 1) as f64;
    let m = 64.0 * (1.0 + c1);
    let mut rng = RngStream::new(110);
    let mut checked = 0;
    while checked < 1000 {
        let src = rng.uniform_usize(f.ns.len());
        let dst = (src + 1 + rng.uniform_usize(f.ns.len() - 1)) % f.ns.len();
        let r = match straight_line_route(src, dst, &f.ns, &f.t, &mut rng) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if r.straight_length < 16.0 * f.rho {
            continue;
        }
        let bound = ni_bound(r.straight_length, f.rho, m, c1).unwrap();
        let got = hop_interferer_gap_count(&r, &sched, &f.ns, &f.t, m) as f64;
        if got > bound + 1e-9 {
            failures.push(format!("straight {src}->{dst}: N={got} over {bound}"));
        }
        checked += 1;
    }
    // Arbitrary valid routes get the same cap against traveled length.
    checked = 0;
    while checked < 1000 {
        let src = rng.uniform_usize(f.ns.len());
        let dst = (src + 1 + rng.uniform_usize(f.ns.len() - 1)) % f.ns.len();
        let r = match random_valid_route(src, dst, &f.ns, &f.t, 100_000, &mut rng) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if r.path_length < 16.0 * f.rho {
            continue;
        }
        let bound = ni_bound(r.path_length, f.rho, m, c1).unwrap();
        let got = hop_interferer_gap_count(&r, &sched, &f.ns, &f.t, m) as f64;
        if got > bound + 1e-9 {
            failures.push(format!("walk {src}->{dst}: N={got} over {bound}"));
        }
        checked += 1;
    }
    conclude("05 gap-hop-cap", started, Duration::from_secs(300), failures);
}

#[test]
fn exclusion_schedule_valid_and_sinr_sufficient() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let alpha = 4.0;
    let (a0, a1, a2) = reuse_expansion(alpha).unwrap();
    for n in [1024.0f64, 2048.0, 4096.0, 8192.0] {
        let f = deployed(n, n as usize, 111 + n as u64);
        let sched = build_pi2(&f.t, n, alpha).unwrap();
        let r_excl = exclusion_radius_for_rho(f.rho, n, alpha).unwrap();
        let rep = verify_schedule(&sched, &f.t, r_excl);
        if !rep.is_valid() {
            failures.push(format!("n={n}: schedule conflicts at R: {:?}", rep.conflicting_pairs));
        }
        let x = n.ln().powf(1.0 / (alpha - 2.0));
        let k_cap = a0 + a1 * x + a2 * x * x;
        if sched.num_colors as f64 > k_cap {
            failures.push(format!("n={n}: K={} over cap {k_cap}", sched.num_colors));
        }
        // Saturated-interference SINR samples across random connections.
        let lm = LinkModel::continuous(1.0);
        let pp = PhyParams { alpha, ..PhyParams::default() };
        let beta_n = required_sinr(n);
        let mut rng = RngStream::new(200 + n as u64);
        let (mut hops, mut ok) = (0u64, 0u64);
        while hops < 10_000 {
            let src = rng.uniform_usize(f.ns.len());
            let dst = (src + 1 + rng.uniform_usize(f.ns.len() - 1)) % f.ns.len();
            let r = match straight_line_route(src, dst, &f.ns, &f.t, &mut rng) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let out = simulate_connection(&r, &sched, &lm, &pp, &f.ns, &f.t, &mut rng);
            for s in &out.hop_sinrs {
                hops += 1;
                if *s >= beta_n {
                    ok += 1;
                }
            }
        }
        let frac = ok as f64 / hops as f64;
        if frac < 0.999 {
            failures.push(format!("n={n}: only {frac} of hops reach the SINR target"));
        }
    }
    conclude("06 exclusion-schedule", started, Duration::from_secs(600), failures);
}

#[test]
fn end_to_end_loss_within_budget() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let n = 8192u64;
    let mut cfg = ExperimentConfig {
        n_grid: vec![n],
        connections_per_replication: 2000,
        seed: 113,
        ..trend_config_pi1()
    };
    cfg.policy = Policy::Pi2;
    cfg.noise = 0.0;
    let rep = run_experiment(&cfg).unwrap();
    let rec = &rep.records[0];
    if rec.loss_over_epsilon_frac > 0.05 {
        failures.push(format!(
            "continuous links: {} of connections lose more than epsilon",
            rec.loss_over_epsilon_frac
        ));
    }
    // Fixing every link to the per-link budget makes the union bound exact:
    // no connection may exceed epsilon.
    let rho = cfg.rho_convention.rho(n as f64);
    let budget = per_link_loss_budget(cfg.epsilon, n as f64, rho);
    cfg.link_model = LinkModel::fixed(1.0 - budget);
    let rep = run_experiment(&cfg).unwrap();
    let rec = &rep.records[0];
    if rec.loss_over_epsilon_frac != 0.0 {
        failures.push(format!(
            "budgeted links: {} of connections still over epsilon",
            rec.loss_over_epsilon_frac
        ));
    }
    conclude("07 loss-budget", started, Duration::from_secs(300), failures);
}

#[test]
fn goodput_scaling_trends() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let cfg1 = trend_config_pi1();
    let cfg2 = trend_config_pi2();
    let rep1 = run_experiment(&cfg1).unwrap();
    let rep2 = run_experiment(&cfg2).unwrap();
    for rec in rep1.records.iter().chain(&rep2.records) {
        if let Some(e) = &rec.error {
            failures.push(format!("n={}: {e}", rec.n));
        }
    }
    let s1 = rep1.slope.as_ref().unwrap().slope;
    let s2 = rep2.slope.as_ref().unwrap().slope;
    if !(-1.2 < s1 && s1 < -0.8) {
        failures.push(format!("constant-reuse slope {s1} outside (-1.2, -0.8)"));
    }
    if !(-0.75 < s2 && s2 < -0.45) {
        failures.push(format!("exclusion-radius slope {s2} outside (-0.75, -0.45)"));
    }
    let last1 = rep1.records.last().unwrap();
    let last2 = rep2.records.last().unwrap();
    if !(last2.goodput > last1.goodput) {
        failures.push(format!(
            "at n={}: exclusion-radius goodput {} not above constant-reuse {}",
            last1.n, last2.goodput, last1.goodput
        ));
    }
    // Upper envelope, fed the measured per-hop success. The analytic SINR cap
    // is so large that the attenuation there rounds to 1 in f64; the measured
    // value is strictly smaller, which only tightens the envelope.
    for rec in &rep1.records {
        if !(rec.mean_success > 0.0) {
            continue;
        }
        let per_hop = rec.mean_success.powf(1.0 / rec.mean_hops).min(1.0 - 1e-12);
        let upper =
            throughput_upper_pi1(rec.lambda_n, rec.n as f64, rec.rho_n, per_hop).unwrap();
        if rec.goodput > upper {
            failures.push(format!("n={}: goodput {} over envelope {upper}", rec.n, rec.goodput));
        }
    }
    // Lower envelope is a shape check: after calibrating c5 to the geometric
    // mean ratio, every point must sit within 4x and the ratio may not drift
    // by 2x across the grid.
    let ratios: Vec<f64> = rep2
        .records
        .iter()
        .map(|rec| {
            let lower =
                throughput_lower_pi2(rec.n as f64, cfg2.alpha, cfg2.epsilon, 1.0, 1.0).unwrap();
            rec.goodput / lower
        })
        .collect();
    let c5 = (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (rec, r) in rep2.records.iter().zip(&ratios) {
        let scaled = r / c5;
        lo = lo.min(scaled);
        hi = hi.max(scaled);
        if !(0.25 <= scaled && scaled <= 4.0) {
            failures.push(format!("n={}: goodput {scaled}x the calibrated envelope", rec.n));
        }
    }
    if hi / lo >= 2.0 {
        failures.push(format!("envelope ratio drifts {}x across the grid", hi / lo));
    }
    conclude("08 scaling-trends", started, Duration::from_secs(1800), failures);
}

#[test]
fn fixed_loss_success_matches_distance_integral() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let n = 4096.0;
    let p = 0.95f64;
    let f = deployed(n, n as usize, 114);
    let sp = SphereParams::from_area(n).unwrap();
    let half = sp.half_circumference();

    // Numerical expectation: bin mean route success probability by distance,
    // integrate against the analytic pair-distance law.
    let bins = 64usize;
    let mut sum = vec![0.0f64; bins];
    let mut count = vec![0u64; bins];
    let mut rng = RngStream::new(115);
    let mut built = 0u64;
    while built < 50_000 {
        let src = rng.uniform_usize(f.ns.len());
        let dst = (src + 1 + rng.uniform_usize(f.ns.len() - 1)) % f.ns.len();
        let r = match straight_line_route(src, dst, &f.ns, &f.t, &mut rng) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let b = ((r.straight_length / half * bins as f64) as usize).min(bins - 1);
        sum[b] += p.powi(r.num_hops() as i32);
        count[b] += 1;
        built += 1;
    }
    let (mut expected, mut mass) = (0.0f64, 0.0f64);
    for b in 0..bins {
        if count[b] == 0 {
            continue;
        }
        let m = pair_distance_cdf((b + 1) as f64 / bins as f64 * half, &sp).unwrap()
            - pair_distance_cdf(b as f64 / bins as f64 * half, &sp).unwrap();
        expected += m * sum[b] / count[b] as f64;
        mass += m;
    }
    expected /= mass;

    // Measured: independent corpus, one Bernoulli draw per hop.
    let mut rng = RngStream::new(116);
    let (mut trials, mut successes) = (0u64, 0u64);
    while trials < 50_000 {
        let src = rng.uniform_usize(f.ns.len());
        let dst = (src + 1 + rng.uniform_usize(f.ns.len() - 1)) % f.ns.len();
        let r = match straight_line_route(src, dst, &f.ns, &f.t, &mut rng) {
            Ok(r) => r,
            Err(_) => continue,
        };
        trials += 1;
        if (0..r.num_hops()).all(|_| rng.bernoulli(p)) {
            successes += 1;
        }
    }
    let measured = successes as f64 / trials as f64;
    let rel = (measured - expected).abs() / expected;
    println!("  measured {measured:.4}, integral {expected:.4}, rel err {rel:.4}");
    if rel > 0.02 {
        failures.push(format!("measured {measured} vs integral {expected}: rel err {rel}"));
    }
    conclude("09 fixed-loss-success", started, Duration::from_secs(300), failures);
}

#[test]
fn rerun_is_byte_identical() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for cfg in [
        ExperimentConfig { n_grid: vec![4096, 8192], ..trend_config_pi1() },
        ExperimentConfig { n_grid: vec![4096, 8192], ..trend_config_pi2() },
    ] {
        let mut first = Vec::new();
        let mut second = Vec::new();
        write_csv(&run_experiment(&cfg).unwrap(), &mut first).unwrap();
        write_csv(&run_experiment(&cfg).unwrap(), &mut second).unwrap();
        if first != second {
            failures.push(format!("{:?} rerun diverged", cfg.policy));
        }
    }
    conclude("10 determinism", started, Duration::from_secs(300), failures);
}
