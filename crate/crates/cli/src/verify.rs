//! The `verify` subcommand: rebuild the full pipeline at the configured
//! scale and check every structural invariant, writing a JSON report of any
//! violations.

use adhoc_capacity::deployment::{assign_destinations, deploy};
use adhoc_capacity::phy::{compute_sinr, PhyParams};
use adhoc_capacity::routing::{long_hop_count, straight_line_route, validate_route};
use adhoc_capacity::scheduling::{
    build_pi1, build_pi2, required_sinr, verify_schedule, Policy, ScheduleParams,
};
use adhoc_capacity::sim::ExperimentConfig;
use adhoc_capacity::tessellation::{build_tessellation, CellGeometry, verify_tessellation};
use adhoc_capacity::{RngStream, SphereParams};

use crate::{load_config, runtime, CliError, CliResult, VerifyArgs};

#[derive(serde::Serialize)]
struct VerifyReport {
    config_hash: String,
    violations: Vec<String>,
}

pub(crate) fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    let cfg = load_config(&args.config, &args.overrides)?;
    let mut violations = Vec::new();
    for &n in &cfg.n_grid {
        verify_one_n(&cfg, n, &mut violations).map_err(runtime)?;
    }
    let report = VerifyReport {
        config_hash: crate::config_hash(&cfg),
        violations: violations.clone(),
    };
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).map_err(runtime)?;
        std::fs::write(
            out.join("verify.json"),
            serde_json::to_string_pretty(&report).map_err(runtime)?,
        )
        .map_err(runtime)?;
    }
    if violations.is_empty() {
        println!("all invariant suites passed at n = {:?}", cfg.n_grid);
        Ok(())
    } else {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        Err(CliError::Validation(format!(
            "{} invariant violation(s)",
            violations.len()
        )))
    }
}

fn verify_one_n(
    cfg: &ExperimentConfig,
    n: u64,
    violations: &mut Vec<String>,
) -> Result<(), String> {
    let nf = n as f64;
    let sp = SphereParams::from_area(nf).map_err(|e| e.to_string())?;
    let cg = CellGeometry::new(nf, &cfg.rho_convention).map_err(|e| e.to_string())?;
    let root = RngStream::new(cfg.seed);
    let t = build_tessellation(&sp, &cg, &mut root.derive(&[n, 0]))
        .map_err(|e| e.to_string())?;

    let trep = verify_tessellation(&t, &cg);
    for v in &trep.violations {
        violations.push(format!("n={n} tessellation: {} = {} (limit {})", v.check, v.value, v.limit));
    }

    let ns = deploy(n as usize, &t, &mut root.derive(&[n, 1]));
    let tm = assign_destinations(&ns, &mut root.derive(&[n, 2]));

    // Route corpus: structural rules plus the hop-count and long-hop bounds.
    let mut rng = root.derive(&[n, 3]);
    let mut routes = Vec::new();
    let sample = 200.min(n as usize);
    for i in 0..sample {
        let dst = tm.dest_of[i];
        let r = match straight_line_route(i, dst, &ns, &t, &mut rng) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let rep = validate_route(&r, &t);
        for v in rep.violations {
            violations.push(format!("n={n} route {i}: {v}"));
        }
        if r.straight_length >= 16.0 * cg.rho_n {
            let h = r.num_hops() as f64;
            let l = r.straight_length;
            if h < l / (8.0 * cg.rho_n) - 1e-9
                || h > (16.0 / std::f64::consts::PI) * l / cg.rho_n + 1e-9
            {
                violations.push(format!("n={n} route {i}: hop count {h} outside bounds for L={l}"));
            }
            let t_frac = 0.01;
            let bound = (l / cg.rho_n) * (1.0 - 16.0 * t_frac / std::f64::consts::PI)
                / (8.0 - t_frac);
            if (long_hop_count(&r, t_frac, cg.rho_n) as f64) < bound - 1e-9 {
                violations.push(format!("n={n} route {i}: long-hop count below bound"));
            }
        }
        routes.push(r);
    }

    // Schedule invariants.
    let sched = match cfg.policy {
        Policy::Pi1 => build_pi1(
            &t,
            &ScheduleParams {
                pi1_range_mult: cfg.pi1_range_mult,
            },
        )
        .map_err(|e| e.to_string())?,
        Policy::Pi2 => build_pi2(&t, nf, cfg.alpha).map_err(|e| e.to_string())?,
    };
    let srep = verify_schedule(&sched, &t, sched.exclusion_radius);
    for (a, b) in &srep.conflicting_pairs {
        violations.push(format!("n={n} schedule: same-color cells {a},{b} in conflict"));
    }

    if cfg.policy == Policy::Pi2 {
        let inner = sched.exclusion_radius / (2.0 * cg.rho_n);
        let v_n = 8.0 * inner * inner;
        if (sched.num_colors as f64) > v_n + 1.0 {
            violations.push(format!(
                "n={n} schedule: {} colors exceeds V_n + 1 = {}",
                sched.num_colors,
                v_n + 1.0
            ));
        }
        // SINR guarantee under saturation on sampled hops.
        let beta_n = cfg.beta_n_override.unwrap_or_else(|| required_sinr(nf));
        let pp = PhyParams {
            power_p: cfg.power,
            noise_n: cfg.noise,
            alpha: cfg.alpha,
            beta_threshold: 0.0,
        };
        let mut srng = root.derive(&[n, 4]);
        let mut checked = 0u64;
        let mut failed = 0u64;
        'outer: for r in &routes {
            for i in 0..r.num_hops() {
                if checked >= 2000 {
                    break 'outer;
                }
                let tx = r.nodes[i];
                let rx = r.nodes[i + 1];
                let color = sched.color_of[ns.cell_of[tx]];
                let mut interferers = Vec::new();
                for c in 0..t.num_cells() {
                    if c == ns.cell_of[tx] || sched.color_of[c] != color {
                        continue;
                    }
                    let pool = &ns.nodes_in[c];
                    if pool.is_empty() {
                        continue;
                    }
                    interferers.push(ns.positions[pool[srng.uniform_usize(pool.len())]]);
                }
                let sinr = compute_sinr(&ns.positions[rx], &ns.positions[tx], &interferers, &pp, &sp)
                    .unwrap_or(f64::INFINITY);
                checked += 1;
                if sinr < beta_n {
                    failed += 1;
                }
            }
        }
        if checked > 0 && (failed as f64) / (checked as f64) > 0.001 {
            violations.push(format!(
                "n={n} schedule: SINR below {beta_n:.3} on {failed}/{checked} sampled hops"
            ));
        }
    }
    Ok(())
}
