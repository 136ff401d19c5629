//! Route construction and validation. Straight-line routes relay through
//! every cell the source-destination geodesic crosses; arbitrary routes are
//! loop-erased random walks on the cell adjacency graph. Both satisfy the
//! two structural rules: consecutive cells adjacent (R1) and no repeated
//! cells (R2), which caps every hop at 8 rho_n.

use serde::{Deserialize, Serialize};

use crate::deployment::NodeSet;
use crate::error::RoutingError;
use crate::rng::RngStream;
use crate::scheduling::Schedule;
use crate::sphere::geodesic_distance;
use crate::tessellation::Tessellation;
use crate::GeodesicSegment;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Route {
    pub src: usize,
    pub dst: usize,
    /// Relay cells in forwarding order; first holds src, last holds dst.
    pub cells: Vec<usize>,
    /// Forwarding node sequence; nodes[0] = src, last = dst. One relay per
    /// interior cell, so len = cells.len() when both endpoints relay, except
    /// the same-cell case where it is [src, dst].
    pub nodes: Vec<usize>,
    pub hop_lengths: Vec<f64>,
    /// Geodesic src-dst distance L.
    pub straight_length: f64,
    /// Sum of hop lengths (the traveled length).
    pub path_length: f64,
}

impl Route {
    pub fn num_hops(&self) -> usize {
        self.hop_lengths.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteValidationParams {
    /// Window of consecutive hops that must contain a long hop.
    pub w_window: usize,
    /// Hops shorter than t_frac * rho_n count as short.
    pub t_frac: f64,
}

impl Default for RouteValidationParams {
    fn default() -> Self {
        Self {
            w_window: 40,
            t_frac: 0.01,
        }
    }
}

fn pick_relay(
    cell: usize,
    ns: &NodeSet,
    rng: &mut RngStream,
    src: usize,
    dst: usize,
) -> Result<usize, RoutingError> {
    let nodes = &ns.nodes_in[cell];
    if nodes.is_empty() {
        return Err(RoutingError::EmptyRelayCell { cell, src, dst });
    }
    Ok(nodes[rng.uniform_usize(nodes.len())])
}

fn finish_route(
    src: usize,
    dst: usize,
    cells: Vec<usize>,
    ns: &NodeSet,
    t: &Tessellation,
    rng: &mut RngStream,
) -> Result<Route, RoutingError> {
    let sp = t.sphere();
    let mut nodes = vec![src];
    if cells.len() > 2 {
        for &c in &cells[1..cells.len() - 1] {
            nodes.push(pick_relay(c, ns, rng, src, dst)?);
        }
    }
    nodes.push(dst);
    let hop_lengths: Vec<f64> = nodes
        .windows(2)
        .map(|w| geodesic_distance(&ns.positions[w[0]], &ns.positions[w[1]], sp))
        .collect();
    let straight_length = geodesic_distance(&ns.positions[src], &ns.positions[dst], sp);
    let path_length = hop_lengths.iter().sum();
    Ok(Route {
        src,
        dst,
        cells,
        nodes,
        hop_lengths,
        straight_length,
        path_length,
    })
}

/// Route through every cell crossed by the src-dst geodesic, in crossing
/// order. Relays are uniform over each interior cell's nodes.
pub fn straight_line_route(
    src: usize,
    dst: usize,
    ns: &NodeSet,
    t: &Tessellation,
    rng: &mut RngStream,
) -> Result<Route, RoutingError> {
    if src == dst {
        return Err(RoutingError::SelfRoute(src));
    }
    let sp = t.sphere();
    let seg = GeodesicSegment::new(ns.positions[src], ns.positions[dst], sp);

    // Cells are geodesically convex (diameter well under a quarter
    // circumference), so the geodesic visits each crossed cell in a single
    // interval; marching in sub-cell steps recovers the crossing order.
    let step = t.rho_n() / 50.0;
    let steps = ((seg.length / step).ceil() as usize).max(1);
    let mut cells: Vec<usize> = vec![ns.cell_of[src]];
    let mut cur = ns.cell_of[src];
    for i in 1..=steps {
        let p = seg.point_at(i as f64 / steps as f64);
        let c = t.locate_cell_from(&p, cur);
        if c != cur {
            cells.push(c);
            cur = c;
        }
    }
    if *cells.last().unwrap() != ns.cell_of[dst] {
        cells.push(ns.cell_of[dst]);
    }
    finish_route(src, dst, cells, ns, t, rng)
}

/// Loop-erased random walk on the cell adjacency graph from src's cell to
/// dst's cell; used to exercise validators on arbitrary valid routes.
pub fn random_valid_route(
    src: usize,
    dst: usize,
    ns: &NodeSet,
    t: &Tessellation,
    limit: usize,
    rng: &mut RngStream,
) -> Result<Route, RoutingError> {
    if src == dst {
        return Err(RoutingError::SelfRoute(src));
    }
    let target = ns.cell_of[dst];
    let mut cells: Vec<usize> = vec![ns.cell_of[src]];
    let mut taken = 0usize;
    while *cells.last().unwrap() != target {
        if taken >= limit {
            return Err(RoutingError::WalkDidNotTerminate { src, dst, limit });
        }
        taken += 1;
        let cur = *cells.last().unwrap();
        let nbrs = t.neighbors(cur);
        let next = nbrs[rng.uniform_usize(nbrs.len())];
        if let Some(pos) = cells.iter().position(|&c| c == next) {
            cells.truncate(pos + 1);
        } else {
            cells.push(next);
        }
    }
    finish_route(src, dst, cells, ns, t, rng)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RouteReport {
    pub violations: Vec<String>,
}

impl RouteReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check R1 (consecutive cells adjacent), R2 (no repeated cell), and the
/// 8 rho_n hop length cap.
pub fn validate_route(r: &Route, t: &Tessellation) -> RouteReport {
    let mut violations = Vec::new();
    for w in r.cells.windows(2) {
        if !t.are_adjacent(w[0], w[1]) {
            violations.push(format!("R1: cells {} and {} not adjacent", w[0], w[1]));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for &c in &r.cells {
        if !seen.insert(c) {
            violations.push(format!("R2: cell {c} repeated"));
        }
    }
    let cap = 8.0 * t.rho_n();
    for (i, &h) in r.hop_lengths.iter().enumerate() {
        if h > cap * (1.0 + 1e-9) {
            violations.push(format!("hop {i} length {h} exceeds 8 rho_n = {cap}"));
        }
    }
    RouteReport { violations }
}

/// Number of hops of length at least t_frac * rho_n (H_i - h_i).
pub fn long_hop_count(r: &Route, t_frac: f64, rho_n: f64) -> usize {
    let cut = t_frac * rho_n;
    r.hop_lengths.iter().filter(|&&h| h >= cut).count()
}

/// Longest run of consecutive hops all shorter than t_frac * rho_n.
pub fn max_short_hop_run(r: &Route, params: &RouteValidationParams, rho_n: f64) -> usize {
    let cut = params.t_frac * rho_n;
    let mut best = 0usize;
    let mut run = 0usize;
    for &h in &r.hop_lengths {
        if h < cut {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// N_i: interior hops whose receiver hears no same-slot transmitter within
/// (M + 8) rho_n, with every same-color cell assumed transmitting.
pub fn hop_interferer_gap_count(
    r: &Route,
    sched: &Schedule,
    ns: &NodeSet,
    t: &Tessellation,
    m_mult: f64,
) -> usize {
    let sp = t.sphere();
    let radius = (m_mult + 8.0) * t.rho_n();
    let hops = r.num_hops();
    if hops <= 2 {
        return 0;
    }
    let mut count = 0usize;
    for i in 1..hops - 1 {
        let tx_cell = ns.cell_of[r.nodes[i]];
        let rx = &ns.positions[r.nodes[i + 1]];
        let color = sched.color_of[tx_cell];
        let mut heard = false;
        for c in 0..t.num_cells() {
            if c == tx_cell || sched.color_of[c] != color {
                continue;
            }
            let gd = geodesic_distance(rx, t.generator(c), sp);
            let circ = t.cell(c).circum_radius;
            if gd <= radius {
                heard = true;
                break;
            }
            if gd - circ > radius {
                continue;
            }
            let d = t
                .boundary_edges(c)
                .iter()
                .map(|e| crate::sphere::point_to_segment_distance(rx, e, sp))
                .fold(f64::INFINITY, f64::min);
            if d <= radius {
                heard = true;
                break;
            }
        }
        if !heard {
            count += 1;
        }
    }
    count
}
