//! TDMA schedules over the cell graph. Two policies:
//!
//! * pi1: conflict edges between cells within a constant multiple of rho_n,
//!   giving a reuse factor K that does not grow with n.
//! * pi2: conflict edges between cells within the exclusion radius R_n, which
//!   grows with n and buys every transmission an SINR of at least ln n.
//!
//! When R_n exceeds the largest distance on the sphere the pi2 conflict graph
//! is complete; the builder then falls back to one color per cell and flags it.

use serde::{Deserialize, Serialize};

use crate::error::ScheduleError;
use crate::tessellation::Tessellation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Pi1,
    Pi2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schedule {
    pub policy: Policy,
    pub color_of: Vec<usize>,
    pub num_colors: usize,
    /// Conflict range the coloring was built against.
    pub exclusion_radius: f64,
    /// True when pi2 degenerated to one color per cell because the exclusion
    /// radius covers the whole sphere.
    pub fallback_per_cell: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    /// pi1 conflict range, in units of rho_n.
    pub pi1_range_mult: f64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            pi1_range_mult: 12.0,
        }
    }
}

fn reuse_inner(n: f64, alpha: f64) -> Result<f64, ScheduleError> {
    if !(alpha > 2.0) {
        return Err(ScheduleError::AlphaTooSmall(alpha));
    }
    if !(n > 1.0) {
        return Err(ScheduleError::NTooSmall(n));
    }
    Ok(1.0 + 4.0 * (256.0 * n.ln() / (alpha - 2.0)).powf(1.0 / (alpha - 2.0)))
}

/// Exclusion radius R_n = 20 sqrt(ln n) (1 + 4 (256 ln n / (alpha-2))^(1/(alpha-2))),
/// i.e. the cell-scale form below evaluated at rho_n = 10 sqrt(ln n).
pub fn exclusion_radius(n: f64, alpha: f64) -> Result<f64, ScheduleError> {
    Ok(20.0 * n.ln().sqrt() * reuse_inner(n, alpha)?)
}

/// R_n for an arbitrary cell scale: 2 rho_n times the same growth factor.
pub fn exclusion_radius_for_rho(rho_n: f64, n: f64, alpha: f64) -> Result<f64, ScheduleError> {
    Ok(2.0 * rho_n * reuse_inner(n, alpha)?)
}

/// V_n = 8 (1 + 4 (256 ln n / (alpha-2))^(1/(alpha-2)))^2, the degree cap of
/// the R_n conflict graph.
pub fn max_degree_bound(n: f64, alpha: f64) -> Result<f64, ScheduleError> {
    let inner = reuse_inner(n, alpha)?;
    Ok(8.0 * inner * inner)
}

/// Required per-transmission SINR beta_n = ln n.
pub fn required_sinr(n: f64) -> f64 {
    n.ln()
}

/// Upper bound on the aggregate interference at a receiver when all
/// simultaneous transmitters sit beyond distance `r_excl`:
/// 4 P R^(2-alpha) / (rho_n^2 (alpha - 2)). At rho_n = 10 sqrt(ln n) this is
/// the familiar P R^(2-alpha) / (25 ln n (alpha - 2)).
pub fn worst_case_interference_bound(
    r_excl: f64,
    alpha: f64,
    power: f64,
    rho_n: f64,
) -> Result<f64, ScheduleError> {
    if !(alpha > 2.0) {
        return Err(ScheduleError::AlphaTooSmall(alpha));
    }
    Ok(4.0 * power * r_excl.powf(2.0 - alpha) / (rho_n * rho_n * (alpha - 2.0)))
}

/// Cells in conflict: boundary-to-boundary distance at most `radius`.
fn conflict_graph(t: &Tessellation, radius: f64) -> Vec<Vec<usize>> {
    let m = t.num_cells();
    let mut adj = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            let gd = crate::sphere::geodesic_distance(t.generator(i), t.generator(j), t.sphere());
            let slack = t.cell(i).circum_radius + t.cell(j).circum_radius;
            let conflict = if gd <= radius {
                true
            } else if gd - slack > radius {
                false
            } else {
                t.cell_distance(i, j) <= radius
            };
            if conflict {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

/// Greedy coloring, highest degree first (ties by cell id); at most
/// max degree + 1 colors.
fn greedy_color(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let m = adj.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| adj[b].len().cmp(&adj[a].len()).then(a.cmp(&b)));
    let mut color_of = vec![usize::MAX; m];
    let mut num_colors = 0;
    let mut used = Vec::new();
    for &v in &order {
        used.clear();
        used.resize(num_colors + 1, false);
        for &u in &adj[v] {
            if color_of[u] != usize::MAX && color_of[u] <= num_colors {
                used[color_of[u]] = true;
            }
        }
        let c = used.iter().position(|&b| !b).unwrap();
        color_of[v] = c;
        num_colors = num_colors.max(c + 1);
    }
    (color_of, num_colors)
}

/// A lone cell in a color class has no same-slot transmitter anywhere, which
/// voids the interferer-gap bound for hops out of it. Move a non-conflicting
/// cell from a class of size >= 3 into each singleton class; the coloring
/// stays proper and the color count is unchanged.
fn balance_singleton_classes(adj: &[Vec<usize>], color_of: &mut [usize], num_colors: usize) {
    let mut class_size = vec![0usize; num_colors];
    for &c in color_of.iter() {
        class_size[c] += 1;
    }
    for color in 0..num_colors {
        if class_size[color] != 1 {
            continue;
        }
        let lone = color_of.iter().position(|&c| c == color).unwrap();
        let donor = (0..color_of.len())
            .find(|&d| d != lone && class_size[color_of[d]] >= 3 && !adj[lone].contains(&d));
        if let Some(d) = donor {
            class_size[color_of[d]] -= 1;
            color_of[d] = color;
            class_size[color] += 1;
        }
    }
}

pub fn build_pi1(t: &Tessellation, params: &ScheduleParams) -> Result<Schedule, ScheduleError> {
    let radius = params.pi1_range_mult * t.rho_n();
    let adj = conflict_graph(t, radius);
    let (mut color_of, num_colors) = greedy_color(&adj);
    balance_singleton_classes(&adj, &mut color_of, num_colors);
    Ok(Schedule {
        policy: Policy::Pi1,
        color_of,
        num_colors,
        exclusion_radius: radius,
        fallback_per_cell: false,
    })
}

pub fn build_pi2(t: &Tessellation, n: f64, alpha: f64) -> Result<Schedule, ScheduleError> {
    let r = exclusion_radius_for_rho(t.rho_n(), n, alpha)?;
    let m = t.num_cells();
    if r >= t.sphere().half_circumference() {
        // Complete conflict graph: one slot per cell.
        return Ok(Schedule {
            policy: Policy::Pi2,
            color_of: (0..m).collect(),
            num_colors: m,
            exclusion_radius: r,
            fallback_per_cell: true,
        });
    }
    let adj = conflict_graph(t, r);
    let (color_of, num_colors) = greedy_color(&adj);
    Ok(Schedule {
        policy: Policy::Pi2,
        color_of,
        num_colors,
        exclusion_radius: r,
        fallback_per_cell: false,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleReport {
    /// Same-color cell pairs closer than the checked radius.
    pub conflicting_pairs: Vec<(usize, usize)>,
}

impl ScheduleReport {
    pub fn is_valid(&self) -> bool {
        self.conflicting_pairs.is_empty()
    }
}

pub fn verify_schedule(s: &Schedule, t: &Tessellation, radius: f64) -> ScheduleReport {
    let m = t.num_cells();
    let mut conflicting_pairs = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if s.color_of[i] != s.color_of[j] {
                continue;
            }
            let gd = crate::sphere::geodesic_distance(t.generator(i), t.generator(j), t.sphere());
            let slack = t.cell(i).circum_radius + t.cell(j).circum_radius;
            let close = if gd <= radius {
                true
            } else if gd - slack > radius {
                false
            } else {
                t.cell_distance(i, j) <= radius
            };
            if close {
                conflicting_pairs.push((i, j));
            }
        }
    }
    ScheduleReport { conflicting_pairs }
}
