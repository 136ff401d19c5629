//! Node placement and traffic setup: n uniform nodes bound to their Voronoi
//! cells, a random destination per source, and the per-source injection rate.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::rng::RngStream;
use crate::sphere::sample_uniform_point;
use crate::tessellation::Tessellation;
use crate::SpherePoint;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeSet {
    pub positions: Vec<SpherePoint>,
    /// Cell id of each node.
    pub cell_of: Vec<usize>,
    /// Node ids held by each cell.
    pub nodes_in: Vec<Vec<usize>>,
}

impl NodeSet {
    /// Bind explicit positions to their cells.
    pub fn bind(positions: Vec<SpherePoint>, t: &Tessellation) -> Self {
        let mut cell_of = Vec::with_capacity(positions.len());
        let mut nodes_in = vec![Vec::new(); t.num_cells()];
        let mut hint = 0usize;
        for (i, p) in positions.iter().enumerate() {
            hint = t.locate_cell_from(p, hint);
            cell_of.push(hint);
            nodes_in[hint].push(i);
        }
        Self {
            positions,
            cell_of,
            nodes_in,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Smallest per-cell node count.
    pub fn min_cell_count(&self) -> usize {
        self.nodes_in.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Whether every cell holds at least 50 ln n nodes. This is a
    /// high-probability event, not a guarantee; experiments record the flag.
    pub fn cell_occupancy_ok(&self) -> bool {
        let n = self.len() as f64;
        self.min_cell_count() as f64 >= 50.0 * n.ln()
    }
}

pub fn deploy(n: usize, t: &Tessellation, rng: &mut RngStream) -> NodeSet {
    assert!(n >= 2, "need at least 2 nodes");
    let positions: Vec<SpherePoint> = (0..n).map(|_| sample_uniform_point(rng)).collect();
    NodeSet::bind(positions, t)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrafficMatrix {
    /// Destination node of each source node; never the source itself.
    pub dest_of: Vec<usize>,
    /// Injection rate, packets per slot per source.
    pub lambda_n: f64,
    /// Channel rate W; throughput figures scale linearly with it.
    pub bandwidth_w: f64,
}

pub fn assign_destinations(ns: &NodeSet, rng: &mut RngStream) -> TrafficMatrix {
    let n = ns.len();
    assert!(n >= 2, "need at least 2 nodes");
    let dest_of = (0..n)
        .map(|i| loop {
            // Rejection keeps the destination exactly uniform over the others.
            let d = rng.uniform_usize(n);
            if d != i {
                break d;
            }
        })
        .collect();
    let lambda_n = max_injection_rate(n as f64).unwrap_or(1.0);
    TrafficMatrix {
        dest_of,
        lambda_n,
        bandwidth_w: 1.0,
    }
}

/// Per-source injection rate cap 1/(50 ln n).
pub fn max_injection_rate(n: f64) -> Result<f64, AnalysisError> {
    if n <= std::f64::consts::E {
        return Err(AnalysisError::Domain {
            name: "n",
            value: n,
            constraint: "n > e so that ln n > 1 and the rate cap is positive",
        });
    }
    Ok(1.0 / (50.0 * n.ln()))
}
