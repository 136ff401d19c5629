//! Voronoi tessellation of the sphere with the (rho_n, 2 rho_n) cell
//! sandwich: every cell contains a geodesic disk of radius rho_n and is
//! contained in one of radius 2 rho_n.
//!
//! Construction: greedy maximal packing of generators at pairwise distance
//! >= 2 rho_n (rejection sampling, with a consecutive-rejection certificate),
//! then spherical Voronoi via the convex hull of the generators. Any Voronoi
//! vertex left farther than 2 rho_n from every generator is itself inserted
//! as a generator, which restores the covering property exactly.

mod hull;

use serde::{Deserialize, Serialize};

use crate::error::TessellationError;
use crate::rng::RngStream;
use crate::sphere::{
    geodesic_distance, point_to_segment_distance, sample_uniform_point,
    segment_to_segment_distance,
};
use crate::{GeodesicSegment, SphereParams, SpherePoint};

/// How the cell scale rho_n is derived from the node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RhoConvention {
    /// rho_n = c * sqrt(ln n). The classical connectivity choice is c = 10.
    SqrtLog { c: f64 },
    /// rho_n = radius of a geodesic disk of area 100 ln n.
    CircleArea,
    /// rho_n = c * n^gamma. Used for desk-scale experiments where the
    /// sqrt-log conventions leave too few cells on the sphere.
    Power { c: f64, gamma: f64 },
}

impl Default for RhoConvention {
    fn default() -> Self {
        RhoConvention::SqrtLog { c: 10.0 }
    }
}

impl RhoConvention {
    pub fn rho(&self, n: f64) -> f64 {
        match *self {
            RhoConvention::SqrtLog { c } => c * n.ln().sqrt(),
            RhoConvention::CircleArea => {
                // Invert cap_area(r) = 100 ln n on the sphere of area n.
                let a = 100.0 * n.ln();
                let cosv = (1.0 - 2.0 * a / n).clamp(-1.0, 1.0);
                n.sqrt() / (2.0 * std::f64::consts::PI.sqrt()) * cosv.acos()
            }
            RhoConvention::Power { c, gamma } => c * n.powf(gamma),
        }
    }
}

/// Cell scale parameter together with the node count that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub rho_n: f64,
    pub n: f64,
}

impl CellGeometry {
    pub fn new(n: f64, convention: &RhoConvention) -> Result<Self, TessellationError> {
        Self::with_rho(n, convention.rho(n))
    }

    /// Explicit rho. Rejects rho that cannot satisfy the quarter-circumference
    /// feasibility bound.
    pub fn with_rho(n: f64, rho_n: f64) -> Result<Self, TessellationError> {
        let quarter = (std::f64::consts::PI * n).sqrt() / 4.0;
        if !(rho_n > 0.0) || rho_n >= quarter {
            return Err(TessellationError::InfeasibleRho {
                rho: rho_n,
                area: n,
                reason: "rho_n must lie in (0, sqrt(pi n)/4)",
            });
        }
        Ok(Self { rho_n, n })
    }
}

/// One Voronoi cell: boundary polygon plus measured radii and area.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Boundary vertices, ordered around the generator.
    pub vertices: Vec<SpherePoint>,
    pub area: f64,
    pub in_radius: f64,
    pub circum_radius: f64,
}

#[derive(Debug, Clone)]
pub struct Tessellation {
    sp: SphereParams,
    rho_n: f64,
    generators: Vec<SpherePoint>,
    cells: Vec<Cell>,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<Vec<GeodesicSegment>>,
}

/// Consecutive rejected candidates that certify (probabilistic) maximality.
pub const MAXIMALITY_CERTIFICATE: u32 = 10_000;

const MIN_GENERATORS: usize = 8;

pub fn build_tessellation(
    sp: &SphereParams,
    cg: &CellGeometry,
    rng: &mut RngStream,
) -> Result<Tessellation, TessellationError> {
    build_tessellation_with(sp, cg, MAXIMALITY_CERTIFICATE, rng)
}

pub fn build_tessellation_with(
    sp: &SphereParams,
    cg: &CellGeometry,
    certificate: u32,
    rng: &mut RngStream,
) -> Result<Tessellation, TessellationError> {
    let rho = cg.rho_n;
    let min_angle = 2.0 * rho / sp.radius();
    if min_angle >= std::f64::consts::PI {
        return Err(TessellationError::InfeasibleRho {
            rho,
            area: sp.area(),
            reason: "2*rho_n exceeds the half-circumference",
        });
    }
    let cos_thresh = min_angle.cos();

    let mut gens: Vec<SpherePoint> = Vec::new();
    let mut rejections = 0u32;
    while rejections < certificate {
        let cand: SpherePoint = sample_uniform_point(rng);
        if gens.iter().all(|g| g.dot(&cand) <= cos_thresh) {
            gens.push(cand);
            rejections = 0;
        } else {
            rejections += 1;
        }
    }

    // Deterministic covering repair: insert any Voronoi vertex farther than
    // 2*rho from all generators (it is itself 2*rho-separated, so the packing
    // property is preserved).
    let mut tess = loop {
        if gens.len() < MIN_GENERATORS {
            return Err(TessellationError::TooFewGenerators {
                min: MIN_GENERATORS,
                sep: 2.0 * rho,
                got: gens.len(),
            });
        }
        let t = from_generators(sp, rho, gens.clone())?;
        let mut worst: Option<(f64, SpherePoint)> = None;
        for (i, cell) in t.cells.iter().enumerate() {
            for v in &cell.vertices {
                let d = geodesic_distance(&t.generators[i], v, sp);
                if d > 2.0 * rho * (1.0 + 1e-12) && worst.map_or(true, |(w, _)| d > w) {
                    worst = Some((d, *v));
                }
            }
        }
        match worst {
            Some((_, v)) => gens.push(v),
            None => break t,
        }
    };
    tess.rho_n = rho;
    Ok(tess)
}

/// Voronoi tessellation from an explicit generator set (no packing step).
pub fn from_generators(
    sp: &SphereParams,
    rho_n: f64,
    generators: Vec<SpherePoint>,
) -> Result<Tessellation, TessellationError> {
    let pts: Vec<[f64; 3]> = generators.iter().map(|g| g.unit_vector()).collect();
    let faces = hull::convex_hull(&pts)?;

    let m = generators.len();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut centers: Vec<SpherePoint> = Vec::with_capacity(faces.len());
    for (fi, f) in faces.iter().enumerate() {
        let [a, b, c] = *f;
        let pa = pts[a];
        let ab = [pts[b][0] - pa[0], pts[b][1] - pa[1], pts[b][2] - pa[2]];
        let ac = [pts[c][0] - pa[0], pts[c][1] - pa[1], pts[c][2] - pa[2]];
        let n = [
            ab[1] * ac[2] - ab[2] * ac[1],
            ab[2] * ac[0] - ab[0] * ac[2],
            ab[0] * ac[1] - ab[1] * ac[0],
        ];
        centers.push(SpherePoint::new(n[0], n[1], n[2]));
        for v in [a, b, c] {
            incident[v].push(fi);
        }
        for (u, v) in [(a, b), (b, c), (c, a)] {
            if !adjacency[u].contains(&v) {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }

    let mut cells = Vec::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for (gi, g) in generators.iter().enumerate() {
        let gv = g.unit_vector();
        // Local tangent frame for ordering the incident circumcenters.
        let any = if gv[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let mut e1 = [
            any[1] * gv[2] - any[2] * gv[1],
            any[2] * gv[0] - any[0] * gv[2],
            any[0] * gv[1] - any[1] * gv[0],
        ];
        let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
        let e2 = [
            gv[1] * e1[2] - gv[2] * e1[1],
            gv[2] * e1[0] - gv[0] * e1[2],
            gv[0] * e1[1] - gv[1] * e1[0],
        ];
        let mut verts: Vec<(f64, SpherePoint)> = incident[gi]
            .iter()
            .map(|&fi| {
                let c = centers[fi].unit_vector();
                let x = c[0] * e1[0] + c[1] * e1[1] + c[2] * e1[2];
                let y = c[0] * e2[0] + c[1] * e2[1] + c[2] * e2[2];
                (y.atan2(x), centers[fi])
            })
            .collect();
        verts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let vertices: Vec<SpherePoint> = verts.into_iter().map(|(_, v)| v).collect();
        if vertices.len() < 3 {
            return Err(TessellationError::Hull("cell with fewer than 3 vertices"));
        }

        let k = vertices.len();
        let cell_edges: Vec<GeodesicSegment> = (0..k)
            .map(|i| GeodesicSegment::new(vertices[i], vertices[(i + 1) % k], sp))
            .collect();
        let circum_radius = vertices
            .iter()
            .map(|v| geodesic_distance(g, v, sp))
            .fold(0.0, f64::max);
        let in_radius = cell_edges
            .iter()
            .map(|e| point_to_segment_distance(g, e, sp))
            .fold(f64::INFINITY, f64::min);
        let area = spherical_polygon_area(&vertices, sp);
        cells.push(Cell {
            vertices,
            area,
            in_radius,
            circum_radius,
        });
        edges.push(cell_edges);
    }

    Ok(Tessellation {
        sp: *sp,
        rho_n,
        generators,
        cells,
        adjacency,
        edges,
    })
}

fn spherical_polygon_area(vertices: &[SpherePoint], sp: &SphereParams) -> f64 {
    // Spherical excess: sum of interior angles minus (k - 2) pi.
    let k = vertices.len();
    let mut sum = 0.0;
    for i in 0..k {
        let v = vertices[i].unit_vector();
        let u = vertices[(i + k - 1) % k].unit_vector();
        let w = vertices[(i + 1) % k].unit_vector();
        let tu = tangent_toward(v, u);
        let tw = tangent_toward(v, w);
        let cx = [
            tu[1] * tw[2] - tu[2] * tw[1],
            tu[2] * tw[0] - tu[0] * tw[2],
            tu[0] * tw[1] - tu[1] * tw[0],
        ];
        let s = (cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2]).sqrt();
        let c = tu[0] * tw[0] + tu[1] * tw[1] + tu[2] * tw[2];
        sum += s.atan2(c);
    }
    (sum - (k as f64 - 2.0) * std::f64::consts::PI) * sp.radius() * sp.radius()
}

fn tangent_toward(v: [f64; 3], target: [f64; 3]) -> [f64; 3] {
    let d = target[0] * v[0] + target[1] * v[1] + target[2] * v[2];
    let t = [
        target[0] - d * v[0],
        target[1] - d * v[1],
        target[2] - d * v[2],
    ];
    let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    [t[0] / n, t[1] / n, t[2] / n]
}

impl Tessellation {
    pub fn sphere(&self) -> &SphereParams {
        &self.sp
    }

    pub fn rho_n(&self) -> f64 {
        self.rho_n
    }

    pub fn num_cells(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, cell: usize) -> &SpherePoint {
        &self.generators[cell]
    }

    pub fn generators(&self) -> &[SpherePoint] {
        &self.generators
    }

    pub fn cell(&self, cell: usize) -> &Cell {
        &self.cells[cell]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn neighbors(&self, cell: usize) -> &[usize] {
        &self.adjacency[cell]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn boundary_edges(&self, cell: usize) -> &[GeodesicSegment] {
        &self.edges[cell]
    }

    /// Cell of the nearest generator; ties broken by lowest cell id.
    pub fn locate_cell(&self, p: &SpherePoint) -> usize {
        let mut best = 0usize;
        let mut best_dot = self.generators[0].dot(p);
        for (i, g) in self.generators.iter().enumerate().skip(1) {
            let d = g.dot(p);
            if d > best_dot {
                best = i;
                best_dot = d;
            }
        }
        best
    }

    /// Nearest-generator descent over the adjacency graph, starting from
    /// `hint`. Equivalent to `locate_cell` (the distance-to-p function has no
    /// non-global local minimum over Delaunay neighborhoods).
    pub fn locate_cell_from(&self, p: &SpherePoint, hint: usize) -> usize {
        let mut cur = hint.min(self.generators.len() - 1);
        let mut cur_dot = self.generators[cur].dot(p);
        loop {
            let mut best = cur;
            let mut best_dot = cur_dot;
            for &j in &self.adjacency[cur] {
                let d = self.generators[j].dot(p);
                if d > best_dot || (d == best_dot && j < best) {
                    best = j;
                    best_dot = d;
                }
            }
            if best == cur {
                return cur;
            }
            cur = best;
            cur_dot = best_dot;
        }
    }

    /// Minimum geodesic distance between the boundaries of two cells
    /// (0 for the same cell and for adjacent cells).
    pub fn cell_distance(&self, a: usize, b: usize) -> f64 {
        if a == b || self.are_adjacent(a, b) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for ea in &self.edges[a] {
            for eb in &self.edges[b] {
                best = best.min(segment_to_segment_distance(ea, eb, &self.sp));
            }
        }
        best
    }

    /// All cells whose boundary lies within geodesic distance `d` of cell
    /// `c`'s boundary; always includes `c` itself.
    pub fn cells_within(&self, c: usize, d: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let gc = &self.generators[c];
        let rc = self.cells[c].circum_radius;
        for j in 0..self.num_cells() {
            if j == c || self.are_adjacent(c, j) {
                out.push(j);
                continue;
            }
            let gd = geodesic_distance(gc, &self.generators[j], &self.sp);
            if gd <= d {
                out.push(j);
                continue;
            }
            if gd - rc - self.cells[j].circum_radius > d {
                continue;
            }
            if self.cell_distance(c, j) <= d {
                out.push(j);
            }
        }
        out
    }
}

/// Violation found by [`verify_tessellation`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TessellationViolation {
    pub cell: Option<usize>,
    pub check: String,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TessellationReport {
    pub cell_count: usize,
    pub area_sum: f64,
    pub violations: Vec<TessellationViolation>,
}

impl TessellationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_tessellation(t: &Tessellation, cg: &CellGeometry) -> TessellationReport {
    let rho = cg.rho_n;
    let mut violations = Vec::new();
    let mut area_sum = 0.0;
    for (i, cell) in t.cells().iter().enumerate() {
        area_sum += cell.area;
        if cell.in_radius < rho * (1.0 - 1e-9) {
            violations.push(TessellationViolation {
                cell: Some(i),
                check: "in_radius >= rho_n".into(),
                value: cell.in_radius,
                limit: rho,
            });
        }
        if cell.circum_radius > 2.0 * rho * (1.0 + 1e-9) {
            violations.push(TessellationViolation {
                cell: Some(i),
                check: "circum_radius <= 2*rho_n".into(),
                value: cell.circum_radius,
                limit: 2.0 * rho,
            });
        }
        let min_area = std::f64::consts::PI * rho * rho / 2.0;
        if cell.area < min_area * (1.0 - 1e-9) {
            violations.push(TessellationViolation {
                cell: Some(i),
                check: "area >= pi rho_n^2 / 2".into(),
                value: cell.area,
                limit: min_area,
            });
        }
    }
    let n = t.sphere().area();
    if ((area_sum - n) / n).abs() > 1e-6 {
        violations.push(TessellationViolation {
            cell: None,
            check: "cell areas partition the sphere".into(),
            value: area_sum,
            limit: n,
        });
    }
    TessellationReport {
        cell_count: t.num_cells(),
        area_sum,
        violations,
    }
}

/// Versioned serialization document for experiment reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TessellationDoc {
    pub schema_version: u32,
    pub area_n: f64,
    pub rho_n: f64,
    /// Generators as unit vectors.
    pub generators: Vec<[f64; 3]>,
    pub adjacency: Vec<Vec<usize>>,
}

pub const TESSELLATION_SCHEMA_VERSION: u32 = 1;

impl Tessellation {
    pub fn to_doc(&self) -> TessellationDoc {
        TessellationDoc {
            schema_version: TESSELLATION_SCHEMA_VERSION,
            area_n: self.sp.area(),
            rho_n: self.rho_n,
            generators: self.generators.iter().map(|g| g.unit_vector()).collect(),
            adjacency: self.adjacency.clone(),
        }
    }

    pub fn from_doc(doc: &TessellationDoc) -> Result<Self, TessellationError> {
        let sp = SphereParams::from_area(doc.area_n)
            .map_err(|_| TessellationError::Hull("invalid sphere area in document"))?;
        let gens = doc
            .generators
            .iter()
            .map(|v| SpherePoint::new(v[0], v[1], v[2]))
            .collect();
        from_generators(&sp, doc.rho_n, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::cap_area;

    fn build(n: f64, c: f64, seed: u64) -> (SphereParams, CellGeometry, Tessellation) {
        let sp = SphereParams::from_area(n).unwrap();
        let cg = CellGeometry::new(n, &RhoConvention::SqrtLog { c }).unwrap();
        let t = build_tessellation(&sp, &cg, &mut RngStream::new(seed)).unwrap();
        (sp, cg, t)
    }

    #[test]
    fn classic_convention_is_infeasible_at_desk_scale() {
        // With rho_n = 10 sqrt(ln n), n = 4096 violates rho_n < sqrt(pi n)/4.
        let err = CellGeometry::new(4096.0, &RhoConvention::default());
        assert!(err.is_err());
    }

    #[test]
    fn built_tessellation_passes_verification() {
        let (_, cg, t) = build(4096.0, 1.0, 42);
        let report = verify_tessellation(&t, &cg);
        assert!(report.is_valid(), "violations: {:?}", report.violations);
    }

    #[test]
    fn cell_count_between_packing_and_covering_bounds() {
        let (sp, cg, t) = build(4096.0, 1.0, 7);
        let rho = cg.rho_n;
        let lower = sp.area() / cap_area(2.0 * rho, &sp).unwrap();
        let upper = 2.0 * sp.area() / (std::f64::consts::PI * rho * rho);
        let m = t.num_cells() as f64;
        assert!(m >= lower, "count {m} < covering bound {lower}");
        assert!(m <= upper, "count {m} > packing bound {upper}");
    }

    #[test]
    fn deterministic_given_seed() {
        let (_, _, t1) = build(2048.0, 1.0, 99);
        let (_, _, t2) = build(2048.0, 1.0, 99);
        assert_eq!(t1.num_cells(), t2.num_cells());
        for (a, b) in t1.generators().iter().zip(t2.generators()) {
            assert_eq!(a.unit_vector(), b.unit_vector());
        }
    }

    #[test]
    fn generators_form_2rho_packing() {
        let (sp, cg, t) = build(2048.0, 1.0, 3);
        for i in 0..t.num_cells() {
            for j in (i + 1)..t.num_cells() {
                let d = geodesic_distance(t.generator(i), t.generator(j), &sp);
                assert!(d >= 2.0 * cg.rho_n * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn locate_generator_maps_to_own_cell() {
        let (_, _, t) = build(2048.0, 1.0, 5);
        for i in 0..t.num_cells() {
            assert_eq!(t.locate_cell(t.generator(i)), i);
        }
    }

    #[test]
    fn hinted_locate_agrees_with_scan() {
        let (_, _, t) = build(4096.0, 1.0, 13);
        let mut rng = RngStream::new(14);
        for _ in 0..10_000 {
            let p: SpherePoint = sample_uniform_point(&mut rng);
            let brute = t.locate_cell(&p);
            let hint = rng.uniform_usize(t.num_cells());
            assert_eq!(t.locate_cell_from(&p, hint), brute);
        }
    }

    #[test]
    fn equidistant_tie_goes_to_lower_id() {
        // Octahedron generators: +x is id 0, +y is id 2.
        let sp = SphereParams::from_area(4.0 * std::f64::consts::PI).unwrap();
        let gens = vec![
            SpherePoint::new(1.0, 0.0, 0.0),
            SpherePoint::new(-1.0, 0.0, 0.0),
            SpherePoint::new(0.0, 1.0, 0.0),
            SpherePoint::new(0.0, -1.0, 0.0),
            SpherePoint::new(0.0, 0.0, 1.0),
            SpherePoint::new(0.0, 0.0, -1.0),
        ];
        let t = from_generators(&sp, 0.3, gens).unwrap();
        let tie = SpherePoint::new(1.0, 1.0, 0.0);
        assert_eq!(t.locate_cell(&tie), 0);
    }

    #[test]
    fn adjacency_symmetric_irreflexive() {
        let (_, _, t) = build(2048.0, 1.0, 21);
        for i in 0..t.num_cells() {
            assert!(!t.are_adjacent(i, i));
            for &j in t.neighbors(i) {
                assert!(t.are_adjacent(j, i));
            }
        }
    }

    #[test]
    fn cells_within_zero_is_closed_neighborhood() {
        let (_, _, t) = build(2048.0, 1.0, 31);
        let c = 0;
        let mut expect: Vec<usize> = t.neighbors(c).to_vec();
        expect.push(c);
        expect.sort_unstable();
        let mut got = t.cells_within(c, 0.0);
        got.sort_unstable();
        assert_eq!(got, expect);
    }

    #[test]
    fn cells_within_half_circumference_is_everything() {
        let (sp, _, t) = build(2048.0, 1.0, 31);
        let got = t.cells_within(3, sp.half_circumference());
        assert_eq!(got.len(), t.num_cells());
    }

    #[test]
    fn cells_within_respects_packing_count_bound() {
        let (sp, cg, t) = build(4096.0, 1.0, 55);
        let rho = cg.rho_n;
        for &d in &[2.0 * rho, 5.0 * rho, 10.0 * rho] {
            let disk = (d + 4.0 * rho).min(sp.half_circumference());
            let vbound = cap_area(disk, &sp).unwrap() / (std::f64::consts::PI * rho * rho / 2.0);
            for c in [0, t.num_cells() / 2] {
                let got = t.cells_within(c, d).len() as f64;
                assert!(got <= vbound, "d={d}: {got} > {vbound}");
            }
        }
    }

    #[test]
    fn perturbed_generator_fails_verification() {
        let (sp, cg, t) = build(2048.0, 1.0, 61);
        let mut gens = t.generators().to_vec();
        // Drag one generator 3 rho_n toward its first neighbor.
        let target = gens[t.neighbors(0)[0]];
        let theta = gens[0].angle_to(&target);
        let frac = (3.0 * cg.rho_n / sp.radius()) / theta;
        gens[0] = gens[0].slerp(&target, frac.min(0.9));
        let bad = from_generators(&sp, cg.rho_n, gens).unwrap();
        let report = verify_tessellation(&bad, &cg);
        assert!(!report.is_valid());
    }

    #[test]
    fn doc_round_trip() {
        let (_, _, t) = build(2048.0, 1.0, 71);
        let doc = t.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: TessellationDoc = serde_json::from_str(&json).unwrap();
        let t2 = Tessellation::from_doc(&parsed).unwrap();
        assert_eq!(t.num_cells(), t2.num_cells());
        for i in 0..t.num_cells() {
            // Re-normalization on load may move components by an ulp.
            let a = t.generator(i).unit_vector();
            let b = t2.generator(i).unit_vector();
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() <= 1e-14, "{a:?} vs {b:?}");
            }
            assert_eq!(t.neighbors(i), t2.neighbors(i));
        }
    }
}
