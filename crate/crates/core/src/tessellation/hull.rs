//! Incremental 3D convex hull of points on the unit sphere. The hull faces
//! of unit vectors are exactly the spherical Delaunay triangles, which is all
//! the Voronoi construction needs.

use crate::error::TessellationError;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy)]
struct Face {
    v: [usize; 3],
    normal: V3,
    alive: bool,
}

impl Face {
    fn new(pts: &[V3], a: usize, b: usize, c: usize) -> Self {
        let n = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
        Face {
            v: [a, b, c],
            normal: n,
            alive: true,
        }
    }

    // Coplanar counts as visible: cocircular inputs (four sphere points on a
    // common plane) otherwise leave a point that sees no face, breaking the
    // incremental update. Re-fanning the coplanar patch is always valid.
    fn sees(&self, pts: &[V3], p: V3) -> bool {
        dot(self.normal, sub(p, pts[self.v[0]])) > -1e-10
    }
}

/// Outward-oriented triangular faces of the convex hull of `pts`
/// (all points assumed extreme, i.e. on the unit sphere, pairwise distinct).
pub fn convex_hull(pts: &[V3]) -> Result<Vec<[usize; 3]>, TessellationError> {
    if pts.len() < 4 {
        return Err(TessellationError::Hull("need at least 4 points"));
    }
    let (t0, t1, t2, t3) = initial_tetrahedron(pts)?;
    let mut faces: Vec<Face> = Vec::new();
    for (a, b, c, d) in [
        (t0, t1, t2, t3),
        (t0, t2, t3, t1),
        (t0, t3, t1, t2),
        (t1, t3, t2, t0),
    ] {
        let mut f = Face::new(pts, a, b, c);
        // Orient outward: the opposite tetrahedron vertex is interior. (The
        // origin is not: all four seed points can lie in one hemisphere.)
        if dot(f.normal, sub(pts[d], pts[a])) > 0.0 {
            f = Face::new(pts, a, c, b);
        }
        faces.push(f);
    }

    let seed: Vec<usize> = vec![t0, t1, t2, t3];
    for (i, &p) in pts.iter().enumerate() {
        if seed.contains(&i) {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.sees(pts, p))
            .map(|(k, _)| k)
            .collect();
        if visible.is_empty() {
            return Err(TessellationError::Hull("point not outside current hull"));
        }
        // Horizon: directed edges of visible faces whose reversal is not in
        // a visible face.
        let mut dir_edges: Vec<(usize, usize)> = Vec::new();
        for &k in &visible {
            let [a, b, c] = faces[k].v;
            dir_edges.extend_from_slice(&[(a, b), (b, c), (c, a)]);
        }
        for &k in &visible {
            faces[k].alive = false;
        }
        for &(u, v) in &dir_edges {
            if !dir_edges.contains(&(v, u)) {
                faces.push(Face::new(pts, u, v, i));
            }
        }
    }

    let out: Vec<[usize; 3]> = faces.iter().filter(|f| f.alive).map(|f| f.v).collect();
    // Closed 2-sphere mesh: F = 2V - 4.
    let used: std::collections::BTreeSet<usize> = out.iter().flatten().copied().collect();
    if used.len() != pts.len() || out.len() != 2 * pts.len() - 4 {
        return Err(TessellationError::Hull("inconsistent hull topology"));
    }
    Ok(out)
}

fn initial_tetrahedron(pts: &[V3]) -> Result<(usize, usize, usize, usize), TessellationError> {
    let a = 0;
    let b = (1..pts.len())
        .max_by(|&i, &j| {
            norm(sub(pts[i], pts[a]))
                .partial_cmp(&norm(sub(pts[j], pts[a])))
                .unwrap()
        })
        .ok_or(TessellationError::Hull("too few points"))?;
    let c = (0..pts.len())
        .filter(|&i| i != a && i != b)
        .max_by(|&i, &j| {
            let ni = norm(cross(sub(pts[b], pts[a]), sub(pts[i], pts[a])));
            let nj = norm(cross(sub(pts[b], pts[a]), sub(pts[j], pts[a])));
            ni.partial_cmp(&nj).unwrap()
        })
        .ok_or(TessellationError::Hull("too few points"))?;
    let nrm = cross(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
    let d = (0..pts.len())
        .filter(|&i| i != a && i != b && i != c)
        .max_by(|&i, &j| {
            let di = dot(nrm, sub(pts[i], pts[a])).abs();
            let dj = dot(nrm, sub(pts[j], pts[a])).abs();
            di.partial_cmp(&dj).unwrap()
        })
        .ok_or(TessellationError::Hull("too few points"))?;
    if dot(nrm, sub(pts[d], pts[a])).abs() < 1e-12 {
        return Err(TessellationError::Hull("points are coplanar"));
    }
    Ok((a, b, c, d))
}
