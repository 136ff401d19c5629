//! Geometry on a sphere of area `n`. All distances are geodesic, measured
//! along the surface. Angles are computed with `atan2` of cross/dot products
//! rather than `acos`, which loses precision near 0 and pi.

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::real::Real;
use crate::rng::RngStream;

/// Sphere of area `n`; radius is derived as sqrt(n / 4 pi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereParams<F> {
    area_n: F,
    radius: F,
}

impl<F: Real> SphereParams<F> {
    pub fn from_area(area_n: F) -> Result<Self, GeometryError> {
        if !(area_n > F::zero()) {
            return Err(GeometryError::NonPositiveArea(
                area_n.to_f64().unwrap_or(f64::NAN),
            ));
        }
        let radius = (area_n / (F::of(4.0) * F::PI())).sqrt();
        Ok(Self { area_n, radius })
    }

    pub fn area(&self) -> F {
        self.area_n
    }

    pub fn radius(&self) -> F {
        self.radius
    }

    /// Largest geodesic distance on the sphere: half the circumference,
    /// sqrt(pi n) / 2.
    pub fn half_circumference(&self) -> F {
        (F::PI() * self.area_n).sqrt() / F::of(2.0)
    }
}

/// Unit direction on the sphere; the surface position is `radius * unit_vector`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint<F> {
    v: [F; 3],
}

impl<F: Real> SpherePoint<F> {
    /// Normalizes the given direction. Panics on the zero vector.
    pub fn new(x: F, y: F, z: F) -> Self {
        let n = (x * x + y * y + z * z).sqrt();
        assert!(n > F::zero(), "zero direction vector");
        Self {
            v: [x / n, y / n, z / n],
        }
    }

    pub fn unit_vector(&self) -> [F; 3] {
        self.v
    }

    pub fn dot(&self, o: &Self) -> F {
        self.v[0] * o.v[0] + self.v[1] * o.v[1] + self.v[2] * o.v[2]
    }

    pub fn cross(&self, o: &Self) -> [F; 3] {
        [
            self.v[1] * o.v[2] - self.v[2] * o.v[1],
            self.v[2] * o.v[0] - self.v[0] * o.v[2],
            self.v[0] * o.v[1] - self.v[1] * o.v[0],
        ]
    }

    /// Central angle to `o`, in [0, pi].
    pub fn angle_to(&self, o: &Self) -> F {
        let c = self.cross(o);
        let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        cn.atan2(self.dot(o))
    }

    pub fn antipode(&self) -> Self {
        Self {
            v: [-self.v[0], -self.v[1], -self.v[2]],
        }
    }

    /// Point at fraction `t` along the minor great-circle arc to `o`.
    pub fn slerp(&self, o: &Self, t: F) -> Self {
        let theta = self.angle_to(o);
        if theta == F::zero() {
            return *self;
        }
        let s = theta.sin();
        let (wa, wb) = (((F::one() - t) * theta).sin() / s, (t * theta).sin() / s);
        Self::new(
            wa * self.v[0] + wb * o.v[0],
            wa * self.v[1] + wb * o.v[1],
            wa * self.v[2] + wb * o.v[2],
        )
    }
}

/// Geodesic arc between two points, together with its length.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicSegment<F> {
    pub a: SpherePoint<F>,
    pub b: SpherePoint<F>,
    pub length: F,
}

impl<F: Real> GeodesicSegment<F> {
    pub fn new(a: SpherePoint<F>, b: SpherePoint<F>, sp: &SphereParams<F>) -> Self {
        let length = geodesic_distance(&a, &b, sp);
        Self { a, b, length }
    }

    pub fn point_at(&self, t: F) -> SpherePoint<F> {
        self.a.slerp(&self.b, t)
    }
}

/// Uniform point on the sphere, deterministic given the stream state.
pub fn sample_uniform_point<F: Real>(rng: &mut RngStream) -> SpherePoint<F> {
    // z uniform in [-1, 1], longitude uniform: area-preserving cylindrical map.
    let z = rng.uniform_in(-1.0, 1.0);
    let phi = rng.uniform_in(0.0, std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    SpherePoint::new(
        F::of(r * phi.cos()),
        F::of(r * phi.sin()),
        F::of(z),
    )
}

/// Geodesic distance: radius times the central angle.
pub fn geodesic_distance<F: Real>(
    a: &SpherePoint<F>,
    b: &SpherePoint<F>,
    sp: &SphereParams<F>,
) -> F {
    sp.radius() * a.angle_to(b)
}

/// Area of the geodesic disk of radius `l`: (n/2)(1 - cos(2 sqrt(pi) l / sqrt(n))).
pub fn cap_area<F: Real>(l: F, sp: &SphereParams<F>) -> Result<F, GeometryError> {
    let max = sp.half_circumference();
    if l < F::zero() || l > max {
        return Err(GeometryError::OutOfDomain {
            value: l.to_f64().unwrap_or(f64::NAN),
            min: 0.0,
            max: max.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = sp.area();
    let arg = F::of(2.0) * F::PI().sqrt() * l / n.sqrt();
    Ok(n / F::of(2.0) * (F::one() - arg.cos()))
}

/// CDF of the distance between two uniform points; equals cap_area(l) / n.
pub fn pair_distance_cdf<F: Real>(l: F, sp: &SphereParams<F>) -> Result<F, GeometryError> {
    Ok(cap_area(l, sp)? / sp.area())
}

/// Closest point of the arc to `p`, as (arc parameter in [0,1], point).
pub fn closest_point_on_segment<F: Real>(
    p: &SpherePoint<F>,
    seg: &GeodesicSegment<F>,
) -> (F, SpherePoint<F>) {
    let theta = seg.a.angle_to(&seg.b);
    if theta == F::zero() {
        return (F::zero(), seg.a);
    }
    let c = seg.a.cross(&seg.b);
    let cn = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    let n = [c[0] / cn, c[1] / cn, c[2] / cn];
    let pv = p.unit_vector();
    let d = pv[0] * n[0] + pv[1] * n[1] + pv[2] * n[2];
    let proj = [pv[0] - d * n[0], pv[1] - d * n[1], pv[2] - d * n[2]];
    let pn = (proj[0] * proj[0] + proj[1] * proj[1] + proj[2] * proj[2]).sqrt();
    if pn > F::zero() {
        let q = SpherePoint::new(proj[0], proj[1], proj[2]);
        // q is on the arc iff the angles to the endpoints add up to the arc angle.
        let eps = F::of(1e-9) * theta.max(F::one());
        if (seg.a.angle_to(&q) + q.angle_to(&seg.b) - theta).abs() <= eps {
            let t = seg.a.angle_to(&q) / theta;
            return (t, q);
        }
    }
    if p.angle_to(&seg.a) <= p.angle_to(&seg.b) {
        (F::zero(), seg.a)
    } else {
        (F::one(), seg.b)
    }
}

/// Minimum geodesic distance from `p` to any point of the arc.
pub fn point_to_segment_distance<F: Real>(
    p: &SpherePoint<F>,
    seg: &GeodesicSegment<F>,
    sp: &SphereParams<F>,
) -> F {
    let (_, q) = closest_point_on_segment(p, seg);
    geodesic_distance(p, &q, sp)
}

/// Minimum geodesic distance between two arcs; 0 if they intersect.
pub fn segment_to_segment_distance<F: Real>(
    s1: &GeodesicSegment<F>,
    s2: &GeodesicSegment<F>,
    sp: &SphereParams<F>,
) -> F {
    // Distinct great circles meet at an antipodal point pair; if one of those
    // points lies on both arcs the distance is 0. Otherwise the minimum is
    // attained at an endpoint of one of the arcs.
    let n1 = s1.a.cross(&s1.b);
    let n2 = s2.a.cross(&s2.b);
    let x = [
        n1[1] * n2[2] - n1[2] * n2[1],
        n1[2] * n2[0] - n1[0] * n2[2],
        n1[0] * n2[1] - n1[1] * n2[0],
    ];
    let xn = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if xn > F::zero() {
        let cand = SpherePoint::new(x[0], x[1], x[2]);
        for q in [cand, cand.antipode()] {
            if on_arc(&q, s1) && on_arc(&q, s2) {
                return F::zero();
            }
        }
    }
    let d1 = point_to_segment_distance(&s1.a, s2, sp);
    let d2 = point_to_segment_distance(&s1.b, s2, sp);
    let d3 = point_to_segment_distance(&s2.a, s1, sp);
    let d4 = point_to_segment_distance(&s2.b, s1, sp);
    d1.min(d2).min(d3).min(d4)
}

fn on_arc<F: Real>(q: &SpherePoint<F>, seg: &GeodesicSegment<F>) -> bool {
    let theta = seg.a.angle_to(&seg.b);
    let eps = F::of(1e-9) * theta.max(F::one());
    (seg.a.angle_to(q) + q.angle_to(&seg.b) - theta).abs() <= eps
}
