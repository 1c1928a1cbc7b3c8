//! Closed-form integrals of the static kernel `1/R` over a flat triangle.
//!
//! For an observation point `r` and source triangle `T`:
//!
//! * `scalar = ∫_T 1/|r - r'| dA'`
//! * `vector = ∫_T (r' - r)/|r - r'| dA'`
//!
//! Both are evaluated edge by edge from the projection of `r` onto the
//! triangle plane, and stay finite when `r` lies on the triangle itself.

use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticPotentials {
    pub scalar: f64,
    pub vector: Vec3,
}

pub fn static_potentials(r: &Vec3, tri: &[Vec3; 3]) -> StaticPotentials {
    let normal = (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).normalize();
    let height = normal.dot(&(r - tri[0]));
    let abs_h = height.abs();
    let proj = r - normal * height;
    let scale = (tri[1] - tri[0]).norm().max((tri[2] - tri[1]).norm()).max((tri[0] - tri[2]).norm());
    let tiny = 1e-14 * scale;

    let mut scalar = 0.0;
    let mut in_plane = Vec3::zeros();
    for i in 0..3 {
        let (pm, pp) = (tri[i], tri[(i + 1) % 3]);
        let along = (pp - pm).normalize();
        let outward = along.cross(&normal);
        let t0 = (pm - proj).dot(&outward);
        let s_minus = (pm - proj).dot(&along);
        let s_plus = (pp - proj).dot(&along);
        let r0_sq = t0 * t0 + height * height;
        let r_minus = (r - pm).norm();
        let r_plus = (r - pp).norm();

        let on_line = r0_sq.sqrt() <= tiny;
        let f2 = if s_plus < 0.0 && s_minus < 0.0 {
            ((r_minus - s_minus) / (r_plus - s_plus)).ln()
        } else if on_line {
            // Either on the segment (where every term using f2 carries a
            // factor R0 → 0) or on its forward extension.
            if s_minus > 0.0 {
                ((r_plus + s_plus) / (r_minus + s_minus)).ln()
            } else {
                0.0
            }
        } else {
            let num = if s_plus >= 0.0 { r_plus + s_plus } else { r0_sq / (r_plus - s_plus) };
            let den = if s_minus >= 0.0 { r_minus + s_minus } else { r0_sq / (r_minus - s_minus) };
            (num / den).ln()
        };

        let beta = if t0.abs() <= tiny || abs_h <= tiny {
            0.0
        } else {
            (t0 * s_plus / (r0_sq + abs_h * r_plus)).atan() - (t0 * s_minus / (r0_sq + abs_h * r_minus)).atan()
        };
        scalar += t0 * f2 - abs_h * beta;
        in_plane += outward * (0.5 * (r0_sq * f2 + s_plus * r_plus - s_minus * r_minus));
    }
    StaticPotentials { scalar, vector: in_plane - normal * (height * scalar) }
}
