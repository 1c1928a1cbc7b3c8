//! Canonical shapes: rectangular plate, disc, sphere and cylinder.
//!
//! All shapes are centred on the origin so that the circumscribing sphere
//! used by the spherical-wave expansion is the origin-centred one.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::{GeometryError, TriangleMesh, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `length` × `length·aspect` plate in the xy-plane.
    Plate {
        length: f64,
        aspect: f64,
    },
    /// Flat disc in the xy-plane.
    Disc {
        radius: f64,
    },
    Sphere {
        radius: f64,
    },
    /// Cylinder along z. `capped = false` gives an open tube.
    Cylinder {
        radius: f64,
        height: f64,
        capped: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    /// Target maximum edge length as a fraction of the circumscribing radius.
    MaxEdge(f64),
    /// Explicit `nx × ny` rectangle grid; plates only.
    Grid { nx: usize, ny: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    pub shape: Shape,
    pub resolution: Resolution,
}

impl GeometryParams {
    pub fn new(shape: Shape, resolution: Resolution) -> Self {
        Self { shape, resolution }
    }

    /// Analytic radius of the smallest origin-centred sphere enclosing the shape.
    pub fn circumscribing_radius(&self) -> f64 {
        match self.shape {
            Shape::Plate { length, aspect } => (length * length + (length * aspect).powi(2)).sqrt() / 2.0,
            Shape::Disc { radius } | Shape::Sphere { radius } => radius,
            Shape::Cylinder { radius, height, .. } => (radius * radius + height * height / 4.0).sqrt(),
        }
    }

    /// Analytic surface area.
    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Plate { length, aspect } => length * length * aspect,
            Shape::Disc { radius } => PI * radius * radius,
            Shape::Sphere { radius } => 4.0 * PI * radius * radius,
            Shape::Cylinder { radius, height, capped } => {
                let side = 2.0 * PI * radius * height;
                if capped {
                    side + 2.0 * PI * radius * radius
                } else {
                    side
                }
            }
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let positive = |name, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(GeometryError::NonPositiveDimension { name, value })
            }
        };
        match self.shape {
            Shape::Plate { length, aspect } => {
                positive("length", length)?;
                positive("aspect", aspect)?;
            }
            Shape::Disc { radius } | Shape::Sphere { radius } => positive("radius", radius)?,
            Shape::Cylinder { radius, height, .. } => {
                positive("radius", radius)?;
                positive("height", height)?;
            }
        }
        match self.resolution {
            Resolution::MaxEdge(h) if !(h > 0.0 && h <= 1.0) => Err(GeometryError::BadRefinement(h)),
            Resolution::Grid { .. } if !matches!(self.shape, Shape::Plate { .. }) => {
                Err(GeometryError::Unsupported("grid resolution is only defined for plates".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Meshes a canonical shape.
pub fn make_canonical(params: &GeometryParams) -> Result<TriangleMesh, GeometryError> {
    params.validate()?;
    let a = params.circumscribing_radius();
    let (nodes, triangles) = match (params.shape, params.resolution) {
        (Shape::Plate { length, aspect }, Resolution::Grid { nx, ny }) => plate(length, aspect, nx, ny),
        (Shape::Plate { length, aspect }, Resolution::MaxEdge(h)) => {
            // Cells share the plate aspect ratio, so the cell diagonal is 2a/n.
            let n = (2.0 / h - 1e-9).ceil().max(1.0) as usize;
            plate(length, aspect, n, n)
        }
        (Shape::Disc { radius }, Resolution::MaxEdge(h)) => refine_until(h * a, |n| disc(radius, n)),
        (Shape::Sphere { radius }, Resolution::MaxEdge(h)) => refine_until(h * a, |level| icosphere(radius, level - 1)),
        (Shape::Cylinder { radius, height, capped }, Resolution::MaxEdge(h)) => {
            refine_until(h * a, |n| cylinder(radius, height, capped, n))
        }
        _ => unreachable!("validated above"),
    };
    if triangles.len() < 8 {
        return Err(GeometryError::TooCoarse(triangles.len()));
    }
    TriangleMesh::new(nodes, triangles)
}

type RawMesh = (Vec<Vec3>, Vec<[usize; 3]>);

fn max_edge(raw: &RawMesh) -> f64 {
    raw.1
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .map(|(i, j)| (raw.0[i] - raw.0[j]).norm())
        .fold(0.0, f64::max)
}

fn refine_until(target: f64, build: impl Fn(usize) -> RawMesh) -> RawMesh {
    let mut n = 1;
    loop {
        let raw = build(n);
        if max_edge(&raw) <= target || n >= 64 {
            return raw;
        }
        n += 1;
    }
}

fn plate(length: f64, aspect: f64, nx: usize, ny: usize) -> RawMesh {
    let width = length * aspect;
    let xs: Vec<f64> = (0..=nx).map(|i| -length / 2.0 + i as f64 * (length / nx as f64)).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| -width / 2.0 + j as f64 * (width / ny as f64)).collect();
    plate_on_lines(&xs, &ys)
}

fn plate_on_lines(xs: &[f64], ys: &[f64]) -> RawMesh {
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for &y in ys {
        for &x in xs {
            nodes.push(Vec3::new(x, y, 0.0));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    (nodes, triangles)
}

/// Joins two closed rings of nodes (angles ascending from 0) with triangles.
/// Orientation follows `inner -> outer` counter-clockwise about +z when the
/// rings are traversed counter-clockwise.
fn stitch_rings(
    inner: &[usize],
    inner_angles: &[f64],
    outer: &[usize],
    outer_angles: &[f64],
    triangles: &mut Vec<[usize; 3]>,
) {
    let (p, q) = (inner.len(), outer.len());
    let angle = |angles: &[f64], k: usize| {
        if k == angles.len() {
            2.0 * PI
        } else {
            angles[k]
        }
    };
    let (mut i, mut j) = (0, 0);
    while i < p || j < q {
        let advance_outer = j < q && (i == p || angle(outer_angles, j + 1) <= angle(inner_angles, i + 1) + 1e-12);
        if advance_outer {
            triangles.push([inner[i % p], outer[j], outer[(j + 1) % q]]);
            j += 1;
        } else {
            triangles.push([inner[i % p], outer[j % q], inner[(i + 1) % p]]);
            i += 1;
        }
    }
}

fn ring_angles(count: usize) -> Vec<f64> {
    (0..count).map(|k| 2.0 * PI * k as f64 / count as f64).collect()
}

/// Fills a disc of radius `radius` at height `z` whose rim is the existing
/// ring `rim` (6n nodes). Returns triangles oriented with +z normal.
fn fill_disc(nodes: &mut Vec<Vec3>, rim: &[usize], radius: f64, z: f64, n: usize, triangles: &mut Vec<[usize; 3]>) {
    let center = nodes.len();
    nodes.push(Vec3::new(0.0, 0.0, z));
    let mut prev = vec![center];
    let mut prev_angles = vec![0.0];
    for ring in 1..=n {
        let (ids, angles) = if ring == n {
            (rim.to_vec(), ring_angles(rim.len()))
        } else {
            let count = 6 * ring;
            let angles = ring_angles(count);
            let r = radius * ring as f64 / n as f64;
            let start = nodes.len();
            for &t in &angles {
                nodes.push(Vec3::new(r * t.cos(), r * t.sin(), z));
            }
            ((start..start + count).collect(), angles)
        };
        if prev.len() == 1 {
            for k in 0..ids.len() {
                triangles.push([center, ids[k], ids[(k + 1) % ids.len()]]);
            }
        } else {
            stitch_rings(&prev, &prev_angles, &ids, &angles, triangles);
        }
        prev = ids;
        prev_angles = angles;
    }
}

fn disc(radius: f64, n: usize) -> RawMesh {
    let mut nodes = Vec::new();
    let count = 6 * n;
    let rim: Vec<usize> = (0..count).collect();
    for t in ring_angles(count) {
        nodes.push(Vec3::new(radius * t.cos(), radius * t.sin(), 0.0));
    }
    let mut triangles = Vec::new();
    fill_disc(&mut nodes, &rim, radius, 0.0, n, &mut triangles);
    (nodes, triangles)
}

fn cylinder(radius: f64, height: f64, capped: bool, n: usize) -> RawMesh {
    let around = 6 * n;
    // Keep side cells roughly square.
    let dz_target = 2.0 * PI * radius / around as f64;
    let nz = ((height / dz_target).round() as usize).max(1);
    let angles = ring_angles(around);
    let mut nodes = Vec::with_capacity(around * (nz + 1));
    for kz in 0..=nz {
        let z = -height / 2.0 + height * kz as f64 / nz as f64;
        for &t in &angles {
            nodes.push(Vec3::new(radius * t.cos(), radius * t.sin(), z));
        }
    }
    let id = |i: usize, kz: usize| kz * around + (i % around);
    let mut triangles = Vec::new();
    for kz in 0..nz {
        for i in 0..around {
            let (a, b, c, d) = (id(i, kz), id(i + 1, kz), id(i + 1, kz + 1), id(i, kz + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    if capped {
        let bottom: Vec<usize> = (0..around).map(|i| id(i, 0)).collect();
        let top: Vec<usize> = (0..around).map(|i| id(i, nz)).collect();
        let mut cap = Vec::new();
        fill_disc(&mut nodes, &top, radius, height / 2.0, n, &mut cap);
        triangles.append(&mut cap);
        fill_disc(&mut nodes, &bottom, radius, -height / 2.0, n, &mut cap);
        // Bottom cap faces -z.
        triangles.extend(cap.into_iter().map(|[a, b, c]| [a, c, b]));
    }
    (nodes, triangles)
}

fn icosphere(radius: f64, level: usize) -> RawMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut nodes: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize() * radius)
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, nodes: &mut Vec<Vec3>| {
            let key = (i.min(j), i.max(j));
            *midpoints.entry(key).or_insert_with(|| {
                nodes.push(((nodes[i] + nodes[j]) / 2.0).normalize() * radius);
                nodes.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for &[a, b, c] in &triangles {
            let ab = midpoint(a, b, &mut nodes);
            let bc = midpoint(b, c, &mut nodes);
            let ca = midpoint(c, a, &mut nodes);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    // Outward orientation.
    for tri in &mut triangles {
        let [a, b, c] = tri.map(|i| nodes[i]);
        if (b - a).cross(&(c - a)).dot(&(a + b + c)) < 0.0 {
            tri.swap(1, 2);
        }
    }
    (nodes, triangles)
}
