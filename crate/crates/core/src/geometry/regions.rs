//! Labelled sub-regions of structured plate meshes.

use super::{GeometryError, TriangleMesh};

/// Axis-aligned rectangle in the plate's own xy coordinates (metres).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0: x0.min(x1), y0: y0.min(y1), x1: x0.max(x1), y1: y0.max(y1) }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }
}

/// Labels the triangles inside each rectangle with `index + 1`.
///
/// Every rectangle corner must sit on a grid line of the structured plate,
/// so that each triangle lies either entirely inside or entirely outside.
/// Rectangles later in the list win where they overlap.
pub fn tag_subregions(mesh: &TriangleMesh, rectangles: &[Rect]) -> Result<TriangleMesh, GeometryError> {
    let nodes = mesh.nodes();
    let z0 = nodes.first().map(|p| p.z).unwrap_or(0.0);
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in nodes {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let extent = (xmax - xmin).max(ymax - ymin);
    let tol = 1e-9 * extent.max(f64::MIN_POSITIVE);
    if nodes.iter().any(|p| (p.z - z0).abs() > tol) {
        return Err(GeometryError::NotPlate("nodes are not coplanar in z".into()));
    }

    let grid_lines = |coord: fn(&nalgebra::Vector3<f64>) -> f64| {
        let mut v: Vec<f64> = nodes.iter().map(coord).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        v
    };
    let xs = grid_lines(|p| p.x);
    let ys = grid_lines(|p| p.y);
    let on_grid = |lines: &[f64], v: f64| lines.iter().any(|&g| (g - v).abs() <= tol);

    for (index, r) in rectangles.iter().enumerate() {
        if r.x0 < xmin - tol || r.x1 > xmax + tol || r.y0 < ymin - tol || r.y1 > ymax + tol {
            return Err(GeometryError::OutsidePlate { index });
        }
        if !(on_grid(&xs, r.x0) && on_grid(&xs, r.x1) && on_grid(&ys, r.y0) && on_grid(&ys, r.y1))
            || r.x1 - r.x0 <= tol
            || r.y1 - r.y0 <= tol
        {
            return Err(GeometryError::NotGridAligned { index });
        }
    }

    let labels = (0..mesh.triangles().len())
        .map(|t| {
            let c = mesh.centroid(t);
            rectangles.iter().enumerate().rev().find(|(_, r)| r.contains(c.x, c.y)).map_or(0, |(i, _)| i as u32 + 1)
        })
        .collect();
    mesh.relabeled(labels)
}

/// Sub-region placements on an `ℓ × ℓ·aspect` plate, each region being
/// `0.1ℓ × 0.05ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateCase {
    /// One corner.
    A,
    /// Two diagonally opposite corners.
    B,
    /// Two corners on the same short side.
    C,
    /// Three corners.
    D,
    /// All four corners.
    E,
}

impl PlateCase {
    pub const ALL: [PlateCase; 5] = [PlateCase::A, PlateCase::B, PlateCase::C, PlateCase::D, PlateCase::E];

    pub fn name(self) -> &'static str {
        match self {
            PlateCase::A => "A",
            PlateCase::B => "B",
            PlateCase::C => "C",
            PlateCase::D => "D",
            PlateCase::E => "E",
        }
    }
}

/// Rectangles for a placement case on a plate centred at the origin.
pub fn plate_case(case: PlateCase, length: f64, aspect: f64) -> Vec<Rect> {
    let (w, h) = (0.1 * length, 0.05 * length);
    let (xl, xr) = (-length / 2.0, length / 2.0);
    let (yb, yt) = (-length * aspect / 2.0, length * aspect / 2.0);
    let bottom_left = Rect::new(xl, yb, xl + w, yb + h);
    let top_left = Rect::new(xl, yt - h, xl + w, yt);
    let top_right = Rect::new(xr - w, yt - h, xr, yt);
    let bottom_right = Rect::new(xr - w, yb, xr, yb + h);
    match case {
        PlateCase::A => vec![bottom_left],
        PlateCase::B => vec![bottom_left, top_right],
        PlateCase::C => vec![bottom_left, top_left],
        PlateCase::D => vec![bottom_left, top_left, top_right],
        PlateCase::E => vec![bottom_left, top_left, top_right, bottom_right],
    }
}

impl std::str::FromStr for PlateCase {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self, GeometryError> {
        PlateCase::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| GeometryError::Unsupported(format!("unknown placement case `{s}` (expected A-E)")))
    }
}

/// Parses a region file: one rectangle `x0 y0 x1 y1` per line, in plate
/// coordinates. Blank lines and text after `#` are ignored. The n-th
/// rectangle becomes label n.
pub fn parse_rects(text: &str) -> Result<Vec<Rect>, GeometryError> {
    let mut rects = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|e| GeometryError::Parse { line: i + 1, message: format!("`{f}`: {e}") }))
            .collect::<Result<_, _>>()?;
        let [x0, y0, x1, y1] = v[..] else {
            return Err(GeometryError::Parse {
                line: i + 1,
                message: format!("expected `x0 y0 x1 y1`, found {} fields", v.len()),
            });
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::Parse { line: i + 1, message: "non-finite coordinate".into() });
        }
        rects.push(Rect::new(x0, y0, x1, y1));
    }
    Ok(rects)
}
