use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mimo_bounds::bound::{dual_bound, sweep, sweep_csv, BoundConfig, BoundError, SweepParam};
use mimo_bounds::geometry::{
    make_canonical, parse_rects, plate_case, save_mesh, tag_subregions, GeometryError, GeometryParams, Rect,
    Resolution, Shape, TriangleMesh,
};
use mimo_bounds::modes::{characteristic_modes, count_effective_modes, mode_table, radiation_modes_real, ModeError};
use mimo_bounds::mom::OperatorError;
use mimo_bounds::operators::{BundleOptions, OperatorBundle, RadiationOperators};
use mimo_bounds::subregion::{
    all_region_labels, full_reference, partition, reduce_operators, subregion_modes, SubregionError,
};

use crate::args::{
    AssembleArgs, BoundArgs, CountArgs, GeomArgs, Grid, ModesArgs, ShapeArgs, ShapeKind, SpectrumSource, SubregionArgs,
    SweepArgs,
};
use crate::provenance::Provenance;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(mimo_bounds::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Run(e) if e.is_numerical() => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

macro_rules! from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Run(e.into())
            }
        }
    )*};
}

from_error!(mimo_bounds::Error, GeometryError, OperatorError, ModeError, BoundError, SubregionError, std::io::Error);

type CliResult = Result<(), CliError>;

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn require_file(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{} is not a readable file", path.display())))
    }
}

fn require_dir(path: &Path) -> CliResult {
    if path.is_dir() {
        Ok(())
    } else {
        Err(usage(format!("{} is not a directory", path.display())))
    }
}

fn load_bundle(dir: &Path, rs: Option<f64>, prov: &mut Provenance) -> Result<OperatorBundle, CliError> {
    require_dir(dir)?;
    prov.add_dir(dir)?;
    let bundle = OperatorBundle::load(dir)?;
    Ok(match rs {
        Some(rs) => bundle.with_surface_resistance(rs)?,
        None => bundle,
    })
}

fn shape_of(args: &ShapeArgs) -> Shape {
    match args.shape {
        ShapeKind::Plate => Shape::Plate { length: args.length, aspect: args.aspect },
        ShapeKind::Disc => Shape::Disc { radius: args.radius },
        ShapeKind::Sphere => Shape::Sphere { radius: args.radius },
        ShapeKind::Cylinder => Shape::Cylinder { radius: args.radius, height: args.height, capped: !args.open },
    }
}

fn region_rects(
    regions: Option<&PathBuf>,
    case: Option<mimo_bounds::geometry::PlateCase>,
    length: f64,
    aspect: f64,
    prov: &mut Provenance,
) -> Result<Option<Vec<Rect>>, CliError> {
    if let Some(path) = regions {
        require_file(path)?;
        prov.add_file(path)?;
        return Ok(Some(parse_rects(&fs::read_to_string(path)?)?));
    }
    Ok(case.map(|c| plate_case(c, length, aspect)))
}

/// Builds the canonical mesh described by `args` and a short name for it.
fn build_mesh(args: &ShapeArgs, prov: &mut Provenance) -> Result<(TriangleMesh, String), CliError> {
    let resolution = match (args.grid, args.max_edge) {
        (Some(Grid { nx, ny }), _) => Resolution::Grid { nx, ny },
        (None, Some(h)) => Resolution::MaxEdge(h),
        (None, None) if args.shape == ShapeKind::Plate => Resolution::Grid { nx: 20, ny: 10 },
        (None, None) => Resolution::MaxEdge(0.3),
    };
    let shape = shape_of(args);
    let mut mesh = make_canonical(&GeometryParams::new(shape, resolution))?;
    let mut name = match shape {
        Shape::Plate { length, aspect } => format!("plate length={length} aspect={aspect}"),
        Shape::Disc { radius } => format!("disc radius={radius}"),
        Shape::Sphere { radius } => format!("sphere radius={radius}"),
        Shape::Cylinder { radius, height, capped } => {
            format!("cylinder radius={radius} height={height} capped={capped}")
        }
    };
    match resolution {
        Resolution::Grid { nx, ny } => write!(name, " grid={nx}x{ny}").ok(),
        Resolution::MaxEdge(h) => write!(name, " max_edge={h}").ok(),
    };
    if let Some(rects) = region_rects(args.regions.as_ref(), args.case, args.length, args.aspect, prov)? {
        mesh = tag_subregions(&mesh, &rects)?;
        if let Some(c) = args.case {
            write!(name, " case={}", c.name()).ok();
        } else {
            write!(name, " regions={}", rects.len()).ok();
        }
    }
    Ok((mesh, name))
}

pub fn geom(args: &GeomArgs, mut prov: Provenance) -> CliResult {
    let (mesh, name) = build_mesh(&args.shape, &mut prov)?;
    save_mesh(&mesh, &args.out)?;
    let sidecar = PathBuf::from(format!("{}.provenance", args.out.display()));
    fs::write(sidecar, prov.header())?;
    eprintln!(
        "{name}: {} nodes, {} triangles, area {:e}",
        mesh.nodes().len(),
        mesh.triangles().len(),
        mesh.total_area()
    );
    Ok(())
}

pub fn assemble(args: &AssembleArgs, mut prov: Provenance) -> CliResult {
    let (mesh, name) = match &args.mesh {
        Some(path) => {
            require_file(path)?;
            prov.add_file(path)?;
            (mimo_bounds::geometry::load_mesh(path)?, format!("mesh {}", path.display()))
        }
        None => build_mesh(&args.shape, &mut prov)?,
    };
    let mut options = BundleOptions::new(args.ka, args.rs);
    options.order = args.order;
    options.geometry = name;
    let bundle = OperatorBundle::assemble(mesh, &options)?;
    bundle.save(&args.out)?;
    fs::write(args.out.join("provenance.txt"), prov.header())?;
    let m = &bundle.meta;
    if m.resonance_suspected {
        eprintln!("warning: Z condition estimate {:e} suggests an internal resonance", m.z_condition);
    }
    eprintln!(
        "{}: N_b = {}, order L = {} ({} spherical modes), k = {:e}",
        m.geometry, m.num_basis, m.order, m.num_spherical, m.k
    );
    Ok(())
}

pub fn modes(args: &ModesArgs, mut prov: Provenance) -> CliResult {
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let bundle = load_bundle(&args.ops, args.rs, &mut prov)?;
    let rad = radiation_modes_real(&bundle.s, &bundle.r_omega, Some(args.count))?;
    let reference = rad.rho[0];
    let mut spectra = vec![rad];
    if args.characteristic {
        let mut ch = characteristic_modes(&bundle.z, &bundle.r_r, &bundle.r_omega)?;
        ch.truncate(args.count);
        spectra.push(ch);
    }
    let m = &bundle.meta;
    let mut text = prov.header();
    writeln!(text, "# ka={} rs={} num_basis={} reference={:e}", m.ka, m.surface_resistance, m.num_basis, reference)
        .ok();
    text += &mode_table(&spectra.iter().collect::<Vec<_>>(), reference);
    emit(args.out.as_deref(), &text)
}

fn spectrum(source: &SpectrumSource, prov: &mut Provenance) -> Result<Vec<f64>, CliError> {
    match (&source.ops, &source.rho) {
        (_, Some(rho)) => Ok(rho.0.clone()),
        (Some(dir), None) => {
            let bundle = load_bundle(dir, source.rs, prov)?;
            Ok(radiation_modes_real(&bundle.s, &bundle.r_omega, None)?.rho)
        }
        (None, None) => Err(usage("one of --ops or --rho is required")),
    }
}

pub fn bound(args: &BoundArgs, mut prov: Provenance) -> CliResult {
    let rho = spectrum(&args.source, &mut prov)?;
    let config = BoundConfig::new(args.norm, args.eta, args.gamma).with_ports(args.ports);
    let result = dual_bound(&rho, &config)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let mut record = result.to_json();
    record["provenance"] = serde_json::Value::String(prov.line());
    let text = serde_json::to_string_pretty(&record).map_err(|e| usage(e.to_string()))? + "\n";
    emit(args.out.as_deref(), &text)
}

pub fn sweep_cmd(args: &SweepArgs, mut prov: Provenance) -> CliResult {
    let (param, values, eta, gamma) = match (args.eta.is_sweep(), args.gamma.is_sweep()) {
        (true, false) => (SweepParam::Eta, args.eta.values(), f64::NAN, args.gamma.values()[0]),
        (false, true) => (SweepParam::Gamma, args.gamma.values(), args.eta.values()[0], f64::NAN),
        _ => return Err(usage("exactly one of --eta and --gamma must be a start:stop:count range")),
    };
    let mut base = BoundConfig::new(args.norm, eta, gamma).with_ports(args.ports);
    // The swept field is overwritten per point; validate the other one here.
    match param {
        SweepParam::Eta => base.eta = values[0],
        SweepParam::Gamma => base.gamma = values[0],
    }
    base.validate()?;
    let rho = spectrum(&args.source, &mut prov)?;
    let results = sweep(&rho, &base, param, &values)?;
    let text = prov.header() + &sweep_csv(&results);
    emit(args.out.as_deref(), &text)
}

pub fn count(args: &CountArgs, mut prov: Provenance) -> CliResult {
    let etas = args.eta.values();
    let mut rows: Vec<(f64, f64, Vec<f64>, f64, f64)> = vec![];
    if let Some(dir) = &args.ops {
        let bundle = load_bundle(dir, None, &mut prov)?;
        let rho = radiation_modes_real(&bundle.s, &bundle.r_omega, None)?.rho;
        rows.push((bundle.meta.ka, bundle.meta.k, rho, bundle.meta.area, bundle.meta.surface_resistance));
    } else {
        let kas = args.ka.as_ref().ok_or_else(|| usage("--ka is required without --ops"))?.values();
        let (mesh, _) = build_mesh(&args.shape, &mut prov)?;
        for ka in kas {
            let ops = RadiationOperators::assemble(&mesh, &BundleOptions::new(ka, args.rs))?;
            let rho = radiation_modes_real(&ops.s, &ops.r_omega, None)?.rho;
            rows.push((ka, ops.k, rho, ops.area, args.rs));
        }
    }
    let mut text = prov.header();
    text += "ka,eta,count,threshold,normalizer,normalized\n";
    for (ka, k, rho, area, _) in &rows {
        for &eta in &etas {
            let c = count_effective_modes(rho, eta, *area, *k)?;
            writeln!(text, "{ka:e},{eta:e},{},{:e},{:e},{:e}", c.count, c.threshold, c.normalizer, c.normalized).ok();
        }
    }
    emit(args.out.as_deref(), &text)
}

fn plate_extent(mesh: &TriangleMesh) -> (f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in mesh.nodes() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let length = x1 - x0;
    (length, (y1 - y0) / length)
}

pub fn subregion(args: &SubregionArgs, mut prov: Provenance) -> CliResult {
    if args.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let mut bundle = load_bundle(&args.ops, args.rs, &mut prov)?;
    let (length, aspect) = plate_extent(&bundle.mesh);
    if let Some(rects) = region_rects(args.regions.as_ref(), args.case, length, aspect, &mut prov)? {
        bundle.mesh = tag_subregions(&bundle.mesh, &rects)?;
    }
    let labels = match &args.labels {
        Some(l) => l.clone(),
        None => all_region_labels(&bundle.mesh),
    };
    if labels.is_empty() {
        return Err(usage("the mesh has no labelled regions; pass --regions, --case or --labels"));
    }
    let spec = partition(&bundle.mesh, &bundle.basis, &labels)?;
    let reduced = reduce_operators(&bundle, &spec)?;
    if reduced.resonance_suspected {
        eprintln!("warning: Z_gg condition estimate {:e} suggests an internal resonance", reduced.zgg_condition);
    }
    let reference = full_reference(&bundle)?;
    let modes = subregion_modes(&reduced, Some(args.count), reference)?;
    if let Some(shift) = modes.shift {
        eprintln!("warning: reduced loss matrix was shifted by {shift:e} to factor it");
    }
    if let Some(dir) = &args.export {
        reduced.save(dir)?;
        fs::write(dir.join("provenance.txt"), prov.header())?;
    }
    let mut text = prov.header();
    writeln!(
        text,
        "# labels={:?} controlled={} induced={} zgg_condition={:e} resonance_suspected={} reference={:e}",
        spec.labels,
        spec.controlled.len(),
        spec.induced.len(),
        reduced.zgg_condition,
        reduced.resonance_suspected,
        reference
    )
    .ok();
    text += &mode_table(&[&modes.spectrum], reference);
    emit(args.out.as_deref(), &text)
}
