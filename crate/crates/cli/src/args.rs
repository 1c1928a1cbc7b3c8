use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mimo_bounds::bound::Normalization;
use mimo_bounds::geometry::PlateCase;

#[derive(Debug, Parser)]
#[command(name = "mimo-bounds", version, about = "Spectral-efficiency bounds for lossy antennas")]
pub struct Cli {
    /// Leave the timestamp out of provenance headers so identical inputs give
    /// byte-identical outputs.
    #[arg(long, global = true)]
    pub reproducible: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a canonical mesh.
    Geom(GeomArgs),
    /// Assemble Z, Psi, R_omega, S and R_r into a bundle directory.
    Assemble(AssembleArgs),
    /// Radiation (and optionally characteristic) mode strengths as CSV.
    Modes(ModesArgs),
    /// Minimized dual bound as a JSON record.
    Bound(BoundArgs),
    /// Bounds over a range of efficiencies or SNRs as CSV.
    Sweep(SweepArgs),
    /// Number of modes radiating above an efficiency threshold.
    Count(CountArgs),
    /// Mode strengths of a controlled plate sub-region.
    Subregion(SubregionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeKind {
    Plate,
    Disc,
    Sphere,
    Cylinder,
}

/// `NXxNY`, e.g. `40x20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NXxNY, got `{s}`"))?;
        let nx = a.trim().parse().map_err(|_| format!("bad grid count `{a}`"))?;
        let ny = b.trim().parse().map_err(|_| format!("bad grid count `{b}`"))?;
        if nx == 0 || ny == 0 {
            return Err("grid counts must be positive".into());
        }
        Ok(Grid { nx, ny })
    }
}

/// A single value or an inclusive linear range `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range {
    Value(f64),
    Sweep { start: f64, stop: f64, count: usize },
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Range::Value(v) => vec![v],
            Range::Sweep { start, stop, count } => {
                (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect()
            }
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(self, Range::Sweep { .. })
    }
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`")).and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(format!("non-finite value `{t}`"))
                }
            })
        };
        match parts[..] {
            [v] => Ok(Range::Value(num(v)?)),
            [a, b, n] => {
                let (start, stop) = (num(a)?, num(b)?);
                let count: usize = n.trim().parse().map_err(|_| format!("bad count `{n}`"))?;
                if count < 2 {
                    return Err("a sweep needs count >= 2".into());
                }
                if start >= stop {
                    return Err("a sweep needs start < stop".into());
                }
                Ok(Range::Sweep { start, stop, count })
            }
            _ => Err(format!("expected a value or start:stop:count, got `{s}`")),
        }
    }
}

fn parse_case(s: &str) -> Result<PlateCase, String> {
    s.parse().map_err(|e: mimo_bounds::geometry::GeometryError| e.to_string())
}

fn parse_norm(s: &str) -> Result<Normalization, String> {
    s.parse().map_err(|e: mimo_bounds::bound::BoundError| e.to_string())
}

/// Comma-separated eigenvalue list.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoList(pub Vec<f64>);

fn parse_rho(s: &str) -> Result<RhoList, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad eigenvalue `{t}`")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty eigenvalue list".into());
    }
    Ok(RhoList(v))
}

#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    #[arg(long, value_enum, default_value = "plate")]
    pub shape: ShapeKind,
    /// Plate side length (m).
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Plate width over length.
    #[arg(long, default_value_t = 0.5)]
    pub aspect: f64,
    /// Disc, sphere or cylinder radius (m).
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Cylinder height (m).
    #[arg(long, default_value_t = 2.0)]
    pub height: f64,
    /// Open cylinder (no end caps).
    #[arg(long)]
    pub open: bool,
    /// Plate rectangle grid `NXxNY` [default: 20x10].
    #[arg(long, conflicts_with = "max_edge")]
    pub grid: Option<Grid>,
    /// Maximum edge length as a fraction of the circumscribing radius
    /// [default: 0.3 for curved shapes].
    #[arg(long)]
    pub max_edge: Option<f64>,
    /// Region file of plate rectangles `x0 y0 x1 y1`, labelled 1, 2, ...
    #[arg(long, conflicts_with = "case")]
    pub regions: Option<PathBuf>,
    /// Standard corner placement A-E (0.1l x 0.05l regions).
    #[arg(long, value_parser = parse_case)]
    pub case: Option<PlateCase>,
}

#[derive(Debug, Args)]
pub struct GeomArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Output mesh file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Mesh file; a canonical shape is generated when absent.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Electrical size ka.
    #[arg(long)]
    pub ka: f64,
    /// Surface resistance (ohm/square).
    #[arg(long, default_value_t = 0.01)]
    pub rs: f64,
    /// Spherical truncation order override.
    #[arg(long)]
    pub order: Option<usize>,
    /// Output bundle directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    /// Operator bundle directory.
    #[arg(long)]
    pub ops: PathBuf,
    /// Number of modes to report.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Surface resistance override (ohm/square).
    #[arg(long)]
    pub rs: Option<f64>,
    /// Also report characteristic-mode strengths.
    #[arg(long)]
    pub characteristic: bool,
    /// Output CSV file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumSource {
    /// Operator bundle directory.
    #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
    pub ops: Option<PathBuf>,
    /// Comma-separated radiation-mode eigenvalues.
    #[arg(long, value_parser = parse_rho, allow_hyphen_values = true)]
    pub rho: Option<RhoList>,
    /// Surface resistance override for a bundle (ohm/square).
    #[arg(long, requires = "ops")]
    pub rs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: SpectrumSource,
    /// SNR at unit power.
    #[arg(long)]
    pub gamma: f64,
    /// Radiation efficiency in (0, 1].
    #[arg(long)]
    pub eta: f64,
    /// radiated or dissipated.
    #[arg(long, value_parser = parse_norm, default_value = "radiated")]
    pub norm: Normalization,
    /// Keep only the N strongest modes.
    #[arg(long)]
    pub ports: Option<usize>,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SpectrumSource,
    /// Efficiency: value or start:stop:count.
    #[arg(long)]
    pub eta: Range,
    /// SNR: value or start:stop:count.
    #[arg(long)]
    pub gamma: Range,
    #[arg(long, value_parser = parse_norm, default_value = "radiated")]
    pub norm: Normalization,
    #[arg(long)]
    pub ports: Option<usize>,
    /// Output CSV file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Operator bundle directory; otherwise a canonical shape is meshed and
    /// solved at every `--ka`.
    #[arg(long, conflicts_with = "ka")]
    pub ops: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Electrical size: value or start:stop:count.
    #[arg(long, required_unless_present = "ops")]
    pub ka: Option<Range>,
    /// Surface resistance (ohm/square).
    #[arg(long, default_value_t = 0.01)]
    pub rs: f64,
    /// Efficiency threshold: value or start:stop:count.
    #[arg(long)]
    pub eta: Range,
    /// Output CSV file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubregionArgs {
    /// Operator bundle directory of a structured plate.
    #[arg(long)]
    pub ops: PathBuf,
    /// Region file of plate rectangles `x0 y0 x1 y1`.
    #[arg(long, conflicts_with = "case")]
    pub regions: Option<PathBuf>,
    /// Standard corner placement A-E.
    #[arg(long, value_parser = parse_case)]
    pub case: Option<PlateCase>,
    /// Controlled labels, comma-separated [default: every region].
    #[arg(long, value_delimiter = ',')]
    pub labels: Option<Vec<u32>>,
    /// Number of modes to report.
    #[arg(long, default_value_t = 6)]
    pub count: usize,
    /// Surface resistance override (ohm/square).
    #[arg(long)]
    pub rs: Option<f64>,
    /// Output CSV file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for the reduced operators.
    #[arg(long)]
    pub export: Option<PathBuf>,
}
