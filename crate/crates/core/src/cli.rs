//! The `drs` command line: solve one spec, regenerate or audit a table,
//! sample a wavefunction, or export the potential surface.
//!
//! Physical parameters resolve as flag, then `DRS_*` environment variable,
//! then config file, then built-in default.

use crate::model::{potential, PhysicalParams, PotentialKind, ProblemSpec, QuantumNumbers, RingParams, SymmetryKind};
use crate::spectrum::tables::{self, TableInfo, RING_COLUMNS};
use crate::spectrum::{audit_table, find_roots, AuditOptions, ClassifiedRoot, Mode, RootClass, SearchOptions};
use crate::wavefun::{write_samples, SpinorField, WavefunError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_RESULT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    NoResult(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NoResult(_) => EXIT_NO_RESULT,
            _ => EXIT_USAGE,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "drs", version, about = "Dirac bound states in double ring-shaped Kratzer and oscillator potentials")]
pub struct Cli {
    /// `key = value` file with any of: mass, c_s, c_ps, d_e, r_e, k.
    #[arg(long, global = true, env = "DRS_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub physics: PhysicsFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PhysicsFlags {
    /// Rest mass M.
    #[arg(long, global = true, env = "DRS_MASS")]
    pub mass: Option<f64>,
    /// Spin symmetry constant C_s.
    #[arg(long = "c-s", global = true, env = "DRS_C_S", allow_negative_numbers = true)]
    pub c_s: Option<f64>,
    /// Pseudospin symmetry constant C_ps.
    #[arg(long = "c-ps", global = true, env = "DRS_C_PS", allow_negative_numbers = true)]
    pub c_ps: Option<f64>,
    /// Kratzer dissociation energy D_e.
    #[arg(long = "d-e", global = true, env = "DRS_D_E")]
    pub d_e: Option<f64>,
    /// Kratzer equilibrium distance r_e.
    #[arg(long = "r-e", global = true, env = "DRS_R_E")]
    pub r_e: Option<f64>,
    /// Oscillator constant k.
    #[arg(long, global = true, env = "DRS_K")]
    pub k: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classified roots of one (symmetry, potential, n, n', m, a, b).
    Solve {
        #[command(flatten)]
        spec: SpecFlags,
        #[arg(long, value_enum, default_value = "strict")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Regenerates a full table over its rows and four (a, b) columns.
    Table {
        /// Table number, 1 to 4.
        id: u32,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "paper-compat")]
        mode: ModeArg,
    },
    /// Classifies every published entry of a table.
    Audit {
        id: u32,
        /// Match tolerance on |Re E - published|.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
        /// Table file to audit instead of the bundled transcription
        /// (whitespace format or `drs table` CSV).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Writes PREFIX.json and PREFIX.txt; without it the text report goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples the normalized spinor component of the lowest Class A root.
    Wavefunction {
        #[command(flatten)]
        spec: SpecFlags,
        #[arg(long, default_value_t = 0.05)]
        r_min: f64,
        #[arg(long, default_value_t = 8.0)]
        r_max: f64,
        #[arg(long, default_value_t = 40)]
        nr: usize,
        #[arg(long, default_value_t = 16)]
        ntheta: usize,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Writes `r theta V` on a tensor grid; θ samples sit at half steps.
    /// D_e, r_e and k come from the global options but default to
    /// D_e = 12, r_e = 0.4, k = 1 here.
    PotentialGrid {
        #[arg(long, value_enum)]
        potential: PotentialArg,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.1)]
        r_min: f64,
        #[arg(long, default_value_t = 3.0)]
        r_max: f64,
        #[arg(long, default_value_t = 50)]
        nr: usize,
        #[arg(long, default_value_t = 0.0)]
        theta_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        theta_max: f64,
        #[arg(long, default_value_t = 50)]
        ntheta: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SpecFlags {
    #[arg(long, value_enum)]
    pub symmetry: SymmetryArg,
    #[arg(long, value_enum)]
    pub potential: PotentialArg,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub nprime: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub m: i32,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymmetryArg {
    Spin,
    Pseudospin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    Kratzer,
    Oscillator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    PaperCompat,
    All,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::PaperCompat => Mode::PaperCompat,
            ModeArg::All => Mode::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Resolved physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub mass: f64,
    pub c_s: f64,
    pub c_ps: f64,
    pub d_e: f64,
    pub r_e: f64,
    pub k: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { mass: 5.0, c_s: 5.0, c_ps: -5.0, d_e: 15.0, r_e: 0.4, k: 1.0 }
    }
}

pub const CONFIG_KEYS: [&str; 6] = ["mass", "c_s", "c_ps", "d_e", "r_e", "k"];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key = value", i + 1)));
        };
        let key = key.trim().to_ascii_lowercase();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("config line {}: bad number {:?}", i + 1, value.trim())))?;
        out.insert(key, value);
    }
    Ok(out)
}

impl RunConfig {
    /// Flags (clap has already folded in the environment) over the config
    /// file over the defaults.
    pub fn resolve(flags: &PhysicsFlags, file: &BTreeMap<String, f64>) -> Self {
        Self::resolve_over(flags, file, Self::default())
    }

    pub fn resolve_over(flags: &PhysicsFlags, file: &BTreeMap<String, f64>, d: Self) -> Self {
        let pick = |flag: Option<f64>, key: &str, default: f64| flag.or_else(|| file.get(key).copied()).unwrap_or(default);
        Self {
            mass: pick(flags.mass, "mass", d.mass),
            c_s: pick(flags.c_s, "c_s", d.c_s),
            c_ps: pick(flags.c_ps, "c_ps", d.c_ps),
            d_e: pick(flags.d_e, "d_e", d.d_e),
            r_e: pick(flags.r_e, "r_e", d.r_e),
            k: pick(flags.k, "k", d.k),
        }
    }

    pub fn spec(
        &self,
        symmetry: SymmetryKind,
        kratzer: bool,
        ring: RingParams,
        qn: QuantumNumbers,
    ) -> Result<ProblemSpec, CliError> {
        let potential =
            if kratzer { PotentialKind::Kratzer { de: self.d_e, re: self.r_e } } else { PotentialKind::Oscillator { k: self.k } };
        let symmetry_constant = match symmetry {
            SymmetryKind::Spin => self.c_s,
            SymmetryKind::Pseudospin => self.c_ps,
        };
        ProblemSpec::new(symmetry, potential, PhysicalParams { mass: self.mass, symmetry_constant }, ring, qn)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

impl SpecFlags {
    fn spec(&self, cfg: &RunConfig) -> Result<ProblemSpec, CliError> {
        let symmetry = match self.symmetry {
            SymmetryArg::Spin => SymmetryKind::Spin,
            SymmetryArg::Pseudospin => SymmetryKind::Pseudospin,
        };
        let ring = RingParams::new(self.a, self.b).map_err(|e| CliError::Usage(e.to_string()))?;
        cfg.spec(symmetry, self.potential == PotentialArg::Kratzer, ring, QuantumNumbers::new(self.n, self.nprime, self.m))
    }
}

pub const CSV_HEADER: &str = "n,n_prime,m,a,b,symmetry,potential,energy_re,energy_im,class,residual,branch";

/// One classified root as written by `solve` and `table`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootRow {
    pub n: u32,
    pub n_prime: u32,
    pub m: i32,
    pub a: f64,
    pub b: f64,
    pub symmetry: String,
    pub potential: String,
    pub energy_re: f64,
    pub energy_im: f64,
    pub class: String,
    pub residual: f64,
    pub branch: String,
}

impl RootRow {
    pub fn new(spec: &ProblemSpec, root: &ClassifiedRoot) -> Self {
        Self {
            n: spec.qn.n,
            n_prime: spec.qn.n_prime,
            m: spec.qn.m,
            a: spec.ring.a,
            b: spec.ring.b,
            symmetry: spec.symmetry.name().into(),
            potential: spec.potential.name().into(),
            energy_re: root.energy.re,
            energy_im: if root.root_class == RootClass::C { root.energy.im } else { 0.0 },
            class: root.root_class.to_string(),
            residual: root.residual_norm,
            branch: root.branch.label(),
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.n_prime,
            self.m,
            fmt_float(self.a),
            fmt_float(self.b),
            self.symmetry,
            self.potential,
            fmt_float(self.energy_re),
            fmt_float(self.energy_im),
            self.class,
            fmt_float(self.residual),
            self.branch
        )
    }
}

/// Rounds to 10 significant digits, then prints the shortest text that
/// reads back to the rounded value.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let rounded: f64 = format!("{x:.9e}").parse().unwrap_or(x);
    let mag = rounded.abs();
    if (1e-4..1e10).contains(&mag) {
        rounded.to_string()
    } else {
        format!("{rounded:e}")
    }
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn table_cells(info: &TableInfo, cfg: &RunConfig, keys: &[QuantumNumbers]) -> Result<Vec<ProblemSpec>, CliError> {
    let mut specs = Vec::with_capacity(keys.len() * RING_COLUMNS.len());
    for qn in keys {
        for (a, b) in RING_COLUMNS {
            specs.push(cfg.spec(info.symmetry, info.kratzer, RingParams { a, b }, *qn)?);
        }
    }
    Ok(specs)
}

/// Solves every cell on a pool of scoped threads; results keep cell order.
fn solve_cells(specs: &[ProblemSpec], mode: Mode) -> Vec<Vec<ClassifiedRoot>> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(specs.len().max(1));
    let chunk = specs.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter().map(|s| find_roots(s, &SearchOptions::for_spec(s, mode))).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("solver thread panicked")).collect()
    })
}

/// CSV text of a regenerated table.
pub fn table_csv(id: u32, cfg: &RunConfig, mode: Mode) -> Result<String, CliError> {
    let info = TableInfo::get(id).map_err(|e| CliError::Usage(e.to_string()))?;
    let published = tables::bundled(id).map_err(|e| CliError::Usage(e.to_string()))?;
    let specs = table_cells(&info, cfg, &tables::row_keys(&published))?;
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for (spec, roots) in specs.iter().zip(solve_cells(&specs, mode)) {
        for r in &roots {
            body.push_str(&RootRow::new(spec, r).csv());
            body.push('\n');
        }
    }
    Ok(body)
}

fn cmd_solve(cfg: &RunConfig, flags: &SpecFlags, mode: ModeArg, format: Format) -> Result<(), CliError> {
    let spec = flags.spec(cfg)?;
    let roots = find_roots(&spec, &SearchOptions::for_spec(&spec, mode.into()));
    let rows: Vec<RootRow> = roots.iter().map(|r| RootRow::new(&spec, r)).collect();
    let body = match format {
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for row in &rows {
                s.push_str(&row.csv());
                s.push('\n');
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n",
    };
    write_output(None, &body)?;
    if rows.is_empty() {
        return Err(CliError::NoResult("no roots found".into()));
    }
    Ok(())
}

fn cmd_audit(id: u32, tolerance: f64, data: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {tolerance}")));
    }
    let published = match data {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            tables::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => tables::bundled(id).map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let opts = AuditOptions { tolerance, ..AuditOptions::default() };
    let report = audit_table(id, &published, &opts).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = report.to_text();
    match out {
        Some(prefix) => {
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            let json_path = prefix.with_extension("json");
            let text_path = prefix.with_extension("txt");
            fs::write(&json_path, json + "\n").map_err(|e| CliError::io(&json_path, e))?;
            fs::write(&text_path, &text).map_err(|e| CliError::io(&text_path, e))?;
            let s = &report.summary;
            println!(
                "table {}: {} entries, A {} B {} C {} D {}, max deviation {:e}",
                id, s.total, s.a, s.b, s.c, s.d, s.max_deviation
            );
            Ok(())
        }
        None => write_output(None, &text),
    }
}

/// Picks the lowest Class A root and explains why there is none otherwise.
fn wavefunction_root(spec: &ProblemSpec) -> Result<f64, CliError> {
    let strict = find_roots(spec, &SearchOptions::for_spec(spec, Mode::Strict));
    if let Some(r) = strict.iter().map(|r| r.reported()).reduce(f64::min) {
        return Ok(r);
    }
    let others = find_roots(spec, &SearchOptions::for_spec(spec, Mode::All));
    let angular_complex = !others.is_empty()
        && others.iter().all(|r| {
            matches!(
                SpinorField::new(spec, r.reported()),
                Err(WavefunError::ComplexAngular { .. })
            )
        });
    if angular_complex {
        return Err(CliError::NoResult(format!(
            "no Class A root: complex angular sector at every candidate energy ({} roots, e.g. Re E = {})",
            others.len(),
            others[0].reported()
        )));
    }
    Err(CliError::NoResult("no Class A root".into()))
}

fn cmd_wavefunction(
    cfg: &RunConfig,
    flags: &SpecFlags,
    (r_min, r_max, nr): (f64, f64, usize),
    ntheta: usize,
    phi: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if !(r_min > 0.0 && r_max > r_min && nr >= 1 && ntheta >= 1) {
        return Err(CliError::Usage("need 0 < r-min < r-max, nr >= 1, ntheta >= 1".into()));
    }
    let spec = flags.spec(cfg)?;
    let energy = wavefunction_root(&spec)?;
    let field = SpinorField::new(&spec, energy).map_err(|e| match e {
        WavefunError::ComplexAngular { .. } => CliError::NoResult(e.to_string()),
        other => CliError::NoResult(format!("cannot build the state at E = {energy}: {other}")),
    })?;
    let dt = std::f64::consts::PI / ntheta as f64;
    let mut points = Vec::with_capacity(nr * ntheta);
    for i in 0..nr {
        let r = if nr == 1 { r_min } else { r_min + (r_max - r_min) * i as f64 / (nr - 1) as f64 };
        for j in 0..ntheta {
            points.push((r, (j as f64 + 0.5) * dt, phi));
        }
    }
    let mut buf = Vec::new();
    write_samples(&mut buf, &field, &points).map_err(|e| CliError::NoResult(e.to_string()))?;
    write_output(output, &String::from_utf8(buf).expect("ascii output"))
}

struct GridRequest {
    kind: PotentialKind,
    ring: RingParams,
    r: (f64, f64, usize),
    theta: (f64, f64, usize),
}

/// Potential samples; θ_j = θ_min + (j + ½)Δθ.
fn potential_grid(req: &GridRequest) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let (r_min, r_max, nr) = req.r;
    let (t_min, t_max, nt) = req.theta;
    if !(r_min > 0.0 && r_max >= r_min && nr >= 1) {
        return Err(CliError::Usage(format!("r range must exclude 0: got [{r_min}, {r_max}] with {nr} samples")));
    }
    if !(t_max > t_min && nt >= 1) {
        return Err(CliError::Usage(format!("bad theta range [{t_min}, {t_max}] with {nt} samples")));
    }
    let dt = (t_max - t_min) / nt as f64;
    let mut out = Vec::with_capacity(nr * nt);
    for i in 0..nr {
        let r = if nr == 1 { r_min } else { r_min + (r_max - r_min) * i as f64 / (nr - 1) as f64 };
        for j in 0..nt {
            let theta = t_min + (j as f64 + 0.5) * dt;
            let (s, c) = theta.sin_cos();
            let v = potential(&req.kind, &req.ring, r, theta);
            let singular = (req.ring.b != 0.0 && s.abs() < 1e-12) || (req.ring.a != 0.0 && c.abs() < 1e-12);
            if singular || !v.is_finite() {
                return Err(CliError::Usage(format!("singular sample at r = {r}, theta = {theta}")));
            }
            out.push((r, theta, v));
        }
    }
    Ok(out)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => parse_config(&fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::resolve(&cli.physics, &file);
    let surface = RunConfig::resolve_over(&cli.physics, &file, RunConfig { d_e: 12.0, ..RunConfig::default() });
    match cli.command {
        Command::Solve { spec, mode, format } => cmd_solve(&cfg, &spec, mode, format),
        Command::Table { id, output, mode } => write_output(output.as_deref(), &table_csv(id, &cfg, mode.into())?),
        Command::Audit { id, tolerance, data, out } => cmd_audit(id, tolerance, data.as_deref(), out.as_deref()),
        Command::Wavefunction { spec, r_min, r_max, nr, ntheta, phi, output } => {
            cmd_wavefunction(&cfg, &spec, (r_min, r_max, nr), ntheta, phi, output.as_deref())
        }
        Command::PotentialGrid {
            potential: kind,
            a,
            b,
            r_min,
            r_max,
            nr,
            theta_min,
            theta_max,
            ntheta,
            output,
        } => {
            let kind = match kind {
                PotentialArg::Kratzer => PotentialKind::Kratzer { de: surface.d_e, re: surface.r_e },
                PotentialArg::Oscillator => PotentialKind::Oscillator { k: surface.k },
            };
            let ring = RingParams::new(a, b).map_err(|e| CliError::Usage(e.to_string()))?;
            let req = GridRequest { kind, ring, r: (r_min, r_max, nr), theta: (theta_min, theta_max, ntheta) };
            let mut body = String::from("# r theta V\n");
            for (r, t, v) in potential_grid(&req)? {
                body.push_str(&format!("{r:.8e} {t:.8e} {v:.10e}\n"));
            }
            write_output(output.as_deref(), &body)
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("drs: {e}");
            e.exit_code()
        }
    }
}
