//! Command-line front end: `polyscar {spectrum,field,verify,unfold,ratio-check}`.
//!
//! Each `cmd_*` function turns a [`RunConfig`] into the bytes of one output
//! file, so the commands can be driven and tested without a process.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{PolyscarError, Result};
use crate::geometry::{period_lattice, Approximation, Epp, Family, Variant};
use crate::quantization::{spectrum_aperiodic, spectrum_listing, SpectrumEntry};
use crate::skeleton::{fold_diagonal, skeleton};
use crate::wavefunction::{
    boundary_residuals, default_nodal_threshold, line_max_abs, nodal_lines, sample_field, samples_per_wavelength,
    triangle_folded_diagonals, triangle_side_bound, verify_decomposition, DecompositionCase, ModeKind, ModeOptions,
    WaveMode, CONSTRUCTED_ZERO_TOLERANCE,
};

pub use config::{parse_surd, Format, RunConfig};
use output::{csv_cell, float, pgm16, Json};

/// Below this many grid points per wavelength the field command warns.
pub const MIN_SAMPLES_PER_WAVELENGTH: f64 = 8.0;

/// Levels compared by `ratio-check`, with the ratios of the exact levels
/// 407.4, 1015.97 and 1968.97 they are set against.
pub const RATIO_LEVELS: [(i64, i64); 3] = [(121, 1), (191, 1), (266, 1)];
pub const RATIO_REFERENCE: [f64; 2] = [2.4937, 1.9380];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    U,
    Q,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::U => Variant::U,
            VariantArg::Q => Variant::Q,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polyscar", version, about = "Semiclassical spectra and wavefunctions of rational polygon billiards")]
pub struct Cli {
    /// Flat key = value run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Which side of the u/q substitution sets the momentum scale.
    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantArg>,
    /// Grid points per axis (the identity grid for `verify`).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Spectrum validity cut, or absolute nodal threshold with `field --nodal`.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sorted semiclassical spectrum.
    Spectrum {
        /// Largest quantum number listed.
        #[arg(long)]
        max_m: Option<i64>,
        /// aperiodic, periodic, or q,r for the rectangle.
        #[arg(long)]
        skeleton: Option<String>,
    },
    /// Sample a wavefunction or superscar state on a grid.
    Field {
        #[arg(long)]
        mode: Option<String>,
        #[arg(short, long)]
        m: Option<i64>,
        #[arg(short, long)]
        n: Option<i64>,
        #[arg(long)]
        poc: Option<usize>,
        /// Emit approximate nodal points instead of the field.
        #[arg(long)]
        nodal: bool,
    },
    /// Boundary residuals, nodal lines and decomposition identities.
    Verify {
        #[arg(short, long)]
        m: Option<i64>,
        #[arg(short, long)]
        n: Option<i64>,
        /// Boundary samples per side.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Folded singular diagonals and POC cells of a periodic skeleton.
    Unfold {
        #[arg(long)]
        skeleton: Option<String>,
    },
    /// Level ratios of the triangle against the exact reference ratios.
    RatioCheck,
}

/// Bytes for the output file plus anything worth telling the user.
#[derive(Clone, Debug, Default)]
pub struct CommandOutput {
    pub bytes: Vec<u8>,
    /// False when a verification check failed.
    pub ok: bool,
    pub warnings: Vec<String>,
    /// Where `run` writes the bytes; stdout when `None`.
    pub path: Option<PathBuf>,
}

impl CommandOutput {
    fn new(bytes: Vec<u8>) -> CommandOutput {
        CommandOutput { bytes, ok: true, ..Default::default() }
    }
}

/// Caps rayon's global pool at `POLYSCAR_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("POLYSCAR_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| PolyscarError::Config(format!("POLYSCAR_THREADS = '{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| PolyscarError::Config(format!("cannot size the thread pool: {e}")))
}

/// Config file (or defaults) with the command-line overrides applied.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = cli.variant {
        cfg.variant = v.into();
    }
    if let Some(g) = cli.grid {
        cfg.grid = Some(g);
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(t) = cli.threshold {
        cfg.threshold = Some(t);
    }
    match &cli.command {
        Command::Spectrum { max_m, skeleton } => {
            if let Some(v) = max_m {
                cfg.max_m = *v;
            }
            if let Some(s) = skeleton {
                cfg.skeleton = s.clone();
            }
        }
        Command::Field { mode, m, n, poc, .. } => {
            if let Some(v) = mode {
                cfg.mode = Some(v.clone());
            }
            cfg.m = m.unwrap_or(cfg.m);
            cfg.n = n.unwrap_or(cfg.n);
            cfg.poc = poc.unwrap_or(cfg.poc);
        }
        Command::Verify { m, n, samples } => {
            if let Some(g) = cli.grid {
                cfg.identity_grid = g;
            }
            cfg.m = m.unwrap_or(cfg.m);
            cfg.n = n.unwrap_or(cfg.n);
            cfg.samples = samples.unwrap_or(cfg.samples);
        }
        Command::Unfold { skeleton } => {
            if let Some(s) = skeleton {
                cfg.skeleton = s.clone();
            }
        }
        Command::RatioCheck => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<CommandOutput> {
    let cfg = resolve_config(cli)?;
    let mut out = match &cli.command {
        Command::Spectrum { .. } => cmd_spectrum(&cfg),
        Command::Field { nodal, .. } => cmd_field(&cfg, *nodal),
        Command::Verify { .. } => cmd_verify(&cfg),
        Command::Unfold { .. } => cmd_unfold(&cfg),
        Command::RatioCheck => cmd_ratio_check(&cfg),
    }?;
    out.path = cfg.out;
    Ok(out)
}

/// Runs one command and writes its output; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(cli).and_then(|out| {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        match &out.path {
            Some(path) => std::fs::write(path, &out.bytes)
                .map_err(|e| PolyscarError::Io(format!("cannot write {}: {e}", path.display())))?,
            None => std::io::stdout().lock().write_all(&out.bytes)?,
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let e = PolyscarError::Consistency("one or more checks failed".into());
            eprintln!("error[{}]: {e}", e.code());
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

fn no_pgm(cfg: &RunConfig, what: &str) -> Result<()> {
    if cfg.format == Format::Pgm {
        return Err(PolyscarError::Usage(format!("pgm output is only available for fields, not {what}")));
    }
    Ok(())
}

fn lattice_for(cfg: &RunConfig) -> Result<crate::geometry::PeriodLattice> {
    let approx = match &cfg.approximation {
        Some(r) if cfg.family() == Family::BsTriangle => Some(Approximation::new(r, cfg.variant)?),
        _ => None,
    };
    period_lattice(&cfg.spec, approx.as_ref())
}

fn aux_text(e: &SpectrumEntry) -> String {
    e.aux.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

pub fn spectrum_entries(cfg: &RunConfig) -> Result<Vec<SpectrumEntry>> {
    spectrum_listing(&cfg.spec, &lattice_for(cfg)?, cfg.skeleton_kind()?, cfg.max_m)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<CommandOutput> {
    no_pgm(cfg, "spectra")?;
    let entries = spectrum_entries(cfg)?;
    let threshold = cfg.validity_threshold();
    let variant = |e: &SpectrumEntry| e.variant.map(|v| v.name()).unwrap_or("-").to_string();
    let bytes = match cfg.format {
        Format::Csv => {
            let mut s = String::from("family,skeleton,variant,m,n,aux,px,py,e0,energy,validity_ratio,valid\n");
            for e in &entries {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    e.family,
                    csv_cell(&e.skeleton.to_string()),
                    variant(e),
                    e.m,
                    e.n,
                    csv_cell(&aux_text(e)),
                    float(e.momentum[0]),
                    float(e.momentum[1]),
                    float(e.e0),
                    float(e.energy),
                    float(e.validity_ratio),
                    e.is_valid(threshold)
                ));
            }
            s
        }
        _ => Json::Arr(
            entries
                .iter()
                .map(|e| {
                    Json::obj(vec![
                        ("family", Json::Str(e.family.to_string())),
                        ("skeleton", Json::Str(e.skeleton.to_string())),
                        ("variant", Json::Str(variant(e))),
                        ("m", Json::Int(e.m)),
                        ("n", Json::Int(e.n)),
                        ("aux", Json::obj(e.aux.iter().map(|(k, v)| (*k, Json::Int(*v))).collect())),
                        ("momentum", Json::Arr(vec![Json::Num(e.momentum[0]), Json::Num(e.momentum[1])])),
                        ("e0", Json::Num(e.e0)),
                        ("energy", Json::Num(e.energy)),
                        ("validity_ratio", Json::Num(e.validity_ratio)),
                        ("valid", Json::Bool(e.is_valid(threshold))),
                    ])
                })
                .collect(),
        )
        .render(),
    };
    Ok(CommandOutput::new(bytes.into_bytes()))
}

fn default_mode_name(cfg: &RunConfig) -> &'static str {
    match (cfg.family(), cfg.variant) {
        (Family::BsTriangle, Variant::U) => "swfu",
        (Family::BsTriangle, Variant::Q) => "swfq",
        (Family::Parallelogram, _) => "branch1",
        _ => "exact",
    }
}

/// The wavefunction selected by the config's mode, m, n, poc and bc.
pub fn build_mode(cfg: &RunConfig) -> Result<WaveMode> {
    let name = cfg.mode.clone().unwrap_or_else(|| default_mode_name(cfg).to_string());
    let kind = ModeKind::parse(&name, cfg.poc, cfg.bc)?;
    let opts = ModeOptions {
        approximation: cfg.approximation_pair()?,
        skeleton: matches!(cfg.family(), Family::Rectangle | Family::LShape)
            .then(|| cfg.skeleton_direction())
            .transpose()?,
    };
    WaveMode::new(&cfg.spec, kind, cfg.m, cfg.n, opts)
}

pub fn cmd_field(cfg: &RunConfig, nodal: bool) -> Result<CommandOutput> {
    let mode = build_mode(cfg)?;
    let grid = cfg.field_grid();
    let mut warnings = Vec::new();
    let spw = samples_per_wavelength(&mode, grid);
    if spw < MIN_SAMPLES_PER_WAVELENGTH {
        let needed = (grid as f64 * MIN_SAMPLES_PER_WAVELENGTH / spw).ceil();
        warnings.push(format!(
            "only {spw:.2} grid points per wavelength; use --grid {needed} or more to resolve the oscillations"
        ));
    }
    let field = sample_field(&mode, grid)?;
    let bytes = if nodal {
        no_pgm(cfg, "nodal point sets")?;
        let field = field.real_branch();
        let threshold = cfg.threshold.unwrap_or_else(|| default_nodal_threshold(&field));
        // A field that vanishes identically (m = n in the triangle) has no nodal
        // lines, only rounding noise.
        let points = if field.max_abs() < CONSTRUCTED_ZERO_TOLERANCE { Vec::new() } else { nodal_lines(&field, threshold)? };
        match cfg.format {
            Format::Csv => {
                let mut s = String::from("x,y\n");
                for p in &points {
                    s.push_str(&format!("{},{}\n", float(p[0]), float(p[1])));
                }
                s.into_bytes()
            }
            _ => Json::obj(vec![
                ("label", Json::Str(field.label.clone())),
                ("threshold", Json::Num(threshold)),
                ("points", Json::Arr(points.iter().map(|p| Json::Arr(vec![Json::Num(p[0]), Json::Num(p[1])])).collect())),
            ])
            .render()
            .into_bytes(),
        }
    } else {
        match cfg.format {
            Format::Pgm => pgm16(&field),
            Format::Csv => {
                let mut s = String::from(if field.imag.is_some() { "x,y,re,im\n" } else { "x,y,value\n" });
                for j in 0..field.ny {
                    for i in 0..field.nx {
                        let v = field.get(i, j);
                        if v.is_nan() {
                            continue;
                        }
                        let p = field.point(i, j);
                        s.push_str(&format!("{},{},{}", float(p[0]), float(p[1]), float(v)));
                        if let Some(im) = &field.imag {
                            s.push_str(&format!(",{}", float(im[j * field.nx + i])));
                        }
                        s.push('\n');
                    }
                }
                s.into_bytes()
            }
            Format::Json => {
                let arr = |v: &[f64]| Json::Arr(v.iter().map(|x| Json::Num(*x)).collect());
                let mut fields = vec![
                    ("label", Json::Str(field.label.clone())),
                    ("nx", Json::Int(field.nx as i64)),
                    ("ny", Json::Int(field.ny as i64)),
                    ("lo", arr(&field.lo)),
                    ("hi", arr(&field.hi)),
                    ("values", arr(&field.values)),
                ];
                if let Some(im) = &field.imag {
                    fields.push(("imag", arr(im)));
                }
                Json::obj(fields).render().into_bytes()
            }
        }
    };
    Ok(CommandOutput { bytes, ok: true, warnings, path: None })
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub max_abs: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Every check `verify` runs for the configured billiard and mode.
pub fn verification_rows(cfg: &RunConfig) -> Result<(Vec<CheckRow>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let (m, n) = (cfg.m, cfg.n);
    let modes: Vec<WaveMode> = match cfg.family() {
        Family::Parallelogram if cfg.mode.is_none() => ["branch1", "branch2"]
            .iter()
            .map(|b| build_mode(&RunConfig { mode: Some(b.to_string()), ..cfg.clone() }))
            .collect::<Result<_>>()?,
        _ => vec![build_mode(cfg)?],
    };
    for mode in &modes {
        if mode.is_complex() || !mode.is_dirichlet() {
            notes.push(format!("no boundary residual for {}", mode.kind));
            continue;
        }
        for r in boundary_residuals(mode, cfg.samples)? {
            rows.push(CheckRow { check: format!("boundary {} [{}]", r.side, mode.kind), max_abs: r.max_abs, bound: r.bound, pass: r.pass });
        }
    }
    let grid = cfg.identity_grid;
    match cfg.family() {
        Family::BsTriangle => {
            let (u, q) = cfg
                .approximation_pair()?
                .ok_or_else(|| PolyscarError::NeedsApproximation("the triangle checks need u/q".into()))?;
            let mode = &modes[0];
            if matches!(mode.kind, ModeKind::SwfU | ModeKind::SwfQ) {
                let scale = if mode.kind == ModeKind::SwfU { u } else { q };
                let bound = triangle_side_bound(scale, m, n);
                // The three diagonals through (√2, 0) and x = 1 are near-nodal in both variants.
                for (label, a, b) in triangle_folded_diagonals(m, n).into_iter().take(3) {
                    let max_abs = line_max_abs(mode, a, b, cfg.samples);
                    rows.push(CheckRow { check: format!("nodal {label} [{}]", mode.kind), max_abs, bound, pass: max_abs < bound });
                }
            }
            for r in verify_decomposition(&cfg.spec, DecompositionCase::Triangle { u, q, m, n }, grid)? {
                rows.push(CheckRow { check: format!("identity {}", r.check), max_abs: r.max_abs, bound: r.bound, pass: r.pass });
            }
        }
        Family::Parallelogram => {
            if (m + n).rem_euclid(3) == 0 {
                for r in verify_decomposition(&cfg.spec, DecompositionCase::Parallelogram { m, n }, grid)? {
                    rows.push(CheckRow { check: format!("identity {}", r.check), max_abs: r.max_abs, bound: r.bound, pass: r.pass });
                }
            } else {
                notes.push(format!("m + n = {} is not divisible by 3; POC identities skipped", m + n));
            }
        }
        Family::Rectangle => {
            let crate::quantization::SkeletonDirection::Rectangle { q, r } = cfg.skeleton_direction()? else {
                unreachable!("rectangle skeletons are (q, r) directions")
            };
            let case = DecompositionCase::Rectangle { q, r, c: cfg.multiplicity, n };
            for r in verify_decomposition(&cfg.spec, case, grid)? {
                rows.push(CheckRow { check: format!("identity {}", r.check), max_abs: r.max_abs, bound: r.bound, pass: r.pass });
            }
        }
        Family::LShape => {
            let case = DecompositionCase::LShape { gamma: cfg.multiplicity, n2: n };
            for r in verify_decomposition(&cfg.spec, case, grid)? {
                rows.push(CheckRow { check: format!("identity {}", r.check), max_abs: r.max_abs, bound: r.bound, pass: r.pass });
            }
        }
    }
    Ok((rows, notes))
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutput> {
    no_pgm(cfg, "verification reports")?;
    let (rows, warnings) = verification_rows(cfg)?;
    let ok = rows.iter().all(|r| r.pass);
    let bytes = match cfg.format {
        Format::Csv => {
            let mut s = String::from("check,max_abs,bound,pass\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", csv_cell(&r.check), float(r.max_abs), float(r.bound), r.pass));
            }
            s
        }
        _ => Json::Arr(
            rows.iter()
                .map(|r| {
                    Json::obj(vec![
                        ("check", Json::Str(r.check.clone())),
                        ("max_abs", Json::Num(r.max_abs)),
                        ("bound", Json::Num(r.bound)),
                        ("pass", Json::Bool(r.pass)),
                    ])
                })
                .collect(),
        )
        .render(),
    };
    Ok(CommandOutput { bytes: bytes.into_bytes(), ok, warnings, path: None })
}

/// Polylines of the folded skeleton: `sd<i>.<j>` is segment j of singular
/// diagonal i, `poc<id>.<k>` is cell k of a POC (closed).
pub fn unfold_polylines(cfg: &RunConfig) -> Result<Vec<(String, Vec<[f64; 2]>)>> {
    let epp = Epp::new(&cfg.spec)?;
    let dir = cfg.skeleton_direction()?.vector(&cfg.spec)?;
    let sk = skeleton(&epp, &dir)?;
    let mut out = Vec::new();
    for (i, sd) in sk.diagonals.iter().enumerate() {
        for (j, [a, b]) in fold_diagonal(&epp, sd).iter().enumerate() {
            out.push((format!("sd{i}.{j}"), vec![a.to_f64(), b.to_f64()]));
        }
    }
    for poc in &sk.pocs {
        for (k, cell) in poc.folded_cells.iter().enumerate() {
            let mut pts = cell.billiard_polygon_f64();
            if let Some(first) = pts.first().copied() {
                pts.push(first);
            }
            out.push((format!("poc{}.{k}", poc.id), pts));
        }
    }
    Ok(out)
}

pub fn cmd_unfold(cfg: &RunConfig) -> Result<CommandOutput> {
    no_pgm(cfg, "skeletons")?;
    let lines = unfold_polylines(cfg)?;
    let bytes = match cfg.format {
        Format::Csv => {
            let mut s = String::from("x,y,id\n");
            for (id, pts) in &lines {
                for p in pts {
                    s.push_str(&format!("{},{},{id}\n", float(p[0]), float(p[1])));
                }
            }
            s
        }
        _ => Json::Arr(
            lines
                .iter()
                .map(|(id, pts)| {
                    Json::obj(vec![
                        ("id", Json::Str(id.clone())),
                        ("points", Json::Arr(pts.iter().map(|p| Json::Arr(vec![Json::Num(p[0]), Json::Num(p[1])])).collect())),
                    ])
                })
                .collect(),
        )
        .render(),
    };
    Ok(CommandOutput::new(bytes.into_bytes()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub label: String,
    pub computed: f64,
    pub reference: f64,
    pub relative_gap: f64,
}

/// Semiclassical level ratios of [`RATIO_LEVELS`] next to [`RATIO_REFERENCE`].
pub fn level_ratios(cfg: &RunConfig) -> Result<Vec<RatioRow>> {
    if cfg.family() != Family::BsTriangle {
        return Err(PolyscarError::Kind(format!("ratio-check is defined for the triangle, not the {}", cfg.family())));
    }
    let lattice = lattice_for(cfg)?;
    let e = RATIO_LEVELS
        .iter()
        .map(|&(m, n)| Ok(spectrum_aperiodic(&cfg.spec, &lattice, m, n)?.energy))
        .collect::<Result<Vec<f64>>>()?;
    Ok((0..2)
        .map(|i| {
            let computed = e[i + 1] / e[i];
            let reference = RATIO_REFERENCE[i];
            RatioRow {
                label: format!("E{}/E{}", RATIO_LEVELS[i + 1].0, RATIO_LEVELS[i].0),
                computed,
                reference,
                relative_gap: (computed - reference).abs() / reference,
            }
        })
        .collect())
}

pub fn cmd_ratio_check(cfg: &RunConfig) -> Result<CommandOutput> {
    no_pgm(cfg, "ratio reports")?;
    let rows = level_ratios(cfg)?;
    let bytes = match cfg.format {
        Format::Csv => {
            let mut s = String::from("ratio,computed,reference,relative_gap\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.label, float(r.computed), float(r.reference), float(r.relative_gap)));
            }
            s
        }
        _ => Json::Arr(
            rows.iter()
                .map(|r| {
                    Json::obj(vec![
                        ("ratio", Json::Str(r.label.clone())),
                        ("computed", Json::Num(r.computed)),
                        ("reference", Json::Num(r.reference)),
                        ("relative_gap", Json::Num(r.relative_gap)),
                    ])
                })
                .collect(),
        )
        .render(),
    };
    Ok(CommandOutput::new(bytes.into_bytes()))
}
