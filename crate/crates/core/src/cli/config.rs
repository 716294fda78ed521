//! Flat `key = value` run configuration.
//!
//! ```text
//! # billiard
//! family = triangle            # triangle | parallelogram | rectangle | lshape
//! angles = 1/8, 1/2, 3/8       # optional, checked against the family
//! approximation = 3363/2378    # u/q stand-in for sqrt2 (triangle only)
//! variant = u                  # u | q
//! L = 4                        # parallelogram long side
//! a = 1                        # rectangle a, b; L-shape a, b, c, d
//! b = sqrt2                    # sizes accept p/q, decimals and r*sqrtN sums
//!
//! # spectrum
//! skeleton = aperiodic         # aperiodic | periodic | q,r (rectangle)
//! max_m = 20                   # quantum numbers run up to this value
//! threshold = 0.1              # validity cut on sqrt(2 E0)/|p|
//!
//! # wavefunctions
//! mode = swfu                  # swfu swfq branch1 branch2 complex exact superscar bsfolded
//! m = 3
//! n = 2
//! poc = 0                      # strip index for superscar and bsfolded modes
//! bc = dirichlet               # dirichlet | neumann
//! multiplicity = 1             # c (rectangle) or gamma (L-shape) in verify
//! grid = 512                   # field grid per axis
//! identity_grid = 40           # grid per axis for the identity checks of verify
//! samples = 10000              # boundary samples per side
//!
//! # output
//! format = csv                 # csv | json | pgm
//! out = field.pgm              # stdout when absent
//! ```
//!
//! Every key is optional. Command-line flags override the file.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{PolyscarError, Result};
use crate::exact::{Ratio, Surd};
use crate::geometry::{BilliardSpec, Boundary, Family, Variant};
use crate::quantization::{SkeletonDirection, SkeletonKind, DEFAULT_VALIDITY_THRESHOLD};
use crate::wavefunction::{BOUNDARY_SAMPLES, DEFAULT_GRID};

/// Grid per axis for the decomposition checks of `verify`.
pub const IDENTITY_GRID: usize = 40;

const KNOWN_KEYS: &[&str] = &[
    "family",
    "angles",
    "approximation",
    "variant",
    "l",
    "a",
    "b",
    "c",
    "d",
    "skeleton",
    "max_m",
    "threshold",
    "mode",
    "m",
    "n",
    "poc",
    "bc",
    "multiplicity",
    "grid",
    "identity_grid",
    "samples",
    "format",
    "out",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Pgm,
}

impl FromStr for Format {
    type Err = PolyscarError;

    fn from_str(s: &str) -> Result<Format> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pgm" => Ok(Format::Pgm),
            other => Err(PolyscarError::Config(format!("unknown format '{other}' (csv, json or pgm)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Pgm => "pgm",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// File the config was read from, if any.
    pub path: Option<PathBuf>,
    pub spec: BilliardSpec,
    pub approximation: Option<Ratio>,
    pub variant: Variant,
    /// Raw skeleton selector, resolved per family by [`RunConfig::skeleton_kind`].
    pub skeleton: String,
    pub max_m: i64,
    /// Spectrum validity cut, or the absolute nodal threshold for `field --nodal`.
    pub threshold: Option<f64>,
    pub mode: Option<String>,
    pub m: i64,
    pub n: i64,
    pub poc: usize,
    pub bc: Boundary,
    pub multiplicity: i64,
    pub grid: Option<usize>,
    pub identity_grid: usize,
    pub samples: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            path: None,
            spec: BilliardSpec::bs_triangle(),
            approximation: Some(Ratio::new(3363, 2378)),
            variant: Variant::U,
            skeleton: "aperiodic".into(),
            max_m: 20,
            threshold: None,
            mode: None,
            m: 3,
            n: 2,
            poc: 0,
            bc: Boundary::Dirichlet,
            multiplicity: 1,
            grid: None,
            identity_grid: IDENTITY_GRID,
            samples: BOUNDARY_SAMPLES,
            format: Format::Csv,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| PolyscarError::Config(format!("{key} = '{value}' is not a valid number")))
}

/// Parses `1`, `3/2`, `0.25`, `sqrt2`, `2*sqrt3`, `sqrt2/2`, `1+sqrt2`.
pub fn parse_surd(text: &str) -> Result<Surd> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(PolyscarError::Config("empty size".into()));
    }
    let bytes = t.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        if matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'/' | b'(') {
            terms.push(&t[start..i]);
            start = i;
        }
    }
    terms.push(&t[start..]);
    let mut acc = Surd::zero();
    let mut radicand = 1;
    for term in terms {
        let x = parse_term(term)?;
        if x.radicand() != 1 {
            if radicand != 1 && radicand != x.radicand() {
                return Err(PolyscarError::Config(format!("'{text}' mixes two different square roots")));
            }
            radicand = x.radicand();
        }
        acc = &acc + &x;
    }
    Ok(acc)
}

fn parse_term(term: &str) -> Result<Surd> {
    let bad = || PolyscarError::Config(format!("cannot read '{term}' as a size"));
    let (neg, body) = match term.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, term.strip_prefix('+').unwrap_or(term)),
    };
    let value = match body.find("sqrt") {
        None => Surd::rational(body.parse::<Ratio>()?),
        Some(i) => {
            let coef = body[..i].trim_end_matches('*');
            let mut coef = if coef.is_empty() { Ratio::one() } else { coef.parse::<Ratio>()? };
            let rest = &body[i + 4..];
            let (rad, div) = match rest.split_once('/') {
                Some((r, d)) => (r, Some(d)),
                None => (rest, None),
            };
            let rad = rad.trim_start_matches('(').trim_end_matches(')');
            let s: u32 = rad.parse().map_err(|_| bad())?;
            if s == 0 {
                return Err(bad());
            }
            if let Some(d) = div {
                let d: Ratio = d.parse()?;
                if d.is_zero() {
                    return Err(bad());
                }
                coef = coef / d;
            }
            // Pull square factors out so that the radicand is square-free.
            let mut s = s;
            let mut k = 2;
            while k * k <= s {
                while s % (k * k) == 0 {
                    s /= k * k;
                    coef = coef * Ratio::integer(k as i64);
                }
                k += 1;
            }
            Surd::new(Ratio::zero(), coef, s)
        }
    };
    Ok(if neg { -value } else { value })
}

fn take(map: &mut HashMap<String, String>, key: &str) -> Option<String> {
    map.remove(key)
}

fn size(map: &mut HashMap<String, String>, key: &str, family: Family) -> Result<Surd> {
    let v = take(map, key).ok_or_else(|| PolyscarError::Config(format!("the {family} needs size '{key}'")))?;
    parse_surd(&v)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PolyscarError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::parse(&text)?;
        cfg.path = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut map: HashMap<String, String> = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PolyscarError::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(PolyscarError::Config(format!("line {}: unknown key '{}'", lineno + 1, k.trim())));
            }
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(PolyscarError::Config(format!("line {}: key '{key}' given twice", lineno + 1)));
            }
        }

        let mut cfg = RunConfig::default();
        let family = match take(&mut map, "family") {
            Some(f) => Family::parse(&f)?,
            None => Family::BsTriangle,
        };
        cfg.spec = match family {
            Family::BsTriangle => BilliardSpec::bs_triangle(),
            Family::Parallelogram => {
                let l = take(&mut map, "l").unwrap_or_else(|| "4".into());
                BilliardSpec::parallelogram(l.parse()?)?
            }
            Family::Rectangle => {
                let a = size(&mut map, "a", family)?;
                let b = size(&mut map, "b", family)?;
                BilliardSpec::rectangle(a, b)?
            }
            Family::LShape => {
                let a = size(&mut map, "a", family)?;
                let b = size(&mut map, "b", family)?;
                let c = size(&mut map, "c", family)?;
                let d = size(&mut map, "d", family)?;
                BilliardSpec::l_shape(a, b, c, d)?
            }
        };
        if family != Family::BsTriangle {
            cfg.approximation = None;
        }
        for key in ["l", "a", "b", "c", "d"] {
            if map.contains_key(key) {
                return Err(PolyscarError::Config(format!("size '{key}' does not apply to the {family}")));
            }
        }
        if let Some(a) = take(&mut map, "angles") {
            let given = a.split(',').map(|s| s.parse::<Ratio>()).collect::<Result<Vec<_>>>()?;
            cfg.spec.check_angles(&given)?;
        }
        if let Some(a) = take(&mut map, "approximation") {
            if family != Family::BsTriangle {
                return Err(PolyscarError::Config("approximation only applies to the triangle".into()));
            }
            let r: Ratio = a.parse()?;
            if !r.is_positive() {
                return Err(PolyscarError::Config(format!("approximation {r} must be positive")));
            }
            cfg.approximation = Some(r);
        }
        if let Some(v) = take(&mut map, "variant") {
            cfg.variant = Variant::parse(&v).map_err(|e| PolyscarError::Config(e.to_string()))?;
        }
        if let Some(v) = take(&mut map, "skeleton") {
            cfg.skeleton = v;
        }
        if let Some(v) = take(&mut map, "max_m") {
            cfg.max_m = parse_num("max_m", &v)?;
        }
        if let Some(v) = take(&mut map, "threshold") {
            cfg.threshold = Some(parse_num("threshold", &v)?);
        }
        cfg.mode = take(&mut map, "mode");
        if let Some(v) = take(&mut map, "m") {
            cfg.m = parse_num("m", &v)?;
        }
        if let Some(v) = take(&mut map, "n") {
            cfg.n = parse_num("n", &v)?;
        }
        if let Some(v) = take(&mut map, "poc") {
            cfg.poc = parse_num("poc", &v)?;
        }
        if let Some(v) = take(&mut map, "bc") {
            cfg.bc = Boundary::parse(&v)?;
        }
        if let Some(v) = take(&mut map, "multiplicity") {
            cfg.multiplicity = parse_num("multiplicity", &v)?;
        }
        if let Some(v) = take(&mut map, "grid") {
            cfg.grid = Some(parse_num("grid", &v)?);
        }
        if let Some(v) = take(&mut map, "identity_grid") {
            cfg.identity_grid = parse_num("identity_grid", &v)?;
        }
        if let Some(v) = take(&mut map, "samples") {
            cfg.samples = parse_num("samples", &v)?;
        }
        if let Some(v) = take(&mut map, "format") {
            cfg.format = v.parse()?;
        }
        cfg.out = take(&mut map, "out").map(PathBuf::from);
        debug_assert!(map.is_empty());
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.threshold {
            if !(t.is_finite() && t > 0.0) {
                return Err(PolyscarError::Config(format!("threshold must be positive, got {t}")));
            }
        }
        if matches!(self.grid, Some(g) if g < 2) {
            return Err(PolyscarError::Config("grid must be at least 2".into()));
        }
        if self.identity_grid < 2 {
            return Err(PolyscarError::Config("identity_grid must be at least 2".into()));
        }
        if self.samples < 2 {
            return Err(PolyscarError::Config("samples must be at least 2".into()));
        }
        if self.multiplicity < 1 {
            return Err(PolyscarError::Config("multiplicity must be at least 1".into()));
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    pub fn skeleton_kind(&self) -> Result<SkeletonKind> {
        let s = self.skeleton.trim().to_ascii_lowercase();
        match s.as_str() {
            "" | "aperiodic" => Ok(SkeletonKind::Aperiodic),
            "periodic" | "default" => Ok(SkeletonKind::Periodic(SkeletonDirection::default_for(self.family()))),
            _ if self.family() == Family::Rectangle => {
                Ok(SkeletonKind::Periodic(SkeletonDirection::parse(self.family(), &s)?))
            }
            _ => Err(PolyscarError::Config(format!(
                "skeleton '{}' is not understood for the {} (aperiodic or periodic)",
                self.skeleton,
                self.family()
            ))),
        }
    }

    /// Periodic direction used by `unfold` and the strip modes.
    pub fn skeleton_direction(&self) -> Result<SkeletonDirection> {
        match self.skeleton_kind()? {
            SkeletonKind::Periodic(d) => Ok(d),
            SkeletonKind::Aperiodic => Ok(SkeletonDirection::default_for(self.family())),
        }
    }

    pub fn validity_threshold(&self) -> f64 {
        self.threshold.unwrap_or(DEFAULT_VALIDITY_THRESHOLD)
    }

    pub fn field_grid(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_GRID)
    }

    /// (u, q) as machine integers.
    pub fn approximation_pair(&self) -> Result<Option<(i64, i64)>> {
        match &self.approximation {
            None => Ok(None),
            Some(r) => match (r.numer_i64(), r.denom_i64()) {
                (Some(u), Some(q)) => Ok(Some((u, q))),
                _ => Err(PolyscarError::Config(format!("approximation {r} does not fit 64-bit integers"))),
            },
        }
    }
}
