//! Closed-form semiclassical wavefunctions and superscar states, and the
//! checks run on them: decomposition identities, boundary residuals, one-sided
//! limits across singular diagonals, and nodal sets.
//!
//! Everything here is unnormalized ("up to a constant"); only zeros, ratios
//! and identities are meaningful.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PolyscarError, Result};
use crate::exact::{Ratio, Surd};
use crate::geometry::{point_in_polygon, distance_to_segment, BilliardSpec, Boundary, Epp, Family, Sizes, Vec2};
use crate::quantization::{check_compatibility, remap_lshape, remap_rectangle, SkeletonDirection};
use crate::skeleton::skeleton;

/// Tolerance for the algebraic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Tolerance for sides on which a mode vanishes by construction.
pub const CONSTRUCTED_ZERO_TOLERANCE: f64 = 1e-12;
/// Default number of boundary samples per side.
pub const BOUNDARY_SAMPLES: usize = 10_000;
/// Default grid resolution per axis.
pub const DEFAULT_GRID: usize = 512;
/// Default nodal threshold, relative to max |Ψ|.
pub const NODAL_RELATIVE_THRESHOLD: f64 = 1e-3;

/// Numbers a closed form can be evaluated on: plain floats, or exact surds
/// whose phases are reduced mod 2 before the sine is taken.
pub trait Phase: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn lit(c: &Surd) -> Self;
    /// sin(π·self)
    fn sin_pi(&self) -> f64;
    /// cos(π·self)
    fn cos_pi(&self) -> f64;
}

impl Phase for f64 {
    fn lit(c: &Surd) -> f64 {
        c.to_f64()
    }
    fn sin_pi(&self) -> f64 {
        (PI * self).sin()
    }
    fn cos_pi(&self) -> f64 {
        (PI * self).cos()
    }
}

impl Phase for Surd {
    fn lit(c: &Surd) -> Surd {
        c.clone()
    }
    fn sin_pi(&self) -> f64 {
        (PI * self.rem_two_f64()).sin()
    }
    fn cos_pi(&self) -> f64 {
        (PI * self.rem_two_f64()).cos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    /// Triangle SWF on the u scale.
    SwfU,
    /// Triangle SWF on the q scale.
    SwfQ,
    /// Parallelogram: imaginary part of the complex SWF.
    SwfBranch1,
    /// Parallelogram: real part of the complex SWF.
    SwfBranch2,
    SwfComplex,
    /// Rectangle and L-shape product states.
    Exact,
    /// A Bogomolny–Schmit state on one POC. For the triangle and parallelogram
    /// the point is taken on the unfolded plane (the billiard is copy 1) and the
    /// state is zero off the strip; the Neumann choice replaces the sine along
    /// the flow by a cosine. For the rectangle and L-shape `poc` must be 0 and
    /// `bc` picks the Dirichlet or Neumann component of the two-frame sum.
    Superscar { poc: usize, bc: Boundary },
    /// A triangle or parallelogram B–S state folded back into the billiard:
    /// the signed sum over all images of the point that lie in the strip.
    BsFolded { poc: usize },
}

impl ModeKind {
    pub fn parse(text: &str, poc: usize, bc: Boundary) -> Result<ModeKind> {
        Ok(match text.trim().to_ascii_lowercase().as_str() {
            "swfu" | "u" => ModeKind::SwfU,
            "swfq" | "q" => ModeKind::SwfQ,
            "branch1" | "swfbranch1" => ModeKind::SwfBranch1,
            "branch2" | "swfbranch2" => ModeKind::SwfBranch2,
            "complex" | "swfcomplex" => ModeKind::SwfComplex,
            "exact" => ModeKind::Exact,
            "superscar" => ModeKind::Superscar { poc, bc },
            "bsfolded" | "folded" => ModeKind::BsFolded { poc },
            other => return Err(PolyscarError::Config(format!("unknown mode '{other}'"))),
        })
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeKind::SwfU => f.write_str("swf-u"),
            ModeKind::SwfQ => f.write_str("swf-q"),
            ModeKind::SwfBranch1 => f.write_str("branch1"),
            ModeKind::SwfBranch2 => f.write_str("branch2"),
            ModeKind::SwfComplex => f.write_str("complex"),
            ModeKind::Exact => f.write_str("exact"),
            ModeKind::Superscar { poc, bc } => write!(f, "superscar({poc},{bc:?})"),
            ModeKind::BsFolded { poc } => write!(f, "bs-folded({poc})"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ModeOptions {
    /// u/q stand-in for √2 (triangle).
    pub approximation: Option<(i64, i64)>,
    /// Skeleton for superscar modes; the family default when absent.
    pub skeleton: Option<SkeletonDirection>,
}

/// One planar POC strip with its transverse frame, ready for evaluation.
#[derive(Debug)]
struct Strip {
    epp: Epp,
    cells: Vec<Vec<[f64; 2]>>,
    along: [f64; 2],
    c_min: f64,
    width: f64,
    period: f64,
}

impl Strip {
    fn new(spec: &BilliardSpec, poc: usize) -> Result<Strip> {
        let epp = Epp::new(spec)?;
        let dir = SkeletonDirection::default_for(spec.family).vector(spec)?;
        let sk = skeleton(&epp, &dir)?;
        let p = sk.pocs.get(poc).ok_or_else(|| {
            PolyscarError::Config(format!("POC {poc} does not exist; the {} skeleton has {}", spec.family, sk.pocs.len()))
        })?;
        let d = sk.direction.to_f64();
        let len = d[0].hypot(d[1]);
        let along = [d[0] / len, d[1] / len];
        let cells: Vec<Vec<[f64; 2]>> = p.folded_cells.iter().map(|c| c.polygon.iter().map(|v| v.to_f64()).collect()).collect();
        let c_min = cells.iter().flatten().map(|v| v[0] * along[1] - v[1] * along[0]).fold(f64::INFINITY, f64::min);
        Ok(Strip { epp, cells, along, c_min, width: p.width, period: p.period_vector.length_f64() })
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        self.cells.iter().any(|c| point_in_polygon(c, p))
    }

    fn state(&self, m: i64, n: i64, bc: Boundary, p: [f64; 2]) -> f64 {
        let x = p[0] * self.along[1] - p[1] * self.along[0] - self.c_min;
        let y = p[0] * self.along[0] + p[1] * self.along[1];
        let t = (PI * m as f64 * x / self.width).sin();
        let phase = 2.0 * PI * n as f64 * y / self.period;
        match bc {
            Boundary::Dirichlet => t * phase.sin(),
            Boundary::Neumann => t * phase.cos(),
        }
    }

    /// Folded value with image membership decided at `probe` images and the
    /// state evaluated at `p` images (the two coincide for ordinary evaluation).
    fn folded(&self, m: i64, n: i64, p: [f64; 2], probe: [f64; 2]) -> f64 {
        let mut acc = 0.0;
        for (k, im) in self.epp.images.iter().enumerate() {
            let pl = self.epp.placement_f64(k);
            if self.contains(pl.apply(probe)) {
                acc += im.eta as f64 * self.state(m, n, Boundary::Dirichlet, pl.apply(p));
            }
        }
        acc
    }
}

/// Size data of one planar POC strip of the family's default skeleton.
#[derive(Clone, Debug, Serialize)]
pub struct StripInfo {
    pub poc: usize,
    pub cylinder: usize,
    pub width: f64,
    pub period: f64,
}

/// The strips superscar and folded modes can be built on, by POC id.
pub fn strips(spec: &BilliardSpec) -> Result<Vec<StripInfo>> {
    let epp = Epp::new(spec)?;
    let dir = SkeletonDirection::default_for(spec.family).vector(spec)?;
    Ok(skeleton(&epp, &dir)?
        .pocs
        .iter()
        .map(|p| StripInfo { poc: p.id, cylinder: p.cylinder, width: p.width, period: p.period_vector.length_f64() })
        .collect())
}

/// A closed-form wavefunction or superscar state of one billiard.
#[derive(Clone, Debug)]
pub struct WaveMode {
    pub spec: BilliardSpec,
    pub kind: ModeKind,
    pub m: i64,
    pub n: i64,
    /// (u, q): the triangle's √2 stand-in, or the parallelogram's L = u/q.
    pub approximation: Option<(i64, i64)>,
    pub skeleton: Option<SkeletonDirection>,
    strip: Option<Arc<Strip>>,
}

fn kind_err(kind: ModeKind, family: Family) -> PolyscarError {
    PolyscarError::Kind(format!("mode {kind} is not defined for the {family}"))
}

impl WaveMode {
    pub fn new(spec: &BilliardSpec, kind: ModeKind, m: i64, n: i64, opts: ModeOptions) -> Result<WaveMode> {
        let family = spec.family;
        let mut approximation = opts.approximation;
        let mut skeleton = None;
        let mut strip = None;
        match (family, kind) {
            (Family::BsTriangle, ModeKind::SwfU | ModeKind::SwfQ) => {
                let (u, q) = approximation
                    .ok_or_else(|| PolyscarError::NeedsApproximation("triangle SWFs need u/q".into()))?;
                if u <= 0 || q <= 0 {
                    return Err(PolyscarError::Config(format!("u/q = {u}/{q} must be positive")));
                }
            }
            (Family::Parallelogram, ModeKind::SwfBranch1 | ModeKind::SwfBranch2 | ModeKind::SwfComplex) => {}
            (Family::Rectangle | Family::LShape, ModeKind::Exact) => {}
            (Family::BsTriangle | Family::Parallelogram, ModeKind::Superscar { poc, .. } | ModeKind::BsFolded { poc }) => {
                strip = Some(Arc::new(Strip::new(spec, poc)?));
            }
            (Family::Rectangle | Family::LShape, ModeKind::Superscar { poc, .. }) => {
                if poc != 0 {
                    return Err(PolyscarError::Config(format!(
                        "the {family} superscar is one two-frame state; POC id must be 0, got {poc}"
                    )));
                }
                let dir = opts.skeleton.unwrap_or(SkeletonDirection::default_for(family));
                let report = check_compatibility(spec, dir)?;
                if !report.satisfied {
                    return Err(PolyscarError::Compatibility(format!("sizes violate {}", report.constraint)));
                }
                skeleton = Some(dir);
            }
            _ => return Err(kind_err(kind, family)),
        }
        if let Sizes::Parallelogram { l } = &spec.sizes {
            approximation = Some((l.numer_i64().unwrap_or(1), l.denom_i64().unwrap_or(1)));
        }
        Ok(WaveMode { spec: spec.clone(), kind, m, n, approximation, skeleton, strip })
    }

    pub fn is_complex(&self) -> bool {
        self.kind == ModeKind::SwfComplex
    }

    pub fn is_dirichlet(&self) -> bool {
        !matches!(self.kind, ModeKind::Superscar { bc: Boundary::Neumann, .. })
    }

    fn uq(&self) -> (i64, i64) {
        self.approximation.unwrap_or((1, 1))
    }

    /// Largest wavenumber present, for sampling-density checks.
    pub fn wavenumber(&self) -> f64 {
        let (m, n) = (self.m as f64, self.n as f64);
        let (u, q) = self.uq();
        match (&self.spec.sizes, self.kind) {
            (_, ModeKind::SwfU) => PI * u as f64 * m.hypot(n),
            (_, ModeKind::SwfQ) => PI * q as f64 * m.hypot(n),
            (Sizes::Parallelogram { .. }, ModeKind::SwfBranch1 | ModeKind::SwfBranch2 | ModeKind::SwfComplex) => {
                (2.0 * crate::quantization::parallelogram_energy(q, self.m, self.n)).sqrt()
            }
            (Sizes::Rectangle { a, b }, ModeKind::Exact) => PI * (m / a.to_f64()).hypot(n / b.to_f64()),
            (Sizes::LShape(s), ModeKind::Exact) => PI * (m / s.unit_x().to_f64()).hypot(n / s.unit_y().to_f64()),
            (_, ModeKind::Superscar { .. } | ModeKind::BsFolded { .. }) => match &self.strip {
                Some(s) => (PI * m / s.width).hypot(2.0 * PI * n / s.period),
                None => {
                    let (p, t) = self.frame_numbers();
                    p.hypot(t)
                }
            },
            _ => 0.0,
        }
    }

    /// Closed forms whose phases stay in the billiard's number field.
    fn closed_form<T: Phase>(&self, x: &T, y: &T) -> Option<f64> {
        match (&self.spec.sizes, self.kind) {
            (_, ModeKind::SwfU | ModeKind::SwfQ) => {
                let (u, q) = self.uq();
                let s = if self.kind == ModeKind::SwfU { u } else { q };
                Some(triangle_terms(s, &Surd::sqrt(2).scale(&Ratio::new(1, 2)), self.m, self.n, x, y).iter().sum())
            }
            (_, ModeKind::SwfBranch1 | ModeKind::SwfBranch2) => {
                let branch = if self.kind == ModeKind::SwfBranch1 { 1 } else { 2 };
                Some(parallelogram_terms(self.uq().1, self.m, self.n, branch, x, y).iter().sum())
            }
            (Sizes::Rectangle { a, b }, ModeKind::Exact) => Some(product_state(self.m, &a.recip(), self.n, &b.recip(), x, y)),
            (Sizes::LShape(s), ModeKind::Exact) => {
                Some(product_state(self.m, &s.unit_x().recip(), self.n, &s.unit_y().recip(), x, y))
            }
            _ => None,
        }
    }

    /// (P, Q) of the two-frame rectangle/L-shape superscar.
    fn frame_numbers(&self) -> (f64, f64) {
        let (_, n_len, area) = self.frame_axis();
        (PI * self.m as f64 / n_len, PI * self.n as f64 * n_len / area)
    }

    /// Frame axis (A, B), its length, and the transverse area factor.
    fn frame_axis(&self) -> ([f64; 2], f64, f64) {
        match (&self.spec.sizes, self.skeleton) {
            (Sizes::Rectangle { a, b }, Some(SkeletonDirection::Rectangle { q, r })) => {
                let (a, b) = (a.to_f64(), b.to_f64());
                let ax = [q as f64 * a, r as f64 * b];
                (ax, ax[0].hypot(ax[1]), a * b)
            }
            (Sizes::LShape(s), _) => {
                let ax = [s.a.to_f64(), s.d.to_f64()];
                (ax, ax[0].hypot(ax[1]), s.unit_x().to_f64() * s.unit_y().to_f64())
            }
            _ => ([1.0, 0.0], 1.0, 1.0),
        }
    }

    fn two_frame(&self, p: [f64; 2]) -> (f64, f64) {
        let (ax, len, area) = self.frame_axis();
        two_frame_components(ax, len, area, self.m as f64, self.n as f64, p)
    }

    /// Real value without the domain check. Closed forms continue analytically
    /// outside the billiard; folded states are only meaningful inside.
    pub fn value(&self, p: [f64; 2]) -> f64 {
        if let Some(v) = self.closed_form(&p[0], &p[1]) {
            return v;
        }
        match self.kind {
            ModeKind::SwfComplex => self.complex_value(p).0,
            ModeKind::Superscar { bc, .. } => match &self.strip {
                Some(s) => {
                    if s.contains(p) {
                        s.state(self.m, self.n, bc, p)
                    } else {
                        0.0
                    }
                }
                None => {
                    let (d, nn) = self.two_frame(p);
                    match bc {
                        Boundary::Dirichlet => d,
                        Boundary::Neumann => nn,
                    }
                }
            },
            ModeKind::BsFolded { .. } => {
                let s = self.strip.as_ref().expect("folded modes carry a strip");
                s.folded(self.m, self.n, p, p)
            }
            _ => f64::NAN,
        }
    }

    fn complex_value(&self, p: [f64; 2]) -> (f64, f64) {
        if self.kind == ModeKind::SwfComplex {
            let q = self.uq().1;
            let re: f64 = parallelogram_terms(q, self.m, self.n, 2, &p[0], &p[1]).iter().sum();
            let im: f64 = parallelogram_terms(q, self.m, self.n, 1, &p[0], &p[1]).iter().sum();
            (re, im)
        } else {
            (self.value(p), 0.0)
        }
    }

    fn requires_inside(&self) -> bool {
        !(matches!(self.kind, ModeKind::Superscar { .. }) && self.strip.is_some())
    }

    fn check_inside(&self, p: [f64; 2]) -> Result<()> {
        if !self.requires_inside() {
            return Ok(());
        }
        let poly = self.spec.vertices_f64();
        let on_edge = (0..poly.len()).any(|i| distance_to_segment(p, poly[i], poly[(i + 1) % poly.len()]) < 1e-12);
        if point_in_polygon(&poly, p) || on_edge {
            Ok(())
        } else {
            Err(PolyscarError::Domain(format!("point ({}, {}) lies outside the {}", p[0], p[1], self.spec.family)))
        }
    }
}

/// sin(π(m/a)x)·sin(π(n/b)y) given 1/a and 1/b.
fn product_state<T: Phase>(m: i64, inv_a: &Surd, n: i64, inv_b: &Surd, x: &T, y: &T) -> f64 {
    let kx = T::lit(&inv_a.scale(&Ratio::integer(m)));
    let ky = T::lit(&inv_b.scale(&Ratio::integer(n)));
    (kx * x.clone()).sin_pi() * (ky * y.clone()).sin_pi()
}

/// [`product_state`] over many float points, with the wavenumbers converted once.
fn product_states(m: i64, inv_a: &Surd, n: i64, inv_b: &Surd, points: &[[f64; 2]]) -> Vec<f64> {
    let kx = inv_a.scale(&Ratio::integer(m)).to_f64();
    let ky = inv_b.scale(&Ratio::integer(n)).to_f64();
    points.iter().map(|p| (kx * p[0]).sin_pi() * (ky * p[1]).sin_pi()).collect()
}

/// The four plane-wave products of the triangle SWF on scale `s`, with `k`
/// standing for 1/√2 (exact, or one of its rational stand-ins).
pub fn triangle_terms<T: Phase>(s: i64, k: &Surd, m: i64, n: i64, x: &T, y: &T) -> [f64; 4] {
    let sm = T::lit(&Surd::int(s * m));
    let sn = T::lit(&Surd::int(s * n));
    let km = T::lit(&k.scale(&Ratio::integer(s * m)));
    let kn = T::lit(&k.scale(&Ratio::integer(s * n)));
    let plus = x.clone() + y.clone();
    let minus = x.clone() - y.clone();
    [
        (sm.clone() * x.clone()).sin_pi() * (sn.clone() * y.clone()).sin_pi(),
        -(km.clone() * plus.clone()).sin_pi() * (kn.clone() * minus.clone()).sin_pi(),
        (km * minus).sin_pi() * (kn * plus).sin_pi(),
        -(sn * x.clone()).sin_pi() * (sm * y.clone()).sin_pi(),
    ]
}

/// The three terms of a parallelogram branch (1 = sine, 2 = cosine first factors).
pub fn parallelogram_terms<T: Phase>(q: i64, m: i64, n: i64, branch: u8, x: &T, y: &T) -> [f64; 3] {
    let r3 = Surd::sqrt(3);
    let s3 = T::lit(&r3);
    let a = T::lit(&Surd::frac((m + n) * q, 3));
    let b = T::lit(&r3.scale(&Ratio::new(q * (m - n), 3)));
    let two = T::lit(&Surd::int(2));
    let u1 = x.clone() + s3.clone() * y.clone();
    let u2 = x.clone() - s3.clone() * y.clone();
    let v1 = s3.clone() * x.clone() - y.clone();
    let v2 = s3 * x.clone() + y.clone();
    let sb1 = (b.clone() * v1).sin_pi();
    let sb2 = (b.clone() * v2).sin_pi();
    let sb3 = (two.clone() * b * y.clone()).sin_pi();
    let ax2 = two * a.clone() * x.clone();
    if branch == 1 {
        [-(a.clone() * u1).sin_pi() * sb1, (a * u2).sin_pi() * sb2, ax2.sin_pi() * sb3]
    } else {
        [(a.clone() * u1).cos_pi() * sb1, -(a * u2).cos_pi() * sb2, ax2.cos_pi() * sb3]
    }
}

/// Dirichlet and Neumann components of the two-frame superscar: frames along
/// (A, B) and its mirror (−A, B), P = πm/|axis|, Q = πn|axis|/area.
fn two_frame_components(ax: [f64; 2], len: f64, area: f64, m: f64, n: f64, p: [f64; 2]) -> (f64, f64) {
    let (x, y) = (p[0], p[1]);
    let y1 = (ax[0] * x + ax[1] * y) / len;
    let x1 = (ax[1] * x - ax[0] * y) / len;
    let y2 = (-ax[0] * x + ax[1] * y) / len;
    let x2 = (ax[1] * x + ax[0] * y) / len;
    let pp = PI * m / len;
    let qq = PI * n * len / area;
    let d = (pp * y1).sin() * (qq * x1).sin() + (pp * y2).sin() * (qq * x2).sin();
    let nn = (pp * y1).cos() * (qq * x1).cos() - (pp * y2).cos() * (qq * x2).cos();
    (d, nn)
}

/// Value of a real mode (the real part for the complex parallelogram SWF).
pub fn eval_swf(mode: &WaveMode, p: [f64; 2]) -> Result<f64> {
    mode.check_inside(p)?;
    Ok(mode.value(p))
}

pub fn eval_complex(mode: &WaveMode, p: [f64; 2]) -> Result<(f64, f64)> {
    mode.check_inside(p)?;
    Ok(mode.complex_value(p))
}

pub fn eval_superscar(mode: &WaveMode, p: [f64; 2]) -> Result<f64> {
    if !matches!(mode.kind, ModeKind::Superscar { .. } | ModeKind::BsFolded { .. }) {
        return Err(PolyscarError::Kind(format!("{} is not a superscar mode", mode.kind)));
    }
    eval_swf(mode, p)
}

/// Σ η_k exp(i p·g_k r) over the EPP images: the plane-wave sum every
/// Dirichlet SWF is built from.
pub fn plane_wave_sum(epp: &Epp, momentum: [f64; 2], p: [f64; 2]) -> (f64, f64) {
    epp.images_of(p).fold((0.0, 0.0), |(re, im), (_, r, eta)| {
        let phase = momentum[0] * r[0] + momentum[1] * r[1];
        (re + eta as f64 * phase.cos(), im + eta as f64 * phase.sin())
    })
}

/// Limits of a mode on both sides of a line through `p` with unit normal `normal`.
#[derive(Clone, Debug, Serialize)]
pub struct SideLimits {
    pub minus: f64,
    pub plus: f64,
    pub value_jump: f64,
    /// |∂ν Ψ(+) − ∂ν Ψ(−)|
    pub derivative_jump: f64,
}

/// One-sided limits across a line. Closed forms are analytic, so both limits
/// are the value itself. Folded B–S states are piecewise analytic: the set of
/// images inside the strip is fixed on each side, and each branch is
/// evaluated at the point.
pub fn one_sided_limits(mode: &WaveMode, p: [f64; 2], normal: [f64; 2]) -> Result<SideLimits> {
    mode.check_inside(p)?;
    let offset = |s: f64, h: f64| [p[0] + s * h * normal[0], p[1] + s * h * normal[1]];
    match (&mode.strip, mode.kind) {
        (Some(strip), ModeKind::BsFolded { .. }) => {
            let probe = 1e-9;
            let delta = 1e-7;
            let branch = |side: f64| {
                let at = |q: [f64; 2]| strip.folded(mode.m, mode.n, q, offset(side, probe));
                let value = at(p);
                let deriv = (at(offset(1.0, delta)) - at(offset(-1.0, delta))) / (2.0 * delta);
                (value, deriv)
            };
            let (vm, dm) = branch(-1.0);
            let (vp, dp) = branch(1.0);
            Ok(SideLimits { minus: vm, plus: vp, value_jump: (vp - vm).abs(), derivative_jump: (dp - dm).abs() })
        }
        _ => {
            let v = mode.value(p);
            Ok(SideLimits { minus: v, plus: v, value_jump: 0.0, derivative_jump: 0.0 })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub side: String,
    pub max_abs: f64,
    pub bound: f64,
    pub pass: bool,
}

impl ResidualReport {
    fn new(side: impl Into<String>, max_abs: f64, bound: f64) -> ResidualReport {
        ResidualReport { side: side.into(), max_abs, bound, pass: max_abs < bound }
    }
}

/// Bound on |Ψ| over the triangle's FH side for a mode on scale s:
/// 2π ε s (m+n)/(1 − ε/√2) with ε = 1/s².
pub fn triangle_side_bound(scale: i64, m: i64, n: i64) -> f64 {
    let s = scale as f64;
    let eps = 1.0 / (s * s);
    2.0 * PI * eps * s * (m + n) as f64 / (1.0 - eps / SQRT_2)
}

/// Max |Ψ| over `samples` evenly spaced points of one side. Sample points are
/// exact, and closed forms with field-valued phases are evaluated with exact
/// phase reduction. The triangle's FH side (where only the approximation
/// makes Ψ small) is bounded by [`triangle_side_bound`]; every other side
/// vanishes by construction and is held to 1e−12.
pub fn boundary_residual(mode: &WaveMode, side: &str, samples: usize) -> Result<ResidualReport> {
    if !mode.is_dirichlet() {
        return Err(PolyscarError::UnsupportedBoundary("no residual bound for Neumann modes".into()));
    }
    if mode.is_complex() {
        return Err(PolyscarError::Kind("take a real branch before measuring a boundary residual".into()));
    }
    if samples < 2 {
        return Err(PolyscarError::Usage("at least two boundary samples are needed".into()));
    }
    let s = mode.spec.side_by_label(side)?;
    let dir = &s.to - &s.from;
    let exact = mode.closed_form(&s.from.x, &s.from.y).is_some();
    let last = (samples - 1) as i64;
    let max_abs = (0..samples)
        .into_par_iter()
        .map(|i| {
            let t = Ratio::new(i as i64, last);
            let pt = &s.from + &dir.scale_ratio(&t);
            let v = if exact { mode.closed_form(&pt.x, &pt.y).unwrap() } else { mode.value(pt.to_f64()) };
            v.abs()
        })
        .reduce(|| 0.0, f64::max);
    let bound = match (mode.kind, s.label) {
        (ModeKind::SwfU, "FH") => triangle_side_bound(mode.uq().0, mode.m, mode.n),
        (ModeKind::SwfQ, "FH") => triangle_side_bound(mode.uq().1, mode.m, mode.n),
        _ => CONSTRUCTED_ZERO_TOLERANCE,
    };
    Ok(ResidualReport::new(s.label, max_abs, bound))
}

pub fn boundary_residuals(mode: &WaveMode, samples: usize) -> Result<Vec<ResidualReport>> {
    mode.spec.sides().iter().map(|s| boundary_residual(mode, s.label, samples)).collect()
}

/// Max |Ψ| along the segment a→b, for probing approximate nodal lines.
pub fn line_max_abs(mode: &WaveMode, a: [f64; 2], b: [f64; 2], samples: usize) -> f64 {
    let last = samples.max(2) - 1;
    (0..=last)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / last as f64;
            mode.value([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Folded images of the triangle's singular diagonals: the approximate nodal
/// lines of the triangle SWFs, clipped to the triangle. The last line only
/// appears when m ≡ n (mod 2).
pub fn triangle_folded_diagonals(m: i64, n: i64) -> Vec<(&'static str, [f64; 2], [f64; 2])> {
    let r2 = SQRT_2;
    let c = 1.0 + r2;
    let on_oh = |x: f64| (r2 - 1.0) * x;
    let mut out = vec![
        ("x = 1", [1.0, 0.0], [1.0, on_oh(1.0)]),
        // y = x − √2 from (√2, 0) to the FH side.
        ("y = x - sqrt2", [r2, 0.0], [c, 1.0]),
        // y = −(x − √2) from (√2, 0) up to OH: (√2−1)x = √2 − x → x = 1.
        ("y = -(x - sqrt2)", [r2, 0.0], [1.0, r2 - 1.0]),
        ("x = 1 + sqrt2/2", [1.0 + r2 / 2.0, 0.0], [1.0 + r2 / 2.0, on_oh(1.0 + r2 / 2.0)]),
    ];
    if (m - n).rem_euclid(2) == 0 {
        // y = −x + √2 + 1 from F to OH at x = (1+√2)/√2.
        let x = c / r2;
        out.push(("y = -x + sqrt2 + 1", [c, 0.0], [x, on_oh(x)]));
    }
    out
}

/// Samples of a mode on a regular grid over the billiard's bounding box.
/// Points outside the polygon are NaN.
#[derive(Clone, Debug)]
pub struct WaveField {
    pub nx: usize,
    pub ny: usize,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    /// Row-major, row j holds y = lo.y + j·dy.
    pub values: Vec<f64>,
    pub imag: Option<Vec<f64>>,
    pub label: String,
}

impl WaveField {
    pub fn step(&self) -> [f64; 2] {
        [(self.hi[0] - self.lo[0]) / (self.nx - 1) as f64, (self.hi[1] - self.lo[1]) / (self.ny - 1) as f64]
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.step();
        [self.lo[0] + i as f64 * h[0], self.lo[1] + j as f64 * h[1]]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().filter(|v| v.is_finite()).fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Drops the imaginary part, keeping the real branch.
    pub fn real_branch(mut self) -> WaveField {
        self.imag = None;
        self
    }

    pub fn imaginary_branch(self) -> Option<WaveField> {
        let imag = self.imag?;
        Some(WaveField { values: imag, imag: None, label: format!("{} (imaginary)", self.label), ..self })
    }
}

/// Grid samples, parallel over rows. A single point is padded to a 2×2 grid.
pub fn sample_field(mode: &WaveMode, grid: usize) -> Result<WaveField> {
    if grid < 2 {
        return Err(PolyscarError::Usage(format!("grid size {grid} is too small (need at least 2)")));
    }
    let (lo, hi) = mode.spec.bounding_box();
    let poly = mode.spec.vertices_f64();
    let h = [(hi[0] - lo[0]) / (grid - 1) as f64, (hi[1] - lo[1]) / (grid - 1) as f64];
    let rows: Vec<Vec<(f64, f64)>> = (0..grid)
        .into_par_iter()
        .map(|j| {
            (0..grid)
                .map(|i| {
                    let p = [lo[0] + i as f64 * h[0], lo[1] + j as f64 * h[1]];
                    if point_in_polygon(&poly, p) {
                        mode.complex_value(p)
                    } else {
                        (f64::NAN, f64::NAN)
                    }
                })
                .collect()
        })
        .collect();
    let flat: Vec<(f64, f64)> = rows.into_iter().flatten().collect();
    let values = flat.iter().map(|v| v.0).collect();
    let imag = mode.is_complex().then(|| flat.iter().map(|v| v.1).collect());
    Ok(WaveField {
        nx: grid,
        ny: grid,
        lo,
        hi,
        values,
        imag,
        label: format!("{} {} (m,n)=({},{})", mode.spec.family, mode.kind, mode.m, mode.n),
    })
}

/// Grid points per wavelength at the mode's largest wavenumber.
pub fn samples_per_wavelength(mode: &WaveMode, grid: usize) -> f64 {
    let (lo, hi) = mode.spec.bounding_box();
    let h = ((hi[0] - lo[0]).max(hi[1] - lo[1])) / (grid.max(2) - 1) as f64;
    let k = mode.wavenumber();
    if k == 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI / k / h
    }
}

/// Approximate nodal set: grid points with |Ψ| below `threshold` and a
/// neighbour of opposite sign, plus the linearly interpolated zero on every
/// grid edge whose ends have opposite signs.
pub fn nodal_lines(field: &WaveField, threshold: f64) -> Result<Vec<[f64; 2]>> {
    if field.imag.is_some() {
        return Err(PolyscarError::Domain("complex field: select a real branch first".into()));
    }
    let (nx, ny) = (field.nx, field.ny);
    let mut out = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = field.get(i, j);
            if !v.is_finite() {
                continue;
            }
            let mut flips = false;
            for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                    continue;
                }
                let w = field.get(a as usize, b as usize);
                if !w.is_finite() || v * w >= 0.0 {
                    continue;
                }
                flips = true;
                // Each edge once: only toward +i / +j.
                if di + dj > 0 {
                    let t = v / (v - w);
                    let p = field.point(i, j);
                    let q = field.point(a as usize, b as usize);
                    out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                }
            }
            if flips && v.abs() < threshold {
                out.push(field.point(i, j));
            }
        }
    }
    Ok(out)
}

/// Default nodal threshold for a field.
pub fn default_nodal_threshold(field: &WaveField) -> f64 {
    NODAL_RELATIVE_THRESHOLD * field.max_abs()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub check: String,
    pub max_abs: f64,
    /// Global sign relating the two sides (identities hold up to normalization).
    pub sign: f64,
    pub bound: f64,
    pub pass: bool,
}

fn identity_report(check: String, lhs: &[f64], rhs: &[f64]) -> IdentityReport {
    let dot: f64 = lhs.iter().zip(rhs).map(|(a, b)| a * b).sum();
    let sign = if dot < 0.0 { -1.0 } else { 1.0 };
    let max_abs = lhs.iter().zip(rhs).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
    IdentityReport { check, max_abs, sign, bound: IDENTITY_TOLERANCE, pass: max_abs < IDENTITY_TOLERANCE }
}

/// The four rewritten triangle B–S states (√2 replaced throughout).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleForm {
    /// D6 state, √2 → 2q/u.
    D6U,
    /// D6 state, √2 → u/q.
    D6Q,
    /// D9 state, √2 → 2q/u.
    D9U,
    /// D9 state, √2 → u/q.
    D9Q,
}

/// Rewritten triangle B–S state. Half-integer m′ occur in the D9 substitutions,
/// so the quantum numbers are rationals.
pub fn triangle_bs_form<T: Phase>(form: TriangleForm, u: i64, q: i64, m: &Ratio, n: &Ratio, x: &T, y: &T) -> f64 {
    let c = |num: i64, den: i64, k: &Ratio| T::lit(&Surd::rational(Ratio::new(num, den) * k));
    let mm = T::lit(&Surd::rational(m.clone()));
    let one = T::lit(&Surd::one());
    let plus = x.clone() + y.clone();
    let minus = x.clone() - y.clone();
    match form {
        TriangleForm::D6U => {
            (c(q, u, m) * minus).sin_pi() * (c(q, 2 * q + u, n) * plus).sin_pi()
                - (c(u, 2 * q + u, n) * x.clone()).sin_pi() * (mm * y.clone()).sin_pi()
        }
        TriangleForm::D6Q => {
            (c(u, 2 * q, m) * minus).sin_pi() * (c(u, 2 * (q + u), n) * plus).sin_pi()
                - (c(q, q + u, n) * x.clone()).sin_pi() * (mm * y.clone()).sin_pi()
        }
        TriangleForm::D9U => {
            (c(2 * q, u, m) * (x.clone() - one)).sin_pi() * (c(q, 2 * q + u, n) * y.clone()).sin_pi()
                - (c(u, 2 * (2 * q + u), n) * minus).sin_pi() * (mm * (plus - c(2 * q, u, &Ratio::one()))).sin_pi()
        }
        TriangleForm::D9Q => {
            (c(u, q, m) * (x.clone() - one)).sin_pi() * (c(u, 2 * (q + u), n) * y.clone()).sin_pi()
                - (c(q, 2 * (q + u), n) * minus).sin_pi() * (mm * (plus - c(u, q, &Ratio::one()))).sin_pi()
        }
    }
}

/// The D6 and D9 B–S states folded into the triangle, written with the exact √2.
pub fn triangle_bs_exact(d9: bool, m: i64, n: i64, p: [f64; 2]) -> f64 {
    let (m, n) = (m as f64, n as f64);
    let (x, y) = (p[0], p[1]);
    let s = |v: f64| (PI * v).sin();
    if d9 {
        s(SQRT_2 * m * (x - 1.0)) * s(0.5 * n * (2.0 - SQRT_2) * y) - s(0.5 * n * (SQRT_2 - 1.0) * (x - y)) * s(m * (x + y - SQRT_2))
    } else {
        -s((SQRT_2 - 1.0) * n * x) * s(m * y) + s(n * (x + y) / (2.0 + SQRT_2)) * s(m * FRAC_1_SQRT_2 * (x - y))
    }
}

/// Parallelogram B–S states on the d3, d5 and d8 POCs, with L = u/q.
pub fn parallelogram_bs_form(period: u8, u: i64, q: i64, m: i64, n: i64, p: [f64; 2]) -> Result<f64> {
    let (u, q, m, n) = (u as f64, q as f64, m as f64, n as f64);
    let (x, y) = (p[0], p[1]);
    let r3 = 3f64.sqrt();
    let s = |v: f64| (PI * v).sin();
    Ok(match period {
        3 => s(n * (x + r3 * y - u / q)) * s(q * m * (r3 * x - y + r3) / (r3 * (u + 2.0 * q))),
        5 => s(n * (x - r3 * y)) * s(q * m * (r3 * x + y) / (r3 * (u + q))),
        8 => s(2.0 * n * q * (x - 0.5) / (2.0 * u - q)) * s(2.0 * m * y / r3),
        other => return Err(PolyscarError::Config(format!("no parallelogram POC with period d{other}"))),
    })
}

/// Quantum numbers for the decomposition and substitution checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionCase {
    /// Skeleton (q, r), multiplicity c, transverse n.
    Rectangle { q: u32, r: u32, c: i64, n: i64 },
    /// Multiplicity γ, transverse n″.
    LShape { gamma: i64, n2: i64 },
    /// SWF numbers (m, n) with √2 ≈ u/q.
    Triangle { u: i64, q: i64, m: i64, n: i64 },
    /// SWF numbers (m, n); m + n must be divisible by 3.
    Parallelogram { m: i64, n: i64 },
}

/// Interior grid points of the billiard, `grid` per axis.
pub fn interior_grid(spec: &BilliardSpec, grid: usize) -> Vec<[f64; 2]> {
    let (lo, hi) = spec.bounding_box();
    let poly = spec.vertices_f64();
    let g = grid.max(2);
    let mut out = Vec::with_capacity(g * g);
    for j in 0..g {
        for i in 0..g {
            let p = [
                lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / g as f64,
                lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / g as f64,
            ];
            if point_in_polygon(&poly, p) {
                out.push(p);
            }
        }
    }
    out
}

pub fn verify_decomposition(spec: &BilliardSpec, case: DecompositionCase, grid: usize) -> Result<Vec<IdentityReport>> {
    verify_decomposition_at(spec, case, &interior_grid(spec, grid))
}

/// Checks the periodic-skeleton SWFs against their superscar decompositions
/// (rectangle, L-shape) or the rewritten B–S states against the individual
/// SWF terms (triangle, parallelogram), at the given points.
pub fn verify_decomposition_at(spec: &BilliardSpec, case: DecompositionCase, points: &[[f64; 2]]) -> Result<Vec<IdentityReport>> {
    match (case, &spec.sizes) {
        (DecompositionCase::Rectangle { q, r, c, n }, Sizes::Rectangle { a, b }) => {
            let dir = SkeletonDirection::Rectangle { q, r };
            let report = check_compatibility(spec, dir)?;
            let (k, l) = report
                .coprime
                .filter(|_| report.satisfied)
                .ok_or_else(|| PolyscarError::Compatibility(format!("sizes violate {}", report.constraint)))?;
            let (m2, n2, m) = remap_rectangle(c, k, l, q as i64, r as i64, n);
            let (ia, ib) = (a.recip(), b.recip());
            let (af, bf) = (a.to_f64(), b.to_f64());
            let ax = [q as f64 * af, r as f64 * bf];
            let len = ax[0].hypot(ax[1]);
            let lhs = product_states(m2, &ia, n2, &ib, points);
            let rhs: Vec<f64> = points
                .iter()
                .map(|&p| {
                    let (d, nn) = two_frame_components(ax, len, af * bf, m as f64, n as f64, p);
                    0.5 * (d - nn)
                })
                .collect();
            Ok(vec![identity_report(format!("rectangle ({q},{r}) c={c} n={n}: product vs (D − N)/2"), &lhs, &rhs)])
        }
        (DecompositionCase::LShape { gamma, n2 }, Sizes::LShape(s)) => {
            let report = check_compatibility(spec, SkeletonDirection::LShapeDiagonal)?;
            let (k, l) = report
                .coprime
                .filter(|_| report.satisfied)
                .ok_or_else(|| PolyscarError::Compatibility(format!("sizes violate {}", report.constraint)))?;
            let (m, n, m2) = remap_lshape(gamma, k, l, s.alpha, s.delta, n2);
            let (ux, uy) = (s.unit_x(), s.unit_y());
            let ax = [s.a.to_f64(), s.d.to_f64()];
            let len = ax[0].hypot(ax[1]);
            let area = ux.to_f64() * uy.to_f64();
            let lhs = product_states(m, &ux.recip(), n, &uy.recip(), points);
            let rhs: Vec<f64> = points
                .iter()
                .map(|&p| {
                    let (d, nn) = two_frame_components(ax, len, area, m2 as f64, n2 as f64, p);
                    0.5 * (d - nn)
                })
                .collect();
            Ok(vec![identity_report(format!("lshape γ={gamma} n2={n2}: product vs (D − N)/2"), &lhs, &rhs)])
        }
        (DecompositionCase::Triangle { u, q, m, n }, Sizes::Triangle) => Ok(triangle_substitutions(u, q, m, n, points)),
        (DecompositionCase::Parallelogram { m, n }, Sizes::Parallelogram { l }) => {
            let (u, q) = (l.numer_i64().unwrap_or(1), l.denom_i64().unwrap_or(1));
            parallelogram_substitutions(u, q, m, n, points)
        }
        _ => Err(PolyscarError::Kind(format!("decomposition case {case:?} does not belong to the {}", spec.family))),
    }
}

/// Sample coordinate snapped to a multiple of 2⁻²⁴, which keeps exact
/// products small while moving the point by less than 1e−7.
fn exact_coord(v: f64) -> Surd {
    const DEN: i64 = 1 << 24;
    Surd::frac((v * DEN as f64).round() as i64, DEN)
}

fn triangle_substitutions(u: i64, q: i64, m: i64, n: i64, points: &[[f64; 2]]) -> Vec<IdentityReport> {
    let ku = Surd::frac(q, u);
    let kq = Surd::frac(u, 2 * q);
    // Phases reach ~10⁶ at realistic u, beyond what float rounding leaves
    // at 1e−10, so the sample points are taken as exact rationals.
    let exact: Vec<(Surd, Surd)> = points.iter().map(|p| (exact_coord(p[0]), exact_coord(p[1]))).collect();
    let terms_u: Vec<[f64; 4]> = exact.iter().map(|(x, y)| triangle_terms(u, &ku, m, n, x, y)).collect();
    let terms_q: Vec<[f64; 4]> = exact.iter().map(|(x, y)| triangle_terms(q, &kq, m, n, x, y)).collect();
    let first = |t: &[[f64; 4]]| t.iter().map(|t| t[0] + t[1]).collect::<Vec<f64>>();
    let last = |t: &[[f64; 4]]| t.iter().map(|t| t[2] + t[3]).collect::<Vec<f64>>();
    let r = |a: i64, b: i64| Ratio::new(a, b);
    let cases: [(TriangleForm, Ratio, Ratio, &str, Vec<f64>); 8] = [
        (TriangleForm::D6U, r(u * m, 1), r((2 * q + u) * n, 1), "D6/u m'=um n'=(2q+u)n vs last two u-terms", last(&terms_u)),
        (TriangleForm::D6U, r(u * n, 1), r((2 * q + u) * m, 1), "D6/u m'=un n'=(2q+u)m vs first two u-terms", first(&terms_u)),
        (TriangleForm::D6Q, r(q * m, 1), r((q + u) * n, 1), "D6/q m'=qm n'=(q+u)n vs last two q-terms", last(&terms_q)),
        (TriangleForm::D6Q, r(q * n, 1), r((q + u) * m, 1), "D6/q m'=qn n'=(q+u)m vs first two q-terms", first(&terms_q)),
        (TriangleForm::D9U, r(u * m, 2), r((2 * q + u) * n, 1), "D9/u 2m'=um n'=(2q+u)n vs first two q-terms", first(&terms_q)),
        (TriangleForm::D9U, r(u * n, 2), r((2 * q + u) * m, 1), "D9/u 2m'=un n'=(2q+u)m vs last two q-terms", last(&terms_q)),
        (TriangleForm::D9Q, r(q * m, 1), r(2 * (q + u) * n, 1), "D9/q m'=qm n'=2(q+u)n vs first two u-terms", first(&terms_u)),
        (TriangleForm::D9Q, r(q * n, 1), r(2 * (q + u) * m, 1), "D9/q m'=qn n'=2(q+u)m vs last two u-terms", last(&terms_u)),
    ];
    cases
        .into_iter()
        .map(|(form, m1, n1, label, target)| {
            let lhs: Vec<f64> = exact.iter().map(|(x, y)| triangle_bs_form(form, u, q, &m1, &n1, x, y)).collect();
            identity_report(format!("triangle {u}/{q} (m,n)=({m},{n}): {label}"), &lhs, &target)
        })
        .collect()
}

fn parallelogram_substitutions(u: i64, q: i64, m: i64, n: i64, points: &[[f64; 2]]) -> Result<Vec<IdentityReport>> {
    if (m + n).rem_euclid(3) != 0 {
        return Err(PolyscarError::Remap(format!("m + n = {} is not a multiple of 3", m + n)));
    }
    let (m2, n2) = ((m + n) / 3, m - n);
    let terms: Vec<[f64; 3]> = points.iter().map(|p| parallelogram_terms(q, m, n, 1, &p[0], &p[1])).collect();
    let subs = [(3u8, (u + 2 * q) * n2, m2 * q), (5, (u + q) * n2, m2 * q), (8, n2 * q, m2 * (2 * u - q))];
    subs.iter()
        .enumerate()
        .map(|(i, &(period, m1, n1))| {
            let lhs = points.iter().map(|&p| parallelogram_bs_form(period, u, q, m1, n1, p)).collect::<Result<Vec<f64>>>()?;
            let rhs: Vec<f64> = terms.iter().map(|t| t[i]).collect();
            Ok(identity_report(
                format!("parallelogram L={u}/{q} (m,n)=({m},{n}): d{period} state m'={m1} n'={n1} vs term {}", i + 1),
                &lhs,
                &rhs,
            ))
        })
        .collect()
}

/// Rotation of the unfolded plane by kπ/4 about the origin.
pub fn rotate_eighth(k: i32, p: [f64; 2]) -> [f64; 2] {
    let a = k as f64 * PI / 4.0;
    let (s, c) = a.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Exact-coordinate evaluation of a closed-form mode; `None` for modes whose
/// phases leave the billiard's number field.
pub fn eval_exact(mode: &WaveMode, p: &Vec2) -> Option<f64> {
    mode.closed_form(&p.x, &p.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Boundary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle(kind: ModeKind, m: i64, n: i64) -> WaveMode {
        let opts = ModeOptions { approximation: Some((3363, 2378)), ..Default::default() };
        WaveMode::new(&BilliardSpec::bs_triangle(), kind, m, n, opts).unwrap()
    }

    fn random_inside(spec: &BilliardSpec, count: usize, seed: u64) -> Vec<[f64; 2]> {
        let (lo, hi) = spec.bounding_box();
        let poly = spec.vertices_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < count {
            let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            if point_in_polygon(&poly, p) {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn triangle_vanishes_on_constructed_sides() {
        let mode = triangle(ModeKind::SwfU, 7, 3);
        assert_eq!(eval_swf(&mode, [0.0, 0.0]).unwrap(), 0.0);
        for side in ["OF", "HO"] {
            let r = boundary_residual(&mode, side, 500).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn triangle_equal_numbers_vanish() {
        let mode = triangle(ModeKind::SwfU, 5, 5);
        for p in random_inside(&mode.spec, 50, 1) {
            assert!(eval_swf(&mode, p).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn triangle_side_bound_values() {
        // 2π·122/3363/(1 − ε/√2)
        assert!((triangle_side_bound(3363, 121, 1) - 0.22794).abs() < 1e-4);
        assert!((triangle_side_bound(3363, 266, 1) - 0.49883).abs() < 1e-4);
    }

    #[test]
    fn triangle_hypotenuse_below_bound() {
        let mode = triangle(ModeKind::SwfU, 121, 1);
        let r = boundary_residual(&mode, "FH", 2000).unwrap();
        assert!(r.pass && r.max_abs > 0.01, "{r:?}");
        let q = triangle(ModeKind::SwfQ, 121, 1);
        let r = boundary_residual(&q, "FH", 2000).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn triangle_rotation_symmetry() {
        let mode = triangle(ModeKind::SwfU, 4, 1);
        let pts = random_inside(&mode.spec, 30, 2);
        for k in [-2, -1, 1, 2] {
            let a: Vec<f64> = pts.iter().map(|&p| mode.value(p)).collect();
            let b: Vec<f64> = pts.iter().map(|&p| mode.value(rotate_eighth(k, p))).collect();
            let r = identity_report(format!("rot {k}"), &a, &b);
            assert!(r.max_abs < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn triangle_matches_plane_wave_sum() {
        let mode = triangle(ModeKind::SwfU, 3, 1);
        let epp = Epp::new(&mode.spec).unwrap();
        let p = [PI * 3363.0 * 3.0, PI * 3363.0];
        let pts = random_inside(&mode.spec, 20, 3);
        let a: Vec<f64> = pts.iter().map(|&x| mode.value(x)).collect();
        let sums: Vec<(f64, f64)> = pts.iter().map(|&x| plane_wave_sum(&epp, p, x)).collect();
        assert!(sums.iter().all(|s| s.1.abs() < 1e-6));
        let ratio = sums[0].0 / a[0];
        for (s, v) in sums.iter().zip(&a) {
            assert!((s.0 - ratio * v).abs() < 1e-6, "ratio {ratio}");
        }
        assert!((ratio.abs() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rectangle_exact_matches_plane_wave_sum() {
        let spec = BilliardSpec::rectangle(Surd::int(1), Surd::frac(3, 2)).unwrap();
        let mode = WaveMode::new(&spec, ModeKind::Exact, 3, 2, ModeOptions::default()).unwrap();
        let epp = Epp::new(&spec).unwrap();
        let p = [3.0 * PI, 2.0 * PI / 1.5];
        for x in random_inside(&spec, 10, 4) {
            let (re, im) = plane_wave_sum(&epp, p, x);
            assert!(im.abs() < 1e-9);
            assert!((re + 4.0 * mode.value(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn parallelogram_branches() {
        let spec = BilliardSpec::parallelogram(Ratio::integer(4)).unwrap();
        for kind in [ModeKind::SwfBranch1, ModeKind::SwfBranch2] {
            let mode = WaveMode::new(&spec, kind, 3, 1, ModeOptions::default()).unwrap();
            for r in boundary_residuals(&mode, 400).unwrap() {
                assert!(r.pass, "{kind}: {r:?}");
            }
            for x in random_inside(&spec, 40, 5) {
                let a = mode.value(x);
                let b = mode.value([x[0], -x[1]]);
                assert!((a + b).abs() < 1e-12);
            }
        }
        let c = WaveMode::new(&spec, ModeKind::SwfComplex, 3, 1, ModeOptions::default()).unwrap();
        let b1 = WaveMode::new(&spec, ModeKind::SwfBranch1, 3, 1, ModeOptions::default()).unwrap();
        let p = [0.2, 0.3];
        assert_eq!(eval_complex(&c, p).unwrap().1, b1.value(p));
    }

    #[test]
    fn parallelogram_identities() {
        let spec = BilliardSpec::parallelogram(Ratio::new(7, 2)).unwrap();
        let pts = random_inside(&spec, 60, 6);
        for (m, n) in [(2, 1), (4, 2), (5, -2)] {
            for r in verify_decomposition_at(&spec, DecompositionCase::Parallelogram { m, n }, &pts).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
        let err = verify_decomposition_at(&spec, DecompositionCase::Parallelogram { m: 2, n: 2 }, &pts).unwrap_err();
        assert!(matches!(err, PolyscarError::Remap(_)));
    }

    #[test]
    fn triangle_substitution_identities() {
        let spec = BilliardSpec::bs_triangle();
        let pts = random_inside(&spec, 60, 7);
        for (u, q, m, n) in [(3, 2, 2, 1), (7, 5, 3, 2), (3363, 2378, 121, 1)] {
            for r in verify_decomposition_at(&spec, DecompositionCase::Triangle { u, q, m, n }, &pts).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn rectangle_identity_and_bouncing_ball() {
        let spec = BilliardSpec::rectangle(Surd::int(1), Surd::int(1)).unwrap();
        let r = verify_decomposition(&spec, DecompositionCase::Rectangle { q: 1, r: 1, c: 1, n: 1 }, 200).unwrap();
        assert!(r[0].pass, "{r:?}");
        let opts = ModeOptions { skeleton: Some(SkeletonDirection::Rectangle { q: 0, r: 1 }), ..Default::default() };
        let ss = WaveMode::new(&spec, ModeKind::Superscar { poc: 0, bc: Boundary::Dirichlet }, 3, 2, opts.clone()).unwrap();
        let ex = WaveMode::new(&spec, ModeKind::Exact, 2, 3, ModeOptions::default()).unwrap();
        for x in random_inside(&spec, 20, 8) {
            assert!((ss.value(x) - 2.0 * ex.value(x)).abs() < 1e-12);
        }
        let flat = WaveMode::new(&spec, ModeKind::Superscar { poc: 0, bc: Boundary::Dirichlet }, 3, 0, opts).unwrap();
        assert!(random_inside(&spec, 20, 9).iter().all(|&x| flat.value(x) == 0.0));
    }

    #[test]
    fn lshape_identity() {
        let spec = BilliardSpec::l_shape(Surd::int(2), Surd::int(3), Surd::int(2), Surd::int(1)).unwrap();
        for (gamma, n2) in [(1, 1), (2, -1), (1, 3)] {
            let r = verify_decomposition(&spec, DecompositionCase::LShape { gamma, n2 }, 60).unwrap();
            assert!(r[0].pass, "{r:?}");
        }
    }

    #[test]
    fn folded_state_is_continuous_with_a_kink() {
        let spec = BilliardSpec::bs_triangle();
        let mode = WaveMode::new(&spec, ModeKind::BsFolded { poc: 0 }, 3, 2, ModeOptions::default()).unwrap();
        let lim = one_sided_limits(&mode, [1.0, 0.2], [1.0, 0.0]).unwrap();
        assert!(lim.value_jump < 1e-10, "{lim:?}");
        assert!(lim.derivative_jump > 1.0, "{lim:?}");
        let swf = triangle(ModeKind::SwfU, 3, 2);
        let s = one_sided_limits(&swf, [1.0, 0.2], [1.0, 0.0]).unwrap();
        assert_eq!(s.value_jump, 0.0);
    }

    #[test]
    fn folded_strips_reproduce_closed_forms_where_covered() {
        let spec = BilliardSpec::bs_triangle();
        let info = strips(&spec).unwrap();
        assert_eq!(info.len(), 6);
        for (poc, d9, min_hits) in [(0usize, true, 60), (4, false, 90)] {
            assert_eq!(info[poc].width < 0.9, d9);
            let mode = WaveMode::new(&spec, ModeKind::BsFolded { poc }, 3, 2, ModeOptions::default()).unwrap();
            let pts = random_inside(&spec, 300, 11);
            let hit = pts
                .iter()
                .filter(|&&p| (mode.value(p).abs() - 2.0 * triangle_bs_exact(d9, 3, 2, p).abs()).abs() < 1e-9)
                .count();
            // The closed forms hold on the part of the triangle where exactly
            // the images they are written for lie in the strip.
            assert!(hit > min_hits, "{poc}: {hit}");
        }
    }

    #[test]
    fn nodal_set_of_rectangle_mode() {
        let spec = BilliardSpec::rectangle(Surd::int(1), Surd::int(1)).unwrap();
        let mode = WaveMode::new(&spec, ModeKind::Exact, 2, 1, ModeOptions::default()).unwrap();
        let field = sample_field(&mode, 101).unwrap();
        let pts = nodal_lines(&field, default_nodal_threshold(&field)).unwrap();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| (p[0] - 0.5).abs() < 0.02), "{:?}", &pts[..3.min(pts.len())]);
        let zero = WaveField { values: vec![0.0; field.values.len()], ..field };
        assert!(nodal_lines(&zero, 1e-3).unwrap().is_empty());
    }

    #[test]
    fn invalid_kinds_rejected() {
        let spec = BilliardSpec::rectangle(Surd::int(1), Surd::int(2)).unwrap();
        assert!(matches!(WaveMode::new(&spec, ModeKind::SwfU, 1, 1, ModeOptions::default()), Err(PolyscarError::Kind(_))));
        let tri = BilliardSpec::bs_triangle();
        assert!(matches!(
            WaveMode::new(&tri, ModeKind::SwfU, 1, 1, ModeOptions::default()),
            Err(PolyscarError::NeedsApproximation(_))
        ));
        let neu = WaveMode::new(&spec, ModeKind::Superscar { poc: 0, bc: Boundary::Neumann }, 3, 1, ModeOptions {
            skeleton: Some(SkeletonDirection::Rectangle { q: 0, r: 1 }),
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(boundary_residual(&neu, "bottom", 10), Err(PolyscarError::UnsupportedBoundary(_))));
    }
}
