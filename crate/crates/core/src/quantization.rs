//! Semiclassical spectra on aperiodic and periodic skeletons.
//!
//! Units: ħ = mass = 1, so E = p²/2 + E0.

use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{PolyscarError, Result};
use crate::exact::{Ratio, Surd};
use crate::geometry::{BilliardSpec, Family, LShapeSizes, PeriodLattice, Sizes, Variant, Vec2};

/// Default cut on √(2E0)/|p| above which a periodic level is flagged.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

/// The periodic directions for which the families have a worked quantization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SkeletonDirection {
    /// Along D6/D9 (the y axis of the octagon).
    TriangleVertical,
    /// Along d8 = (0, √3).
    ParallelogramVertical,
    /// Along D_qr = (2qa, 2rb); (1,0) and (0,1) are the bouncing balls.
    Rectangle { q: u32, r: u32 },
    /// Along (2a, 2d).
    LShapeDiagonal,
}

impl SkeletonDirection {
    pub fn family(self) -> Family {
        match self {
            SkeletonDirection::TriangleVertical => Family::BsTriangle,
            SkeletonDirection::ParallelogramVertical => Family::Parallelogram,
            SkeletonDirection::Rectangle { .. } => Family::Rectangle,
            SkeletonDirection::LShapeDiagonal => Family::LShape,
        }
    }

    /// The family's standard periodic direction.
    pub fn default_for(family: Family) -> SkeletonDirection {
        match family {
            Family::BsTriangle => SkeletonDirection::TriangleVertical,
            Family::Parallelogram => SkeletonDirection::ParallelogramVertical,
            Family::Rectangle => SkeletonDirection::Rectangle { q: 1, r: 1 },
            Family::LShape => SkeletonDirection::LShapeDiagonal,
        }
    }

    /// Parse "q,r" for the rectangle, anything else picks the family default.
    pub fn parse(family: Family, text: &str) -> Result<SkeletonDirection> {
        let text = text.trim();
        if family != Family::Rectangle || text.is_empty() || text == "default" {
            return Ok(SkeletonDirection::default_for(family));
        }
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let bad = || PolyscarError::Config(format!("skeleton direction '{text}' is not of the form q,r"));
        if parts.len() != 2 {
            return Err(bad());
        }
        let q: u32 = parts[0].parse().map_err(|_| bad())?;
        let r: u32 = parts[1].parse().map_err(|_| bad())?;
        if q == 0 && r == 0 || q.gcd(&r) != 1 {
            return Err(PolyscarError::Config(format!("(q,r) = ({q},{r}) must be coprime and not both zero")));
        }
        Ok(SkeletonDirection::Rectangle { q, r })
    }

    /// Direction vector on the unfolded surface.
    pub fn vector(self, spec: &BilliardSpec) -> Result<Vec2> {
        self.check_family(spec)?;
        Ok(match (self, &spec.sizes) {
            (SkeletonDirection::Rectangle { q, r }, Sizes::Rectangle { a, b }) => {
                Vec2::new(a.scale(&Ratio::integer(q as i64)), b.scale(&Ratio::integer(r as i64)))
            }
            (SkeletonDirection::LShapeDiagonal, Sizes::LShape(s)) => Vec2::new(s.a.clone(), s.d.clone()),
            _ => Vec2::ints(0, 1),
        })
    }

    fn check_family(self, spec: &BilliardSpec) -> Result<()> {
        if self.family() != spec.family {
            return Err(PolyscarError::Kind(format!("{self} is not a skeleton of the {}", spec.family)));
        }
        Ok(())
    }
}

impl fmt::Display for SkeletonDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkeletonDirection::TriangleVertical => f.write_str("periodic(vertical)"),
            SkeletonDirection::ParallelogramVertical => f.write_str("periodic(d8)"),
            SkeletonDirection::Rectangle { q, r } => write!(f, "periodic({q};{r})"),
            SkeletonDirection::LShapeDiagonal => f.write_str("periodic(diagonal)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkeletonKind {
    Aperiodic,
    Periodic(SkeletonDirection),
}

impl fmt::Display for SkeletonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkeletonKind::Aperiodic => f.write_str("aperiodic"),
            SkeletonKind::Periodic(d) => d.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub family: Family,
    pub skeleton: SkeletonKind,
    pub variant: Option<Variant>,
    pub m: i64,
    pub n: i64,
    /// Family-specific auxiliary numbers (c, k, l, m″, n″, γ ...).
    pub aux: Vec<(&'static str, i64)>,
    /// Momentum; for periodic skeletons only the component along the period.
    pub momentum: [f64; 2],
    pub e0: f64,
    pub energy: f64,
    /// √(2E0)/|p|; small means the transverse excitation is a perturbation.
    pub validity_ratio: f64,
}

impl SpectrumEntry {
    fn new(family: Family, skeleton: SkeletonKind, variant: Option<Variant>, m: i64, n: i64, momentum: [f64; 2], e0: f64) -> Self {
        let p2 = momentum[0] * momentum[0] + momentum[1] * momentum[1];
        let validity_ratio = if e0 == 0.0 { 0.0 } else { (2.0 * e0).sqrt() / p2.sqrt() };
        SpectrumEntry { family, skeleton, variant, m, n, aux: Vec::new(), momentum, e0, energy: 0.5 * p2 + e0, validity_ratio }
    }

    pub fn aux(&self, key: &str) -> Option<i64> {
        self.aux.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    pub fn is_valid(&self, threshold: f64) -> bool {
        self.validity_ratio <= threshold
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityReport {
    pub satisfied: bool,
    /// The coprime pair (k, l) solving the size condition.
    pub coprime: Option<(i64, i64)>,
    pub constraint: String,
}

fn variant_of(lattice: &PeriodLattice) -> Option<Variant> {
    lattice.approximation.as_ref().map(|a| a.variant)
}

fn triangle_scale(lattice: &PeriodLattice) -> Result<f64> {
    lattice
        .approximation
        .as_ref()
        .map(|a| a.scale() as f64)
        .ok_or_else(|| PolyscarError::NeedsApproximation("the triangle spectrum needs u/q".into()))
}

/// Aperiodic-skeleton level: momentum from the dual of the period lattice.
pub fn spectrum_aperiodic(spec: &BilliardSpec, lattice: &PeriodLattice, m: i64, n: i64) -> Result<SpectrumEntry> {
    if m == 0 && n == 0 {
        return Err(PolyscarError::Domain("quantum numbers (0,0) give no state".into()));
    }
    if spec.family == Family::BsTriangle {
        triangle_scale(lattice)?;
        if m == 0 || n == 0 {
            return Err(PolyscarError::PeriodicSkeletonRequired(format!(
                "(m,n) = ({m},{n}): a vanishing quantum number belongs to a periodic skeleton"
            )));
        }
    }
    let p = lattice.momentum(m, n);
    Ok(SpectrumEntry::new(spec.family, SkeletonKind::Aperiodic, variant_of(lattice), m, n, p, 0.0))
}

fn rational_square(x: &Surd, name: &str) -> Result<Ratio> {
    (x * x)
        .as_rational()
        .cloned()
        .ok_or_else(|| PolyscarError::Compatibility(format!("{name}² = {} is irrational", x * x)))
}

fn lowest(r: &Ratio) -> Option<(i64, i64)> {
    Some((r.denom_i64()?, r.numer_i64()?))
}

pub fn check_compatibility(spec: &BilliardSpec, dir: SkeletonDirection) -> Result<CompatibilityReport> {
    dir.check_family(spec)?;
    Ok(match (dir, &spec.sizes) {
        (SkeletonDirection::Rectangle { q, r }, Sizes::Rectangle { a, b }) => {
            let constraint = format!("l/k = (b²/a²)·(r/q) with (q,r) = ({q},{r})");
            if q == 0 || r == 0 {
                let kl = if r == 0 { (1, 0) } else { (0, 1) };
                return Ok(CompatibilityReport { satisfied: true, coprime: Some(kl), constraint: "bouncing ball: no condition".into() });
            }
            let ratio = match (rational_square(a, "a"), rational_square(b, "b")) {
                (Ok(a2), Ok(b2)) => Some(b2 / a2 * Ratio::new(r as i64, q as i64)),
                _ => match (b * b / (a * a)).as_rational() {
                    Some(x) => Some(x * &Ratio::new(r as i64, q as i64)),
                    None => None,
                },
            };
            match ratio.as_ref().and_then(lowest) {
                Some(kl) => CompatibilityReport { satisfied: true, coprime: Some(kl), constraint },
                None => CompatibilityReport { satisfied: false, coprime: None, constraint },
            }
        }
        (SkeletonDirection::LShapeDiagonal, Sizes::LShape(s)) => {
            let constraint = format!("l/k = (c²/a²)·αδ/ζ² with α = {}, δ = {}, ζ = {}", s.alpha, s.delta, s.zeta);
            let ratio = (&s.c * &s.c / (&s.a * &s.a))
                .as_rational()
                .map(|x| x * &Ratio::new(s.alpha * s.delta, s.zeta * s.zeta));
            match ratio.as_ref().and_then(lowest) {
                Some(kl) => CompatibilityReport { satisfied: true, coprime: Some(kl), constraint },
                None => CompatibilityReport { satisfied: false, coprime: None, constraint },
            }
        }
        _ => CompatibilityReport { satisfied: true, coprime: None, constraint: format!("no size condition for the {}", spec.family) },
    })
}

/// Rectangle remapping: (m″, n″, m) = (ck + nr, cl − nq, c(kq + lr)).
pub fn remap_rectangle(c: i64, k: i64, l: i64, q: i64, r: i64, n: i64) -> (i64, i64, i64) {
    (c * k + n * r, c * l - n * q, c * (k * q + l * r))
}

/// L-shape remapping: (m, n, m″) = (γk + n″δ, γl − n″α, γ(kα + lδ)).
pub fn remap_lshape(gamma: i64, k: i64, l: i64, alpha: i64, delta: i64, n2: i64) -> (i64, i64, i64) {
    (gamma * k + n2 * delta, gamma * l - n2 * alpha, gamma * (k * alpha + l * delta))
}

/// Family-dispatching form of the remapping. For the rectangle the inputs are
/// (c, k, l, q, r, n) and the output (m″, n″, m); for the L-shape they are
/// (γ, k, l, α, δ, n″) and the output (m, n, m″).
pub fn remap_quantum_numbers(family: Family, c: i64, k: i64, l: i64, q: i64, r: i64, n: i64) -> Result<(i64, i64, i64)> {
    match family {
        Family::Rectangle => Ok(remap_rectangle(c, k, l, q, r, n)),
        Family::LShape => Ok(remap_lshape(c, k, l, q, r, n)),
        other => Err(PolyscarError::Kind(format!("the {other} needs no quantum-number remapping"))),
    }
}

fn kl_of(report: &CompatibilityReport) -> Result<(i64, i64)> {
    if !report.satisfied {
        return Err(PolyscarError::Compatibility(format!("sizes violate {}", report.constraint)));
    }
    report.coprime.ok_or_else(|| PolyscarError::Consistency("compatible report without (k,l)".into()))
}

fn lshape(spec: &BilliardSpec) -> &LShapeSizes {
    match &spec.sizes {
        Sizes::LShape(s) => s,
        _ => unreachable!("family checked by caller"),
    }
}

/// Periodic-skeleton level. `m` is the quantum number along the period, `n`
/// the transverse one (for the L-shape these are m″ and n″).
pub fn spectrum_periodic(spec: &BilliardSpec, lattice: &PeriodLattice, dir: SkeletonDirection, m: i64, n: i64) -> Result<SpectrumEntry> {
    dir.check_family(spec)?;
    if m < 1 {
        return Err(PolyscarError::Domain(format!("periodic quantum number m = {m} must be positive")));
    }
    let kind = SkeletonKind::Periodic(dir);
    match dir {
        SkeletonDirection::TriangleVertical => {
            let s = triangle_scale(lattice)?;
            if n == 0 {
                return Err(PolyscarError::Domain("n = 0 gives a vanishing triangle state".into()));
            }
            let e0 = 0.5 * (PI * s * n as f64).powi(2);
            Ok(SpectrumEntry::new(spec.family, kind, variant_of(lattice), m, n, [0.0, PI * s * m as f64], e0))
        }
        SkeletonDirection::ParallelogramVertical => {
            if m == n || m == -n {
                return Err(PolyscarError::Domain(format!("(m,n) = ({m},{n}) gives a vanishing parallelogram state")));
            }
            let q = lattice.scale_divisors.0 as f64;
            let py = 2.0 * PI * q * (m - n) as f64 / 3f64.sqrt();
            let e0 = 2.0 / 9.0 * (PI * q * (m + n) as f64).powi(2);
            Ok(SpectrumEntry::new(spec.family, kind, None, m, n, [0.0, py], e0))
        }
        SkeletonDirection::Rectangle { q, r } => {
            let (k, l) = kl_of(&check_compatibility(spec, dir)?)?;
            let (q, r) = (q as i64, r as i64);
            let step = k * q + l * r;
            if m % step != 0 {
                return Err(PolyscarError::Remap(format!("m = {m} is not a multiple of kq + lr = {step}")));
            }
            let c = m / step;
            let Sizes::Rectangle { a, b } = &spec.sizes else { unreachable!() };
            let (a, b) = (a.to_f64(), b.to_f64());
            let big_n = ((q * q) as f64 * a * a + (r * r) as f64 * b * b).sqrt();
            let p = PI * m as f64 / big_n;
            let dir = [q as f64 * a / big_n, r as f64 * b / big_n];
            let e0 = 0.5 * (PI * n as f64 * big_n / (a * b)).powi(2);
            let (m2, n2, _) = remap_rectangle(c, k, l, q, r, n);
            let mut e = SpectrumEntry::new(spec.family, kind, None, m, n, [p * dir[0], p * dir[1]], e0);
            e.aux = vec![("c", c), ("k", k), ("l", l), ("m2", m2), ("n2", n2)];
            Ok(e)
        }
        SkeletonDirection::LShapeDiagonal => {
            let (k, l) = kl_of(&check_compatibility(spec, dir)?)?;
            let s = lshape(spec);
            let step = k * s.alpha + l * s.delta;
            if m % step != 0 {
                return Err(PolyscarError::Remap(format!("m″ = {m} is not a multiple of kα + lδ = {step}")));
            }
            let gamma = m / step;
            let (a, d) = (s.a.to_f64(), s.d.to_f64());
            let big_l = a.hypot(d);
            let p = PI * m as f64 / big_l;
            let q = PI * n as f64 * big_l / (s.unit_x().to_f64() * s.unit_y().to_f64());
            let (m1, n1, _) = remap_lshape(gamma, k, l, s.alpha, s.delta, n);
            let mut e = SpectrumEntry::new(spec.family, kind, None, m, n, [p * a / big_l, p * d / big_l], 0.5 * q * q);
            e.aux = vec![("gamma", gamma), ("k", k), ("l", l), ("m1", m1), ("n1", n1)];
            Ok(e)
        }
    }
}

/// Aperiodic quantum numbers that reproduce a periodic level.
pub fn aperiodic_counterpart(entry: &SpectrumEntry) -> Result<(i64, i64)> {
    match entry.skeleton {
        SkeletonKind::Aperiodic => Ok((entry.m, entry.n)),
        SkeletonKind::Periodic(SkeletonDirection::Rectangle { .. }) => Ok((
            entry.aux("m2").ok_or_else(|| PolyscarError::Remap("missing m″".into()))?,
            entry.aux("n2").ok_or_else(|| PolyscarError::Remap("missing n″".into()))?,
        )),
        SkeletonKind::Periodic(SkeletonDirection::LShapeDiagonal) => Ok((
            entry.aux("m1").ok_or_else(|| PolyscarError::Remap("missing m".into()))?,
            entry.aux("n1").ok_or_else(|| PolyscarError::Remap("missing n".into()))?,
        )),
        SkeletonKind::Periodic(_) => Ok((entry.m, entry.n)),
    }
}

/// Canonical quantum numbers of a batch listing up to `max` (inclusive).
pub fn canonical_numbers(spec: &BilliardSpec, kind: SkeletonKind, max: i64) -> Result<Vec<(i64, i64)>> {
    if max < 1 {
        return Err(PolyscarError::Usage(format!("empty quantum-number range (max = {max})")));
    }
    let mut out = Vec::new();
    match (spec.family, kind) {
        (Family::BsTriangle, _) => {
            // Ψ vanishes identically for m = n, so only n < m is listed.
            for m in 2..=max {
                for n in 1..m {
                    out.push((m, n));
                }
            }
        }
        (Family::Parallelogram, _) => {
            for m in 1..=max {
                for n in (1 - m)..m {
                    out.push((m, n));
                }
            }
        }
        (_, SkeletonKind::Aperiodic) => {
            for m in 1..=max {
                for n in 1..=max {
                    out.push((m, n));
                }
            }
        }
        (_, SkeletonKind::Periodic(dir)) => {
            let (k, l) = kl_of(&check_compatibility(spec, dir)?)?;
            let step = match dir {
                SkeletonDirection::Rectangle { q, r } => k * q as i64 + l * r as i64,
                _ => {
                    let s = lshape(spec);
                    k * s.alpha + l * s.delta
                }
            };
            for c in 1..=max {
                for n in 0..=max {
                    out.push((c * step, n));
                }
            }
        }
    }
    Ok(out)
}

/// Whole listing, sorted by energy then quantum numbers. Parallel over entries.
pub fn spectrum_listing(spec: &BilliardSpec, lattice: &PeriodLattice, kind: SkeletonKind, max: i64) -> Result<Vec<SpectrumEntry>> {
    let numbers = canonical_numbers(spec, kind, max)?;
    let mut entries = numbers
        .par_iter()
        .map(|&(m, n)| match kind {
            SkeletonKind::Aperiodic => spectrum_aperiodic(spec, lattice, m, n),
            SkeletonKind::Periodic(dir) => spectrum_periodic(spec, lattice, dir, m, n),
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.energy.total_cmp(&b.energy).then((a.m, a.n).cmp(&(b.m, b.n))));
    Ok(entries)
}

/// Closed-form triangle level ½π²s²(m² + n²).
pub fn triangle_energy(scale: i64, m: i64, n: i64) -> f64 {
    0.5 * (PI * scale as f64).powi(2) * (m * m + n * n) as f64
}

/// Closed-form parallelogram level (8π²q²/9)(m² − mn + n²).
pub fn parallelogram_energy(q: i64, m: i64, n: i64) -> f64 {
    8.0 * (PI * q as f64).powi(2) / 9.0 * (m * m - m * n + n * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{period_lattice, Approximation};

    fn triangle(variant: Variant) -> (BilliardSpec, PeriodLattice) {
        let spec = BilliardSpec::bs_triangle();
        let approx = Approximation::new(&Ratio::new(3363, 2378), variant).unwrap();
        let lat = period_lattice(&spec, Some(&approx)).unwrap();
        (spec, lat)
    }

    #[test]
    fn level_ratios() {
        let (spec, lat) = triangle(Variant::U);
        let e = |m| spectrum_aperiodic(&spec, &lat, m, 1).unwrap().energy;
        // [DERIVED] (191²+1)/(121²+1) and (266²+1)/(191²+1).
        assert!((e(191) / e(121) - 36482.0 / 14642.0).abs() < 1e-12);
        assert!((e(266) / e(191) - 70757.0 / 36482.0).abs() < 1e-12);
        assert!((e(121) - triangle_energy(3363, 121, 1)).abs() / e(121) < 1e-14);
    }

    #[test]
    fn triangle_rejects_zero_numbers() {
        let (spec, lat) = triangle(Variant::Q);
        assert!(matches!(spectrum_aperiodic(&spec, &lat, 3, 0), Err(PolyscarError::PeriodicSkeletonRequired(_))));
        let p = spectrum_periodic(&spec, &lat, SkeletonDirection::TriangleVertical, 3, 2).unwrap();
        let a = spectrum_aperiodic(&spec, &lat, 3, 2).unwrap();
        assert!((p.energy - a.energy).abs() / a.energy < 1e-14);
    }

    #[test]
    fn unit_square_levels() {
        let spec = BilliardSpec::rectangle(Surd::int(1), Surd::int(1)).unwrap();
        let lat = period_lattice(&spec, None).unwrap();
        let e = spectrum_aperiodic(&spec, &lat, 1, 1).unwrap();
        assert!((e.energy - PI * PI).abs() < 1e-12);
        let dir = SkeletonDirection::Rectangle { q: 1, r: 1 };
        let rep = check_compatibility(&spec, dir).unwrap();
        assert_eq!(rep.coprime, Some((1, 1)));
        let p = spectrum_periodic(&spec, &lat, dir, 2, 1).unwrap();
        assert!((p.energy - 2.0 * PI * PI).abs() < 1e-12);
        assert_eq!(aperiodic_counterpart(&p).unwrap(), (2, 0));
        assert_eq!(remap_rectangle(1, 1, 1, 1, 1, 1), (2, 0, 2));
        assert_eq!(remap_rectangle(3, 2, 5, 1, 1, 0), (6, 15, 21));
    }

    #[test]
    fn parallelogram_unit_level() {
        let spec = BilliardSpec::parallelogram(Ratio::integer(4)).unwrap();
        let lat = period_lattice(&spec, None).unwrap();
        let e = spectrum_aperiodic(&spec, &lat, 1, 1).unwrap();
        assert!((e.energy - 8.0 * PI * PI / 9.0).abs() < 1e-12);
        let p = spectrum_periodic(&spec, &lat, SkeletonDirection::ParallelogramVertical, 2, -1).unwrap();
        assert!((p.energy - parallelogram_energy(1, 2, -1)).abs() < 1e-10);
    }

    #[test]
    fn incompatible_rectangle() {
        let spec = BilliardSpec::rectangle(Surd::int(1), &Surd::int(1) + &Surd::sqrt(2)).unwrap();
        let dir = SkeletonDirection::Rectangle { q: 1, r: 1 };
        assert!(!check_compatibility(&spec, dir).unwrap().satisfied);
        let lat = period_lattice(&spec, None);
        if let Ok(lat) = lat {
            assert!(matches!(spectrum_periodic(&spec, &lat, dir, 2, 0), Err(PolyscarError::Compatibility(_))));
        }
        let bb = check_compatibility(&spec, SkeletonDirection::Rectangle { q: 0, r: 1 }).unwrap();
        assert!(bb.satisfied);
    }

    #[test]
    fn lshape_periodic_matches_aperiodic() {
        let spec = BilliardSpec::l_shape(Surd::int(2), Surd::int(3), Surd::int(2), Surd::int(1)).unwrap();
        let lat = period_lattice(&spec, None).unwrap();
        let dir = SkeletonDirection::LShapeDiagonal;
        assert_eq!(check_compatibility(&spec, dir).unwrap().coprime, Some((2, 1)));
        for (m2, n2) in [(5, 0), (5, 1), (10, 3)] {
            let p = spectrum_periodic(&spec, &lat, dir, m2, n2).unwrap();
            let (m, n) = aperiodic_counterpart(&p).unwrap();
            let a = spectrum_aperiodic(&spec, &lat, m, n).unwrap();
            assert!((p.energy - a.energy).abs() < 1e-9 * a.energy, "({m2},{n2})");
        }
    }

    #[test]
    fn listing_is_sorted_and_rejects_empty() {
        let (spec, lat) = triangle(Variant::U);
        let l = spectrum_listing(&spec, &lat, SkeletonKind::Aperiodic, 20).unwrap();
        assert!(l.windows(2).all(|w| w[0].energy <= w[1].energy));
        assert!(l.iter().all(|e| e.n < e.m));
        assert!(matches!(spectrum_listing(&spec, &lat, SkeletonKind::Aperiodic, 0), Err(PolyscarError::Usage(_))));
    }
}
