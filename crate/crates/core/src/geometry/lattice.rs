use std::fmt;

use num_traits::ToPrimitive;

use super::epp::Epp;
use super::linalg::Vec2;
use super::spec::{BilliardSpec, Family, Sizes};
use crate::exact::{lcm_list, reduce_period, PeriodCertificate, Ratio, Surd};
use crate::error::{PolyscarError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeClass {
    IntegerCase,
    DrpbCase,
    IrrationalCase,
}

/// Which side of the √2 ≈ u/q substitution sets the momentum scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// √2 → 2q/u; generators divide by u.
    U,
    /// √2 → u/q; generators divide by q.
    Q,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Variant> {
        match s.trim().to_ascii_lowercase().as_str() {
            "u" => Ok(Variant::U),
            "q" => Ok(Variant::Q),
            other => Err(PolyscarError::Usage(format!("variant must be u or q, got '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::U => "u",
            Variant::Q => "q",
        }
    }
}

/// A rational stand-in u/q for √2 together with the chosen variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    pub u: i64,
    pub q: i64,
    pub variant: Variant,
}

impl Approximation {
    pub fn new(uq: &Ratio, variant: Variant) -> Result<Approximation> {
        match (uq.numer_i64(), uq.denom_i64()) {
            (Some(u), Some(q)) if u > 0 => Ok(Approximation { u, q, variant }),
            _ => Err(PolyscarError::Config(format!("approximation {uq} must be a positive fraction of 64-bit integers"))),
        }
    }

    /// The momentum scale: u for the u-variant, q for the q-variant.
    pub fn scale(&self) -> i64 {
        match self.variant {
            Variant::U => self.u,
            Variant::Q => self.q,
        }
    }

    /// Rational replacement for √2 under this variant.
    pub fn sqrt2(&self) -> Ratio {
        match self.variant {
            Variant::U => Ratio::new(2 * self.q, self.u),
            Variant::Q => Ratio::new(self.u, self.q),
        }
    }

    /// |√2 − u/q|.
    pub fn epsilon(&self) -> f64 {
        let d = &Surd::sqrt(2) - &Surd::frac(self.u, self.q);
        d.abs().to_f64()
    }

    pub fn with_variant(&self, variant: Variant) -> Approximation {
        Approximation { variant, ..self.clone() }
    }
}

/// One period vector expanded over the generators: v = c1·D1 + c2·D2.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub label: String,
    pub vector: Vec2,
    pub coefficients: (Surd, Surd),
    /// Coefficients after the √2 substitution (equal to `coefficients` when already rational).
    pub rational: Option<(Ratio, Ratio)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodLattice {
    pub generators: [Vec2; 2],
    pub extra_relations: Vec<Relation>,
    pub scale_divisors: (u64, u64),
    pub classification: LatticeClass,
    pub approximation: Option<Approximation>,
    /// True when the relation set is reconstructed from the EPP figure rather than computed.
    pub figure_derived: bool,
}

impl PeriodLattice {
    /// Dual momentum of Eq. (9): p·D1 = 2π·C1·m, p·D2 = 2π·C2·n.
    pub fn momentum(&self, m: i64, n: i64) -> [f64; 2] {
        let d1 = self.generators[0].to_f64();
        let d2 = self.generators[1].to_f64();
        let (c1, c2) = (self.scale_divisors.0 as f64, self.scale_divisors.1 as f64);
        let k = d1[0] * d2[1] - d1[1] * d2[0];
        let v = [m as f64 * c1 * d2[0] - n as f64 * c2 * d1[0], m as f64 * c1 * d2[1] - n as f64 * c2 * d1[1]];
        let tau = 2.0 * std::f64::consts::PI;
        [tau * v[1] / k, -tau * v[0] / k]
    }

    /// Euclid certificates that D_i/C_i are periods, one per relation coefficient.
    pub fn certificates(&self) -> Result<Vec<(String, usize, PeriodCertificate)>> {
        let mut out = Vec::new();
        for r in &self.extra_relations {
            let Some((c1, c2)) = &r.rational else { continue };
            for (i, c) in [c1, c2].into_iter().enumerate() {
                let den = c.denom().to_u64().ok_or_else(|| PolyscarError::Domain("denominator too large".into()))?;
                if den > 1 {
                    out.push((r.label.clone(), i, reduce_period(c, den)?));
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PeriodLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "D1 = {}, D2 = {}", self.generators[0], self.generators[1])?;
        for r in &self.extra_relations {
            write!(f, "{} = {} = ({})·D1 + ({})·D2", r.label, r.vector, r.coefficients.0, r.coefficients.1)?;
            if let Some((a, b)) = &r.rational {
                write!(f, "  ~ ({a})·D1 + ({b})·D2")?;
            }
            writeln!(f)?;
        }
        write!(f, "C1 = {}, C2 = {}, {:?}", self.scale_divisors.0, self.scale_divisors.1, self.classification)
    }
}

fn solve(v: &Vec2, d1: &Vec2, d2: &Vec2) -> (Surd, Surd) {
    let det = d1.cross(d2);
    (&v.cross(d2) / &det, &d1.cross(v) / &det)
}

fn substitute(x: &Surd, approx: Option<&Approximation>) -> Option<Ratio> {
    if let Some(r) = x.as_rational() {
        return Some(r.clone());
    }
    let a = approx?;
    if x.radicand() != 2 {
        return None;
    }
    Some(x.rational_part() + &(x.radical_part() * &a.sqrt2()))
}

fn generators(spec: &BilliardSpec) -> [Vec2; 2] {
    match &spec.sizes {
        Sizes::Triangle => [Vec2::ints(2, 0), Vec2::ints(0, 2)],
        Sizes::Parallelogram { .. } => {
            let h = Surd::sqrt(3).scale(&Ratio::new(1, 2));
            [Vec2::new(Surd::frac(3, 2), h.clone()), Vec2::new(Surd::frac(3, 2), -&h)]
        }
        Sizes::Rectangle { a, b } => [
            Vec2::new(a.scale(&Ratio::integer(2)), Surd::zero()),
            Vec2::new(Surd::zero(), b.scale(&Ratio::integer(2))),
        ],
        Sizes::LShape(s) => [
            Vec2::new(s.a.scale(&Ratio::integer(2)), Surd::zero()),
            Vec2::new(Surd::zero(), s.c.scale(&Ratio::integer(2))),
        ],
    }
}

/// The triangle's POC periods along the generator axes (figure-derived).
fn triangle_relations(g: &[Vec2; 2]) -> Vec<(String, Vec2)> {
    let one_r2 = &Surd::int(1) + &Surd::sqrt(2);
    let two_r2 = &Surd::int(2) + &Surd::sqrt(2);
    vec![
        ("D6".into(), g[1].scale(&one_r2)),
        ("D9".into(), g[1].scale(&two_r2)),
        ("D6'".into(), g[0].scale(&one_r2)),
        ("D9'".into(), g[0].scale(&two_r2)),
    ]
}

/// Period generators and relations; irrational relations need `approx`.
pub fn period_lattice(spec: &BilliardSpec, approx: Option<&Approximation>) -> Result<PeriodLattice> {
    let gens = generators(spec);
    let figure_derived = spec.family == Family::BsTriangle;
    let raw: Vec<(String, Vec2)> = if figure_derived {
        triangle_relations(&gens)
    } else {
        let epp = Epp::new(spec)?;
        epp.translations().into_iter().enumerate().map(|(i, v)| (format!("T{}", i + 1), v)).collect()
    };
    let mut relations = Vec::new();
    let mut irrational = false;
    let mut all_integer = true;
    for (label, v) in raw {
        let coefficients = solve(&v, &gens[0], &gens[1]);
        if !coefficients.0.is_rational() || !coefficients.1.is_rational() {
            irrational = true;
        }
        let rational = match (substitute(&coefficients.0, approx), substitute(&coefficients.1, approx)) {
            (Some(a), Some(b)) => {
                all_integer &= a.is_integer() && b.is_integer();
                Some((a, b))
            }
            _ => None,
        };
        relations.push(Relation { label, vector: v, coefficients, rational });
    }
    if irrational && approx.is_none() {
        return Err(PolyscarError::NeedsApproximation(format!(
            "{} period relations have irrational coefficients; supply a u/q approximation",
            spec.family
        )));
    }
    if relations.iter().any(|r| r.rational.is_none()) {
        return Err(PolyscarError::NeedsApproximation("approximation does not cover the relation field".into()));
    }
    let dens = |i: usize| -> Result<u64> {
        let mut d = vec![1u64];
        for r in &relations {
            let (a, b) = r.rational.as_ref().unwrap();
            let c = if i == 0 { a } else { b };
            d.push(c.denom().to_u64().ok_or_else(|| PolyscarError::Domain("relation denominator too large".into()))?);
        }
        lcm_list(&d)
    };
    let mut scale_divisors = (dens(0)?, dens(1)?);
    if figure_derived {
        // The substitution sets the momentum scale directly (u or q), as in the
        // triangle's quantization; the computed divisors must agree with it.
        let a = approx.expect("checked above");
        let s = a.scale() as u64;
        if scale_divisors.0 > s || s % scale_divisors.0 != 0 || s % scale_divisors.1 != 0 {
            return Err(PolyscarError::Consistency(format!(
                "relation divisors {scale_divisors:?} do not divide the momentum scale {s}"
            )));
        }
        scale_divisors = (s, s);
    }
    let classification = if irrational {
        LatticeClass::IrrationalCase
    } else if all_integer {
        LatticeClass::IntegerCase
    } else {
        LatticeClass::DrpbCase
    };
    let classification = match (classification, approx) {
        (LatticeClass::IrrationalCase, Some(_)) => LatticeClass::DrpbCase,
        (c, _) => c,
    };
    Ok(PeriodLattice {
        generators: gens,
        extra_relations: relations,
        scale_divisors,
        classification,
        approximation: approx.cloned(),
        figure_derived,
    })
}

/// Exact classification of the unapproximated relations.
pub fn raw_classification(spec: &BilliardSpec) -> Result<LatticeClass> {
    match period_lattice(spec, None) {
        Ok(l) => Ok(l.classification),
        Err(PolyscarError::NeedsApproximation(_)) => Ok(LatticeClass::IrrationalCase),
        Err(e) => Err(e),
    }
}

/// Both triangle variants for one u/q, kept separate.
pub fn triangle_lattices(uq: &Ratio) -> Result<(PeriodLattice, PeriodLattice)> {
    let spec = BilliardSpec::bs_triangle();
    let u = Approximation::new(uq, Variant::U)?;
    let q = u.with_variant(Variant::Q);
    Ok((period_lattice(&spec, Some(&u))?, period_lattice(&spec, Some(&q))?))
}
