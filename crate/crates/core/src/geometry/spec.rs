use std::fmt;

use num_traits::ToPrimitive;

use super::linalg::Vec2;
use crate::exact::{lcm_list, Ratio, Surd};
use crate::error::{PolyscarError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    BsTriangle,
    Parallelogram,
    Rectangle,
    LShape,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::BsTriangle => "triangle",
            Family::Parallelogram => "parallelogram",
            Family::Rectangle => "rectangle",
            Family::LShape => "lshape",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s.trim().to_ascii_lowercase().as_str() {
            "triangle" | "bstriangle" | "bs-triangle" => Ok(Family::BsTriangle),
            "parallelogram" => Ok(Family::Parallelogram),
            "rectangle" => Ok(Family::Rectangle),
            "lshape" | "l-shape" => Ok(Family::LShape),
            other => Err(PolyscarError::Config(format!("unknown family '{other}'"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// L-shape sizes. Vertices (0,0), (a+b,0), (a+b,c), (a,c), (a,c+d), (0,c+d);
/// a/b = α/β and d/c = δ/ζ in lowest terms.
#[derive(Clone, Debug, PartialEq)]
pub struct LShapeSizes {
    pub a: Surd,
    pub b: Surd,
    pub c: Surd,
    pub d: Surd,
    pub alpha: i64,
    pub beta: i64,
    pub delta: i64,
    pub zeta: i64,
}

impl LShapeSizes {
    /// Horizontal unit a/α.
    pub fn unit_x(&self) -> Surd {
        self.a.scale(&Ratio::new(1, self.alpha))
    }

    /// Vertical unit c/ζ.
    pub fn unit_y(&self) -> Surd {
        self.c.scale(&Ratio::new(1, self.zeta))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sizes {
    /// The π/8, π/2, 3π/8 triangle with unit side FH.
    Triangle,
    /// Long side L (as u/q); the short side is 1.
    Parallelogram { l: Ratio },
    Rectangle { a: Surd, b: Surd },
    LShape(LShapeSizes),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Side {
    pub index: usize,
    pub label: &'static str,
    pub from: Vec2,
    pub to: Vec2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BilliardSpec {
    pub family: Family,
    /// Interior angles in units of π, one per vertex in counter-clockwise order.
    pub angles: Vec<Ratio>,
    pub sizes: Sizes,
}

fn ratio_of(x: &Surd, y: &Surd, what: &str) -> Result<(i64, i64)> {
    let q = x / y;
    let r = q
        .as_rational()
        .ok_or_else(|| PolyscarError::Config(format!("{what} must be a rational ratio, got {q}")))?;
    match (r.numer_i64(), r.denom_i64()) {
        (Some(p), Some(d)) => Ok((p, d)),
        _ => Err(PolyscarError::Config(format!("{what} = {r} is too large"))),
    }
}

fn positive(x: &Surd, name: &str) -> Result<()> {
    if x.signum() <= 0 {
        return Err(PolyscarError::Config(format!("size {name} must be positive, got {x}")));
    }
    Ok(())
}

impl BilliardSpec {
    pub fn bs_triangle() -> BilliardSpec {
        BilliardSpec {
            family: Family::BsTriangle,
            angles: vec![Ratio::new(1, 8), Ratio::new(1, 2), Ratio::new(3, 8)],
            sizes: Sizes::Triangle,
        }
    }

    pub fn parallelogram(l: Ratio) -> Result<BilliardSpec> {
        if !l.is_positive() {
            return Err(PolyscarError::Config(format!("parallelogram side L must be positive, got {l}")));
        }
        Ok(BilliardSpec {
            family: Family::Parallelogram,
            angles: vec![Ratio::new(2, 3), Ratio::new(1, 3), Ratio::new(2, 3), Ratio::new(1, 3)],
            sizes: Sizes::Parallelogram { l },
        })
    }

    pub fn rectangle(a: Surd, b: Surd) -> Result<BilliardSpec> {
        positive(&a, "a")?;
        positive(&b, "b")?;
        if !a.is_rational() && !b.is_rational() && a.radicand() != b.radicand() {
            return Err(PolyscarError::Config("rectangle sides must share one quadratic field".into()));
        }
        Ok(BilliardSpec { family: Family::Rectangle, angles: vec![Ratio::new(1, 2); 4], sizes: Sizes::Rectangle { a, b } })
    }

    pub fn l_shape(a: Surd, b: Surd, c: Surd, d: Surd) -> Result<BilliardSpec> {
        for (x, n) in [(&a, "a"), (&b, "b"), (&c, "c"), (&d, "d")] {
            positive(x, n)?;
        }
        let (alpha, beta) = ratio_of(&a, &b, "a/b")?;
        let (delta, zeta) = ratio_of(&d, &c, "d/c")?;
        let mut angles = vec![Ratio::new(1, 2); 6];
        angles[3] = Ratio::new(3, 2);
        Ok(BilliardSpec {
            family: Family::LShape,
            angles,
            sizes: Sizes::LShape(LShapeSizes { a, b, c, d, alpha, beta, delta, zeta }),
        })
    }

    /// Checks user-supplied angles against the family's geometry (order-insensitive).
    pub fn check_angles(&self, given: &[Ratio]) -> Result<()> {
        let mut a = given.to_vec();
        let mut b = self.angles.clone();
        a.sort();
        b.sort();
        if a != b {
            let show = |v: &[Ratio]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
            return Err(PolyscarError::Config(format!(
                "angles [{}] do not match the {} family [{}]",
                show(given),
                self.family,
                show(&self.angles)
            )));
        }
        Ok(())
    }

    /// Square-free radicand of the coordinate field.
    pub fn field(&self) -> u32 {
        match &self.sizes {
            Sizes::Triangle => 2,
            Sizes::Parallelogram { .. } => 3,
            Sizes::Rectangle { a, b } => a.radicand().max(b.radicand()),
            Sizes::LShape(s) => [&s.a, &s.b, &s.c, &s.d].iter().map(|x| x.radicand()).max().unwrap(),
        }
    }

    /// Vertices in counter-clockwise order, aligned with `angles`.
    pub fn vertices(&self) -> Vec<Vec2> {
        match &self.sizes {
            Sizes::Triangle => {
                let c = &Surd::int(1) + &Surd::sqrt(2);
                vec![Vec2::ints(0, 0), Vec2::new(c.clone(), Surd::zero()), Vec2::new(c, Surd::one())]
            }
            Sizes::Parallelogram { l } => {
                let h = Surd::sqrt(3).scale(&Ratio::new(1, 2));
                let l = Surd::rational(l.clone());
                vec![
                    Vec2::new(&Surd::one() - &l, Surd::zero()),
                    Vec2::ints(1, 0),
                    Vec2::new(Surd::frac(1, 2), h.clone()),
                    Vec2::new(&Surd::frac(1, 2) - &l, h),
                ]
            }
            Sizes::Rectangle { a, b } => vec![
                Vec2::ints(0, 0),
                Vec2::new(a.clone(), Surd::zero()),
                Vec2::new(a.clone(), b.clone()),
                Vec2::new(Surd::zero(), b.clone()),
            ],
            Sizes::LShape(s) => {
                let ab = &s.a + &s.b;
                let cd = &s.c + &s.d;
                vec![
                    Vec2::ints(0, 0),
                    Vec2::new(ab.clone(), Surd::zero()),
                    Vec2::new(ab, s.c.clone()),
                    Vec2::new(s.a.clone(), s.c.clone()),
                    Vec2::new(s.a.clone(), cd.clone()),
                    Vec2::new(Surd::zero(), cd),
                ]
            }
        }
    }

    pub fn vertices_f64(&self) -> Vec<[f64; 2]> {
        self.vertices().iter().map(|v| v.to_f64()).collect()
    }

    /// Side i runs from vertex i to vertex i+1.
    pub fn sides(&self) -> Vec<Side> {
        let v = self.vertices();
        let labels: &[&'static str] = match self.family {
            Family::BsTriangle => &["OF", "FH", "HO"],
            Family::Parallelogram => &["bottom", "right", "top", "left"],
            Family::Rectangle => &["bottom", "right", "top", "left"],
            Family::LShape => &["bottom", "right-low", "step", "right-high", "top", "left"],
        };
        (0..v.len())
            .map(|i| Side { index: i, label: labels[i], from: v[i].clone(), to: v[(i + 1) % v.len()].clone() })
            .collect()
    }

    pub fn side_by_label(&self, label: &str) -> Result<Side> {
        self.sides()
            .into_iter()
            .find(|s| s.label.eq_ignore_ascii_case(label))
            .ok_or_else(|| PolyscarError::Config(format!("{} has no side '{label}'", self.family)))
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let v = self.vertices_f64();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in v {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Exact polygon area (shoelace).
    pub fn area(&self) -> Surd {
        let v = self.vertices();
        let mut acc = Surd::zero();
        for i in 0..v.len() {
            acc = &acc + &v[i].cross(&v[(i + 1) % v.len()]);
        }
        acc.scale(&Ratio::new(1, 2))
    }

    /// C, the least common multiple of the angle denominators.
    pub fn lcm_c(&self) -> Result<u64> {
        angle_lcm(&self.angles)
    }

    pub fn genus(&self) -> Result<u64> {
        genus(&self.angles)
    }
}

fn angle_lcm(angles: &[Ratio]) -> Result<u64> {
    let dens: Vec<u64> = angles
        .iter()
        .map(|a| a.denom().to_u64().ok_or_else(|| PolyscarError::Domain(format!("angle {a} too fine"))))
        .collect::<Result<_>>()?;
    lcm_list(&dens)
}

/// g = 1 + (C/2)·Σ (p_k − 1)/q_k for angles p_k/q_k·π.
pub fn genus(angles: &[Ratio]) -> Result<u64> {
    if angles.len() < 3 {
        return Err(PolyscarError::Domain("a polygon needs at least three angles".into()));
    }
    if angles.iter().any(|a| !a.is_positive()) {
        return Err(PolyscarError::Domain("angles must be positive".into()));
    }
    let sum = angles.iter().fold(Ratio::zero(), |acc, a| acc + a);
    if sum != Ratio::integer(angles.len() as i64 - 2) {
        return Err(PolyscarError::Domain(format!("angle sum {sum}π differs from ({} − 2)π", angles.len())));
    }
    let c = angle_lcm(angles)?;
    let mut s = Ratio::zero();
    for a in angles {
        let p = Ratio::from_bigint(a.numer().clone());
        let q = Ratio::from_bigint(a.denom().clone());
        s = s + (p - Ratio::one()) / q;
    }
    let g = Ratio::one() + Ratio::new(c as i64, 2) * s;
    if !g.is_integer() {
        return Err(PolyscarError::Consistency(format!("genus evaluates to non-integer {g}")));
    }
    g.numer().to_u64().ok_or_else(|| PolyscarError::Consistency(format!("genus {g} out of range")))
}
