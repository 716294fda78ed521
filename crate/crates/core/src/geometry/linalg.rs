use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::exact::{Ratio, Surd};

/// Exact plane vector with coordinates in a quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vec2 {
    pub x: Surd,
    pub y: Surd,
}

impl Vec2 {
    pub fn new(x: Surd, y: Surd) -> Vec2 {
        Vec2 { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Vec2 {
        Vec2::new(Surd::int(x), Surd::int(y))
    }

    pub fn zero() -> Vec2 {
        Vec2::ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn scale(&self, k: &Surd) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }

    pub fn scale_ratio(&self, k: &Ratio) -> Vec2 {
        Vec2::new(self.x.scale(k), self.y.scale(k))
    }

    pub fn dot(&self, o: &Vec2) -> Surd {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    /// z-component of the cross product.
    pub fn cross(&self, o: &Vec2) -> Surd {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }

    pub fn norm2(&self) -> Surd {
        self.dot(self)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }

    pub fn length_f64(&self) -> f64 {
        let [x, y] = self.to_f64();
        x.hypot(y)
    }

    /// Radicand shared by the coordinates (1 when both are rational).
    pub fn radicand(&self) -> u32 {
        self.x.radicand().max(self.y.radicand())
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.x, self.y)
    }
}

impl Add<&Vec2> for &Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub<&Vec2> for &Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        &self + &o
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        &self - &o
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

/// 2×2 matrix [[a, b], [c, d]].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: Surd,
    pub b: Surd,
    pub c: Surd,
    pub d: Surd,
}

impl Mat2 {
    pub fn identity() -> Mat2 {
        Mat2 { a: Surd::one(), b: Surd::zero(), c: Surd::zero(), d: Surd::one() }
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        Vec2::new(&(&self.a * &v.x) + &(&self.b * &v.y), &(&self.c * &v.x) + &(&self.d * &v.y))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn det(&self) -> Surd {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        let inv = det.recip();
        Mat2 { a: &self.d * &inv, b: -(&self.b * &inv), c: -(&self.c * &inv), d: &self.a * &inv }
    }

    /// Reflection across the line through the origin with direction `dir`.
    pub fn reflection(dir: &Vec2) -> Mat2 {
        let n2 = dir.norm2().recip();
        let xx = &dir.x * &dir.x;
        let yy = &dir.y * &dir.y;
        let xy = &(&dir.x * &dir.y) * &Surd::int(2);
        Mat2 { a: &(&xx - &yy) * &n2, b: &xy * &n2, c: &xy * &n2, d: &(&yy - &xx) * &n2 }
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [[self.a.to_f64(), self.b.to_f64()], [self.c.to_f64(), self.d.to_f64()]]
    }
}

/// Affine map x ↦ lin·x + shift.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub lin: Mat2,
    pub shift: Vec2,
}

impl Affine {
    pub fn identity() -> Affine {
        Affine { lin: Mat2::identity(), shift: Vec2::zero() }
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        &self.lin.apply(v) + &self.shift
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Affine) -> Affine {
        Affine { lin: self.lin.mul(&other.lin), shift: self.apply(&other.shift) }
    }

    pub fn inverse(&self) -> Affine {
        let inv = self.lin.inverse();
        let shift = -&inv.apply(&self.shift);
        Affine { lin: inv, shift }
    }

    /// Reflection across the line through `p` and `q`.
    pub fn reflection(p: &Vec2, q: &Vec2) -> Affine {
        let lin = Mat2::reflection(&(q - p));
        let shift = p - &lin.apply(p);
        Affine { lin, shift }
    }

    pub fn det(&self) -> Surd {
        self.lin.det()
    }

    pub fn to_f64(&self) -> AffineF64 {
        AffineF64 { lin: self.lin.to_f64(), shift: self.shift.to_f64() }
    }
}

/// Float copy of an [`Affine`] for fast sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineF64 {
    pub lin: [[f64; 2]; 2],
    pub shift: [f64; 2],
}

impl AffineF64 {
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.lin[0][0] * p[0] + self.lin[0][1] * p[1] + self.shift[0],
            self.lin[1][0] * p[0] + self.lin[1][1] * p[1] + self.shift[1],
        ]
    }
}

/// Even-odd point-in-polygon test on float vertices.
pub fn point_in_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the segment `a`–`b`.
pub fn distance_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}
