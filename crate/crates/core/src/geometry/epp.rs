use super::linalg::{point_in_polygon, Affine, AffineF64, Vec2};
use super::spec::BilliardSpec;
use crate::exact::{Ratio, Surd};
use crate::error::{PolyscarError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

impl Boundary {
    pub fn parse(s: &str) -> Result<Boundary> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(Boundary::Dirichlet),
            "neumann" | "n" => Ok(Boundary::Neumann),
            other => Err(PolyscarError::Config(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// One reflected copy of the billiard inside the EPP.
#[derive(Clone, Debug, PartialEq)]
pub struct EppImage {
    /// 1-based; image 1 is the billiard itself.
    pub index: usize,
    pub placement: Affine,
    pub eta: i32,
}

/// Where a copy's side is glued: the partner copy and the translation carrying
/// points of this copy's side onto the partner's copy of the same side.
#[derive(Clone, Debug, PartialEq)]
pub struct Glue {
    pub partner: usize,
    pub translation: Vec2,
}

/// The EPP together with its side gluings, i.e. the translation surface.
#[derive(Clone, Debug)]
pub struct Epp {
    pub spec: BilliardSpec,
    /// Vertex of angle π/C around which the copies are arranged.
    pub pivot: usize,
    pub images: Vec<EppImage>,
    /// Placed vertices of every copy, counter-clockwise.
    pub polygons: Vec<Vec<Vec2>>,
    /// `glue[k][s]` for copy k, side s.
    pub glue: Vec<Vec<Glue>>,
    placements_f64: Vec<AffineF64>,
    inverses_f64: Vec<AffineF64>,
    polygons_f64: Vec<Vec<[f64; 2]>>,
}

fn side_reflection(spec: &BilliardSpec, side: usize) -> Affine {
    let v = spec.vertices();
    Affine::reflection(&v[side], &v[(side + 1) % v.len()])
}

fn pivot_vertex(spec: &BilliardSpec, c: u64) -> Result<usize> {
    let target = Ratio::new(1, c as i64);
    spec.angles
        .iter()
        .position(|a| *a == target)
        .ok_or_else(|| PolyscarError::UnsupportedBoundary(format!("no vertex with angle π/{c}; EPP construction needs one")))
}

/// The 2C copies with signs: η = det of the placement for Dirichlet, +1 for Neumann.
pub fn build_epp(spec: &BilliardSpec, boundary: Boundary) -> Result<Vec<EppImage>> {
    let c = spec.lcm_c()?;
    let n = spec.angles.len();
    let pivot = pivot_vertex(spec, c)?;
    let next_side = pivot;
    let prev_side = (pivot + n - 1) % n;
    let r_next = side_reflection(spec, next_side);
    let r_prev = side_reflection(spec, prev_side);
    let mut images = Vec::with_capacity(2 * c as usize);
    let mut current = Affine::identity();
    for k in 0..2 * c as usize {
        let eta = match boundary {
            Boundary::Dirichlet => current.det().signum(),
            Boundary::Neumann => 1,
        };
        images.push(EppImage { index: k + 1, placement: current.clone(), eta });
        let r = if k % 2 == 0 { &r_next } else { &r_prev };
        current = current.compose(r);
    }
    if current != Affine::identity() {
        return Err(PolyscarError::Consistency("reflections around the pivot do not close up".into()));
    }
    Ok(images)
}

impl Epp {
    pub fn new(spec: &BilliardSpec) -> Result<Epp> {
        let images = build_epp(spec, Boundary::Dirichlet)?;
        let c = spec.lcm_c()?;
        let pivot = pivot_vertex(spec, c)?;
        let base = spec.vertices();
        let n = base.len();
        let polygons: Vec<Vec<Vec2>> = images
            .iter()
            .map(|im| {
                let mut p: Vec<Vec2> = base.iter().map(|v| im.placement.apply(v)).collect();
                // Reflections reverse orientation; keep every copy counter-clockwise.
                if im.eta < 0 {
                    p.reverse();
                    p.rotate_right(1);
                }
                p
            })
            .collect();
        let mut glue = Vec::with_capacity(images.len());
        for im in &images {
            let mut row = Vec::with_capacity(n);
            for s in 0..n {
                let r = side_reflection(spec, s);
                let lin = im.placement.lin.mul(&r.lin);
                let partner = images.iter().position(|o| o.placement.lin == lin).ok_or_else(|| {
                    PolyscarError::Consistency(format!("side {s} of copy {} has no partner copy", im.index))
                })?;
                let x = &base[s];
                let translation = &images[partner].placement.apply(x) - &im.placement.apply(x);
                row.push(Glue { partner, translation });
            }
            glue.push(row);
        }
        let placements_f64 = images.iter().map(|im| im.placement.to_f64()).collect();
        let inverses_f64 = images.iter().map(|im| im.placement.inverse().to_f64()).collect();
        let polygons_f64 = polygons.iter().map(|p| p.iter().map(|v| v.to_f64()).collect()).collect();
        Ok(Epp { spec: spec.clone(), pivot, images, polygons, glue, placements_f64, inverses_f64, polygons_f64 })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Side index (of the base polygon) corresponding to edge `e` of placed copy `k`.
    /// Placed polygons of reflected copies are stored reversed, so the indices differ.
    pub fn base_side(&self, k: usize, e: usize) -> usize {
        let n = self.spec.angles.len();
        if self.images[k].eta > 0 {
            e
        } else {
            // Placed vertex i is base vertex (n − i) mod n, so edge i→i+1 is base side n − 1 − i.
            (n - 1 + n - e) % n
        }
    }

    /// Placed edge of copy `k` that carries base side `s`.
    pub fn placed_edge(&self, k: usize, s: usize) -> usize {
        let n = self.spec.angles.len();
        if self.images[k].eta > 0 {
            s
        } else {
            (n - 1 + n - s) % n
        }
    }

    /// Distinct nonzero gluing translations, one representative per ± pair.
    pub fn translations(&self) -> Vec<Vec2> {
        let mut out: Vec<Vec2> = Vec::new();
        for row in &self.glue {
            for g in row {
                if g.translation.is_zero() {
                    continue;
                }
                let neg = -&g.translation;
                if !out.iter().any(|t| *t == g.translation || *t == neg) {
                    out.push(g.translation.clone());
                }
            }
        }
        out
    }

    /// Surface area: 2C copies of the billiard.
    pub fn area(&self) -> Surd {
        self.spec.area().scale(&Ratio::integer(self.len() as i64))
    }

    pub fn placement_f64(&self, k: usize) -> &AffineF64 {
        &self.placements_f64[k]
    }

    pub fn inverse_f64(&self, k: usize) -> &AffineF64 {
        &self.inverses_f64[k]
    }

    pub fn polygon_f64(&self, k: usize) -> &[[f64; 2]] {
        &self.polygons_f64[k]
    }

    /// The copy whose interior contains `p`, if any.
    pub fn locate(&self, p: [f64; 2]) -> Option<usize> {
        self.polygons_f64.iter().position(|poly| point_in_polygon(poly, p))
    }

    /// All images of a billiard point: (copy index, placed point, η).
    pub fn images_of(&self, p: [f64; 2]) -> impl Iterator<Item = (usize, [f64; 2], i32)> + '_ {
        self.images.iter().enumerate().map(move |(k, im)| (k, self.placements_f64[k].apply(p), im.eta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::spec::BilliardSpec;

    fn sample_interiors_disjoint(epp: &Epp) {
        let (lo, hi) = epp.spec.bounding_box();
        let mut hits = 0;
        for i in 0..40 {
            for j in 0..40 {
                let p = [lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.37) / 40.0, lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.61) / 40.0];
                if !point_in_polygon(&epp.spec.vertices_f64(), p) {
                    continue;
                }
                hits += 1;
                let images: Vec<[f64; 2]> = epp.images_of(p).map(|(_, q, _)| q).collect();
                for (k, q) in images.iter().enumerate() {
                    let owners: Vec<usize> = (0..epp.len()).filter(|&m| point_in_polygon(epp.polygon_f64(m), *q)).collect();
                    assert_eq!(owners, vec![k], "image {k} of {p:?} lies in copies {owners:?}");
                }
            }
        }
        assert!(hits > 100);
    }

    #[test]
    fn rectangle_epp_signs() {
        let spec = BilliardSpec::rectangle(Surd::int(1), Surd::frac(3, 2)).unwrap();
        let imgs = build_epp(&spec, Boundary::Dirichlet).unwrap();
        assert_eq!(imgs.len(), 4);
        let etas: Vec<i32> = imgs.iter().map(|i| i.eta).collect();
        assert_eq!(etas, vec![1, -1, 1, -1]);
        let neu = build_epp(&spec, Boundary::Neumann).unwrap();
        assert!(neu.iter().all(|i| i.eta == 1));
    }

    #[test]
    fn triangle_has_sixteen_disjoint_copies() {
        let epp = Epp::new(&BilliardSpec::bs_triangle()).unwrap();
        assert_eq!(epp.len(), 16);
        sample_interiors_disjoint(&epp);
    }

    #[test]
    fn parallelogram_and_lshape_tile() {
        let p = Epp::new(&BilliardSpec::parallelogram(Ratio::integer(4)).unwrap()).unwrap();
        assert_eq!(p.len(), 6);
        sample_interiors_disjoint(&p);
        let l = Epp::new(&BilliardSpec::l_shape(Surd::int(2), Surd::int(1), Surd::int(1), Surd::frac(1, 2)).unwrap()).unwrap();
        assert_eq!(l.len(), 4);
        sample_interiors_disjoint(&l);
    }

    #[test]
    fn triangle_translations_are_octagon_sides() {
        let epp = Epp::new(&BilliardSpec::bs_triangle()).unwrap();
        let t = epp.translations();
        assert_eq!(t.len(), 4);
        let len2 = (&Surd::int(2) + &Surd::sqrt(2).scale(&Ratio::integer(2))).pow(2);
        assert!(t.iter().all(|v| v.norm2() == len2));
    }

    #[test]
    fn gluing_is_an_involution() {
        let epp = Epp::new(&BilliardSpec::parallelogram(Ratio::new(7, 2)).unwrap()).unwrap();
        for (k, row) in epp.glue.iter().enumerate() {
            for (s, g) in row.iter().enumerate() {
                let back = &epp.glue[g.partner][s];
                assert_eq!(back.partner, k);
                assert_eq!(back.translation, -&g.translation);
            }
        }
    }

    #[test]
    fn placed_edges_match_base_sides() {
        let epp = Epp::new(&BilliardSpec::bs_triangle()).unwrap();
        let base = epp.spec.vertices();
        let n = base.len();
        for k in 0..epp.len() {
            for e in 0..n {
                let s = epp.base_side(k, e);
                assert_eq!(epp.placed_edge(k, s), e);
                let a = &epp.polygons[k][e];
                let b = &epp.polygons[k][(e + 1) % n];
                let pa = epp.images[k].placement.apply(&base[s]);
                let pb = epp.images[k].placement.apply(&base[(s + 1) % n]);
                assert!((*a == pa && *b == pb) || (*a == pb && *b == pa));
            }
        }
    }
}
