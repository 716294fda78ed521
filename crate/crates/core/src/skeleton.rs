//! Straight-line flow on the glued EPP: direction classification, singular
//! diagonals (saddle connections) and the periodic-orbit channels they bound.
//!
//! Every billiard vertex is a marked point, so lines through any vertex count
//! as singular even where the surface itself is flat.

use std::collections::HashMap;

use crate::error::{PolyscarError, Result};
use crate::exact::{Ratio, Surd};
use crate::geometry::{point_in_polygon, Affine, Epp, Vec2};

/// Steps after which a separatrix that has not met a vertex is taken as evidence
/// of an aperiodic direction.
pub const TRACE_STEP_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionKind {
    Periodic,
    Aperiodic,
}

#[derive(Clone, Debug)]
pub struct DirectionClass {
    pub direction: Vec2,
    pub kind: DirectionKind,
    /// Shortest closed-orbit period in this direction.
    pub period: Option<Vec2>,
}

/// A straight segment on the surface starting and ending at vertices.
#[derive(Clone, Debug)]
pub struct SingularDiagonal {
    /// 0-based EPP copy holding the starting vertex.
    pub anchor_copy: usize,
    /// Starting vertex in placed (EPP) coordinates.
    pub anchor_vertex: Vec2,
    pub anchor_base_vertex: usize,
    pub direction: Vec2,
    /// (copy, from, to) in placed coordinates.
    pub segments: Vec<(usize, Vec2, Vec2)>,
    /// Base side index of every edge crossed, in order.
    pub side_crossings: Vec<usize>,
    /// (crossings of sides parallel to the x axis, crossings of all other sides).
    /// For the rectangle this is (horizontal bounces, vertical bounces).
    pub bounce_counts: (usize, usize),
    /// (copy, base vertex index) where the diagonal ends.
    pub terminal: Option<(usize, usize)>,
    /// Terminal vertex in billiard coordinates.
    pub terminal_vertex: Option<Vec2>,
}

impl SingularDiagonal {
    /// Total length along the direction, in units of |direction|.
    pub fn parameter_length(&self) -> Surd {
        let d2 = self.direction.norm2();
        self.segments.iter().fold(Surd::zero(), |acc, (_, a, b)| &acc + &(&(b - a).dot(&self.direction) / &d2))
    }
}

/// One cell of a POC inside a single EPP copy.
#[derive(Clone, Debug)]
pub struct FoldedCell {
    /// 1-based EPP image index.
    pub image: usize,
    /// Cell polygon in placed coordinates.
    pub polygon: Vec<Vec2>,
    /// Maps placed coordinates back into the billiard.
    pub to_billiard: Affine,
}

impl FoldedCell {
    pub fn billiard_polygon_f64(&self) -> Vec<[f64; 2]> {
        self.polygon.iter().map(|p| self.to_billiard.apply(p).to_f64()).collect()
    }
}

/// A planar strip of parallel periodic orbits inside the EPP, bounded by two
/// singular diagonals. Several strips glue into one cylinder on the surface.
#[derive(Clone, Debug)]
pub struct PocDescriptor {
    pub id: usize,
    pub cylinder: usize,
    pub period_vector: Vec2,
    /// Transverse extent measured as cross(direction, ·); width times |direction|.
    pub transverse: Surd,
    pub width: f64,
    /// Length of the strip inside the EPP along the flow.
    pub length: f64,
    pub bounding_diagonals: [SingularDiagonal; 2],
    pub folded_cells: Vec<FoldedCell>,
}

/// A maximal family of closed orbits on the surface.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub id: usize,
    pub period_vector: Vec2,
    pub transverse: Surd,
    pub width: f64,
    pub circumference: f64,
    /// width · circumference, exact.
    pub area: Surd,
    /// POC ids of the planar strips making up this cylinder.
    pub pieces: Vec<usize>,
}

/// Complete periodic skeleton of one direction.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub direction: Vec2,
    pub cylinders: Vec<Cylinder>,
    pub pocs: Vec<PocDescriptor>,
    pub diagonals: Vec<SingularDiagonal>,
}

impl Skeleton {
    pub fn total_area(&self) -> Surd {
        self.cylinders.iter().fold(Surd::zero(), |acc, c| &acc + &c.area)
    }

    /// Distinct strip widths, ascending.
    pub fn distinct_widths(&self) -> Vec<Surd> {
        let mut w: Vec<Surd> = self.pocs.iter().map(|p| p.transverse.clone()).collect();
        w.sort();
        w.dedup();
        w
    }
}

struct Hit {
    t: Surd,
    edge: usize,
    vertex: Option<usize>,
}

/// First boundary point of `poly` hit by the ray x + t·d, t > 0.
fn cast(poly: &[Vec2], x: &Vec2, d: &Vec2) -> Option<Hit> {
    let n = poly.len();
    let one = Surd::one();
    let mut best: Option<Hit> = None;
    for e in 0..n {
        let a = &poly[e];
        let ab = &poly[(e + 1) % n] - a;
        let den = d.cross(&ab);
        if den.is_zero() {
            continue;
        }
        let ax = a - x;
        let t = &ax.cross(&ab) / &den;
        if t.signum() <= 0 {
            continue;
        }
        let s = &ax.cross(d) / &den;
        if s.signum() < 0 || s > one {
            continue;
        }
        let vertex = if s.is_zero() {
            Some(e)
        } else if s == one {
            Some((e + 1) % n)
        } else {
            None
        };
        let better = match &best {
            None => true,
            Some(h) => t < h.t || (t == h.t && vertex.is_some()),
        };
        if better {
            best = Some(Hit { t, edge: e, vertex });
        }
    }
    best
}

/// Does direction d point strictly into the polygon at vertex i?
fn enters_at_vertex(poly: &[Vec2], i: usize, d: &Vec2) -> bool {
    let n = poly.len();
    let v = &poly[i];
    let e1 = &poly[(i + 1) % n] - v;
    let e0 = &poly[(i + n - 1) % n] - v;
    let along = |e: &Vec2| e.cross(d).is_zero() && e.dot(d).signum() > 0;
    if along(&e1) || along(&e0) {
        return false;
    }
    let left_out = e1.cross(d).signum() > 0;
    let left_in = d.cross(&e0).signum() > 0;
    if e1.cross(&e0).signum() > 0 {
        left_out && left_in
    } else {
        left_out || left_in
    }
}

fn is_entry_edge(poly: &[Vec2], e: usize, d: &Vec2) -> bool {
    let ab = &poly[(e + 1) % poly.len()] - &poly[e];
    ab.cross(d).signum() > 0
}

/// Point of edge e (as a full line) with cross(d, X) = tau.
fn point_at_tau(poly: &[Vec2], e: usize, d: &Vec2, tau: &Surd) -> Vec2 {
    let a = &poly[e];
    let ab = &poly[(e + 1) % poly.len()] - a;
    let s = &(tau - &d.cross(a)) / &d.cross(&ab);
    a + &ab.scale(&s)
}

struct Crossing {
    side: usize,
    into: usize,
    edge: usize,
    point: Vec2,
}

struct RawTrace {
    segments: Vec<(usize, Vec2, Vec2)>,
    crossings: Vec<Crossing>,
    end: Option<(usize, usize)>,
}

fn trace(epp: &Epp, copy: usize, start: &Vec2, d: &Vec2, cap: usize) -> Result<RawTrace> {
    let mut out = RawTrace { segments: Vec::new(), crossings: Vec::new(), end: None };
    let mut k = copy;
    let mut x = start.clone();
    for _ in 0..cap {
        let hit = cast(&epp.polygons[k], &x, d)
            .ok_or_else(|| PolyscarError::Consistency(format!("ray from {x} escaped copy {}", k + 1)))?;
        let y = &x + &d.scale(&hit.t);
        out.segments.push((k, x, y.clone()));
        if let Some(v) = hit.vertex {
            out.end = Some((k, v));
            return Ok(out);
        }
        let side = epp.base_side(k, hit.edge);
        let g = &epp.glue[k][side];
        let into = g.partner;
        let point = &y + &g.translation;
        out.crossings.push(Crossing { side, into, edge: epp.placed_edge(into, side), point: point.clone() });
        k = into;
        x = point;
    }
    Ok(out)
}

fn base_vertex(epp: &Epp, copy: usize, placed: usize) -> usize {
    let n = epp.spec.angles.len();
    if epp.images[copy].eta > 0 {
        placed
    } else {
        (n - placed) % n
    }
}

fn make_diagonal(epp: &Epp, copy: usize, vertex: usize, d: &Vec2, raw: RawTrace) -> SingularDiagonal {
    let base = epp.spec.vertices();
    let sides: Vec<bool> = (0..base.len()).map(|s| (&base[(s + 1) % base.len()] - &base[s]).y.is_zero()).collect();
    let side_crossings: Vec<usize> = raw.crossings.iter().map(|c| c.side).collect();
    let horizontal = side_crossings.iter().filter(|&&s| sides[s]).count();
    let terminal = raw.end.map(|(k, v)| (k, base_vertex(epp, k, v)));
    let terminal_vertex = terminal.map(|(_, bv)| base[bv].clone());
    SingularDiagonal {
        anchor_copy: copy,
        anchor_vertex: epp.polygons[copy][vertex].clone(),
        anchor_base_vertex: base_vertex(epp, copy, vertex),
        direction: d.clone(),
        segments: raw.segments,
        bounce_counts: (horizontal, side_crossings.len() - horizontal),
        side_crossings,
        terminal,
        terminal_vertex,
    }
}

/// Trace the singular diagonal leaving base vertex `vertex` of the billiard
/// (EPP copy 1) in direction `d`.
pub fn trace_diagonal(epp: &Epp, vertex: usize, d: &Vec2) -> Result<SingularDiagonal> {
    if d.is_zero() {
        return Err(PolyscarError::Domain("zero direction".into()));
    }
    if !enters_at_vertex(&epp.polygons[0], vertex, d) {
        return Err(PolyscarError::Domain(format!("direction {d} does not enter the billiard at vertex {vertex}")));
    }
    let raw = trace(epp, 0, &epp.polygons[0][vertex], d, TRACE_STEP_CAP)?;
    if raw.end.is_none() {
        return Err(PolyscarError::Kind(format!("diagonal in direction {d} meets no vertex within {TRACE_STEP_CAP} steps")));
    }
    Ok(make_diagonal(epp, 0, vertex, d, raw))
}

/// Fold a diagonal back into the billiard: one segment per EPP copy visited.
pub fn fold_diagonal(epp: &Epp, sd: &SingularDiagonal) -> Vec<[Vec2; 2]> {
    sd.segments
        .iter()
        .map(|(k, a, b)| {
            let inv = epp.images[*k].placement.inverse();
            [inv.apply(a), inv.apply(b)]
        })
        .collect()
}

/// Rescale `d` into the surface's field, or `None` when its slope lies outside
/// it (such a direction can never close).
fn normalize_direction(field: u32, d: &Vec2) -> Option<Vec2> {
    let ok = |s: &Surd| s.radicand() == 1 || s.radicand() == field;
    if ok(&d.x) && ok(&d.y) {
        return Some(d.clone());
    }
    if d.x.radicand() != d.y.radicand() && !d.x.is_zero() && !d.y.is_zero() {
        return None;
    }
    if d.x.is_zero() {
        return Some(Vec2::new(Surd::zero(), Surd::int(d.y.signum() as i64)));
    }
    if d.y.is_zero() {
        return Some(Vec2::new(Surd::int(d.x.signum() as i64), Surd::zero()));
    }
    let slope = &d.y / &d.x;
    let slope = slope.as_rational()?.clone();
    let sx = d.x.signum() as i64;
    Some(Vec2::new(Surd::int(sx), Surd::rational(slope * Ratio::integer(sx))))
}

struct Cell {
    copy: usize,
    entry: usize,
    lo: Surd,
    hi: Surd,
    exit: usize,
    chord: Surd,
    next: usize,
    jump: bool,
}

enum Outcome {
    Periodic(Skeleton),
    Aperiodic,
}

fn build(epp: &Epp, d: &Vec2, cap: usize) -> Result<Outcome> {
    // Separatrices from every vertex sector that the direction enters.
    let mut diagonals = Vec::new();
    let mut breaks: HashMap<(usize, usize), Vec<Surd>> = HashMap::new();
    for (k, poly) in epp.polygons.iter().enumerate() {
        for e in 0..poly.len() {
            if is_entry_edge(poly, e, d) {
                let a = d.cross(&poly[e]);
                let b = d.cross(&poly[(e + 1) % poly.len()]);
                breaks.insert((k, e), vec![a, b]);
            }
        }
    }
    for k in 0..epp.len() {
        for v in 0..epp.polygons[k].len() {
            if !enters_at_vertex(&epp.polygons[k], v, d) {
                continue;
            }
            let raw = trace(epp, k, &epp.polygons[k][v], d, cap)?;
            if raw.end.is_none() {
                return Ok(Outcome::Aperiodic);
            }
            for c in &raw.crossings {
                breaks.get_mut(&(c.into, c.edge)).expect("crossing enters through an entry edge").push(d.cross(&c.point));
            }
            diagonals.push(make_diagonal(epp, k, v, d, raw));
        }
    }

    // Edges parallel to the flow are saddle connections as well.
    for (k, poly) in epp.polygons.iter().enumerate() {
        let n = poly.len();
        for e in 0..n {
            let (a, b) = (e, (e + 1) % n);
            let ab = &poly[b] - &poly[a];
            if !ab.cross(d).is_zero() {
                continue;
            }
            let (from, to) = if ab.dot(d).signum() > 0 { (a, b) } else { (b, a) };
            let raw = RawTrace {
                segments: vec![(k, poly[from].clone(), poly[to].clone())],
                crossings: Vec::new(),
                end: Some((k, to)),
            };
            diagonals.push(make_diagonal(epp, k, from, d, raw));
        }
    }

    let mut keys: Vec<(usize, usize)> = breaks.keys().copied().collect();
    keys.sort_unstable();
    let mut cells: Vec<Cell> = Vec::new();
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for key in keys {
        let mut taus = breaks.remove(&key).unwrap_or_default();
        taus.sort();
        taus.dedup();
        for w in taus.windows(2) {
            by_edge.entry(key).or_default().push(cells.len());
            cells.push(Cell {
                copy: key.0,
                entry: key.1,
                lo: w[0].clone(),
                hi: w[1].clone(),
                exit: 0,
                chord: Surd::zero(),
                next: usize::MAX,
                jump: false,
            });
        }
    }

    let half = Ratio::new(1, 2);
    for i in 0..cells.len() {
        let (k, e) = (cells[i].copy, cells[i].entry);
        let poly = &epp.polygons[k];
        let mid = (&cells[i].lo + &cells[i].hi).scale(&half);
        let x = point_at_tau(poly, e, d, &mid);
        let hit = cast(poly, &x, d).ok_or_else(|| PolyscarError::Consistency("cell chord escaped its copy".into()))?;
        if hit.vertex.is_some() {
            return Err(PolyscarError::Consistency("cell midline runs into a vertex".into()));
        }
        let side = epp.base_side(k, hit.edge);
        let g = &epp.glue[k][side];
        let shift = d.cross(&g.translation);
        let target = &mid + &shift;
        let edge_in = epp.placed_edge(g.partner, side);
        let next = by_edge
            .get(&(g.partner, edge_in))
            .and_then(|ids| ids.iter().copied().find(|&c| cells[c].lo < target && target < cells[c].hi))
            .ok_or_else(|| PolyscarError::Consistency("cell image falls outside every cell".into()))?;
        let width = &cells[i].hi - &cells[i].lo;
        if &cells[next].hi - &cells[next].lo != width {
            return Err(PolyscarError::Consistency("cell maps onto a cell of different width".into()));
        }
        cells[i].exit = hit.edge;
        cells[i].chord = hit.t;
        cells[i].next = next;
        cells[i].jump = !g.translation.is_zero();
    }

    let dlen = d.length_f64();
    let mut seen = vec![false; cells.len()];
    let mut cylinders = Vec::new();
    let mut pocs = Vec::new();
    for start in 0..cells.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            cycle.push(c);
            c = cells[c].next;
        }
        if c != start {
            return Err(PolyscarError::Consistency("cell map is not a permutation".into()));
        }
        // Rotate so the cycle starts just after a jump between EPP sides.
        if let Some(p) = cycle.iter().position(|&c| cells[c].jump) {
            cycle.rotate_left(p + 1);
        }
        let lambda = cycle.iter().fold(Surd::zero(), |acc, &c| &acc + &cells[c].chord);
        let transverse = &cells[start].hi - &cells[start].lo;
        let period = d.scale(&lambda);
        let cyl_id = cylinders.len();
        let cyl_cells: Vec<usize> = cycle.clone();

        let mut piece_ids = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        for &c in &cycle {
            current.push(c);
            if cells[c].jump {
                piece_ids.push(pocs.len());
                pocs.push(make_poc(epp, d, &cells, &current, &cyl_cells, &diagonals, pocs.len(), cyl_id, &period, &transverse)?);
                current.clear();
            }
        }
        if !current.is_empty() {
            piece_ids.push(pocs.len());
            pocs.push(make_poc(epp, d, &cells, &current, &cyl_cells, &diagonals, pocs.len(), cyl_id, &period, &transverse)?);
        }
        cylinders.push(Cylinder {
            id: cyl_id,
            width: transverse.to_f64() / dlen,
            circumference: lambda.to_f64() * dlen,
            area: &transverse * &lambda,
            period_vector: period,
            transverse,
            pieces: piece_ids,
        });
    }
    Ok(Outcome::Periodic(Skeleton { direction: d.clone(), cylinders, pocs, diagonals }))
}

fn cell_polygon(epp: &Epp, d: &Vec2, cell: &Cell) -> Vec<Vec2> {
    let poly = &epp.polygons[cell.copy];
    vec![
        point_at_tau(poly, cell.entry, d, &cell.lo),
        point_at_tau(poly, cell.exit, d, &cell.lo),
        point_at_tau(poly, cell.exit, d, &cell.hi),
        point_at_tau(poly, cell.entry, d, &cell.hi),
    ]
}

/// A saddle connection running along the side `tau` of one of the given cells.
fn diagonal_along(epp: &Epp, d: &Vec2, cells: &[Cell], ids: &[usize], lo_side: bool, diagonals: &[SingularDiagonal]) -> Option<SingularDiagonal> {
    for &c in ids {
        let cell = &cells[c];
        let tau = if lo_side { &cell.lo } else { &cell.hi };
        let poly = &epp.polygons[cell.copy];
        let s0 = d.dot(&point_at_tau(poly, cell.entry, d, tau));
        let s1 = d.dot(&point_at_tau(poly, cell.exit, d, tau));
        if s0 == s1 {
            continue;
        }
        let half = Ratio::new(1, 2);
        for sd in diagonals {
            for (k, a, b) in &sd.segments {
                if *k != cell.copy {
                    continue;
                }
                let m = (a + b).scale_ratio(&half);
                if d.cross(&m) != *tau {
                    continue;
                }
                let s = d.dot(&m);
                if s0 <= s && s <= s1 {
                    return Some(sd.clone());
                }
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn make_poc(
    epp: &Epp,
    d: &Vec2,
    cells: &[Cell],
    piece: &[usize],
    cylinder: &[usize],
    diagonals: &[SingularDiagonal],
    id: usize,
    cyl_id: usize,
    period: &Vec2,
    transverse: &Surd,
) -> Result<PocDescriptor> {
    let find = |lo: bool| {
        diagonal_along(epp, d, cells, piece, lo, diagonals)
            .or_else(|| diagonal_along(epp, d, cells, cylinder, lo, diagonals))
            .ok_or_else(|| PolyscarError::Consistency(format!("POC {id} has no bounding diagonal")))
    };
    let bounding_diagonals = [find(true)?, find(false)?];
    let dlen = d.length_f64();
    let length = piece.iter().map(|&c| cells[c].chord.to_f64()).sum::<f64>() * dlen;
    let folded_cells = piece
        .iter()
        .map(|&c| FoldedCell {
            image: cells[c].copy + 1,
            polygon: cell_polygon(epp, d, &cells[c]),
            to_billiard: epp.images[cells[c].copy].placement.inverse(),
        })
        .collect();
    Ok(PocDescriptor {
        id,
        cylinder: cyl_id,
        period_vector: period.clone(),
        transverse: transverse.clone(),
        width: transverse.to_f64() / dlen,
        length,
        bounding_diagonals,
        folded_cells,
    })
}

/// Periodic skeleton of `direction`; kind error when the direction is aperiodic.
pub fn skeleton(epp: &Epp, direction: &Vec2) -> Result<Skeleton> {
    skeleton_with_cap(epp, direction, TRACE_STEP_CAP)
}

pub fn skeleton_with_cap(epp: &Epp, direction: &Vec2, cap: usize) -> Result<Skeleton> {
    if direction.is_zero() {
        return Err(PolyscarError::Domain("zero direction".into()));
    }
    let d = normalize_direction(epp.spec.field(), direction)
        .ok_or_else(|| PolyscarError::Kind(format!("direction {direction} has a slope outside the surface field")))?;
    match build(epp, &d, cap)? {
        Outcome::Periodic(s) => Ok(s),
        Outcome::Aperiodic => Err(PolyscarError::Kind(format!("direction {direction} is aperiodic"))),
    }
}

pub fn classify_direction(epp: &Epp, direction: &Vec2) -> Result<DirectionClass> {
    if direction.is_zero() {
        return Err(PolyscarError::Domain("zero direction".into()));
    }
    let aperiodic = DirectionClass { direction: direction.clone(), kind: DirectionKind::Aperiodic, period: None };
    let Some(d) = normalize_direction(epp.spec.field(), direction) else {
        return Ok(aperiodic);
    };
    match build(epp, &d, TRACE_STEP_CAP)? {
        Outcome::Aperiodic => Ok(aperiodic),
        Outcome::Periodic(s) => {
            let period = s.cylinders.iter().map(|c| c.period_vector.clone()).min_by(|a, b| a.norm2().cmp(&b.norm2()));
            Ok(DirectionClass { direction: d, kind: DirectionKind::Periodic, period })
        }
    }
}

/// All POCs of a periodic direction class.
pub fn enumerate_pocs(epp: &Epp, class: &DirectionClass) -> Result<Vec<PocDescriptor>> {
    if class.kind != DirectionKind::Periodic {
        return Err(PolyscarError::Kind(format!("direction {} is not periodic", class.direction)));
    }
    Ok(skeleton(epp, &class.direction)?.pocs)
}

/// How many folded cells of the given POCs cover the billiard point `p`.
pub fn coverage(pocs: &[&PocDescriptor], p: [f64; 2]) -> usize {
    pocs.iter()
        .flat_map(|poc| poc.folded_cells.iter())
        .filter(|cell| point_in_polygon(&cell.billiard_polygon_f64(), p))
        .count()
}

/// Singular diagonal of the rectangle leaving (0,0) toward (q·a, r·b).
pub fn rectangle_diagonal(epp: &Epp, q: u32, r: u32) -> Result<SingularDiagonal> {
    let (a, b) = match &epp.spec.sizes {
        crate::geometry::Sizes::Rectangle { a, b } => (a.clone(), b.clone()),
        _ => return Err(PolyscarError::Kind("rectangle diagonal requested for a non-rectangle".into())),
    };
    let d = Vec2::new(&a * &Surd::int(q as i64), &b * &Surd::int(r as i64));
    trace_diagonal(epp, 0, &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BilliardSpec;

    fn rect(a: i64, b: i64) -> Epp {
        Epp::new(&BilliardSpec::rectangle(Surd::int(a), Surd::int(b)).unwrap()).unwrap()
    }

    #[test]
    fn unit_square_diagonal_direction() {
        let epp = rect(1, 1);
        let class = classify_direction(&epp, &Vec2::ints(1, 1)).unwrap();
        assert_eq!(class.kind, DirectionKind::Periodic);
        assert_eq!(class.period, Some(Vec2::ints(2, 2)));
        let sk = skeleton(&epp, &Vec2::ints(1, 1)).unwrap();
        assert_eq!(sk.cylinders.len(), 2);
        for c in &sk.cylinders {
            assert!((c.width - 0.5f64.sqrt()).abs() < 1e-15);
            assert!((c.circumference - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        }
        assert_eq!(sk.total_area(), epp.area());
    }

    #[test]
    fn bouncing_ball_and_irrational_slope() {
        let epp = rect(1, 1);
        let c = classify_direction(&epp, &Vec2::ints(1, 0)).unwrap();
        assert_eq!(c.period, Some(Vec2::ints(2, 0)));
        let irr = classify_direction(&epp, &Vec2::new(Surd::one(), Surd::sqrt(2))).unwrap();
        assert_eq!(irr.kind, DirectionKind::Aperiodic);
        assert!(matches!(classify_direction(&epp, &Vec2::zero()), Err(PolyscarError::Domain(_))));
    }

    #[test]
    fn rectangle_widths_follow_the_angle() {
        let epp = Epp::new(&BilliardSpec::rectangle(Surd::int(1), Surd::frac(3, 2)).unwrap()).unwrap();
        for (q, r) in [(1i64, 1i64), (2, 1), (1, 3), (3, 2)] {
            let (a, b) = (1.0, 1.5);
            let sk = skeleton(&epp, &Vec2::new(Surd::int(q), Surd::frac(3 * r, 2))).unwrap();
            let alpha = (r as f64 * b / (q as f64 * a)).atan();
            let expected = a / r as f64 * alpha.sin();
            let len = 2.0 * ((q * q) as f64 * a * a + (r * r) as f64 * b * b).sqrt();
            for c in &sk.cylinders {
                assert!((c.width - expected).abs() < 1e-12, "({q},{r}) width {}", c.width);
                assert!((c.period_vector.length_f64() - len).abs() < 1e-12);
            }
            assert_eq!(sk.total_area(), epp.area());
        }
    }

    #[test]
    fn rectangle_diagonals_end_by_parity() {
        let epp = rect(1, 1);
        let sd = rectangle_diagonal(&epp, 1, 1).unwrap();
        assert_eq!(sd.terminal_vertex, Some(Vec2::ints(1, 1)));
        assert_eq!(fold_diagonal(&epp, &sd).len(), 1);
        let sd = rectangle_diagonal(&epp, 2, 1).unwrap();
        assert_eq!(sd.terminal_vertex, Some(Vec2::ints(0, 1)));
        assert_eq!(sd.bounce_counts, (0, 1));
        let sd = rectangle_diagonal(&epp, 1, 2).unwrap();
        assert_eq!(sd.terminal_vertex, Some(Vec2::ints(1, 0)));
    }

    #[test]
    fn triangle_vertical_skeleton() {
        let epp = Epp::new(&BilliardSpec::bs_triangle()).unwrap();
        let sk = skeleton(&epp, &Vec2::ints(0, 1)).unwrap();
        assert_eq!(sk.cylinders.len(), 4);
        assert_eq!(sk.pocs.len(), 6);
        assert_eq!(sk.total_area(), epp.area());
        let r2 = Surd::sqrt(2);
        let d6 = Vec2::new(Surd::zero(), (&Surd::int(1) + &r2).scale(&Ratio::integer(2)));
        let d9 = Vec2::new(Surd::zero(), (&Surd::int(2) + &r2).scale(&Ratio::integer(2)));
        let with = |p: &Vec2| sk.pocs.iter().filter(|c| c.period_vector == *p || c.period_vector == -p).count();
        assert_eq!(with(&d6), 2);
        assert_eq!(with(&d9), 4);
    }

    #[test]
    fn folded_triangle_diagonals_include_x_equals_one() {
        let epp = Epp::new(&BilliardSpec::bs_triangle()).unwrap();
        let sk = skeleton(&epp, &Vec2::ints(0, 1)).unwrap();
        let folded: Vec<[Vec2; 2]> = sk.diagonals.iter().flat_map(|sd| fold_diagonal(&epp, sd)).collect();
        assert!(folded.iter().any(|[a, b]| a.x == Surd::int(1) && b.x == Surd::int(1)));
    }

    #[test]
    fn parallelogram_vertical_widths() {
        let epp = Epp::new(&BilliardSpec::parallelogram(Ratio::integer(4)).unwrap()).unwrap();
        let sk = skeleton(&epp, &Vec2::ints(0, 1)).unwrap();
        assert_eq!(sk.total_area(), epp.area());
        let widths = sk.distinct_widths();
        assert_eq!(widths, vec![Surd::frac(1, 2), Surd::frac(7, 2)]);
        assert_eq!(sk.pocs.len(), 14);
        assert_eq!(sk.cylinders.len(), 4);
    }
}
