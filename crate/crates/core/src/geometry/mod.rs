//! Billiard families, genus, the elementary polygon pattern (EPP) and the
//! projected period lattice.

mod epp;
mod lattice;
mod linalg;
mod spec;

pub use epp::{build_epp, Boundary, Epp, EppImage, Glue};
pub use lattice::{
    period_lattice, raw_classification, triangle_lattices, Approximation, LatticeClass, PeriodLattice, Relation, Variant,
};
pub use linalg::{distance_to_segment, point_in_polygon, Affine, AffineF64, Mat2, Vec2};
pub use spec::{genus, BilliardSpec, Family, LShapeSizes, Side, Sizes};
