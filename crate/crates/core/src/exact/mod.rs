//! Exact arithmetic: rationals, quadratic surds, continued fractions and the
//! Euclidean period reduction.

mod cf;
mod period;
mod ratio;
mod surd;

pub use cf::{approximate_angle, convergents, convergents_of_tag, AngleInput, CfApprox, Constant};
pub use period::{lcm_list, reduce_period, EuclidStep, PeriodCertificate};
pub use ratio::Ratio;
pub use surd::{is_square_free, sqrt_approx, Surd, SQRT_DIGITS};
