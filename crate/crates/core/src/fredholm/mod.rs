//! Fredholm determinants, Tracy–Widom distributions and Airy process
//! statistics.

pub mod airy_process;
pub mod det;
pub mod painleve;
pub mod quadrature;
pub mod tw;

pub use airy_process::{airy_joint_cdf, airy_two_point, TwoPoint};
pub use det::{fredholm_det, FredholmValue, RestrictedKernelOperator};
pub use painleve::{painleve2_hm, HastingsMcLeod};
pub use quadrature::QuadratureScheme;
pub use tw::{f2_cdf, tw_family_cdfs, CdfMoments, TwTable};
