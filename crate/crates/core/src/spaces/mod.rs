//! Variable-exponent and weighted norms, Muckenhoupt constants and maximal operators.

pub mod exponent;
pub mod maximal;
pub mod muckenhoupt;
pub mod norm;
pub mod weight;

pub use exponent::{conjugate_exponent, log_holder_constant, Exponent, ExponentSpec};
pub use maximal::{m_sharp_s, maximal, sharp_maximal, BallFamily};
pub use muckenhoupt::{
    a1_constant, admissible_weight_check, muckenhoupt_constant, structured_muckenhoupt_constant,
    weight_power_check, AdmissibilityReport, CubeFamily, InequalityCheck, WeightPowerReport,
};
pub use norm::{
    luxemburg_norm, luxemburg_norm_abs, modular, scaling_identity_residual, weak11_profile, weighted_constant_norm,
    weighted_variable_norm,
};
pub use weight::{structured_weight, Weight, WeightFactor, WeightSpec, WeightStructure};
