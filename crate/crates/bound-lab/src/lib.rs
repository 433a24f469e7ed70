//! Experiment harness: hypothesis gates, boundedness sweeps and maximal-function
//! checks for periodic Fourier integral operators.

pub mod error;
pub mod family;
pub mod gate;
pub mod report;
pub mod spec;
pub mod sweep;
pub mod verify;

pub use error::{LabError, LabResult};
pub use family::{gen_test_family, FamilyKind};
pub use gate::{theorem_gate, GateReport, GateVerdict, Hypothesis, Status};
pub use report::{run, run_experiment, write_report, Mode, Report};
pub use spec::{load_specs, parse_specs, Check, ExperimentSpec, GateKind};
pub use sweep::{boundedness_sweep, msharp_control_ratio, msharp_domination, weak11, RatioReport, SweepVerdict};
pub use verify::run_verify;
