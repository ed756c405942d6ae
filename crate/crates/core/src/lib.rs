//! Combinatorics of angle doubling (itineraries, kneading sequences,
//! laminations) and numerical external/parameter ray tracing for the
//! quadratic family `z^2 + c`, composed into a verification harness that
//! produces machine-readable reports.

pub mod circle;
pub mod dynamics;
pub mod lamination;
pub mod ray;
pub mod render;
pub mod symbolic;
pub mod verify;

pub use circle::{parse_angle, Angle, Arc, BitRule, CircleError, DyadicInterval, Enclosure};
pub use dynamics::{Cycle, DynamicsError, OrbitDiagnostics, Parameter};
pub use lamination::{ClassRole, Cluster, LaminationClass, LaminationError, PullbackOptions};
pub use ray::{PotentialSchedule, RayError, RaySample, RayTraceResult, TraceOptions};
pub use symbolic::{ItineraryWord, KneadingPrefix, Side, SymbolicError};
pub use verify::{BatchConfig, BatchReport, TheoremReport, Verdict, VerifyConfig};
