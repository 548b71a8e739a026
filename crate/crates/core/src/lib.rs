//! Partial stochastic kernels on finite spaces, empirical measures of
//! concrete sequences, and Monte Carlo checks of the classical limit
//! theorems behind them.

pub mod dist;
pub mod empirical;
pub mod kernel;
pub mod prefix;
pub mod rational;
pub mod rng;
pub mod sequence;
pub mod space;
pub mod verify;

pub use dist::{Dist, GeneratorSpec, NamedSequence};
pub use empirical::{EmpiricalVerdict, HorizonSchedule, Status};
pub use kernel::{KernelError, PartialKernel};
pub use prefix::{SequencePrefix, ValueKind};
pub use rational::Rational;
pub use sequence::{CylinderState, FinitePermutation, MixtureModel};
pub use space::FiniteSpace;
