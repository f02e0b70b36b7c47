pub mod calculus;
pub mod campaign;
pub mod clifford;
pub mod error;
pub mod fkm;
pub mod linalg;
pub mod morse;
pub mod report;
pub mod rng;
pub mod roots;
pub mod scalar;
pub mod spectra;
pub mod varieties;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CliffordSystem = clifford::CliffordSystem<f64>;
pub type CliffordSphereElement = clifford::CliffordSphereElement<f64>;
pub type FkmGeometry = fkm::FkmGeometry<f64>;
pub type VarietyTag = fkm::VarietyTag<f64>;
pub type TangentFrame = varieties::TangentFrame<f64>;
pub type EigenfunctionSpec = spectra::EigenfunctionSpec<f64>;
pub type CriticalPoint = morse::CriticalPoint<f64>;
pub type Vector = scalar::Vector<f64>;
pub type Matrix = scalar::Matrix<f64>;
