pub mod convex;
pub mod curve;
pub mod error;
pub mod geodesic;
pub mod moving;
pub mod par;
pub mod scenario;
pub mod solver;
pub mod verify;

pub use error::SweepError;
