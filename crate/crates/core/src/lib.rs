//! S-spectral theory for right-linear operators on ℍⁿ.

pub mod battery;
pub mod browder;
pub mod cmat;
pub mod error;
pub mod oracle;
pub mod qmat;
pub mod quat;
pub mod scalculus;
pub mod spectral;

pub use error::{Error, Result};
pub use qmat::QMatrix;
pub use quat::{Quaternion, SliceUnit, SpherePoint};
