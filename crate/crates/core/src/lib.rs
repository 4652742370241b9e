//! Exact verification tools for higher-order MDS codes and maximally
//! recoverable tensor codes.

pub mod codes;
pub mod constructions;
pub mod error;
pub mod field;
pub mod hmds;
pub mod io;
pub mod linalg;
pub mod pattern;
pub mod regularity;
pub mod tensor;

pub use codes::LinearCode;
pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use hmds::{MdsCheck, MdsWitness};
pub use linalg::{Matrix, SetFamily};
pub use pattern::ErasurePattern;
pub use tensor::{TensorCode, TensorParams};
