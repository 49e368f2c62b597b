pub mod cap;
pub mod error;
pub mod harness;
pub mod operators;
pub mod pru;
pub mod schur_weyl;
pub mod symgroup;
pub mod twirls;

pub use error::{LabError, Result};
