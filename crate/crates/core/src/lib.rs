pub mod applications;
pub mod bounds;
pub mod error;
pub mod optimizer;
pub mod oracle;
pub mod qmat;
pub mod sdp;

pub use error::{Error, Result};
