pub mod error;
pub mod exactalg;
pub mod exterior;
pub mod groupcoh;
pub mod input;
pub mod mainthm;
pub mod moyal;
pub mod report;
pub mod spectral;
pub mod torus;

pub use error::{Error, Result};
