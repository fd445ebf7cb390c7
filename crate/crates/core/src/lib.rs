//! Numerical laboratory for scale-free unique continuation constants,
//! eigenvalue lifting, Wegner estimates for random breather models, and heat
//! observability costs on boxes Λ_L = (−L/2, L/2)^d.

pub mod analysis;
pub mod breather;
pub mod error;
pub mod fitting;
pub mod grid;
pub mod heat_obs;
pub mod operator;
pub mod potential_model;
pub mod seeding;
pub mod spectral;
pub mod ucp;
pub mod util;
pub mod wegner;

pub use error::{Error, Result};
