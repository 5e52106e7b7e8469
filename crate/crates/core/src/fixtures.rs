//! Printed coordinate tables, embedded from `fixtures/*.json`.
//!
//! `sigma` is used for evaluation; the others are reference data that the
//! identity-based implementations are compared against.

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

pub const PHI0_JSON: &str = include_str!("../fixtures/phi0.json");
pub const STAR_PHI0_JSON: &str = include_str!("../fixtures/star_phi0.json");
pub const CHI_JSON: &str = include_str!("../fixtures/chi.json");
pub const PSI_JSON: &str = include_str!("../fixtures/psi.json");
pub const SIGMA_JSON: &str = include_str!("../fixtures/sigma.json");

pub fn load<T: DeserializeOwned>(json: &str) -> Result<T> {
    serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
}
