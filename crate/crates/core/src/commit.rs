//! Pedersen commitments over G1.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::groups::{Scalar, G1};

/// Blinding base `g` plus one base per committed message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PedersenParams {
    pub g: G1,
    pub bases: Vec<G1>,
}

impl PedersenParams {
    pub fn new(g: G1, bases: Vec<G1>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(PedersenParams { g, bases })
    }

    /// `g^opening · ∏ bases_i^{msgs_i}`
    pub fn commit(&self, msgs: &[Scalar], opening: &Scalar) -> Result<G1> {
        if msgs.len() != self.bases.len() {
            return Err(Error::LengthMismatch {
                expected: self.bases.len(),
                got: msgs.len(),
            });
        }
        Ok(self
            .bases
            .iter()
            .zip(msgs)
            .fold(self.g * opening, |acc, (b, m)| acc + *b * m))
    }

    pub fn verify(&self, com: &G1, msgs: &[Scalar], opening: &Scalar) -> Result<bool> {
        Ok(self.commit(msgs, opening)? == *com)
    }
}
