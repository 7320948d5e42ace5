//! Offline anonymous electronic cash with threshold issuance.
//!
//! Two spending schemes share one withdrawal flow: a compact scheme that
//! spends `V` coins as `V` individual serial numbers, and a divisible scheme
//! whose spend size does not depend on `V`. Deposits go to an append-only
//! board that the authority scans for double spending.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod codec;
pub mod commit;
pub mod denom;
pub mod compact;
pub mod divisible;
pub mod error;
pub mod groups;
pub mod ledger;
pub mod nizk;
pub mod payinfo;
pub mod ps;
pub mod sps;
pub mod threshold;
pub mod withdraw;

pub use error::{Error, Result};
