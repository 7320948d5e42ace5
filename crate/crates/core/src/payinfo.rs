//! Payment information: `[len][provider id][16-byte nonce][memo]`.
//!
//! Every spend proof signs these bytes, so a payment cannot be replayed
//! under another provider's name or with another nonce.

use alloc::string::String;
use alloc::vec::Vec;

use ark_std::rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};

pub const NONCE_LEN: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaymentInfo {
    pub provider: String,
    pub nonce: [u8; NONCE_LEN],
    pub memo: Vec<u8>,
}

impl PaymentInfo {
    pub fn new<R: RngCore + CryptoRng + ?Sized>(provider: &str, memo: &[u8], rng: &mut R) -> Result<Self> {
        if provider.is_empty() || provider.len() > u8::MAX as usize {
            return Err(Error::BadPaymentInfo);
        }
        let mut nonce = [0u8; NONCE_LEN];
        rng.fill_bytes(&mut nonce);
        Ok(PaymentInfo { provider: provider.into(), nonce, memo: memo.to_vec() })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + self.provider.len() + NONCE_LEN + self.memo.len());
        out.push(self.provider.len() as u8);
        out.extend_from_slice(self.provider.as_bytes());
        out.extend_from_slice(&self.nonce);
        out.extend_from_slice(&self.memo);
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let provider = provider_of(bytes).ok_or(Error::BadPaymentInfo)?;
        let rest = &bytes[1 + provider.len()..];
        let mut nonce = [0u8; NONCE_LEN];
        nonce.copy_from_slice(&rest[..NONCE_LEN]);
        Ok(PaymentInfo { provider: provider.into(), nonce, memo: rest[NONCE_LEN..].to_vec() })
    }
}

/// The provider identity a payment info names, if it is well formed.
pub fn provider_of(bytes: &[u8]) -> Option<&str> {
    let (&len, rest) = bytes.split_first()?;
    let len = len as usize;
    if len == 0 || rest.len() < len + NONCE_LEN {
        return None;
    }
    core::str::from_utf8(&rest[..len]).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn round_trip_and_provider_prefix() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let info = PaymentInfo::new("shop-1", b"order 7", &mut rng).unwrap();
        let bytes = info.to_bytes();
        assert_eq!(provider_of(&bytes), Some("shop-1"));
        assert_eq!(PaymentInfo::parse(&bytes).unwrap(), info);
        let other = PaymentInfo::new("shop-1", b"order 7", &mut rng).unwrap();
        assert_ne!(other.to_bytes(), bytes);
    }

    #[test]
    fn malformed_infos() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        assert!(PaymentInfo::new("", b"", &mut rng).is_err());
        assert!(provider_of(&[]).is_none());
        assert!(provider_of(&[0; 20]).is_none());
        // Declared length runs past the nonce.
        assert!(provider_of(&[5, b'a', b'b']).is_none());
        assert!(provider_of(&[1, 0xff, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).is_none());
    }
}
