//! Canonical binary encoding.
//!
//! Group elements use their fixed-length compressed forms, scalars are 32
//! little-endian bytes, counters are big-endian and variable-length byte
//! strings carry a 4-byte big-endian length prefix. The same bytes feed every
//! hash transcript and every file format.

use alloc::vec::Vec;

use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};

use crate::error::{Error, Result};
use crate::groups::{Gt, Scalar};
use ark_ec::short_weierstrass::{Affine, Projective, SWCurveConfig};
use ark_ec::{AffineRepr, CurveGroup};

pub const SCALAR_LEN: usize = 32;
pub const G1_LEN: usize = 48;
pub const G2_LEN: usize = 96;
pub const GT_LEN: usize = 576;

/// Types with a fixed canonical byte encoding.
pub trait Encode {
    fn encode(&self, out: &mut Vec<u8>);

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self>;

    /// Decodes a complete buffer, rejecting trailing bytes.
    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Decode("unexpected end of input"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn u64(&mut self) -> Result<u64> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(u64::from_be_bytes(a))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    /// Reads a length-prefixed vector, bounding the count by the bytes left.
    pub fn vec<T: Decode>(&mut self, min_item_len: usize) -> Result<Vec<T>> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_item_len.max(1)) > self.buf.len() {
            return Err(Error::Decode("vector length exceeds input"));
        }
        (0..n).map(|_| T::decode(self)).collect()
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Decode("trailing bytes"))
        }
    }
}

pub fn put_u8(out: &mut Vec<u8>, v: u8) {
    out.push(v);
}

pub fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub fn put_bytes(out: &mut Vec<u8>, v: &[u8]) {
    put_u32(out, v.len() as u32);
    out.extend_from_slice(v);
}

pub fn put_vec<T: Encode>(out: &mut Vec<u8>, items: &[T]) {
    put_u32(out, items.len() as u32);
    for item in items {
        item.encode(out);
    }
}

fn ser<T: CanonicalSerialize>(v: &T, out: &mut Vec<u8>) {
    // Writing into a Vec cannot fail.
    v.serialize_with_mode(out, Compress::Yes)
        .expect("serialization into a vector");
}

fn de<T: CanonicalDeserialize>(bytes: &[u8], what: &'static str) -> Result<T> {
    T::deserialize_with_mode(bytes, Compress::Yes, Validate::Yes).map_err(|_| Error::Decode(what))
}

impl Encode for Scalar {
    fn encode(&self, out: &mut Vec<u8>) {
        ser(self, out)
    }
}

impl Decode for Scalar {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        de(r.take(SCALAR_LEN)?, "non-canonical scalar")
    }
}

// G1 and G2 are written through associated-type aliases that coherence
// cannot tell apart, so both go through one impl over the curve config.
impl<P: SWCurveConfig> Encode for Projective<P> {
    fn encode(&self, out: &mut Vec<u8>) {
        ser(&self.into_affine(), out)
    }
}

impl<P: SWCurveConfig> Decode for Projective<P> {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let len = Affine::<P>::generator().compressed_size();
        de::<Affine<P>>(r.take(len)?, "invalid curve point").map(Into::into)
    }
}

impl Encode for Gt {
    fn encode(&self, out: &mut Vec<u8>) {
        ser(self, out)
    }
}

impl Decode for Gt {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        de(r.take(GT_LEN)?, "invalid GT element")
    }
}

impl<A: Encode, B: Encode> Encode for (A, B) {
    fn encode(&self, out: &mut Vec<u8>) {
        self.0.encode(out);
        self.1.encode(out);
    }
}

impl<A: Decode, B: Decode> Decode for (A, B) {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok((A::decode(r)?, B::decode(r)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{G1, G2};
    use crate::groups::{random_scalar, GroupContext};
    use proptest::prelude::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn fixed_lengths() {
        let ctx = GroupContext::new();
        assert_eq!(Scalar::from(7u64).to_bytes().len(), SCALAR_LEN);
        assert_eq!(ctx.g.to_bytes().len(), G1_LEN);
        assert_eq!(ctx.g_tilde.to_bytes().len(), G2_LEN);
        assert_eq!(ctx.gt.to_bytes().len(), GT_LEN);
    }

    #[test]
    fn round_trip_1000_elements_per_group() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for i in 0..1000 {
            let a = random_scalar(&mut rng);
            assert_eq!(Scalar::from_bytes(&a.to_bytes()).unwrap(), a);
            let p = ctx.g * a;
            assert_eq!(G1::from_bytes(&p.to_bytes()).unwrap(), p);
            // G2/GT exponentiations are costlier; a tenth of the sample
            // still covers every encoding path.
            if i % 10 == 0 {
                let q = ctx.g_tilde * a;
                assert_eq!(G2::from_bytes(&q.to_bytes()).unwrap(), q);
                let t = ctx.gt * a;
                assert_eq!(Gt::from_bytes(&t.to_bytes()).unwrap(), t);
            }
        }
    }

    #[test]
    fn rejects_non_canonical_scalar() {
        // p itself, little-endian: the modulus is not a canonical encoding.
        let mut bytes = (-Scalar::from(1u64)).to_bytes();
        bytes[0] = bytes[0].wrapping_add(1);
        assert!(Scalar::from_bytes(&bytes).is_err());
        assert!(Scalar::from_bytes(&[0xff; 32]).is_err());
    }

    #[test]
    fn rejects_off_curve_points() {
        let ctx = GroupContext::new();
        let mut bytes = ctx.g.to_bytes();
        let mut rejected = 0;
        for b in 0..=255u8 {
            bytes[47] = b;
            if G1::from_bytes(&bytes).is_err() {
                rejected += 1;
            }
        }
        assert!(rejected > 200, "only {rejected} of 256 mutations rejected");
        assert!(G1::from_bytes(&[0xffu8; 48]).is_err());
        assert!(G2::from_bytes(&[0x13u8; 96]).is_err());
        assert!(Gt::from_bytes(&[0x01u8; GT_LEN]).is_err());
    }

    #[test]
    fn rejects_trailing_and_short_input() {
        let mut bytes = Scalar::from(3u64).to_bytes();
        bytes.push(0);
        assert_eq!(Scalar::from_bytes(&bytes), Err(Error::Decode("trailing bytes")));
        assert!(Scalar::from_bytes(&bytes[..10]).is_err());
    }

    proptest! {
        #[test]
        fn length_prefixed_bytes_round_trip(data in proptest::collection::vec(any::<u8>(), 0..300), n in any::<u64>()) {
            let mut out = Vec::new();
            put_bytes(&mut out, &data);
            put_u64(&mut out, n);
            let mut r = Reader::new(&out);
            prop_assert_eq!(r.bytes().unwrap(), &data[..]);
            prop_assert_eq!(r.u64().unwrap(), n);
            prop_assert!(r.finish().is_ok());
        }
    }
}
