//! Structure-preserving signatures on two G1 elements (AGHO, a = 2, b = 0).

use alloc::vec::Vec;

use ark_ff::{Field, Zero};
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{Decode, Encode, Reader};
use crate::error::Result;
use crate::groups::{multi_pairing, random_nonzero_scalar, GroupContext, Scalar, G1, G2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpsSecretKey {
    pub y: Scalar,
    pub w1: Scalar,
    pub w2: Scalar,
    pub z: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpsPublicKey {
    pub y: G2,
    pub w1: G2,
    pub w2: G2,
    pub z: G2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpsSignature {
    pub r: G1,
    pub s: G1,
    pub t: G2,
}

pub fn keygen<R: RngCore + CryptoRng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> (SpsSecretKey, SpsPublicKey) {
    let sk = SpsSecretKey {
        y: random_nonzero_scalar(rng),
        w1: random_nonzero_scalar(rng),
        w2: random_nonzero_scalar(rng),
        z: random_nonzero_scalar(rng),
    };
    let pk = SpsPublicKey {
        y: ctx.g_tilde * sk.y,
        w1: ctx.g_tilde * sk.w1,
        w2: ctx.g_tilde * sk.w2,
        z: ctx.g_tilde * sk.z,
    };
    (sk, pk)
}

/// `R = g^r, S = g^{z−ry} m1^{−w1} m2^{−w2}, T = g̃^{1/r}` for random `r ≠ 0`.
pub fn sign<R: RngCore + CryptoRng + ?Sized>(
    ctx: &GroupContext,
    sk: &SpsSecretKey,
    m1: &G1,
    m2: &G1,
    rng: &mut R,
) -> SpsSignature {
    let r = random_nonzero_scalar(rng);
    let r_inv = r.inverse().expect("non-zero");
    SpsSignature {
        r: ctx.g * r,
        s: ctx.g * (sk.z - r * sk.y) - *m1 * sk.w1 - *m2 * sk.w2,
        t: ctx.g_tilde * r_inv,
    }
}

/// `e(R,Y) e(S,g̃) e(m1,W1) e(m2,W2) = e(g,Z)` and `e(R,T) = e(g,g̃)`.
pub fn verify(ctx: &GroupContext, pk: &SpsPublicKey, sig: &SpsSignature, m1: &G1, m2: &G1) -> bool {
    if sig.r.is_zero() {
        return false;
    }
    let first = multi_pairing(&[
        (sig.r, pk.y),
        (sig.s, ctx.g_tilde),
        (*m1, pk.w1),
        (*m2, pk.w2),
        (-ctx.g, pk.z),
    ]);
    let second = multi_pairing(&[(sig.r, sig.t), (-ctx.g, ctx.g_tilde)]);
    first.is_zero() && second.is_zero()
}

impl Encode for SpsSignature {
    fn encode(&self, out: &mut Vec<u8>) {
        self.r.encode(out);
        self.s.encode(out);
        self.t.encode(out);
    }
}

impl Decode for SpsSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(SpsSignature {
            r: G1::decode(r)?,
            s: G1::decode(r)?,
            t: G2::decode(r)?,
        })
    }
}

impl Encode for SpsPublicKey {
    fn encode(&self, out: &mut Vec<u8>) {
        self.y.encode(out);
        self.w1.encode(out);
        self.w2.encode(out);
        self.z.encode(out);
    }
}

impl Decode for SpsPublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(SpsPublicKey {
            y: G2::decode(r)?,
            w1: G2::decode(r)?,
            w2: G2::decode(r)?,
            z: G2::decode(r)?,
        })
    }
}
