//! Type-3 pairing group (BLS12-381), hashing into the group and the scalar
//! field, and the transcript builder used by every Fiat–Shamir hash.

use alloc::vec::Vec;

use ark_bls12_381::{g1, Bls12_381};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::field_hashers::{DefaultFieldHasher, HashToField};
use ark_ff::{Field, UniformRand, Zero};
use ark_std::rand::{CryptoRng, RngCore};
use sha2::Sha256;

use crate::codec::{put_bytes, put_u32, put_u64, Encode};

pub use ark_bls12_381::{Fr as Scalar, G1Affine, G1Projective as G1, G2Affine, G2Projective as G2};
pub type Gt = PairingOutput<Bls12_381>;

/// Public group description shared by every party.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupContext {
    pub g: G1,
    pub g_tilde: G2,
    /// e(g, g̃), cached.
    pub gt: Gt,
}

impl Default for GroupContext {
    fn default() -> Self {
        Self::new()
    }
}

impl GroupContext {
    pub fn new() -> Self {
        let g = G1::generator();
        let g_tilde = G2::generator();
        let gt = pairing(&g, &g_tilde);
        GroupContext { g, g_tilde, gt }
    }

    /// Random generator of G1 (g raised to a random non-zero exponent).
    pub fn random_g1<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> G1 {
        self.g * random_nonzero_scalar(rng)
    }

    pub fn random_g2<R: RngCore + CryptoRng + ?Sized>(&self, rng: &mut R) -> G2 {
        self.g_tilde * random_nonzero_scalar(rng)
    }
}

pub fn pairing(a: &G1, b: &G2) -> Gt {
    Bls12_381::pairing(a.into_affine(), b.into_affine())
}

/// Product of pairings ∏ e(a_i, b_i), sharing one final exponentiation.
pub fn multi_pairing(pairs: &[(G1, G2)]) -> Gt {
    let (a, b): (Vec<G1Affine>, Vec<G2Affine>) = pairs
        .iter()
        .map(|(a, b)| (a.into_affine(), b.into_affine()))
        .unzip();
    Bls12_381::multi_pairing(a, b)
}

pub fn is_identity_g1(p: &G1) -> bool {
    p.is_zero()
}

pub fn random_scalar<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Scalar {
    Scalar::rand(rng)
}

pub fn random_nonzero_scalar<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Scalar {
    loop {
        let s = Scalar::rand(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn invert(s: &Scalar) -> Option<Scalar> {
    s.inverse()
}

/// Hashes into the prime-order subgroup of G1 (SSWU, expand_message_xmd
/// with SHA-256) under `domain_tag`.
pub fn hash_to_g1(domain_tag: &[u8], input: &[u8]) -> G1 {
    assert!(!domain_tag.is_empty(), "hash_to_g1 requires a domain tag");
    let hasher = MapToCurveBasedHasher::<G1, DefaultFieldHasher<Sha256, 128>, WBMap<g1::Config>>::new(
        domain_tag,
    )
    .expect("BLS12-381 G1 map is well-formed");
    let p = hasher
        .hash(input)
        .expect("hashing to the curve is total on BLS12-381");
    debug_assert!(p.is_in_correct_subgroup_assuming_on_curve());
    p.into_group()
}

/// Hashes to a uniform scalar in [0, p) under `domain_tag`.
pub fn hash_to_scalar(domain_tag: &[u8], input: &[u8]) -> Scalar {
    assert!(!domain_tag.is_empty(), "hash_to_scalar requires a domain tag");
    let hasher = <DefaultFieldHasher<Sha256, 128> as HashToField<Scalar>>::new(domain_tag);
    let [s] = hasher.hash_to_field::<1>(input);
    s
}

/// Accumulates canonical encodings in a fixed order; elements are
/// fixed-length, free-form byte strings are length-prefixed.
#[derive(Clone, Debug, Default)]
pub struct Transcript {
    buf: Vec<u8>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append<T: Encode + ?Sized>(&mut self, v: &T) -> &mut Self {
        v.encode(&mut self.buf);
        self
    }

    pub fn append_bytes(&mut self, bytes: &[u8]) -> &mut Self {
        put_bytes(&mut self.buf, bytes);
        self
    }

    pub fn append_u32(&mut self, v: u32) -> &mut Self {
        put_u32(&mut self.buf, v);
        self
    }

    pub fn append_u64(&mut self, v: u64) -> &mut Self {
        put_u64(&mut self.buf, v);
        self
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.buf
    }

    pub fn challenge(&self, domain_tag: &[u8]) -> Scalar {
        hash_to_scalar(domain_tag, &self.buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ff::{BigInteger, One, PrimeField};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn pairing_is_non_degenerate() {
        let ctx = GroupContext::new();
        assert!(!ctx.gt.is_zero());
        // GT has prime order p: gt^p = 1 and gt ≠ 1.
        assert_eq!(ctx.gt * (-Scalar::one()) + ctx.gt, Gt::zero());
    }

    #[test]
    fn bilinearity_on_100_random_pairs() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..100 {
            let a = random_scalar(&mut rng);
            let b = random_scalar(&mut rng);
            assert_eq!(pairing(&(ctx.g * a), &(ctx.g_tilde * b)), ctx.gt * (a * b));
        }
    }

    #[test]
    fn multi_pairing_matches_product() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let pairs: Vec<(G1, G2)> = (0..3)
            .map(|_| (ctx.random_g1(&mut rng), ctx.random_g2(&mut rng)))
            .collect();
        let product = pairs
            .iter()
            .fold(Gt::zero(), |acc, (a, b)| acc + pairing(a, b));
        assert_eq!(multi_pairing(&pairs), product);
    }

    #[test]
    fn hash_to_g1_is_deterministic_and_in_subgroup() {
        let a = hash_to_g1(b"TECASH-H", b"input");
        let b = hash_to_g1(b"TECASH-H", b"input");
        assert_eq!(a, b);
        assert!(a.into_affine().is_in_correct_subgroup_assuming_on_curve());
        assert!(!a.is_zero());
    }

    #[test]
    fn hash_to_g1_no_collisions_on_suffixed_inputs() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let mut collisions = 0;
        for _ in 0..1000 {
            let mut input = [0u8; 24];
            rng.fill_bytes(&mut input);
            let extended = [&input[..], &[0]].concat();
            if hash_to_g1(b"TECASH-H", &input) == hash_to_g1(b"TECASH-H", &extended) {
                collisions += 1;
            }
        }
        assert_eq!(collisions, 0);
    }

    #[test]
    fn hash_to_scalar_domain_separation() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut collisions = 0;
        for _ in 0..1000 {
            let mut input = [0u8; 32];
            rng.fill_bytes(&mut input);
            let a = hash_to_scalar(b"TECASH-A", &input);
            assert_eq!(a, hash_to_scalar(b"TECASH-A", &input));
            if a == hash_to_scalar(b"TECASH-B", &input) {
                collisions += 1;
            }
            // Output is a canonical field element, i.e. below the modulus.
            assert!(a.into_bigint() < Scalar::MODULUS);
            assert_eq!(a.into_bigint().to_bytes_le().len(), 32);
        }
        assert_eq!(collisions, 0);
    }

    #[test]
    fn transcript_is_length_prefixed() {
        let mut a = Transcript::new();
        a.append_bytes(b"ab").append_bytes(b"c");
        let mut b = Transcript::new();
        b.append_bytes(b"a").append_bytes(b"bc");
        assert_ne!(a.as_bytes(), b.as_bytes());
        assert_ne!(a.challenge(b"T"), b.challenge(b"T"));
    }
}
