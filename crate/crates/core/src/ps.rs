//! Pointcheval–Sanders signatures on vectors of scalars.
//!
//! The signing base is supplied by the caller: withdrawal uses `h = H(com)`
//! and the range-proof setup uses a fresh random `g^r` ([`sign`]).

use alloc::vec::Vec;

use ark_ec::PrimeGroup;
use ark_ff::Zero;
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{Decode, Encode, Reader};
use crate::error::{Error, Result};
use crate::groups::{multi_pairing, random_nonzero_scalar, random_scalar, GroupContext, Scalar, G1, G2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsSecretKey {
    pub x: Scalar,
    pub ys: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsPublicKey {
    pub alpha_tilde: G2,
    /// `(g^{y_j}, g̃^{y_j})` per message slot.
    pub betas: Vec<(G1, G2)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PsSignature {
    pub h: G1,
    pub s: G1,
}

impl PsSecretKey {
    pub fn public_key(&self, ctx: &GroupContext) -> PsPublicKey {
        PsPublicKey {
            alpha_tilde: ctx.g_tilde * self.x,
            betas: self.ys.iter().map(|y| (ctx.g * y, ctx.g_tilde * y)).collect(),
        }
    }
}

impl PsPublicKey {
    pub fn message_count(&self) -> usize {
        self.betas.len()
    }

    /// `e(g, β̃_j) = e(β_j, g̃)` for every slot.
    pub fn is_consistent(&self, ctx: &GroupContext) -> bool {
        self.betas
            .iter()
            .all(|(b, bt)| multi_pairing(&[(ctx.g, *bt), (-*b, ctx.g_tilde)]).is_zero())
    }

    /// `α̃ ∏ β̃_j^{m_j}`
    pub fn aggregate_messages(&self, msgs: &[Scalar]) -> Result<G2> {
        check_len(self.betas.len(), msgs.len())?;
        Ok(self
            .betas
            .iter()
            .zip(msgs)
            .fold(self.alpha_tilde, |acc, ((_, bt), m)| acc + *bt * m))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

pub fn keygen<R: RngCore + CryptoRng + ?Sized>(
    ctx: &GroupContext,
    q: usize,
    rng: &mut R,
) -> Result<(PsSecretKey, PsPublicKey)> {
    if q == 0 {
        return Err(Error::EmptyKey);
    }
    let sk = PsSecretKey {
        x: random_scalar(rng),
        ys: (0..q).map(|_| random_scalar(rng)).collect(),
    };
    let pk = sk.public_key(ctx);
    Ok((sk, pk))
}

/// `(h, h^{x + Σ y_j m_j})`
pub fn sign_on_base(sk: &PsSecretKey, h: &G1, msgs: &[Scalar]) -> Result<PsSignature> {
    if h.is_zero() {
        return Err(Error::IdentityBase);
    }
    check_len(sk.ys.len(), msgs.len())?;
    let exponent = sk.ys.iter().zip(msgs).fold(sk.x, |acc, (y, m)| acc + *y * m);
    Ok(PsSignature { h: *h, s: *h * exponent })
}

/// Plain signing with a random base `g^r`.
pub fn sign<R: RngCore + CryptoRng + ?Sized>(
    sk: &PsSecretKey,
    msgs: &[Scalar],
    rng: &mut R,
) -> Result<PsSignature> {
    let h = G1::generator() * random_nonzero_scalar(rng);
    sign_on_base(sk, &h, msgs)
}

/// `h ≠ 1 ∧ e(h, α̃ ∏ β̃_j^{m_j}) = e(s, g̃)`
pub fn verify(ctx: &GroupContext, pk: &PsPublicKey, sig: &PsSignature, msgs: &[Scalar]) -> Result<bool> {
    let kappa = pk.aggregate_messages(msgs)?;
    Ok(verify_with_kappa(ctx, sig, &kappa))
}

/// Verification against an already aggregated `κ`, as used on randomized
/// signatures during spending.
pub fn verify_with_kappa(ctx: &GroupContext, sig: &PsSignature, kappa: &G2) -> bool {
    !sig.h.is_zero() && multi_pairing(&[(sig.h, *kappa), (-sig.s, ctx.g_tilde)]).is_zero()
}

/// Randomizes `σ` into `(h^{r'}, s^{r'} (h^{r'})^r)` and returns the blinding
/// term `g̃^r` that must be folded into `κ`.
pub fn randomize(ctx: &GroupContext, sig: &PsSignature, r: &Scalar, r_prime: &Scalar) -> Result<(PsSignature, G2)> {
    if r_prime.is_zero() {
        return Err(Error::ZeroRandomizer);
    }
    let h = sig.h * r_prime;
    let s = sig.s * r_prime + h * r;
    Ok((PsSignature { h, s }, ctx.g_tilde * r))
}

impl Encode for PsSignature {
    fn encode(&self, out: &mut Vec<u8>) {
        self.h.encode(out);
        self.s.encode(out);
    }
}

impl Decode for PsSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(PsSignature {
            h: G1::decode(r)?,
            s: G1::decode(r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ark_ff::One;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup(q: usize, seed: u64) -> (GroupContext, PsSecretKey, PsPublicKey, ChaCha20Rng) {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (sk, pk) = keygen(&ctx, q, &mut rng).unwrap();
        (ctx, sk, pk, rng)
    }

    #[test]
    fn keygen_is_consistent() {
        let (ctx, _, pk, _) = setup(1, 1);
        assert!(pk.is_consistent(&ctx));
        let mut bad = pk.clone();
        bad.betas[0].0 += ctx.g;
        assert!(!bad.is_consistent(&ctx));
        assert_eq!(keygen(&ctx, 0, &mut ChaCha20Rng::seed_from_u64(0)), Err(Error::EmptyKey));
    }

    #[test]
    fn sign_verify_round_trip_and_cross_key() {
        let (ctx, sk, pk, mut rng) = setup(2, 2);
        let (_, pk2) = keygen(&ctx, 2, &mut rng).unwrap();
        let msgs = [random_scalar(&mut rng), random_scalar(&mut rng)];
        let sig = sign(&sk, &msgs, &mut rng).unwrap();
        assert!(verify(&ctx, &pk, &sig, &msgs).unwrap());
        assert!(!verify(&ctx, &pk2, &sig, &msgs).unwrap());
    }

    #[test]
    fn zero_messages_sign_to_h_x() {
        let (ctx, sk, pk, mut rng) = setup(2, 3);
        let h = ctx.random_g1(&mut rng);
        let zeros = [Scalar::zero(), Scalar::zero()];
        let sig = sign_on_base(&sk, &h, &zeros).unwrap();
        assert_eq!(sig.s, h * sk.x);
        assert!(verify(&ctx, &pk, &sig, &zeros).unwrap());
        // Deterministic for a fixed base.
        assert_eq!(sig, sign_on_base(&sk, &h, &zeros).unwrap());
    }

    #[test]
    fn identity_base_and_length_errors() {
        let (ctx, sk, pk, mut rng) = setup(1, 4);
        let m = [Scalar::one()];
        assert_eq!(sign_on_base(&sk, &G1::zero(), &m), Err(Error::IdentityBase));
        assert!(sign_on_base(&sk, &ctx.g, &[]).is_err());
        let sig = sign(&sk, &m, &mut rng).unwrap();
        assert!(verify(&ctx, &pk, &sig, &[m[0], m[0]]).is_err());
        // h = 1 with s = 1 satisfies the pairing equation trivially.
        let forged = PsSignature { h: G1::zero(), s: G1::zero() };
        assert!(!verify(&ctx, &pk, &forged, &m).unwrap());
    }

    #[test]
    fn single_message_mutation_rejects() {
        let (ctx, sk, pk, mut rng) = setup(3, 5);
        for _ in 0..20 {
            let msgs: Vec<Scalar> = (0..3).map(|_| random_scalar(&mut rng)).collect();
            let sig = sign(&sk, &msgs, &mut rng).unwrap();
            assert!(verify(&ctx, &pk, &sig, &msgs).unwrap());
            for j in 0..3 {
                let mut m = msgs.clone();
                m[j] += Scalar::one();
                assert!(!verify(&ctx, &pk, &sig, &m).unwrap());
            }
        }
    }

    #[test]
    fn randomization() {
        let (ctx, sk, pk, mut rng) = setup(2, 6);
        let msgs = [random_scalar(&mut rng), random_scalar(&mut rng)];
        let sig = sign(&sk, &msgs, &mut rng).unwrap();

        let (same, blind) = randomize(&ctx, &sig, &Scalar::zero(), &Scalar::one()).unwrap();
        assert_eq!(same, sig);
        assert!(blind.is_zero());

        let kappa_base = pk.aggregate_messages(&msgs).unwrap();
        let mut seen = Vec::new();
        for _ in 0..5 {
            let r = random_scalar(&mut rng);
            let rp = random_nonzero_scalar(&mut rng);
            let (sig2, blind) = randomize(&ctx, &sig, &r, &rp).unwrap();
            assert!(verify_with_kappa(&ctx, &sig2, &(kappa_base + blind)));
            // Without the blinding term the equation fails for r ≠ 0.
            assert!(!verify_with_kappa(&ctx, &sig2, &kappa_base));
            assert!(!seen.contains(&sig2));
            seen.push(sig2);
        }
        assert_eq!(randomize(&ctx, &sig, &Scalar::one(), &Scalar::zero()), Err(Error::ZeroRandomizer));
    }
}
