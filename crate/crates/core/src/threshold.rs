//! Trusted-dealer threshold keys for the issuing authorities and Lagrange
//! aggregation of their signature shares.
//!
//! The dealer samples three polynomials `v, w_1, w_2` of degree `t − 1`;
//! authority `i` receives `(v(i), w_1(i), w_2(i))` and the aggregate key is
//! their evaluation at zero, lifted into G2 (and G1 for the betas).

use alloc::vec::Vec;

use ark_ff::{Field, One, Zero};
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{Decode, Encode, Reader};
use crate::error::{Error, Result};
use crate::groups::{multi_pairing, random_scalar, GroupContext, Scalar, G1, G2};
use crate::ps::{PsPublicKey, PsSecretKey, PsSignature};

pub type AuthorityIndex = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthorityKeyShare {
    pub index: AuthorityIndex,
    pub x: Scalar,
    pub y1: Scalar,
    pub y2: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthorityPublicShare {
    pub index: AuthorityIndex,
    pub alpha_tilde: G2,
    pub beta1: G1,
    pub beta1_tilde: G2,
    pub beta2: G1,
    pub beta2_tilde: G2,
}

/// Aggregate issuer key `(α̃, β_1, β̃_1, β_2, β̃_2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationKey {
    pub threshold: u32,
    pub alpha_tilde: G2,
    pub beta1: G1,
    pub beta1_tilde: G2,
    pub beta2: G1,
    pub beta2_tilde: G2,
}

impl AuthorityKeyShare {
    pub fn as_ps(&self) -> PsSecretKey {
        PsSecretKey { x: self.x, ys: alloc::vec![self.y1, self.y2] }
    }

    pub fn public(&self, ctx: &GroupContext) -> AuthorityPublicShare {
        AuthorityPublicShare {
            index: self.index,
            alpha_tilde: ctx.g_tilde * self.x,
            beta1: ctx.g * self.y1,
            beta1_tilde: ctx.g_tilde * self.y1,
            beta2: ctx.g * self.y2,
            beta2_tilde: ctx.g_tilde * self.y2,
        }
    }
}

impl AuthorityPublicShare {
    pub fn as_ps(&self) -> PsPublicKey {
        PsPublicKey {
            alpha_tilde: self.alpha_tilde,
            betas: alloc::vec![(self.beta1, self.beta1_tilde), (self.beta2, self.beta2_tilde)],
        }
    }

    pub fn is_consistent(&self, ctx: &GroupContext) -> bool {
        self.as_ps().is_consistent(ctx)
    }
}

impl VerificationKey {
    pub fn as_ps(&self) -> PsPublicKey {
        PsPublicKey {
            alpha_tilde: self.alpha_tilde,
            betas: alloc::vec![(self.beta1, self.beta1_tilde), (self.beta2, self.beta2_tilde)],
        }
    }

    /// Lagrange interpolation of public shares in the exponent.
    pub fn interpolate(threshold: u32, shares: &[AuthorityPublicShare]) -> Result<Self> {
        let indices: Vec<AuthorityIndex> = shares.iter().map(|s| s.index).collect();
        let coeffs = lagrange_at_zero(&indices)?;
        let mut vk = VerificationKey {
            threshold,
            alpha_tilde: G2::zero(),
            beta1: G1::zero(),
            beta1_tilde: G2::zero(),
            beta2: G1::zero(),
            beta2_tilde: G2::zero(),
        };
        for (s, l) in shares.iter().zip(&coeffs) {
            vk.alpha_tilde += s.alpha_tilde * l;
            vk.beta1 += s.beta1 * l;
            vk.beta1_tilde += s.beta1_tilde * l;
            vk.beta2 += s.beta2 * l;
            vk.beta2_tilde += s.beta2_tilde * l;
        }
        Ok(vk)
    }

    pub fn is_consistent(&self, ctx: &GroupContext) -> bool {
        self.as_ps().is_consistent(ctx)
            && multi_pairing(&[(ctx.g, self.beta1_tilde), (-self.beta1, ctx.g_tilde)]).is_zero()
    }
}

fn eval(coeffs: &[Scalar], at: AuthorityIndex) -> Scalar {
    let x = Scalar::from(at);
    coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
}

/// Dealer key generation for `n` authorities with threshold `t`.
pub fn ttp_keygen<R: RngCore + CryptoRng + ?Sized>(
    ctx: &GroupContext,
    t: usize,
    n: usize,
    rng: &mut R,
) -> Result<(VerificationKey, Vec<(AuthorityKeyShare, AuthorityPublicShare)>)> {
    if t == 0 || t > n {
        return Err(Error::InvalidThreshold { threshold: t, count: n });
    }
    let v: Vec<Scalar> = (0..t).map(|_| random_scalar(rng)).collect();
    let w1: Vec<Scalar> = (0..t).map(|_| random_scalar(rng)).collect();
    let w2: Vec<Scalar> = (0..t).map(|_| random_scalar(rng)).collect();

    let (x, y1, y2) = (v[0], w1[0], w2[0]);
    let vk = VerificationKey {
        threshold: t as u32,
        alpha_tilde: ctx.g_tilde * x,
        beta1: ctx.g * y1,
        beta1_tilde: ctx.g_tilde * y1,
        beta2: ctx.g * y2,
        beta2_tilde: ctx.g_tilde * y2,
    };
    let shares = (1..=n as AuthorityIndex)
        .map(|i| {
            let sk = AuthorityKeyShare {
                index: i,
                x: eval(&v, i),
                y1: eval(&w1, i),
                y2: eval(&w2, i),
            };
            let pk = sk.public(ctx);
            (sk, pk)
        })
        .collect();
    Ok((vk, shares))
}

/// Lagrange basis polynomials evaluated at zero:
/// `l_i = ∏_{j≠i} (0 − j) · ∏_{j≠i} (i − j)^{-1}`.
pub fn lagrange_at_zero(indices: &[AuthorityIndex]) -> Result<Vec<Scalar>> {
    if indices.is_empty() || indices.contains(&0) {
        return Err(Error::BadIndexSet);
    }
    for (a, i) in indices.iter().enumerate() {
        if indices[a + 1..].contains(i) {
            return Err(Error::BadIndexSet);
        }
    }
    Ok(indices
        .iter()
        .map(|&i| {
            let xi = Scalar::from(i);
            let (num, den) = indices.iter().filter(|&&j| j != i).fold(
                (Scalar::one(), Scalar::one()),
                |(num, den), &j| {
                    let xj = Scalar::from(j);
                    (num * -xj, den * (xi - xj))
                },
            );
            num * den.inverse().expect("distinct indices")
        })
        .collect())
}

/// `(h, ∏ s_i^{l_i})` over shares that carry a common `h`.
pub fn aggregate_signature_shares(indices: &[AuthorityIndex], shares: &[PsSignature]) -> Result<PsSignature> {
    if indices.len() != shares.len() || shares.is_empty() {
        return Err(Error::ShareCount { expected: indices.len(), got: shares.len() });
    }
    let h = shares[0].h;
    if shares.iter().any(|s| s.h != h) {
        return Err(Error::MismatchedBase);
    }
    let coeffs = lagrange_at_zero(indices)?;
    let s = shares.iter().zip(&coeffs).fold(G1::zero(), |acc, (sh, l)| acc + sh.s * l);
    Ok(PsSignature { h, s })
}

impl Encode for AuthorityKeyShare {
    fn encode(&self, out: &mut Vec<u8>) {
        crate::codec::put_u64(out, self.index);
        self.x.encode(out);
        self.y1.encode(out);
        self.y2.encode(out);
    }
}

impl Decode for AuthorityKeyShare {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(AuthorityKeyShare {
            index: r.u64()?,
            x: Scalar::decode(r)?,
            y1: Scalar::decode(r)?,
            y2: Scalar::decode(r)?,
        })
    }
}

impl Encode for AuthorityPublicShare {
    fn encode(&self, out: &mut Vec<u8>) {
        crate::codec::put_u64(out, self.index);
        self.alpha_tilde.encode(out);
        self.beta1.encode(out);
        self.beta1_tilde.encode(out);
        self.beta2.encode(out);
        self.beta2_tilde.encode(out);
    }
}

impl Decode for AuthorityPublicShare {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(AuthorityPublicShare {
            index: r.u64()?,
            alpha_tilde: G2::decode(r)?,
            beta1: G1::decode(r)?,
            beta1_tilde: G2::decode(r)?,
            beta2: G1::decode(r)?,
            beta2_tilde: G2::decode(r)?,
        })
    }
}

impl Encode for VerificationKey {
    fn encode(&self, out: &mut Vec<u8>) {
        crate::codec::put_u32(out, self.threshold);
        self.alpha_tilde.encode(out);
        self.beta1.encode(out);
        self.beta1_tilde.encode(out);
        self.beta2.encode(out);
        self.beta2_tilde.encode(out);
    }
}

impl Decode for VerificationKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(VerificationKey {
            threshold: r.u32()?,
            alpha_tilde: G2::decode(r)?,
            beta1: G1::decode(r)?,
            beta1_tilde: G2::decode(r)?,
            beta2: G1::decode(r)?,
            beta2_tilde: G2::decode(r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ps;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn lagrange_small_sets() {
        assert_eq!(lagrange_at_zero(&[1]).unwrap(), alloc::vec![Scalar::one()]);
        // (0−2)/(1−2) = 2 and (0−1)/(2−1) = −1 ≡ p − 1.
        assert_eq!(
            lagrange_at_zero(&[1, 2]).unwrap(),
            alloc::vec![Scalar::from(2u64), -Scalar::one()]
        );
        let l = lagrange_at_zero(&[1, 2, 3]).unwrap();
        assert_eq!(l.iter().sum::<Scalar>(), Scalar::one());
    }

    #[test]
    fn lagrange_rejects_bad_sets() {
        assert_eq!(lagrange_at_zero(&[]), Err(Error::BadIndexSet));
        assert_eq!(lagrange_at_zero(&[1, 1]), Err(Error::BadIndexSet));
        assert_eq!(lagrange_at_zero(&[0, 2]), Err(Error::BadIndexSet));
    }

    #[test]
    fn lagrange_reconstructs_random_polynomials() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for t in 1..6usize {
            let coeffs: Vec<Scalar> = (0..t).map(|_| random_scalar(&mut rng)).collect();
            let idx: Vec<u64> = (1..=t as u64).map(|i| i * 3 + 1).collect();
            let l = lagrange_at_zero(&idx).unwrap();
            assert_eq!(l.iter().sum::<Scalar>(), Scalar::one());
            let at_zero: Scalar = idx.iter().zip(&l).map(|(i, li)| eval(&coeffs, *i) * li).sum();
            assert_eq!(at_zero, coeffs[0]);
        }
    }

    #[test]
    fn keygen_errors() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(ttp_keygen(&ctx, 0, 3, &mut rng).is_err());
        assert!(ttp_keygen(&ctx, 4, 3, &mut rng).is_err());
    }

    #[test]
    fn single_authority_holds_master_key() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (vk, shares) = ttp_keygen(&ctx, 1, 1, &mut rng).unwrap();
        let (_, pubshare) = &shares[0];
        assert_eq!(pubshare.alpha_tilde, vk.alpha_tilde);
        assert_eq!(pubshare.beta2_tilde, vk.beta2_tilde);
        assert!(vk.is_consistent(&ctx));
    }

    #[test]
    fn any_two_of_three_interpolate_the_same_key() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (vk, shares) = ttp_keygen(&ctx, 2, 3, &mut rng).unwrap();
        let pubs: Vec<AuthorityPublicShare> = shares.iter().map(|(_, p)| p.clone()).collect();
        let a = VerificationKey::interpolate(2, &pubs[0..2]).unwrap();
        let b = VerificationKey::interpolate(2, &pubs[1..3]).unwrap();
        assert_eq!(a, vk);
        assert_eq!(b, vk);
        // A single share does not determine the key.
        assert_ne!(VerificationKey::interpolate(2, &pubs[0..1]).unwrap(), vk);
        assert!(pubs.iter().all(|p| p.is_consistent(&ctx)));
    }

    #[test]
    fn aggregated_shares_verify_and_corruption_is_caught() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (vk, shares) = ttp_keygen(&ctx, 3, 5, &mut rng).unwrap();
        let msgs = [random_scalar(&mut rng), random_scalar(&mut rng)];
        let h = ctx.random_g1(&mut rng);
        let sigs: Vec<PsSignature> = shares
            .iter()
            .map(|(sk, _)| ps::sign_on_base(&sk.as_ps(), &h, &msgs).unwrap())
            .collect();

        let agg = aggregate_signature_shares(&[2, 4, 5], &[sigs[1], sigs[3], sigs[4]]).unwrap();
        assert!(ps::verify(&ctx, &vk.as_ps(), &agg, &msgs).unwrap());

        let (other, _) = ps::keygen(&ctx, 2, &mut rng).unwrap();
        let bad = ps::sign_on_base(&other, &h, &msgs).unwrap();
        let agg = aggregate_signature_shares(&[2, 4, 5], &[sigs[1], bad, sigs[4]]).unwrap();
        assert!(!ps::verify(&ctx, &vk.as_ps(), &agg, &msgs).unwrap());

        let mut moved = sigs[3];
        moved.h += ctx.g;
        assert_eq!(
            aggregate_signature_shares(&[2, 4], &[sigs[1], moved]),
            Err(Error::MismatchedBase)
        );
        assert!(aggregate_signature_shares(&[1, 2], &[sigs[0]]).is_err());
    }

    #[test]
    fn single_share_aggregate_is_identity() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (vk, shares) = ttp_keygen(&ctx, 1, 3, &mut rng).unwrap();
        let msgs = [random_scalar(&mut rng), random_scalar(&mut rng)];
        let sig = ps::sign(&shares[2].0.as_ps(), &msgs, &mut rng).unwrap();
        assert_eq!(aggregate_signature_shares(&[3], &[sig]).unwrap(), sig);
        assert!(ps::verify(&ctx, &vk.as_ps(), &sig, &msgs).unwrap());
    }

    #[test]
    fn key_encodings_round_trip() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (vk, shares) = ttp_keygen(&ctx, 2, 2, &mut rng).unwrap();
        assert_eq!(VerificationKey::from_bytes(&vk.to_bytes()).unwrap(), vk);
        let (sk, pk) = &shares[1];
        assert_eq!(&AuthorityKeyShare::from_bytes(&sk.to_bytes()).unwrap(), sk);
        assert_eq!(&AuthorityPublicShare::from_bytes(&pk.to_bytes()).unwrap(), pk);
    }
}
