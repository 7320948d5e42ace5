#![allow(dead_code)]

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tecash_core::payinfo::PaymentInfo;
use tecash_core::threshold::{ttp_keygen, AuthorityKeyShare, AuthorityPublicShare, VerificationKey};
use tecash_core::withdraw::{create_wallet, request, withdraw, withdraw_vf, IssuanceParams, Scheme, UserKeyPair, Wallet};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn keys(p: &IssuanceParams, t: usize, n: usize, rng: &mut ChaCha20Rng) -> (VerificationKey, Vec<(AuthorityKeyShare, AuthorityPublicShare)>) {
    ttp_keygen(&p.ctx, t, n, rng).unwrap()
}

/// Withdraws one wallet using the first `vk.threshold` authorities.
pub fn issue(
    p: &IssuanceParams,
    scheme: Scheme,
    vk: &VerificationKey,
    shares: &[(AuthorityKeyShare, AuthorityPublicShare)],
    user: &UserKeyPair,
    rng: &mut ChaCha20Rng,
) -> Wallet {
    let (req, info) = request(p, user, rng).unwrap();
    let partials: Vec<_> = shares[..vk.threshold as usize]
        .iter()
        .map(|(sk, pk)| withdraw_vf(p, pk, &user.sk, &withdraw(sk, &req), &info).unwrap())
        .collect();
    create_wallet(p, scheme, vk, &user.sk, &partials).unwrap()
}

pub fn info(provider: &str, rng: &mut ChaCha20Rng) -> Vec<u8> {
    PaymentInfo::new(provider, b"", rng).unwrap().to_bytes()
}
