//! Compact scheme: a wallet of `L` coins, each spent as its own serial number
//! `S_k = δ^{1/(sn+l_k+1)}` and double-spending tag
//! `T_k = g^{sk + R_k/(sn+l_k+1)}`, with a set-membership proof that the coin
//! index is in `[0, L−1]`.

use alloc::format;
use alloc::vec::Vec;

use ark_ff::{Field, Zero};
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{put_u32, Decode, Encode, Reader};
use crate::error::{Error, Result};
use crate::groups::{hash_to_scalar, random_nonzero_scalar, random_scalar, Scalar, Transcript, G1, G2};
use crate::nizk::{self, Element, Proof, Statement, Term};
use crate::payinfo::provider_of;
use crate::ps::{self, PsPublicKey, PsSignature};
use crate::threshold::VerificationKey;
use crate::withdraw::{IssuanceParams, Scheme, Wallet};

const SPEND_TAG: &[u8] = b"TECASH-SPEND-COMPACT";
const RK_TAG: &[u8] = b"TECASH-RK";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactParams {
    pub issuance: IssuanceParams,
    pub delta: G1,
    pub coins: u32,
    /// Single-message PS key that signed every valid coin index.
    pub range_key: PsPublicKey,
    pub range_sigs: Vec<PsSignature>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinSpend {
    pub serial: G1,
    pub tag: G1,
    pub a: G1,
    pub kappa: G2,
    pub sigma: PsSignature,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactPayment {
    pub kappa: G2,
    pub sigma: PsSignature,
    pub coins: Vec<CoinSpend>,
    pub c: G1,
    pub proof: Proof,
}

impl CompactPayment {
    pub fn value(&self) -> u32 {
        self.coins.len() as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reject {
    BadSignature,
    DuplicateSerial,
    BadProof,
    BadInfo,
}

impl Reject {
    pub fn code(self) -> &'static str {
        match self {
            Reject::BadSignature => "bad-signature",
            Reject::DuplicateSerial => "duplicate-serial",
            Reject::BadProof => "bad-proof",
            Reject::BadInfo => "bad-info",
        }
    }
}

impl core::fmt::Display for Reject {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.code())
    }
}

/// Result of comparing two deposited payments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Distinct,
    DoubleDeposit(Vec<u8>),
    Guilty(G1),
    Unknown,
}

pub fn setup<R: RngCore + CryptoRng + ?Sized>(coins: u32, rng: &mut R) -> Result<CompactParams> {
    if coins == 0 {
        return Err(Error::ZeroCoins);
    }
    let issuance = IssuanceParams::generate(rng);
    let delta = issuance.ctx.random_g1(rng);
    let (sk, range_key) = ps::keygen(&issuance.ctx, 1, rng)?;
    let range_sigs = (0..coins)
        .map(|l| ps::sign(&sk, &[Scalar::from(l)], rng))
        .collect::<Result<_>>()?;
    Ok(CompactParams { issuance, delta, coins, range_key, range_sigs })
}

pub fn coin_rk(info: &[u8], k: u32) -> Scalar {
    let mut buf = info.to_vec();
    buf.extend_from_slice(&(k as u64).to_be_bytes());
    hash_to_scalar(RK_TAG, &buf)
}

fn mu(sn: &Scalar, l: u32) -> Result<Scalar> {
    (*sn + Scalar::from(l) + Scalar::from(1u64)).inverse().ok_or(Error::DegenerateSecret)
}

/// `δ^{1/(sn+l+1)}`
pub fn serial_number(params: &CompactParams, sn: &Scalar, l: u32) -> Result<G1> {
    Ok(params.delta * mu(sn, l)?)
}

fn spend_message(info: &[u8], pay: &CompactPayment) -> Vec<u8> {
    let mut t = Transcript::new();
    t.append_bytes(info).append(&pay.sigma);
    for coin in &pay.coins {
        t.append(&coin.sigma);
    }
    t.as_bytes().to_vec()
}

fn spend_statement(params: &CompactParams, vk: &VerificationKey, pay: &CompactPayment, info: &[u8]) -> Result<Statement> {
    let ctx = &params.issuance.ctx;
    let g = Element::G1(ctx.g);
    let gamma1 = params.issuance.gamma1;
    let (_, beta_sm) = params.range_key.betas[0];

    let mut st = Statement::new(SPEND_TAG);
    let sk = st.witness("sk")?;
    let sn = st.witness("sn")?;
    let r = st.witness("r")?;
    let oc = st.witness("o_c")?;
    st.equation(
        Element::G2(pay.kappa - vk.alpha_tilde),
        alloc::vec![
            Term::new(Element::G2(vk.beta1_tilde), sk),
            Term::new(Element::G2(vk.beta2_tilde), sn),
            Term::new(Element::G2(ctx.g_tilde), r),
        ],
    )?;
    st.equation(Element::G1(pay.c), alloc::vec![Term::new(g, oc), Term::new(Element::G1(gamma1), sn)])?;

    for (k, coin) in pay.coins.iter().enumerate() {
        let lk = st.witness(format!("l_{k}"))?;
        let rk = st.witness(format!("r_{k}"))?;
        let oak = st.witness(format!("o_a_{k}"))?;
        let muk = st.witness(format!("mu_{k}"))?;
        let omuk = st.witness(format!("o_mu_{k}"))?;
        let big_r = coin_rk(info, k as u32);
        st.equation(Element::G1(coin.a), alloc::vec![Term::new(g, oak), Term::new(Element::G1(gamma1), lk)])?;
        st.equation(
            Element::G2(coin.kappa - params.range_key.alpha_tilde),
            alloc::vec![Term::new(Element::G2(beta_sm), lk), Term::new(Element::G2(ctx.g_tilde), rk)],
        )?;
        st.equation(Element::G1(coin.serial), alloc::vec![Term::new(Element::G1(params.delta), muk)])?;
        st.equation(
            Element::G1(gamma1),
            alloc::vec![Term::new(Element::G1(coin.a + pay.c + gamma1), muk), Term::new(g, omuk)],
        )?;
        st.equation(Element::G1(coin.tag), alloc::vec![Term::new(g, sk), Term::scaled(g, muk, big_r)])?;
    }
    st.set_message(&spend_message(info, pay));
    Ok(st)
}

/// Spends `v` coins from `wallet`, returning the advanced wallet.
pub fn spend<R: RngCore + CryptoRng + ?Sized>(
    params: &CompactParams,
    vk: &VerificationKey,
    user_sk: &Scalar,
    wallet: &Wallet,
    info: &[u8],
    v: u32,
    rng: &mut R,
) -> Result<(Wallet, CompactPayment)> {
    wallet.check_scheme(Scheme::Compact)?;
    if v == 0 {
        return Err(Error::ZeroValue);
    }
    if wallet.l as u64 + v as u64 > params.coins as u64 {
        return Err(Error::InsufficientCoins { requested: v, index: wallet.l, capacity: params.coins });
    }
    let indices: Vec<u32> = (wallet.l..wallet.l + v).collect();
    let sigs: Vec<PsSignature> = indices.iter().map(|&l| params.range_sigs[l as usize]).collect();
    let pay = build_payment(params, vk, user_sk, wallet, info, &indices, &sigs, rng)?;
    let mut next = wallet.clone();
    next.l += v;
    Ok((next, pay))
}

#[allow(clippy::too_many_arguments)]
fn build_payment<R: RngCore + CryptoRng + ?Sized>(
    params: &CompactParams,
    vk: &VerificationKey,
    user_sk: &Scalar,
    wallet: &Wallet,
    info: &[u8],
    indices: &[u32],
    range_sigs: &[PsSignature],
    rng: &mut R,
) -> Result<CompactPayment> {
    if provider_of(info).is_none() {
        return Err(Error::BadPaymentInfo);
    }
    let ctx = &params.issuance.ctx;
    let g = ctx.g;
    let gamma1 = params.issuance.gamma1;
    let (_, beta_sm) = params.range_key.betas[0];

    let r = random_scalar(rng);
    let (sigma, blind) = ps::randomize(ctx, &wallet.sigma, &r, &random_nonzero_scalar(rng))?;
    let kappa = vk.alpha_tilde + vk.beta1_tilde * user_sk + vk.beta2_tilde * wallet.sn + blind;
    let oc = random_scalar(rng);
    let c = g * oc + gamma1 * wallet.sn;

    let mut witness = alloc::vec![*user_sk, wallet.sn, r, oc];
    let mut coins = Vec::with_capacity(indices.len());
    for (k, (&lk, sig_l)) in indices.iter().zip(range_sigs).enumerate() {
        let mu_k = mu(&wallet.sn, lk)?;
        let big_r = coin_rk(info, k as u32);
        let oak = random_scalar(rng);
        let omuk = -(oak + oc) * mu_k;
        let rk = random_scalar(rng);
        let (sigma_k, blind_k) = ps::randomize(ctx, sig_l, &rk, &random_nonzero_scalar(rng))?;
        coins.push(CoinSpend {
            serial: params.delta * mu_k,
            tag: g * (*user_sk + big_r * mu_k),
            a: g * oak + gamma1 * Scalar::from(lk),
            kappa: params.range_key.alpha_tilde + beta_sm * Scalar::from(lk) + blind_k,
            sigma: sigma_k,
        });
        witness.extend_from_slice(&[Scalar::from(lk), rk, oak, mu_k, omuk]);
    }
    let mut pay = CompactPayment { kappa, sigma, coins, c, proof: Proof { challenge: Scalar::zero(), responses: Vec::new() } };
    let st = spend_statement(params, vk, &pay, info)?;
    pay.proof = nizk::prove(&st, &witness, rng)?;
    Ok(pay)
}

/// Checks a payment and returns the number of coins it spends.
pub fn spend_vf(
    params: &CompactParams,
    vk: &VerificationKey,
    pay: &CompactPayment,
    info: &[u8],
) -> core::result::Result<u32, Reject> {
    let ctx = &params.issuance.ctx;
    if pay.coins.is_empty() || pay.coins.len() > params.coins as usize {
        return Err(Reject::BadProof);
    }
    if !ps::verify_with_kappa(ctx, &pay.sigma, &pay.kappa) {
        return Err(Reject::BadSignature);
    }
    if !pay.coins.iter().all(|c| ps::verify_with_kappa(ctx, &c.sigma, &c.kappa)) {
        return Err(Reject::BadSignature);
    }
    for (i, a) in pay.coins.iter().enumerate() {
        if pay.coins[i + 1..].iter().any(|b| b.serial == a.serial) {
            return Err(Reject::DuplicateSerial);
        }
    }
    if provider_of(info).is_none() {
        return Err(Reject::BadInfo);
    }
    let st = spend_statement(params, vk, pay, info).map_err(|_| Reject::BadProof)?;
    if !nizk::verify(&st, &pay.proof) {
        return Err(Reject::BadProof);
    }
    Ok(pay.value())
}

/// Recovers `g^{sk}` from two tags on the same serial number.
pub fn recover_key(pay1: &CompactPayment, pay2: &CompactPayment, info1: &[u8], info2: &[u8]) -> Option<G1> {
    for (k, c1) in pay1.coins.iter().enumerate() {
        for (j, c2) in pay2.coins.iter().enumerate() {
            if c1.serial != c2.serial {
                continue;
            }
            let r1 = coin_rk(info1, k as u32);
            let r2 = coin_rk(info2, j as u32);
            let inv = (r1 - r2).inverse()?;
            return Some((c2.tag * r1 - c1.tag * r2) * inv);
        }
    }
    None
}

pub fn shares_serial(pay1: &CompactPayment, pay2: &CompactPayment) -> bool {
    pay1.coins.iter().any(|a| pay2.coins.iter().any(|b| a.serial == b.serial))
}

pub fn identify(pks: &[G1], pay1: &CompactPayment, pay2: &CompactPayment, info1: &[u8], info2: &[u8]) -> Outcome {
    if !shares_serial(pay1, pay2) {
        return Outcome::Distinct;
    }
    if info1 == info2 {
        return Outcome::DoubleDeposit(info1.to_vec());
    }
    match recover_key(pay1, pay2, info1, info2) {
        Some(pk) if pks.contains(&pk) => Outcome::Guilty(pk),
        _ => Outcome::Unknown,
    }
}

/// Spends coin index `L` with the signature on `L − 1`, bypassing the
/// wallet guard. Only for range-enforcement tests.
#[cfg(any(test, feature = "test-hooks"))]
pub fn spend_out_of_range<R: RngCore + CryptoRng + ?Sized>(
    params: &CompactParams,
    vk: &VerificationKey,
    user_sk: &Scalar,
    wallet: &Wallet,
    info: &[u8],
    rng: &mut R,
) -> Result<CompactPayment> {
    let last = *params.range_sigs.last().expect("at least one coin");
    build_payment(params, vk, user_sk, wallet, info, &[params.coins], &[last], rng)
}

impl Encode for CompactParams {
    fn encode(&self, out: &mut Vec<u8>) {
        self.issuance.encode(out);
        self.delta.encode(out);
        put_u32(out, self.coins);
        self.range_key.alpha_tilde.encode(out);
        self.range_key.betas[0].encode(out);
        for s in &self.range_sigs {
            s.encode(out);
        }
    }
}

impl Decode for CompactParams {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let issuance = IssuanceParams::decode(r)?;
        let delta = G1::decode(r)?;
        let coins = r.u32()?;
        if coins == 0 || coins as usize > r.remaining() / 96 {
            return Err(Error::Decode("coin count"));
        }
        let alpha_tilde = G2::decode(r)?;
        let beta = <(G1, G2)>::decode(r)?;
        let range_sigs = (0..coins).map(|_| PsSignature::decode(r)).collect::<Result<_>>()?;
        Ok(CompactParams {
            issuance,
            delta,
            coins,
            range_key: PsPublicKey { alpha_tilde, betas: alloc::vec![beta] },
            range_sigs,
        })
    }
}

impl Encode for CoinSpend {
    fn encode(&self, out: &mut Vec<u8>) {
        self.serial.encode(out);
        self.tag.encode(out);
        self.a.encode(out);
        self.kappa.encode(out);
        self.sigma.encode(out);
    }
}

impl Decode for CoinSpend {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(CoinSpend {
            serial: G1::decode(r)?,
            tag: G1::decode(r)?,
            a: G1::decode(r)?,
            kappa: G2::decode(r)?,
            sigma: PsSignature::decode(r)?,
        })
    }
}

impl Encode for CompactPayment {
    fn encode(&self, out: &mut Vec<u8>) {
        self.kappa.encode(out);
        self.sigma.encode(out);
        put_u32(out, self.coins.len() as u32);
        for c in &self.coins {
            c.encode(out);
        }
        self.c.encode(out);
        self.proof.encode(out);
    }
}

impl Decode for CompactPayment {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let kappa = G2::decode(r)?;
        let sigma = PsSignature::decode(r)?;
        let v = r.u32()? as usize;
        // Five G1 points and one G2 point per coin.
        if v == 0 || v > r.remaining() / (5 * 48 + 96) {
            return Err(Error::Decode("coin count"));
        }
        let coins = (0..v).map(|_| CoinSpend::decode(r)).collect::<Result<_>>()?;
        let c = G1::decode(r)?;
        let proof = Proof::read(r, 4 + 5 * v)?;
        Ok(CompactPayment { kappa, sigma, coins, c, proof })
    }
}

/// Stable key for indexing payments by serial number.
pub fn serial_keys(pay: &CompactPayment) -> Vec<Vec<u8>> {
    pay.coins.iter().map(|c| c.serial.to_bytes()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payinfo::PaymentInfo;
    use crate::threshold::ttp_keygen;
    use crate::withdraw::{create_wallet, request, withdraw, withdraw_vf, UserKeyPair};
    use ark_ff::One;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct Fixture {
        params: CompactParams,
        vk: VerificationKey,
        user: UserKeyPair,
        wallet: Wallet,
        rng: ChaCha20Rng,
    }

    fn fixture(t: usize, n: usize, coins: u32, seed: u64) -> Fixture {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let params = setup(coins, &mut rng).unwrap();
        let p = &params.issuance;
        let (vk, shares) = ttp_keygen(&p.ctx, t, n, &mut rng).unwrap();
        let user = UserKeyPair::generate(&p.ctx, &mut rng);
        let (req, info) = request(p, &user, &mut rng).unwrap();
        let partials: Vec<_> = shares[..t]
            .iter()
            .map(|(sk, pk)| withdraw_vf(p, pk, &user.sk, &withdraw(sk, &req), &info).unwrap())
            .collect();
        let wallet = create_wallet(p, Scheme::Compact, &vk, &user.sk, &partials).unwrap();
        Fixture { params, vk, user, wallet, rng }
    }

    fn info(provider: &str, rng: &mut ChaCha20Rng) -> Vec<u8> {
        PaymentInfo::new(provider, b"", rng).unwrap().to_bytes()
    }

    #[test]
    fn setup_signatures_cover_the_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert_eq!(setup(0, &mut rng), Err(Error::ZeroCoins));
        let one = setup(1, &mut rng).unwrap();
        assert_eq!(one.range_sigs.len(), 1);
        let p = setup(4, &mut rng).unwrap();
        let ctx = &p.issuance.ctx;
        for (l, s) in p.range_sigs.iter().enumerate() {
            assert!(ps::verify(ctx, &p.range_key, s, &[Scalar::from(l as u64)]).unwrap());
        }
        assert_ne!(one.delta, p.delta);
        assert_ne!(one.issuance.gamma1, p.issuance.gamma1);
        assert_eq!(CompactParams::from_bytes(&p.to_bytes()).unwrap(), p);
    }

    #[test]
    fn spend_round_trip_and_boundary() {
        let mut f = fixture(2, 3, 4, 2);
        let i1 = info("shop", &mut f.rng);
        let (w1, pay) = spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i1, 3, &mut f.rng).unwrap();
        assert_eq!(w1.l, 3);
        assert_eq!(spend_vf(&f.params, &f.vk, &pay, &i1), Ok(3));
        assert!(ps::verify_with_kappa(&f.params.issuance.ctx, &pay.sigma, &pay.kappa));
        for (k, coin) in pay.coins.iter().enumerate() {
            assert_eq!(coin.serial, serial_number(&f.params, &f.wallet.sn, k as u32).unwrap());
        }
        assert_eq!(CompactPayment::from_bytes(&pay.to_bytes()).unwrap(), pay);

        let i2 = info("shop", &mut f.rng);
        assert!(matches!(
            spend(&f.params, &f.vk, &f.user.sk, &w1, &i2, 2, &mut f.rng),
            Err(Error::InsufficientCoins { .. })
        ));
        let (w2, _) = spend(&f.params, &f.vk, &f.user.sk, &w1, &i2, 1, &mut f.rng).unwrap();
        assert_eq!(w2.l, 4);
        assert!(spend(&f.params, &f.vk, &f.user.sk, &w2, &i2, 1, &mut f.rng).is_err());
        assert_eq!(spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i2, 0, &mut f.rng).unwrap_err(), Error::ZeroValue);
        assert_eq!(
            spend(&f.params, &f.vk, &f.user.sk, &f.wallet, b"x", 1, &mut f.rng).unwrap_err(),
            Error::BadPaymentInfo
        );

        let mut div = f.wallet.clone();
        div.scheme = Scheme::Divisible;
        assert!(matches!(
            spend(&f.params, &f.vk, &f.user.sk, &div, &i2, 1, &mut f.rng),
            Err(Error::WrongScheme(_))
        ));
    }

    #[test]
    fn full_wallet_in_one_spend() {
        let mut f = fixture(1, 1, 4, 3);
        let i = info("shop", &mut f.rng);
        let (w, pay) = spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i, 4, &mut f.rng).unwrap();
        assert_eq!(w.l, 4);
        assert_eq!(spend_vf(&f.params, &f.vk, &pay, &i), Ok(4));
        assert!(spend(&f.params, &f.vk, &f.user.sk, &w, &i, 1, &mut f.rng).is_err());
    }

    #[test]
    fn verifier_rejections() {
        let mut f = fixture(1, 2, 4, 4);
        let i = info("shop", &mut f.rng);
        let (_, pay) = spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i, 2, &mut f.rng).unwrap();

        let mut dup = pay.clone();
        dup.coins[1].serial = dup.coins[0].serial;
        assert_eq!(spend_vf(&f.params, &f.vk, &dup, &i), Err(Reject::DuplicateSerial));

        let mut other = i.clone();
        *other.last_mut().unwrap() ^= 1;
        assert_eq!(spend_vf(&f.params, &f.vk, &pay, &other), Err(Reject::BadProof));
        assert_eq!(spend_vf(&f.params, &f.vk, &pay, b"zz"), Err(Reject::BadInfo));

        let mut sig = pay.clone();
        sig.sigma.s += f.params.issuance.ctx.g;
        assert_eq!(spend_vf(&f.params, &f.vk, &sig, &i), Err(Reject::BadSignature));
        let mut h_id = pay.clone();
        h_id.sigma.h = G1::zero();
        assert_eq!(spend_vf(&f.params, &f.vk, &h_id, &i), Err(Reject::BadSignature));

        let mut tag = pay.clone();
        tag.coins[0].tag += f.params.issuance.ctx.g;
        assert_eq!(spend_vf(&f.params, &f.vk, &tag, &i), Err(Reject::BadProof));

        let mut resp = pay.clone();
        resp.proof.responses[3] += Scalar::one();
        assert_eq!(spend_vf(&f.params, &f.vk, &resp, &i), Err(Reject::BadProof));
    }

    #[test]
    fn cloned_wallet_is_identified() {
        let mut f = fixture(2, 3, 4, 5);
        let i1 = info("shop-a", &mut f.rng);
        let i2 = info("shop-b", &mut f.rng);
        let (_, p1) = spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i1, 1, &mut f.rng).unwrap();
        let (_, p2) = spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i2, 2, &mut f.rng).unwrap();
        assert_eq!(p1.coins[0].serial, p2.coins[0].serial);
        assert_ne!(p1.coins[0].tag, p2.coins[0].tag);

        let other = UserKeyPair::generate(&f.params.issuance.ctx, &mut f.rng);
        let pks = [other.pk, f.user.pk];
        assert_eq!(identify(&pks, &p1, &p2, &i1, &i2), Outcome::Guilty(f.user.pk));
        assert_eq!(identify(&pks[..1], &p1, &p2, &i1, &i2), Outcome::Unknown);
        assert_eq!(identify(&pks, &p1, &p1, &i1, &i1), Outcome::DoubleDeposit(i1.clone()));

        let (w, _) = spend(&f.params, &f.vk, &f.user.sk, &f.wallet, &i1, 2, &mut f.rng).unwrap();
        let (_, p3) = spend(&f.params, &f.vk, &f.user.sk, &w, &i2, 2, &mut f.rng).unwrap();
        assert_eq!(identify(&pks, &p2, &p3, &i2, &i2), Outcome::Distinct);
    }

    #[test]
    fn range_hook_is_rejected() {
        let mut f = fixture(1, 1, 3, 6);
        let i = info("shop", &mut f.rng);
        let pay = spend_out_of_range(&f.params, &f.vk, &f.user.sk, &f.wallet, &i, &mut f.rng).unwrap();
        assert_eq!(pay.coins.len(), 1);
        assert!(spend_vf(&f.params, &f.vk, &pay, &i).is_err());
    }
}
