//! Divisible scheme: spending `V` coins from level `l` reveals one ElGamal-style
//! pair `φ = (g^{r_1}, ς_l^{sn} η_V^{r_1})` from which the authorities derive
//! all `V` serial numbers `e(ς, g̃)^{sn·y^{l+k}}`. The payment size does not
//! depend on `V`.
//!
//! Parameters split into a user part (linear in `L`) and an authority part
//! holding `η̃_{l,k} = g̃^{−a_l y^k}` (quadratic in `L`).

use alloc::vec::Vec;

use ark_ff::{One, Zero};
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{put_u32, Decode, Encode, Reader};
use crate::compact::{Outcome, Reject};
use crate::error::{Error, Result};
use crate::groups::{
    hash_to_scalar, multi_pairing, pairing, random_nonzero_scalar, random_scalar, GroupContext, Gt, Scalar,
    Transcript, G1, G2,
};
use crate::nizk::{self, Element, Proof, Statement, Term};
use crate::payinfo::provider_of;
use crate::ps::{self, PsSignature};
use crate::sps::{self, SpsPublicKey, SpsSecretKey, SpsSignature};
use crate::threshold::VerificationKey;
use crate::withdraw::{IssuanceParams, Scheme, Wallet};

const SPEND_TAG: &[u8] = b"TECASH-SPEND-DIV";
const R_TAG: &[u8] = b"TECASH-R";
const SPEND_WITNESSES: usize = 15;

/// Per-level material for `l ∈ [1, L]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub eta: G1,
    pub varsigma: G1,
    pub theta: G1,
    pub tau: SpsSignature,
}

/// Pairings of fixed public elements, derived once per parameter set.
#[derive(Clone, Debug, PartialEq, Eq)]
struct PairingCache {
    psi_g: Gt,
    psi_psi: Gt,
    psi_y: Gt,
    psi_w1: Gt,
    psi_w2: Gt,
    g_z: Gt,
    psi_delta: Vec<Gt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibleUserParams {
    pub issuance: IssuanceParams,
    pub eta: G1,
    pub psi: G1,
    pub psi_tilde: G2,
    pub sps_pk: SpsPublicKey,
    /// `levels[l − 1]`
    pub levels: Vec<Level>,
    /// `δ̃_k = g̃^{y^k}` for `k ∈ [0, L−1]`.
    pub delta_tilde: Vec<G2>,
    cache: PairingCache,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibleAuthorityParams {
    /// `eta_tilde[l − 1][k]` for `k ∈ [0, l−1]`.
    pub eta_tilde: Vec<Vec<G2>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibleParams {
    pub user: DivisibleUserParams,
    pub authority: DivisibleAuthorityParams,
}

/// Dealer secrets, kept only so tests can recompute serial numbers directly.
#[derive(Clone, Debug)]
pub struct TestTrapdoors {
    pub y: Scalar,
    pub z: Scalar,
    pub a: Vec<Scalar>,
    pub sps_sk: SpsSecretKey,
}

impl TestTrapdoors {
    /// `e(ς, g̃)^{sn·y^{level}}`
    pub fn serial_oracle(&self, ctx: &GroupContext, sn: &Scalar, level: u32) -> Gt {
        ctx.gt * (self.z * sn * pow(&self.y, level))
    }
}

fn pow(x: &Scalar, e: u32) -> Scalar {
    (0..e).fold(Scalar::one(), |acc, _| acc * x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisiblePayment {
    pub kappa: G2,
    pub sigma: PsSignature,
    pub phi: (G1, G1),
    pub phi_tag: (G1, G1),
    pub varsigma_l: G1,
    pub theta_l: G1,
    pub varsigma_top: G1,
    pub theta_top: G1,
    pub r_top: G1,
    pub s_top: G1,
    pub t_top: G2,
    pub r: Scalar,
    pub proof: Proof,
    pub v: u32,
}

impl DivisibleUserParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        issuance: IssuanceParams,
        eta: G1,
        psi: G1,
        psi_tilde: G2,
        sps_pk: SpsPublicKey,
        levels: Vec<Level>,
        delta_tilde: Vec<G2>,
    ) -> Result<Self> {
        if levels.is_empty() || levels.len() != delta_tilde.len() {
            return Err(Error::ZeroCoins);
        }
        let ctx = &issuance.ctx;
        let cache = PairingCache {
            psi_g: pairing(&psi, &ctx.g_tilde),
            psi_psi: pairing(&psi, &psi_tilde),
            psi_y: pairing(&psi, &sps_pk.y),
            psi_w1: pairing(&psi, &sps_pk.w1),
            psi_w2: pairing(&psi, &sps_pk.w2),
            g_z: pairing(&ctx.g, &sps_pk.z),
            psi_delta: delta_tilde.iter().map(|d| pairing(&psi, d)).collect(),
        };
        Ok(DivisibleUserParams { issuance, eta, psi, psi_tilde, sps_pk, levels, delta_tilde, cache })
    }

    pub fn coins(&self) -> u32 {
        self.levels.len() as u32
    }
}

impl DivisibleAuthorityParams {
    pub fn entry_count(&self) -> usize {
        self.eta_tilde.iter().map(Vec::len).sum()
    }
}

pub fn d_setup<R: RngCore + CryptoRng + ?Sized>(coins: u32, rng: &mut R) -> Result<(DivisibleParams, TestTrapdoors)> {
    if coins == 0 {
        return Err(Error::ZeroCoins);
    }
    let issuance = IssuanceParams::generate(rng);
    let ctx = issuance.ctx.clone();
    let eta = ctx.random_g1(rng);
    let psi = ctx.random_g1(rng);
    let psi_tilde = ctx.random_g2(rng);
    let z = random_nonzero_scalar(rng);
    let y = random_nonzero_scalar(rng);
    let a: Vec<Scalar> = (0..coins).map(|_| random_nonzero_scalar(rng)).collect();
    let (varsigma, theta) = (ctx.g * z, eta * z);
    let (sps_sk, sps_pk) = sps::keygen(&ctx, rng);

    // y_pows[i] = y^i for i ∈ [0, L]
    let mut y_pows = Vec::with_capacity(coins as usize + 1);
    y_pows.push(Scalar::one());
    for i in 0..coins as usize {
        y_pows.push(y_pows[i] * y);
    }
    let levels = (1..=coins as usize)
        .map(|l| {
            let vs = varsigma * y_pows[l];
            let th = theta * y_pows[l];
            Level { eta: ctx.g * a[l - 1], varsigma: vs, theta: th, tau: sps::sign(&ctx, &sps_sk, &vs, &th, rng) }
        })
        .collect();
    let delta_tilde = y_pows[..coins as usize].iter().map(|p| ctx.g_tilde * p).collect();
    let eta_tilde = (1..=coins as usize)
        .map(|l| (0..l).map(|k| ctx.g_tilde * (-a[l - 1] * y_pows[k])).collect())
        .collect();

    let user = DivisibleUserParams::new(issuance, eta, psi, psi_tilde, sps_pk, levels, delta_tilde)?;
    Ok((
        DivisibleParams { user, authority: DivisibleAuthorityParams { eta_tilde } },
        TestTrapdoors { y, z, a, sps_sk },
    ))
}

/// `R = H(payment_info)`
pub fn info_scalar(info: &[u8]) -> Scalar {
    hash_to_scalar(R_TAG, info)
}

fn spend_message(info: &[u8], pay: &DivisiblePayment) -> Vec<u8> {
    let mut t = Transcript::new();
    t.append_bytes(info).append(&pay.sigma).append_u32(pay.v).append(&pay.r);
    t.as_bytes().to_vec()
}

fn spend_statement(p: &DivisibleUserParams, vk: &VerificationKey, pay: &DivisiblePayment, info: &[u8]) -> Result<Statement> {
    let v = pay.v as usize;
    if v == 0 || v > p.levels.len() {
        return Err(Error::SerialRange(pay.v, p.coins()));
    }
    let ctx = &p.issuance.ctx;
    let c = &p.cache;
    let g = Element::G1(ctx.g);
    let psi = Element::G1(p.psi);
    let eta_v = Element::G1(p.levels[v - 1].eta);
    let delta_v = p.delta_tilde[v - 1];

    let mut st = Statement::new(SPEND_TAG);
    let sk = st.witness("sk")?;
    let sn = st.witness("sn")?;
    let r = st.witness("r")?;
    let r1 = st.witness("r1")?;
    let r2 = st.witness("r2")?;
    let rho_sl = st.witness("rho_varsigma_l")?;
    let rho_tl = st.witness("rho_theta_l")?;
    let rho_sv = st.witness("rho_varsigma_top")?;
    let rho_tv = st.witness("rho_theta_top")?;
    let rho_r = st.witness("rho_r")?;
    let rho_s = st.witness("rho_s")?;
    let rho_t = st.witness("rho_t")?;
    let rho1 = st.witness("rho1")?;
    let rho2 = st.witness("rho2")?;
    let rho3 = st.witness("rho3")?;
    let one = Scalar::one();
    let minus = -one;

    st.equation(
        Element::G2(pay.kappa - vk.alpha_tilde),
        alloc::vec![
            Term::new(Element::G2(vk.beta1_tilde), sk),
            Term::new(Element::G2(vk.beta2_tilde), sn),
            Term::new(Element::G2(ctx.g_tilde), r),
        ],
    )?;
    st.equation(Element::G1(pay.phi.0), alloc::vec![Term::new(g, r1)])?;
    st.equation(
        Element::G1(pay.phi.1),
        alloc::vec![Term::new(Element::G1(pay.varsigma_l), sn), Term::new(psi, rho1), Term::new(eta_v, r1)],
    )?;
    st.equation(Element::G1(pay.phi_tag.0), alloc::vec![Term::new(g, r2)])?;
    st.equation(
        Element::G1(pay.phi_tag.1),
        alloc::vec![
            Term::scaled(g, sk, pay.r),
            Term::new(Element::G1(pay.theta_l), sn),
            Term::new(psi, rho2),
            Term::new(eta_v, r2),
        ],
    )?;
    // Level shift by V − 1 for ς and θ.
    st.equation(
        Element::Gt(multi_pairing(&[(pay.varsigma_l, delta_v), (-pay.varsigma_top, ctx.g_tilde)])),
        alloc::vec![
            Term::new(Element::Gt(c.psi_delta[v - 1]), rho_sl),
            Term::scaled(Element::Gt(c.psi_g), rho_sv, minus),
        ],
    )?;
    st.equation(
        Element::Gt(multi_pairing(&[(pay.theta_l, delta_v), (-pay.theta_top, ctx.g_tilde)])),
        alloc::vec![
            Term::new(Element::Gt(c.psi_delta[v - 1]), rho_tl),
            Term::scaled(Element::Gt(c.psi_g), rho_tv, minus),
        ],
    )?;
    // Possession of τ on (ς_{l+V−1}, θ_{l+V−1}).
    let sps_lhs = multi_pairing(&[
        (pay.r_top, p.sps_pk.y),
        (pay.s_top, ctx.g_tilde),
        (pay.varsigma_top, p.sps_pk.w1),
        (pay.theta_top, p.sps_pk.w2),
    ]) - c.g_z;
    st.equation(
        Element::Gt(sps_lhs),
        alloc::vec![
            Term::new(Element::Gt(c.psi_y), rho_r),
            Term::new(Element::Gt(c.psi_g), rho_s),
            Term::new(Element::Gt(c.psi_w1), rho_sv),
            Term::new(Element::Gt(c.psi_w2), rho_tv),
        ],
    )?;
    st.equation(
        Element::Gt(pairing(&pay.r_top, &pay.t_top) - ctx.gt),
        alloc::vec![
            Term::new(Element::Gt(pairing(&pay.r_top, &p.psi_tilde)), rho_t),
            Term::new(Element::Gt(pairing(&p.psi, &pay.t_top)), rho_r),
            Term::scaled(Element::Gt(c.psi_psi), rho3, minus),
        ],
    )?;
    st.set_message(&spend_message(info, pay));
    Ok(st)
}

/// Spends `v` coins starting at the wallet's level `l` (1-based).
pub fn d_spend<R: RngCore + CryptoRng + ?Sized>(
    p: &DivisibleUserParams,
    vk: &VerificationKey,
    user_sk: &Scalar,
    wallet: &Wallet,
    info: &[u8],
    v: u32,
    rng: &mut R,
) -> Result<(Wallet, DivisiblePayment)> {
    wallet.check_scheme(Scheme::Divisible)?;
    if v == 0 {
        return Err(Error::ZeroValue);
    }
    let l = wallet.l;
    if l == 0 || l as u64 + v as u64 - 1 > p.coins() as u64 {
        return Err(Error::InsufficientCoins { requested: v, index: l, capacity: p.coins() });
    }
    if provider_of(info).is_none() {
        return Err(Error::BadPaymentInfo);
    }
    let ctx = &p.issuance.ctx;
    let g = ctx.g;
    let lv = &p.levels[(l - 1) as usize];
    let top = &p.levels[(l + v - 2) as usize];
    let eta_v = p.levels[(v - 1) as usize].eta;
    let sn = wallet.sn;

    let r = random_scalar(rng);
    let (sigma, blind) = ps::randomize(ctx, &wallet.sigma, &r, &random_nonzero_scalar(rng))?;
    let kappa = vk.alpha_tilde + vk.beta1_tilde * user_sk + vk.beta2_tilde * sn + blind;
    let r1 = random_scalar(rng);
    let r2 = random_scalar(rng);
    let big_r = info_scalar(info);
    let phi = (g * r1, lv.varsigma * sn + eta_v * r1);
    let phi_tag = (g * r2, g * (big_r * user_sk) + lv.theta * sn + eta_v * r2);

    let rho: Vec<Scalar> = (0..7).map(|_| random_scalar(rng)).collect();
    let (rho_sl, rho_tl, rho_sv, rho_tv, rho_r, rho_s, rho_t) = (rho[0], rho[1], rho[2], rho[3], rho[4], rho[5], rho[6]);
    let mut pay = DivisiblePayment {
        kappa,
        sigma,
        phi,
        phi_tag,
        varsigma_l: lv.varsigma + p.psi * rho_sl,
        theta_l: lv.theta + p.psi * rho_tl,
        varsigma_top: top.varsigma + p.psi * rho_sv,
        theta_top: top.theta + p.psi * rho_tv,
        r_top: top.tau.r + p.psi * rho_r,
        s_top: top.tau.s + p.psi * rho_s,
        t_top: top.tau.t + p.psi_tilde * rho_t,
        r: big_r,
        proof: Proof { challenge: Scalar::zero(), responses: Vec::new() },
        v,
    };
    let witness = [
        *user_sk,
        sn,
        r,
        r1,
        r2,
        rho_sl,
        rho_tl,
        rho_sv,
        rho_tv,
        rho_r,
        rho_s,
        rho_t,
        -sn * rho_sl,
        -sn * rho_tl,
        rho_r * rho_t,
    ];
    let st = spend_statement(p, vk, &pay, info)?;
    pay.proof = nizk::prove(&st, &witness, rng)?;
    let mut next = wallet.clone();
    next.l += v;
    Ok((next, pay))
}

pub fn d_spend_vf(
    p: &DivisibleUserParams,
    vk: &VerificationKey,
    pay: &DivisiblePayment,
    info: &[u8],
) -> core::result::Result<u32, Reject> {
    if !ps::verify_with_kappa(&p.issuance.ctx, &pay.sigma, &pay.kappa) {
        return Err(Reject::BadSignature);
    }
    if pay.r != info_scalar(info) || provider_of(info).is_none() {
        return Err(Reject::BadInfo);
    }
    let st = spend_statement(p, vk, pay, info).map_err(|_| Reject::BadProof)?;
    if !nizk::verify(&st, &pay.proof) {
        return Err(Reject::BadProof);
    }
    Ok(pay.v)
}

fn derive(params: &DivisibleParams, pair: &(G1, G1), v: u32, k: usize) -> Gt {
    let row = &params.authority.eta_tilde[(v - 1) as usize];
    multi_pairing(&[(pair.1, params.user.delta_tilde[k]), (pair.0, row[k])])
}

fn check_rows(params: &DivisibleParams, v: u32) -> Result<()> {
    let rows = params.authority.eta_tilde.len() as u32;
    if v == 0 || v > rows || v > params.user.coins() {
        return Err(Error::SerialRange(v, rows));
    }
    Ok(())
}

/// `SN_k = e(φ[2], δ̃_k) e(φ[1], η̃_{V,k})` for `k ∈ [0, V−1]`.
pub fn d_serial_numbers(params: &DivisibleParams, pay: &DivisiblePayment) -> Result<Vec<Gt>> {
    check_rows(params, pay.v)?;
    Ok((0..pay.v as usize).map(|k| derive(params, &pay.phi, pay.v, k)).collect())
}

pub fn d_identify(
    params: &DivisibleParams,
    pks: &[G1],
    pay1: &DivisiblePayment,
    pay2: &DivisiblePayment,
    info1: &[u8],
    info2: &[u8],
) -> Result<Outcome> {
    let s1 = d_serial_numbers(params, pay1)?;
    let s2 = d_serial_numbers(params, pay2)?;
    d_identify_with_serials(params, pks, (pay1, &s1, info1), (pay2, &s2, info2))
}

/// As [`d_identify`], reusing serial numbers the caller already derived.
pub fn d_identify_with_serials(
    params: &DivisibleParams,
    pks: &[G1],
    (pay1, s1, info1): (&DivisiblePayment, &[Gt], &[u8]),
    (pay2, s2, info2): (&DivisiblePayment, &[Gt], &[u8]),
) -> Result<Outcome> {
    check_rows(params, pay1.v)?;
    check_rows(params, pay2.v)?;
    let hit = s1
        .iter()
        .enumerate()
        .find_map(|(k1, a)| s2.iter().position(|b| a == b).map(|k2| (k1, k2)));
    let Some((k1, k2)) = hit else {
        return Ok(Outcome::Distinct);
    };
    if info1 == info2 {
        return Ok(Outcome::DoubleDeposit(info1.to_vec()));
    }
    let t1 = derive(params, &pay1.phi_tag, pay1.v, k1);
    let t2 = derive(params, &pay2.phi_tag, pay2.v, k2);
    let target = t1 - t2;
    let dt = &params.user.delta_tilde;
    let q = dt[k1] * pay1.r - dt[k2] * pay2.r;
    Ok(pks
        .iter()
        .find(|pk| pairing(pk, &q) == target)
        .map_or(Outcome::Unknown, |pk| Outcome::Guilty(*pk)))
}

impl Encode for Level {
    fn encode(&self, out: &mut Vec<u8>) {
        self.eta.encode(out);
        self.varsigma.encode(out);
        self.theta.encode(out);
        self.tau.encode(out);
    }
}

impl Decode for Level {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Level {
            eta: G1::decode(r)?,
            varsigma: G1::decode(r)?,
            theta: G1::decode(r)?,
            tau: SpsSignature::decode(r)?,
        })
    }
}

impl Encode for DivisibleUserParams {
    fn encode(&self, out: &mut Vec<u8>) {
        self.issuance.encode(out);
        self.eta.encode(out);
        self.psi.encode(out);
        self.psi_tilde.encode(out);
        self.sps_pk.encode(out);
        put_u32(out, self.levels.len() as u32);
        for l in &self.levels {
            l.encode(out);
        }
        for d in &self.delta_tilde {
            d.encode(out);
        }
    }
}

impl Decode for DivisibleUserParams {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let issuance = IssuanceParams::decode(r)?;
        let eta = G1::decode(r)?;
        let psi = G1::decode(r)?;
        let psi_tilde = G2::decode(r)?;
        let sps_pk = SpsPublicKey::decode(r)?;
        let n = r.u32()? as usize;
        // Each level plus its δ̃ takes 5·48 + 2·96 bytes.
        if n == 0 || n > r.remaining() / (5 * 48 + 2 * 96) {
            return Err(Error::Decode("coin count"));
        }
        let levels = (0..n).map(|_| Level::decode(r)).collect::<Result<_>>()?;
        let delta_tilde = (0..n).map(|_| G2::decode(r)).collect::<Result<_>>()?;
        DivisibleUserParams::new(issuance, eta, psi, psi_tilde, sps_pk, levels, delta_tilde)
    }
}

impl Encode for DivisibleAuthorityParams {
    fn encode(&self, out: &mut Vec<u8>) {
        put_u32(out, self.eta_tilde.len() as u32);
        for row in &self.eta_tilde {
            for e in row {
                e.encode(out);
            }
        }
    }
}

impl Decode for DivisibleAuthorityParams {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let n = r.u32()? as usize;
        if n == 0 || n.saturating_mul(n + 1) / 2 > r.remaining() / 96 {
            return Err(Error::Decode("coin count"));
        }
        let eta_tilde = (1..=n)
            .map(|l| (0..l).map(|_| G2::decode(r)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(DivisibleAuthorityParams { eta_tilde })
    }
}

impl Encode for DivisiblePayment {
    fn encode(&self, out: &mut Vec<u8>) {
        self.kappa.encode(out);
        self.sigma.encode(out);
        self.phi.encode(out);
        self.phi_tag.encode(out);
        self.varsigma_l.encode(out);
        self.theta_l.encode(out);
        self.varsigma_top.encode(out);
        self.theta_top.encode(out);
        self.r_top.encode(out);
        self.s_top.encode(out);
        self.t_top.encode(out);
        self.r.encode(out);
        self.proof.encode(out);
        put_u32(out, self.v);
    }
}

impl Decode for DivisiblePayment {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(DivisiblePayment {
            kappa: G2::decode(r)?,
            sigma: PsSignature::decode(r)?,
            phi: <(G1, G1)>::decode(r)?,
            phi_tag: <(G1, G1)>::decode(r)?,
            varsigma_l: G1::decode(r)?,
            theta_l: G1::decode(r)?,
            varsigma_top: G1::decode(r)?,
            theta_top: G1::decode(r)?,
            r_top: G1::decode(r)?,
            s_top: G1::decode(r)?,
            t_top: G2::decode(r)?,
            r: Scalar::decode(r)?,
            proof: Proof::read(r, SPEND_WITNESSES)?,
            v: r.u32()?,
        })
    }
}
