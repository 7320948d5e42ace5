//! Threshold withdrawal shared by both schemes: blinded request, per-authority
//! issuance, unblinding and aggregation into a wallet.

use alloc::vec::Vec;

use ark_ff::Zero;
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{put_u32, put_u64, put_u8, Decode, Encode, Reader};
use crate::error::{Error, Result};
use crate::groups::{hash_to_g1, random_nonzero_scalar, random_scalar, GroupContext, Scalar, G1};
use crate::nizk::{self, Element, Proof, Statement, Term};
use crate::ps::{self, PsSignature};
use crate::threshold::{aggregate_signature_shares, AuthorityIndex, AuthorityKeyShare, AuthorityPublicShare, VerificationKey};

const H_TAG: &[u8] = b"TECASH-H";
const REQUEST_TAG: &[u8] = b"TECASH-REQ";
const REQUEST_WITNESSES: usize = 5;

/// The part of either scheme's parameters that withdrawal needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssuanceParams {
    pub ctx: GroupContext,
    pub gamma1: G1,
    pub gamma2: G1,
}

impl IssuanceParams {
    pub fn generate<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Self {
        let ctx = GroupContext::new();
        let gamma1 = ctx.random_g1(rng);
        let gamma2 = ctx.random_g1(rng);
        IssuanceParams { ctx, gamma1, gamma2 }
    }
}

impl Encode for IssuanceParams {
    fn encode(&self, out: &mut Vec<u8>) {
        self.gamma1.encode(out);
        self.gamma2.encode(out);
    }
}

impl Decode for IssuanceParams {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(IssuanceParams {
            ctx: GroupContext::new(),
            gamma1: G1::decode(r)?,
            gamma2: G1::decode(r)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Compact,
    Divisible,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Compact => "compact/v1",
            Scheme::Divisible => "divisible/v1",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Compact => "compact",
            Scheme::Divisible => "divisible",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "compact/v1" | "compact" => Some(Scheme::Compact),
            "divisible/v1" | "divisible" => Some(Scheme::Divisible),
            _ => None,
        }
    }

    /// Index of the first coin in a fresh wallet.
    pub fn first_index(self) -> u32 {
        match self {
            Scheme::Compact => 0,
            Scheme::Divisible => 1,
        }
    }

    fn id(self) -> u8 {
        match self {
            Scheme::Compact => 0,
            Scheme::Divisible => 1,
        }
    }
}

impl Encode for Scheme {
    fn encode(&self, out: &mut Vec<u8>) {
        put_u8(out, self.id());
    }
}

impl Decode for Scheme {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            0 => Ok(Scheme::Compact),
            1 => Ok(Scheme::Divisible),
            _ => Err(Error::Decode("unknown scheme")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserKeyPair {
    pub sk: Scalar,
    pub pk: G1,
}

impl UserKeyPair {
    pub fn generate<R: RngCore + CryptoRng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> Self {
        Self::from_secret(ctx, random_nonzero_scalar(rng))
    }

    pub fn from_secret(ctx: &GroupContext, sk: Scalar) -> Self {
        UserKeyPair { sk, pk: ctx.g * sk }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WithdrawalRequest {
    pub h: G1,
    pub com: G1,
    pub com1: G1,
    pub com2: G1,
    pub proof: Proof,
}

/// Secrets the user keeps until the responses arrive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestInfo {
    pub h: G1,
    pub o1: Scalar,
    pub o2: Scalar,
    pub sn: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlindShare {
    pub h: G1,
    pub c: G1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialWallet {
    pub index: AuthorityIndex,
    pub sigma: PsSignature,
    pub sn: Scalar,
}

/// `σ` on `(sk, sn)` plus the index of the next unspent coin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wallet {
    pub scheme: Scheme,
    pub sigma: PsSignature,
    pub sn: Scalar,
    pub l: u32,
}

fn request_statement(p: &IssuanceParams, req: &WithdrawalRequest, pk: &G1) -> Result<Statement> {
    let g = Element::G1(p.ctx.g);
    let h = Element::G1(req.h);
    let mut st = Statement::new(REQUEST_TAG);
    let m1 = st.witness("m1")?;
    let m2 = st.witness("m2")?;
    let o = st.witness("o")?;
    let o1 = st.witness("o1")?;
    let o2 = st.witness("o2")?;
    st.equation(
        Element::G1(req.com),
        alloc::vec![Term::new(g, o), Term::new(Element::G1(p.gamma1), m1), Term::new(Element::G1(p.gamma2), m2)],
    )?;
    st.equation(Element::G1(*pk), alloc::vec![Term::new(g, m1)])?;
    st.equation(Element::G1(req.com1), alloc::vec![Term::new(g, o1), Term::new(h, m1)])?;
    st.equation(Element::G1(req.com2), alloc::vec![Term::new(g, o2), Term::new(h, m2)])?;
    Ok(st)
}

pub fn request<R: RngCore + CryptoRng + ?Sized>(
    p: &IssuanceParams,
    user: &UserKeyPair,
    rng: &mut R,
) -> Result<(WithdrawalRequest, RequestInfo)> {
    let sn = random_scalar(rng);
    let o = random_scalar(rng);
    let com = p.ctx.g * o + p.gamma1 * user.sk + p.gamma2 * sn;
    let h = hash_to_g1(H_TAG, &com.to_bytes());
    let o1 = random_scalar(rng);
    let o2 = random_scalar(rng);
    let com1 = p.ctx.g * o1 + h * user.sk;
    let com2 = p.ctx.g * o2 + h * sn;
    let mut req = WithdrawalRequest { h, com, com1, com2, proof: Proof { challenge: Scalar::zero(), responses: Vec::new() } };
    let st = request_statement(p, &req, &user.pk)?;
    req.proof = nizk::prove(&st, &[user.sk, sn, o, o1, o2], rng)?;
    Ok((req, RequestInfo { h, o1, o2, sn }))
}

pub fn request_vf(p: &IssuanceParams, req: &WithdrawalRequest, user_pk: &G1) -> bool {
    if hash_to_g1(H_TAG, &req.com.to_bytes()) != req.h {
        return false;
    }
    match request_statement(p, req, user_pk) {
        Ok(st) => nizk::verify(&st, &req.proof),
        Err(_) => false,
    }
}

/// `c = h^{x_i} com_1^{y_{i,1}} com_2^{y_{i,2}}`
pub fn withdraw(share: &AuthorityKeyShare, req: &WithdrawalRequest) -> BlindShare {
    BlindShare {
        h: req.h,
        c: req.h * share.x + req.com1 * share.y1 + req.com2 * share.y2,
    }
}

pub fn withdraw_vf(
    p: &IssuanceParams,
    share: &AuthorityPublicShare,
    user_sk: &Scalar,
    resp: &BlindShare,
    info: &RequestInfo,
) -> Result<PartialWallet> {
    if resp.h != info.h {
        return Err(Error::ResponseMismatch);
    }
    let s = resp.c - share.beta1 * info.o1 - share.beta2 * info.o2;
    let sigma = PsSignature { h: resp.h, s };
    if !ps::verify(&p.ctx, &share.as_ps(), &sigma, &[*user_sk, info.sn])? {
        return Err(Error::ShareInvalid);
    }
    Ok(PartialWallet { index: share.index, sigma, sn: info.sn })
}

/// Aggregates exactly `t` partial wallets into a wallet for `scheme`.
pub fn create_wallet(
    p: &IssuanceParams,
    scheme: Scheme,
    vk: &VerificationKey,
    user_sk: &Scalar,
    partials: &[PartialWallet],
) -> Result<Wallet> {
    if partials.len() != vk.threshold as usize {
        return Err(Error::ShareCount { expected: vk.threshold as usize, got: partials.len() });
    }
    let sn = partials[0].sn;
    if partials.iter().any(|w| w.sn != sn) {
        return Err(Error::MismatchedCoinSecret);
    }
    let indices: Vec<AuthorityIndex> = partials.iter().map(|w| w.index).collect();
    let sigs: Vec<PsSignature> = partials.iter().map(|w| w.sigma).collect();
    let sigma = aggregate_signature_shares(&indices, &sigs)?;
    if !ps::verify(&p.ctx, &vk.as_ps(), &sigma, &[*user_sk, sn])? {
        return Err(Error::AggregateInvalid);
    }
    Ok(Wallet { scheme, sigma, sn, l: scheme.first_index() })
}

impl Wallet {
    pub(crate) fn check_scheme(&self, scheme: Scheme) -> Result<()> {
        if self.scheme != scheme {
            return Err(Error::WrongScheme(self.scheme.name()));
        }
        Ok(())
    }
}

impl Encode for UserKeyPair {
    fn encode(&self, out: &mut Vec<u8>) {
        self.sk.encode(out);
    }
}

impl Decode for UserKeyPair {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(UserKeyPair::from_secret(&GroupContext::new(), Scalar::decode(r)?))
    }
}

impl Encode for WithdrawalRequest {
    fn encode(&self, out: &mut Vec<u8>) {
        self.h.encode(out);
        self.com.encode(out);
        self.com1.encode(out);
        self.com2.encode(out);
        self.proof.encode(out);
    }
}

impl Decode for WithdrawalRequest {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(WithdrawalRequest {
            h: G1::decode(r)?,
            com: G1::decode(r)?,
            com1: G1::decode(r)?,
            com2: G1::decode(r)?,
            proof: Proof::read(r, REQUEST_WITNESSES)?,
        })
    }
}

impl Encode for RequestInfo {
    fn encode(&self, out: &mut Vec<u8>) {
        self.h.encode(out);
        self.o1.encode(out);
        self.o2.encode(out);
        self.sn.encode(out);
    }
}

impl Decode for RequestInfo {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(RequestInfo {
            h: G1::decode(r)?,
            o1: Scalar::decode(r)?,
            o2: Scalar::decode(r)?,
            sn: Scalar::decode(r)?,
        })
    }
}

impl Encode for BlindShare {
    fn encode(&self, out: &mut Vec<u8>) {
        self.h.encode(out);
        self.c.encode(out);
    }
}

impl Decode for BlindShare {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(BlindShare { h: G1::decode(r)?, c: G1::decode(r)? })
    }
}

impl Encode for PartialWallet {
    fn encode(&self, out: &mut Vec<u8>) {
        put_u64(out, self.index);
        self.sigma.encode(out);
        self.sn.encode(out);
    }
}

impl Decode for PartialWallet {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(PartialWallet {
            index: r.u64()?,
            sigma: PsSignature::decode(r)?,
            sn: Scalar::decode(r)?,
        })
    }
}

impl Encode for Wallet {
    fn encode(&self, out: &mut Vec<u8>) {
        self.scheme.encode(out);
        self.sigma.encode(out);
        self.sn.encode(out);
        put_u32(out, self.l);
    }
}

impl Decode for Wallet {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Wallet {
            scheme: Scheme::decode(r)?,
            sigma: PsSignature::decode(r)?,
            sn: Scalar::decode(r)?,
            l: r.u32()?,
        })
    }
}
