//! Fiat–Shamir proofs of knowledge of discrete-log representations.
//!
//! A [`Statement`] is a conjunction of equations `target = ∏ base_j^{c_j·w_j}`
//! over G1, G2 or GT, all sharing one witness vector and one challenge.
//! Products of witnesses are not supported; callers introduce auxiliary
//! witnesses instead.

use alloc::string::String;
use alloc::vec::Vec;

use ark_ff::{One, Zero};
use ark_std::rand::{CryptoRng, RngCore};

use crate::codec::{put_bytes, put_u32, put_u8, Encode, Reader, Decode};
use crate::error::{Error, Result};
use crate::groups::{hash_to_scalar, random_scalar, Gt, Scalar, G1, G2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Element {
    G1(G1),
    G2(G2),
    Gt(Gt),
}

impl Element {
    fn group_id(&self) -> u8 {
        match self {
            Element::G1(_) => 1,
            Element::G2(_) => 2,
            Element::Gt(_) => 3,
        }
    }

    fn zero_like(&self) -> Element {
        match self {
            Element::G1(_) => Element::G1(G1::zero()),
            Element::G2(_) => Element::G2(G2::zero()),
            Element::Gt(_) => Element::Gt(Gt::zero()),
        }
    }

    fn mul(&self, s: &Scalar) -> Element {
        match self {
            Element::G1(p) => Element::G1(*p * s),
            Element::G2(p) => Element::G2(*p * s),
            Element::Gt(p) => Element::Gt(*p * s),
        }
    }

    fn add(&self, other: &Element) -> Element {
        match (self, other) {
            (Element::G1(a), Element::G1(b)) => Element::G1(*a + b),
            (Element::G2(a), Element::G2(b)) => Element::G2(*a + b),
            (Element::Gt(a), Element::Gt(b)) => Element::Gt(*a + b),
            _ => unreachable!("group mismatch is rejected when the statement is built"),
        }
    }
}

impl Encode for Element {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            Element::G1(p) => p.encode(out),
            Element::G2(p) => p.encode(out),
            Element::Gt(p) => p.encode(out),
        }
    }
}

/// `base^{coeff · w}` for one declared witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub base: Element,
    pub witness: usize,
    pub coeff: Scalar,
}

impl Term {
    pub fn new(base: Element, witness: usize) -> Self {
        Term { base, witness, coeff: Scalar::one() }
    }

    pub fn scaled(base: Element, witness: usize, coeff: Scalar) -> Self {
        Term { base, witness, coeff }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub target: Element,
    pub terms: Vec<Term>,
}

impl Equation {
    fn evaluate(&self, w: &[Scalar]) -> Element {
        self.terms
            .iter()
            .fold(self.target.zero_like(), |acc, t| acc.add(&t.base.mul(&(t.coeff * w[t.witness]))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Statement {
    label: Vec<u8>,
    witnesses: Vec<String>,
    equations: Vec<Equation>,
    message: Vec<u8>,
}

impl Statement {
    /// `label` doubles as the domain tag of the challenge hash.
    pub fn new(label: &[u8]) -> Self {
        Statement { label: label.to_vec(), ..Default::default() }
    }

    /// Declares a witness and returns its index.
    pub fn witness(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if self.witnesses.contains(&name) {
            return Err(Error::MalformedStatement("duplicate witness name"));
        }
        self.witnesses.push(name);
        Ok(self.witnesses.len() - 1)
    }

    pub fn equation(&mut self, target: Element, terms: Vec<Term>) -> Result<()> {
        if terms.is_empty() {
            return Err(Error::MalformedStatement("empty equation"));
        }
        for t in &terms {
            if t.witness >= self.witnesses.len() {
                return Err(Error::MalformedStatement("undeclared witness"));
            }
            if t.base.group_id() != target.group_id() {
                return Err(Error::MalformedStatement("base and target in different groups"));
            }
        }
        self.equations.push(Equation { target, terms });
        Ok(())
    }

    /// Payload signed by the proof.
    pub fn set_message(&mut self, message: &[u8]) {
        self.message = message.to_vec();
    }

    pub fn witness_count(&self) -> usize {
        self.witnesses.len()
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    fn encode_statement(&self, out: &mut Vec<u8>) {
        put_bytes(out, &self.label);
        put_u32(out, self.witnesses.len() as u32);
        for name in &self.witnesses {
            put_bytes(out, name.as_bytes());
        }
        put_u32(out, self.equations.len() as u32);
        for eq in &self.equations {
            put_u8(out, eq.target.group_id());
            eq.target.encode(out);
            put_u32(out, eq.terms.len() as u32);
            for t in &eq.terms {
                t.base.encode(out);
                put_u32(out, t.witness as u32);
                t.coeff.encode(out);
            }
        }
    }

    fn challenge(&self, commitments: &[Element]) -> Scalar {
        let mut buf = Vec::new();
        self.encode_statement(&mut buf);
        for c in commitments {
            c.encode(&mut buf);
        }
        put_bytes(&mut buf, &self.message);
        hash_to_scalar(&self.label, &buf)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub challenge: Scalar,
    pub responses: Vec<Scalar>,
}

impl Proof {
    pub fn encoded_len(witnesses: usize) -> usize {
        crate::codec::SCALAR_LEN * (1 + witnesses)
    }

    /// Reads a proof over `witnesses` responses; the count is not on the wire.
    pub fn read(r: &mut Reader<'_>, witnesses: usize) -> Result<Self> {
        let challenge = Scalar::decode(r)?;
        let responses = (0..witnesses).map(|_| Scalar::decode(r)).collect::<Result<_>>()?;
        Ok(Proof { challenge, responses })
    }
}

impl Encode for Proof {
    fn encode(&self, out: &mut Vec<u8>) {
        self.challenge.encode(out);
        for s in &self.responses {
            s.encode(out);
        }
    }
}

pub fn prove<R: RngCore + CryptoRng + ?Sized>(st: &Statement, witness: &[Scalar], rng: &mut R) -> Result<Proof> {
    if st.equations.is_empty() {
        return Err(Error::MalformedStatement("no equations"));
    }
    if witness.len() != st.witnesses.len() {
        return Err(Error::LengthMismatch { expected: st.witnesses.len(), got: witness.len() });
    }
    for (i, eq) in st.equations.iter().enumerate() {
        if eq.evaluate(witness) != eq.target {
            return Err(Error::UnsatisfiedEquation(i));
        }
    }
    let nonces: Vec<Scalar> = (0..witness.len()).map(|_| random_scalar(rng)).collect();
    let commitments: Vec<Element> = st.equations.iter().map(|eq| eq.evaluate(&nonces)).collect();
    let c = st.challenge(&commitments);
    let responses = nonces.iter().zip(witness).map(|(k, w)| *k - c * w).collect();
    Ok(Proof { challenge: c, responses })
}

pub fn verify(st: &Statement, proof: &Proof) -> bool {
    if st.equations.is_empty() || proof.responses.len() != st.witnesses.len() {
        return false;
    }
    let commitments: Vec<Element> = st
        .equations
        .iter()
        .map(|eq| eq.target.mul(&proof.challenge).add(&eq.evaluate(&proof.responses)))
        .collect();
    st.challenge(&commitments) == proof.challenge
}

/// `base · blinder^rho`, the masked form of a secret base.
pub fn blind_secret_base(base: &Element, rho: &Scalar, blinder: &Element) -> Result<Element> {
    if base.group_id() != blinder.group_id() || matches!(base, Element::Gt(_)) {
        return Err(Error::MismatchedBase);
    }
    Ok(base.add(&blinder.mul(rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{pairing, GroupContext};
    use alloc::format;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn dlog(ctx: &GroupContext, w: Scalar) -> (Statement, Vec<Scalar>) {
        let mut st = Statement::new(b"TEST");
        let x = st.witness("x").unwrap();
        st.equation(Element::G1(ctx.g * w), alloc::vec![Term::new(Element::G1(ctx.g), x)]).unwrap();
        st.set_message(b"hello");
        (st, alloc::vec![w])
    }

    #[test]
    fn single_dlog_round_trip_and_wrong_witness() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let w = random_scalar(&mut rng);
        let (st, wit) = dlog(&ctx, w);
        let proof = prove(&st, &wit, &mut rng).unwrap();
        assert!(verify(&st, &proof));
        assert_eq!(prove(&st, &[w + Scalar::one()], &mut rng), Err(Error::UnsatisfiedEquation(0)));
    }

    #[test]
    fn mixed_group_statement_shares_one_witness() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let w = random_scalar(&mut rng);
        let r = random_scalar(&mut rng);
        let h = ctx.random_g1(&mut rng);
        let mut st = Statement::new(b"TEST");
        let iw = st.witness("w").unwrap();
        let ir = st.witness("r").unwrap();
        st.equation(
            Element::G1(ctx.g * w + h * r),
            alloc::vec![Term::new(Element::G1(ctx.g), iw), Term::new(Element::G1(h), ir)],
        )
        .unwrap();
        st.equation(Element::Gt(ctx.gt * w), alloc::vec![Term::new(Element::Gt(ctx.gt), iw)]).unwrap();
        st.equation(
            Element::G2(ctx.g_tilde * (w * Scalar::from(3u64))),
            alloc::vec![Term::scaled(Element::G2(ctx.g_tilde), iw, Scalar::from(3u64))],
        )
        .unwrap();
        let proof = prove(&st, &[w, r], &mut rng).unwrap();
        assert!(verify(&st, &proof));
    }

    #[test]
    fn malformed_statements_are_rejected() {
        let ctx = GroupContext::new();
        let mut st = Statement::new(b"TEST");
        let x = st.witness("x").unwrap();
        assert!(st.witness("x").is_err());
        assert!(st.equation(Element::G1(ctx.g), alloc::vec![Term::new(Element::G2(ctx.g_tilde), x)]).is_err());
        assert!(st.equation(Element::G1(ctx.g), alloc::vec![Term::new(Element::G1(ctx.g), 5)]).is_err());
        assert!(st.equation(Element::G1(ctx.g), Vec::new()).is_err());
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(prove(&st, &[Scalar::one()], &mut rng).is_err());
    }

    #[test]
    fn tampering_rejects() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let w = random_scalar(&mut rng);
        let (st, wit) = dlog(&ctx, w);
        let proof = prove(&st, &wit, &mut rng).unwrap();

        let mut m = st.clone();
        m.set_message(b"hellp");
        assert!(!verify(&m, &proof));

        let mut lbl = st.clone();
        lbl.label = b"TESU".to_vec();
        assert!(!verify(&lbl, &proof));

        let mut tgt = st.clone();
        tgt.equations[0].target = Element::G1(ctx.g * (w + Scalar::one()));
        assert!(!verify(&tgt, &proof));

        let mut coeff = st.clone();
        coeff.equations[0].terms[0].coeff = Scalar::from(2u64);
        assert!(!verify(&coeff, &proof));

        let mut p = proof.clone();
        p.responses[0] += Scalar::one();
        assert!(!verify(&st, &p));
        let mut p = proof.clone();
        p.challenge += Scalar::one();
        assert!(!verify(&st, &p));
        let mut p = proof.clone();
        p.responses.push(Scalar::one());
        assert!(!verify(&st, &p));

        // Byte-level flips of the serialized proof.
        let bytes = proof.to_bytes();
        for i in (0..bytes.len()).step_by(7) {
            let mut b = bytes.clone();
            b[i] ^= 1 << (i % 8);
            let mut r = Reader::new(&b);
            if let Ok(p) = Proof::read(&mut r, 1) {
                assert!(!verify(&st, &p));
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let ctx = GroupContext::new();
        let w = Scalar::from(42u64);
        let (st, wit) = dlog(&ctx, w);
        let a = prove(&st, &wit, &mut ChaCha20Rng::seed_from_u64(7)).unwrap();
        let b = prove(&st, &wit, &mut ChaCha20Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        let c = prove(&st, &wit, &mut ChaCha20Rng::seed_from_u64(8)).unwrap();
        assert_ne!(a.to_bytes(), c.to_bytes());
        assert_eq!(a.to_bytes().len(), Proof::encoded_len(1));
    }

    #[test]
    fn completeness_on_200_random_statements() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for round in 0..200 {
            let nw = 1 + (rng.next_u32() % 10) as usize;
            let ne = 1 + (rng.next_u32() % 6) as usize;
            let mut st = Statement::new(b"RANDOM");
            for i in 0..nw {
                st.witness(format!("w{i}")).unwrap();
            }
            let wit: Vec<Scalar> = (0..nw).map(|_| random_scalar(&mut rng)).collect();
            for _ in 0..ne {
                let group = rng.next_u32() % 3;
                // GT exponentiations dominate the cost; keep them rarer.
                let group = if group == 2 && round % 4 != 0 { 0 } else { group };
                let nt = 1 + (rng.next_u32() % 3) as usize;
                let terms: Vec<Term> = (0..nt)
                    .map(|_| {
                        let base = match group {
                            0 => Element::G1(ctx.random_g1(&mut rng)),
                            1 => Element::G2(ctx.random_g2(&mut rng)),
                            _ => Element::Gt(ctx.gt * random_scalar(&mut rng)),
                        };
                        let w = (rng.next_u32() as usize) % nw;
                        Term::scaled(base, w, random_scalar(&mut rng))
                    })
                    .collect();
                let target = Equation { target: terms[0].base.zero_like(), terms: terms.clone() }.evaluate(&wit);
                st.equation(target, terms).unwrap();
            }
            let mut msg = [0u8; 16];
            rng.fill_bytes(&mut msg);
            st.set_message(&msg);
            let proof = prove(&st, &wit, &mut rng).unwrap();
            assert!(verify(&st, &proof), "round {round}");
            let mut p = proof.clone();
            let j = (rng.next_u32() as usize) % nw;
            p.responses[j] += Scalar::one();
            // A witness that appears in no equation has an unconstrained response.
            let used = st.equations.iter().any(|e| e.terms.iter().any(|t| t.witness == j));
            assert_eq!(verify(&st, &p), !used);
        }
    }

    #[test]
    fn blinding_identities() {
        let ctx = GroupContext::new();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let psi = ctx.random_g1(&mut rng);
        let psi_t = ctx.random_g2(&mut rng);
        let base = ctx.random_g1(&mut rng);
        assert_eq!(
            blind_secret_base(&Element::G1(base), &Scalar::zero(), &Element::G1(psi)).unwrap(),
            Element::G1(base)
        );
        assert!(blind_secret_base(&Element::G1(base), &Scalar::one(), &Element::G2(psi_t)).is_err());

        let rho = random_scalar(&mut rng);
        let Element::G1(blinded) = blind_secret_base(&Element::G1(base), &rho, &Element::G1(psi)).unwrap() else {
            unreachable!()
        };
        // e(g', g̃) e(ψ, g̃)^{−ρ} = e(g, g̃)
        assert_eq!(
            pairing(&blinded, &ctx.g_tilde) - pairing(&psi, &ctx.g_tilde) * rho,
            pairing(&base, &ctx.g_tilde)
        );

        // Two secret bases: e(g', h̃') e(g', ψ̃)^{−ρ̃} e(ψ, h̃')^{−ρ} e(ψ, ψ̃)^{ρρ̃} = e(g, h̃).
        let base_t = ctx.random_g2(&mut rng);
        let rho_t = random_scalar(&mut rng);
        let Element::G2(blinded_t) = blind_secret_base(&Element::G2(base_t), &rho_t, &Element::G2(psi_t)).unwrap()
        else {
            unreachable!()
        };
        let lhs = pairing(&blinded, &blinded_t) - pairing(&blinded, &psi_t) * rho_t - pairing(&psi, &blinded_t) * rho
            + pairing(&psi, &psi_t) * (rho * rho_t);
        assert_eq!(lhs, pairing(&base, &base_t));
    }
}
