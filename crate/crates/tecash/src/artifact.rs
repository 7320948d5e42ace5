//! Versioned JSON envelopes around the binary encodings.
//!
//! ```json
//! { "kind": "wallet", "scheme": "compact/v1", "version": 1,
//!   "payload_b64": "...", "body": { "next_index": 0 } }
//! ```
//!
//! `body` is a readable summary. It is never trusted, but a loader refuses a
//! file whose body disagrees with what the payload decodes to.

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tecash_core::codec::{put_bytes, put_u32, put_u64, Decode, Encode, Reader};
use tecash_core::compact::{CompactParams, CompactPayment};
use tecash_core::divisible::{DivisibleAuthorityParams, DivisiblePayment, DivisibleUserParams};
use tecash_core::groups::G1;
use tecash_core::payinfo::provider_of;
use tecash_core::threshold::{AuthorityKeyShare, AuthorityPublicShare, VerificationKey};
use tecash_core::withdraw::{BlindShare, RequestInfo, Scheme, UserKeyPair, Wallet, WithdrawalRequest};

use crate::error::{Error, Result};

pub const VERSION: u32 = 1;
const NO_SCHEME: &str = "none";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArtifactFile {
    pub kind: String,
    pub scheme: String,
    pub version: u32,
    pub payload_b64: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub body: Value,
}

pub trait Artifact: Encode + Decode {
    const KIND: &'static str;

    fn summary(&self) -> Value {
        Value::Null
    }
}

fn scheme_tag(scheme: Option<Scheme>) -> &'static str {
    scheme.map_or(NO_SCHEME, Scheme::tag)
}

impl ArtifactFile {
    pub fn wrap<T: Artifact>(scheme: Option<Scheme>, value: &T) -> Self {
        ArtifactFile {
            kind: T::KIND.into(),
            scheme: scheme_tag(scheme).into(),
            version: VERSION,
            payload_b64: B64.encode(value.to_bytes()),
            body: value.summary(),
        }
    }

    /// Decodes the payload, returning the scheme the file was written for.
    pub fn open<T: Artifact>(&self) -> Result<(Option<Scheme>, T)> {
        if self.kind != T::KIND {
            return Err(Error::Artifact(format!("expected kind {}, found {}", T::KIND, self.kind)));
        }
        if self.version != VERSION {
            return Err(Error::Artifact(format!("unsupported version {}", self.version)));
        }
        let scheme = match self.scheme.as_str() {
            NO_SCHEME => None,
            tag => Some(Scheme::from_tag(tag).ok_or_else(|| Error::Artifact(format!("unknown scheme {tag}")))?),
        };
        let bytes = B64
            .decode(&self.payload_b64)
            .map_err(|e| Error::Artifact(format!("payload is not base64: {e}")))?;
        let value = T::from_bytes(&bytes)?;
        if !self.body.is_null() && self.body != value.summary() {
            return Err(Error::Artifact("body disagrees with payload".into()));
        }
        Ok((scheme, value))
    }

    pub fn expect<T: Artifact>(&self, scheme: Option<Scheme>) -> Result<T> {
        let (found, value) = self.open::<T>()?;
        if scheme.is_some() && found != scheme {
            return Err(Error::Artifact(format!(
                "{} file is for {}, expected {}",
                T::KIND,
                scheme_tag(found),
                scheme_tag(scheme)
            )));
        }
        Ok(value)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub fn save<T: Artifact>(path: &Path, scheme: Option<Scheme>, value: &T) -> Result<()> {
    ArtifactFile::wrap(scheme, value).write(path)
}

pub fn load<T: Artifact>(path: &Path, scheme: Option<Scheme>) -> Result<T> {
    ArtifactFile::read(path)?.expect(scheme)
}

pub fn load_any<T: Artifact>(path: &Path) -> Result<(Option<Scheme>, T)> {
    ArtifactFile::read(path)?.open()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Artifact for CompactParams {
    const KIND: &'static str = "params";

    fn summary(&self) -> Value {
        json!({ "coins": self.coins })
    }
}

impl Artifact for DivisibleUserParams {
    const KIND: &'static str = "params";

    fn summary(&self) -> Value {
        json!({ "coins": self.coins() })
    }
}

impl Artifact for DivisibleAuthorityParams {
    const KIND: &'static str = "params-authority";

    fn summary(&self) -> Value {
        json!({ "coins": self.eta_tilde.len(), "entries": self.entry_count() })
    }
}

/// The verification key plus every authority's public share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKeys {
    pub vk: VerificationKey,
    pub shares: Vec<AuthorityPublicShare>,
}

impl PublicKeys {
    pub fn share(&self, index: u64) -> Option<&AuthorityPublicShare> {
        self.shares.iter().find(|s| s.index == index)
    }
}

impl Encode for PublicKeys {
    fn encode(&self, out: &mut Vec<u8>) {
        self.vk.encode(out);
        put_u32(out, self.shares.len() as u32);
        for s in &self.shares {
            s.encode(out);
        }
    }
}

impl Decode for PublicKeys {
    fn decode(r: &mut Reader<'_>) -> tecash_core::Result<Self> {
        let vk = VerificationKey::decode(r)?;
        let n = r.u32()? as usize;
        if n > r.remaining() / 96 {
            return Err(tecash_core::Error::Decode("share count"));
        }
        let shares = (0..n).map(|_| AuthorityPublicShare::decode(r)).collect::<tecash_core::Result<_>>()?;
        Ok(PublicKeys { vk, shares })
    }
}

impl Artifact for PublicKeys {
    const KIND: &'static str = "vk";

    fn summary(&self) -> Value {
        json!({ "threshold": self.vk.threshold, "authorities": self.shares.len() })
    }
}

impl Artifact for AuthorityKeyShare {
    const KIND: &'static str = "authority-share";

    fn summary(&self) -> Value {
        json!({ "index": self.index })
    }
}

impl Artifact for UserKeyPair {
    const KIND: &'static str = "user-key";

    fn summary(&self) -> Value {
        json!({ "pk": hex(&self.pk.to_bytes()) })
    }
}

/// A withdrawal request together with the public key it is made under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequestFile {
    pub pk: G1,
    pub request: WithdrawalRequest,
}

impl Encode for RequestFile {
    fn encode(&self, out: &mut Vec<u8>) {
        self.pk.encode(out);
        self.request.encode(out);
    }
}

impl Decode for RequestFile {
    fn decode(r: &mut Reader<'_>) -> tecash_core::Result<Self> {
        Ok(RequestFile { pk: G1::decode(r)?, request: WithdrawalRequest::decode(r)? })
    }
}

impl Artifact for RequestFile {
    const KIND: &'static str = "request";
}

impl Artifact for RequestInfo {
    const KIND: &'static str = "request-info";
}

/// One authority's answer to a request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IssuedShare {
    pub index: u64,
    pub share: BlindShare,
}

impl Encode for IssuedShare {
    fn encode(&self, out: &mut Vec<u8>) {
        put_u64(out, self.index);
        self.share.encode(out);
    }
}

impl Decode for IssuedShare {
    fn decode(r: &mut Reader<'_>) -> tecash_core::Result<Self> {
        Ok(IssuedShare { index: r.u64()?, share: BlindShare::decode(r)? })
    }
}

impl Artifact for IssuedShare {
    const KIND: &'static str = "blind-share";

    fn summary(&self) -> Value {
        json!({ "authority": self.index })
    }
}

impl Artifact for Wallet {
    const KIND: &'static str = "wallet";

    fn summary(&self) -> Value {
        json!({ "next_index": self.l })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payment {
    Compact(CompactPayment),
    Divisible(DivisiblePayment),
}

impl Payment {
    pub fn scheme(&self) -> Scheme {
        match self {
            Payment::Compact(_) => Scheme::Compact,
            Payment::Divisible(_) => Scheme::Divisible,
        }
    }

    pub fn value(&self) -> u32 {
        match self {
            Payment::Compact(p) => p.value(),
            Payment::Divisible(p) => p.v,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Payment::Compact(p) => p.to_bytes(),
            Payment::Divisible(p) => p.to_bytes(),
        }
    }

    pub fn from_bytes(scheme: Scheme, bytes: &[u8]) -> tecash_core::Result<Self> {
        Ok(match scheme {
            Scheme::Compact => Payment::Compact(CompactPayment::from_bytes(bytes)?),
            Scheme::Divisible => Payment::Divisible(DivisiblePayment::from_bytes(bytes)?),
        })
    }
}

/// What a user hands a provider: the payment and the info it was made for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaymentFile {
    pub info: Vec<u8>,
    pub payment: Payment,
}

impl Encode for PaymentFile {
    fn encode(&self, out: &mut Vec<u8>) {
        self.payment.scheme().encode(out);
        put_bytes(out, &self.info);
        put_bytes(out, &self.payment.to_bytes());
    }
}

impl Decode for PaymentFile {
    fn decode(r: &mut Reader<'_>) -> tecash_core::Result<Self> {
        let scheme = Scheme::decode(r)?;
        let info = r.bytes()?.to_vec();
        let payment = Payment::from_bytes(scheme, r.bytes()?)?;
        Ok(PaymentFile { info, payment })
    }
}

impl Artifact for PaymentFile {
    const KIND: &'static str = "payment";

    fn summary(&self) -> Value {
        json!({ "provider": provider_of(&self.info), "value": self.payment.value() })
    }
}

/// Registered user identities and their public keys, in search order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    pub users: Vec<(String, G1)>,
}

impl Registry {
    pub fn add(&mut self, id: &str, pk: G1) -> Result<()> {
        if self.users.iter().any(|(u, _)| u == id) {
            return Err(Error::Usage(format!("user {id} is already registered")));
        }
        self.users.push((id.into(), pk));
        Ok(())
    }
}

impl Encode for Registry {
    fn encode(&self, out: &mut Vec<u8>) {
        put_u32(out, self.users.len() as u32);
        for (id, pk) in &self.users {
            put_bytes(out, id.as_bytes());
            pk.encode(out);
        }
    }
}

impl Decode for Registry {
    fn decode(r: &mut Reader<'_>) -> tecash_core::Result<Self> {
        let n = r.u32()? as usize;
        if n > r.remaining() / 52 {
            return Err(tecash_core::Error::Decode("registry size"));
        }
        let mut users = Vec::with_capacity(n);
        for _ in 0..n {
            let id = String::from_utf8(r.bytes()?.to_vec()).map_err(|_| tecash_core::Error::Decode("user id"))?;
            users.push((id, G1::decode(r)?));
        }
        Ok(Registry { users })
    }
}

impl Artifact for Registry {
    const KIND: &'static str = "registry";

    fn summary(&self) -> Value {
        json!({ "users": self.users.iter().map(|(id, _)| id).collect::<Vec<_>>() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use tecash_core::groups::GroupContext;

    #[test]
    fn envelope_checks() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let user = UserKeyPair::generate(&GroupContext::new(), &mut rng);
        let file = ArtifactFile::wrap(None, &user);
        assert_eq!(file.open::<UserKeyPair>().unwrap(), (None, user.clone()));
        assert!(file.open::<Registry>().is_err());

        let mut scheme = file.clone();
        scheme.scheme = Scheme::Compact.tag().into();
        assert!(scheme.expect::<UserKeyPair>(Some(Scheme::Divisible)).is_err());
        assert!(scheme.expect::<UserKeyPair>(Some(Scheme::Compact)).is_ok());

        let mut body = file.clone();
        body.body = json!({ "pk": "00" });
        assert!(body.open::<UserKeyPair>().is_err());
        body.body = Value::Null;
        assert!(body.open::<UserKeyPair>().is_ok());

        let mut version = file.clone();
        version.version = 2;
        assert!(version.open::<UserKeyPair>().is_err());

        let mut payload = file;
        payload.payload_b64.insert(0, '!');
        assert!(payload.open::<UserKeyPair>().is_err());
    }

    #[test]
    fn registry_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let ctx = GroupContext::new();
        let mut reg = Registry::default();
        reg.add("alice", ctx.random_g1(&mut rng)).unwrap();
        reg.add("bob", ctx.random_g1(&mut rng)).unwrap();
        assert!(reg.add("alice", ctx.g).is_err());
        let file = ArtifactFile::wrap(None, &reg);
        assert_eq!(file.open::<Registry>().unwrap().1, reg);
        assert_eq!(file.body, json!({ "users": ["alice", "bob"] }));
    }
}
