//! Append-only bulletin board and the authority's deposit verification.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::codec::{put_bytes, put_u64, Decode, Encode, Reader};
use crate::compact::{self, CompactParams, CompactPayment, Outcome};
use crate::divisible::{self, DivisibleParams, DivisiblePayment};
use crate::error::{Error, Result};
use crate::groups::{Gt, G1};
use crate::payinfo::provider_of;
use crate::threshold::VerificationKey;
use crate::withdraw::Scheme;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub index: u64,
    pub provider: String,
    pub scheme: Scheme,
    pub payment: Vec<u8>,
    pub info: Vec<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BulletinBoard {
    entries: Vec<Entry>,
}

impl BulletinBoard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a board from stored entries, which must be numbered 1, 2, ….
    pub fn from_entries(entries: Vec<Entry>) -> Result<Self> {
        if entries.iter().enumerate().any(|(i, e)| e.index != i as u64 + 1) {
            return Err(Error::Decode("board indices are not dense"));
        }
        Ok(BulletinBoard { entries })
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Appends a payment the provider has accepted. The same provider may not
    /// deposit an identical (payment, info) pair twice.
    pub fn deposit(&mut self, provider: &str, scheme: Scheme, payment: &[u8], info: &[u8]) -> Result<u64> {
        let dup = self
            .entries
            .iter()
            .any(|e| e.provider == provider && e.payment == payment && e.info == info);
        if dup {
            return Err(Error::DuplicateDeposit);
        }
        Ok(self.raw_append(provider, scheme, payment, info))
    }

    /// Appends without the local duplicate check, as a misbehaving provider would.
    pub fn raw_append(&mut self, provider: &str, scheme: Scheme, payment: &[u8], info: &[u8]) -> u64 {
        let index = self.len() + 1;
        self.entries.push(Entry {
            index,
            provider: provider.into(),
            scheme,
            payment: payment.to_vec(),
            info: info.to_vec(),
        });
        index
    }

    pub fn read(&self, index: u64) -> Option<&Entry> {
        index.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    /// Concatenated entry encodings; a board's bytes are a prefix of any later state.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for e in &self.entries {
            e.encode(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let mut entries = Vec::new();
        while r.remaining() > 0 {
            entries.push(Entry::decode(&mut r)?);
        }
        Self::from_entries(entries)
    }
}

pub fn bb_read(bb: &BulletinBoard, index: u64) -> Option<&Entry> {
    bb.read(index)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DepositVerdict {
    NoDeposit,
    GuiltyProviders(Vec<String>),
    Cleared,
    GuiltyUser { id: String, pk: G1 },
    Undetected,
}

impl DepositVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            DepositVerdict::NoDeposit => "no-deposit",
            DepositVerdict::GuiltyProviders(_) => "guilty-providers",
            DepositVerdict::Cleared => "cleared",
            DepositVerdict::GuiltyUser { .. } => "guilty-user",
            DepositVerdict::Undetected => "undetected",
        }
    }
}

#[derive(Clone, Debug)]
pub enum SchemeParams {
    Compact(CompactParams),
    Divisible(DivisibleParams),
}

impl SchemeParams {
    pub fn scheme(&self) -> Scheme {
        match self {
            SchemeParams::Compact(_) => Scheme::Compact,
            SchemeParams::Divisible(_) => Scheme::Divisible,
        }
    }
}

#[derive(Clone, Debug)]
enum Accepted {
    Compact(CompactPayment),
    Divisible(DivisiblePayment, Vec<Gt>),
}

#[derive(Clone, Debug)]
struct Verified {
    info: Vec<u8>,
    payment: Accepted,
}

/// Authority-side view of the board: everything up to `cursor` has been
/// checked once and its serial numbers indexed.
#[derive(Clone, Debug)]
pub struct AuthorityState {
    params: SchemeParams,
    vk: VerificationKey,
    cursor: u64,
    verified: BTreeMap<u64, Verified>,
    serials: BTreeMap<Vec<u8>, Vec<u64>>,
    skipped: u64,
}

impl AuthorityState {
    pub fn new(params: SchemeParams, vk: VerificationKey) -> Self {
        AuthorityState {
            params,
            vk,
            cursor: 0,
            verified: BTreeMap::new(),
            serials: BTreeMap::new(),
            skipped: 0,
        }
    }

    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    /// Entries that failed to decode or verify.
    pub fn skipped(&self) -> u64 {
        self.skipped
    }

    pub fn is_verified(&self, index: u64) -> bool {
        self.verified.contains_key(&index)
    }

    /// Scans entries the state has not seen yet, up to `upto`.
    fn sync(&mut self, bb: &BulletinBoard, upto: u64) {
        while self.cursor < upto {
            self.cursor += 1;
            let e = &bb.entries[(self.cursor - 1) as usize];
            match self.check(e) {
                Some((payment, keys)) => {
                    for k in keys {
                        self.serials.entry(k).or_default().push(e.index);
                    }
                    self.verified.insert(e.index, Verified { info: e.info.clone(), payment });
                }
                None => self.skipped += 1,
            }
        }
    }

    fn check(&self, e: &Entry) -> Option<(Accepted, Vec<Vec<u8>>)> {
        if e.scheme != self.params.scheme() {
            return None;
        }
        match &self.params {
            SchemeParams::Compact(p) => {
                let pay = CompactPayment::from_bytes(&e.payment).ok()?;
                compact::spend_vf(p, &self.vk, &pay, &e.info).ok()?;
                let keys = compact::serial_keys(&pay);
                Some((Accepted::Compact(pay), keys))
            }
            SchemeParams::Divisible(p) => {
                let pay = DivisiblePayment::from_bytes(&e.payment).ok()?;
                divisible::d_spend_vf(&p.user, &self.vk, &pay, &e.info).ok()?;
                let sns = divisible::d_serial_numbers(p, &pay).ok()?;
                let keys = sns.iter().map(Encode::to_bytes).collect();
                Some((Accepted::Divisible(pay, sns), keys))
            }
        }
    }

    fn identify(&self, pks: &[G1], a: &Verified, b: &Verified) -> Outcome {
        match (&self.params, &a.payment, &b.payment) {
            (SchemeParams::Compact(_), Accepted::Compact(p1), Accepted::Compact(p2)) => {
                compact::identify(pks, p1, p2, &a.info, &b.info)
            }
            (SchemeParams::Divisible(params), Accepted::Divisible(p1, s1), Accepted::Divisible(p2, s2)) => {
                divisible::d_identify_with_serials(params, pks, (p1, s1, &a.info), (p2, s2, &b.info))
                    .unwrap_or(Outcome::Unknown)
            }
            _ => Outcome::Distinct,
        }
    }
}

/// Outcome for one payment info against the board as it stands now.
pub fn deposit_verify(
    bb: &BulletinBoard,
    state: &mut AuthorityState,
    registry: &[(String, G1)],
    info: &[u8],
) -> DepositVerdict {
    let upto = bb.len();
    state.sync(bb, upto);

    let matches: Vec<&Entry> = bb.entries[..upto as usize].iter().filter(|e| e.info == info).collect();
    let named = provider_of(info);
    match matches.as_slice() {
        [] => DepositVerdict::NoDeposit,
        [only] => {
            if named != Some(only.provider.as_str()) || !state.is_verified(only.index) {
                return DepositVerdict::GuiltyProviders(alloc::vec![only.provider.clone()]);
            }
            check_collisions(state, registry, only.index)
        }
        many => {
            let mut guilty: Vec<String> = Vec::new();
            for e in many {
                let repeats = many.iter().filter(|o| o.provider == e.provider).count() > 1;
                let foreign = named != Some(e.provider.as_str());
                if (repeats || foreign) && !guilty.contains(&e.provider) {
                    guilty.push(e.provider.clone());
                }
            }
            DepositVerdict::GuiltyProviders(guilty)
        }
    }
}

fn check_collisions(state: &AuthorityState, registry: &[(String, G1)], index: u64) -> DepositVerdict {
    let me = &state.verified[&index];
    let pks: Vec<G1> = registry.iter().map(|(_, pk)| *pk).collect();
    let mut others: Vec<u64> = state
        .serials
        .iter()
        .filter(|(_, idx)| idx.contains(&index))
        .flat_map(|(_, idx)| idx.iter().copied())
        .filter(|&i| i != index)
        .collect();
    others.sort_unstable();
    others.dedup();

    let mut collided = false;
    for i in others {
        match state.identify(&pks, me, &state.verified[&i]) {
            Outcome::Guilty(pk) => {
                let id = registry.iter().find(|(_, k)| *k == pk).map(|(id, _)| id.clone()).unwrap_or_default();
                return DepositVerdict::GuiltyUser { id, pk };
            }
            Outcome::Distinct => {}
            Outcome::DoubleDeposit(_) | Outcome::Unknown => collided = true,
        }
    }
    if collided {
        DepositVerdict::Undetected
    } else {
        DepositVerdict::Cleared
    }
}

impl Encode for Entry {
    fn encode(&self, out: &mut Vec<u8>) {
        put_u64(out, self.index);
        put_bytes(out, self.provider.as_bytes());
        self.scheme.encode(out);
        put_bytes(out, &self.payment);
        put_bytes(out, &self.info);
    }
}

impl Decode for Entry {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let index = r.u64()?;
        let provider = String::from_utf8(r.bytes()?.to_vec()).map_err(|_| Error::Decode("provider id"))?;
        Ok(Entry { index, provider, scheme: Scheme::decode(r)?, payment: r.bytes()?.to_vec(), info: r.bytes()?.to_vec() })
    }
}
