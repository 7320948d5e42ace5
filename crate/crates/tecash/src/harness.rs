//! Scripted multi-party runs. Authorities, users, providers and the board talk
//! through encoded messages only; every hop is logged with its length and
//! digest so a run can be compared byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tecash_core::codec::{Decode, Encode};
use tecash_core::ledger::{deposit_verify, AuthorityState, DepositVerdict};
use tecash_core::payinfo::PaymentInfo;
use tecash_core::threshold::{ttp_keygen, AuthorityKeyShare, AuthorityPublicShare, VerificationKey};
use tecash_core::withdraw::{
    create_wallet, request, request_vf, withdraw, withdraw_vf, BlindShare, Scheme, UserKeyPair, Wallet,
    WithdrawalRequest,
};

use crate::artifact::PaymentFile;
use crate::board;
use crate::error::{Error, Result};
use crate::schemes::{parse_scheme, setup, UserParams};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub scheme: String,
    pub threshold: usize,
    pub authorities: usize,
    pub coins: u32,
    pub users: Vec<String>,
    pub providers: Vec<String>,
    /// Users whose keys the authorities can search; all users when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<Vec<String>>,
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Action {
    Withdraw {
        user: String,
        wallet: String,
        /// 1-based authority indices; the first `threshold` when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        authorities: Option<Vec<u64>>,
    },
    CloneWallet {
        from: String,
        to: String,
    },
    Spend {
        wallet: String,
        provider: String,
        value: u32,
        payment: String,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        memo: String,
        #[serde(default, skip_serializing_if = "is_false")]
        expect_error: bool,
    },
    Deposit {
        provider: String,
        payment: String,
        #[serde(default, skip_serializing_if = "is_false")]
        expect_error: bool,
    },
    RawAppend {
        provider: String,
        payment: String,
    },
    Depvf {
        payment: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<Expect>,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Expect {
    NoDeposit,
    Cleared,
    Undetected,
    GuiltyUser { user: String },
    GuiltyProviders { providers: Vec<String> },
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn check(&self) -> Result<()> {
        let users: BTreeSet<&str> = self.users.iter().map(String::as_str).collect();
        let providers: BTreeSet<&str> = self.providers.iter().map(String::as_str).collect();
        let bad = |what: String| Err(Error::Scenario(format!("{}: {what}", self.name)));
        if users.len() != self.users.len() || providers.len() != self.providers.len() {
            return bad("duplicate actor names".into());
        }
        for u in self.registry.iter().flatten() {
            if !users.contains(u.as_str()) {
                return bad(format!("registry names unknown user {u}"));
            }
        }
        for a in &self.actions {
            match a {
                Action::Withdraw { user, .. } if !users.contains(user.as_str()) => return bad(format!("unknown user {user}")),
                Action::Spend { provider, .. } | Action::Deposit { provider, .. } | Action::RawAppend { provider, .. }
                    if !providers.contains(provider.as_str()) =>
                {
                    return bad(format!("unknown provider {provider}"))
                }
                Action::Depvf { expect: Some(Expect::GuiltyUser { user }), .. } if !users.contains(user.as_str()) => {
                    return bad(format!("unknown user {user}"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub transcript: Vec<Value>,
    pub verdicts: Vec<(String, DepositVerdict)>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        self.transcript.iter().map(|v| format!("{v}\n")).collect()
    }
}

struct HeldPayment {
    bytes: Vec<u8>,
    file: PaymentFile,
}

struct Runner<'a> {
    sc: &'a Scenario,
    rng: ChaCha20Rng,
    user_params: UserParams,
    vk: VerificationKey,
    shares: Vec<(AuthorityKeyShare, AuthorityPublicShare)>,
    users: BTreeMap<String, UserKeyPair>,
    wallets: BTreeMap<String, (String, Wallet)>,
    payments: BTreeMap<String, HeldPayment>,
    cloned: BTreeSet<String>,
    board: tecash_core::ledger::BulletinBoard,
    authority: AuthorityState,
    registry: Vec<(String, tecash_core::groups::G1)>,
    report: Report,
    step: usize,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().take(12).map(|b| format!("{b:02x}")).collect()
}

fn verdict_json(v: &DepositVerdict) -> Value {
    match v {
        DepositVerdict::GuiltyProviders(p) => json!({ "verdict": v.name(), "providers": p }),
        DepositVerdict::GuiltyUser { id, .. } => json!({ "verdict": v.name(), "user": id }),
        _ => json!({ "verdict": v.name() }),
    }
}

impl Runner<'_> {
    fn log(&mut self, mut event: Value) {
        event["step"] = json!(self.step);
        self.report.transcript.push(event);
    }

    fn hop(&mut self, from: &str, to: &str, message: &str, bytes: &[u8]) {
        self.log(json!({ "from": from, "to": to, "message": message, "len": bytes.len(), "sha256": digest(bytes) }));
    }

    fn fail(&mut self, why: String) {
        self.log(json!({ "failure": why }));
        self.report.failures.push(format!("step {}: {why}", self.step));
    }

    fn lookup<'m, T>(map: &'m BTreeMap<String, T>, what: &str, name: &str) -> Result<&'m T> {
        map.get(name).ok_or_else(|| Error::Scenario(format!("unknown {what} {name}")))
    }

    fn run(&mut self, action: &Action) -> Result<()> {
        match action {
            Action::Withdraw { user, wallet, authorities } => self.withdraw(user, wallet, authorities.as_deref()),
            Action::CloneWallet { from, to } => {
                let w = Self::lookup(&self.wallets, "wallet", from)?.clone();
                self.cloned.insert(w.0.clone());
                self.log(json!({ "op": "clone-wallet", "from": from, "to": to, "owner": w.0 }));
                self.wallets.insert(to.clone(), w);
                Ok(())
            }
            Action::Spend { wallet, provider, value, payment, memo, expect_error } => {
                self.spend(wallet, provider, *value, payment, memo, *expect_error)
            }
            Action::Deposit { provider, payment, expect_error } => self.deposit(provider, payment, false, *expect_error),
            Action::RawAppend { provider, payment } => self.deposit(provider, payment, true, false),
            Action::Depvf { payment, expect } => self.depvf(payment, expect.as_ref()),
        }
    }

    fn withdraw(&mut self, user: &str, wallet: &str, chosen: Option<&[u64]>) -> Result<()> {
        let kp = Self::lookup(&self.users, "user", user)?.clone();
        let p = self.user_params.issuance().clone();
        let indices: Vec<u64> = match chosen {
            Some(c) => c.to_vec(),
            None => (1..=self.sc.threshold as u64).collect(),
        };
        let (req, info) = request(&p, &kp, &mut self.rng)?;
        let req_bytes = req.to_bytes();
        let mut partials = Vec::new();
        for i in indices {
            let (sk, pk) = self
                .shares
                .iter()
                .find(|(s, _)| s.index == i)
                .cloned()
                .ok_or_else(|| Error::Scenario(format!("no authority {i}")))?;
            let who = format!("authority-{i}");
            self.hop(user, &who, "request", &req_bytes);
            let received = WithdrawalRequest::from_bytes(&req_bytes)?;
            if !request_vf(&p, &received, &kp.pk) {
                self.fail(format!("{who} rejected the request of {user}"));
                return Ok(());
            }
            let share_bytes = withdraw(&sk, &received).to_bytes();
            self.hop(&who, user, "blind-share", &share_bytes);
            partials.push(withdraw_vf(&p, &pk, &kp.sk, &BlindShare::from_bytes(&share_bytes)?, &info)?);
        }
        let w = create_wallet(&p, self.user_params.scheme(), &self.vk, &kp.sk, &partials)?;
        self.log(json!({ "op": "withdraw", "user": user, "wallet": wallet, "next_index": w.l }));
        self.wallets.insert(wallet.into(), (user.into(), w));
        Ok(())
    }

    fn spend(&mut self, wallet: &str, provider: &str, v: u32, name: &str, memo: &str, expect_error: bool) -> Result<()> {
        let (owner, w) = Self::lookup(&self.wallets, "wallet", wallet)?.clone();
        let sk = self.users[&owner].sk;
        let info = PaymentInfo::new(provider, memo.as_bytes(), &mut self.rng)?.to_bytes();
        let mut nym = [0u8; 6];
        self.rng.fill_bytes(&mut nym);
        let nym = format!("nym-{}", digest(&nym));
        let spent = self.user_params.spend(&self.vk, &sk, &w, &info, v, &mut self.rng);
        let (next, payment) = match (spent, expect_error) {
            (Ok(ok), false) => ok,
            (Err(e), true) => {
                self.log(json!({ "op": "spend", "wallet": wallet, "value": v, "refused": e.to_string() }));
                return Ok(());
            }
            (Ok(_), true) => {
                self.fail(format!("spend of {v} from {wallet} should have been refused"));
                return Ok(());
            }
            (Err(e), false) => return Err(e),
        };
        self.wallets.insert(wallet.into(), (owner, next));
        let bytes = PaymentFile { info, payment }.to_bytes();
        self.hop(&nym, provider, "payment", &bytes);
        let file = PaymentFile::from_bytes(&bytes)?;
        match self.user_params.verify(&self.vk, &file.payment, &file.info) {
            Ok(got) => {
                self.log(json!({ "op": "spend-vf", "provider": provider, "payment": name, "value": got }));
                self.payments.insert(name.into(), HeldPayment { bytes, file });
            }
            Err(r) => self.fail(format!("{provider} rejected payment {name}: {}", r.code())),
        }
        Ok(())
    }

    fn deposit(&mut self, provider: &str, name: &str, raw: bool, expect_error: bool) -> Result<()> {
        let held = Self::lookup(&self.payments, "payment", name)?;
        let file = PaymentFile::from_bytes(&held.bytes)?;
        let payment = file.payment.to_bytes();
        let scheme = file.payment.scheme();
        let bytes = held.bytes.clone();
        self.hop(provider, "board", if raw { "raw-append" } else { "deposit" }, &bytes);
        let res = if raw {
            Ok(self.board.raw_append(provider, scheme, &payment, &file.info))
        } else {
            self.board.deposit(provider, scheme, &payment, &file.info)
        };
        match (res, expect_error) {
            (Ok(index), false) => self.log(json!({ "op": "deposit", "provider": provider, "payment": name, "index": index })),
            (Err(e), true) => self.log(json!({ "op": "deposit", "provider": provider, "payment": name, "refused": e.to_string() })),
            (Ok(_), true) => self.fail(format!("deposit of {name} by {provider} should have been refused")),
            (Err(e), false) => return Err(e.into()),
        }
        Ok(())
    }

    fn depvf(&mut self, name: &str, expect: Option<&Expect>) -> Result<()> {
        let info = Self::lookup(&self.payments, "payment", name)?.file.info.clone();
        let text = board::to_jsonl(&self.board)?;
        self.hop("board", "authorities", "board", text.as_bytes());
        let (snapshot, _) = board::parse(&text)?;
        let verdict = deposit_verify(&snapshot, &mut self.authority, &self.registry, &info);
        let mut event = verdict_json(&verdict);
        event["op"] = json!("depvf");
        event["payment"] = json!(name);
        self.log(event);

        if let DepositVerdict::GuiltyUser { id, .. } = &verdict {
            if !self.cloned.contains(id) {
                self.fail(format!("honest user {id} found guilty"));
            }
        }
        if let Some(e) = expect {
            let ok = match (e, &verdict) {
                (Expect::NoDeposit, DepositVerdict::NoDeposit)
                | (Expect::Cleared, DepositVerdict::Cleared)
                | (Expect::Undetected, DepositVerdict::Undetected) => true,
                (Expect::GuiltyUser { user }, DepositVerdict::GuiltyUser { id, pk }) => {
                    user == id && self.users[user].pk == *pk
                }
                (Expect::GuiltyProviders { providers }, DepositVerdict::GuiltyProviders(got)) => providers == got,
                _ => false,
            };
            if !ok {
                self.fail(format!("payment {name}: expected {e:?}, got {verdict:?}"));
            }
        }
        self.report.verdicts.push((name.into(), verdict));
        Ok(())
    }
}

pub fn run_scenario(sc: &Scenario, seed: u64) -> Result<Report> {
    sc.check()?;
    let scheme: Scheme = parse_scheme(&sc.scheme)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let params = setup(scheme, sc.coins, &mut rng)?;
    let user_params = UserParams::from(&params);
    let (vk, shares) = ttp_keygen(&user_params.issuance().ctx, sc.threshold, sc.authorities, &mut rng)?;
    let ctx = user_params.issuance().ctx.clone();
    let users: BTreeMap<String, UserKeyPair> =
        sc.users.iter().map(|u| (u.clone(), UserKeyPair::generate(&ctx, &mut rng))).collect();
    let registry = sc
        .registry
        .as_ref()
        .unwrap_or(&sc.users)
        .iter()
        .map(|u| (u.clone(), users[u].pk))
        .collect();
    let authority = AuthorityState::new(params, vk.clone());

    let mut r = Runner {
        sc,
        rng,
        user_params,
        vk,
        shares,
        users,
        wallets: BTreeMap::new(),
        payments: BTreeMap::new(),
        cloned: BTreeSet::new(),
        board: Default::default(),
        authority,
        registry,
        report: Report { name: sc.name.clone(), transcript: Vec::new(), verdicts: Vec::new(), failures: Vec::new() },
        step: 0,
    };
    r.log(json!({
        "op": "setup", "scenario": sc.name, "scheme": scheme.tag(), "seed": seed,
        "threshold": sc.threshold, "authorities": sc.authorities, "coins": sc.coins,
    }));
    for (i, action) in sc.actions.iter().enumerate() {
        r.step = i + 1;
        r.run(action).map_err(|e| Error::Scenario(format!("{} step {}: {e}", sc.name, i + 1)))?;
    }
    Ok(r.report)
}
