//! `tecash` command line. Exit codes: 0 success, 1 rejected or invalid input,
//! 2 usage or file-system error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;
use tecash_core::denom::{average_coins, greedy_decompose, DenominationSet};
use tecash_core::groups::GroupContext;
use tecash_core::ledger::{deposit_verify, AuthorityState, DepositVerdict, SchemeParams};
use tecash_core::payinfo::{provider_of, PaymentInfo};
use tecash_core::threshold::{ttp_keygen, AuthorityKeyShare};
use tecash_core::withdraw::{create_wallet, request, request_vf, withdraw, withdraw_vf, RequestInfo, Scheme, UserKeyPair, Wallet};

use crate::artifact::{load, load_any, save, IssuedShare, PaymentFile, PublicKeys, Registry, RequestFile};
use crate::bench::{self, Op};
use crate::board;
use crate::error::{Error, Result};
use crate::harness::{run_scenario, Scenario};
use crate::schemes::{load_authority_params, load_for, parse_scheme, setup, UserParams};

#[derive(Debug, Parser)]
#[command(name = "tecash", version, about = "Threshold-issued anonymous e-cash")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate public parameters for L coins per wallet.
    Setup {
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long)]
        coins: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Divisible only: where to write the authority table.
        #[arg(long)]
        authority_out: Option<PathBuf>,
    },
    /// Trusted-dealer keys for n authorities with threshold t.
    KeygenAuthorities {
        #[arg(long)]
        threshold: usize,
        #[arg(long)]
        authorities: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    KeygenUser {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Register the public key under this id.
        #[arg(long, requires = "registry")]
        id: Option<String>,
        #[arg(long, requires = "id")]
        registry: Option<PathBuf>,
    },
    /// Blind withdrawal request.
    Request {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        user: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Private openings kept by the user for `aggregate`.
        #[arg(long)]
        info_out: PathBuf,
    },
    /// One authority answers a request.
    Issue {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        share: PathBuf,
        #[arg(long, alias = "in")]
        request: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unblind and combine exactly t answers into a wallet.
    Aggregate {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        user: PathBuf,
        #[arg(long)]
        request_info: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pay V coins to a provider; the wallet file is advanced in place unless --wallet-out is given.
    Spend {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        user: PathBuf,
        #[arg(long)]
        wallet: PathBuf,
        #[arg(long)]
        wallet_out: Option<PathBuf>,
        #[arg(long)]
        provider: String,
        #[arg(long)]
        value: u32,
        #[arg(long, default_value = "")]
        memo: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    VerifyPayment {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        vk: PathBuf,
        #[arg(long, alias = "in")]
        payment: PathBuf,
        /// Also require the payment info to name this provider.
        #[arg(long)]
        provider: Option<String>,
    },
    Deposit {
        #[arg(long)]
        board: PathBuf,
        #[arg(long)]
        provider: String,
        #[arg(long, alias = "in")]
        payment: PathBuf,
        /// Skip the duplicate check.
        #[arg(long)]
        raw: bool,
    },
    /// Authority verdict for one payment info. Exit 0 only when cleared.
    Depvf {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        authority_params: Option<PathBuf>,
        #[arg(long)]
        vk: PathBuf,
        #[arg(long)]
        board: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, alias = "in")]
        payment: PathBuf,
    },
    DenomAvg {
        #[arg(long, value_delimiter = ',', required = true)]
        denoms: Vec<u64>,
        #[arg(long)]
        pmax: u64,
    },
    DenomPlan {
        #[arg(long, value_delimiter = ',', required = true)]
        denoms: Vec<u64>,
        #[arg(long)]
        price: u64,
    },
    /// Time spend, spend-vf and identify; prints a TSV.
    Bench {
        /// compact, divisible or both.
        #[arg(long, default_value = "both")]
        scheme: String,
        /// spend, spend-vf, identify or all.
        #[arg(long, default_value = "all")]
        op: String,
        #[arg(long, default_value_t = 300)]
        iters: u32,
        #[arg(long, default_value_t = 10)]
        coins: u32,
        #[arg(long, default_value_t = 100)]
        registry: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run a scenario file; exit 1 if any expectation fails.
    Scenario {
        #[arg(long, alias = "in")]
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON-lines transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    seed.map_or_else(ChaCha20Rng::from_entropy, ChaCha20Rng::seed_from_u64)
}

fn authority_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("params");
    out.with_file_name(format!("{stem}-authority.json"))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value"));
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Setup { scheme, coins, seed, out, authority_out } => {
            let params = setup(scheme, coins, &mut rng(seed))?;
            UserParams::from(&params).save(&out)?;
            println!("wrote {}", out.display());
            if let SchemeParams::Divisible(p) = &params {
                let path = authority_out.unwrap_or_else(|| authority_path(&out));
                save(&path, Some(Scheme::Divisible), &p.authority)?;
                println!("wrote {}", path.display());
            }
        }
        Command::KeygenAuthorities { threshold, authorities, seed, out_dir } => {
            let ctx = GroupContext::new();
            let (vk, shares) = ttp_keygen(&ctx, threshold, authorities, &mut rng(seed))?;
            fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            let public = PublicKeys { vk, shares: shares.iter().map(|(_, p)| p.clone()).collect() };
            save(&out_dir.join("vk.json"), None, &public)?;
            for (sk, _) in &shares {
                save(&out_dir.join(format!("authority-{}.json", sk.index)), None, sk)?;
            }
            println!("wrote vk.json and {} authority shares to {}", shares.len(), out_dir.display());
        }
        Command::KeygenUser { seed, out, id, registry } => {
            let kp = UserKeyPair::generate(&GroupContext::new(), &mut rng(seed));
            save(&out, None, &kp)?;
            if let (Some(id), Some(path)) = (id, registry) {
                let mut reg: Registry = if path.exists() { load(&path, None)? } else { Registry::default() };
                reg.add(&id, kp.pk)?;
                save(&path, None, &reg)?;
                println!("registered {id} in {}", path.display());
            }
            println!("wrote {}", out.display());
        }
        Command::Request { params, user, seed, out, info_out } => {
            let p = UserParams::load(&params)?;
            let kp: UserKeyPair = load(&user, None)?;
            let (req, info) = request(p.issuance(), &kp, &mut rng(seed))?;
            save(&out, None, &RequestFile { pk: kp.pk, request: req })?;
            save(&info_out, None, &info)?;
            println!("wrote {} and {}", out.display(), info_out.display());
        }
        Command::Issue { params, share, request: req_path, out } => {
            let p = UserParams::load(&params)?;
            let sk: AuthorityKeyShare = load(&share, None)?;
            let req: RequestFile = load(&req_path, None)?;
            if !request_vf(p.issuance(), &req.request, &req.pk) {
                println!("rejected bad-request");
                return Ok(1);
            }
            save(&out, None, &IssuedShare { index: sk.index, share: withdraw(&sk, &req.request) })?;
            println!("authority {} issued {}", sk.index, out.display());
        }
        Command::Aggregate { params, vk, user, request_info, shares, out } => {
            let p = UserParams::load(&params)?;
            let keys: PublicKeys = load(&vk, None)?;
            let kp: UserKeyPair = load(&user, None)?;
            let info: RequestInfo = load(&request_info, None)?;
            let mut partials = Vec::new();
            for path in &shares {
                let issued: IssuedShare = load(path, None)?;
                let public = keys
                    .share(issued.index)
                    .ok_or_else(|| Error::Artifact(format!("no public share for authority {}", issued.index)))?;
                partials.push(withdraw_vf(p.issuance(), public, &kp.sk, &issued.share, &info)?);
            }
            let wallet = create_wallet(p.issuance(), p.scheme(), &keys.vk, &kp.sk, &partials)?;
            save(&out, Some(wallet.scheme), &wallet)?;
            println!("wrote {} ({} coins)", out.display(), p.coins());
        }
        Command::Spend { params, vk, user, wallet, wallet_out, provider, value, memo, seed, out } => {
            let p = UserParams::load(&params)?;
            let keys: PublicKeys = load(&vk, None)?;
            let kp: UserKeyPair = load(&user, None)?;
            let w: Wallet = load_for(&wallet, p.scheme())?;
            let mut rng = rng(seed);
            let info = PaymentInfo::new(&provider, memo.as_bytes(), &mut rng)?.to_bytes();
            let (next, payment) = p.spend(&keys.vk, &kp.sk, &w, &info, value, &mut rng)?;
            save(&out, Some(p.scheme()), &PaymentFile { info, payment })?;
            let wallet_out = wallet_out.unwrap_or(wallet);
            save(&wallet_out, Some(next.scheme), &next)?;
            println!("wrote {}; wallet next index {}", out.display(), next.l);
        }
        Command::VerifyPayment { params, vk, payment, provider } => {
            let p = UserParams::load(&params)?;
            let keys: PublicKeys = load(&vk, None)?;
            let file: PaymentFile = match load_any(&payment) {
                Ok((_, f)) => f,
                Err(e @ Error::Io { .. }) => return Err(e),
                Err(e) => {
                    println!("rejected malformed: {e}");
                    return Ok(1);
                }
            };
            if file.payment.scheme() != p.scheme() {
                println!("rejected wrong-scheme");
                return Ok(1);
            }
            if let Some(want) = provider {
                if provider_of(&file.info) != Some(want.as_str()) {
                    println!("rejected wrong-provider");
                    return Ok(1);
                }
            }
            match p.verify(&keys.vk, &file.payment, &file.info) {
                Ok(v) => println!("accepted value={v}"),
                Err(r) => {
                    println!("rejected {}", r.code());
                    return Ok(1);
                }
            }
        }
        Command::Deposit { board: path, provider, payment, raw } => {
            let file: PaymentFile = load_any(&payment)?.1;
            let index = board::deposit(&path, &provider, file.payment.scheme(), &file.payment.to_bytes(), &file.info, raw)?;
            println!("deposited at index {index}");
        }
        Command::Depvf { params, authority_params, vk, board: path, registry, payment } => {
            let sp = load_authority_params(&params, authority_params.as_deref())?;
            let keys: PublicKeys = load(&vk, None)?;
            let reg: Registry = load(&registry, None)?;
            let file: PaymentFile = load_any(&payment)?.1;
            let bb = board::load(&path)?;
            let mut state = AuthorityState::new(sp, keys.vk);
            let verdict = deposit_verify(&bb, &mut state, &reg.users, &file.info);
            let out = match &verdict {
                DepositVerdict::GuiltyProviders(p) => json!({ "verdict": verdict.name(), "providers": p }),
                DepositVerdict::GuiltyUser { id, .. } => json!({ "verdict": verdict.name(), "user": id }),
                _ => json!({ "verdict": verdict.name() }),
            };
            print_json(&json!({ "result": out, "entries": bb.len(), "skipped": state.skipped() }));
            return Ok(if verdict == DepositVerdict::Cleared { 0 } else { 1 });
        }
        Command::DenomAvg { denoms, pmax } => {
            let set = DenominationSet::new(denoms)?;
            let avg = average_coins(&set, pmax)?;
            println!("{avg}\t{}/{}", avg.coins, avg.prices);
        }
        Command::DenomPlan { denoms, price } => {
            let set = DenominationSet::new(denoms)?;
            let plan = greedy_decompose(price, &set)?;
            let parts: Vec<_> = plan.parts.iter().map(|&(d, c)| json!({ "denomination": d, "count": c })).collect();
            println!("{}", serde_json::to_string(&json!({ "price": price, "coins": plan.coins(), "plan": parts }))?);
        }
        Command::Bench { scheme, op, iters, coins, registry, seed } => {
            let schemes = match scheme.as_str() {
                "both" => vec![Scheme::Compact, Scheme::Divisible],
                s => vec![parse_scheme(s)?],
            };
            let ops = match op.as_str() {
                "all" => Op::ALL.to_vec(),
                o => vec![o.parse()?],
            };
            let rows = bench::run(&schemes, &ops, &bench::Config { iters, coins, registry, seed })?;
            print!("{}", bench::tsv(&rows));
        }
        Command::Scenario { file, seed, transcript } => {
            let sc = Scenario::load(&file)?;
            let report = run_scenario(&sc, seed)?;
            if let Some(path) = transcript {
                fs::write(&path, report.to_jsonl()).map_err(|e| Error::io(&path, e))?;
            }
            for (payment, v) in &report.verdicts {
                println!("{payment}\t{}", v.name());
            }
            for f in &report.failures {
                println!("FAIL {f}");
            }
            println!("{} {}", report.name, if report.passed() { "passed" } else { "failed" });
            return Ok(if report.passed() { 0 } else { 1 });
        }
    }
    Ok(0)
}
