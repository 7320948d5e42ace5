//! Timings for spend, spend verification and identification.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tecash_core::compact;
use tecash_core::divisible;
use tecash_core::groups::G1;
use tecash_core::ledger::SchemeParams;
use tecash_core::payinfo::PaymentInfo;
use tecash_core::threshold::ttp_keygen;
use tecash_core::withdraw::{create_wallet, request, withdraw, withdraw_vf, Scheme, UserKeyPair};

use crate::artifact::Payment;
use crate::error::{Error, Result};
use crate::schemes::{setup, UserParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Spend,
    SpendVf,
    Identify,
}

impl Op {
    pub const ALL: [Op; 3] = [Op::Spend, Op::SpendVf, Op::Identify];

    pub fn name(self) -> &'static str {
        match self {
            Op::Spend => "spend",
            Op::SpendVf => "spend-vf",
            Op::Identify => "identify",
        }
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Op> {
        Op::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown bench op {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub iters: u32,
    pub mean_ms: f64,
    pub stddev_ms: f64,
}

pub fn measure<F: FnMut()>(iters: u32, mut f: F) -> Stats {
    let samples: Vec<f64> = (0..iters.max(1))
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    Stats { iters: samples.len() as u32, mean_ms: mean, stddev_ms: var.sqrt() }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub scheme: Scheme,
    pub op: Op,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub iters: u32,
    pub coins: u32,
    /// Number of registered keys searched by identify, cheater last.
    pub registry: usize,
    pub seed: u64,
}

/// Everything a scheme needs to time the three operations at `V = 1`.
struct Bed {
    params: SchemeParams,
    user: UserParams,
    vk: tecash_core::threshold::VerificationKey,
    kp: UserKeyPair,
    wallet: tecash_core::withdraw::Wallet,
    info: Vec<u8>,
    pay: Payment,
    clash: (Payment, Vec<u8>),
    pks: Vec<G1>,
}

fn bed(scheme: Scheme, cfg: &Config) -> Result<Bed> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let params = setup(scheme, cfg.coins, &mut rng)?;
    let user = UserParams::from(&params);
    let p = user.issuance().clone();
    let (vk, shares) = ttp_keygen(&p.ctx, 2, 3, &mut rng)?;
    let kp = UserKeyPair::generate(&p.ctx, &mut rng);
    let (req, ri) = request(&p, &kp, &mut rng)?;
    let partials = shares[..2]
        .iter()
        .map(|(sk, pk)| withdraw_vf(&p, pk, &kp.sk, &withdraw(sk, &req), &ri))
        .collect::<tecash_core::Result<Vec<_>>>()?;
    let wallet = create_wallet(&p, scheme, &vk, &kp.sk, &partials)?;
    let info = PaymentInfo::new("bench-a", b"", &mut rng)?.to_bytes();
    let other = PaymentInfo::new("bench-b", b"", &mut rng)?.to_bytes();
    let (_, pay) = user.spend(&vk, &kp.sk, &wallet, &info, 1, &mut rng)?;
    let (_, pay2) = user.spend(&vk, &kp.sk, &wallet, &other, 1, &mut rng)?;
    let mut pks: Vec<G1> = (1..cfg.registry.max(1))
        .map(|_| UserKeyPair::generate(&p.ctx, &mut rng).pk)
        .collect();
    pks.push(kp.pk);
    Ok(Bed { params, user, vk, kp, wallet, info, pay, clash: (pay2, other), pks })
}

fn time(b: &Bed, op: Op, iters: u32, seed: u64) -> Stats {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x5eed);
    match op {
        Op::Spend => measure(iters, || {
            b.user.spend(&b.vk, &b.kp.sk, &b.wallet, &b.info, 1, &mut rng).expect("spend");
        }),
        Op::SpendVf => measure(iters, || {
            b.user.verify(&b.vk, &b.pay, &b.info).expect("verify");
        }),
        Op::Identify => match (&b.params, &b.pay, &b.clash.0) {
            (SchemeParams::Compact(_), Payment::Compact(p1), Payment::Compact(p2)) => measure(iters, || {
                let out = compact::identify(&b.pks, p1, p2, &b.info, &b.clash.1);
                assert_eq!(out, compact::Outcome::Guilty(b.kp.pk));
            }),
            (SchemeParams::Divisible(params), Payment::Divisible(p1), Payment::Divisible(p2)) => measure(iters, || {
                let out = divisible::d_identify(params, &b.pks, p1, p2, &b.info, &b.clash.1).expect("identify");
                assert_eq!(out, compact::Outcome::Guilty(b.kp.pk));
            }),
            _ => unreachable!("bed payments match their parameters"),
        },
    }
}

pub fn run(schemes: &[Scheme], ops: &[Op], cfg: &Config) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &scheme in schemes {
        let b = bed(scheme, cfg)?;
        for &op in ops {
            rows.push(Row { scheme, op, stats: time(&b, op, cfg.iters, cfg.seed) });
        }
    }
    Ok(rows)
}

/// Divisible mean over compact mean, for every op timed under both schemes.
pub fn ratios(rows: &[Row]) -> Vec<(Op, f64)> {
    let find = |s, op| rows.iter().find(|r| r.scheme == s && r.op == op);
    Op::ALL
        .into_iter()
        .filter_map(|op| {
            let c = find(Scheme::Compact, op)?;
            let d = find(Scheme::Divisible, op)?;
            Some((op, d.stats.mean_ms / c.stats.mean_ms))
        })
        .collect()
}

pub fn tsv(rows: &[Row]) -> String {
    let mut out = String::from("scheme\top\titers\tmean_ms\tstddev_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.3}\t{:.3}",
            r.scheme.name(),
            r.op.name(),
            r.stats.iters,
            r.stats.mean_ms,
            r.stats.stddev_ms
        );
    }
    let ratios = ratios(rows);
    if !ratios.is_empty() {
        out.push_str("\nratio\top\tdivisible/compact\n");
        for (op, x) in ratios {
            let _ = writeln!(out, "ratio\t{}\t{:.2}", op.name(), x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_constant_work() {
        let s = measure(5, || {});
        assert_eq!(s.iters, 5);
        assert!(s.mean_ms >= 0.0 && s.stddev_ms >= 0.0);
        assert!("spend-vf".parse::<Op>().is_ok());
        assert!("nope".parse::<Op>().is_err());
    }

    #[test]
    fn table_has_ratio_rows() {
        let row = |scheme, ms| Row { scheme, op: Op::Spend, stats: Stats { iters: 1, mean_ms: ms, stddev_ms: 0.0 } };
        let t = tsv(&[row(Scheme::Compact, 2.0), row(Scheme::Divisible, 5.0)]);
        assert!(t.starts_with("scheme\top\titers\tmean_ms\tstddev_ms\ncompact\tspend\t1\t2.000\t0.000\n"));
        assert!(t.ends_with("ratio\tspend\t2.50\n"));
    }
}
