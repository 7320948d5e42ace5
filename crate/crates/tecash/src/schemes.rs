//! One interface over both schemes for the file-based tools.

use std::path::Path;

use rand_core::{CryptoRng, RngCore};
use tecash_core::compact::{self, CompactParams, Reject};
use tecash_core::divisible::{self, DivisibleAuthorityParams, DivisibleParams, DivisibleUserParams};
use tecash_core::groups::Scalar;
use tecash_core::ledger::SchemeParams;
use tecash_core::threshold::VerificationKey;
use tecash_core::withdraw::{IssuanceParams, Scheme, Wallet};

use crate::artifact::{load, load_any, ArtifactFile, Payment};
use crate::error::{Error, Result};

/// Accepts `compact`, `divisible` or a full tag such as `compact/v1`.
pub fn parse_scheme(s: &str) -> Result<Scheme> {
    match s {
        "compact" => Ok(Scheme::Compact),
        "divisible" => Ok(Scheme::Divisible),
        other => Scheme::from_tag(other).ok_or_else(|| Error::Usage(format!("unknown scheme {other}"))),
    }
}

/// What users and providers need: everything except the divisible authority table.
#[derive(Clone, Debug)]
pub enum UserParams {
    Compact(CompactParams),
    Divisible(DivisibleUserParams),
}

impl UserParams {
    pub fn scheme(&self) -> Scheme {
        match self {
            UserParams::Compact(_) => Scheme::Compact,
            UserParams::Divisible(_) => Scheme::Divisible,
        }
    }

    pub fn coins(&self) -> u32 {
        match self {
            UserParams::Compact(p) => p.coins,
            UserParams::Divisible(p) => p.coins(),
        }
    }

    pub fn issuance(&self) -> &IssuanceParams {
        match self {
            UserParams::Compact(p) => &p.issuance,
            UserParams::Divisible(p) => &p.issuance,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn spend<R: RngCore + CryptoRng>(
        &self,
        vk: &VerificationKey,
        sk: &Scalar,
        wallet: &Wallet,
        info: &[u8],
        v: u32,
        rng: &mut R,
    ) -> Result<(Wallet, Payment)> {
        Ok(match self {
            UserParams::Compact(p) => {
                let (w, pay) = compact::spend(p, vk, sk, wallet, info, v, rng)?;
                (w, Payment::Compact(pay))
            }
            UserParams::Divisible(p) => {
                let (w, pay) = divisible::d_spend(p, vk, sk, wallet, info, v, rng)?;
                (w, Payment::Divisible(pay))
            }
        })
    }

    pub fn verify(&self, vk: &VerificationKey, pay: &Payment, info: &[u8]) -> std::result::Result<u32, Reject> {
        match (self, pay) {
            (UserParams::Compact(p), Payment::Compact(pay)) => compact::spend_vf(p, vk, pay, info),
            (UserParams::Divisible(p), Payment::Divisible(pay)) => divisible::d_spend_vf(p, vk, pay, info),
            _ => Err(Reject::BadProof),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        match self {
            UserParams::Compact(p) => ArtifactFile::wrap(Some(Scheme::Compact), p).write(path),
            UserParams::Divisible(p) => ArtifactFile::wrap(Some(Scheme::Divisible), p).write(path),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = ArtifactFile::read(path)?;
        match file.scheme.as_str() {
            tag if tag == Scheme::Compact.tag() => Ok(UserParams::Compact(file.expect(Some(Scheme::Compact))?)),
            tag if tag == Scheme::Divisible.tag() => Ok(UserParams::Divisible(file.expect(Some(Scheme::Divisible))?)),
            tag => Err(Error::Artifact(format!("params file has scheme {tag}"))),
        }
    }
}

impl From<&SchemeParams> for UserParams {
    fn from(p: &SchemeParams) -> Self {
        match p {
            SchemeParams::Compact(c) => UserParams::Compact(c.clone()),
            SchemeParams::Divisible(d) => UserParams::Divisible(d.user.clone()),
        }
    }
}

/// Authority parameters: the user file, plus the authority table for divisible.
pub fn load_authority_params(user: &Path, authority: Option<&Path>) -> Result<SchemeParams> {
    Ok(match UserParams::load(user)? {
        UserParams::Compact(p) => SchemeParams::Compact(p),
        UserParams::Divisible(user) => {
            let path = authority
                .ok_or_else(|| Error::Usage("divisible parameters need --authority-params".into()))?;
            let authority: DivisibleAuthorityParams = load(path, Some(Scheme::Divisible))?;
            if authority.eta_tilde.len() != user.levels.len() {
                return Err(Error::Artifact("authority table does not match the user parameters".into()));
            }
            SchemeParams::Divisible(DivisibleParams { user, authority })
        }
    })
}

pub fn setup<R: RngCore + CryptoRng>(scheme: Scheme, coins: u32, rng: &mut R) -> Result<SchemeParams> {
    Ok(match scheme {
        Scheme::Compact => SchemeParams::Compact(compact::setup(coins, rng)?),
        Scheme::Divisible => SchemeParams::Divisible(divisible::d_setup(coins, rng)?.0),
    })
}

/// Reads a scheme-tagged artifact and checks it against `scheme`.
pub fn load_for<T: crate::artifact::Artifact>(path: &Path, scheme: Scheme) -> Result<T> {
    let (found, value) = load_any::<T>(path)?;
    match found {
        Some(s) if s != scheme => Err(Error::Artifact(format!("{} is for {}, expected {}", path.display(), s.tag(), scheme.tag()))),
        _ => Ok(value),
    }
}
