//! Checkpoint layout: 8-byte magic, version (u32), algorithm tag (u32),
//! epoch (u64), seed (u64), policy network, policy Adam state, then a u32
//! flag followed by the value network and its Adam state when the flag is 1.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Algorithm, RlError};
use crate::nn::{read_u32, read_u64, write_u32, write_u64, AdamState, HeadKind, Mlp, NnError};

pub const CHECKPOINT_MAGIC: [u8; 8] = *b"HNBCKPT\0";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub algorithm: Algorithm,
    pub epoch: u64,
    pub seed: u64,
    pub policy: Mlp,
    pub policy_adam: AdamState,
    pub value: Option<(Mlp, AdamState)>,
}

impl Checkpoint {
    pub fn write_to(&self, out: &mut impl Write) -> Result<(), RlError> {
        out.write_all(&CHECKPOINT_MAGIC)?;
        write_u32(out, CHECKPOINT_VERSION)?;
        write_u32(out, self.algorithm.tag())?;
        write_u64(out, self.epoch)?;
        write_u64(out, self.seed)?;
        self.policy.write_to(out)?;
        self.policy_adam.write_to(out)?;
        match &self.value {
            Some((net, adam)) => {
                write_u32(out, 1)?;
                net.write_to(out)?;
                adam.write_to(out)?;
            }
            None => write_u32(out, 0)?,
        }
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<Checkpoint, RlError> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(|_| RlError::BadMagic)?;
        if magic != CHECKPOINT_MAGIC {
            return Err(RlError::BadMagic);
        }
        let version = read_u32(input)?;
        if version != CHECKPOINT_VERSION {
            return Err(RlError::BadVersion(version));
        }
        let algorithm = Algorithm::from_tag(read_u32(input)?)
            .ok_or_else(|| NnError::Corrupt("unknown algorithm tag".into()))?;
        let epoch = read_u64(input)?;
        let seed = read_u64(input)?;
        let policy = Mlp::read_from(input)?;
        if policy.head() != HeadKind::SoftmaxPolicy {
            return Err(NnError::Corrupt("first network is not a policy".into()).into());
        }
        let policy_adam = AdamState::read_from(input, &policy)?;
        let value = match read_u32(input)? {
            0 => None,
            1 => {
                let net = Mlp::read_from(input)?;
                let adam = AdamState::read_from(input, &net)?;
                Some((net, adam))
            }
            _ => return Err(NnError::Corrupt("bad value-net flag".into()).into()),
        };
        if value.is_some() != algorithm.uses_value_net() {
            return Err(NnError::Corrupt("value net does not match algorithm".into()).into());
        }
        let mut trailing = [0u8; 1];
        if input.read(&mut trailing)? != 0 {
            return Err(NnError::Corrupt("trailing bytes".into()).into());
        }
        Ok(Checkpoint {
            algorithm,
            epoch,
            seed,
            policy,
            policy_adam,
            value,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), RlError> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, RlError> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }
}
