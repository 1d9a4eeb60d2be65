//! Binary checkpoint format.
//!
//! ```text
//! "NRAM"                      4 bytes magic
//! version                     u32 LE
//! d_model heads d_attn max_title max_history neg_k seed   7 × u64 LE
//! per tensor, in ModelParams::tensors() order:
//!     rank                    u32 LE
//!     extents                 rank × u64 LE
//!     values                  f64 LE, row-major
//! checksum                    u64 LE, first 8 bytes of SHA-256 over all
//!                             preceding bytes
//! ```
//!
//! Tensor order: embedding; news attention W_Q[0..h], W_K[0..h], W_V[0..h],
//! W_O; news pooling W_a, b_a, v_a; then the same two blocks for the user
//! encoder.

use std::fs;
use std::path::Path;

use super::{ModelConfig, ModelParams};
use crate::error::{Error, Result};
use crate::layers::{AdditiveAttentionParams, EmbeddingTable, MultiHeadParams};
use crate::numerics::{stable_hash64, Parameters, Tensor};

pub const MAGIC: &[u8; 4] = b"NRAM";
pub const FORMAT_VERSION: u32 = 1;

pub fn checkpoint_bytes(params: &ModelParams, config: &ModelConfig) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + params.num_scalars() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for field in [
        config.d_model as u64,
        config.heads as u64,
        config.d_attn as u64,
        config.max_title as u64,
        config.max_history as u64,
        config.neg_k as u64,
        config.seed,
    ] {
        out.extend_from_slice(&field.to_le_bytes());
    }
    for tensor in params.tensors() {
        out.extend_from_slice(&(tensor.rank() as u32).to_le_bytes());
        for &extent in tensor.shape() {
            out.extend_from_slice(&(extent as u64).to_le_bytes());
        }
        for v in tensor.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let checksum = stable_hash64(&out);
    out.extend_from_slice(&checksum.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::MalformedCheckpoint("unexpected end of payload".into()))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?)
            .map_err(|_| Error::MalformedCheckpoint("field exceeds usize".into()))
    }

    fn tensor(&mut self, expected: &[usize]) -> Result<Tensor> {
        let rank = self.u32()? as usize;
        let mut shape = Vec::with_capacity(rank.min(8));
        for _ in 0..rank {
            shape.push(self.usize()?);
        }
        // the embedding's vocabulary extent is free; 0 marks "any"
        let matches = shape.len() == expected.len()
            && shape.iter().zip(expected).all(|(s, e)| *e == 0 || s == e);
        if !matches {
            return Err(Error::MalformedCheckpoint(format!(
                "tensor shape {shape:?} does not match expected {expected:?}"
            )));
        }
        let len: usize = shape.iter().product();
        let raw = self.take(len.checked_mul(8).ok_or_else(|| {
            Error::MalformedCheckpoint("tensor too large".into())
        })?)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Tensor::from_vec(&shape, data)
    }

    fn multi_head(&mut self, c: &ModelConfig) -> Result<MultiHeadParams> {
        let (d, dk, h) = (c.d_model, c.d_k(), c.heads);
        let mut read = |n: usize, shape: &[usize]| -> Result<Vec<Tensor>> {
            (0..n).map(|_| self.tensor(shape)).collect()
        };
        let w_q = read(h, &[d, dk])?;
        let w_k = read(h, &[d, dk])?;
        let w_v = read(h, &[d, dk])?;
        let w_o = self.tensor(&[h * dk, d])?;
        Ok(MultiHeadParams { w_q, w_k, w_v, w_o })
    }

    fn pool(&mut self, c: &ModelConfig) -> Result<AdditiveAttentionParams> {
        Ok(AdditiveAttentionParams {
            w_a: self.tensor(&[c.d_model, c.d_attn])?,
            b_a: self.tensor(&[c.d_attn])?,
            v_a: self.tensor(&[c.d_attn])?,
        })
    }
}

pub fn parse_checkpoint(bytes: &[u8]) -> Result<(ModelParams, ModelConfig)> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(Error::ChecksumMismatch);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    if bytes.len() < 16 {
        return Err(Error::ChecksumMismatch);
    }
    let (payload, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    if stored != stable_hash64(payload) {
        return Err(Error::ChecksumMismatch);
    }

    let mut r = Reader {
        bytes: payload,
        pos: 8,
    };
    let config = ModelConfig {
        d_model: r.usize()?,
        heads: r.usize()?,
        d_attn: r.usize()?,
        max_title: r.usize()?,
        max_history: r.usize()?,
        neg_k: r.usize()?,
        seed: r.u64()?,
    };
    config.validate()?;
    let embedding = EmbeddingTable {
        matrix: r.tensor(&[0, config.d_model])?,
    };
    let params = ModelParams {
        embedding,
        news_mha: r.multi_head(&config)?,
        news_pool: r.pool(&config)?,
        user_mha: r.multi_head(&config)?,
        user_pool: r.pool(&config)?,
    };
    if r.pos != payload.len() {
        return Err(Error::MalformedCheckpoint(format!(
            "{} trailing bytes",
            payload.len() - r.pos
        )));
    }
    Ok((params, config))
}

pub fn save_checkpoint(
    params: &ModelParams,
    config: &ModelConfig,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, checkpoint_bytes(params, config)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(ModelParams, ModelConfig)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_checkpoint(&bytes)
}
