//! Little-endian binary encoding for network weights and optimizer state.
//!
//! Network layout: head tag (u32), layer count (u32), then per layer
//! `in_dim`, `out_dim` (u32) followed by the row-major weights and the bias
//! as raw `f64` bits. Adam layout: `beta1`, `beta2`, `epsilon`, step (u64),
//! then the first and second moments in network layout order.

use std::io::{Read, Write};

use super::{AdamConfig, AdamState, Dense, Gradients, HeadKind, Mlp, NnError};

pub fn write_u32(out: &mut impl Write, v: u32) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

pub fn write_u64(out: &mut impl Write, v: u64) -> std::io::Result<()> {
    out.write_all(&v.to_le_bytes())
}

pub fn write_f64_slice(out: &mut impl Write, values: &[f64]) -> std::io::Result<()> {
    for v in values {
        out.write_all(&v.to_bits().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_u32(input: &mut impl Read) -> Result<u32, NnError> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

pub fn read_u64(input: &mut impl Read) -> Result<u64, NnError> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub fn read_f64_vec(input: &mut impl Read, n: usize) -> Result<Vec<f64>, NnError> {
    (0..n)
        .map(|_| read_u64(input).map(f64::from_bits))
        .collect()
}

const MAX_WIDTH: u32 = 1 << 16;

impl Mlp {
    pub fn write_to(&self, out: &mut impl Write) -> Result<(), NnError> {
        let tag = match self.head() {
            HeadKind::SoftmaxPolicy => 0,
            HeadKind::ScalarValue => 1,
        };
        write_u32(out, tag)?;
        write_u32(out, self.layers().len() as u32)?;
        for layer in self.layers() {
            write_u32(out, layer.in_dim() as u32)?;
            write_u32(out, layer.out_dim() as u32)?;
            write_f64_slice(out, layer.weights())?;
            write_f64_slice(out, layer.bias())?;
        }
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<Mlp, NnError> {
        let head = match read_u32(input)? {
            0 => HeadKind::SoftmaxPolicy,
            1 => HeadKind::ScalarValue,
            t => return Err(NnError::Corrupt(format!("unknown head tag {t}"))),
        };
        let n = read_u32(input)?;
        if n == 0 || n > 64 {
            return Err(NnError::Corrupt(format!("implausible layer count {n}")));
        }
        let mut layers = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let in_dim = read_u32(input)?;
            let out_dim = read_u32(input)?;
            if in_dim == 0 || out_dim == 0 || in_dim > MAX_WIDTH || out_dim > MAX_WIDTH {
                return Err(NnError::Corrupt(format!("implausible layer {in_dim}x{out_dim}")));
            }
            let (in_dim, out_dim) = (in_dim as usize, out_dim as usize);
            let weights = read_f64_vec(input, in_dim * out_dim)?;
            let bias = read_f64_vec(input, out_dim)?;
            layers.push(Dense::from_parts(in_dim, out_dim, weights, bias)?);
        }
        Mlp::from_layers(layers, head)
    }
}

fn write_moments(out: &mut impl Write, g: &Gradients) -> Result<(), NnError> {
    for (w, b) in g.weights.iter().zip(&g.biases) {
        write_f64_slice(out, w)?;
        write_f64_slice(out, b)?;
    }
    Ok(())
}

fn read_moments(input: &mut impl Read, net: &Mlp) -> Result<Gradients, NnError> {
    let mut g = Gradients::zeros_like(net);
    for k in 0..g.weights.len() {
        g.weights[k] = read_f64_vec(input, g.weights[k].len())?;
        g.biases[k] = read_f64_vec(input, g.biases[k].len())?;
    }
    Ok(g)
}

impl AdamState {
    pub fn write_to(&self, out: &mut impl Write) -> Result<(), NnError> {
        write_f64_slice(
            out,
            &[self.config.beta1, self.config.beta2, self.config.epsilon],
        )?;
        write_u64(out, self.step)?;
        write_moments(out, &self.m)?;
        write_moments(out, &self.v)
    }

    /// Moments are shaped after `net`, which must be the network this state belongs to.
    pub fn read_from(input: &mut impl Read, net: &Mlp) -> Result<AdamState, NnError> {
        let c = read_f64_vec(input, 3)?;
        let config = AdamConfig {
            beta1: c[0],
            beta2: c[1],
            epsilon: c[2],
        };
        let step = read_u64(input)?;
        let m = read_moments(input, net)?;
        let v = read_moments(input, net)?;
        Ok(AdamState { config, m, v, step })
    }
}
