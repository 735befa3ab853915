//! Text checkpoint format for a trained model, version 1.
//!
//! Line-oriented, whitespace-separated. Every f64 is serialized as the
//! 16-hex-digit big-endian form of its bit pattern, so round-trips are
//! bit-exact and independent of formatting/locale:
//!
//! ```text
//! feef-model v1
//! dims <d_s> <d_a>
//! arch <hidden_width> <hidden_layers> <ensemble_size>
//! normalizer <2(d_s+d_a) hex words>
//! member <index> <param hex words>
//! ...
//! reward <param hex words>
//! ```

use std::io::{BufRead, Write};

use crate::error::{FeefError, Result};
use crate::math::net::DenseNet;
use crate::model::ensemble::{RewardModel, TransitionEnsemble, WorldModel};
use crate::model::normalizer::Normalizer;

const MAGIC: &str = "feef-model v1";

fn push_hex(line: &mut String, values: &[f64]) {
    for v in values {
        line.push(' ');
        line.push_str(&format!("{:016x}", v.to_bits()));
    }
}

fn parse_hex(tokens: &[&str]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            u64::from_str_radix(t, 16)
                .map(f64::from_bits)
                .map_err(|_| FeefError::MalformedCheckpoint(format!("bad f64 word '{t}'")))
        })
        .collect()
}

pub fn save_checkpoint(model: &WorldModel, mut out: impl Write) -> Result<()> {
    let d_s = model.ensemble.state_dim();
    let d_a = model.ensemble.action_dim();
    // recover width/depth from the first member: dims = [in, w, w, ..., out]
    let dims = model.ensemble.members()[0].dims();
    let hidden_layers = dims.len() - 2;
    let hidden_width = dims[1];
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "dims {d_s} {d_a}")?;
    writeln!(out, "arch {hidden_width} {hidden_layers} {}", model.ensemble.size())?;
    let mut line = String::from("normalizer");
    push_hex(&mut line, &model.normalizer.flat_stats());
    writeln!(out, "{line}")?;
    for (i, member) in model.ensemble.members().iter().enumerate() {
        let mut line = format!("member {i}");
        push_hex(&mut line, member.params());
        writeln!(out, "{line}")?;
    }
    let mut line = String::from("reward");
    push_hex(&mut line, model.reward.net().params());
    writeln!(out, "{line}")?;
    Ok(())
}

pub fn checkpoint_to_string(model: &WorldModel) -> Result<String> {
    let mut buf = Vec::new();
    save_checkpoint(model, &mut buf)?;
    String::from_utf8(buf).map_err(|e| FeefError::MalformedCheckpoint(e.to_string()))
}

fn bad(msg: impl Into<String>) -> FeefError {
    FeefError::MalformedCheckpoint(msg.into())
}

fn parse_usize(token: Option<&&str>, what: &str) -> Result<usize> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(format!("missing or invalid {what}")))
}

pub fn load_checkpoint(input: impl BufRead) -> Result<WorldModel> {
    let mut lines = input.lines();
    let magic = lines.next().transpose()?.ok_or_else(|| bad("empty checkpoint"))?;
    if magic.trim() != MAGIC {
        return Err(bad(format!("bad header '{}'", magic.trim())));
    }

    let mut d_s = None;
    let mut d_a = None;
    let mut arch = None;
    let mut normalizer = None;
    let mut members: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut reward = None;
    for line in lines {
        let line = line?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first() {
            None => continue,
            Some(&"dims") => {
                d_s = Some(parse_usize(tokens.get(1), "state dim")?);
                d_a = Some(parse_usize(tokens.get(2), "action dim")?);
            }
            Some(&"arch") => {
                arch = Some((
                    parse_usize(tokens.get(1), "hidden width")?,
                    parse_usize(tokens.get(2), "hidden layers")?,
                    parse_usize(tokens.get(3), "ensemble size")?,
                ));
            }
            Some(&"normalizer") => normalizer = Some(parse_hex(&tokens[1..])?),
            Some(&"member") => {
                let idx = parse_usize(tokens.get(1), "member index")?;
                members.push((idx, parse_hex(&tokens[2..])?));
            }
            Some(&"reward") => reward = Some(parse_hex(&tokens[1..])?),
            Some(other) => return Err(bad(format!("unknown section '{other}'"))),
        }
    }

    let d_s = d_s.ok_or_else(|| bad("missing dims"))?;
    let d_a = d_a.ok_or_else(|| bad("missing dims"))?;
    let (width, layers, size) = arch.ok_or_else(|| bad("missing arch"))?;
    let stats = normalizer.ok_or_else(|| bad("missing normalizer"))?;
    let normalizer = Normalizer::from_flat_stats(d_s, d_a, &stats)
        .ok_or_else(|| bad("normalizer stats length mismatch"))?;
    if members.len() != size {
        return Err(bad(format!("expected {size} members, found {}", members.len())));
    }
    members.sort_by_key(|(i, _)| *i);
    let t_dims = WorldModel::transition_dims(d_s, d_a, width, layers);
    let mut nets = Vec::with_capacity(size);
    for (expected, (idx, params)) in members.into_iter().enumerate() {
        if idx != expected {
            return Err(bad(format!("member indices not contiguous at {idx}")));
        }
        let mut net = DenseNet::zeros(&t_dims, WorldModel::TRANSITION_ACTIVATION);
        net.set_params(&params)
            .map_err(|e| bad(format!("member {idx}: {e}")))?;
        nets.push(net);
    }
    let r_dims = WorldModel::reward_dims(d_s, width, layers);
    let mut reward_net = DenseNet::zeros(&r_dims, WorldModel::REWARD_ACTIVATION);
    reward_net
        .set_params(&reward.ok_or_else(|| bad("missing reward section"))?)
        .map_err(|e| bad(format!("reward net: {e}")))?;

    Ok(WorldModel {
        ensemble: TransitionEnsemble::new(nets, d_s, d_a)?,
        reward: RewardModel::new(reward_net)?,
        normalizer,
    })
}
