//! Compact sampler spec strings such as `sb2(n=8,eps=0.125)` or
//! `xor(sb2(n=8,eps=0.25),akw(n=8,b=2,k=4,delta=1e-3))`.

use std::collections::HashMap;

use super::sampler::{self, Sampler};
use super::RandError;

enum Arg {
    Named(String, String),
    Nested(Sampler),
    Bare(String),
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

fn err(msg: impl Into<String>) -> RandError {
    RandError::Parse(msg.into())
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| !matches!(c, b'(' | b')' | b',' | b'=')) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).trim().to_string()
    }

    fn expect(&mut self, c: u8) -> Result<(), RandError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn sampler(&mut self) -> Result<Sampler, RandError> {
        let name = self.ident();
        self.expect(b'(')?;
        let mut args = Vec::new();
        if self.peek() != Some(b')') {
            loop {
                args.push(self.arg()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    _ => break,
                }
            }
        }
        self.expect(b')')?;
        build(&name, args)
    }

    fn arg(&mut self) -> Result<Arg, RandError> {
        let save = self.pos;
        let word = self.ident();
        match self.peek() {
            Some(b'=') => {
                self.pos += 1;
                Ok(Arg::Named(word, self.ident()))
            }
            Some(b'(') => {
                self.pos = save;
                Ok(Arg::Nested(self.sampler()?))
            }
            _ => Ok(Arg::Bare(word)),
        }
    }
}

fn build(name: &str, args: Vec<Arg>) -> Result<Sampler, RandError> {
    let mut named = HashMap::new();
    let mut nested = Vec::new();
    let mut bare = Vec::new();
    for a in args {
        match a {
            Arg::Named(k, v) => {
                named.insert(k, v);
            }
            Arg::Nested(s) => nested.push(s),
            Arg::Bare(b) => bare.push(b),
        }
    }
    let num = |key: &str| -> Result<f64, RandError> {
        named
            .get(key)
            .ok_or_else(|| err(format!("{name}: missing {key}")))?
            .parse::<f64>()
            .map_err(|_| err(format!("{name}: bad value for {key}")))
    };
    let int = |key: &str| -> Result<usize, RandError> {
        let v = num(key)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(err(format!("{name}: {key} must be a non-negative integer")));
        }
        Ok(v as usize)
    };
    let list = |text: &str| -> Result<Vec<usize>, RandError> {
        text.split(':').map(|t| t.trim().parse::<usize>().map_err(|_| err(format!("{name}: bad list entry {t}")))).collect()
    };
    let one = |mut v: Vec<Sampler>| -> Result<Sampler, RandError> {
        if v.len() != 1 {
            return Err(err(format!("{name} takes exactly one sampler")));
        }
        Ok(v.remove(0))
    };
    match name {
        "uni" => match named.get("p") {
            Some(_) => Ok(sampler::uniform_fp(int("n")?, int("p")? as u32)),
            None => Ok(sampler::uniform(int("n")?)),
        },
        "zero" => Ok(sampler::zeros(int("n")?)),
        "ones" => Ok(sampler::ones(int("n")?)),
        "const" => {
            let v = named.get("v").ok_or_else(|| err("const: missing v"))?;
            let q = if named.contains_key("q") { int("q")? as u32 } else { 2 };
            let vals = list(v)?;
            if vals.iter().any(|&x| x >= q as usize) {
                return Err(err("const: value outside the alphabet"));
            }
            Ok(sampler::constant(vals.into_iter().map(|x| x as u8).collect(), q))
        }
        "sb2" => sampler::small_bias_f2(int("n")?, num("eps")?),
        "sbp" => sampler::small_bias_fp(int("n")?, int("p")? as u64, num("eps")?),
        "viola" => sampler::viola_sum(int("n")?, int("p")? as u64, int("d")?, num("eps")?),
        "kwise" => sampler::kwise_hash(int("n")?, int("r")?, int("k")?),
        "kwb" => sampler::kwise_biased(int("n")?, int("b")?, int("k")?),
        "akw" => sampler::almost_kwise_biased(int("n")?, int("b")?, int("k")?, num("delta")?),
        "xor" => sampler::xor_combine(nested),
        "sum" => sampler::sum_mod_p(nested),
        "pr" => Ok(sampler::power_residue_bits(one(nested)?)),
        "not" => Ok(sampler::complement(one(nested)?)),
        "fk" => {
            if nested.len() != 3 {
                return Err(err("fk takes base, d and t"));
            }
            let mut it = nested.into_iter();
            let (b, d, t) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
            sampler::fk_layer(b, d, t)
        }
        "perm" => {
            let perm = list(bare.first().ok_or_else(|| err("perm: missing permutation"))?)?;
            sampler::permuted(one(nested)?, perm)
        }
        other => Err(err(format!("unknown sampler '{other}'"))),
    }
}

/// Parses a sampler spec string.
pub fn parse_sampler(spec: &str) -> Result<Sampler, RandError> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { s: compact.as_bytes(), pos: 0 };
    let s = p.sampler()?;
    if p.pos != compact.len() {
        return Err(err(format!("trailing input at offset {}", p.pos)));
    }
    Ok(s)
}
