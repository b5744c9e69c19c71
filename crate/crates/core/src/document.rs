//! Text formats for instances.
//!
//! Native format, one field or edge per line, `#` starts a comment:
//!
//! ```text
//! directed = false
//! vertex_count = 2
//! s = 0
//! t = 1
//! k = 1
//! edge id=0 u=0 v=1 w=1 faulty=true
//! ```
//!
//! DIMACS-like dialect with 1-based vertices and a `faulty` column:
//!
//! ```text
//! c comment
//! p ftp <n> <m> <s> <t> <k> [directed|undirected]
//! e <u> <v> <w> <0|1>
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Native,
    Dimacs,
}

fn value<T: FromStr>(line: usize, field: &str, text: &str) -> Result<T> {
    text.parse().map_err(|_| Error::parse(line, format!("bad value {text:?} for {field}")))
}

pub fn parse_native(text: &str) -> Result<Instance> {
    let mut directed = None;
    let mut vertex_count = None;
    let mut s = None;
    let mut t = None;
    let mut k = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("edge").filter(|r| r.starts_with(char::is_whitespace)) {
            let (mut id, mut u, mut v, mut w, mut faulty) = (None, None, None, None, None);
            for pair in rest.split_whitespace() {
                let (key, val) = pair.split_once('=').ok_or_else(|| Error::parse(line, format!("expected key=value, got {pair:?}")))?;
                let slot_taken = match key {
                    "id" => id.replace(value(line, key, val)?).is_some(),
                    "u" => u.replace(value(line, key, val)?).is_some(),
                    "v" => v.replace(value(line, key, val)?).is_some(),
                    "w" => w.replace(value(line, key, val)?).is_some(),
                    "faulty" => faulty.replace(value(line, key, val)?).is_some(),
                    _ => return Err(Error::parse(line, format!("unknown edge field {key:?}"))),
                };
                if slot_taken {
                    return Err(Error::parse(line, format!("repeated edge field {key:?}")));
                }
            }
            let missing = |name: &str| Error::parse(line, format!("edge is missing {name}"));
            edges.push(Edge {
                id: id.ok_or_else(|| missing("id"))?,
                u: u.ok_or_else(|| missing("u"))?,
                v: v.ok_or_else(|| missing("v"))?,
                w: w.ok_or_else(|| missing("w"))?,
                faulty: faulty.ok_or_else(|| missing("faulty"))?,
            });
            continue;
        }
        let (key, val) = body.split_once('=').ok_or_else(|| Error::parse(line, format!("expected `field = value`, got {body:?}")))?;
        let (key, val) = (key.trim(), val.trim());
        let taken = match key {
            "directed" => directed.replace(value(line, key, val)?).is_some(),
            "vertex_count" => vertex_count.replace(value(line, key, val)?).is_some(),
            "s" => s.replace(value(line, key, val)?).is_some(),
            "t" => t.replace(value(line, key, val)?).is_some(),
            "k" => k.replace(value(line, key, val)?).is_some(),
            _ => return Err(Error::parse(line, format!("unknown field {key:?}"))),
        };
        if taken {
            return Err(Error::parse(line, format!("repeated field {key:?}")));
        }
    }
    let end = text.lines().count().max(1);
    let missing = |name: &str| Error::parse(end, format!("missing field {name}"));
    let instance = Instance {
        directed: directed.ok_or_else(|| missing("directed"))?,
        vertex_count: vertex_count.ok_or_else(|| missing("vertex_count"))?,
        edges,
        s: s.ok_or_else(|| missing("s"))?,
        t: t.ok_or_else(|| missing("t"))?,
        k: k.ok_or_else(|| missing("k"))?,
    };
    instance.validate()?;
    Ok(instance)
}

pub fn to_native(instance: &Instance) -> String {
    let mut out = format!(
        "directed = {}\nvertex_count = {}\ns = {}\nt = {}\nk = {}\n",
        instance.directed, instance.vertex_count, instance.s, instance.t, instance.k
    );
    for e in &instance.edges {
        let _ = writeln!(out, "edge id={} u={} v={} w={} faulty={}", e.id, e.u, e.v, e.w, e.faulty);
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<Instance> {
    let mut instance: Option<(Instance, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if instance.is_some() {
                    return Err(Error::parse(line, "repeated problem line"));
                }
                if !(7..=8).contains(&fields.len()) || fields[1] != "ftp" {
                    return Err(Error::parse(line, "expected `p ftp n m s t k [directed|undirected]`"));
                }
                let n: usize = value(line, "n", fields[2])?;
                let m: usize = value(line, "m", fields[3])?;
                let s = one_based(line, "s", fields[4])?;
                let t = one_based(line, "t", fields[5])?;
                let k = value(line, "k", fields[6])?;
                let directed = match fields.get(7).copied() {
                    None | Some("undirected") => false,
                    Some("directed") => true,
                    Some(other) => return Err(Error::parse(line, format!("unknown orientation {other:?}"))),
                };
                instance = Some((Instance::new(directed, n, s, t, k), m));
            }
            Some("e") => {
                let (inst, _) = instance.as_mut().ok_or_else(|| Error::parse(line, "edge before problem line"))?;
                if fields.len() != 5 {
                    return Err(Error::parse(line, "expected `e u v w faulty`"));
                }
                let faulty = match fields[4] {
                    "0" => false,
                    "1" => true,
                    other => return Err(Error::parse(line, format!("faulty column must be 0 or 1, got {other:?}"))),
                };
                let (u, v) = (one_based(line, "u", fields[1])?, one_based(line, "v", fields[2])?);
                inst.add_edge(u, v, value(line, "w", fields[3])?, faulty);
            }
            Some(other) => return Err(Error::parse(line, format!("unknown line type {other:?}"))),
        }
    }
    let (instance, m) = instance.ok_or_else(|| Error::parse(1, "missing problem line"))?;
    if instance.edge_count() != m {
        return Err(Error::parse(text.lines().count().max(1), format!("problem line announces {m} edges, found {}", instance.edge_count())));
    }
    instance.validate()?;
    Ok(instance)
}

fn one_based(line: usize, field: &str, text: &str) -> Result<usize> {
    let v: usize = value(line, field, text)?;
    v.checked_sub(1).ok_or_else(|| Error::parse(line, format!("{field} is 1-based, got 0")))
}

/// Edge ids are implied by line order, so the instance is canonicalized first.
pub fn to_dimacs(instance: &Instance) -> String {
    let inst = instance.canonical();
    let mut out = format!(
        "p ftp {} {} {} {} {} {}\n",
        inst.vertex_count,
        inst.edge_count(),
        inst.s + 1,
        inst.t + 1,
        inst.k,
        if inst.directed { "directed" } else { "undirected" }
    );
    for e in &inst.edges {
        let _ = writeln!(out, "e {} {} {} {}", e.u + 1, e.v + 1, e.w, u8::from(e.faulty));
    }
    out
}

pub fn parse(text: &str, format: Format) -> Result<Instance> {
    match format {
        Format::Native => parse_native(text),
        Format::Dimacs => parse_dimacs(text),
    }
}

pub fn serialize(instance: &Instance, format: Format) -> String {
    match format {
        Format::Native => to_native(instance),
        Format::Dimacs => to_dimacs(instance),
    }
}

/// SHA-256 of the native form of the canonicalized instance, in hex.
pub fn digest(instance: &Instance) -> String {
    let hash = Sha256::digest(to_native(&instance.canonical()).as_bytes());
    hash.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
