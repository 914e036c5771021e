//! Text formats: the QUBO matrix file and its decode-map sidecar.
//!
//! QUBO file:
//!
//! ```text
//! QUBO 1
//! VARS <n>
//! OFFSET <decimal>
//! <i> <j> <decimal>      one line per nonzero entry, 0 <= i <= j < n, ascending
//! ```
//!
//! Lines starting with `#` are comments. Decimals are written in their
//! shortest round-trip form, so reading a written file reproduces the
//! matrix bit for bit.
//!
//! Decode map:
//!
//! ```text
//! DECODEMAP 1
//! BITS <n>
//! ENCODING <var> <continuous|binary> onehot|custom|identity
//! ENCODING <var> <continuous|binary> fixed_point <r_min> <r_max> <signed>
//! BIT <index> <label> <weight>       belongs to the preceding ENCODING
//! AUX <index> <label> <left-index> <right-index>
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::poly::{Var, VarKind};

use super::{AuxDef, DecodeRegistry, Encoding, QuboMatrix, Scheme};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Truncated(&'static str),
    #[error("inconsistent decode map: {0}")]
    Inconsistent(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based numbers; comments and blanks removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((k + 1, t.split_whitespace().collect()))
        }
    })
}

fn parse_real(tok: &str, line: usize) -> Result<f64, FormatError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| syntax(line, format!("`{tok}` is not a decimal number")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("`{tok}` is not finite")));
    }
    Ok(v)
}

fn parse_index(tok: &str, line: usize) -> Result<usize, FormatError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("`{tok}` is not a nonnegative integer")))
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    keyword: &'static str,
) -> Result<(usize, &'a str), FormatError> {
    let (line, toks) = lines.next().ok_or(FormatError::Truncated(keyword))?;
    match toks[..] {
        [k, v] if k == keyword => Ok((line, v)),
        _ => Err(syntax(line, format!("expected `{keyword} <value>`"))),
    }
}

pub fn write_qubo(q: &QuboMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "QUBO 1").unwrap();
    writeln!(out, "VARS {}", q.n()).unwrap();
    writeln!(out, "OFFSET {}", q.offset()).unwrap();
    for ((i, j), c) in q.entries() {
        writeln!(out, "{i} {j} {c}").unwrap();
    }
    out
}

pub fn read_qubo(text: &str) -> Result<QuboMatrix, FormatError> {
    let mut lines = content_lines(text);
    let (line, version) = expect_header(&mut lines, "QUBO")?;
    if version != "1" {
        return Err(syntax(line, format!("unsupported version `{version}`")));
    }
    let (line, n) = expect_header(&mut lines, "VARS")?;
    let n = parse_index(n, line)?;
    let (line, offset) = expect_header(&mut lines, "OFFSET")?;
    let mut q = QuboMatrix::new(n);
    q.set_offset(parse_real(offset, line)?);
    let mut last: Option<(usize, usize)> = None;
    for (line, toks) in lines {
        let [i, j, c] = toks[..] else {
            return Err(syntax(line, "expected `<i> <j> <value>`"));
        };
        let (i, j) = (parse_index(i, line)?, parse_index(j, line)?);
        let c = parse_real(c, line)?;
        if i > j || j >= n {
            return Err(syntax(line, format!("entry ({i}, {j}) outside 0 <= i <= j < {n}")));
        }
        if last.is_some_and(|prev| prev >= (i, j)) {
            return Err(syntax(line, format!("entry ({i}, {j}) is out of order or repeated")));
        }
        last = Some((i, j));
        q.add(i, j, c);
    }
    Ok(q)
}

fn kind_name(v: &Var) -> &'static str {
    if v.is_binary() {
        "binary"
    } else {
        "continuous"
    }
}

pub fn write_decode_map(registry: &DecodeRegistry) -> String {
    let mut out = String::new();
    writeln!(out, "DECODEMAP 1").unwrap();
    writeln!(out, "BITS {}", registry.bit_count()).unwrap();
    for enc in registry.encodings() {
        let src = enc.source();
        let scheme = match enc.scheme() {
            Scheme::OneHot => "onehot".to_string(),
            Scheme::Custom => "custom".to_string(),
            Scheme::Identity => "identity".to_string(),
            Scheme::FixedPoint { r_min, r_max, signed } => format!("fixed_point {r_min} {r_max} {signed}"),
        };
        writeln!(out, "ENCODING {} {} {}", src, kind_name(src), scheme).unwrap();
        for (bit, w) in enc.bits() {
            writeln!(out, "BIT {} {} {}", registry.index_of(bit).unwrap(), bit, w).unwrap();
        }
    }
    for a in registry.aux_defs() {
        writeln!(
            out,
            "AUX {} {} {} {}",
            registry.index_of(&a.var).unwrap(),
            a.var,
            registry.index_of(&a.left).unwrap(),
            registry.index_of(&a.right).unwrap()
        )
        .unwrap();
    }
    out
}

struct PendingEncoding {
    source: Var,
    scheme: Scheme,
    bits: Vec<(Var, f64)>,
}

pub fn read_decode_map(text: &str) -> Result<DecodeRegistry, FormatError> {
    let mut lines = content_lines(text);
    let (line, version) = expect_header(&mut lines, "DECODEMAP")?;
    if version != "1" {
        return Err(syntax(line, format!("unsupported version `{version}`")));
    }
    let (line, n) = expect_header(&mut lines, "BITS")?;
    let n = parse_index(n, line)?;

    let mut labels: Vec<Option<Var>> = vec![None; n];
    let mut encodings: Vec<PendingEncoding> = Vec::new();
    let mut aux: Vec<AuxDef> = Vec::new();
    let mut factors: HashMap<Var, Vec<Var>> = HashMap::new();

    let claim = |labels: &mut Vec<Option<Var>>, idx: usize, var: Var, line: usize| {
        if idx >= n {
            return Err(syntax(line, format!("bit index {idx} out of range")));
        }
        if labels[idx].is_some() {
            return Err(syntax(line, format!("bit index {idx} defined twice")));
        }
        labels[idx] = Some(var);
        Ok(())
    };

    for (line, toks) in lines {
        match toks.first().copied() {
            Some("ENCODING") => {
                let (name, kind, rest) = match &toks[..] {
                    [_, name, kind, rest @ ..] if !rest.is_empty() => (*name, *kind, rest),
                    _ => return Err(syntax(line, "expected `ENCODING <var> <kind> <scheme>`")),
                };
                let kind = match kind {
                    "continuous" => VarKind::Continuous,
                    "binary" => VarKind::Binary,
                    other => return Err(syntax(line, format!("unknown variable kind `{other}`"))),
                };
                let scheme = match rest {
                    ["onehot"] => Scheme::OneHot,
                    ["custom"] => Scheme::Custom,
                    ["identity"] => Scheme::Identity,
                    ["fixed_point", r_min, r_max, signed] => Scheme::FixedPoint {
                        r_min: r_min.parse().map_err(|_| syntax(line, "bad r_min"))?,
                        r_max: r_max.parse().map_err(|_| syntax(line, "bad r_max"))?,
                        signed: signed.parse().map_err(|_| syntax(line, "bad signed flag"))?,
                    },
                    _ => return Err(syntax(line, "unknown encoding scheme")),
                };
                encodings.push(PendingEncoding {
                    source: Var::new(name, kind),
                    scheme,
                    bits: Vec::new(),
                });
            }
            Some("BIT") => {
                let [_, idx, label, weight] = toks[..] else {
                    return Err(syntax(line, "expected `BIT <index> <label> <weight>`"));
                };
                let enc = encodings
                    .last_mut()
                    .ok_or_else(|| syntax(line, "BIT before any ENCODING"))?;
                let idx = parse_index(idx, line)?;
                let weight = parse_real(weight, line)?;
                let var = if enc.scheme == Scheme::Identity {
                    enc.source.clone()
                } else {
                    Var::binary(label)
                };
                if var.name() != label {
                    return Err(syntax(line, "identity bit must carry the variable's own name"));
                }
                claim(&mut labels, idx, var.clone(), line)?;
                enc.bits.push((var, weight));
            }
            Some("AUX") => {
                let [_, idx, label, left, right] = toks[..] else {
                    return Err(syntax(line, "expected `AUX <index> <label> <left> <right>`"));
                };
                let idx = parse_index(idx, line)?;
                let var = Var::auxiliary(label);
                let side = |tok: &str| -> Result<Var, FormatError> {
                    let i = parse_index(tok, line)?;
                    labels
                        .get(i)
                        .cloned()
                        .flatten()
                        .ok_or_else(|| syntax(line, format!("factor bit {i} is not defined yet")))
                };
                let (left, right) = (side(left)?, side(right)?);
                claim(&mut labels, idx, var.clone(), line)?;
                let flat = |v: &Var| factors.get(v).cloned().unwrap_or_else(|| vec![v.clone()]);
                let mut fs = flat(&left);
                fs.extend(flat(&right));
                fs.sort();
                factors.insert(var.clone(), fs.clone());
                aux.push(AuxDef {
                    var,
                    left,
                    right,
                    factors: fs,
                });
            }
            _ => return Err(syntax(line, "expected ENCODING, BIT or AUX")),
        }
    }

    if let Some(i) = labels.iter().position(Option::is_none) {
        return Err(FormatError::Inconsistent(format!("bit {i} is never defined")));
    }
    let mut map = BTreeMap::new();
    for e in encodings {
        if e.bits.is_empty() {
            return Err(FormatError::Inconsistent(format!("encoding of `{}` has no bits", e.source)));
        }
        let source = e.source.clone();
        if map.insert(source.clone(), Encoding::from_parts(e.source, e.bits, e.scheme)).is_some() {
            return Err(FormatError::Inconsistent(format!("`{source}` is encoded twice")));
        }
    }
    let registry =
        DecodeRegistry::new(map, aux).map_err(|e| FormatError::Inconsistent(e.to_string()))?;
    for (i, label) in labels.iter().enumerate() {
        if registry.index_of(label.as_ref().unwrap()) != Some(i) {
            return Err(FormatError::Inconsistent(format!(
                "bit {i} is not in canonical position"
            )));
        }
    }
    Ok(registry)
}
