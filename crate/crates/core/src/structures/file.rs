use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::symbolic::{SymCard, SymbolicEqStructure};
use super::{Elem, Structure};
use crate::syntax::{FnProfile, Sort, SymbolKind, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct StructureParseError {
    pub line: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Item {
    Word(String),
    Group(Vec<String>),
    Arrow,
}

fn items(s: &str) -> Result<Vec<Item>, String> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() || c == ',' {
            chars.next();
        } else if c == '(' {
            chars.next();
            let mut inner = String::new();
            loop {
                match chars.next() {
                    Some(')') => break,
                    Some(ch) => inner.push(ch),
                    None => return Err("unclosed `(`".into()),
                }
            }
            out.push(Item::Group(
                inner
                    .split(',')
                    .map(|w| w.trim().to_string())
                    .filter(|w| !w.is_empty())
                    .collect(),
            ));
        } else if c == '-' {
            chars.next();
            if chars.next() != Some('>') {
                return Err("expected `->`".into());
            }
            out.push(Item::Arrow);
        } else {
            let mut w = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || "(),-".contains(ch) {
                    break;
                }
                w.push(ch);
                chars.next();
            }
            out.push(Item::Word(w));
        }
    }
    Ok(out)
}

fn parse_sorts(s: &str) -> Result<Vec<Sort>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .map(|w| w.parse().map_err(|_| format!("bad sort `{w}`")))
        .collect()
}

/// Splits `name(0,1)->2` into its name and the optional profile pieces.
fn split_head(head: &str) -> Result<(String, Option<Vec<Sort>>, Option<Sort>), String> {
    let head = head.trim();
    let (name, rest) = match head.find(['(', ':']) {
        Some(i) => (&head[..i], head[i..].trim()),
        None => (head, ""),
    };
    let name = name.trim().to_string();
    if rest.is_empty() {
        return Ok((name, None, None));
    }
    if let Some(r) = rest.strip_prefix(':') {
        return Ok((name, None, Some(parse_sort(r)?)));
    }
    let close = rest.find(')').ok_or("unclosed profile")?;
    let args = parse_sorts(&rest[1..close])?;
    let tail = rest[close + 1..].trim();
    let result = match tail.strip_prefix("->").or_else(|| tail.strip_prefix(':')) {
        Some(r) => Some(parse_sort(r)?),
        None if tail.is_empty() => None,
        None => return Err(format!("unexpected `{tail}`")),
    };
    Ok((name, Some(args), result))
}

fn parse_sort(s: &str) -> Result<Sort, String> {
    s.trim().parse().map_err(|_| format!("bad sort `{}`", s.trim()))
}

/// Parses the structure file format:
///
/// ```text
/// SORTS 0
/// DOMAIN 0: a b c
/// REL R(0,0): (a,b) (b,c)
/// REL P: a
/// FUN s(0)->0: a->b b->c c->c
/// CONST z = a
/// ```
///
/// Profiles may be omitted when the sorts of the listed elements determine
/// them. `REL p(): ()` makes a proposition true and `REL p():` false.
pub fn parse_structure(text: &str) -> Result<Structure, StructureParseError> {
    let mut voc = Vocabulary::new();
    let mut domains: BTreeMap<Sort, BTreeSet<Elem>> = BTreeMap::new();
    let mut ids: BTreeMap<String, Elem> = BTreeMap::new();
    let mut labels: BTreeMap<Elem, String> = BTreeMap::new();
    let mut relations = BTreeMap::new();
    let mut functions = BTreeMap::new();
    let mut constants = BTreeMap::new();
    type Pending = (usize, String, Option<Vec<Sort>>, Option<Sort>, Vec<Item>);
    let mut pending: Vec<(&str, Pending)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| StructureParseError { line: lineno + 1, msg };
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw.trim_end_matches(':') {
            "SORTS" => {
                for s in parse_sorts(rest.trim_start_matches(':')).map_err(err)? {
                    voc.sorts.insert(s);
                }
            }
            "DOMAIN" => {
                let (s, elems) = rest.split_once(':').ok_or_else(|| err("expected `DOMAIN s: ...`".into()))?;
                let s = parse_sort(s).map_err(err)?;
                voc.sorts.insert(s);
                let dom = domains.entry(s).or_default();
                for w in elems.split_whitespace() {
                    let next = ids.len() as Elem;
                    let id = *ids.entry(w.to_string()).or_insert(next);
                    labels.insert(id, w.to_string());
                    dom.insert(id);
                }
            }
            kw @ ("REL" | "FUN") => {
                let colon = find_body_colon(rest).ok_or_else(|| err("expected `:`".into()))?;
                let (name, args, result) = split_head(&rest[..colon]).map_err(err)?;
                let body = items(&rest[colon + 1..]).map_err(err)?;
                pending.push((kw, (lineno + 1, name, args, result, body)));
            }
            "CONST" => {
                let (head, e) = rest.split_once('=').ok_or_else(|| err("expected `CONST c = a`".into()))?;
                let (name, _, sort) = split_head(head).map_err(err)?;
                let e = e.trim();
                let id = *ids.get(e).ok_or_else(|| err(format!("unknown element `{e}`")))?;
                let sort = match sort {
                    Some(s) => s,
                    None => unique_sort(&domains, id).map_err(err)?,
                };
                voc.declare(&name, SymbolKind::Constant(sort)).map_err(|e| err(e.to_string()))?;
                constants.insert(name, id);
            }
            other => return Err(err(format!("unknown section `{other}`"))),
        }
    }
    for (kw, (line, name, args, result, body)) in pending {
        let err = |msg: String| StructureParseError { line, msg };
        let elem = |w: &str| ids.get(w).copied().ok_or_else(|| err(format!("unknown element `{w}`")));
        if kw == "REL" {
            let mut tuples = BTreeSet::new();
            for it in &body {
                let t: Vec<Elem> = match it {
                    Item::Word(w) => vec![elem(w)?],
                    Item::Group(ws) => ws.iter().map(|w| elem(w)).collect::<Result<_, _>>()?,
                    Item::Arrow => return Err(err("unexpected `->`".into())),
                };
                tuples.insert(t);
            }
            let profile = match args {
                Some(p) => p,
                None => infer_profile(&domains, tuples.iter()).map_err(err)?,
            };
            voc.declare(&name, SymbolKind::Relation(profile))
                .map_err(|e| err(e.to_string()))?;
            relations.insert(name, tuples);
        } else {
            let mut table = BTreeMap::new();
            let mut i = 0;
            while i < body.len() {
                let lhs: Vec<Elem> = match &body[i] {
                    Item::Word(w) => vec![elem(w)?],
                    Item::Group(ws) => ws.iter().map(|w| elem(w)).collect::<Result<_, _>>()?,
                    Item::Arrow => return Err(err("unexpected `->`".into())),
                };
                let (Some(Item::Arrow), Some(Item::Word(v))) = (body.get(i + 1), body.get(i + 2)) else {
                    return Err(err("expected `args->value`".into()));
                };
                table.insert(lhs, elem(v)?);
                i += 3;
            }
            let arg_sorts = match args {
                Some(p) => p,
                None => infer_profile(&domains, table.keys()).map_err(err)?,
            };
            let result = match result {
                Some(r) => r,
                None => {
                    let vals: Vec<Vec<Elem>> = table.values().map(|v| vec![*v]).collect();
                    infer_profile(&domains, vals.iter()).map_err(err)?[0]
                }
            };
            let profile = FnProfile { args: arg_sorts, result };
            voc.declare(&name, SymbolKind::Function(profile))
                .map_err(|e| err(e.to_string()))?;
            functions.insert(name, table);
        }
    }
    let m = Structure {
        voc,
        domains,
        relations,
        functions,
        constants,
        labels,
    };
    m.validate().map_err(|e| StructureParseError {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(m)
}

/// Position of the colon that ends a symbol head such as `R`, `R(0,0)`,
/// `f(0)->0` or `f(0):0`.
fn find_body_colon(rest: &str) -> Option<usize> {
    let mut i = rest.find(['(', ':'])?;
    if rest[i..].starts_with('(') {
        i += rest[i..].find(')')? + 1;
    }
    let tail = &rest[i..];
    let t = tail.trim_start();
    let skip = tail.len() - t.len();
    if let Some(r) = t.strip_prefix("->") {
        let digits = r.trim_start();
        let n = digits.chars().take_while(|c| c.is_ascii_digit()).count();
        let used = t.len() - digits.len() + n;
        return Some(i + skip + used + tail[skip + used..].find(':')?);
    }
    if let Some(r) = t.strip_prefix(':') {
        let d = r.trim_start();
        let n = d.chars().take_while(|c| c.is_ascii_digit()).count();
        if n > 0 && d[n..].trim_start().starts_with(':') {
            let at = t.len() - d.len() + n;
            return Some(i + skip + at + t[at..].find(':')?);
        }
        return Some(i + skip);
    }
    None
}

fn unique_sort(domains: &BTreeMap<Sort, BTreeSet<Elem>>, e: Elem) -> Result<Sort, String> {
    let sorts: Vec<Sort> = domains
        .iter()
        .filter(|(_, d)| d.contains(&e))
        .map(|(s, _)| *s)
        .collect();
    match sorts.as_slice() {
        [s] => Ok(*s),
        [] => Err("element is in no domain".into()),
        _ => Err("element lies in several sorts; give the profile explicitly".into()),
    }
}

fn infer_profile<'a>(
    domains: &BTreeMap<Sort, BTreeSet<Elem>>,
    tuples: impl Iterator<Item = &'a Vec<Elem>>,
) -> Result<Vec<Sort>, String> {
    let tuples: Vec<&Vec<Elem>> = tuples.collect();
    let Some(first) = tuples.first() else {
        return Err("cannot infer the profile of an empty interpretation".into());
    };
    let mut out = Vec::new();
    for i in 0..first.len() {
        let mut cands: BTreeSet<Sort> = domains.keys().copied().collect();
        for t in &tuples {
            let e = *t.get(i).ok_or("tuples of different lengths")?;
            cands.retain(|s| domains[s].contains(&e));
        }
        match cands.len() {
            1 => out.push(*cands.iter().next().unwrap()),
            0 => return Err(format!("no sort fits position {i}")),
            _ => return Err(format!("position {i} fits several sorts; give the profile explicitly")),
        }
    }
    Ok(out)
}

fn join_sorts(s: &[Sort]) -> String {
    s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes the structure file format with explicit profiles.
impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |e: &Elem| self.label(*e);
        writeln!(f, "SORTS {}", self.voc.sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "))?;
        for (s, d) in &self.domains {
            writeln!(f, "DOMAIN {s}: {}", d.iter().map(l).collect::<Vec<_>>().join(" "))?;
        }
        for (r, p) in &self.voc.relations {
            let ts: Vec<String> = self.relations[r]
                .iter()
                .map(|t| format!("({})", t.iter().map(l).collect::<Vec<_>>().join(",")))
                .collect();
            let line = format!("REL {r}({}): {}", join_sorts(p), ts.join(" "));
            writeln!(f, "{}", line.trim_end())?;
        }
        for (n, p) in &self.voc.functions {
            let ts: Vec<String> = self.functions[n]
                .iter()
                .map(|(a, v)| format!("({})->{}", a.iter().map(l).collect::<Vec<_>>().join(","), l(v)))
                .collect();
            writeln!(f, "FUN {n}({})->{}: {}", join_sorts(&p.args), p.result, ts.join(" "))?;
        }
        for (c, s) in &self.voc.constants {
            writeln!(f, "CONST {c}:{s} = {}", l(&self.constants[c]))?;
        }
        Ok(())
    }
}

/// Parses `EQGROUPS: (aleph 1, aleph 1); (fin 3, aleph 0)`.
pub fn parse_symbolic(text: &str) -> Result<SymbolicEqStructure, StructureParseError> {
    let err = |msg: &str| StructureParseError {
        line: 1,
        msg: msg.to_string(),
    };
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ");
    let rest = body
        .trim()
        .strip_prefix("EQGROUPS")
        .ok_or_else(|| err("expected `EQGROUPS:`"))?
        .trim_start()
        .strip_prefix(':')
        .ok_or_else(|| err("expected `:`"))?;
    let card = |s: &str| -> Result<SymCard, StructureParseError> {
        let mut w = s.split_whitespace();
        let kind = w.next().ok_or_else(|| err("missing cardinal"))?;
        let n = w.next().ok_or_else(|| err("missing cardinal value"))?;
        match kind {
            "fin" => n.parse().map(SymCard::Fin).map_err(|_| err("bad number")),
            "aleph" => n.parse().map(SymCard::Aleph).map_err(|_| err("bad aleph index")),
            _ => Err(err("cardinal must be `fin n` or `aleph k`")),
        }
    };
    let mut groups = Vec::new();
    for g in rest.split(';').map(str::trim).filter(|g| !g.is_empty()) {
        let inner = g
            .strip_prefix('(')
            .and_then(|g| g.strip_suffix(')'))
            .ok_or_else(|| err("group must be `(count, size)`"))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| err("group must be `(count, size)`"))?;
        groups.push((card(a)?, card(b)?));
    }
    SymbolicEqStructure::new(groups).map_err(|m| err(&m))
}
