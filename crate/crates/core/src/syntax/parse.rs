use std::collections::BTreeMap;

use super::formula::{Formula, Quantifier, Term};
use super::vocab::{FnProfile, Sort, SymbolKind, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("sort mismatch: `{term}` has sort {actual}, expected {expected}")]
    SortMismatch {
        term: String,
        expected: Sort,
        actual: Sort,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Eq,
    EqEq,
    Arrow,
    Iff,
    Caret,
    Less,
    Semi,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let two = |s: &str| text[i..].starts_with(s);
        let tok = if two("<->") {
            i += 3;
            Tok::Iff
        } else if two("->") {
            i += 2;
            Tok::Arrow
        } else if two("==") {
            i += 2;
            Tok::EqEq
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| ParseError::SyntaxError {
                pos: start,
                msg: "number too large".into(),
            })?;
            Tok::Num(n)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
            {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else {
            i += c.len_utf8();
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '^' => Tok::Caret,
                '<' => Tok::Less,
                ';' => Tok::Semi,
                _ => {
                    return Err(ParseError::SyntaxError {
                        pos: start,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    voc: &'a Vocabulary,
    /// Variables in scope, innermost last.
    vars: Vec<(String, Sort)>,
    /// Generator indices in scope.
    indices: Vec<(String, u64)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::SyntaxError {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Ident(s)) => {
                if let Some((_, v)) = self.indices.iter().rev().find(|(n, _)| *n == s) {
                    let v = *v;
                    self.pos += 1;
                    Ok(v)
                } else {
                    self.err("expected a number")
                }
            }
            _ => self.err("expected a number"),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    /// formula, optionally followed by `->` or `<->` and another formula.
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.formula()?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.pos += 1;
                let rhs = self.implication()?;
                Ok(Formula::implies(lhs, rhs))
            }
            Some(Tok::Iff) => {
                self.pos += 1;
                let rhs = self.implication()?;
                Ok(Formula::iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let head = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return self.primary(),
        };
        let q = match head.as_str() {
            "not" => {
                self.pos += 1;
                return Ok(Formula::not(self.formula()?));
            }
            "forall" => {
                self.pos += 1;
                Quantifier::Forall
            }
            "exists" => {
                self.pos += 1;
                Quantifier::Exists
            }
            "Qge" | "Qaleph" => {
                self.pos += 1;
                let at = self.offset();
                let k = u32::try_from(self.number()?).map_err(|_| ParseError::SyntaxError {
                    pos: at,
                    msg: "index too large".into(),
                })?;
                if head == "Qaleph" {
                    Quantifier::Aleph(k)
                } else if k == 0 {
                    return Err(ParseError::SyntaxError {
                        pos: at,
                        msg: "Qge needs a positive threshold".into(),
                    });
                } else {
                    Quantifier::AtLeast(k)
                }
            }
            _ => return self.primary(),
        };
        let var = self.ident()?;
        self.expect(Tok::Colon)?;
        let sort = self.number()? as Sort;
        self.expect(Tok::Dot)?;
        self.vars.push((var.clone(), sort));
        let body = self.implication();
        self.vars.pop();
        Ok(Formula::quant(q, &var, sort, body?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "top" => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Ident(s)) if s == "bottom" => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::Ident(s)) if s == "And" || s == "Or" => {
                self.pos += 1;
                let fs = self.list()?;
                if fs.is_empty() {
                    return self.err("empty connective list");
                }
                Ok(if s == "And" {
                    Formula::And(fs)
                } else {
                    Formula::Or(fs)
                })
            }
            Some(Tok::LParen) => {
                let save = self.pos;
                self.pos += 1;
                // A parenthesized term may start an equality, so try a formula first.
                if let Ok(f) = self.implication() {
                    if self.peek() == Some(&Tok::RParen) {
                        self.pos += 1;
                        return Ok(f);
                    }
                }
                self.pos = save;
                self.atomic()
            }
            Some(_) => self.atomic(),
            None => self.err("unexpected end of input"),
        }
    }

    /// `[f, ...]` or the generator form `[n<N] body`.
    fn list(&mut self) -> Result<Vec<Formula>, ParseError> {
        self.expect(Tok::LBrack)?;
        if let (Some(Tok::Ident(n)), Some(Tok::Less)) = (
            self.toks.get(self.pos).map(|t| &t.0),
            self.toks.get(self.pos + 1).map(|t| &t.0),
        ) {
            let n = n.clone();
            self.pos += 2;
            let bound = self.number()?;
            self.expect(Tok::RBrack)?;
            let start = self.pos;
            let mut out = Vec::new();
            let mut stop = start;
            for i in 0..bound {
                self.pos = start;
                self.indices.push((n.clone(), i));
                let f = self.formula();
                self.indices.pop();
                out.push(f?);
                stop = self.pos;
            }
            if bound == 0 {
                return self.err("generator bound must be positive");
            }
            self.pos = stop;
            return Ok(out);
        }
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RBrack) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.implication()?);
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBrack) => return Ok(out),
                _ => {
                    self.pos -= 1;
                    return self.err("expected `,` or `]`");
                }
            }
        }
    }

    fn atomic(&mut self) -> Result<Formula, ParseError> {
        if let Some(Tok::Ident(name)) = self.peek().cloned() {
            let shadowed = self.vars.iter().any(|(v, _)| *v == name);
            if !shadowed {
                if let Some(profile) = self.voc.relations.get(&name).cloned() {
                    self.pos += 1;
                    let args = if self.peek() == Some(&Tok::LParen) {
                        self.term_args()?
                    } else {
                        Vec::new()
                    };
                    if args.len() != profile.len() {
                        return self.err(format!(
                            "`{name}` takes {} arguments, got {}",
                            profile.len(),
                            args.len()
                        ));
                    }
                    for (t, s) in args.iter().zip(&profile) {
                        check_sort(t, *s)?;
                    }
                    return Ok(Formula::Atom { rel: name, args });
                }
            }
        }
        let lhs = self.term()?;
        match self.bump() {
            Some(Tok::Eq) => {
                let rhs = self.term()?;
                check_sort(&rhs, lhs.sort())?;
                Ok(Formula::Eq(lhs, rhs))
            }
            Some(Tok::EqEq) => {
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
            _ => {
                self.pos -= 1;
                self.err("expected `=` after term")
            }
        }
    }

    fn term_args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => return Ok(out),
                _ => {
                    self.pos -= 1;
                    return self.err("expected `,` or `)`");
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = match self.bump() {
            Some(Tok::Ident(s)) => s,
            Some(Tok::Num(n)) => n.to_string(),
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                return Ok(t);
            }
            _ => {
                self.pos -= 1;
                return self.err("expected a term");
            }
        };
        if let Some((_, s)) = self.vars.iter().rev().find(|(v, _)| *v == name) {
            return Ok(Term::var(&name, *s));
        }
        if let Some(s) = self.voc.constants.get(&name) {
            return Ok(Term::constant(&name, *s));
        }
        if let Some(p) = self.voc.functions.get(&name).cloned() {
            if self.peek() == Some(&Tok::Caret) {
                self.pos += 1;
                let times = self.number()?;
                let at = self.offset();
                let mut args = self.term_args()?;
                if p.args.len() != 1 || args.len() != 1 || p.args[0] != p.result {
                    return Err(ParseError::SyntaxError {
                        pos: at,
                        msg: format!("`{name}^k` needs a unary endofunction"),
                    });
                }
                let mut t = args.pop().unwrap();
                check_sort(&t, p.result)?;
                for _ in 0..times {
                    t = Term::app(&name, vec![t], p.result);
                }
                return Ok(t);
            }
            let args = self.term_args()?;
            if args.len() != p.args.len() {
                return self.err(format!(
                    "`{name}` takes {} arguments, got {}",
                    p.args.len(),
                    args.len()
                ));
            }
            for (t, s) in args.iter().zip(&p.args) {
                check_sort(t, *s)?;
            }
            return Ok(Term::app(&name, args, p.result));
        }
        Err(ParseError::UnknownSymbol(name))
    }
}

fn check_sort(t: &Term, expected: Sort) -> Result<(), ParseError> {
    if t.sort() == expected {
        Ok(())
    } else {
        Err(ParseError::SortMismatch {
            term: t.to_string(),
            expected,
            actual: t.sort(),
        })
    }
}

fn parse_with(
    text: &str,
    voc: &Vocabulary,
    free: &[(String, Sort)],
) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        voc,
        vars: free.to_vec(),
        indices: Vec::new(),
    };
    let f = p.implication()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f.alpha_normalize())
}

/// Parses a formula whose symbols are resolved against `voc`.
pub fn parse_formula(text: &str, voc: &Vocabulary) -> Result<Formula, ParseError> {
    parse_with(text, voc, &[])
}

/// Parses a formula that may mention the given free variables.
pub fn parse_open_formula(
    text: &str,
    voc: &Vocabulary,
    free: &[(&str, Sort)],
) -> Result<Formula, ParseError> {
    let free: Vec<(String, Sort)> = free.iter().map(|(n, s)| (n.to_string(), *s)).collect();
    parse_with(text, voc, &free)
}

/// Declaration lines for `voc` in the formula-file header format.
pub fn declarations(voc: &Vocabulary) -> String {
    let mut out = String::new();
    if !voc.sorts.is_empty() {
        let sorts: Vec<String> = voc.sorts.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("sorts {}\n", sorts.join(" ")));
    }
    for (r, p) in &voc.relations {
        let p: Vec<String> = p.iter().map(|s| s.to_string()).collect();
        if p.is_empty() {
            out.push_str(&format!("prop {r}\n"));
        } else {
            out.push_str(&format!("rel {r}: {}\n", p.join(" ")));
        }
    }
    for (f, p) in &voc.functions {
        let a: Vec<String> = p.args.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("fun {f}: {} -> {}\n", a.join(" "), p.result));
    }
    for (c, s) in &voc.constants {
        out.push_str(&format!("const {c}: {s}\n"));
    }
    out
}

/// A formula file: declaration lines followed by formulas separated by `;`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaFile {
    pub voc: Vocabulary,
    pub formulas: Vec<Formula>,
    /// Extra named sections (`[name]` headers), in order of appearance.
    pub sections: BTreeMap<String, Vec<Formula>>,
}

/// Parses a formula file.
///
/// ```text
/// sorts 0 1
/// rel R: 0 0
/// fun s: 0 -> 0
/// const c: 0
/// prop p q
/// forall x:0. R(x, s(x));
/// exists x:0. R(c, x)
/// ```
///
/// Formulas may be grouped under `[name]` headers; formulas before the first
/// header go to `formulas`.
pub fn parse_formula_file(text: &str) -> Result<FormulaFile, ParseError> {
    let mut voc = Vocabulary::new();
    let mut body_start = text.len();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.split('#').next().unwrap_or("").trim();
        let mut words = trimmed.split_whitespace();
        let head = words.next();
        let decl = |msg: &str| ParseError::SyntaxError {
            pos: offset,
            msg: msg.to_string(),
        };
        let sort_of = |w: &str| -> Result<Sort, ParseError> {
            w.parse().map_err(|_| decl("expected a sort number"))
        };
        let result = match head {
            None => Ok(()),
            Some("sorts") => {
                for w in words {
                    voc.sorts.insert(sort_of(w)?);
                }
                Ok(())
            }
            Some("prop") => words.try_for_each(|w| voc.declare(w, SymbolKind::Relation(vec![]))),
            Some(kw @ ("rel" | "fun" | "const")) => {
                let rest = trimmed[kw.len()..].trim();
                let (name, profile) = rest.split_once(':').ok_or_else(|| decl("expected `name: profile`"))?;
                let name = name.trim();
                let kind = match kw {
                    "rel" => SymbolKind::Relation(
                        profile.split_whitespace().map(sort_of).collect::<Result<_, _>>()?,
                    ),
                    "const" => SymbolKind::Constant(sort_of(profile.trim())?),
                    _ => {
                        let (args, res) = profile.split_once("->").ok_or_else(|| decl("expected `->`"))?;
                        SymbolKind::Function(FnProfile {
                            args: args.split_whitespace().map(sort_of).collect::<Result<_, _>>()?,
                            result: sort_of(res.trim())?,
                        })
                    }
                };
                voc.declare(name, kind)
            }
            Some(_) => {
                body_start = offset;
                break;
            }
        };
        result.map_err(|e| decl(&e.to_string()))?;
        offset += line.len();
    }
    let mut formulas = Vec::new();
    let mut sections: BTreeMap<String, Vec<Formula>> = BTreeMap::new();
    let mut current: Option<String> = None;
    let body = &text[body_start..];
    let mut chunk_start = 0;
    let mut push = |chunk: &str, at: usize, current: &Option<String>| -> Result<(), ParseError> {
        let stripped: String = chunk
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        if stripped.trim().is_empty() {
            return Ok(());
        }
        let f = parse_formula(chunk, &voc).map_err(|e| match e {
            ParseError::SyntaxError { pos, msg } => ParseError::SyntaxError {
                pos: pos + body_start + at,
                msg,
            },
            other => other,
        })?;
        match current {
            Some(name) => sections.entry(name.clone()).or_default().push(f),
            None => formulas.push(f),
        }
        Ok(())
    };
    let mut line_start = 0;
    for line in body.split_inclusive('\n') {
        let t = line.trim();
        if t.starts_with('[') && t.ends_with(']') && !t.contains(',') && t.len() > 2 && !t.contains('<') {
            let inner = &t[1..t.len() - 1];
            if inner.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                for (i, piece) in split_semis(&body[chunk_start..line_start]) {
                    push(piece, chunk_start + i, &current)?;
                }
                current = Some(inner.to_string());
                chunk_start = line_start + line.len();
            }
        }
        line_start += line.len();
    }
    for (i, piece) in split_semis(&body[chunk_start..]) {
        push(piece, chunk_start + i, &current)?;
    }
    Ok(FormulaFile {
        voc,
        formulas,
        sections,
    })
}

fn split_semis(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut in_comment = false;
    for (i, c) in s.char_indices() {
        match c {
            '#' => in_comment = true,
            '\n' => in_comment = false,
            ';' if !in_comment => {
                out.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &s[start..]));
    out
}
