//! Concrete grammar for the broadcast session calculus.
//!
//! ```text
//! P ::= "0" | ID "!(" ID "-" ")." P | ID "?(" ID ")." P
//!     | ID "+!<" ID ">." P | ID "-!<" ID ">." P
//!     | ID "+?" PHASE? "(" ID (";" ID ("," ID)*)? ")." P
//!     | ID "-?(" ID ")." P
//!     | ID "+#" LABEL "." P | ID "-#{" LABEL ":" P ("," LABEL ":" P)* "}"
//!     | "(" P ")" | P "|" P | "(new" ID ")" P
//!     | "rec" ID ("[" P "]")? "." P | ID | P "><" P
//!     | "(|" ID "|)" | "(ctr" ID "=" ID ("+"|"-") ")" P
//! ```
//!
//! `><` binds tighter than `|`; prefix continuations stop at both. The
//! bracketed forms after `+?`, `rec` and the `(ctr ..)`/`(|..|)` forms are
//! runtime states; they are printed and re-read but do not occur in
//! ordinary source files. Identifiers may carry an explicit freshness
//! index written `base'3`. Comments run `//` to end of line.

use crate::names::{Name, NameGen, ProcVar};
use crate::syntax::{Accumulator, Endpoint, GatherPhase, Label, Polarity, Process};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String, u32),
    Nat(u64),
    KwNew,
    KwRec,
    KwCtr,
    Zero,
    Bang,
    Query,
    LParen,
    RParen,
    Dot,
    Plus,
    Minus,
    Lt,
    Gt,
    Hash,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Bar,
    Semi,
    Eq,
    LBracket,
    RBracket,
    Recov,
    LCounter,
    RCounter,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(b, 0) => return write!(f, "identifier `{b}`"),
            Tok::Ident(b, i) => return write!(f, "identifier `{b}'{i}`"),
            Tok::Nat(n) => return write!(f, "number `{n}`"),
            Tok::KwNew => "`new`",
            Tok::KwRec => "`rec`",
            Tok::KwCtr => "`ctr`",
            Tok::Zero => "`0`",
            Tok::Bang => "`!`",
            Tok::Query => "`?`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Dot => "`.`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Hash => "`#`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Colon => "`:`",
            Tok::Comma => "`,`",
            Tok::Bar => "`|`",
            Tok::Semi => "`;`",
            Tok::Eq => "`=`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Recov => "`><`",
            Tok::LCounter => "`(|`",
            Tok::RCounter => "`|)`",
        };
        write!(f, "{s}")
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { message: message.into(), line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_ascii_whitespace() {
                    self.bump();
                } else if c == b'/' && self.peek2() == Some(b'/') {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                b'0'..=b'9' => {
                    let mut n = 0u64;
                    while let Some(d) = self.peek() {
                        if d.is_ascii_digit() {
                            n = n * 10 + u64::from(d - b'0');
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if n == 0 { Tok::Zero } else { Tok::Nat(n) }
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = self.pos;
                    while let Some(d) = self.peek() {
                        if d.is_ascii_alphanumeric() || d == b'_' {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let base = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                    let mut index = 0u32;
                    if self.peek() == Some(b'\'') {
                        self.bump();
                        if !self.peek().is_some_and(|d| d.is_ascii_digit()) {
                            return Err(self.err("expected digits after `'` in indexed name"));
                        }
                        let mut n = 0u32;
                        while let Some(d) = self.peek() {
                            if d.is_ascii_digit() {
                                n = n.saturating_mul(10).saturating_add(u32::from(d - b'0'));
                                self.bump();
                            } else {
                                break;
                            }
                        }
                        index = n;
                    }
                    match (base.as_str(), index) {
                        ("new", 0) => Tok::KwNew,
                        ("rec", 0) => Tok::KwRec,
                        ("ctr", 0) => Tok::KwCtr,
                        _ => Tok::Ident(base, index),
                    }
                }
                b'(' => {
                    self.bump();
                    if self.peek() == Some(b'|') {
                        self.bump();
                        Tok::LCounter
                    } else {
                        Tok::LParen
                    }
                }
                b'|' => {
                    self.bump();
                    if self.peek() == Some(b')') {
                        self.bump();
                        Tok::RCounter
                    } else {
                        Tok::Bar
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek() == Some(b'<') {
                        self.bump();
                        Tok::Recov
                    } else {
                        Tok::Gt
                    }
                }
                b')' => { self.bump(); Tok::RParen }
                b'!' => { self.bump(); Tok::Bang }
                b'?' => { self.bump(); Tok::Query }
                b'.' => { self.bump(); Tok::Dot }
                b'+' => { self.bump(); Tok::Plus }
                b'-' => { self.bump(); Tok::Minus }
                b'<' => { self.bump(); Tok::Lt }
                b'#' => { self.bump(); Tok::Hash }
                b'{' => { self.bump(); Tok::LBrace }
                b'}' => { self.bump(); Tok::RBrace }
                b':' => { self.bump(); Tok::Colon }
                b',' => { self.bump(); Tok::Comma }
                b';' => { self.bump(); Tok::Semi }
                b'=' => { self.bump(); Tok::Eq }
                b'[' => { self.bump(); Tok::LBracket }
                b']' => { self.bump(); Tok::RBracket }
                other => return Err(self.err(format!("unexpected character `{}`", other as char))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    gen: NameGen,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => (self.end_line, self.end_col),
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { message: message.into(), line, col }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of input"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<Name, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(base, index)) => {
                self.pos += 1;
                Ok(Name::indexed(base, index))
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn polarity(&mut self) -> Result<Polarity, ParseError> {
        if self.eat(&Tok::Plus) {
            Ok(Polarity::Pos)
        } else if self.eat(&Tok::Minus) {
            Ok(Polarity::Neg)
        } else {
            Err(self.err("expected `+` or `-` polarity"))
        }
    }

    // par level: recov ("|" recov)*
    fn process(&mut self) -> Result<Process, ParseError> {
        let mut p = self.recov()?;
        while self.eat(&Tok::Bar) {
            let q = self.recov()?;
            p = Process::par(p, q);
        }
        Ok(p)
    }

    // recov level: atom ("><" atom)*
    fn recov(&mut self) -> Result<Process, ParseError> {
        let mut p = self.atom()?;
        while self.eat(&Tok::Recov) {
            let handler = self.atom()?;
            p = Process::recover(p, handler);
        }
        Ok(p)
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.peek() {
            Some(Tok::Zero) => {
                self.bump();
                Ok(Process::Inact)
            }
            Some(Tok::LCounter) => {
                self.bump();
                let k = self.ident("counter name")?;
                self.expect(Tok::RCounter)?;
                Ok(Process::Counter(k))
            }
            Some(Tok::LParen) => {
                self.bump();
                match self.peek() {
                    Some(Tok::KwNew) => {
                        self.bump();
                        let n = self.ident("restricted name")?;
                        self.expect(Tok::RParen)?;
                        let body = self.recov()?;
                        Ok(Process::New { binder: n, body: Box::new(body) })
                    }
                    Some(Tok::KwCtr) => {
                        self.bump();
                        let k = self.ident("counter name")?;
                        self.expect(Tok::Eq)?;
                        let session = self.ident("session name")?;
                        let polarity = self.polarity()?;
                        self.expect(Tok::RParen)?;
                        let body = self.recov()?;
                        Ok(Process::WithCounter {
                            ep: Endpoint { session, polarity },
                            counter: k,
                            body: Box::new(body),
                        })
                    }
                    _ => {
                        let p = self.process()?;
                        self.expect(Tok::RParen)?;
                        Ok(p)
                    }
                }
            }
            Some(Tok::KwRec) => {
                self.bump();
                let var = self.ident("recursion variable")?;
                let var = ProcVar { base: var.base, index: var.index };
                let active = if self.eat(&Tok::LBracket) {
                    let a = self.process()?;
                    self.expect(Tok::RBracket)?;
                    Some(a)
                } else {
                    None
                };
                self.expect(Tok::Dot)?;
                let body = self.recov()?;
                Ok(Process::Rec {
                    var: var.clone(),
                    body: Box::new(body),
                    active: Box::new(active.unwrap_or(Process::Var(var))),
                })
            }
            Some(Tok::Ident(..)) => self.ident_headed(),
            Some(t) => Err(self.err(format!("expected a process, found {t}"))),
            None => Err(self.err("expected a process, found end of input")),
        }
    }

    fn ident_headed(&mut self) -> Result<Process, ParseError> {
        let name = self.ident("name")?;
        match self.peek() {
            Some(Tok::Bang) => {
                // a!(s-).P
                self.bump();
                self.expect(Tok::LParen)?;
                let session = self.ident("session name")?;
                let (pl, pc) = self.here();
                let pol = self.polarity()?;
                if pol == Polarity::Pos {
                    return Err(ParseError {
                        message: "request payload must be a negative endpoint".into(),
                        line: pl,
                        col: pc,
                    });
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                let cont = self.atom()?;
                Ok(Process::Request {
                    channel: name,
                    payload: Endpoint::neg(session),
                    cont: Box::new(cont),
                })
            }
            Some(Tok::Query) => {
                // a?(x).P
                self.bump();
                self.expect(Tok::LParen)?;
                let binder = self.ident("binder")?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Dot)?;
                let cont = self.atom()?;
                Ok(Process::Accept { channel: name, binder, cont: Box::new(cont) })
            }
            Some(Tok::Plus) => {
                self.bump();
                let ep = Endpoint::pos(name);
                match self.peek() {
                    Some(Tok::Bang) => {
                        self.bump();
                        self.expect(Tok::Lt)?;
                        let value = self.ident("value")?;
                        self.expect(Tok::Gt)?;
                        self.expect(Tok::Dot)?;
                        let cont = self.atom()?;
                        Ok(Process::BcastSend { ep, value, cont: Box::new(cont) })
                    }
                    Some(Tok::Query) => {
                        self.bump();
                        let phase = match self.peek() {
                            Some(Tok::Nat(1)) => {
                                self.bump();
                                GatherPhase::One
                            }
                            Some(Tok::Nat(2)) => {
                                self.bump();
                                GatherPhase::Done
                            }
                            Some(Tok::Zero) => {
                                self.bump();
                                GatherPhase::Zero
                            }
                            _ => GatherPhase::Zero,
                        };
                        self.expect(Tok::LParen)?;
                        let binder = self.ident("binder")?;
                        let acc = if self.eat(&Tok::Semi) {
                            let base = self.ident("accumulator name")?;
                            let mut items = Vec::new();
                            while self.eat(&Tok::Comma) {
                                items.push(self.ident("accumulated value")?);
                            }
                            Accumulator { base, items }
                        } else {
                            Accumulator::fresh(self.gen.fresh("u"))
                        };
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::Dot)?;
                        let cont = self.atom()?;
                        Ok(Process::Gather { ep, binder, acc, phase, cont: Box::new(cont) })
                    }
                    Some(Tok::Hash) => {
                        self.bump();
                        let label = self.ident("label")?;
                        self.expect(Tok::Dot)?;
                        let cont = self.atom()?;
                        Ok(Process::Select {
                            ep,
                            label: Label(label.to_string()),
                            cont: Box::new(cont),
                        })
                    }
                    _ => Err(self.err("expected `!`, `?` or `#` after positive endpoint")),
                }
            }
            Some(Tok::Minus) => {
                self.bump();
                let ep = Endpoint::neg(name);
                match self.peek() {
                    Some(Tok::Bang) => {
                        self.bump();
                        self.expect(Tok::Lt)?;
                        let value = self.ident("value")?;
                        self.expect(Tok::Gt)?;
                        self.expect(Tok::Dot)?;
                        let cont = self.atom()?;
                        Ok(Process::UniSend { ep, value, cont: Box::new(cont) })
                    }
                    Some(Tok::Query) => {
                        self.bump();
                        self.expect(Tok::LParen)?;
                        let binder = self.ident("binder")?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::Dot)?;
                        let cont = self.atom()?;
                        Ok(Process::UniRecv { ep, binder, cont: Box::new(cont) })
                    }
                    Some(Tok::Hash) => {
                        self.bump();
                        self.expect(Tok::LBrace)?;
                        let mut arms: Vec<(Label, Process)> = Vec::new();
                        loop {
                            let (ll, lc) = self.here();
                            let label = self.ident("label")?;
                            let label = Label(label.to_string());
                            if arms.iter().any(|(l, _)| *l == label) {
                                return Err(ParseError {
                                    message: format!("duplicate branch label `{label}`"),
                                    line: ll,
                                    col: lc,
                                });
                            }
                            self.expect(Tok::Colon)?;
                            let p = self.process()?;
                            arms.push((label, p));
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        self.expect(Tok::RBrace)?;
                        Ok(Process::Branch { ep, arms })
                    }
                    _ => Err(self.err("expected `!`, `?` or `#` after negative endpoint")),
                }
            }
            _ => Ok(Process::Var(ProcVar { base: name.base, index: name.index })),
        }
    }
}

/// Parse a process. Gathers written without an explicit accumulator get a
/// fresh one, indexed above every name in the input.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    let (end_line, end_col) = {
        let mut line = 1;
        let mut col = 1;
        for &c in text.as_bytes() {
            if c == b'\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    };
    let toks = Lexer::new(text).tokens()?;
    let max_index = toks
        .iter()
        .filter_map(|s| match &s.tok {
            Tok::Ident(_, i) => Some(*i),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut p = Parser {
        toks,
        pos: 0,
        gen: NameGen::starting_at(max_index + 1),
        end_line,
        end_col,
    };
    let proc = p.process()?;
    if p.pos != p.toks.len() {
        return Err(p.err(format!(
            "unexpected {} after process",
            p.peek().map(|t| t.to_string()).unwrap_or_default()
        )));
    }
    Ok(proc)
}
