//! Recursive-descent parsers for the two concrete grammars.
//!
//! Binders extend maximally to the right; `\/` and `/\` (resp. `|` and `&`)
//! associate to the left. Both parsers reject reserved words in variable
//! position and report positions as line:column.

use super::{MuFormula, NmsoFormula, SyntaxError, Var, RESERVED_WORDS};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    // shared punctuation
    LPar,
    RPar,
    Dot,
    Comma,
    Tilde,
    // mu-language operators
    OrOp,   // \/
    AndOp,  // /\
    BoxOp,  // []
    DiaOp,  // <>
    GBoxOp, // [A]
    GDiaOp, // [E]
    // second-order operators
    Pipe,
    Amp,
    Leq,    // <=
    Arrow,  // ->
    DArrow, // <->
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::LPar => "`(`",
            Tok::RPar => "`)`",
            Tok::Dot => "`.`",
            Tok::Comma => "`,`",
            Tok::Tilde => "`~`",
            Tok::OrOp => "`\\/`",
            Tok::AndOp => "`/\\`",
            Tok::BoxOp => "`[]`",
            Tok::DiaOp => "`<>`",
            Tok::GBoxOp => "`[A]`",
            Tok::GDiaOp => "`[E]`",
            Tok::Pipe => "`|`",
            Tok::Amp => "`&`",
            Tok::Leq => "`<=`",
            Tok::Arrow => "`->`",
            Tok::DArrow => "`<->`",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Lang {
    Mu,
    Nmso,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn tokenize(mut self, lang: Lang) -> Result<Vec<Spanned>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let Some(&c) = self.chars.peek() else { break };
            let tok = match c {
                '(' => {
                    self.bump();
                    Tok::LPar
                }
                ')' => {
                    self.bump();
                    Tok::RPar
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '~' => {
                    self.bump();
                    Tok::Tilde
                }
                '\\' if lang == Lang::Mu => {
                    self.bump();
                    match self.bump() {
                        Some('/') => Tok::OrOp,
                        _ => return Err(self.err("expected `/` after `\\`")),
                    }
                }
                '/' if lang == Lang::Mu => {
                    self.bump();
                    match self.bump() {
                        Some('\\') => Tok::AndOp,
                        _ => return Err(self.err("expected `\\` after `/`")),
                    }
                }
                '[' if lang == Lang::Mu => {
                    self.bump();
                    match self.bump() {
                        Some(']') => Tok::BoxOp,
                        Some('A') => match self.bump() {
                            Some(']') => Tok::GBoxOp,
                            _ => return Err(self.err("expected `]` after `[A`")),
                        },
                        Some('E') => match self.bump() {
                            Some(']') => Tok::GDiaOp,
                            _ => return Err(self.err("expected `]` after `[E`")),
                        },
                        _ => return Err(self.err("expected `]`, `A]` or `E]` after `[`")),
                    }
                }
                '<' => {
                    self.bump();
                    match (lang, self.chars.peek()) {
                        (Lang::Mu, Some('>')) => {
                            self.bump();
                            Tok::DiaOp
                        }
                        (Lang::Nmso, Some('=')) => {
                            self.bump();
                            Tok::Leq
                        }
                        (Lang::Nmso, Some('-')) => {
                            self.bump();
                            match self.bump() {
                                Some('>') => Tok::DArrow,
                                _ => return Err(self.err("expected `>` after `<-`")),
                            }
                        }
                        _ => return Err(self.err("stray `<`")),
                    }
                }
                '-' if lang == Lang::Nmso => {
                    self.bump();
                    match self.bump() {
                        Some('>') => Tok::Arrow,
                        _ => return Err(self.err("expected `>` after `-`")),
                    }
                }
                '|' if lang == Lang::Nmso => {
                    self.bump();
                    Tok::Pipe
                }
                '&' if lang == Lang::Nmso => {
                    self.bump();
                    Tok::Amp
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let mut ident = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_ascii_alphanumeric() || *c == '_')
                    {
                        ident.push(self.bump().unwrap());
                    }
                    Tok::Ident(ident)
                }
                c => return Err(self.err(format!("unexpected character `{c}`"))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = self.here();
        SyntaxError::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, want: &Tok) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {want}, found {t}"))),
            None => Err(self.err(format!("expected {want}, found end of input"))),
        }
    }

    fn ident_is(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == word)
    }

    fn variable(&mut self) -> Result<Var, SyntaxError> {
        let (line, col) = self.here();
        match self.bump() {
            Some(Tok::Ident(name)) => {
                if RESERVED_WORDS.contains(&name.as_str()) {
                    Err(SyntaxError::Reserved {
                        line,
                        col,
                        word: name,
                    })
                } else {
                    Ok(Var::new(&name).expect("lexer yields valid identifiers"))
                }
            }
            Some(t) => Err(SyntaxError::Parse {
                line,
                col,
                msg: format!("expected a variable, found {t}"),
            }),
            None => Err(SyntaxError::Parse {
                line,
                col,
                msg: "expected a variable, found end of input".into(),
            }),
        }
    }

    fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.pos < self.toks.len() {
            Err(self.err(format!(
                "unexpected {} after the formula",
                self.toks[self.pos].tok
            )))
        } else {
            Ok(())
        }
    }

    // ----- mu-language ----------------------------------------------------

    fn mu_formula(&mut self) -> Result<MuFormula, SyntaxError> {
        if self.ident_is("mu") || self.ident_is("nu") {
            let is_mu = self.ident_is("mu");
            self.bump();
            let v = self.variable()?;
            self.eat(&Tok::Dot)?;
            let body = self.mu_formula()?;
            return Ok(if is_mu {
                MuFormula::mu(v, body)
            } else {
                MuFormula::nu(v, body)
            });
        }
        self.mu_disj()
    }

    fn mu_disj(&mut self) -> Result<MuFormula, SyntaxError> {
        let mut acc = self.mu_conj()?;
        while self.peek() == Some(&Tok::OrOp) {
            self.bump();
            let rhs = self.mu_conj()?;
            acc = MuFormula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn mu_conj(&mut self) -> Result<MuFormula, SyntaxError> {
        let mut acc = self.mu_unary()?;
        while self.peek() == Some(&Tok::AndOp) {
            self.bump();
            let rhs = self.mu_unary()?;
            acc = MuFormula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn mu_unary(&mut self) -> Result<MuFormula, SyntaxError> {
        match self.peek() {
            Some(Tok::BoxOp) => {
                self.bump();
                Ok(MuFormula::boxed(self.mu_unary()?))
            }
            Some(Tok::DiaOp) => {
                self.bump();
                Ok(MuFormula::dia(self.mu_unary()?))
            }
            Some(Tok::GBoxOp) => {
                self.bump();
                Ok(MuFormula::gbox(self.mu_unary()?))
            }
            Some(Tok::GDiaOp) => {
                self.bump();
                Ok(MuFormula::gdia(self.mu_unary()?))
            }
            _ => self.mu_atom(),
        }
    }

    fn mu_atom(&mut self) -> Result<MuFormula, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "true" => {
                self.bump();
                Ok(MuFormula::Top)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.bump();
                Ok(MuFormula::Bot)
            }
            Some(Tok::Ident(_)) => Ok(MuFormula::Atom(self.variable()?)),
            Some(Tok::Tilde) => {
                self.bump();
                Ok(MuFormula::NegAtom(self.variable()?))
            }
            Some(Tok::LPar) => {
                self.bump();
                let f = self.mu_formula()?;
                self.eat(&Tok::RPar)?;
                Ok(f)
            }
            Some(t) => Err(self.err(format!("expected a formula, found {t}"))),
            None => Err(self.err("expected a formula, found end of input")),
        }
    }

    // ----- second-order language ------------------------------------------

    fn nmso_formula(&mut self) -> Result<NmsoFormula, SyntaxError> {
        if self.ident_is("exists") || self.ident_is("forall") {
            let is_exists = self.ident_is("exists");
            self.bump();
            let v = self.variable()?;
            self.eat(&Tok::Dot)?;
            let body = self.nmso_formula()?;
            return Ok(if is_exists {
                NmsoFormula::exists(v, body)
            } else {
                NmsoFormula::forall(v, body)
            });
        }
        self.nmso_disj()
    }

    fn nmso_disj(&mut self) -> Result<NmsoFormula, SyntaxError> {
        let mut acc = self.nmso_conj()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let rhs = self.nmso_conj()?;
            acc = NmsoFormula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn nmso_conj(&mut self) -> Result<NmsoFormula, SyntaxError> {
        let mut acc = self.nmso_neg()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.nmso_neg()?;
            acc = NmsoFormula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary_pred(&mut self) -> Result<Var, SyntaxError> {
        self.bump();
        self.eat(&Tok::LPar)?;
        let v = self.variable()?;
        self.eat(&Tok::RPar)?;
        Ok(v)
    }

    fn binary_pred(&mut self) -> Result<(Var, Var), SyntaxError> {
        self.bump();
        self.eat(&Tok::LPar)?;
        let v = self.variable()?;
        self.eat(&Tok::Comma)?;
        let w = self.variable()?;
        self.eat(&Tok::RPar)?;
        Ok((v, w))
    }

    fn nmso_neg(&mut self) -> Result<NmsoFormula, SyntaxError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(NmsoFormula::not(self.nmso_neg()?))
            }
            Some(Tok::LPar) => {
                self.bump();
                let f = self.nmso_formula()?;
                match self.peek() {
                    Some(Tok::Arrow) => {
                        self.bump();
                        let rhs = self.nmso_formula()?;
                        self.eat(&Tok::RPar)?;
                        Ok(NmsoFormula::implies(f, rhs))
                    }
                    Some(Tok::DArrow) => {
                        self.bump();
                        let rhs = self.nmso_formula()?;
                        self.eat(&Tok::RPar)?;
                        Ok(NmsoFormula::iff(f, rhs))
                    }
                    _ => {
                        self.eat(&Tok::RPar)?;
                        Ok(f)
                    }
                }
            }
            Some(Tok::Ident(s)) if s == "sr" => Ok(NmsoFormula::Sr(self.unary_pred()?)),
            Some(Tok::Ident(s)) if s == "sing" => Ok(NmsoFormula::Sing(self.unary_pred()?)),
            Some(Tok::Ident(s)) if s == "empty" => Ok(NmsoFormula::Empty(self.unary_pred()?)),
            Some(Tok::Ident(s)) if s == "box" => {
                let (v, w) = self.binary_pred()?;
                Ok(NmsoFormula::BoxRel(v, w))
            }
            Some(Tok::Ident(s)) if s == "eqv" => {
                let (v, w) = self.binary_pred()?;
                Ok(NmsoFormula::Eqv(v, w))
            }
            Some(Tok::Ident(_)) => {
                let v = self.variable()?;
                self.eat(&Tok::Leq)?;
                let w = self.variable()?;
                Ok(NmsoFormula::Sub(v, w))
            }
            Some(t) => Err(self.err(format!("expected an atomic formula, found {t}"))),
            None => Err(self.err("expected an atomic formula, found end of input")),
        }
    }
}

/// Parses the fixpoint modal language and checks the binder invariant.
pub fn parse_mu(text: &str) -> Result<MuFormula, SyntaxError> {
    let toks = Lexer::new(text).tokenize(Lang::Mu)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.mu_formula()?;
    p.expect_end()?;
    f.check_nnf_binders()?;
    Ok(f)
}

/// Parses the second-order language (sugar constructors included).
pub fn parse_nmso(text: &str) -> Result<NmsoFormula, SyntaxError> {
    let toks = Lexer::new(text).tokenize(Lang::Nmso)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.nmso_formula()?;
    p.expect_end()?;
    Ok(f)
}
