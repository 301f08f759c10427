//! Concrete syntax.
//!
//! ```text
//! program    ::= { definition } [ "expression" ":" expr ]
//! definition ::= name "(" [ arg { "," arg } ] [","] ")" "=" expr ";"
//! arg        ::= Ctr [ "(" vars ")" ]      -- first argument of a matching clause
//!              | var
//! expr       ::= var | name "(" exprs ")" | Ctr [ "(" exprs ")" ]
//! ```
//!
//! Comments run from `--` to the end of the line. A trailing comma is
//! accepted in argument lists so that listings such as `f(Nil(), ) = ...`
//! read back.

use std::collections::HashMap;

use thiserror::Error;

use super::syntax::{Clause, Expr, FunDef, Pattern, Program, ProgramError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] ProgramError),
}

/// A parsed program file together with its optional `expression:` directive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub program: Program,
    pub expression: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Semi,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ctr_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase())
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() != Some(&'-') {
                    return Err(ParseError::Syntax {
                        line: tl,
                        column: tc,
                        message: "unexpected character `-`".into(),
                    });
                }
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            c if is_ident_char(c) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    s.push(c);
                    bump(&mut chars);
                }
                if s.starts_with(|c: char| c.is_ascii_digit()) {
                    return Err(ParseError::Syntax {
                        line: tl,
                        column: tc,
                        message: format!("identifier `{s}` starts with a digit"),
                    });
                }
                toks.push((Tok::Ident(s), tl, tc));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        bump(&mut chars);
        toks.push((tok, tl, tc));
    }
    toks.push((Tok::Eof, line, col));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

enum Arg {
    Var(String),
    Pat(Pattern),
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, column) = self.toks[self.pos];
        Err(ParseError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            ))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            t => self.error(format!("expected identifier, found {}", t.describe())),
        }
    }

    fn lower_ident(&mut self, what: &str) -> Result<String, ParseError> {
        if let Tok::Ident(s) = self.peek() {
            if is_ctr_name(s) {
                return self.error(format!("expected {what}, found constructor `{s}`"));
            }
        }
        self.ident()
    }

    /// Parses `( item, item, ... [,] )`.
    fn list<T>(
        &mut self,
        mut item: impl FnMut(&mut Parser) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut out = Vec::new();
        loop {
            if *self.peek() == Tok::RParen {
                self.next();
                return Ok(out);
            }
            out.push(item(self)?);
            match self.next() {
                Tok::Comma => {}
                Tok::RParen => return Ok(out),
                t => {
                    self.pos -= 1;
                    return self.error(format!("expected `,` or `)`, found {}", t.describe()));
                }
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let name = self.ident()?;
        let has_args = *self.peek() == Tok::LParen;
        if is_ctr_name(&name) {
            let args = if has_args { self.list(Parser::expr)? } else { vec![] };
            Ok(Expr::Ctr(name, args))
        } else if has_args {
            Ok(Expr::Call(name, self.list(Parser::expr)?))
        } else {
            Ok(Expr::Var(name))
        }
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        let name = self.ident()?;
        if is_ctr_name(&name) {
            let vars = if *self.peek() == Tok::LParen {
                self.list(|p| p.lower_ident("pattern variable"))?
            } else {
                vec![]
            };
            Ok(Arg::Pat(Pattern::new(name, vars)))
        } else {
            Ok(Arg::Var(name))
        }
    }

    fn source(&mut self) -> Result<Source, ParseError> {
        // Clauses of one matching function may be spread over the file; they
        // are grouped in order of first appearance.
        let mut order: Vec<String> = Vec::new();
        let mut ordinary: HashMap<String, Vec<FunDef>> = HashMap::new();
        let mut clauses: HashMap<String, Vec<Clause>> = HashMap::new();
        let mut expression = None;
        while *self.peek() != Tok::Eof {
            if expression.is_some() {
                return self.error("nothing may follow the `expression:` directive");
            }
            if *self.peek() == Tok::Ident("expression".into()) && *self.peek2() == Tok::Colon {
                self.next();
                self.next();
                expression = Some(self.expr()?);
                if *self.peek() == Tok::Semi {
                    self.next();
                }
                continue;
            }
            let name = self.lower_ident("function name")?;
            let args = self.list(Parser::arg)?;
            self.expect(Tok::Eq)?;
            let body = self.expr()?;
            self.expect(Tok::Semi)?;
            if !order.contains(&name) {
                order.push(name.clone());
            }
            let mut it = args.into_iter();
            match it.next() {
                Some(Arg::Pat(pattern)) => {
                    let mut params = Vec::new();
                    for a in it {
                        match a {
                            Arg::Var(v) => params.push(v),
                            Arg::Pat(p) => {
                                return Err(ParseError::Syntax {
                                    line: self.toks[self.pos].1,
                                    column: self.toks[self.pos].2,
                                    message: format!(
                                        "pattern `{p}` in `{name}` is allowed only as the first argument"
                                    ),
                                })
                            }
                        }
                    }
                    clauses.entry(name).or_default().push(Clause {
                        pattern,
                        params,
                        body,
                    });
                }
                first => {
                    let mut params = Vec::new();
                    for a in first.into_iter().chain(it) {
                        match a {
                            Arg::Var(v) => params.push(v),
                            Arg::Pat(p) => {
                                return self.error(format!(
                                    "pattern `{p}` in `{name}` is allowed only as the first argument"
                                ))
                            }
                        }
                    }
                    ordinary
                        .entry(name.clone())
                        .or_default()
                        .push(FunDef::Ordinary { name, params, body });
                }
            }
        }
        let mut defs = Vec::new();
        for name in order {
            let ords = ordinary.remove(&name).unwrap_or_default();
            let cls = clauses.remove(&name);
            if ords.len() > 1 || (!ords.is_empty() && cls.is_some()) {
                return Err(ProgramError::DuplicateDefinition(name).into());
            }
            match cls {
                Some(clauses) => defs.push(FunDef::Matching { name, clauses }),
                None => defs.extend(ords),
            }
        }
        let program = Program::new(defs)?;
        if let Some(e) = &expression {
            program.check_expr(e)?;
        }
        Ok(Source {
            program,
            expression,
        })
    }
}

/// Parses a program file, including an optional trailing `expression:`.
pub fn parse_source(text: &str) -> Result<Source, ParseError> {
    Parser {
        toks: tokenize(text)?,
        pos: 0,
    }
    .source()
}

/// Parses a program file. A trailing `expression:` directive is accepted and
/// ignored; use [`parse_source`] to keep it.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_source(text).map(|s| s.program)
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {} after expression", p.peek().describe()));
    }
    Ok(e)
}
