//! Recursive-descent parser.
//!
//! ```text
//! patch      := decl*
//! decl       := "param" NAME ["[" exprs "]"]
//!             | "var" NAME "[" exprs "]" ":" ("bool" | "int" "(" INT "," INT ")")
//!             | "relax" NAME
//!             | "constraint" ["forall" binder ("," binder)* ":"] expr cmp expr
//! binder     := NAME "in" (expr ".." expr | NAME)
//! cmp        := "<=" | ">=" | "=="
//! expr       := term (("+" | "-") term)*
//! term       := unary ("*" unary)*
//! unary      := "-" unary | atom
//! atom       := INT | NAME ["[" exprs "]"] | "(" expr ")"
//!             | "sum" "(" binder ("," binder)* ":" expr ")"
//!             | "hamming" "(" NAME "," NAME ")"
//! ```
//! `INT` inside `int(..)` may carry a leading minus sign.

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{error_at, lex, Tok};

pub fn parse(source: &str) -> Result<Patch, ParseError> {
    let tokens = lex(source)?;
    let mut p = Parser {
        source,
        tokens,
        pos: 0,
    };
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(Patch {
        decls,
        source: source.to_string(),
    })
}

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.tokens[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(error_at(self.source, self.span(), expected, self.peek().describe()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if self.peek() == &tok {
            Ok(self.bump().1)
        } else {
            self.fail(&[&format!("'{}'", tok.text())])
        }
    }

    fn name(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().1;
                Ok(Ident { name, span })
            }
            _ => self.fail(&[what]),
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let start = self.span();
        let kind = match self.peek() {
            Tok::Param => {
                self.bump();
                let name = self.name("parameter name")?;
                let dims = if self.eat(&Tok::LBracket) {
                    let d = self.exprs()?;
                    self.expect(Tok::RBracket)?;
                    Some(d)
                } else {
                    None
                };
                DeclKind::Param(ParamDecl { name, dims })
            }
            Tok::Var => {
                self.bump();
                let name = self.name("variable name")?;
                self.expect(Tok::LBracket)?;
                let dims = self.exprs()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Colon)?;
                let ty = match self.peek() {
                    Tok::Bool => {
                        self.bump();
                        VarType::Bool
                    }
                    Tok::IntKw => {
                        self.bump();
                        self.expect(Tok::LParen)?;
                        let lo = self.signed_int()?;
                        self.expect(Tok::Comma)?;
                        let hi = self.signed_int()?;
                        self.expect(Tok::RParen)?;
                        VarType::Int { lo, hi }
                    }
                    _ => return self.fail(&["'bool'", "'int'"]),
                };
                DeclKind::Var(VarDecl { name, dims, ty })
            }
            Tok::Relax => {
                self.bump();
                DeclKind::Relax(self.name("constraint group name")?)
            }
            Tok::Constraint => {
                self.bump();
                let mut binders = Vec::new();
                if self.eat(&Tok::Forall) {
                    binders = self.binders()?;
                    self.expect(Tok::Colon)?;
                }
                let lhs = self.expr()?;
                let cmp = match self.peek() {
                    Tok::Le => Cmp::Le,
                    Tok::Ge => Cmp::Ge,
                    Tok::EqEq => Cmp::Eq,
                    _ => return self.fail(&["'<='", "'>='", "'=='", "operator"]),
                };
                self.bump();
                let rhs = self.expr()?;
                DeclKind::Constraint(ConstraintDecl { binders, lhs, cmp, rhs })
            }
            _ => return self.fail(&["'param'", "'var'", "'constraint'", "'relax'"]),
        };
        Ok(Decl {
            kind,
            span: start.to(self.prev_span()),
        })
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(&Tok::Minus);
        match self.peek() {
            Tok::Int(v) => {
                let v = *v;
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn exprs(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = vec![self.expr()?];
        while self.eat(&Tok::Comma) {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn binders(&mut self) -> Result<Vec<Binder>, ParseError> {
        let mut out = vec![self.binder()?];
        while self.eat(&Tok::Comma) {
            out.push(self.binder()?);
        }
        Ok(out)
    }

    fn binder(&mut self) -> Result<Binder, ParseError> {
        let name = self.name("binder")?;
        self.expect(Tok::In)?;
        let first = self.expr()?;
        let domain = if self.eat(&Tok::DotDot) {
            Domain::Range(first, self.expr()?)
        } else {
            match first.kind {
                ExprKind::Ref { name, args: None } => Domain::Extent(name),
                _ => return self.fail(&["'..'"]),
            }
        };
        Ok(Binder {
            span: name.span.to(self.prev_span()),
            name,
            domain,
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr {
                span: lhs.span.to(rhs.span),
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Star) {
            let rhs = self.unary()?;
            lhs = Expr {
                span: lhs.span.to(rhs.span),
                kind: ExprKind::Binary {
                    op: BinOp::Mul,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Minus {
            let start = self.bump().1;
            let inner = self.unary()?;
            return Ok(Expr {
                span: start.to(inner.span),
                kind: ExprKind::Neg(Box::new(inner)),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Int(v),
                    span: start,
                })
            }
            Tok::Ident(_) => {
                let name = self.name("name")?;
                let args = if self.eat(&Tok::LBracket) {
                    let a = self.exprs()?;
                    self.expect(Tok::RBracket)?;
                    Some(a)
                } else {
                    None
                };
                Ok(Expr {
                    kind: ExprKind::Ref { name, args },
                    span: start.to(self.prev_span()),
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Sum => {
                self.bump();
                self.expect(Tok::LParen)?;
                let binders = self.binders()?;
                self.expect(Tok::Colon)?;
                let body = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr {
                    kind: ExprKind::Sum {
                        binders,
                        body: Box::new(body),
                    },
                    span: start.to(self.prev_span()),
                })
            }
            Tok::Hamming => {
                self.bump();
                self.expect(Tok::LParen)?;
                let var = self.name("variable name")?;
                self.expect(Tok::Comma)?;
                let reference = self.name("parameter name")?;
                self.expect(Tok::RParen)?;
                Ok(Expr {
                    kind: ExprKind::Hamming { var, reference },
                    span: start.to(self.prev_span()),
                })
            }
            _ => self.fail(&["expression"]),
        }
    }
}
