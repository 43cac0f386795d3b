use num_complex::Complex64 as C64;

use super::Expr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && (b[j] as char).is_ascii_digit() {
                    i = j;
                    while i < b.len() && (b[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let v: f64 = s[st..i].parse().map_err(|_| Error::input("", format!("bad number '{}'", &s[st..i])))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && (b[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(s[st..i].to_string()));
        } else if "+-*()[],".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::input("", format!("unexpected character '{c}' at {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }
    fn expect(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(Error::input("", format!("expected '{c}', found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(Tok::Sym('-')) => {
                    self.pos += 1;
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.factor()?];
        while let Some(Tok::Sym('*')) = self.peek() {
            self.pos += 1;
            fs.push(self.factor()?);
        }
        Ok(Expr::prod(fs))
    }

    // signed float, used wherever the grammar wants a real number
    fn float(&mut self) -> Result<f64> {
        let neg = if let Some(Tok::Sym('-')) = self.peek() {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Tok::Num(v)) => Ok(if neg { -v } else { v }),
            other => Err(Error::input("", format!("expected number, found {other:?}"))),
        }
    }

    fn cnum(&mut self) -> Result<C64> {
        if let Some(Tok::Sym('(')) = self.peek() {
            self.pos += 1;
            let re = self.float()?;
            self.expect(',')?;
            let im = self.float()?;
            self.expect(')')?;
            Ok(C64::new(re, im))
        } else {
            Ok(C64::new(self.float()?, 0.0))
        }
    }

    fn looks_like_cnum(&self) -> bool {
        // '(' [-] num ',' ...
        let mut k = 1;
        if let Some(Tok::Sym('-')) = self.peek_at(k) {
            k += 1;
        }
        matches!(self.peek_at(k), Some(Tok::Num(_))) && matches!(self.peek_at(k + 1), Some(Tok::Sym(',')))
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Sym('-')) => {
                if let Some(Tok::Num(_)) = self.peek_at(1) {
                    Ok(Expr::Const(self.cnum()?))
                } else {
                    self.pos += 1;
                    Ok(self.factor()?.neg())
                }
            }
            Some(Tok::Num(_)) => Ok(Expr::Const(self.cnum()?)),
            Some(Tok::Sym('(')) => {
                if self.looks_like_cnum() {
                    Ok(Expr::Const(self.cnum()?))
                } else {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect(')')?;
                    Ok(e)
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.call(&name)
            }
            other => Err(Error::input("", format!("unexpected token {other:?}"))),
        }
    }

    fn one_arg(&mut self) -> Result<Expr> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    fn call(&mut self, name: &str) -> Result<Expr> {
        match name {
            "pow" => {
                self.expect('(')?;
                let b = self.expr()?;
                self.expect(',')?;
                let h = self.cnum()?;
                self.expect(')')?;
                Ok(Expr::pow(b, h))
            }
            "exp" => Ok(Expr::exp(self.one_arg()?)),
            "log" => Ok(Expr::log(self.one_arg()?)),
            "abs" => Ok(Expr::abs(self.one_arg()?)),
            "re" => Ok(Expr::re(self.one_arg()?)),
            "im" => Ok(Expr::im(self.one_arg()?)),
            "atan2" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                Ok(Expr::atan2(a, b))
            }
            "lin" => {
                self.expect('(')?;
                self.expect('[')?;
                let mut v = vec![self.cnum()?];
                while let Some(Tok::Sym(',')) = self.peek() {
                    self.pos += 1;
                    v.push(self.cnum()?);
                }
                self.expect(']')?;
                self.expect(')')?;
                Ok(Expr::Lin(v))
            }
            "quad" => {
                self.expect('(')?;
                let id = match self.next() {
                    Some(Tok::Num(v)) if v.fract() == 0.0 && v >= 0.0 => v as usize,
                    other => return Err(Error::input("", format!("bad quad id {other:?}"))),
                };
                self.expect(')')?;
                Ok(Expr::Quad(id))
            }
            _ => {
                let (head, idx) = name.split_at(1);
                match (head, idx.parse::<usize>()) {
                    ("t", Ok(k)) if k >= 1 => Ok(Expr::T(k - 1)),
                    ("x", Ok(k)) if k >= 1 => Ok(Expr::X(k - 1)),
                    _ => Err(Error::input("", format!("unknown name '{name}'"))),
                }
            }
        }
    }
}

/// Parse the expression grammar. Besides the base grammar this accepts
/// `re(e)`, `im(e)`, `log(e)`, `quad(k)`, parenthesized subexpressions and a
/// leading unary minus.
pub fn parse(s: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(s)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::input("", format!("trailing input after token {}", p.pos)));
    }
    Ok(e)
}
