//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | factor
//! factor := base ("^" unary)?
//! base   := NUMBER | IDENT | CONST | FUNC "(" expr ")" | "(" expr ")"
//! ```
//!
//! The Unicode minus sign (U+2212) is accepted wherever `-` is.

use super::{BinOp, Constant, Expr, Func};

/// Names that look like constants but are not supported.
const RESERVED_CONSTANTS: [&str; 5] = ["e", "inf", "infinity", "nan", "tau"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown named constant `{name}` at byte {offset}")]
    UnknownConstant { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UnknownConstant { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let c = text[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let tok = match c {
            '+' | '*' | '/' | '^' | '-' => {
                i += 1;
                Tok::Op(c)
            }
            '\u{2212}' => {
                i += c.len_utf8();
                Tok::Op('-')
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
                Tok::Num(v)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, offset: start });
    }
    out.push(Spanned {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek().tok {
            Tok::Op(c) if ops.contains(&c) => {
                self.bump();
                Some(c)
            }
            _ => None,
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::End => Err(syntax(t.offset, "expected `)` before end of input")),
            _ => Err(syntax(t.offset, "expected `)`")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::binary_raw(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::binary_raw(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::neg_raw(self.unary()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::binary_raw(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(Expr::num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if matches!(self.peek().tok, Tok::LParen) {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError::UnknownFunction {
                            name,
                            offset: t.offset,
                        });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::call_raw(f, arg));
                }
                if let Some(c) = Constant::from_name(&name) {
                    return Ok(Expr::constant(c));
                }
                if Func::from_name(&name).is_some() {
                    return Err(syntax(
                        t.offset,
                        format!("function `{name}` needs an argument"),
                    ));
                }
                if RESERVED_CONSTANTS.contains(&name.as_str()) {
                    return Err(ParseError::UnknownConstant {
                        name,
                        offset: t.offset,
                    });
                }
                Ok(Expr::var(name))
            }
            Tok::End => Err(syntax(t.offset, "unexpected end of input")),
            Tok::RParen => Err(syntax(t.offset, "unexpected `)`")),
            Tok::Op(c) => Err(syntax(t.offset, format!("unexpected operator `{c}`"))),
        }
    }
}

/// Parses `text` into an expression tree without any rewriting.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.offset, "unexpected trailing input"));
    }
    Ok(e)
}
