//! Plain-text field descriptions.
//!
//! One s-expression per field; `#` starts a comment. Grammar:
//!
//! ```text
//! node := (constant NUM)
//!       | (expharmonic C0 C1 ... Cn)          ; boundary data c0 + Σ cj ζj
//!       | (power EXPONENT node)
//!       | (product node node ...)
//!       | (poscomb W1 node W1 node ...)       ; weight/child pairs
//!       | (pullback X1,...,Xn EXPONENT node)  ; Möbius center, Φ-exponent
//!       | (planarmod (a RE,IM ...) [(b RE,IM ...)])   ; n = 2 only
//! ```
//!
//! Numbers are plain `f64` literals; complex coefficients are `RE,IM`
//! pairs. [`field_to_text`] emits the same grammar, and parsing its
//! output reproduces the tree exactly.

use super::{BoundaryData, FieldNode, TestField};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut word = String::new();
        for ch in line.chars() {
            match ch {
                '(' | ')' => {
                    if !word.is_empty() {
                        tokens.push(Token::Word(std::mem::take(&mut word)));
                    }
                    tokens.push(if ch == '(' { Token::Open } else { Token::Close });
                }
                c if c.is_whitespace() => {
                    if !word.is_empty() {
                        tokens.push(Token::Word(std::mem::take(&mut word)));
                    }
                }
                c => word.push(c),
            }
        }
        if !word.is_empty() {
            tokens.push(Token::Word(word));
        }
    }
    tokens
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<&Token> {
        let t = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| Error::Parse("unexpected end of field description".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_open(&mut self) -> Result<()> {
        match self.next()? {
            Token::Open => Ok(()),
            t => Err(Error::Parse(format!("expected '(', found {t:?}"))),
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.next()? {
            Token::Word(w) => Ok(w.clone()),
            t => Err(Error::Parse(format!("expected a word, found {t:?}"))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let w = self.word()?;
        w.parse::<f64>()
            .map_err(|_| Error::Parse(format!("invalid number '{w}'")))
    }

    fn numbers_until_close(&mut self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        while !matches!(self.peek(), Some(Token::Close)) {
            out.push(self.number()?);
        }
        self.pos += 1; // consume ')'
        Ok(out)
    }

    fn complex_list(&mut self, tag: &str) -> Result<Vec<Complex64>> {
        self.expect_open()?;
        let head = self.word()?;
        if head != tag {
            return Err(Error::Parse(format!(
                "expected '({tag} ...)', found '({head} ...)'"
            )));
        }
        let mut out = Vec::new();
        while !matches!(self.peek(), Some(Token::Close)) {
            let w = self.word()?;
            let (re, im) = w
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("complex coefficient '{w}' needs RE,IM")))?;
            let re: f64 = re
                .parse()
                .map_err(|_| Error::Parse(format!("invalid real part '{re}'")))?;
            let im: f64 = im
                .parse()
                .map_err(|_| Error::Parse(format!("invalid imag part '{im}'")))?;
            out.push(Complex64::new(re, im));
        }
        self.pos += 1;
        Ok(out)
    }

    fn node(&mut self) -> Result<FieldNode> {
        self.expect_open()?;
        let head = self.word()?;
        let node = match head.as_str() {
            "constant" => {
                let c = self.number()?;
                self.close()?;
                FieldNode::Constant(c)
            }
            "expharmonic" => {
                let mut nums = self.numbers_until_close()?;
                if nums.len() < 3 {
                    return Err(Error::Parse(
                        "expharmonic needs c0 plus at least two linear coefficients".into(),
                    ));
                }
                let linear = nums.split_off(1);
                FieldNode::ExpHarmonic(BoundaryData::new(nums[0], linear)?)
            }
            "power" => {
                let exponent = self.number()?;
                let base = Box::new(self.node()?);
                self.close()?;
                FieldNode::Power { base, exponent }
            }
            "product" => {
                let mut children = Vec::new();
                while !matches!(self.peek(), Some(Token::Close)) {
                    children.push(self.node()?);
                }
                self.pos += 1;
                FieldNode::Product(children)
            }
            "poscomb" => {
                let mut terms = Vec::new();
                while !matches!(self.peek(), Some(Token::Close)) {
                    let w = self.number()?;
                    terms.push((w, self.node()?));
                }
                self.pos += 1;
                FieldNode::PositiveCombination(terms)
            }
            "pullback" => {
                let center_word = self.word()?;
                let center: Vec<f64> = center_word
                    .split(',')
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("invalid center entry '{s}'")))
                    })
                    .collect::<Result<_>>()?;
                let weight_exponent = self.number()?;
                let inner = Box::new(self.node()?);
                self.close()?;
                FieldNode::MobiusPullback {
                    inner,
                    center,
                    weight_exponent,
                }
            }
            "planarmod" => {
                let a = self.complex_list("a")?;
                let b = if matches!(self.peek(), Some(Token::Open)) {
                    self.complex_list("b")?
                } else {
                    Vec::new()
                };
                self.close()?;
                FieldNode::PlanarModulus { a, b }
            }
            other => return Err(Error::Parse(format!("unknown node kind '{other}'"))),
        };
        Ok(node)
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            Token::Close => Ok(()),
            t => Err(Error::Parse(format!("expected ')', found {t:?}"))),
        }
    }
}

/// Parse a field description for dimension `n`.
pub fn parse_field(text: &str, n: usize) -> Result<TestField> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(Error::Parse("empty field description".into()));
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
    };
    let node = parser.node()?;
    if parser.pos != tokens.len() {
        return Err(Error::Parse(format!(
            "trailing tokens after the field expression (at token {})",
            parser.pos
        )));
    }
    TestField::new(n, node)
}

fn fmt_num(x: f64) -> String {
    // Shortest representation that round-trips.
    let s = format!("{x}");
    debug_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
    s
}

fn node_to_text(node: &FieldNode, out: &mut String) {
    match node {
        FieldNode::Constant(c) => {
            out.push_str(&format!("(constant {})", fmt_num(*c)));
        }
        FieldNode::ExpHarmonic(d) => {
            out.push_str(&format!("(expharmonic {}", fmt_num(d.c0)));
            for c in &d.linear {
                out.push_str(&format!(" {}", fmt_num(*c)));
            }
            out.push(')');
        }
        FieldNode::Power { base, exponent } => {
            out.push_str(&format!("(power {} ", fmt_num(*exponent)));
            node_to_text(base, out);
            out.push(')');
        }
        FieldNode::Product(children) => {
            out.push_str("(product");
            for c in children {
                out.push(' ');
                node_to_text(c, out);
            }
            out.push(')');
        }
        FieldNode::PositiveCombination(terms) => {
            out.push_str("(poscomb");
            for (w, c) in terms {
                out.push_str(&format!(" {} ", fmt_num(*w)));
                node_to_text(c, out);
            }
            out.push(')');
        }
        FieldNode::MobiusPullback {
            inner,
            center,
            weight_exponent,
        } => {
            let center_s: Vec<String> = center.iter().map(|c| fmt_num(*c)).collect();
            out.push_str(&format!(
                "(pullback {} {} ",
                center_s.join(","),
                fmt_num(*weight_exponent)
            ));
            node_to_text(inner, out);
            out.push(')');
        }
        FieldNode::PlanarModulus { a, b } => {
            out.push_str("(planarmod (a");
            for c in a {
                out.push_str(&format!(" {},{}", fmt_num(c.re), fmt_num(c.im)));
            }
            out.push(')');
            if !b.is_empty() {
                out.push_str(" (b");
                for c in b {
                    out.push_str(&format!(" {},{}", fmt_num(c.re), fmt_num(c.im)));
                }
                out.push(')');
            }
            out.push(')');
        }
    }
}

/// Serialize a field to the plain-text format; inverse of
/// [`parse_field`].
pub fn field_to_text(field: &TestField) -> String {
    let mut out = String::new();
    node_to_text(&field.node, &mut out);
    out
}
