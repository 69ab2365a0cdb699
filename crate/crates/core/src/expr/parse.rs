//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-'? INT | '(' '-'? INT ')'
//! atom     := INT | IDENT | IDENT '_' SUFFIX | FUNC '(' expr ')' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Context, Expr, ExprError, Func, JetVar, Symbol, VarKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Jet(String, String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Lexed { tok, column });
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Lexed {
                tok: Tok::Int(digits.parse().expect("digit run parses")),
                column,
            });
        } else if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_lowercase() || chars[i].is_ascii_digit()) {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '_' {
                i += 1;
                let s = i;
                while i < chars.len() && chars[i].is_ascii_lowercase() {
                    i += 1;
                }
                if s == i {
                    return Err(ExprError::Syntax {
                        column: i + 1,
                        message: format!("empty derivative suffix after `{name}_`"),
                    });
                }
                let sfx: String = chars[s..i].iter().collect();
                out.push(Lexed {
                    tok: Tok::Jet(name, sfx),
                    column,
                });
            } else {
                out.push(Lexed {
                    tok: Tok::Ident(name),
                    column,
                });
            }
        } else {
            return Err(ExprError::Syntax {
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: &'a Context,
    toks: Vec<Lexed>,
    pos: usize,
    end_column: usize,
}

pub(super) fn parse(ctx: &Context, text: &str) -> Result<Expr, ExprError> {
    let toks = lex(text)?;
    let mut p = Parser {
        ctx,
        toks,
        pos: 0,
        end_column: text.chars().count() + 1,
    };
    if p.toks.is_empty() {
        return Err(ExprError::Syntax {
            column: 1,
            message: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    if let Some(t) = p.toks.get(p.pos) {
        return Err(ExprError::Syntax {
            column: t.column,
            message: format!("unexpected token {:?}", t.tok),
        });
    }
    Ok(e)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |l| l.column)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ExprError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(ExprError::Syntax {
                column: self.column(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc + self.term()?;
            } else if self.eat(&Tok::Minus) {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc * self.unary()?;
            } else if self.eat(&Tok::Slash) {
                acc = acc / self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(&Tok::Minus) {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let exp = self.exponent()?;
            Ok(Expr::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        let paren = self.eat(&Tok::LParen);
        let negative = self.eat(&Tok::Minus);
        let column = self.column();
        let value = match self.peek() {
            Some(Tok::Int(n)) => {
                let n = i64::try_from(n.clone()).map_err(|_| ExprError::Syntax {
                    column,
                    message: "exponent out of range".into(),
                })?;
                self.pos += 1;
                n
            }
            _ => {
                return Err(ExprError::Syntax {
                    column,
                    message: "expected an integer exponent".into(),
                })
            }
        };
        if paren {
            self.expect(&Tok::RParen, "`)` after exponent")?;
        }
        if value == 0 {
            return Err(ExprError::Syntax {
                column,
                message: "zero exponent".into(),
            });
        }
        Ok(if negative { -value } else { value })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let column = self.column();
        let tok = match self.toks.get(self.pos) {
            Some(l) => l.tok.clone(),
            None => {
                return Err(ExprError::Syntax {
                    column,
                    message: "unexpected end of input".into(),
                })
            }
        };
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(Expr::num(BigRational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect(&Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    return Ok(Expr::func(f, arg));
                }
                match self.ctx.kind_of(&name) {
                    Some(VarKind::Independent) => Ok(Expr::sym(Symbol::indep(&name))),
                    Some(VarKind::Parameter) => Ok(Expr::sym(Symbol::param(&name))),
                    Some(VarKind::Dependent) => Ok(Expr::sym(Symbol::Jet(JetVar::base(&name)))),
                    None => Err(ExprError::UnknownIdentifier { name, column }),
                }
            }
            Tok::Jet(name, sfx) => self.jet(name, &sfx, column),
            other => Err(ExprError::Syntax {
                column,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn jet(&self, name: String, sfx: &str, column: usize) -> Result<Expr, ExprError> {
        match self.ctx.kind_of(&name) {
            Some(VarKind::Dependent) => {}
            Some(_) => return Err(ExprError::NotDependent { name, column }),
            None => return Err(ExprError::UnknownIdentifier { name, column }),
        }
        let mut letters = Vec::new();
        for letter in sfx.chars() {
            let l = letter.to_string();
            if self.ctx.kind_of(&l) != Some(VarKind::Independent) {
                return Err(ExprError::UnknownSuffix { name, letter, column });
            }
            letters.push(l);
        }
        let orders: Vec<(&str, u32)> = letters.iter().map(|l| (l.as_str(), 1)).collect();
        let jet = JetVar::new(&name, &orders);
        if jet.total_order() > self.ctx.max_order() {
            return Err(ExprError::OrderOverflow {
                name: jet.to_string(),
                max: self.ctx.max_order(),
            });
        }
        Ok(Expr::sym(Symbol::Jet(jet)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        let mut c = Context::new();
        for n in ["t", "x"] {
            c.declare(n, VarKind::Independent).unwrap();
        }
        for n in ["u", "v"] {
            c.declare(n, VarKind::Dependent).unwrap();
        }
        for n in ["beta", "gamma", "delta"] {
            c.declare(n, VarKind::Parameter).unwrap();
        }
        c
    }

    #[test]
    fn parses_first_equation() {
        let e = ctx().parse("u_t + beta*u_x - gamma*v_xx + delta*v*(u^2+v^2)").unwrap();
        let syms = e.symbols();
        assert!(syms.contains(&Symbol::jet("v", &[("x", 2)])));
        assert!(syms.contains(&Symbol::param("delta")));
        assert_eq!(syms.len(), 8);
    }

    #[test]
    fn zero_literal() {
        assert!(ctx().parse("0").unwrap().is_zero());
    }

    #[test]
    fn undeclared_suffix_letter() {
        let err = ctx().parse("u_y").unwrap_err();
        assert!(matches!(err, ExprError::UnknownSuffix { letter: 'y', .. }));
    }

    #[test]
    fn derivative_of_parameter_rejected() {
        let err = ctx().parse("beta_x").unwrap_err();
        assert!(matches!(err, ExprError::NotDependent { .. }));
    }

    #[test]
    fn unknown_identifier_and_syntax_positions() {
        assert!(matches!(
            ctx().parse("u + k").unwrap_err(),
            ExprError::UnknownIdentifier { column: 5, .. }
        ));
        assert!(matches!(
            ctx().parse("u + ").unwrap_err(),
            ExprError::Syntax { column: 5, .. }
        ));
        assert!(matches!(
            ctx().parse("u $ v").unwrap_err(),
            ExprError::Syntax { column: 3, .. }
        ));
        assert!(ctx().parse("").is_err());
        assert!(ctx().parse("sin u").is_err());
    }

    #[test]
    fn mixed_suffix_order_is_irrelevant() {
        let c = ctx();
        assert_eq!(c.parse("u_xt").unwrap(), c.parse("u_tx").unwrap());
    }

    #[test]
    fn order_limit_enforced() {
        assert!(matches!(
            ctx().parse("u_xxxxx").unwrap_err(),
            ExprError::OrderOverflow { .. }
        ));
    }

    #[test]
    fn rational_literal_and_division() {
        let c = ctx();
        assert_eq!(c.parse("2/4").unwrap(), Expr::rational(1, 2));
        assert_eq!(c.parse("u/2").unwrap(), c.parse("1/2*u").unwrap());
        assert_eq!(c.parse("u^(-2)").unwrap(), c.parse("u^-2").unwrap());
    }
}
