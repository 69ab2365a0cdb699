//! Standard textual rendering. The output re-parses to a structurally equal
//! tree, provided the tree was built through the [`Expr`] constructors.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{is_negative, Expr};

impl Expr {
    pub fn render(&self) -> String {
        let mut s = String::new();
        write_expr(&mut s, self).expect("writing to a String cannot fail");
        s
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

/// Splits a sum term into (is_negative, magnitude).
fn split_sign(term: &Expr) -> (bool, Expr) {
    match term {
        Expr::Num(r) if is_negative(r) => (true, Expr::Num(-r.clone())),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Num(r)) if is_negative(r) => {
                let mut rest = fs.clone();
                rest[0] = Expr::Num(-r.clone());
                (true, Expr::mul(rest))
            }
            _ => (false, term.clone()),
        },
        _ => (false, term.clone()),
    }
}

fn write_expr<W: Write>(w: &mut W, e: &Expr) -> fmt::Result {
    match e {
        Expr::Add(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    write_term(w, t)?;
                    continue;
                }
                let (neg, mag) = split_sign(t);
                w.write_str(if neg { " - " } else { " + " })?;
                if matches!(mag, Expr::Add(_)) {
                    w.write_char('(')?;
                    write_expr(w, &mag)?;
                    w.write_char(')')?;
                } else {
                    write_term(w, &mag)?;
                }
            }
            Ok(())
        }
        other => write_term(w, other),
    }
}

fn write_term<W: Write>(w: &mut W, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(r) => write!(w, "{r}"),
        Expr::Mul(fs) => {
            let mut rest: &[Expr] = fs;
            if let Some(Expr::Num(r)) = fs.first() {
                rest = &fs[1..];
                if (-r.clone()).is_one() {
                    w.write_char('-')?;
                } else {
                    write!(w, "{r}*")?;
                }
            }
            for (i, f) in rest.iter().enumerate() {
                if i > 0 {
                    w.write_char('*')?;
                }
                write_factor(w, f)?;
            }
            Ok(())
        }
        Expr::Add(_) => {
            w.write_char('(')?;
            write_expr(w, e)?;
            w.write_char(')')
        }
        other => write_factor(w, other),
    }
}

fn write_factor<W: Write>(w: &mut W, e: &Expr) -> fmt::Result {
    match e {
        Expr::Sym(s) => write!(w, "{s}"),
        Expr::Func(f, arg) => {
            write!(w, "{}(", f.name())?;
            write_expr(w, arg)?;
            w.write_char(')')
        }
        Expr::Pow(base, n) => {
            match base.as_ref() {
                Expr::Sym(_) | Expr::Func(..) => write_factor(w, base)?,
                Expr::Num(r) if !r.is_negative() && r.is_integer() => write!(w, "{r}")?,
                other => {
                    w.write_char('(')?;
                    write_expr(w, other)?;
                    w.write_char(')')?;
                }
            }
            if *n < 0 {
                write!(w, "^({n})")
            } else {
                write!(w, "^{n}")
            }
        }
        Expr::Num(r) if !r.is_negative() && r.is_integer() => write!(w, "{r}"),
        other => {
            w.write_char('(')?;
            write_expr(w, other)?;
            w.write_char(')')
        }
    }
}
