//! Canonical polynomial normal form with opaque trigonometric atoms.
//!
//! Generators are symbols plus `sin(A)`/`cos(A)` atoms whose argument `A` is
//! itself a normal form. Each trig argument is written as `m·P` with `P`
//! monic in its smallest non-constant monomial; for integer `m` the
//! multiple-angle formula expands `sin(mP)` over `S_P`, `C_P`. Afterwards
//! every `S_A²` is rewritten as `1 − C_A²`. With that rewrite the remainder
//! (sine degree ≤ 1 per atom pair) is unique, so two expressions that agree as
//! polynomials modulo the Pythagorean relations get identical forms.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{rational_to_i64, Expr, ExprError, Func, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Sym(Symbol),
    Sin(Box<PolyNormalForm>),
    Cos(Box<PolyNormalForm>),
}

impl Gen {
    pub fn to_expr(&self) -> Expr {
        match self {
            Gen::Sym(s) => Expr::sym(s.clone()),
            Gen::Sin(a) => Expr::sin(a.to_expr()),
            Gen::Cos(a) => Expr::cos(a.to_expr()),
        }
    }
}

/// Product of generator powers, sorted by generator, no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Gen, i64)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn of(g: Gen, exp: i64) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(g, exp)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Gen, i64)] {
        &self.0
    }

    pub fn exponent(&self, g: &Gen) -> i64 {
        self.0.binary_search_by(|(h, _)| h.cmp(g)).map_or(0, |i| self.0[i].1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn pow(&self, n: i64) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(g, e)| (g.clone(), e * n)).collect())
    }

    fn with_exponent(&self, g: &Gen, exp: i64) -> Monomial {
        let mut out: Vec<(Gen, i64)> = self.0.iter().filter(|(h, _)| h != g).cloned().collect();
        if exp != 0 {
            out.push((g.clone(), exp));
            out.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Monomial(out)
    }

    pub fn to_expr(&self) -> Expr {
        Expr::mul(self.0.iter().map(|(g, e)| Expr::pow(g.to_expr(), *e)))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, then the exponent of the
    /// first generator (in generator order) where the two differ.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, e)), None) => return e.cmp(&0),
                (None, Some((_, e))) => return 0.cmp(e),
                (Some((g, e)), Some((h, f))) => match g.cmp(h) {
                    Ordering::Less => return e.cmp(&0),
                    Ordering::Greater => return 0.cmp(f),
                    Ordering::Equal => {
                        match e.cmp(f) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: monomial → nonzero exact coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PolyNormalForm {
    terms: BTreeMap<Monomial, BigRational>,
}

impl PolyNormalForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn gen(g: Gen) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::of(g, 1), BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// The value if the form is a constant (zero included).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Product without the Pythagorean rewrite.
    fn mul_raw(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_raw(other).reduce_trig()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Rewrites `sin(A)^e` (e ≥ 2) as `sin(A)^(e mod 2)·(1 − cos(A)²)^(e div 2)`.
    fn reduce_trig(self) -> Self {
        let mut out = Self::zero();
        let mut work: Vec<(Monomial, BigRational)> = self.terms.into_iter().collect();
        while let Some((m, c)) = work.pop() {
            let hit = m.0.iter().find_map(|(g, e)| match g {
                Gen::Sin(a) if *e >= 2 => Some((g.clone(), *e, a.clone())),
                _ => None,
            });
            let Some((sin_gen, e, arg)) = hit else {
                out.add_term(m, c);
                continue;
            };
            let base = m.with_exponent(&sin_gen, e % 2);
            let cos_gen = Gen::Cos(arg);
            let half = e / 2;
            for k in 0..=half {
                let coeff = binomial(half, k) * if k % 2 == 0 { 1 } else { -1 };
                let cos_exp = base.exponent(&cos_gen) + 2 * k;
                let term = base.with_exponent(&cos_gen, cos_exp);
                work.push((term, &c * BigRational::from_integer(coeff)));
            }
        }
        out
    }

    pub fn to_expr(&self) -> Expr {
        Expr::add(
            self.terms
                .iter()
                .map(|(m, c)| Expr::mul([Expr::num(c.clone()), m.to_expr()])),
        )
    }

    /// Replaces each power `g^(2k)` by `by^k`. Fails when `g` appears with an
    /// odd exponent.
    pub fn replace_square(&self, g: &Symbol, by: &Symbol) -> Result<Self, ExprError> {
        let gen = Gen::Sym(g.clone());
        let target = Gen::Sym(by.clone());
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(&gen);
            if e % 2 != 0 {
                return Err(ExprError::Domain(format!(
                    "odd power {g}^{e} cannot be rewritten through {by}"
                )));
            }
            let stripped = m.with_exponent(&gen, 0);
            let merged = stripped.mul(&Monomial::of(target.clone(), e / 2));
            out.add_term(merged, c.clone());
        }
        Ok(out)
    }

    /// Symbols among the generators (trig arguments included).
    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        self.to_expr().symbols()
    }
}

impl fmt::Display for PolyNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

fn binomial(n: i64, k: i64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Maps an expression to its canonical polynomial form.
///
/// `sqrt` and `arctan` nodes are rejected, as are negative powers of
/// anything but a single monomial.
pub fn normalize(e: &Expr) -> Result<PolyNormalForm, ExprError> {
    Ok(match e {
        Expr::Num(r) => PolyNormalForm::constant(r.clone()),
        Expr::Sym(s) => PolyNormalForm::gen(Gen::Sym(s.clone())),
        Expr::Add(terms) => {
            let mut acc = PolyNormalForm::zero();
            for t in terms {
                acc = acc.add(&normalize(t)?);
            }
            acc
        }
        Expr::Mul(factors) => {
            let mut acc = PolyNormalForm::constant(BigRational::one());
            for f in factors {
                acc = acc.mul(&normalize(f)?);
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Expr::Pow(base, n) => {
            let b = normalize(base)?;
            if *n > 0 {
                b.pow(u32::try_from(*n).map_err(|_| ExprError::Unsupported { node: e.render() })?)
            } else {
                invert_monomial(&b, -*n).ok_or_else(|| ExprError::NonPolynomial { node: e.render() })?
            }
        }
        Expr::Func(f @ (Func::Sin | Func::Cos), arg) => trig(*f, normalize(arg)?),
        Expr::Func(Func::Sqrt | Func::Arctan, _) => return Err(ExprError::Unsupported { node: e.render() }),
    })
}

fn invert_monomial(b: &PolyNormalForm, n: i64) -> Option<PolyNormalForm> {
    if b.terms.len() != 1 {
        return None;
    }
    let (m, c) = b.terms.iter().next()?;
    let mut coeff = BigRational::one();
    for _ in 0..n {
        coeff /= c;
    }
    let mut out = PolyNormalForm::zero();
    out.add_term(m.pow(-n), coeff);
    Some(out.reduce_trig())
}

/// Splits `A = m·P` where `P` has coefficient 1 on its smallest
/// non-constant monomial. Pure constants have no such monomial.
fn leading_multiple(a: &PolyNormalForm) -> Option<BigRational> {
    a.terms.iter().find(|(m, _)| !m.is_one()).map(|(_, c)| c.clone())
}

fn trig(f: Func, arg: PolyNormalForm) -> PolyNormalForm {
    let is_sin = f == Func::Sin;
    let atom = |a: PolyNormalForm| {
        PolyNormalForm::gen(if is_sin {
            Gen::Sin(Box::new(a))
        } else {
            Gen::Cos(Box::new(a))
        })
    };
    if arg.is_zero() {
        return if is_sin {
            PolyNormalForm::zero()
        } else {
            PolyNormalForm::constant(BigRational::one())
        };
    }
    let (m, variable) = match leading_multiple(&arg) {
        Some(m) => (m, true),
        None => (arg.as_constant().expect("constant argument"), false),
    };
    // sin is odd, cos is even: fold the sign of m out first.
    let negative = m.is_negative();
    let sign = if negative && is_sin {
        -BigRational::one()
    } else {
        BigRational::one()
    };
    let positive = if negative { arg.scale(&-BigRational::one()) } else { arg };
    let m = m.abs();
    let Some(k) = rational_to_i64(&m).filter(|_| variable) else {
        return atom(positive).scale(&sign);
    };
    let primitive = positive.scale(&m.recip());
    let s = PolyNormalForm::gen(Gen::Sin(Box::new(primitive.clone())));
    let c = PolyNormalForm::gen(Gen::Cos(Box::new(primitive)));
    // (C + iS)^k: odd powers of S feed the sine, even powers the cosine.
    let mut out = PolyNormalForm::zero();
    for j in 0..=k {
        if (j % 2 == 1) != is_sin {
            continue;
        }
        let phase = if (j / 2) % 2 == 0 { 1 } else { -1 };
        let coeff = BigRational::from_integer(binomial(k, j) * phase);
        let term = c
            .pow(u32::try_from(k - j).expect("small exponent"))
            .mul_raw(&s.pow(u32::try_from(j).expect("small exponent")))
            .scale(&coeff);
        out = out.add(&term);
    }
    out.reduce_trig().scale(&sign)
}
