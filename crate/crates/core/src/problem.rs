//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! [params]
//! beta = 1
//! [independents]
//! t
//! x
//! [dependents]
//! u
//! v
//! [equations]
//! G1 = u_t + beta*u_x
//! [evolution]
//! u_t = -beta*u_x
//! [multipliers]
//! i = (v_x, u_x)
//! [conserved]
//! T1[i] = (density, flux)
//! [symmetries]
//! X1 = (1, 0, 0, 0)
//! [candidates]
//! label : c=0, gamma=0 : u = ... : v = ...
//! ```
//!
//! The first independent is time. An entry named `name.printed` is an
//! alternative reading of `name`, used instead of it by
//! [`Problem::variant`] with `printed = true`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::expr::{normalize, Context, Expr, ExprError, VarKind};
use crate::jet::{ConservedVector, JetError, JetSpace, MultiplierPair, PDESystem, VectorField};
use crate::reduction::{NumericParams, SolutionCandidate};

/// The cubic Schrödinger problem shipped with the crate.
pub const CUBIC_NLSE: &str = include_str!("../problems/cubic_nlse.prob");

const PRINTED: &str = ".printed";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    At {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("the problem file is empty")]
    Empty,
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error(transparent)]
    Jet(#[from] JetError),
}

impl ProblemError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self::At {
            line,
            column,
            message: message.into(),
        }
    }

    /// The `(line, column)` of a located error.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            Self::At { line, column, .. } => Some((*line, *column)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Params,
    Independents,
    Dependents,
    Equations,
    Evolution,
    Multipliers,
    Conserved,
    Symmetries,
    Candidates,
}

impl Section {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "params" => Self::Params,
            "independents" => Self::Independents,
            "dependents" => Self::Dependents,
            "equations" => Self::Equations,
            "evolution" => Self::Evolution,
            "multipliers" => Self::Multipliers,
            "conserved" => Self::Conserved,
            "symmetries" => Self::Symmetries,
            "candidates" => Self::Candidates,
            _ => return None,
        })
    }
}

/// A named item together with its optional printed reading.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry<T> {
    pub name: String,
    pub value: T,
    pub printed: Option<T>,
}

impl<T: Clone> Entry<T> {
    fn pick(&self, printed: bool) -> T {
        match (&self.printed, printed) {
            (Some(p), true) => p.clone(),
            _ => self.value.clone(),
        }
    }
}

/// A conserved vector and the multiplier it is paired with.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedEntry {
    pub multiplier: String,
    pub vector: ConservedVector,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub context: Context,
    pub params: Vec<(String, BigRational)>,
    pub independents: Vec<String>,
    pub dependents: Vec<String>,
    pub equations: Vec<Entry<Expr>>,
    /// Keyed by dependent name.
    pub evolution: Vec<Entry<Expr>>,
    pub multipliers: Vec<Entry<MultiplierPair>>,
    pub conserved: Vec<Entry<ConservedEntry>>,
    pub symmetries: Vec<Entry<VectorField>>,
    pub candidates: Vec<SolutionCandidate>,
}

#[derive(Clone, Copy)]
struct Line<'a> {
    number: usize,
    /// 1-based column of `text` in the source line.
    column: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn sub(&self, text: &'a str) -> Line<'a> {
        let offset = text.as_ptr() as usize - self.text.as_ptr() as usize;
        Line {
            number: self.number,
            column: self.column + self.text[..offset].chars().count(),
            text,
        }
    }

    fn trimmed(&self) -> Line<'a> {
        self.sub(self.text.trim())
    }

    fn error(&self, message: impl Into<String>) -> ProblemError {
        ProblemError::at(self.number, self.column, message)
    }

    fn split_once(&self, sep: char) -> Option<(Line<'a>, Line<'a>)> {
        let (a, b) = self.text.split_once(sep)?;
        Some((self.sub(a).trimmed(), self.sub(b).trimmed()))
    }

    fn parse_expr(&self, ctx: &Context) -> Result<Expr, ProblemError> {
        ctx.parse(self.text).map_err(|e| self.expr_error(e))
    }

    fn expr_error(&self, e: ExprError) -> ProblemError {
        let inner = match &e {
            ExprError::Syntax { column, .. }
            | ExprError::UnknownIdentifier { column, .. }
            | ExprError::NotDependent { column, .. }
            | ExprError::UnknownSuffix { column, .. } => Some(*column),
            _ => None,
        };
        let column = self.column + inner.map_or(0, |c| c - 1);
        ProblemError::at(self.number, column, e.to_string())
    }

    /// Splits `(a, b, ...)` at top-level commas.
    fn tuple(&self) -> Result<Vec<Line<'a>>, ProblemError> {
        let t = self.text;
        if !(t.starts_with('(') && t.ends_with(')')) || t.len() < 2 {
            return Err(self.error("expected a parenthesized tuple"));
        }
        let inner = self.sub(&t[1..t.len() - 1]);
        let mut parts = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in inner.text.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(inner.sub(&inner.text[start..i]).trimmed());
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(inner.sub(&inner.text[start..]).trimmed());
        if let Some(empty) = parts.iter().find(|p| p.text.is_empty()) {
            return Err(empty.error("empty tuple component"));
        }
        Ok(parts)
    }

    fn exprs(&self, ctx: &Context, arity: usize, what: &str) -> Result<Vec<Expr>, ProblemError> {
        let parts = self.tuple()?;
        if parts.len() != arity {
            return Err(self.error(format!("{what} needs {arity} components, got {}", parts.len())));
        }
        parts.iter().map(|p| p.parse_expr(ctx)).collect()
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// Collects `name = value` entries, attaching `name.printed` to `name`.
struct Collector<T> {
    section: &'static str,
    entries: Vec<Entry<T>>,
    pending: Vec<(String, T, usize, usize)>,
}

impl<T> Collector<T> {
    fn new(section: &'static str) -> Self {
        Self {
            section,
            entries: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn push(&mut self, name: &Line, value: T) -> Result<(), ProblemError> {
        if let Some(base) = name.text.strip_suffix(PRINTED) {
            self.pending.push((base.to_string(), value, name.number, name.column));
            return Ok(());
        }
        if self.entries.iter().any(|e| e.name == name.text) {
            return Err(name.error(format!("duplicate entry `{}` in [{}]", name.text, self.section)));
        }
        self.entries.push(Entry {
            name: name.text.to_string(),
            value,
            printed: None,
        });
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<Entry<T>>, ProblemError> {
        for (base, value, line, column) in self.pending {
            let entry =
                self.entries.iter_mut().find(|e| e.name == base).ok_or_else(|| {
                    ProblemError::at(line, column, format!("`{base}{PRINTED}` has no entry `{base}`"))
                })?;
            if entry.printed.is_some() {
                return Err(ProblemError::at(line, column, format!("duplicate `{base}{PRINTED}`")));
            }
            entry.printed = Some(value);
        }
        Ok(self.entries)
    }
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let mut sections: BTreeMap<Section, Vec<Line>> = BTreeMap::new();
        let mut current: Option<Section> = None;
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            let line = Line {
                number: i + 1,
                column: 1,
                text: raw,
            }
            .sub(content)
            .trimmed();
            if line.text.is_empty() {
                continue;
            }
            if let Some(name) = line.text.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let section = Section::from_name(name.trim())
                    .ok_or_else(|| line.error(format!("unknown section [{}]", name.trim())))?;
                if sections.contains_key(&section) {
                    return Err(line.error(format!("section [{}] appears twice", name.trim())));
                }
                sections.insert(section, Vec::new());
                current = Some(section);
                continue;
            }
            let section = current.ok_or_else(|| line.error("entry outside any section"))?;
            sections.entry(section).or_default().push(line);
        }
        if sections.is_empty() {
            return Err(ProblemError::Empty);
        }
        let lines = |s: Section| sections.get(&s).map(Vec::as_slice).unwrap_or(&[]);

        let mut context = Context::new();
        let declare = |line: &Line, kind: VarKind, ctx: &mut Context| -> Result<String, ProblemError> {
            if !is_identifier(line.text) {
                return Err(line.error(format!("`{}` is not a valid name", line.text)));
            }
            if ctx.kind_of(line.text).is_some() {
                return Err(line.error(format!("`{}` is declared twice", line.text)));
            }
            ctx.declare(line.text, kind).map_err(|e| line.expr_error(e))?;
            Ok(line.text.to_string())
        };

        let mut params = Vec::new();
        for line in lines(Section::Params) {
            let (name, value) = line
                .split_once('=')
                .ok_or_else(|| line.error("expected `name = value`"))?;
            let name = declare(&name, VarKind::Parameter, &mut context)?;
            let expr = value.parse_expr(&Context::new())?;
            let Some(r) = normalize(&expr).ok().and_then(|p| p.as_constant()) else {
                return Err(value.error("parameter values must be rational constants"));
            };
            params.push((name, r));
        }
        let mut independents = Vec::new();
        for line in lines(Section::Independents) {
            independents.push(declare(line, VarKind::Independent, &mut context)?);
        }
        let mut dependents = Vec::new();
        for line in lines(Section::Dependents) {
            dependents.push(declare(line, VarKind::Dependent, &mut context)?);
        }
        if independents.is_empty() {
            return Err(ProblemError::MissingSection("independents"));
        }
        if dependents.is_empty() {
            return Err(ProblemError::MissingSection("dependents"));
        }
        let time = independents[0].clone();

        let mut equations = Collector::new("equations");
        for line in lines(Section::Equations) {
            let (name, value) = named(line)?;
            equations.push(&name, value.parse_expr(&context)?)?;
        }

        let mut evolution = Collector::new("evolution");
        for line in lines(Section::Evolution) {
            let (name, value) = named(line)?;
            let base = name.text.strip_suffix(PRINTED).unwrap_or(name.text);
            let dep = base
                .strip_suffix(&format!("_{time}"))
                .filter(|d| dependents.iter().any(|x| x == d))
                .ok_or_else(|| name.error(format!("expected `<dependent>_{time}`, got `{base}`")))?;
            let key_name = if name.text.ends_with(PRINTED) {
                format!("{dep}{PRINTED}")
            } else {
                dep.to_string()
            };
            let key_line = Line {
                number: name.number,
                column: name.column,
                text: &key_name,
            };
            evolution.push(&key_line, value.parse_expr(&context)?)?;
        }

        let mut multipliers = Collector::new("multipliers");
        for line in lines(Section::Multipliers) {
            let (name, value) = named(line)?;
            let q = value.exprs(&context, dependents.len(), "a multiplier")?;
            multipliers.push(&name, MultiplierPair { q })?;
        }
        let multipliers = multipliers.finish()?;

        let mut conserved = Collector::new("conserved");
        for line in lines(Section::Conserved) {
            let (head, value) = named_conserved(line)?;
            let (name, mult) = head;
            if !multipliers.iter().any(|m| m.name == mult.text) {
                return Err(mult.error(format!("unknown multiplier `{}`", mult.text)));
            }
            let components = value.exprs(&context, independents.len(), "a conserved vector")?;
            conserved.push(
                &name,
                ConservedEntry {
                    multiplier: mult.text.to_string(),
                    vector: ConservedVector { components },
                },
            )?;
        }

        let mut symmetries = Collector::new("symmetries");
        for line in lines(Section::Symmetries) {
            let (name, value) = named(line)?;
            let n = independents.len();
            let mut parts = value.exprs(&context, n + dependents.len(), "a generator")?;
            let eta = parts.split_off(n);
            symmetries.push(&name, VectorField::new(parts, eta))?;
        }

        let mut candidates: Vec<SolutionCandidate> = Vec::new();
        for line in lines(Section::Candidates) {
            let cand = parse_candidate(line, &context, &params)?;
            if candidates.iter().any(|c| c.label == cand.label) {
                return Err(line.error(format!("duplicate candidate `{}`", cand.label)));
            }
            candidates.push(cand);
        }

        Ok(Self {
            context,
            params,
            independents,
            dependents,
            equations: equations.finish()?,
            evolution: evolution.finish()?,
            multipliers,
            conserved: conserved.finish()?,
            symmetries: symmetries.finish()?,
            candidates,
        })
    }

    /// The shipped cubic Schrödinger problem.
    pub fn cubic_nlse() -> Self {
        Self::parse(CUBIC_NLSE).expect("the shipped problem file parses")
    }

    /// A copy in which every item with a printed reading uses it (when
    /// `printed`), with all printed readings dropped.
    pub fn variant(&self, printed: bool) -> Self {
        fn pick<T: Clone>(v: &[Entry<T>], printed: bool) -> Vec<Entry<T>> {
            v.iter()
                .map(|e| Entry {
                    name: e.name.clone(),
                    value: e.pick(printed),
                    printed: None,
                })
                .collect()
        }
        Self {
            context: self.context.clone(),
            params: self.params.clone(),
            independents: self.independents.clone(),
            dependents: self.dependents.clone(),
            equations: pick(&self.equations, printed),
            evolution: pick(&self.evolution, printed),
            multipliers: pick(&self.multipliers, printed),
            conserved: pick(&self.conserved, printed),
            symmetries: pick(&self.symmetries, printed),
            candidates: self.candidates.clone(),
        }
    }

    /// Names of every item that has a printed reading, as `section.name`.
    pub fn printed_items(&self) -> Vec<String> {
        fn names<'a, T>(section: &'a str, v: &'a [Entry<T>]) -> impl Iterator<Item = String> + 'a {
            let section = section.to_string();
            v.iter()
                .filter(|e| e.printed.is_some())
                .map(move |e| format!("{section}.{}", e.name))
        }
        names("equations", &self.equations)
            .chain(names("evolution", &self.evolution))
            .chain(names("multipliers", &self.multipliers))
            .chain(names("conserved", &self.conserved))
            .chain(names("symmetries", &self.symmetries))
            .collect()
    }

    pub fn space(&self) -> JetSpace {
        let indeps: Vec<&str> = self.independents.iter().map(String::as_str).collect();
        let deps: Vec<&str> = self.dependents.iter().map(String::as_str).collect();
        JetSpace::new(&indeps, &deps, self.context.max_order())
    }

    pub fn equation_exprs(&self) -> Vec<Expr> {
        self.equations.iter().map(|e| e.value.clone()).collect()
    }

    /// The system built from the default readings.
    pub fn system(&self) -> Result<PDESystem, ProblemError> {
        let evolution = self
            .evolution
            .iter()
            .map(|e| (e.name.clone(), e.value.clone()))
            .collect();
        Ok(PDESystem::new(self.space(), self.equation_exprs(), evolution)?)
    }

    pub fn multiplier(&self, name: &str) -> Option<&MultiplierPair> {
        self.multipliers.iter().find(|m| m.name == name).map(|m| &m.value)
    }

    pub fn conserved_vector(&self, name: &str) -> Option<&ConservedVector> {
        self.conserved.iter().find(|c| c.name == name).map(|c| &c.value.vector)
    }

    pub fn symmetry(&self, name: &str) -> Option<&VectorField> {
        self.symmetries.iter().find(|s| s.name == name).map(|s| &s.value)
    }

    pub fn candidate(&self, label: &str) -> Option<&SolutionCandidate> {
        self.candidates.iter().find(|c| c.label == label)
    }

    pub fn numeric_params(&self) -> NumericParams {
        self.params
            .iter()
            .map(|(n, r)| (n.clone(), r.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    pub fn param(&self, name: &str) -> Option<&BigRational> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }
}

fn named<'a>(line: &Line<'a>) -> Result<(Line<'a>, Line<'a>), ProblemError> {
    let (name, value) = line
        .split_once('=')
        .ok_or_else(|| line.error("expected `name = value`"))?;
    if !is_label(name.text) {
        return Err(name.error(format!("`{}` is not a valid entry name", name.text)));
    }
    Ok((name, value))
}

type ConservedHead<'a> = (Line<'a>, Line<'a>);

/// `T1[i] = (...)` → `((T1, i), value)`.
fn named_conserved<'a>(line: &Line<'a>) -> Result<(ConservedHead<'a>, Line<'a>), ProblemError> {
    let (head, value) = line
        .split_once('=')
        .ok_or_else(|| line.error("expected `name[multiplier] = (density, flux)`"))?;
    let (name, rest) = head
        .split_once('[')
        .ok_or_else(|| head.error("expected `name[multiplier]`"))?;
    let mult = rest
        .text
        .strip_suffix(']')
        .map(|m| rest.sub(m).trimmed())
        .ok_or_else(|| rest.error("missing `]`"))?;
    if !is_label(name.text) {
        return Err(name.error(format!("`{}` is not a valid entry name", name.text)));
    }
    Ok(((name, mult), value))
}

fn parse_candidate(
    line: &Line,
    ctx: &Context,
    params: &[(String, BigRational)],
) -> Result<SolutionCandidate, ProblemError> {
    let fields: Vec<Line> = {
        let mut out = Vec::new();
        let mut rest = *line;
        while let Some((a, b)) = rest.split_once(':') {
            out.push(a);
            rest = b;
        }
        out.push(rest);
        out
    };
    let [label, constraints, u, v] = fields.as_slice() else {
        return Err(line.error("expected `label : constraints : u = expr : v = expr`"));
    };
    if !is_label(label.text) {
        return Err(label.error(format!("`{}` is not a valid label", label.text)));
    }
    let mut parsed = Vec::new();
    let mut suspect = false;
    let mut seen = BTreeSet::new();
    if !constraints.text.is_empty() {
        let mut rest = *constraints;
        loop {
            let (item, tail) = match rest.split_once(',') {
                Some((a, b)) => (a, Some(b)),
                None => (rest, None),
            };
            if item.text == "suspect" {
                suspect = true;
            } else {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| item.error("expected `param=value` or `suspect`"))?;
                if !params.iter().any(|(p, _)| p == name.text) {
                    return Err(name.error(format!("`{}` is not a declared parameter", name.text)));
                }
                if !seen.insert(name.text.to_string()) {
                    return Err(name.error(format!("`{}` is constrained twice", name.text)));
                }
                let expr = value.parse_expr(&Context::new())?;
                let Some(r) = normalize(&expr).ok().and_then(|p| p.as_constant()) else {
                    return Err(value.error("constraint values must be rational constants"));
                };
                parsed.push((name.text.to_string(), r));
            }
            match tail {
                Some(t) => rest = t,
                None => break,
            }
        }
    }
    let field = |l: &Line, dep: &str| -> Result<Expr, ProblemError> {
        let (name, value) = l
            .split_once('=')
            .ok_or_else(|| l.error(format!("expected `{dep} = expr`")))?;
        if name.text != dep {
            return Err(name.error(format!("expected `{dep}`, got `{}`", name.text)));
        }
        let e = value.parse_expr(ctx)?;
        if let Some(j) = e.symbols().iter().find_map(|s| s.as_jet().cloned()) {
            return Err(value.error(format!("candidate fields are explicit; found jet variable {j}")));
        }
        Ok(e)
    };
    let u = field(u, "u")?;
    let v = field(v, "v")?;
    let q_form = format!("{u} + i*({v})");
    Ok(SolutionCandidate {
        label: label.text.to_string(),
        constraints: parsed,
        suspect,
        phase: None,
        u,
        v,
        q_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{eval_numeric, Symbol};
    use crate::reduction::{case_solutions, draw_params, reduction_context, sample_points};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SMALL: &str = "[independents]\nt\nx\n[dependents]\nu\n[equations]\nG = u_t - u_xx\n";

    #[test]
    fn shipped_file_loads() {
        let p = Problem::cubic_nlse();
        assert_eq!(p.independents, ["t", "x"]);
        assert_eq!(p.dependents, ["u", "v"]);
        assert_eq!(p.equations.len(), 2);
        assert_eq!(p.multipliers.len(), 4);
        assert_eq!(p.conserved.len(), 4);
        assert_eq!(p.symmetries.len(), 5);
        assert_eq!(p.candidates.len(), 12);
        assert_eq!(
            p.printed_items(),
            ["equations.G2", "evolution.v", "multipliers.iii", "multipliers.iv"]
        );
        assert_eq!(p.conserved[2].value.multiplier, "iii");
        assert!(p.candidate("case3.p1").unwrap().suspect);
        p.system().unwrap();
        p.variant(true).system().unwrap();
    }

    #[test]
    fn printed_variant_swaps_entries() {
        let p = Problem::cubic_nlse();
        let printed = p.variant(true);
        assert_ne!(printed.equations[1].value, p.equations[1].value);
        assert_eq!(printed.equations[0].value, p.equations[0].value);
        assert_eq!(p.variant(false).equations[1].value, p.equations[1].value);
        assert!(printed.printed_items().is_empty());
    }

    #[test]
    fn empty_and_comment_only_files_are_errors() {
        assert_eq!(Problem::parse("").unwrap_err(), ProblemError::Empty);
        assert_eq!(Problem::parse("# nothing\n\n").unwrap_err(), ProblemError::Empty);
    }

    #[test]
    fn expression_errors_carry_file_positions() {
        let text = "[independents]\nt\nx\n[dependents]\nu\n[equations]\nG = u_t + w\n";
        let err = Problem::parse(text).unwrap_err();
        assert_eq!(err.location(), Some((7, 11)), "{err}");
        let text = "[independents]\nt\nx\n[dependents]\nu\n[equations]\nG = u_t + * u\n";
        assert_eq!(Problem::parse(text).unwrap_err().location(), Some((7, 11)));
    }

    #[test]
    fn structural_errors() {
        let cases = [
            ("t\n", (1, 1)),
            ("[nonsense]\n", (1, 1)),
            (&format!("{SMALL}[multipliers]\nm = (u, u)\n"), (9, 5)),
            (
                &format!("{SMALL}[multipliers]\nm = (u)\n[conserved]\nT[n] = (u, u)\n"),
                (11, 3),
            ),
            (&format!("{SMALL}G.printed = u\nH.printed = u\n"), (9, 1)),
            (&format!("{SMALL}G = u\n"), (8, 1)),
            (&format!("{SMALL}[evolution]\nw_t = u\n"), (9, 1)),
            (&format!("{SMALL}[candidates]\na : beta=1 : u = 1 : v = 0\n"), (9, 5)),
            (&format!("{SMALL}[candidates]\na : : u = u_x : v = 0\n"), (9, 11)),
        ];
        for (text, loc) in cases {
            let err = Problem::parse(text).unwrap_err();
            assert_eq!(err.location(), Some(loc), "{text:?}: {err}");
        }
        assert_eq!(
            Problem::parse("[dependents]\nu\n").unwrap_err(),
            ProblemError::MissingSection("independents")
        );
    }

    #[test]
    fn small_problem_without_optional_sections() {
        let mut text = SMALL.to_string();
        text.push_str("[evolution]\nu_t = u_xx\n");
        let p = Problem::parse(&text).unwrap();
        assert!(p.candidates.is_empty());
        assert_eq!(p.evolution[0].name, "u");
        p.system().unwrap();
    }

    #[test]
    fn file_candidates_agree_with_generated_ones() {
        let p = Problem::cubic_nlse();
        let ctx = reduction_context(&Context::new()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 1..=3 {
            for gen in case_solutions(case, &ctx).unwrap() {
                let file = p.candidate(&gen.label).unwrap();
                assert_eq!(file.constraints, gen.constraints, "{}", gen.label);
                assert_eq!(file.suspect, gen.suspect, "{}", gen.label);
                let params = draw_params(&gen, &mut rng);
                let mut pt: crate::expr::Point = params.iter().map(|(n, v)| (Symbol::param(n), *v)).collect();
                for (x, t) in sample_points(20) {
                    pt.insert(Symbol::indep("x"), x);
                    pt.insert(Symbol::indep("t"), t);
                    for (a, b) in [(&file.u, &gen.u), (&file.v, &gen.v)] {
                        let (a, b) = (eval_numeric(a, &pt).unwrap(), eval_numeric(b, &pt).unwrap());
                        assert!((a - b).abs() < 1e-13, "{}: {a} vs {b}", gen.label);
                    }
                }
            }
        }
    }
}
