//! Verification commands behind the `nlse-verify` binary.

pub mod report;

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};

use nlse_core::expr::{normalize, Context, Expr, ExprError, PolyNormalForm};
use nlse_core::jet::{association_residual, divergence_match, multiplier_condition, symmetry_invariance};
use nlse_core::numerics::{
    candidate_state, gaussian_packet, plane_wave, random_modes, run, FieldState, Grid, NlseParams, NumericsError,
    QuantitySeries, SimConfig,
};
use nlse_core::problem::{Problem, ProblemError};
use nlse_core::reduction::{
    case_solutions, classify, draw_params, factorized_conditions, factorized_reduced_equation, printed_reduced_flux,
    quoted_reduced_equation, reduced_ode, reduction_context, transform_conserved, CanonicalTransform, Frame,
    NumericParams, ReductionError, SolutionCandidate, Verdict as Adjudication, CLASSIFY_TOL,
};
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use report::{Record, Verdict, VerificationReport};

/// Default drift tolerance for `simulate`.
pub const SIMULATE_TOL: f64 = 1e-6;
/// Parameter draws per candidate.
pub const DRAWS: usize = 3;
/// Conservation law paired with the rotation in the reduction.
const MASS_LAW: &str = "T2";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Problem { path: String, source: ProblemError },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads a problem file, or the shipped problem when `path` is `None`.
pub fn load_problem(path: Option<&Path>) -> Result<Problem, CliError> {
    let (name, text) = match path {
        Some(p) => (
            p.display().to_string(),
            std::fs::read_to_string(p).map_err(io_error(p))?,
        ),
        None => (
            "cubic_nlse.prob".to_string(),
            nlse_core::problem::CUBIC_NLSE.to_string(),
        ),
    };
    Problem::parse(&text).map_err(|source| CliError::Problem { path: name, source })
}

fn render(forms: &[PolyNormalForm]) -> String {
    if forms.iter().all(PolyNormalForm::is_zero) {
        return "0".into();
    }
    let parts: Vec<String> = forms.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join("; "))
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Subject text, marking items that use their printed reading.
fn subject(name: &str, has_printed: bool, printed: bool) -> String {
    if printed && has_printed {
        format!("{name} (printed)")
    } else {
        name.to_string()
    }
}

/// Multiplier, conservation-law and symmetry checks on every item of the
/// problem.
pub fn cmd_verify(problem: &Problem, printed: bool) -> Result<VerificationReport, CliError> {
    let p = problem.variant(printed);
    let mut rep = VerificationReport::new("verify");
    let sys = p.system().map_err(|source| CliError::Problem {
        path: "system".into(),
        source,
    })?;
    for (m, orig) in p.multipliers.iter().zip(&problem.multipliers) {
        let subj = subject(&m.name, orig.printed.is_some(), printed);
        rep.push(match multiplier_condition(&m.value, &sys) {
            Ok(r) => Record::new(
                "verify.multiplier",
                subj,
                Verdict::from_bool(r.iter().all(PolyNormalForm::is_zero)),
                render(&r),
                "Euler operator of q·G vanishes",
            ),
            Err(e) => Record::new(
                "verify.multiplier",
                subj,
                Verdict::Fail,
                e.to_string(),
                "Euler operator of q·G vanishes",
            ),
        });
    }
    for c in &p.conserved {
        let has_printed = problem
            .multipliers
            .iter()
            .any(|m| m.name == c.value.multiplier && m.printed.is_some());
        let subj = subject(&format!("{}[{}]", c.name, c.value.multiplier), has_printed, printed);
        let anchor = "D_t T^t + D_x T^x = q·G";
        let Some(m) = p.multiplier(&c.value.multiplier) else {
            rep.push(Record::new(
                "verify.divergence",
                subj,
                Verdict::Fail,
                "unknown multiplier",
                anchor,
            ));
            continue;
        };
        rep.push(match divergence_match(&c.value.vector, m, &sys) {
            Ok(r) => Record::new(
                "verify.divergence",
                subj,
                Verdict::from_bool(r.is_zero()),
                render(&[r]),
                anchor,
            ),
            Err(e) => Record::new("verify.divergence", subj, Verdict::Fail, e.to_string(), anchor),
        });
    }
    for x in &p.symmetries {
        let anchor = "prolonged generator annihilates G on solutions";
        rep.push(match symmetry_invariance(&x.value, &sys) {
            Ok(r) => Record::new(
                "verify.symmetry",
                x.name.clone(),
                Verdict::from_bool(r.iter().all(PolyNormalForm::is_zero)),
                render(&r),
                anchor,
            ),
            Err(e) => Record::new("verify.symmetry", x.name.clone(), Verdict::Fail, e.to_string(), anchor),
        });
    }
    Ok(rep)
}

/// Pairs whose association is asserted; they decide the exit code.
pub const CLAIMED_ASSOCIATIONS: [(&str, &str); 2] = [("X1", "T2"), ("X3", "T2")];

/// The full symmetry × conservation-law association matrix.
pub fn cmd_associate(problem: &Problem, printed: bool) -> Result<VerificationReport, CliError> {
    let p = problem.variant(printed);
    let space = p.space();
    let mut rep = VerificationReport::new("associate");
    for x in &p.symmetries {
        for t in &p.conserved {
            let claimed = CLAIMED_ASSOCIATIONS.contains(&(x.name.as_str(), t.name.as_str()));
            let (id, anchor) = if claimed {
                ("associate", "claimed association")
            } else {
                ("associate.matrix", "computed association")
            };
            let subj = format!("({}, {})", x.name, t.name);
            let rec = match association_residual(&x.value, &t.value.vector, &space) {
                Ok(r) => Record::new(
                    id,
                    subj,
                    Verdict::from_bool(r.iter().all(PolyNormalForm::is_zero)),
                    render(&r),
                    anchor,
                ),
                Err(e) => Record::new(id, subj, Verdict::Fail, e.to_string(), anchor),
            };
            rep.push(if claimed { rec } else { rec.informational() });
        }
    }
    Ok(rep)
}

/// Parses a rational constant such as `1/2` or `-3`.
pub fn parse_constant(text: &str) -> Result<Expr, CliError> {
    let bad = || CliError::Usage(format!("c must be a rational constant, got `{text}`"));
    let e = Context::new().parse(text).map_err(|_| bad())?;
    let r = normalize(&e).ok().and_then(|p| p.as_constant()).ok_or_else(bad)?;
    Ok(Expr::num(r))
}

fn describe_draw(params: &NumericParams) -> String {
    let parts: Vec<String> = params.iter().map(|(n, v)| format!("{n}={v:.4}")).collect();
    parts.join(",")
}

/// Classifies one candidate over several parameter draws.
fn candidate_record(
    id: &str,
    cand: &SolutionCandidate,
    equations: &[Expr],
    rctx: Option<&Context>,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Record {
    let mut all_exact = true;
    let mut parts = Vec::with_capacity(DRAWS);
    for k in 0..DRAWS {
        let params = draw_params(cand, rng);
        let text = match classify(cand, &params, equations, tol) {
            Ok(c) => {
                all_exact &= c.verdict == Adjudication::Exact;
                let mut s = format!(
                    "draw{}:{} g1={} g2={} reduced={}",
                    k + 1,
                    c.verdict,
                    sci(c.g1_max),
                    sci(c.g2_max),
                    sci(c.reduced_max)
                );
                if let Some(Ok(Some((amp, disp)))) = rctx.map(|ctx| factorized_conditions(cand, &params, ctx)) {
                    s.push_str(&format!(" amplitude={} dispersion={}", sci(amp), sci(disp)));
                }
                s.push_str(&format!(" at {}", describe_draw(&params)));
                s
            }
            Err(e) => {
                all_exact = false;
                format!("draw{}:error {e}", k + 1)
            }
        };
        parts.push(text);
    }
    let verdict = if all_exact && !cand.suspect {
        Verdict::Pass
    } else {
        Verdict::Flagged
    };
    let mut subject = format!("{} [{}]", cand.label, cand.constraint_text());
    if cand.suspect {
        subject.push_str(" phase depends on s");
    }
    Record::new(id, subject, verdict, parts.join("; "), &cand.q_form)
}

/// Canonical transform, reduced conservation law, reduced equation and the
/// closed-form candidates of each case.
pub fn cmd_reduce(
    problem: &Problem,
    printed: bool,
    c: Option<&str>,
    case: Option<u32>,
    seed: u64,
    tol: Option<f64>,
) -> Result<VerificationReport, CliError> {
    let p = problem.variant(printed);
    let cases: Vec<u32> = match case {
        Some(k @ 1..=3) => vec![k],
        Some(k) => return Err(CliError::Usage(format!("unknown case {k} (expected 1, 2 or 3)"))),
        None => vec![1, 2, 3],
    };
    let c_expr = match c {
        Some(text) => parse_constant(text)?,
        None => Expr::sym(nlse_core::expr::Symbol::param("c")),
    };
    let rctx = reduction_context(&p.context)?;
    let equations = p.equation_exprs();
    let mut rep = VerificationReport::new("reduce");
    let tr = match CanonicalTransform::build(&rctx, c_expr.clone()) {
        Ok(tr) => tr,
        Err(e) => {
            rep.push(Record::new(
                "reduce.jacobian",
                "J = det(A)",
                Verdict::Fail,
                e.to_string(),
                "canonical coordinates",
            ));
            return Ok(rep);
        }
    };
    let j = normalize(&tr.j)?;
    rep.push(Record::new(
        "reduce.jacobian",
        "J = det(A)",
        Verdict::from_bool(j.as_constant().is_some_and(|r| r.is_one())),
        j.to_string(),
        "canonical coordinates",
    ));

    let c_value = match c_expr.as_num() {
        Some(r) => r.to_f64().unwrap_or(f64::NAN),
        None => p.param("c").and_then(|r| r.to_f64()).unwrap_or(1.0),
    };
    let defect = tr.invariant_defect(&mut ChaCha8Rng::seed_from_u64(seed), c_value, 50);
    rep.push(Record::new(
        "reduce.inverse",
        "forward then inverse map",
        Verdict::from_bool(defect < 1e-12),
        sci(defect),
        "u = w cos(p + cs), v = w sin(p + cs)",
    ));

    match p.conserved_vector(MASS_LAW) {
        None => rep.push(Record::new(
            "reduce.density",
            MASS_LAW,
            Verdict::Fail,
            "no such conserved vector",
            "T^s = w^2/2",
        )),
        Some(t) => match transform_conserved(t, &tr, Frame::Stationary) {
            Ok(out) => {
                let want = normalize(&rctx.parse("1/2*w^2")?)?;
                let diff = normalize(&(out.ts.to_expr() - want.to_expr()))?;
                rep.push(Record::new(
                    "reduce.density",
                    format!("{MASS_LAW} density T^s"),
                    Verdict::from_bool(diff.is_zero()),
                    render(&[diff]),
                    "T^s = w^2/2",
                ));
                let quoted = normalize(&printed_reduced_flux(&tr)?)?;
                let diff = normalize(&(quoted.to_expr() - out.tr.to_expr()))?;
                rep.push(Record::new(
                    "reduce.flux",
                    format!("{MASS_LAW} flux T^r"),
                    if diff.is_zero() {
                        Verdict::Pass
                    } else {
                        Verdict::Flagged
                    },
                    format!("derived {} ; quoted {} ; quoted - derived {}", out.tr, quoted, diff),
                    "quoted reduced flux",
                ));
            }
            Err(e) => rep.push(Record::new(
                "reduce.density",
                MASS_LAW,
                Verdict::Fail,
                e.to_string(),
                "T^s = w^2/2",
            )),
        },
    }

    let anchor = "reduced equation for p(r)";
    rep.push(match reduced_ode(&equations, &tr) {
        Ok(ode) => {
            let printed_ok = ode.matches(&quoted_reduced_equation(&tr)?)?;
            let factored_ok = ode.matches(&factorized_reduced_equation(&tr)?)?;
            let diff = normalize(&(ode.residual.to_expr() - quoted_reduced_equation(&tr)?))?;
            Record::new(
                "reduce.ode",
                "u·G1 + v·G2 under w = sqrt(eps)",
                Verdict::from_bool(printed_ok && factored_ok),
                format!(
                    "{} ; factorized form {}",
                    render(&[diff]),
                    if factored_ok { "agrees" } else { "differs" }
                ),
                anchor,
            )
        }
        Err(e) => Record::new(
            "reduce.ode",
            "u·G1 + v·G2 under w = sqrt(eps)",
            Verdict::Fail,
            e.to_string(),
            anchor,
        ),
    });

    let tol = tol.unwrap_or(CLASSIFY_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in cases {
        for cand in case_solutions(k, &rctx)? {
            rep.push(candidate_record(
                "reduce.candidate",
                &cand,
                &equations,
                Some(&rctx),
                &mut rng,
                tol,
            ));
        }
    }
    Ok(rep)
}

/// Classifies the candidates listed in the problem file.
pub fn cmd_classify(
    problem: &Problem,
    printed: bool,
    label: Option<&str>,
    seed: u64,
    tol: Option<f64>,
) -> Result<VerificationReport, CliError> {
    let p = problem.variant(printed);
    let chosen: Vec<&SolutionCandidate> = match label {
        Some(l) => vec![p
            .candidate(l)
            .ok_or_else(|| CliError::Usage(format!("no candidate labelled `{l}`")))?],
        None => p.candidates.iter().collect(),
    };
    if chosen.is_empty() {
        return Err(CliError::Usage("the problem lists no candidates".into()));
    }
    let equations = p.equation_exprs();
    let tol = tol.unwrap_or(CLASSIFY_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerificationReport::new("classify");
    for cand in chosen {
        rep.push(candidate_record("classify", cand, &equations, None, &mut rng, tol));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    PlaneWave,
    Random,
    Gaussian,
    Case1Exact,
}

impl InitKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::PlaneWave => "plane-wave",
            Self::Random => "random",
            Self::Gaussian => "gaussian",
            Self::Case1Exact => "case1-exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateArgs {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Domain length; `8π` when absent.
    pub length: Option<f64>,
    pub init: InitKind,
    pub amplitude: f64,
    pub k: f64,
    pub sample_every: usize,
    pub csv_out: Option<PathBuf>,
}

impl Default for SimulateArgs {
    fn default() -> Self {
        Self {
            n: 256,
            dt: 1e-3,
            t_end: 1.0,
            length: None,
            init: InitKind::PlaneWave,
            amplitude: 0.5,
            k: 1.0,
            sample_every: 10,
            csv_out: None,
        }
    }
}

/// Candidate used by `--init case1-exact`.
pub const CASE1_EXACT: &str = "case1.p4";

fn require_periodic(k: f64, length: f64, what: &str) -> Result<(), CliError> {
    let periods = k * length / (2.0 * PI);
    if (periods - periods.round()).abs() > 1e-9 {
        return Err(CliError::Usage(format!(
            "{what} wavenumber {k} does not fit the periodic domain of length {length} (k·L/2π = {periods})"
        )));
    }
    Ok(())
}

/// Integrates the evolution form and monitors every conserved vector of the
/// problem.
pub fn cmd_simulate(
    problem: &Problem,
    printed: bool,
    args: &SimulateArgs,
    seed: u64,
    tol: Option<f64>,
) -> Result<(VerificationReport, QuantitySeries), CliError> {
    let p = problem.variant(printed);
    let length = args.length.unwrap_or(8.0 * PI);
    let grid = Grid::new(length, args.n).map_err(|e| CliError::Usage(e.to_string()))?;
    if !(args.dt > 0.0 && args.t_end > 0.0) {
        return Err(CliError::Usage("--dt and --T must be positive".into()));
    }
    let mut numeric = p.numeric_params();
    let mut exact: Option<(&SolutionCandidate, NumericParams)> = None;
    let init: FieldState = match args.init {
        InitKind::PlaneWave => {
            require_periodic(args.k, length, "plane-wave")?;
            plane_wave(&grid, &NlseParams::from_numeric(&numeric)?, args.amplitude, args.k, 0.0)
        }
        InitKind::Random => random_modes(&grid, seed, args.amplitude),
        InitKind::Gaussian => gaussian_packet(&grid, args.amplitude, length / 8.0, args.k, length / 2.0),
        InitKind::Case1Exact => {
            let cand = p
                .candidate(CASE1_EXACT)
                .ok_or_else(|| CliError::Usage(format!("the problem has no candidate `{CASE1_EXACT}`")))?;
            for (n, r) in &cand.constraints {
                numeric.insert(n.clone(), r.to_f64().unwrap_or(f64::NAN));
            }
            let get = |n: &str| numeric.get(n).copied().unwrap_or(f64::NAN);
            require_periodic(get("delta") * get("eps") / get("beta"), length, "candidate")?;
            let s = candidate_state(cand, &numeric, &grid, 0.0)?;
            exact = Some((cand, numeric.clone()));
            s
        }
    };
    let params = NlseParams::from_numeric(&numeric)?;
    let config = SimConfig {
        grid,
        params,
        t_end: args.t_end,
        dt: args.dt,
        sample_every: args.sample_every.max(1),
    };
    let names: Vec<&str> = p.conserved.iter().map(|c| c.name.as_str()).collect();
    let vectors: Vec<_> = p.conserved.iter().map(|c| c.value.vector.clone()).collect();
    let tol = tol.unwrap_or(SIMULATE_TOL);
    let mut rep = VerificationReport::new("simulate");
    let setup = format!(
        "{} N={} L={:.6} dt={} T={}",
        args.init.name(),
        args.n,
        length,
        args.dt,
        args.t_end
    );
    let (series, fin) = match run(&config, &init, &vectors) {
        Ok(out) => out,
        Err(e @ NumericsError::Blowup { .. }) => {
            rep.push(Record::new(
                "simulate.conservation",
                setup,
                Verdict::Fail,
                e.to_string(),
                "conserved densities",
            ));
            return Ok((rep, QuantitySeries::new(vectors.len())));
        }
        Err(e) => return Err(e.into()),
    };
    let drifts = series.drifts();
    let text: Vec<String> = names
        .iter()
        .zip(&drifts)
        .map(|(n, d)| format!("{n}={}", sci(*d)))
        .collect();
    rep.push(Record::new(
        "simulate.conservation",
        setup.clone(),
        Verdict::from_bool(drifts.iter().all(|d| *d < tol)),
        format!("drift {}", text.join(" ")),
        "conserved densities",
    ));
    if let Some((cand, numeric)) = exact {
        let want = candidate_state(cand, &numeric, &grid, fin.time)?;
        let err = fin.max_diff(&want);
        rep.push(Record::new(
            "simulate.final_state",
            format!("{} at t={}", cand.label, fin.time),
            Verdict::from_bool(err < tol),
            format!("max error {}", sci(err)),
            &cand.q_form,
        ));
    }
    if let Some(path) = &args.csv_out {
        let f = File::create(path).map_err(io_error(path))?;
        series.write_csv(BufWriter::new(f)).map_err(io_error(path))?;
    }
    Ok((rep, series))
}
