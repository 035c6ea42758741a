//! `sequens`: sequential products, conditioning, and complements of quantum
//! effects and observables, driven by JSON documents on files or stdin.
//!
//! Exit codes: 0 success, 1 validation error, 2 parse/usage error, 3 failed
//! identity check.

use std::f64::consts::FRAC_PI_4;
use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use sequens::{
    bicondition, install_tolerance, mixture, Complex64, ComplexVector, Effect, Grouping,
    NObservable, Observable, Outcome, PureState, RandomSpec, SelfAdjointOperator,
    TolerancePolicy,
};
use sequens_cli::{
    format_number, matrix_json, parse_document, serialize_document, DocError, Document,
};

#[derive(Parser)]
#[command(name = "sequens", version, about = "Effect and observable calculus on JSON documents")]
struct Cli {
    /// Absolute comparison tolerance; overrides the SEQUENS_TOL environment
    /// variable, which in turn overrides the built-in default.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and run its domain validation.
    Validate { file: String },
    /// Sequential product a ∘ b of two effects.
    Seqprod { a: String, b: String },
    /// Complement: I − a for an effect, (I − a_x)/(n−1) for an observable.
    Complement { input: String },
    /// Condition observable B on observable A.
    Condition { b: String, a: String },
    /// Post-measurement state after observing A without reading the outcome.
    ConditionState { rho: String, a: String },
    /// Probability of effect b given that effect a occurred in state rho.
    CondProb { rho: String, b: String, a: String },
    /// Convex mixture of observables sharing an outcome set.
    Mix {
        /// Comma-separated weights, one per observable, summing to 1.
        weights: String,
        files: Vec<String>,
    },
    /// Relabel observable A through classical channel nu.
    Postprocess { nu: String, a: String },
    /// Pinch Hermitian T by the eigenspaces of Hermitian S.
    Opcond { t: String, s: String },
    /// Spectral observable of a Hermitian matrix.
    Spectral { t: String },
    /// Observable operator Σ x·a_x.
    ObsOp { a: String },
    /// Observable-level function Σ f(x)·a_x from a function table.
    Fhat { a: String, table: String },
    /// m-fold complement of an observable.
    IterateComplement {
        a: String,
        m: u32,
        /// Evaluate the two-branch closed form instead of iterating.
        #[arg(long)]
        closed_form: bool,
    },
    /// Condition B on A and C with an explicit grouping.
    Bicondition {
        b: String,
        a: String,
        c: String,
        #[arg(long, value_enum)]
        grouping: GroupingArg,
    },
    /// Run registered identity checks over seeded random instances.
    Check {
        /// Single check to run; all registered checks when omitted.
        #[arg(long)]
        theorem: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Inclusive Hilbert-space dimension range, e.g. 2..5.
        #[arg(long)]
        dims: Option<String>,
        /// Inclusive outcome-count range, e.g. 2..4.
        #[arg(long)]
        outcomes: Option<String>,
    },
    /// Dichotomic qubit example: conditioned and product observable
    /// operators for atomic A, B built from two rotated bases.
    ExampleQubit {
        #[arg(long, default_value_t = 1.0)]
        x1: f64,
        #[arg(long, default_value_t = -1.0)]
        x2: f64,
        #[arg(long, default_value_t = 1.0)]
        y1: f64,
        #[arg(long, default_value_t = -1.0)]
        y2: f64,
        /// Rotation of the first basis in radians.
        #[arg(long, default_value_t = 0.0)]
        phi_angle: f64,
        /// Rotation of the second basis in radians.
        #[arg(long, default_value_t = FRAC_PI_4)]
        psi_angle: f64,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum GroupingArg {
    Left,
    Right,
}

fn main() {
    let cli = Cli::parse();
    if let Err(message) = configure_tolerance(cli.tol) {
        eprintln!("{message}");
        std::process::exit(2);
    }
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn configure_tolerance(flag: Option<f64>) -> Result<(), String> {
    let from_env = match std::env::var("SEQUENS_TOL") {
        Ok(text) => Some(
            text.parse::<f64>()
                .map_err(|_| format!("SEQUENS_TOL is not a number: {text:?}"))?,
        ),
        Err(_) => None,
    };
    let Some(atol) = flag.or(from_env) else {
        return Ok(());
    };
    let policy = TolerancePolicy::with_atol(atol).map_err(|e| e.to_string())?;
    install_tolerance(policy).map_err(|e| e.to_string())
}

fn read_input(path: &str) -> Result<String, DocError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| DocError::Io(format!("stdin: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| DocError::Io(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<Document, DocError> {
    parse_document(&read_input(path)?)
}

/// Writes one output line, exiting quietly if the consumer closed the pipe.
fn print_line(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(0);
    }
}

fn emit(doc: &Document) {
    print_line(&serialize_document(doc));
}

fn parse_range(text: &str, what: &str) -> Result<(usize, usize), DocError> {
    let parts: Vec<&str> = text.split("..").collect();
    let parsed = match parts.as_slice() {
        [lo, hi] => lo.parse::<usize>().ok().zip(hi.parse::<usize>().ok()),
        _ => None,
    };
    parsed.ok_or_else(|| {
        DocError::Parse(format!("{what} must look like LO..HI (inclusive), got {text:?}"))
    })
}

fn dispatch(command: Command) -> Result<i32, DocError> {
    match command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            print_line(&format!("valid: {}", doc.kind_name()));
            Ok(0)
        }
        Command::Seqprod { a, b } => {
            let a = load(&a)?.into_effect()?;
            let b = load(&b)?.into_effect()?;
            emit(&Document::Effect(a.seq_product(&b)?));
            Ok(0)
        }
        Command::Complement { input } => {
            match load(&input)? {
                Document::Effect(a) => emit(&Document::Effect(a.complement())),
                Document::Observable(a) => {
                    let complemented = NObservable::new(a)?.complement()?;
                    emit(&Document::Observable(complemented.into_observable()));
                }
                other => {
                    return Err(DocError::WrongKind {
                        expected: "effect or observable",
                        got: other.kind_name(),
                    })
                }
            }
            Ok(0)
        }
        Command::Condition { b, a } => {
            let b = load(&b)?.into_observable()?;
            let a = load(&a)?.into_observable()?;
            emit(&Document::Observable(b.conditioned_on(&a)?));
            Ok(0)
        }
        Command::ConditionState { rho, a } => {
            let rho = load(&rho)?.into_state()?;
            let a = load(&a)?.into_observable()?;
            emit(&Document::State(a.condition_state(&rho)?));
            Ok(0)
        }
        Command::CondProb { rho, b, a } => {
            let rho = load(&rho)?.into_state()?;
            let b = load(&b)?.into_effect()?;
            let a = load(&a)?.into_effect()?;
            print_line(&format_number(rho.conditional_probability(&b, &a)?));
            Ok(0)
        }
        Command::Mix { weights, files } => {
            let weights: Vec<f64> = weights
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse::<f64>()
                        .map_err(|_| DocError::Parse(format!("weight is not a number: {w:?}")))
                })
                .collect::<Result<_, _>>()?;
            let components: Vec<Observable> = files
                .iter()
                .map(|f| load(f)?.into_observable())
                .collect::<Result<_, _>>()?;
            emit(&Document::Observable(mixture(&weights, &components)?));
            Ok(0)
        }
        Command::Postprocess { nu, a } => {
            let nu = load(&nu)?.into_channel()?;
            let a = load(&a)?.into_observable()?;
            emit(&Document::Observable(nu.post_process(&a)?));
            Ok(0)
        }
        Command::Opcond { t, s } => {
            let t = SelfAdjointOperator::new(load(&t)?.into_matrix()?)?;
            let s = SelfAdjointOperator::new(load(&s)?.into_matrix()?)?;
            emit(&Document::Matrix(t.condition_on(&s)?.matrix().clone()));
            Ok(0)
        }
        Command::Spectral { t } => {
            let t = SelfAdjointOperator::new(load(&t)?.into_matrix()?)?;
            emit(&Document::Observable(t.spectral_observable()?.into_observable()));
            Ok(0)
        }
        Command::ObsOp { a } => {
            let a = load(&a)?.into_observable()?;
            emit(&Document::Matrix(a.operator()?));
            Ok(0)
        }
        Command::Fhat { a, table } => {
            let a = load(&a)?.into_observable()?;
            let table = load(&table)?.into_function_table()?;
            emit(&Document::Matrix(a.function_operator(&table)?));
            Ok(0)
        }
        Command::IterateComplement { a, m, closed_form } => {
            let a = NObservable::new(load(&a)?.into_observable()?)?;
            let result = if closed_form {
                a.closed_form_complement(m)?
            } else {
                a.iterate_complement(m)?
            };
            emit(&Document::Observable(result.into_observable()));
            Ok(0)
        }
        Command::Bicondition { b, a, c, grouping } => {
            let b = load(&b)?.into_observable()?;
            let a = load(&a)?.into_observable()?;
            let c = load(&c)?.into_observable()?;
            let grouping = match grouping {
                GroupingArg::Left => Grouping::Left,
                GroupingArg::Right => Grouping::Right,
            };
            emit(&Document::Observable(bicondition(&b, &a, &c, grouping)?));
            Ok(0)
        }
        Command::Check { theorem, seed, trials, dims, outcomes } => {
            let defaults = RandomSpec::default();
            let spec = RandomSpec::new(
                seed.unwrap_or(defaults.seed),
                match dims {
                    Some(text) => parse_range(&text, "--dims")?,
                    None => defaults.dims,
                },
                match outcomes {
                    Some(text) => parse_range(&text, "--outcomes")?,
                    None => defaults.outcomes,
                },
                trials.unwrap_or(defaults.trials),
            )?;
            let reports = match theorem {
                Some(id) => vec![sequens::run_check(&id, &spec)?],
                None => sequens::run_all(&spec)?,
            };
            let mut all_passed = true;
            for report in &reports {
                all_passed &= report.passed;
                print_line(&format!(
                    "{:<24} {}  max_deviation {:.3e}  tolerance {:.1e}  trials {}  worst_seed {}",
                    report.theorem_id,
                    if report.passed { "pass" } else { "FAIL" },
                    report.max_deviation,
                    report.tolerance,
                    report.trials,
                    report.worst_case_seed,
                ));
            }
            Ok(if all_passed { 0 } else { 3 })
        }
        Command::ExampleQubit { x1, x2, y1, y2, phi_angle, psi_angle } => {
            example_qubit(x1, x2, y1, y2, phi_angle, psi_angle)?;
            Ok(0)
        }
    }
}

fn rotated_basis(angle: f64) -> (ComplexVector, ComplexVector) {
    let (sin, cos) = angle.sin_cos();
    let real_pair = |a: f64, b: f64| {
        ComplexVector::new(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    };
    (real_pair(cos, sin), real_pair(-sin, cos))
}

fn dichotomic_atomic(
    basis: &(ComplexVector, ComplexVector),
    prefix: &str,
    values: (f64, f64),
) -> Result<Observable, DocError> {
    let projector = |v: &ComplexVector| -> Result<Effect, DocError> {
        Ok(PureState::normalized(v.clone())?.projector())
    };
    Ok(Observable::new(vec![
        (Outcome::with_value(format!("{prefix}1"), values.0), projector(&basis.0)?),
        (Outcome::with_value(format!("{prefix}2"), values.1), projector(&basis.1)?),
    ])?)
}

/// Prints the dichotomic qubit quantities: the transition probability
/// p = |⟨φ₁,ψ₁⟩|², the coefficients [y₂+(y₁−y₂)p, y₁+(y₂−y₁)p] of the
/// conditioned observable operator on P_{φ₁}, P_{φ₂}, their x-weighted
/// counterparts for the product observable, and both operators computed
/// through the observable calculus.
fn example_qubit(
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    phi_angle: f64,
    psi_angle: f64,
) -> Result<(), DocError> {
    let phi = rotated_basis(phi_angle);
    let psi = rotated_basis(psi_angle);
    let a = dichotomic_atomic(&phi, "x", (x1, x2))?;
    let b = dichotomic_atomic(&psi, "y", (y1, y2))?;

    let p = phi.0.inner(&psi.0).norm_sqr();
    let conditioned_coefficients = [y2 + (y1 - y2) * p, y1 + (y2 - y1) * p];
    let pair_coefficients = [x1 * conditioned_coefficients[0], x2 * conditioned_coefficients[1]];
    let conditioned_operator = b.conditioned_on(&a).and_then(|c| c.operator())?;
    let pair_operator = a.seq_product(&b)?.operator()?;

    let coefficient_list = |pair: &[f64; 2]| {
        format!("[{}, {}]", format_number(pair[0]), format_number(pair[1]))
    };
    print_line(&format!(
        "{{\n  \"transition_probability\": {},\n  \"conditioned_coefficients\": {},\n  \"pair_coefficients\": {},\n  \"conditioned_operator\": {},\n  \"pair_operator\": {}\n}}",
        format_number(p),
        coefficient_list(&conditioned_coefficients),
        coefficient_list(&pair_coefficients),
        matrix_json(&conditioned_operator, 2),
        matrix_json(&pair_operator, 2),
    ));
    Ok(())
}
