//! Acceptance gate for the workspace. Each test is one criterion, checked
//! at its stated tolerance; the harness emits one pass/fail line per
//! criterion, and each test also prints `criterion N (<label>): pass` for
//! log scraping. Golden inputs live under `tests/golden/` and are rewritten
//! by the `#[ignore]`d `regenerate_golden_files` test.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sequens::harness::{
    random_bistochastic, random_channel, random_commuting_pair, random_effect,
    random_hermitian, random_nobservable, random_observable, random_sharp_observable,
    random_state,
};
use sequens::{
    bicondition, condition_operator_on_effect, run_all, ComplexMatrix, ComplexVector, Effect,
    FunctionTable, Grouping, NObservable, Observable, Outcome, PureState, RandomSpec,
    SelfAdjointOperator,
};
use sequens_cli::{parse_document, serialize_document, Document};

fn rng_for(case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    rng.set_stream(case);
    rng
}

fn frobenius_gap(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm()
}

fn max_effect_gap(a: &Observable, b: &Observable) -> f64 {
    a.effects()
        .zip(b.effects())
        .map(|(x, y)| frobenius_gap(x.matrix(), y.matrix()))
        .fold(0.0, f64::max)
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn read_golden(name: &str) -> String {
    let path = golden_path(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()))
}

#[test]
fn criterion_1_full_identity_registry() {
    let spec = RandomSpec::new(7, (2, 5), (2, 4), 200).unwrap();
    let started = Instant::now();
    let reports = run_all(&spec).unwrap();
    let elapsed = started.elapsed();

    assert!(!reports.is_empty());
    for report in &reports {
        assert!(
            report.passed && report.max_deviation < 1e-8,
            "{}: max_deviation {:.3e}",
            report.theorem_id,
            report.max_deviation
        );
    }
    assert!(elapsed.as_secs_f64() < 60.0, "registry took {elapsed:?}");
    println!(
        "criterion 1 (identity registry, {} checks, {:.2?}): pass",
        reports.len(),
        elapsed
    );
}

/// Standard and Hadamard bases with the atomic observables they carry.
fn qubit_instance(values: (f64, f64, f64, f64)) -> (Observable, Observable, [Effect; 2], f64) {
    let (x1, x2, y1, y2) = values;
    let basis = |angle: f64| {
        let (sin, cos) = f64::sin_cos(angle);
        (
            ComplexVector::from_real(&[cos, sin]),
            ComplexVector::from_real(&[-sin, cos]),
        )
    };
    let phi = basis(0.0);
    let psi = basis(std::f64::consts::FRAC_PI_4);
    let projector = |v: &ComplexVector| PureState::normalized(v.clone()).unwrap().projector();
    let atomic = |pair: &(ComplexVector, ComplexVector), prefix: &str, v1: f64, v2: f64| {
        Observable::new(vec![
            (Outcome::with_value(format!("{prefix}1"), v1), projector(&pair.0)),
            (Outcome::with_value(format!("{prefix}2"), v2), projector(&pair.1)),
        ])
        .unwrap()
    };
    let a = atomic(&phi, "x", x1, x2);
    let b = atomic(&psi, "y", y1, y2);
    let p = phi.0.inner(&psi.0).norm_sqr();
    (a, b, [projector(&phi.0), projector(&phi.1)], p)
}

#[test]
fn criterion_2_qubit_example_coefficients() {
    let mut rng = rng_for(12_000);
    for trial in 0..20 {
        let x1 = rng.gen_range(-3.0..3.0);
        let x2 = rng.gen_range(-3.0..3.0);
        let y1 = rng.gen_range(-3.0..3.0);
        let y2 = rng.gen_range(-3.0..3.0);
        let (a, b, [p1, p2], p) = qubit_instance((x1, x2, y1, y2));

        let b_hat = b.operator().unwrap();
        let conditioned_sum: ComplexMatrix = a
            .effects()
            .map(|a_x| condition_operator_on_effect(&b_hat, a_x).unwrap())
            .fold(ComplexMatrix::zeros(2), |acc, term| &acc + &term);
        let weighted_sum: ComplexMatrix = a
            .entries()
            .iter()
            .map(|(outcome, a_x)| {
                condition_operator_on_effect(&b_hat, a_x)
                    .unwrap()
                    .scale(outcome.value.expect("valued outcome"))
            })
            .fold(ComplexMatrix::zeros(2), |acc, term| &acc + &term);

        let conditioned_direct = b.conditioned_on(&a).unwrap().operator().unwrap();
        let pair_direct = a.seq_product(&b).unwrap().operator().unwrap();

        let c1 = y2 + (y1 - y2) * p;
        let c2 = y1 + (y2 - y1) * p;
        let substituted = &p1.matrix().scale(c1) + &p2.matrix().scale(c2);
        let substituted_pair = &p1.matrix().scale(x1 * c1) + &p2.matrix().scale(x2 * c2);

        for (label, lhs, rhs) in [
            ("conditioned: direct vs summed", &conditioned_direct, &conditioned_sum),
            ("conditioned: direct vs substituted", &conditioned_direct, &substituted),
            ("pair: direct vs summed", &pair_direct, &weighted_sum),
            ("pair: direct vs substituted", &pair_direct, &substituted_pair),
        ] {
            let gap = frobenius_gap(lhs, rhs);
            assert!(gap < 1e-12, "trial {trial}, {label}: gap {gap:.3e}");
        }
    }

    let (a, b, _, _) = qubit_instance((1.0, -1.0, 1.0, -1.0));
    let vanished = b.conditioned_on(&a).unwrap().operator().unwrap().frobenius_norm();
    assert!(vanished < 1e-12, "defaults should cancel, got {vanished:.3e}");
    println!("criterion 2 (dichotomic qubit example): pass");
}

#[test]
fn criterion_3_complement_closed_form() {
    let mut case = 13_000;
    for n in 2..=5 {
        for draw in 0..50 {
            let mut rng = rng_for(case);
            case += 1;
            let dim = 2 + (draw % 4);
            let a = random_nobservable(dim, n, &mut rng);
            for m in 1..=8 {
                let iterated = a.iterate_complement(m).unwrap();
                let closed = a.closed_form_complement(m).unwrap();
                let gap = max_effect_gap(iterated.as_observable(), closed.as_observable());
                assert!(gap < 1e-10, "n {n}, m {m}: gap {gap:.3e}");
            }
        }
    }

    for draw in 0..50 {
        let mut rng = rng_for(case);
        case += 1;
        let dim = 2 + (draw % 4);
        let a = random_nobservable(dim, 2, &mut rng);
        let twice = a.iterate_complement(2).unwrap();
        let thrice = a.iterate_complement(3).unwrap();
        let back = max_effect_gap(twice.as_observable(), a.as_observable());
        let swapped =
            max_effect_gap(thrice.as_observable(), a.complement().unwrap().as_observable());
        assert!(back <= 1e-14, "dichotomic A'' drifted by {back:.3e}");
        assert!(swapped <= 1e-14, "dichotomic A''' drifted by {swapped:.3e}");
    }
    println!("criterion 3 (complement closed form): pass");
}

#[test]
fn criterion_4_nonbistochastic_gap() {
    for channel_trial in 0..50u64 {
        let mut rng = rng_for(14_000 + channel_trial);
        let nu = random_channel(3, 3, &mut rng);
        assert!(!nu.is_bistochastic(), "trial {channel_trial}: uniform-random draw landed bistochastic");

        let largest_column_excess = (0..3)
            .map(|y| ((0..3).map(|x| nu.probs()[x][y]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(largest_column_excess > 1e-3, "trial {channel_trial}: nearly bistochastic draw");

        for dim in 2..=5 {
            let a = random_nobservable(dim, 3, &mut rng);
            let relabeled = NObservable::new(nu.post_process(a.as_observable()).unwrap()).unwrap();
            let complement_after = relabeled.complement().unwrap();
            let complement_before =
                nu.post_process(a.complement().unwrap().as_observable()).unwrap();

            for (y, (after, before)) in complement_after
                .as_observable()
                .effects()
                .zip(complement_before.effects())
                .enumerate()
            {
                let observed = frobenius_gap(after.matrix(), before.matrix());
                let column_sum: f64 = (0..3).map(|x| nu.probs()[x][y]).sum();
                let predicted = (column_sum - 1.0).abs() / 2.0;
                assert!(
                    observed >= predicted - 1e-10,
                    "trial {channel_trial}, dim {dim}, outcome {y}: observed {observed:.6e} < predicted {predicted:.6e}"
                );
            }
        }
    }
    println!("criterion 4 (non-bistochastic complement gap): pass");
}

#[test]
fn criterion_5_pinching_bidirectional() {
    let mut case = 15_000;
    for trial in 0..200 {
        let mut rng = rng_for(case);
        case += 1;
        let dim = 2 + (trial % 4);
        let (t, s) = random_commuting_pair(dim, &mut rng);
        let moved = frobenius_gap(t.condition_on(&s).unwrap().matrix(), t.matrix());
        assert!(moved < 1e-9, "commuting trial {trial}: moved {moved:.3e}");
    }

    for trial in 0..200 {
        let mut rng = rng_for(case);
        case += 1;
        let dim = 2 + (trial % 4);
        let t_matrix = random_hermitian(dim, &mut rng);
        let s_matrix = random_hermitian(dim, &mut rng);
        let commutator = (&(&t_matrix * &s_matrix) - &(&s_matrix * &t_matrix)).frobenius_norm();
        assert!(commutator > 1e-3, "generic trial {trial}: degenerate draw, [T,S] = {commutator:.3e}");

        let t = SelfAdjointOperator::new(t_matrix).unwrap();
        let s = SelfAdjointOperator::new(s_matrix).unwrap();
        let moved = frobenius_gap(t.condition_on(&s).unwrap().matrix(), t.matrix());
        assert!(moved > 1e-6, "generic trial {trial}: pinching moved only {moved:.3e}");
    }
    println!("criterion 5 (pinching commutation): pass");
}

fn golden_inputs() -> (Observable, Observable, Observable) {
    let parse = |name: &str| {
        parse_document(&read_golden(name))
            .unwrap_or_else(|e| panic!("{name}: {e}"))
            .into_observable()
            .unwrap_or_else(|e| panic!("{name}: {e}"))
    };
    (parse("bicondition_b.json"), parse("bicondition_a.json"), parse("bicondition_c.json"))
}

#[test]
fn criterion_6_bicondition_golden() {
    let (b, a, c) = golden_inputs();
    let left = bicondition(&b, &a, &c, Grouping::Left).unwrap();
    let right = bicondition(&b, &a, &c, Grouping::Right).unwrap();

    let gap = max_effect_gap(&left, &right);
    assert!(gap > 1e-3, "groupings agree to {gap:.3e}; golden instance must separate them");

    let left_text = serialize_document(&Document::Observable(left)) + "\n";
    let right_text = serialize_document(&Document::Observable(right)) + "\n";
    assert_eq!(left_text, read_golden("bicondition_left.json"), "left grouping drifted");
    assert_eq!(right_text, read_golden("bicondition_right.json"), "right grouping drifted");

    let cli_left = Command::new(env!("CARGO_BIN_EXE_sequens"))
        .args([
            "bicondition",
            golden_path("bicondition_b.json").to_str().unwrap(),
            golden_path("bicondition_a.json").to_str().unwrap(),
            golden_path("bicondition_c.json").to_str().unwrap(),
            "--grouping",
            "left",
        ])
        .output()
        .expect("binary runs");
    assert!(cli_left.status.success());
    assert_eq!(String::from_utf8(cli_left.stdout).unwrap(), left_text, "CLI output drifted");
    println!("criterion 6 (grouping golden file): pass");
}

#[test]
fn criterion_7_operator_vs_observable_conditioning() {
    for trial in 0..200 {
        let mut rng = rng_for(17_000 + trial as u64);
        let dim = 2 + (trial % 4);
        let t = SelfAdjointOperator::new(random_hermitian(dim, &mut rng)).unwrap();
        let s = SelfAdjointOperator::new(random_hermitian(dim, &mut rng)).unwrap();

        let direct = t.condition_on(&s).unwrap();
        let through_observables = t
            .spectral_observable()
            .unwrap()
            .into_observable()
            .conditioned_on(&s.spectral_observable().unwrap().into_observable())
            .unwrap()
            .operator()
            .unwrap();
        let gap = frobenius_gap(direct.matrix(), &through_observables);
        assert!(gap < 1e-8, "trial {trial}, dim {dim}: routes differ by {gap:.3e}");
    }
    println!("criterion 7 (conditioning route consistency): pass");
}

fn fuzz_document(index: usize, rng: &mut ChaCha8Rng) -> Document {
    let dim = 2 + (index % 4);
    let outcomes = 2 + (index % 3);
    match index % 6 {
        0 => Document::Matrix(random_hermitian(dim, rng)),
        1 => Document::Effect(random_effect(dim, rng)),
        2 => Document::State(random_state(dim, rng)),
        3 => Document::Observable(if index.is_multiple_of(2) {
            random_observable(dim, outcomes, rng)
        } else {
            random_sharp_observable(dim, outcomes, rng)
        }),
        4 => Document::Channel(if index.is_multiple_of(2) {
            random_channel(outcomes, outcomes, rng)
        } else {
            let labels: Vec<Outcome> = (1..=outcomes)
                .map(|i| Outcome::with_value(format!("y{i}"), i as f64))
                .collect();
            random_bistochastic(&labels, rng)
        }),
        _ => Document::FunctionTable(
            FunctionTable::new(
                (1..=outcomes)
                    .map(|i| (format!("x{i}"), rng.gen_range(-10.0..10.0)))
                    .collect(),
            )
            .unwrap(),
        ),
    }
}

fn matrices_bit_equal(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    a.dim() == b.dim()
        && (0..a.dim()).all(|i| {
            (0..a.dim()).all(|j| {
                let (x, y) = (a[(i, j)], b[(i, j)]);
                x.re == y.re && x.im == y.im
            })
        })
}

fn documents_numerically_equal(a: &Document, b: &Document) -> bool {
    match (a, b) {
        (Document::Matrix(x), Document::Matrix(y)) => matrices_bit_equal(x, y),
        (Document::Effect(x), Document::Effect(y)) => matrices_bit_equal(x.matrix(), y.matrix()),
        (Document::State(x), Document::State(y)) => matrices_bit_equal(x.matrix(), y.matrix()),
        (Document::Observable(x), Document::Observable(y)) => {
            x.entries().len() == y.entries().len()
                && x.entries().iter().zip(y.entries()).all(|((ox, ex), (oy, ey))| {
                    ox == oy && matrices_bit_equal(ex.matrix(), ey.matrix())
                })
        }
        (Document::Channel(x), Document::Channel(y)) => {
            x.row_labels() == y.row_labels() && x.cols() == y.cols() && x.probs() == y.probs()
        }
        (Document::FunctionTable(x), Document::FunctionTable(y)) => x.entries() == y.entries(),
        _ => false,
    }
}

#[test]
fn criterion_8_round_trip_fuzz() {
    let mut rng = rng_for(18_000);
    for index in 0..1000 {
        let doc = fuzz_document(index, &mut rng);
        let text = serialize_document(&doc);
        let reparsed = parse_document(&text)
            .unwrap_or_else(|e| panic!("doc {index} ({}) failed to reparse: {e}", doc.kind_name()));
        let retext = serialize_document(&reparsed);
        assert_eq!(retext, text, "doc {index} ({}) is not byte-stable", doc.kind_name());
        assert!(
            documents_numerically_equal(&doc, &reparsed),
            "doc {index} ({}) changed value through the round trip",
            doc.kind_name()
        );
    }

    let invalid = [
        (
            r#"{"kind": "observable", "dim": 2, "entries": [
                {"label": "x1", "matrix": [[[0.6, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.4, 0.0]]]},
                {"label": "x2", "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}]}"#,
            "NotResolution",
        ),
        (r#"{"kind": "effect", "dim": 1, "matrix": [[[1.5, 0.0]]]}"#, "NotEffect"),
        (r#"{"kind": "state", "dim": 1, "matrix": [[[0.8, 0.0]]]}"#, "NotState"),
        (
            r#"{"kind": "channel", "rows": ["a"], "cols": [{"label": "u"}, {"label": "v"}],
                "probs": [[0.5, 0.6]]}"#,
            "NotStochastic",
        ),
        (
            r#"{"kind": "channel", "rows": ["a"], "cols": [{"label": "u"}, {"label": "v"}],
                "probs": [[1.2, -0.2]]}"#,
            "ProbabilityRange",
        ),
        (r#"{"kind": "matrix", "dim": 2, "matrix": [[[1.0, 0.0]]]}"#, "ShapeMismatch"),
        (
            r#"{"kind": "effect", "dim": 2, "matrix": [[[0.5, 0.0], [0.4, 0.0]], [[0.1, 0.0], [0.5, 0.0]]]}"#,
            "NotHermitian",
        ),
        (
            r#"{"kind": "observable", "dim": 1, "entries": [
                {"label": "x1", "matrix": [[[0.5, 0.0]]]},
                {"label": "x1", "matrix": [[[0.5, 0.0]]]}]}"#,
            "DuplicateLabel",
        ),
    ];
    for (text, invariant) in invalid {
        let err = parse_document(text).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{invariant} should be a validation failure");
        assert!(
            err.to_string().starts_with(invariant),
            "expected {invariant}, got: {err}"
        );
    }
    println!("criterion 8 (document round-trip fuzz): pass");
}

/// Rewrites the golden bicondition instance. The inputs are drawn once from
/// a fixed stream, round-tripped through the serializer so the committed
/// files are in canonical form, and the outputs recomputed from the parsed
/// inputs — the exact pipeline the acceptance test and the CLI replay.
#[test]
#[ignore]
fn regenerate_golden_files() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    rng.set_stream(9999);

    let atomic = |prefix: &str, rng: &mut ChaCha8Rng| {
        let eig = sequens::hermitian_eig(&random_hermitian(2, rng)).unwrap();
        let entries = (0..2)
            .map(|k| {
                let projector =
                    PureState::normalized(eig.eigenvector(k)).unwrap().projector();
                (
                    Outcome::with_value(format!("{prefix}{}", k + 1), rng.gen_range(-2.0..2.0)),
                    projector,
                )
            })
            .collect();
        Observable::new(entries).unwrap()
    };
    let a = atomic("a", &mut rng);
    let c = atomic("c", &mut rng);
    let b = random_observable(2, 2, &mut rng);

    let canonical = |doc: Document| {
        parse_document(&serialize_document(&doc)).expect("generated documents reparse")
    };
    let b = canonical(Document::Observable(b)).into_observable().unwrap();
    let a = canonical(Document::Observable(a)).into_observable().unwrap();
    let c = canonical(Document::Observable(c)).into_observable().unwrap();

    let left = bicondition(&b, &a, &c, Grouping::Left).unwrap();
    let right = bicondition(&b, &a, &c, Grouping::Right).unwrap();
    assert!(max_effect_gap(&left, &right) > 1e-3, "instance no longer separates the groupings");

    std::fs::create_dir_all(golden_path("")).unwrap();
    let write = |name: &str, doc: Document| {
        std::fs::write(golden_path(name), serialize_document(&doc) + "\n").unwrap();
    };
    write("bicondition_b.json", Document::Observable(b));
    write("bicondition_a.json", Document::Observable(a));
    write("bicondition_c.json", Document::Observable(c));
    write("bicondition_left.json", Document::Observable(left));
    write("bicondition_right.json", Document::Observable(right));
}
