//! Committed solution-space dimensions, regenerated with
//! `cargo test -p jordan-gh --test golden -- --ignored` and reviewed by hand.

use std::path::PathBuf;

use jordan_gh::cli::{golden_key, read_golden, Golden};
use jordan_gh::oracle::{brute_force_null_space_dim, DENSE_MAX_COLS};
use jordan_gh::solver::{assemble, null_space};
use jordan_gh::{AlgebraSpec, Mode, ScalarDomain};

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/dims.json")
}

fn fields() -> Vec<ScalarDomain> {
    ["Q", "Fp:3", "Fp:5", "Fp:7", "Fp:101"].iter().map(|f| f.parse().unwrap()).collect()
}

fn algebras() -> Vec<AlgebraSpec> {
    let mut v: Vec<_> = (2..=5).map(AlgebraSpec::upper_triangular).collect();
    v.extend((2..=4).map(AlgebraSpec::full));
    v
}

/// By hand: a `{g,h}`-triple is `(d + (λ+μ)·1, d + λ·1, d + μ·1)` with `d` a
/// derivation and `λ, μ` central. Derivations of `T_n` and `M_n` are inner,
/// and both algebras have a one-dimensional center.
fn closed_form_gh(spec: AlgebraSpec) -> usize {
    let n = spec.n;
    let dim = match spec.kind {
        jordan_gh::algebra::AlgebraKind::UpperTriangular => n * (n + 1) / 2,
        jordan_gh::algebra::AlgebraKind::Full => n * n,
    };
    (dim - 1) + 2
}

#[test]
#[ignore = "rewrites tests/golden/dims.json"]
fn regenerate_golden() {
    let mut golden = Golden::new();
    for spec in algebras() {
        for field in fields() {
            let alg = spec.build(field).unwrap();
            for mode in Mode::ALL {
                let system = assemble(&alg, mode);
                let dim = null_space(&system).dim();
                if system.n_cols() <= DENSE_MAX_COLS {
                    assert_eq!(brute_force_null_space_dim(&system).unwrap(), dim);
                }
                golden.insert(golden_key(spec, field, mode), dim);
            }
        }
    }
    let text = serde_json::to_string_pretty(&golden).unwrap() + "\n";
    std::fs::create_dir_all(golden_path().parent().unwrap()).unwrap();
    std::fs::write(golden_path(), text).unwrap();
}

#[test]
fn golden_file_matches_closed_form() {
    let golden = read_golden(&golden_path()).unwrap();
    assert_eq!(golden.len(), algebras().len() * fields().len() * 3);
    for spec in algebras() {
        for field in fields() {
            let gh = golden[&golden_key(spec, field, Mode::Gh)];
            assert_eq!(gh, closed_form_gh(spec), "{spec} {field}");
            assert_eq!(golden[&golden_key(spec, field, Mode::JordanWithCorner)], gh);
            let jordan = golden[&golden_key(spec, field, Mode::Jordan)];
            match spec.kind {
                jordan_gh::algebra::AlgebraKind::Full => assert_eq!(jordan, gh),
                jordan_gh::algebra::AlgebraKind::UpperTriangular => assert!(jordan > gh),
            }
        }
    }
}

#[test]
fn solver_matches_golden_file() {
    let golden = read_golden(&golden_path()).unwrap();
    for spec in algebras() {
        for field in fields() {
            let alg = spec.build(field).unwrap();
            for mode in Mode::ALL {
                let dim = null_space(&assemble(&alg, mode)).dim();
                assert_eq!(dim, golden[&golden_key(spec, field, mode)], "{spec} {field} {mode}");
            }
        }
    }
}
