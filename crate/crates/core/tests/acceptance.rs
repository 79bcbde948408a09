//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any failed. Built with `harness = false`.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use jordan_gh::cli::{golden_key, read_golden, verify_theorem1, verify_theorem2};
use jordan_gh::oracle::{
    brute_force_null_space_dim, brute_force_nullity_from_definitions, check_gh, check_jordan,
    check_swap_lemmas, is_gh_derivation, CheckScope, Outcome,
};
use jordan_gh::solver::{assemble, null_space, solve};
use jordan_gh::{build_mn, build_tn, compare, AlgebraSpec, DerivationTriple, Mode, Relation, ScalarDomain};

type Outcome_ = Result<String, String>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_jordan-gh")
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/dims.json")
}

fn field(s: &str) -> ScalarDomain {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// 1. `counterexample --field Q`: jordan passes, gh fails at (e11, e11) with defect -e12.
fn ac1_counterexample() -> Outcome_ {
    let start = Instant::now();
    let (code, stdout) = run_cli(&["counterexample", "--field", "Q"]);
    let elapsed = start.elapsed();
    ensure(code == 0, format!("exit code {code}"))?;
    let report: Value = serde_json::from_slice(&stdout).map_err(|e| e.to_string())?;
    ensure(report["jordan"]["passed"] == json!(true), "jordan checker did not pass")?;
    ensure(report["gh"]["passed"] == json!(false), "gh checker did not fail")?;
    let w = &report["gh"]["witness"];
    ensure(w["x"] == json!({"(1,1)": "1"}) && w["y"] == json!({"(1,1)": "1"}), format!("witness pair {w}"))?;
    ensure(w["defect"] == json!({"(1,2)": "-1"}), format!("defect {}", w["defect"]))?;
    within(elapsed, Duration::from_secs(1), "counterexample")?;
    Ok(format!("defect -e12 at (e11, e11) in {elapsed:?}"))
}

/// 2. T_n, n = 2..5, over Q and Z/7: corner space equals gh space.
fn ac2_theorem1() -> Outcome_ {
    let start = Instant::now();
    let mut dims = Vec::new();
    for f in ["Q", "Fp:7"] {
        for n in 2..=5 {
            let r = verify_theorem1(n, field(f)).map_err(|e| e.to_string())?;
            ensure(
                r.equal && r.relation == Relation::Equal && r.dim_jordan_corner == r.dim_gh,
                format!("T_{n} over {f}: corner {} vs gh {} ({})", r.dim_jordan_corner, r.dim_gh, r.relation),
            )?;
            dims.push(format!("T{n}/{f}={}", r.dim_gh));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60), "upper-triangular sweep")?;
    Ok(format!("{} in {elapsed:?}", dims.join(" ")))
}

/// 3. M_n, n = 2..3, over Q and Z/7: Jordan space equals gh space.
fn ac3_theorem2() -> Outcome_ {
    let start = Instant::now();
    let mut dims = Vec::new();
    for f in ["Q", "Fp:7"] {
        for n in 2..=3 {
            let r = verify_theorem2(n, field(f)).map_err(|e| e.to_string())?;
            ensure(
                r.equal && r.relation == Relation::Equal && r.dim_jordan == r.dim_gh,
                format!("M_{n} over {f}: jordan {} vs gh {}", r.dim_jordan, r.dim_gh),
            )?;
            dims.push(format!("M{n}/{f}={}", r.dim_gh));
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120), "full-matrix sweep")?;
    Ok(format!("{} in {elapsed:?}", dims.join(" ")))
}

/// 3 (optional part). M_4 over Q within 15 minutes.
fn ac3_theorem2_m4() -> Outcome_ {
    let start = Instant::now();
    let r = verify_theorem2(4, field("Q")).map_err(|e| e.to_string())?;
    ensure(r.equal, format!("M_4: jordan {} vs gh {}", r.dim_jordan, r.dim_gh))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(15 * 60), "M_4")?;
    Ok(format!("M4/Q={} in {elapsed:?}", r.dim_gh))
}

/// 4. On T_2 the Jordan space strictly contains the gh space, with a witness the gh checker rejects.
fn ac4_strictness() -> Outcome_ {
    let start = Instant::now();
    let t2 = build_tn(2, field("Q")).unwrap();
    let jordan = solve(&t2, Mode::Jordan);
    let gh = solve(&t2, Mode::Gh);
    ensure(jordan.dim() >= gh.dim() + 1, format!("dims {} vs {}", jordan.dim(), gh.dim()))?;
    let cmp = compare(&jordan, &gh).map_err(|e| e.to_string())?;
    ensure(cmp.relation == Relation::AStrictSuperset, format!("relation {}", cmp.relation))?;
    let w = cmp.witness_triple().ok_or("no witness")?;
    let report = is_gh_derivation(&w, 100, 0);
    ensure(report.outcome == Outcome::Failed, "gh checker accepted the witness")?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "strictness")?;
    Ok(format!("dim {} > {}, witness rejected, {elapsed:?}", jordan.dim(), gh.dim()))
}

/// 5. Dense oracle nullity equals solver nullity on T_2, T_3, M_2, all modes, Q and Z/7.
fn ac5_oracle_equivalence() -> Outcome_ {
    let mut checked = 0;
    for f in ["Q", "Fp:7"] {
        let algs = [
            build_tn(2, field(f)).unwrap(),
            build_tn(3, field(f)).unwrap(),
            build_mn(2, field(f)).unwrap(),
        ];
        for alg in &algs {
            for mode in Mode::ALL {
                let system = assemble(alg, mode);
                let solver_dim = null_space(&system).dim();
                let dense = brute_force_null_space_dim(&system).map_err(|e| e.to_string())?;
                let defs = brute_force_nullity_from_definitions(alg, mode).map_err(|e| e.to_string())?;
                ensure(
                    solver_dim == dense && dense == defs,
                    format!("{} {mode}: solver {solver_dim}, dense {dense}, definitions {defs}", alg.describe()),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (algebra, field, mode) instances agree"))
}

/// 6. Basis-pair verdict equals random-dense verdict for both checkers on 10³ triples.
fn ac6_bilinearity() -> Outcome_ {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut algs = Vec::new();
    for f in ["Q", "Fp:7"] {
        algs.push(build_tn(2, field(f)).unwrap());
        algs.push(build_tn(3, field(f)).unwrap());
        algs.push(build_mn(2, field(f)).unwrap());
    }
    let spaces: Vec<_> = algs
        .iter()
        .flat_map(|a| Mode::ALL.map(|m| (Arc::clone(a), solve(a, m))))
        .collect();
    let (mut passing, mut total) = (0, 0);
    for i in 0..1000u64 {
        let t = if i % 2 == 0 {
            let (alg, space) = &spaces[rng.gen_range(0..spaces.len())];
            let coeffs: Vec<_> = (0..space.dim()).map(|_| alg.domain().sample_small(&mut rng)).collect();
            DerivationTriple::unpack(&space.combine(&coeffs).unwrap(), alg).unwrap()
        } else {
            DerivationTriple::random(&algs[rng.gen_range(0..algs.len())], &mut rng)
        };
        let seed = rng.gen();
        for (name, check) in [
            ("gh", check_gh as fn(&DerivationTriple, CheckScope, u64, u64) -> _),
            ("jordan", check_jordan),
        ] {
            let basis = check(&t, CheckScope::BasisPairs, 0, seed).passed();
            let dense = check(&t, CheckScope::RandomPairs, 32, seed).passed();
            ensure(basis == dense, format!("triple {i}, {name}: basis {basis}, random {dense}"))?;
            passing += basis as usize;
            total += 1;
        }
    }
    Ok(format!("{total} verdicts agree ({passing} passing)"))
}

/// 7. Swap lemmas hold on every qualifying sample for every solution-space
/// basis triple on T_2, T_3, M_2; each run has a qualifying sample.
fn ac7_swap_lemmas() -> Outcome_ {
    let (mut runs, mut qualifying, mut skipped) = (0, 0, 0);
    for f in ["Q", "Fp:7"] {
        for alg in [
            build_tn(2, field(f)).unwrap(),
            build_tn(3, field(f)).unwrap(),
            build_mn(2, field(f)).unwrap(),
        ] {
            for mode in Mode::ALL {
                for (k, t) in solve(&alg, mode).basis_triples().iter().enumerate() {
                    let r = check_swap_lemmas(t, 1000, k as u64).map_err(|e| e.to_string())?;
                    ensure(
                        r.outcome == Outcome::Passed,
                        format!("{} {mode} basis {k}: {:?}", alg.describe(), r.outcome),
                    )?;
                    runs += 1;
                    qualifying += r.qualifying;
                    skipped += r.skipped;
                }
            }
        }
    }
    Ok(format!("{runs} runs, {qualifying} qualifying, {skipped} skipped, 0 failures"))
}

/// 8. dim(gh) <= dim(jordan-corner) <= dim(jordan) for every solved instance.
fn ac8_monotonicity() -> Outcome_ {
    let mut count = 0;
    let mut specs: Vec<_> = (2..=5).map(AlgebraSpec::upper_triangular).collect();
    specs.extend((2..=3).map(AlgebraSpec::full));
    for f in ["Q", "Fp:3", "Fp:5", "Fp:7", "Fp:101"] {
        for spec in &specs {
            let alg = spec.build(field(f)).unwrap();
            let [g, j, c] = Mode::ALL.map(|m| solve(&alg, m).dim());
            ensure(g <= c && c <= j, format!("{spec} {f}: {g} <= {c} <= {j} fails"))?;
            count += 1;
        }
    }
    Ok(format!("{count} instances"))
}

/// 9. Dimensions over Q equal those over Z/p, p in {3, 5, 7, 101}, and the golden file.
fn ac9_field_consistency() -> Outcome_ {
    let golden = read_golden(&golden_path()).map_err(|e| e.to_string())?;
    let mut specs: Vec<_> = (2..=4).map(AlgebraSpec::upper_triangular).collect();
    specs.extend((2..=3).map(AlgebraSpec::full));
    let mut count = 0;
    for spec in &specs {
        for mode in Mode::ALL {
            let over_q = solve(&spec.build(field("Q")).unwrap(), mode).dim();
            for f in ["Q", "Fp:3", "Fp:5", "Fp:7", "Fp:101"] {
                let d = solve(&spec.build(field(f)).unwrap(), mode).dim();
                ensure(d == over_q, format!("{spec} {mode}: Q {over_q} vs {f} {d}"))?;
                let key = golden_key(*spec, field(f), mode);
                let g = golden.get(&key).ok_or(format!("golden file lacks {key}"))?;
                ensure(*g == d, format!("{key}: golden {g}, computed {d}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} dimensions match across fields and golden file"))
}

/// 10. Identical flags give byte-identical JSON.
fn ac10_determinism() -> Outcome_ {
    let golden = golden_path();
    let golden = golden.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["solve", "--algebra", "tn:3", "--field", "Q", "--mode", "jordan"],
        vec!["solve", "--algebra", "mn:2", "--field", "Fp:7", "--mode", "gh"],
        vec!["verify-theorem1", "--n", "3", "--field", "Q", "--golden", golden],
        vec!["verify-theorem2", "--n", "2", "--field", "Fp:7"],
        vec!["counterexample", "--field", "Q"],
        vec!["oracle-check", "--algebra", "tn:2", "--field", "Q", "--trials", "1000", "--seed", "42"],
    ];
    for args in &commands {
        let (c1, a) = run_cli(args);
        let (c2, b) = run_cli(args);
        ensure(c1 == 0 && c2 == 0, format!("{args:?} exit {c1}/{c2}"))?;
        ensure(!a.is_empty() && a == b, format!("{args:?} output differs"))?;
    }
    Ok(format!("{} commands byte-identical across runs", commands.len()))
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Outcome_)> = vec![
        ("AC1", "counterexample reproduction", ac1_counterexample),
        ("AC2", "upper-triangular theorem, n = 2..5", ac2_theorem1),
        ("AC3", "full-matrix theorem, n = 2..3", ac3_theorem2),
        ("AC3+", "full-matrix theorem, n = 4 (optional)", ac3_theorem2_m4),
        ("AC4", "strictness on T_2", ac4_strictness),
        ("AC5", "oracle equivalence", ac5_oracle_equivalence),
        ("AC6", "checker bilinearity equivalence", ac6_bilinearity),
        ("AC7", "swap-lemma suite", ac7_swap_lemmas),
        ("AC8", "monotonicity chain", ac8_monotonicity),
        ("AC9", "field consistency and golden file", ac9_field_consistency),
        ("AC10", "determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {id:<5} {name}: {detail} [{:?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:<5} {name}: {why} [{:?}]", start.elapsed());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
