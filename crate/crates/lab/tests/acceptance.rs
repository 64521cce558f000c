//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use eulerfv_core::entropy::{phi_e, solve_xkl, ConvexFunction, GasParameters, PhiRho, Square};
use eulerfv_lab::selftest::{
    cons_noncons_identity, entropy_identity, stabilization_defaults, summation_by_parts, xkl_membership,
};
use eulerfv_lab::{refinement_study, simulate, Order, RunArtifacts, RunConfig, StudyTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;
const SOLVER_TOL: f64 = 1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn failed(e: impl std::fmt::Display) -> Outcome {
    outcome(false, format!("error: {e}"))
}

const BUMP_SINE_64: &str = "
cells = 64
initial = gaussian-bump
velocity = sine
gamma = 1.4
";

fn implicit_config(strategy: &str) -> RunConfig {
    RunConfig::parse(&format!(
        "{BUMP_SINE_64}scheme = implicit\nstrategy = {strategy}\ndt_rule = power\ndt_coef = 0.5\ndt_beta = 1\n\
         max_steps = 100\nlinear_tol = {SOLVER_TOL}\nseed = {SEED}\n"
    ))
    .expect("implicit acceptance config")
}

fn explicit_config() -> RunConfig {
    RunConfig::parse(&format!(
        "{BUMP_SINE_64}scheme = explicit\nstrategy = upwind\ndt_rule = cfl\ncfl_safety = 0.5\ncfl_margin = 0.1\n\
         max_steps = 200\nseed = {SEED}\n"
    ))
    .expect("explicit acceptance config")
}

fn ladder_config() -> RunConfig {
    RunConfig::parse(&format!(
        "initial = gaussian-bump\nvelocity = sine\ngamma = 1.4\nscheme = explicit\nstrategy = limited\n\
         dt_rule = power\ndt_coef = 1.0\ndt_beta = 1.5\nend_time = 0.25\nladder = 32, 64, 128, 256\nseed = {SEED}\n"
    ))
    .expect("ladder acceptance config")
}

/// Root of `φ(a) + φ'(a)(x - a) = φ(b) + φ'(b)(x - b)` by bisection on the
/// hull of `a` and `b`.
fn bisection_xkl(phi: &dyn ConvexFunction, a: f64, b: f64) -> f64 {
    let g = |x: f64| {
        phi.eval(a).unwrap() + phi.deriv(a).unwrap() * (x - a)
            - phi.eval(b).unwrap()
            - phi.deriv(b).unwrap() * (x - b)
    };
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    match entropy_identity(rng, 10_000) {
        Ok(c) => {
            let t = start.elapsed();
            outcome(
                c.passed && t < Duration::from_secs(1),
                format!("{} samples, worst relative residual {:.2e}, {:.0} ms", c.cases, c.worst, t.as_secs_f64() * 1e3),
            )
        }
        Err(e) => failed(e),
    }
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let membership = match xkl_membership(rng, 10_000) {
        Ok(c) => c,
        Err(e) => return failed(e),
    };
    let mut midpoint: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for _ in 0..10_000 {
        let a = 10f64.powf(rng.random_range(-3.0..3.0));
        let b = 10f64.powf(rng.random_range(-3.0..3.0));
        let scale = a.max(b);
        midpoint = midpoint.max((solve_xkl(&Square, a, b).unwrap() - 0.5 * (a + b)).abs() / scale);
        let g = GasParameters::new(rng.random_range(1.0001..=5.0)).unwrap();
        let pe = phi_e(g);
        let functions: [&dyn ConvexFunction; 3] = [&PhiRho, &pe, &Square];
        for phi in functions {
            let x = solve_xkl(phi, a, b).unwrap();
            oracle = oracle.max((x - bisection_xkl(phi, a, b)).abs() / scale);
        }
    }
    outcome(
        membership.passed && midpoint <= 1e-14 && oracle <= 1e-10,
        format!(
            "{} memberships, z² midpoint deviation {:.1e}, bisection deviation {:.1e} (relative)",
            membership.cases, midpoint, oracle
        ),
    )
}

fn criterion_3(run: &Result<RunArtifacts, String>) -> Outcome {
    let a = match run {
        Ok(a) => a,
        Err(e) => return failed(e),
    };
    let mut worst = f64::NEG_INFINITY;
    for d in &a.history.steps {
        for (k, r) in d.local_entropy_residual.iter().enumerate() {
            // residual ≤ 10 tol / |K|
            worst = worst.max(r * a.mesh.cell(k).measure / (10.0 * SOLVER_TOL));
        }
    }
    outcome(
        worst <= 1.0 && a.summary.steps == 100,
        format!(
            "{} steps, max residual·|K| / (10·tol) = {:.3e}, max residual {:.3e}",
            a.summary.steps, worst, a.summary.max_local_residual
        ),
    )
}

fn criterion_4(run: &Result<RunArtifacts, String>) -> Outcome {
    let a = match run {
        Ok(a) => a,
        Err(e) => return failed(e),
    };
    let bound = a.bounds.iter().find(|b| b.name == "impl_muscl");
    let increase = a.summary.max_entropy_increase;
    match bound {
        Some(b) => outcome(
            increase <= 1e-8 && b.satisfied,
            format!(
                "max global entropy increase {:.3e}, impl_muscl {:.3e} <= {:.3e}",
                increase, b.lhs, b.rhs
            ),
        ),
        None => outcome(false, "impl_muscl bound missing".into()),
    }
}

fn criterion_5(run: &Result<RunArtifacts, String>) -> Outcome {
    let a = match run {
        Ok(a) => a,
        Err(e) => return failed(e),
    };
    let min_of = |key: &str| {
        a.history
            .remainder_series(key)
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    let (m, e) = (min_of("sign_m"), min_of("sign_e"));
    outcome(
        m >= -1e-12 && e >= -1e-12 && a.summary.steps == 200,
        format!(
            "{} steps to t = {:.4}, min (R1+R2+R02) = {:.3e}, min (R1+R2+R) = {:.3e}",
            a.summary.steps, a.summary.final_time, m, e
        ),
    )
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    match cons_noncons_identity(rng, 100) {
        Ok(c) => outcome(c.passed, format!("{} configurations, worst relative gap {:.2e}", c.cases, c.worst)),
        Err(e) => failed(e),
    }
}

fn criterion_7(explicit: &Result<RunArtifacts, String>, implicit: &[&Result<RunArtifacts, String>]) -> Outcome {
    let ex = match explicit {
        Ok(a) => a.summary.mass_drift,
        Err(e) => return failed(e),
    };
    let mut im: f64 = 0.0;
    for r in implicit {
        match r {
            Ok(a) => im = im.max(a.summary.mass_drift),
            Err(e) => return failed(e),
        }
    }
    outcome(
        ex <= 1e-12 && im <= 1e-8,
        format!("explicit drift {ex:.2e} over 200 steps, implicit drift {im:.2e}"),
    )
}

fn criterion_8(study: &Result<(StudyTable, Duration), String>) -> Outcome {
    let (t, elapsed) = match study {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let order = |o: Order| match o {
        Order::Fitted(v) => v,
        Order::ExactZero => f64::NAN,
    };
    let (weak, l1) = (order(t.weak_order), order(t.l1_order));
    outcome(
        t.m_spread <= 2.0 && t.bv_spread <= 2.0 && l1 >= 0.4 && weak >= 0.7 && *elapsed < Duration::from_secs(120),
        format!(
            "orders weak {weak:.3} l1 {l1:.3}, spread M {:.3} BV {:.3}, {:.1} s",
            t.m_spread,
            t.bv_spread,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_9(runs: &[(&str, &Result<RunArtifacts, String>)], study: &Result<(StudyTable, Duration), String>) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, r) in runs {
        match r {
            Ok(a) => {
                for b in &a.bounds {
                    checked += 1;
                    if !b.satisfied {
                        failures.push(format!("{name}/{}", b.name));
                    }
                }
            }
            Err(e) => return failed(e),
        }
    }
    match study {
        Ok((t, _)) => {
            if !t.bounds_satisfied {
                failures.push("ladder".into());
            }
        }
        Err(e) => return failed(e),
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checked} bounds on the single runs and every ladder level satisfied")
        } else {
            format!("violated: {}", failures.join(", "))
        },
    )
}

fn criterion_10(rng: &mut ChaCha8Rng) -> Outcome {
    let defaults = stabilization_defaults();
    match summation_by_parts(rng, 100) {
        Ok(c) => outcome(
            c.passed && defaults.passed,
            format!(
                "{} fields, worst relative gap {:.2e}, default check {}",
                c.cases,
                c.worst,
                if defaults.passed { "ok" } else { "wrong" }
            ),
        ),
        Err(e) => failed(e),
    }
}

fn criterion_11(runs: &[(&str, &Result<RunArtifacts, String>)], study: &Result<(StudyTable, Duration), String>) -> Outcome {
    let mut min_rho = f64::INFINITY;
    let mut min_e = f64::INFINITY;
    for (name, r) in runs {
        match r {
            Ok(a) => {
                min_rho = min_rho.min(a.summary.min_rho);
                min_e = min_e.min(a.summary.min_e);
            }
            Err(e) => return failed(format!("{name}: {e}")),
        }
    }
    if let Err(e) = study {
        return failed(format!("ladder: {e}"));
    }
    outcome(
        min_rho > 0.0 && min_e > 0.0,
        format!("min rho {min_rho:.4}, min e {min_e:.4} over the single runs; ladder completed"),
    )
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let simulate_str = |c: RunConfig| simulate(&c).map_err(|e| e.to_string());

    let implicit_upwind = simulate_str(implicit_config("upwind"));
    let implicit_limited = simulate_str(implicit_config("limited"));
    let explicit_upwind = simulate_str(explicit_config());
    let start = Instant::now();
    let ladder = refinement_study(&ladder_config())
        .map(|(t, _)| (t, start.elapsed()))
        .map_err(|e| e.to_string());
    let runs = [
        ("implicit upwind", &implicit_upwind),
        ("implicit limited", &implicit_limited),
        ("explicit upwind", &explicit_upwind),
    ];

    let results = [
        ("entropy identity", criterion_1(&mut rng)),
        ("x_KL", criterion_2(&mut rng)),
        ("implicit upwind local entropy", criterion_3(&implicit_upwind)),
        ("implicit limited global entropy", criterion_4(&implicit_limited)),
        ("explicit upwind sign structure", criterion_5(&explicit_upwind)),
        ("conservative form identity", criterion_6(&mut rng)),
        ("mass conservation", criterion_7(&explicit_upwind, &[&implicit_upwind, &implicit_limited])),
        ("remainder decay", criterion_8(&ladder)),
        ("remainder bounds", criterion_9(&runs, &ladder)),
        ("stabilization identity", criterion_10(&mut rng)),
        ("positivity", criterion_11(&runs, &ladder)),
    ];

    if let Ok((t, _)) = &ladder {
        for r in &t.levels {
            println!(
                "  ladder {:>4} cells: steps {:>5}, M {:.4}, weak {:.3e}, l1 {:.3e}",
                r.cells, r.steps, r.m, r.weak_remainder, r.l1_remainder
            );
        }
    }
    let mut all = true;
    for (i, (name, o)) in results.iter().enumerate() {
        all &= o.passed;
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", i + 1, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
