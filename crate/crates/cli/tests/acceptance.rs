//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runtime budgets are reported next to the measured time.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use exdisc_core::discrepancy::{
    closed_form_extreme_l2_sq, closed_form_l2_sq, closed_form_star, extreme_l2_sq_square_direct,
    l2_sq_direct, star_discrepancy_direct,
};
use exdisc_core::distribution::{
    dist_d, dist_dtilde, grid_profile_d, grid_profile_dtilde, sublevel_measure_d_direct,
    DtildeSublevelOracle,
};
use exdisc_core::norms::{
    lorentz_norm_pow, lp_norm_pow, min_lorentz_pow_d, min_psi_norm_d, min_psi_norm_dtilde,
    psi_norm,
};
use exdisc_core::rational::{pow_u, q, qi, to_f64};
use exdisc_core::verify::{campaign, check_theorem1, check_theorem2, CheckKind, Outcome};
use exdisc_core::{
    Bracket, DistributionProfile, GridClass, PiecewisePoly, PointSet, PsiSpec, Region, Q,
};

type Check = Result<String, String>;

/// Name, check and runtime budget (`Duration::MAX` when none is stated).
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random sets with `N = 1 + i mod n_max`, denominators cycling through a
/// few sizes including ones unrelated to `N`.
fn random_sets(count: usize, n_max: usize, salt: u64) -> Vec<PointSet> {
    (0..count)
        .map(|i| {
            let n = 1 + i % n_max;
            let den = [2 * n as u64, 64, 97, 1000][i % 4];
            PointSet::random(n, salt * 100_000 + i as u64, den)
        })
        .collect()
}

fn closed_forms() -> Check {
    for (i, p) in random_sets(200, 50, 1).iter().enumerate() {
        ensure(closed_form_star(p) == star_discrepancy_direct(p), || {
            format!("set {i}: star mismatch")
        })?;
        ensure(closed_form_l2_sq(p) == l2_sq_direct(p), || {
            format!("set {i}: L2 mismatch")
        })?;
    }
    Ok("200 sets, N ≤ 50, rational equality".into())
}

fn extreme_closed_forms() -> Check {
    for (i, p) in random_sets(100, 20, 2).iter().enumerate() {
        let tri = closed_form_extreme_l2_sq(p, Region::Triangle) * qi(2);
        ensure(tri == extreme_l2_sq_square_direct(p), || {
            format!("set {i}: triangle × 2 ≠ square integral")
        })?;
    }
    Ok("100 sets, N ≤ 20, rational equality".into())
}

fn ladder() -> Vec<Q> {
    (1..=20).map(|k| q(k, 16)).collect()
}

fn distribution_pipeline() -> Check {
    let mut evaluations = 0usize;
    for (i, p) in random_sets(200, 30, 3).iter().enumerate() {
        let fd = dist_d(p);
        let mut alphas: Vec<Q> = fd.breakpoints().into_iter().chain(ladder()).collect();
        alphas.retain(|a| *a > qi(0));
        for a in &alphas {
            ensure(fd.eval(a) == sublevel_measure_d_direct(p, a), || {
                format!("set {i}: D profile differs at α = {a}")
            })?;
        }
        let ft = dist_dtilde(p);
        let oracle = DtildeSublevelOracle::new(p, false);
        let mut alphas: Vec<Q> = ft.breakpoints().into_iter().chain(ladder()).collect();
        alphas.retain(|a| *a > qi(0));
        for a in &alphas {
            ensure(ft.eval(a) == oracle.measure(a), || {
                format!("set {i}: D̃ profile differs at α = {a}")
            })?;
        }
        evaluations += alphas.len();
    }
    Ok(format!("200 sets, N ≤ 30, {evaluations} D̃ evaluations"))
}

fn theorems() -> Check {
    let mut sets = random_sets(200, 30, 4);
    let random_count = sets.len();
    for n in 1..=25usize {
        sets.push(PointSet::centered_grid(n));
        for (j, k) in [(0, 1), (1, 5), (1, 2), (2, 3), (9, 10)] {
            sets.push(PointSet::translated_grid(n, &q(j, k * n as i64)).unwrap());
        }
    }
    let mut equalities = (0, 0);
    let mut mismatches = Vec::new();
    for p in &sets {
        let class = p.classify();
        for (report, expected) in [
            (check_theorem1(p), class == GridClass::CenteredGrid),
            (check_theorem2(p), class.is_translated_grid()),
        ] {
            let name = report.check.name();
            ensure(!report.outcome.is_violation(), || {
                format!("{name} violated for {}", p.to_json())
            })?;
            if report.is_equality() != expected {
                mismatches.push((name, report.is_equality(), class.clone(), p));
            }
            if report.is_equality() {
                match report.check {
                    CheckKind::Thm1 => equalities.0 += 1,
                    _ => equalities.1 += 1,
                }
            }
        }
    }
    if !mismatches.is_empty() {
        // {1/N, …, (N−1)/N, 1} never counts its last point, so its D̃ is
        // that of Γ_N^0 although classify() reports Other.
        let wrapped = mismatches
            .iter()
            .filter(|(name, eq, _, p)| *name == "thm2" && *eq && p.is_closed_translated_grid())
            .count();
        let (name, eq, class, p) = &mismatches[0];
        return Err(format!(
            "equality mismatches: {} ({wrapped} of them grids ending at 1, with the D̃ of Γ_N^0); \
             first: {name} equality {eq} but classify gives {class:?} for {}",
            mismatches.len(),
            p.to_json()
        ));
    }
    Ok(format!(
        "{random_count} random sets + 150 grids; {} / {} equality cases",
        equalities.0, equalities.1
    ))
}

fn exact_of(profile: &DistributionProfile, p: i64) -> Option<Q> {
    lp_norm_pow(profile, &qi(p)).ok()?.exact
}

fn lp_minima() -> Check {
    for p in 1..=4u32 {
        let want_d = Q::new(1.into(), (pow_u(&qi(2), p) * qi(p as i64 + 1)).to_integer());
        let want_t = q(2, (p as i64 + 1) * (p as i64 + 2));
        let got_d = exact_of(&grid_profile_d(), p as i64);
        let got_t = exact_of(&grid_profile_dtilde(), p as i64);
        ensure(got_d.as_ref() == Some(&want_d), || {
            format!("D, p = {p}: {got_d:?} vs {want_d}")
        })?;
        ensure(got_t.as_ref() == Some(&want_t), || {
            format!("D̃, p = {p}: {got_t:?} vs {want_t}")
        })?;
    }
    Ok("p = 1..4 exact for both profiles".into())
}

fn lorentz_minima() -> Check {
    let grid = grid_profile_d();
    let mut worst = 0f64;
    for p in 1..=3 {
        for qq in 1..=3 {
            let (pq, qq_) = (qi(p), qi(qq));
            let closed = min_lorentz_pow_d(&pq, &qq_).map_err(|e| e.to_string())?;
            let direct = lorentz_norm_pow(&grid, &pq, &qq_).map_err(|e| e.to_string())?;
            if let (Some(a), Some(b)) = (&closed.exact, &direct.exact) {
                ensure(a == b, || format!("(p, q) = ({p}, {qq}): {a} ≠ {b}"))?;
            }
            let diff = (closed.approx - direct.approx).abs();
            worst = worst.max(diff);
            ensure(diff <= 1e-8, || {
                format!("(p, q) = ({p}, {qq}): {} vs {}", closed.approx, direct.approx)
            })?;
        }
    }
    let mut profiles = vec![grid_profile_d(), grid_profile_dtilde()];
    for p in random_sets(12, 8, 6) {
        profiles.push(dist_d(&p));
        profiles.push(dist_dtilde(&p));
    }
    for (i, profile) in profiles.iter().enumerate() {
        for p in 1..=4 {
            let lorentz = lorentz_norm_pow(profile, &qi(p), &qi(p)).map_err(|e| e.to_string())?;
            let lp = exact_of(profile, p);
            ensure(lorentz.exact.is_some() && lorentz.exact == lp, || {
                format!("profile {i}, p = {p}: Lorentz(p, p) ≠ L_p")
            })?;
        }
    }
    Ok(format!("max |closed − direct| = {worst:.1e}; Lorentz(p, p) = L_p on {} profiles", profiles.len()))
}

fn mid(b: &Bracket) -> Q {
    (&b.lo + &b.hi) / qi(2)
}

fn psi_solver() -> Check {
    let tol = q(1, 1_000_000_000_000);
    let grid_d = grid_profile_d();
    let grid_t = grid_profile_dtilde();
    for p in 1..=3u32 {
        let b = psi_norm(&grid_d, &PsiSpec::power(p), &tol).map_err(|e| e.to_string())?;
        let want = (1.0 / (2f64.powi(p as i32) * (p as f64 + 1.0))).powf(1.0 / p as f64);
        let got = b.value().approx;
        ensure((got - want).abs() <= 1e-10, || format!("ψ_{p}: {got} vs {want}"))?;
    }
    let presets = ["power:2", "power:3", "taylor:3", "huber", "mixed"];
    for name in presets {
        let psi = PsiSpec::parse(name).map_err(|e| e.to_string())?;
        for (which, profile, min) in [
            ("D", &grid_d, min_psi_norm_d(&psi, &tol)),
            ("D̃", &grid_t, min_psi_norm_dtilde(&psi, &tol)),
        ] {
            let min = min.map_err(|e| e.to_string())?;
            let direct = psi_norm(profile, &psi, &tol).map_err(|e| e.to_string())?;
            let (a, b) = (mid(&min), mid(&direct));
            let gap = if a > b { a - b } else { b - a };
            ensure(gap <= &tol * qi(2), || {
                format!("{name} on {which}: minima differ by {}", to_f64(&gap))
            })?;
        }
    }
    Ok(format!("ψ_1..ψ_3 within 1e-10; presets {presets:?} within 2·tol"))
}

fn convolution_suites() -> Check {
    let checks = [CheckKind::Charest, CheckKind::Main, CheckKind::Riesz, CheckKind::Nconv];
    let summary = campaign(2024, 1000, 30, &checks);
    ensure(summary.errors.is_empty(), || format!("errors: {:?}", summary.errors))?;
    let mut parts = Vec::new();
    for c in checks {
        let t = &summary.tallies[&c];
        ensure(t.run == 1000 && t.violations == 0 && t.inconsistent == 0, || {
            format!("{}: {t:?}", c.name())
        })?;
        parts.push(format!("{} {} eq", c.name(), t.equality));
    }
    for r in &summary.failures {
        if let Outcome::StrictViolation { .. } = r.outcome {
            return Err(format!("violation in {}", r.check.name()));
        }
    }
    Ok(format!("1000 trials each; {}", parts.join(", ")))
}

fn bsplines() -> Check {
    for n in 1..=6usize {
        let m = PiecewisePoly::bspline(n);
        let half = q(n as i64, 2);
        ensure(m.total_integral() == qi(1), || format!("∫M_{n} ≠ 1"))?;
        ensure(m.reflect() == m, || format!("M_{n} not symmetric"))?;
        ensure(m.support() == Some((-half.clone(), half)), || {
            format!("M_{n} support {:?}", m.support())
        })?;
    }
    let at0 = |n| PiecewisePoly::bspline(n).evaluate(&qi(0));
    ensure(at0(2) == qi(1), || format!("M_2(0) = {}", at0(2)))?;
    ensure(at0(3) == q(3, 4), || format!("M_3(0) = {}", at0(3)))?;
    Ok("n ≤ 6; M_2(0) = 1, M_3(0) = 3/4".into())
}

fn determinism() -> Check {
    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_exdisc"))
            .args(["verify", "--check", "all", "--trials", "100", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || {
            format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
        })?;
        Ok(out.stdout)
    };
    let first = run()?;
    let second = run()?;
    ensure(first == second, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed forms vs direct", closed_forms, Duration::from_secs(10)),
        ("extreme closed forms", extreme_closed_forms, Duration::from_secs(30)),
        ("distribution pipeline", distribution_pipeline, Duration::from_secs(60)),
        ("grid dominance (thm1, thm2)", theorems, Duration::MAX),
        ("L_p minima", lp_minima, Duration::MAX),
        ("Lorentz minima", lorentz_minima, Duration::MAX),
        ("ψ-norm solver", psi_solver, Duration::MAX),
        ("convolution suites", convolution_suites, Duration::from_secs(120)),
        ("B-spline sanity", bsplines, Duration::MAX),
        ("determinism", determinism, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let timing = if budget == Duration::MAX {
            format!("{elapsed:.2?}")
        } else {
            let over = if elapsed > budget { ", over budget" } else { "" };
            format!("{elapsed:.2?} of {budget:?}{over}")
        };
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{timing}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{timing}]", i + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
