//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use symcartan::actions::torsion_residual;
use symcartan::actions::{
    cs_variation, default_couplings, levi_civita_connection, numeric_identity_on, perturbed_identity_coframe,
    random_connection, tmg_action, tmg_action_refined, topological_terms, topological_variation_check, IdentityId,
};
use symcartan::algebra::{build_algebra, invariant_form, invariant_form_space, AlgebraDescriptor, AlgebraName};
use symcartan::calculus::{random_form, FieldFile, LieForm, Support, TrigPoly};
use symcartan::cartan::{
    curvature, holonomy, maurer_cartan_model, CartanConnection, ChartParams, PathSpec, RollingModel,
};
use symcartan::report::Report;
use symcartan::suite::{run_suite, SuiteConfig};
use symcartan::Q;

type Outcome = Result<String, String>;

fn alg(name: &str) -> Arc<AlgebraDescriptor> {
    build_algebra(name).unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn config(json: &str) -> SuiteConfig {
    SuiteConfig::from_json(json).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_exact_zero(r: &Report) -> Result<(), String> {
    let bad = r.failing_digests();
    ensure(bad.is_empty(), || format!("{} failing, first {}", bad.len(), bad[0]))?;
    let nonzero = r
        .identities
        .iter()
        .map(|i| i.residual.to_string())
        .chain(r.checks.iter().map(|c| c.residual.to_string()))
        .filter(|s| s != "0")
        .count();
    ensure(nonzero == 0, || format!("{nonzero} nonzero residuals"))
}

fn within(t: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, || format!("{what} took {:.1} s, limit {limit} s", t.as_secs_f64()))
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let r =
        run_suite(&config(r#"{"suites": ["FORM_CALCULUS"], "seeds": "0..200"}"#), false).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    all_exact_zero(&r)?;
    for dim in [3, 4] {
        let tag = format!(":T{dim}:");
        for name in [
            "graded_commutativity",
            "graded_jacobi",
            "d_derivation",
            "covariant_derivation",
            "beta_invariance",
            "covariant_integration_by_parts",
            "d_squared",
        ] {
            let n = r.checks.iter().filter(|c| c.check == name && c.inputs_digest.contains(&tag)).count();
            ensure(n == 200, || format!("{name} on T{dim}: {n} seeds"))?;
        }
    }
    within(el, 60.0, "form calculus")?;
    Ok(format!("{} exact checks, 200 seeds on T3 (K=2) and T4 (K=1), {:.1} s", r.summary.total, el.as_secs_f64()))
}

fn ac2() -> Outcome {
    let r = run_suite(&config(r#"{"suites": ["HODGE_STAR"], "seeds": "0..100"}"#), false).map_err(|e| e.to_string())?;
    all_exact_zero(&r)?;
    for (name, check) in
        [("so4", "star_square"), ("so22", "star_square"), ("so31", "star_square"), ("so4", "selfdual_closure")]
    {
        let n = r.checks.iter().filter(|c| c.algebra == name && c.check == check).count();
        ensure(n == 101, || format!("{check} on {name}: {n} entries"))?;
    }
    let random = r.checks.iter().filter(|c| c.seed.is_some()).count();
    Ok(format!(
        "{} exact checks over 8 algebras, basis tuples plus 100 random pairs ({random} seeded)",
        r.summary.total
    ))
}

fn ac3() -> Outcome {
    let t = Instant::now();
    let mut dims = Vec::new();
    for (name, want) in [("so4", 2), ("so31", 2), ("so22", 2), ("iso3", 2), ("iso21", 2), ("so41", 1)] {
        let got = invariant_form_space(&alg(name)).len();
        ensure(got == want, || format!("{name}: nullspace dimension {got}, expected {want}"))?;
        dims.push(format!("{name}={got}"));
    }
    within(t.elapsed(), 5.0, "invariant forms")?;
    Ok(format!("{} in {:.3} s", dims.join(" "), t.elapsed().as_secs_f64()))
}

fn ac4() -> Outcome {
    let ids =
        [IdentityId::CsNull, IdentityId::CsPerp, IdentityId::EinsteinCs, IdentityId::TwoCsSum, IdentityId::TwoCsDiff];
    for name in AlgebraName::GRAVITY_3D {
        let a = alg(name.as_str());
        for id in ids {
            let cs = default_couplings(id, &a);
            ensure(cs.len() == 3, || format!("{id} on {name}: {} couplings", cs.len()))?;
            let degenerate = cs.iter().filter(|c| invariant_form(&a, c.c0, c.c1).unwrap().degenerate).count();
            ensure(degenerate >= 1, || format!("{id} on {name}: no degenerate β"))?;
        }
    }
    let t = Instant::now();
    let r = run_suite(&SuiteConfig::default(), false).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    all_exact_zero(&r)?;
    ensure(r.identities.len() == 5 * 20 * 3 * 3, || format!("{} identity entries", r.identities.len()))?;
    within(el, 120.0, "identity suite")?;
    Ok(format!(
        "{} residuals exactly zero, 5 identities × 20 seeds × 3 algebras × 3 couplings, {:.1} s",
        r.identities.len(),
        el.as_secs_f64()
    ))
}

fn ac5() -> Outcome {
    let r = run_suite(&config(r#"{"suites": ["QUARTIC_ZERO", "MM_EXPANSION"], "seeds": "0..20"}"#), false)
        .map_err(|e| e.to_string())?;
    all_exact_zero(&r)?;
    for name in ["so41", "so32"] {
        for id in ["QUARTIC_ZERO", "MM_EXPANSION"] {
            let n = r.identities.iter().filter(|i| i.algebra == name && i.identity_id.as_str() == id).count();
            ensure(n >= 20, || format!("{id} on {name}: {n} entries"))?;
        }
    }
    let mut worst: f64 = 0.0;
    for (i, name) in ["so41", "so32"].iter().enumerate() {
        let a = alg(name);
        for seed in 0..50 {
            let w = random_form(10_000 * (i as u64 + 1) + seed, 1, a.clone(), 4, 1, Support::H)
                .map_err(|e| e.to_string())?;
            let (rr, rsr) = topological_terms(&w).map_err(|e| e.to_string())?;
            ensure(rr.is_zero() && rsr.is_zero(), || {
                format!("{name} seed {seed}: ∫tr(R∧R) = {rr}, ∫tr(R∧⋆R) = {rsr}")
            })?;
        }
        for seed in 0..3 {
            let w = random_form(20_000 + seed, 1, a.clone(), 4, 1, Support::H).map_err(|e| e.to_string())?;
            let dw = random_form(30_000 + seed, 1, a.clone(), 4, 1, Support::H).map_err(|e| e.to_string())?;
            let (d1, d2) = topological_variation_check(&w, &dw, 1e-3, 10).map_err(|e| e.to_string())?;
            worst = worst.max(d1.abs()).max(d2.abs());
        }
    }
    ensure(worst < 1e-8, || format!("finite-difference variation {worst:.3e}"))?;
    Ok(format!("{} MM identities exact, 100 topological pairs zero, max FD variation {worst:.1e}", r.identities.len()))
}

/// `f(x⁰) dx⁰ ⊗ X` and `Σ c_μ dx^μ ⊗ Y`; both have `dA = 0` and `[A, A] = 0`.
fn flat_connections(a: &Arc<AlgebraDescriptor>) -> Vec<LieForm<TrigPoly>> {
    let mut f = LieForm::zero(a.clone(), 3, 1).unwrap();
    f.set(0, &[0], TrigPoly::cos_sin(3, &[1, 0, 0], Q::new(1, 2), Q::new(-1, 3))).unwrap();
    let mut g = LieForm::zero(a.clone(), 3, 1).unwrap();
    for mu in 0..3 {
        g.set(a.dim() - 1, &[mu], TrigPoly::constant(3, Q::new(mu as i128 + 1, 2))).unwrap();
    }
    vec![f, g]
}

fn ac6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for seed in 0..10u64 {
        let name = AlgebraName::GRAVITY_3D[seed as usize % 3];
        let a = alg(name.as_str());
        let beta = invariant_form(&a, Q::new(2, 1), Q::new(3, 1)).unwrap();
        let c = random_connection(&a, 100 + seed, 3, 1).map_err(|e| e.to_string())?;
        for dir in 0..10 {
            let d =
                random_form(1000 + 10 * seed + dir, 1, a.clone(), 3, 1, Support::Full).map_err(|e| e.to_string())?;
            let v = cs_variation(&c.form(), &d, &beta).map_err(|e| e.to_string())?;
            ensure(!v.exact.is_zero(), || format!("{name} seed {seed} dir {dir}: zero derivative"))?;
            worst = worst.max(v.relative_gap());
            n += 1;
        }
    }
    ensure(worst < 1e-6, || format!("relative gap {worst:.3e}"))?;
    let mut flats = 0;
    for name in AlgebraName::GRAVITY_3D {
        let a = alg(name.as_str());
        let beta = invariant_form(&a, Q::new(1, 2), Q::new(5, 3)).unwrap();
        for flat in flat_connections(&a) {
            let conn = CartanConnection::from_form(&flat).map_err(|e| e.to_string())?;
            ensure(curvature(&conn).unwrap().f.is_zero(), || format!("{name}: test connection not flat"))?;
            for dir in 0..10 {
                let d = random_form(dir, 1, a.clone(), 3, 2, Support::Full).unwrap();
                let v = cs_variation(&flat, &d, &beta).map_err(|e| e.to_string())?;
                ensure(v.exact.is_zero(), || format!("{name}: flat derivative {}", v.exact))?;
                flats += 1;
            }
        }
    }
    Ok(format!("{n} directions, max relative gap {worst:.1e}; {flats} flat directional derivatives exactly 0"))
}

fn ac7() -> Outcome {
    let mut worst_torsion: f64 = 0.0;
    let mut worst_id: f64 = 0.0;
    let mut orders = Vec::new();
    for (file, seed) in [("tmg_coframe_so31.json", 0), ("tmg_coframe_so22.json", 1)] {
        let f = FieldFile::load(data(file)).map_err(|e| e.to_string())?;
        let a = f.algebra_descriptor().map_err(|e| e.to_string())?;
        let e = f.form("e", &a).map_err(|e| e.to_string())?;
        ensure(e == perturbed_identity_coframe(a.clone(), seed).unwrap(), || format!("{file} is stale"))?;
        let w = levi_civita_connection(&e, 32).map_err(|e| e.to_string())?;
        worst_torsion = worst_torsion.max(torsion_residual(&e, &w, 64, 7).map_err(|e| e.to_string())?);
        for id in [IdentityId::CsTmg, IdentityId::TwoCsTmg] {
            for c in default_couplings(id, &a) {
                worst_id = worst_id.max(numeric_identity_on(id, &e, &c, 32).map_err(|e| e.to_string())?);
            }
        }
        let mu = Q::int(5);
        let reference = tmg_action(&e, mu, 64).map_err(|e| e.to_string())?.numeric_value;
        let errs: Vec<f64> =
            [4, 8, 16].iter().map(|&n| (tmg_action(&e, mu, n).unwrap().numeric_value - reference).abs()).collect();
        ensure(errs[1] <= errs[0] / 2.0 && errs[2] <= errs[1] / 2.0, || {
            format!("{file}: errors {errs:?} do not halve")
        })?;
        orders.push(format!("{:.1e}/{:.1e}/{:.1e}", errs[0], errs[1], errs[2]));
        let r = tmg_action_refined(&e, mu, 32).map_err(|e| e.to_string())?;
        ensure(r.relative_change < 1e-8, || format!("{file}: 32³ vs 64³ differ by {:.3e}", r.relative_change))?;
    }
    ensure(worst_torsion < 1e-7, || format!("torsion residual {worst_torsion:.3e}"))?;
    ensure(worst_id < 1e-8, || format!("TMG identity residual {worst_id:.3e}"))?;
    Ok(format!(
        "torsion {worst_torsion:.1e}, CS_TMG/TWO_CS_TMG {worst_id:.1e}, grid errors 4/8/16: {}",
        orders.join(", ")
    ))
}

fn ac8() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["so31", "iso21", "so22", "so41", "iso31", "so32"] {
        let r = maurer_cartan_model(alg(name), &ChartParams::default()).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_curvature);
    }
    ensure(worst < 1e-9, || format!("max ‖F‖ = {worst:.3e}"))?;
    // off-center so the midpoint error does not cancel by symmetry
    let sq = PathSpec::square([0.1, 0.1], 0.2);
    let angle = |steps| holonomy(&RollingModel::Sphere, &sq, steps).unwrap().rotation_angle().unwrap();
    let a = angle(10_000);
    ensure((a - 0.04).abs() < 1e-4, || format!("angle {a}"))?;
    let oracle = angle(200_000);
    let steps = [16usize, 32, 64, 128, 256];
    let errs: Vec<f64> = steps.iter().map(|&s| (angle(s) - oracle).abs()).collect();
    // least-squares slope of log error against log step count
    let xs: Vec<f64> = steps.iter().map(|&s| (s as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let order = -slope;
    ensure(order >= 2.0, || format!("convergence order {order:.3}, errors {errs:?}"))?;
    Ok(format!("max ‖F‖ {worst:.1e}; angle {a:.10} at 10⁴ steps; order {order:.4}"))
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_symcartan")).args(args).env_remove("SYMCARTAN_OUT_DIR").output().unwrap()
}

fn ac9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = data("default_verify.json");
    let mut bytes = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let o = run_cli(&["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        ensure(o.status.code() == Some(0), || format!("default verify exited {:?}", o.status.code()))?;
        bytes.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(bytes[0] == bytes[1], || "reports differ between runs".into())?;
    let golden = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/default_report.json")).unwrap();
    ensure(bytes[0] == golden, || "report differs from the golden file".into())?;
    let fault = data("fault_verify.json");
    let out = dir.path().join("fault.json");
    let o = run_cli(&["verify", "--config", fault.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    ensure(o.status.code() == Some(1), || format!("faulted run exited {:?}", o.status.code()))?;
    let err = String::from_utf8_lossy(&o.stderr);
    let failed = err.lines().filter(|l| l.starts_with("FAILED ")).count();
    let suites: std::collections::BTreeSet<&str> =
        err.lines().filter_map(|l| l.strip_prefix("FAILED ")).filter_map(|d| d.split(':').next()).collect();
    ensure(failed > 0, || "faulted run printed no failing digest".into())?;
    Ok(format!(
        "default run exit 0, byte-identical twice and to golden ({} bytes); fault exit 1 with {failed} failures in {}",
        golden.len(),
        suites.into_iter().collect::<Vec<_>>().join(", ")
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 9] = [
        ("AC1", "calculus identities", ac1),
        ("AC2", "internal Hodge star", ac2),
        ("AC3", "invariant forms", ac3),
        ("AC4", "3d action identities", ac4),
        ("AC5", "MacDowell–Mansouri", ac5),
        ("AC6", "variational gradients", ac6),
        ("AC7", "topologically massive gravity", ac7),
        ("AC8", "Maurer–Cartan and holonomy", ac8),
        ("AC9", "command line", ac9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with("AC")).collect();
    let mut failed = 0;
    for (id, what, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {id} {what}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {what}: {detail} [{secs:.1} s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
