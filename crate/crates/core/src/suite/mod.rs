//! Configurable verification runs: identity suites, calculus and star property
//! suites, and structural checks of the algebras.

mod checks;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use checks::{
    calculus_checks, calculus_cutoff, expected_star_square, star_checks_basis, star_checks_random, CALCULUS_CHECKS,
    STAR_CHECKS,
};

use crate::actions::{check_couplings, default_couplings, identity_residual, IdentityId, IdentityParams, Residual};
use crate::actions::{random_connection, Couplings};
use crate::algebra::{invariant_form_space, AlgebraDescriptor, AlgebraName};
use crate::cartan::{bianchi_residuals, maurer_cartan_model, ChartParams};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::report::{CheckResult, Report, ReportConfig};

/// One named suite of a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteId {
    Identity(IdentityId),
    FormCalculus,
    HodgeStar,
    AlgebraStructure,
    InvariantForms,
    Bianchi,
    MaurerCartan,
}

impl SuiteId {
    const PROPERTY: [SuiteId; 6] = [
        SuiteId::FormCalculus,
        SuiteId::HodgeStar,
        SuiteId::AlgebraStructure,
        SuiteId::InvariantForms,
        SuiteId::Bianchi,
        SuiteId::MaurerCartan,
    ];

    pub fn all() -> Vec<SuiteId> {
        IdentityId::ALL.iter().map(|&i| SuiteId::Identity(i)).chain(SuiteId::PROPERTY).collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Identity(i) => i.as_str(),
            SuiteId::FormCalculus => "FORM_CALCULUS",
            SuiteId::HodgeStar => "HODGE_STAR",
            SuiteId::AlgebraStructure => "ALGEBRA_STRUCTURE",
            SuiteId::InvariantForms => "INVARIANT_FORMS",
            SuiteId::Bianchi => "BIANCHI",
            SuiteId::MaurerCartan => "MAURER_CARTAN",
        }
    }

    /// Algebras used when the config does not list any.
    pub fn default_algebras(self) -> Vec<AlgebraName> {
        use AlgebraName::*;
        match self {
            SuiteId::Identity(IdentityId::QuarticZero | IdentityId::MmExpansion) => vec![So41, So32],
            SuiteId::Identity(IdentityId::CsTmg | IdentityId::TwoCsTmg) => vec![So31, So22],
            SuiteId::Identity(_) => AlgebraName::GRAVITY_3D.to_vec(),
            _ => AlgebraName::ALL.to_vec(),
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<SuiteId> {
        SuiteId::all().into_iter().find(|i| i.as_str().eq_ignore_ascii_case(s.trim())).ok_or_else(|| {
            let names: Vec<_> = SuiteId::all().iter().map(|i| i.as_str()).collect();
            Error::Parse(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Half-open seed range, written `"a..b"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn iter(self) -> std::ops::Range<u64> {
        self.start..self.end
    }

    pub fn len(self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(self) -> bool {
        self.end == self.start
    }
}

impl FromStr for SeedRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<SeedRange> {
        let bad = || Error::Parse(format!("invalid seed range {s:?}; expected \"a..b\" with a ≤ b"));
        let (a, b) = s.trim().split_once("..").ok_or_else(bad)?;
        let start: u64 = a.trim().parse().map_err(|_| bad())?;
        let end: u64 = b.trim().parse().map_err(|_| bad())?;
        if start > end {
            return Err(bad());
        }
        Ok(SeedRange { start, end })
    }
}

impl TryFrom<String> for SeedRange {
    type Error = Error;

    fn try_from(s: String) -> Result<SeedRange> {
        s.parse()
    }
}

impl From<SeedRange> for String {
    fn from(r: SeedRange) -> String {
        format!("{}..{}", r.start, r.end)
    }
}

/// A structure constant `C^γ_{αβ}` shifted by `delta`, to exercise the failure
/// paths of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    pub algebra: String,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub delta: Q,
}

fn default_seeds() -> SeedRange {
    SeedRange { start: 0, end: 20 }
}

fn default_grids() -> Vec<usize> {
    vec![32]
}

/// Verification run configuration, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    /// Overrides the per-suite default algebras.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebras: Option<Vec<String>>,
    #[serde(default = "default_seeds")]
    pub seeds: SeedRange,
    /// Overrides the per-identity default couplings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<Couplings>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u16>,
    /// Quadrature grids of the numeric identities.
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    /// Every exact 3d identity on so31, iso21 and so22, seeds `0..20`, with the
    /// default couplings.
    fn default() -> SuiteConfig {
        SuiteConfig {
            suites: [
                IdentityId::CsNull,
                IdentityId::CsPerp,
                IdentityId::EinsteinCs,
                IdentityId::TwoCsSum,
                IdentityId::TwoCsDiff,
            ]
            .iter()
            .map(|i| i.as_str().to_string())
            .collect(),
            algebras: None,
            seeds: default_seeds(),
            couplings: None,
            cutoff: None,
            grids: default_grids(),
            out: None,
            fault: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(s: &str) -> Result<SuiteConfig> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<SuiteConfig> {
        SuiteConfig::from_json(&std::fs::read_to_string(path)?)
    }

    /// Resolves names and checks every suite/algebra/couplings combination.
    pub fn plan(&self) -> Result<Plan> {
        let suites = self.suites.iter().map(|s| s.parse()).collect::<Result<Vec<SuiteId>>>()?;
        if self.cutoff == Some(0) {
            return Err(Error::Precondition("frequency cutoff must be at least 1".into()));
        }
        if self.grids.is_empty() || self.grids.iter().any(|&g| g < 2) {
            return Err(Error::Precondition("grids must be a nonempty list of sizes ≥ 2".into()));
        }
        let explicit = match &self.algebras {
            Some(list) => Some(list.iter().map(|a| a.parse()).collect::<Result<Vec<AlgebraName>>>()?),
            None => None,
        };
        let fault = match &self.fault {
            Some(f) => {
                let name: AlgebraName = f.algebra.parse()?;
                let dim = AlgebraDescriptor::new(name).dim();
                if f.alpha.max(f.beta).max(f.gamma) >= dim {
                    return Err(Error::Precondition(format!("fault index out of range for {name} (dim {dim})")));
                }
                Some((name, f))
            }
            None => None,
        };
        let build = |name: AlgebraName| -> Arc<AlgebraDescriptor> {
            let base = AlgebraDescriptor::new(name);
            Arc::new(match fault {
                Some((n, f)) if n == name => base.with_perturbed_constant(f.alpha, f.beta, f.gamma, f.delta),
                _ => base,
            })
        };
        let mut steps = Vec::new();
        for suite in suites {
            let names = explicit.clone().unwrap_or_else(|| suite.default_algebras());
            let algebras: Vec<_> = names.into_iter().map(build).collect();
            let mut couplings = Vec::new();
            if let SuiteId::Identity(id) = suite {
                for alg in &algebras {
                    let list = self.couplings.clone().unwrap_or_else(|| default_couplings(id, alg));
                    for c in &list {
                        check_couplings(id, alg, c)
                            .map_err(|e| Error::Precondition(format!("{id} on {}: {}", alg.name(), strip(&e))))?;
                    }
                    couplings.push(list);
                }
            }
            steps.push(PlanStep { suite, algebras, couplings });
        }
        Ok(Plan {
            steps,
            seeds: self.seeds,
            cutoff: self.cutoff,
            grids: self.grids.clone(),
            echo: ReportConfig {
                suites: self.suites.iter().map(|s| s.trim().to_ascii_uppercase()).collect(),
                algebras: self.algebras.clone(),
                seeds: self.seeds,
                couplings: self.couplings.clone(),
                cutoff: self.cutoff,
                grids: self.grids.clone(),
                fault: self.fault.clone(),
            },
        })
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Precondition(m) => m.clone(),
        other => other.to_string(),
    }
}

struct PlanStep {
    suite: SuiteId,
    algebras: Vec<Arc<AlgebraDescriptor>>,
    /// Per algebra, for identity suites.
    couplings: Vec<Vec<Couplings>>,
}

/// A validated run, ready to execute.
pub struct Plan {
    steps: Vec<PlanStep>,
    seeds: SeedRange,
    cutoff: Option<u16>,
    grids: Vec<usize>,
    echo: ReportConfig,
}

/// Expected dimension of the invariant symmetric form space.
pub fn expected_invariant_forms(name: AlgebraName) -> usize {
    match name {
        AlgebraName::So41 | AlgebraName::So32 => 1,
        _ => 2,
    }
}

struct Timer {
    on: bool,
    start: Instant,
}

impl Timer {
    fn start(on: bool) -> Timer {
        Timer { on, start: Instant::now() }
    }

    fn ms(&self) -> Option<f64> {
        self.on.then(|| self.start.elapsed().as_secs_f64() * 1e3)
    }
}

fn exact_check(
    suite: SuiteId,
    check: &str,
    alg: &AlgebraDescriptor,
    seed: Option<u64>,
    defect: Q,
    digest: String,
) -> CheckResult {
    CheckResult {
        suite: suite.as_str().to_string(),
        check: check.to_string(),
        algebra: alg.name().to_string(),
        seed,
        residual: Residual::Exact(defect),
        tolerance: None,
        passed: defect.is_zero(),
        inputs_digest: digest,
        wall_time_ms: None,
    }
}

impl Plan {
    /// Executes every step in config order; `timings` adds wall-clock fields,
    /// which makes the report nondeterministic.
    pub fn run(&self, timings: bool) -> Result<Report> {
        let total = Timer::start(timings);
        let mut report = Report::new(self.echo.clone());
        for step in &self.steps {
            match step.suite {
                SuiteId::Identity(id) => {
                    let grids: &[usize] = if id.is_exact() { &self.grids[..1] } else { &self.grids };
                    for (alg, list) in step.algebras.iter().zip(&step.couplings) {
                        for seed in self.seeds.iter() {
                            for c in list {
                                for &grid in grids {
                                    let t = Timer::start(timings);
                                    let params = IdentityParams { cutoff: self.cutoff, grid };
                                    let mut r = identity_residual(id, alg, seed, c, &params)?;
                                    r.wall_time_ms = t.ms();
                                    report.identities.push(r);
                                }
                            }
                        }
                    }
                }
                SuiteId::FormCalculus => {
                    for dim in [3, 4] {
                        let algs: Vec<_> = step.algebras.iter().filter(|a| a.spacetime_dim() == dim).collect();
                        if algs.is_empty() {
                            continue;
                        }
                        let cutoff = self.cutoff.unwrap_or(calculus_cutoff(dim));
                        for seed in self.seeds.iter() {
                            let alg = algs[(seed % algs.len() as u64) as usize];
                            let t = Timer::start(timings);
                            let checks = calculus_checks(alg, seed, cutoff)?;
                            let ms = t.ms().map(|m| m / checks.len() as f64);
                            for (name, d) in checks {
                                let digest =
                                    format!("FORM_CALCULUS:{name}:{}:seed={seed}:T{dim}:K={cutoff}", alg.name());
                                let mut c = exact_check(step.suite, name, alg, Some(seed), d, digest);
                                c.wall_time_ms = ms;
                                report.checks.push(c);
                            }
                        }
                    }
                }
                SuiteId::HodgeStar => {
                    for alg in &step.algebras {
                        let t = Timer::start(timings);
                        for (name, d) in star_checks_basis(alg)? {
                            let digest = format!("HODGE_STAR:{name}:{}:basis", alg.name());
                            let mut c = exact_check(step.suite, name, alg, None, d, digest);
                            c.wall_time_ms = t.ms();
                            report.checks.push(c);
                        }
                        for seed in self.seeds.iter() {
                            let t = Timer::start(timings);
                            for (name, d) in star_checks_random(alg, seed)? {
                                let digest = format!("HODGE_STAR:{name}:{}:seed={seed}", alg.name());
                                let mut c = exact_check(step.suite, name, alg, Some(seed), d, digest);
                                c.wall_time_ms = t.ms();
                                report.checks.push(c);
                            }
                        }
                    }
                }
                SuiteId::AlgebraStructure => {
                    for alg in &step.algebras {
                        let t = Timer::start(timings);
                        let chk = alg.structure_check();
                        let digest = format!("ALGEBRA_STRUCTURE:{}", alg.name());
                        let mut c = exact_check(
                            step.suite,
                            "structure_constants",
                            alg,
                            None,
                            Q::int(chk.total() as i128),
                            digest,
                        );
                        c.wall_time_ms = t.ms();
                        report.checks.push(c);
                    }
                }
                SuiteId::InvariantForms => {
                    for alg in &step.algebras {
                        let t = Timer::start(timings);
                        let got = invariant_form_space(alg).len();
                        let want = expected_invariant_forms(alg.name());
                        let digest = format!("INVARIANT_FORMS:{}:dim={got}:expected={want}", alg.name());
                        let d = Q::int(got as i128 - want as i128).abs();
                        let mut c = exact_check(step.suite, "nullspace_dimension", alg, None, d, digest);
                        c.wall_time_ms = t.ms();
                        report.checks.push(c);
                    }
                }
                SuiteId::Bianchi => {
                    for alg in &step.algebras {
                        let dim = alg.spacetime_dim();
                        let cutoff = self.cutoff.unwrap_or(calculus_cutoff(dim));
                        for seed in self.seeds.iter() {
                            let t = Timer::start(timings);
                            let conn = random_connection(alg, seed, dim, cutoff)?;
                            let (a, b, c) = bianchi_residuals(&conn)?;
                            let d = [a, b, c].iter().map(checks::form_defect).max().unwrap_or(Q::ZERO);
                            let digest = format!("BIANCHI:{}:seed={seed}:T{dim}:K={cutoff}", alg.name());
                            let mut c = exact_check(step.suite, "bianchi", alg, Some(seed), d, digest);
                            c.wall_time_ms = t.ms();
                            report.checks.push(c);
                        }
                    }
                }
                SuiteId::MaurerCartan => {
                    const TOL: f64 = 1e-9;
                    for alg in &step.algebras {
                        let t = Timer::start(timings);
                        let params = ChartParams::default();
                        let r = maurer_cartan_model(alg.clone(), &params)?;
                        report.checks.push(CheckResult {
                            suite: step.suite.as_str().to_string(),
                            check: "flatness".into(),
                            algebra: alg.name().to_string(),
                            seed: None,
                            residual: Residual::Numeric(r.max_curvature),
                            tolerance: Some(TOL),
                            passed: r.max_curvature < TOL,
                            inputs_digest: format!(
                                "MAURER_CARTAN:{}:half_width={}:samples={}:step={}",
                                alg.name(),
                                params.half_width,
                                params.samples,
                                params.step
                            ),
                            wall_time_ms: t.ms(),
                        });
                    }
                }
            }
        }
        if let Some(f) = &self.echo.fault {
            let tag = format!(":fault=C[{}]({},{})+{}", f.gamma, f.alpha, f.beta, f.delta);
            for r in report.identities.iter_mut().filter(|r| r.algebra == f.algebra) {
                r.inputs_digest += &tag;
            }
            for c in report.checks.iter_mut().filter(|c| c.algebra == f.algebra) {
                c.inputs_digest += &tag;
            }
        }
        report.finish(total.ms());
        Ok(report)
    }
}

/// Validates `config` and runs it.
pub fn run_suite(config: &SuiteConfig, timings: bool) -> Result<Report> {
    config.plan()?.run(timings)
}
