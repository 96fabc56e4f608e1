//! The operations behind the `symcartan` binary and the C ABI: action
//! evaluation on stored fields and holonomy of the bundled rolling models.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actions::{
    cs_action_with, cs_omega_torsion_action, mm_action, palatini_action, tmg_action_refined, ActionValue, Couplings,
    TmgRefinement,
};
use crate::algebra::AlgebraDescriptor;
use crate::calculus::{FieldFile, LieForm, TrigPoly};
use crate::cartan::{holonomy, CartanConnection, PathSpec, RollingModel};
use crate::error::{Error, Result};
use crate::rational::Q;

/// Default quadrature grid of the numeric actions.
pub const DEFAULT_GRID: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionName {
    Cs,
    Palatini,
    CsOmegaTorsion,
    Tmg,
    Mm,
}

impl ActionName {
    pub const NAMES: [&'static str; 5] = ["cs", "palatini", "cs_omega_torsion", "tmg", "mm"];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionName::Cs => "cs",
            ActionName::Palatini => "palatini",
            ActionName::CsOmegaTorsion => "cs_omega_torsion",
            ActionName::Tmg => "tmg",
            ActionName::Mm => "mm",
        }
    }
}

impl fmt::Display for ActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<ActionName> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        let t = t.strip_suffix("_action").unwrap_or(&t);
        match t {
            "cs" | "chern_simons" => Ok(ActionName::Cs),
            "palatini" => Ok(ActionName::Palatini),
            "cs_omega_torsion" => Ok(ActionName::CsOmegaTorsion),
            "tmg" => Ok(ActionName::Tmg),
            "mm" | "macdowell_mansouri" => Ok(ActionName::Mm),
            _ => Err(Error::Parse(format!("unknown action {s:?}; expected one of {}", ActionName::NAMES.join(", ")))),
        }
    }
}

/// Coupling flags of an evaluation. Unset `c0`, `c1` default to `1`, `0`,
/// unless only `μ` (for `cs`) or only `γ` (for `mm`) is given, which select the
/// TMG and Immirzi forms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub c0: Option<Q>,
    pub c1: Option<Q>,
    pub mu: Option<Q>,
    pub gamma: Option<Q>,
    pub grid: Option<usize>,
}

impl EvalOptions {
    fn couplings(&self, action: ActionName) -> Result<Couplings> {
        let c = match (self.c0, self.c1, self.mu, self.gamma) {
            (None, None, Some(mu), None) if action == ActionName::Cs => Couplings::tmg(mu)?,
            (None, None, None, Some(g)) if action == ActionName::Mm => Couplings::immirzi(g)?,
            (c0, c1, mu, gamma) => Couplings { c0: c0.unwrap_or(Q::ONE), c1: c1.unwrap_or(Q::ZERO), mu, gamma },
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub action: ActionName,
    pub algebra: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Couplings>,
    pub value: ActionValue,
    /// The same quadrature at twice the grid, for numeric actions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement: Option<TmgRefinement>,
}

impl EvalOutput {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("eval output serializes")
    }
}

impl fmt::Display for EvalOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if let Some(r) = &self.refinement {
            write!(f, "\nrefined: {}\nrelative change: {:.3e}", r.fine, r.relative_change)?;
        }
        Ok(())
    }
}

fn pair(file: &FieldFile, alg: &Arc<AlgebraDescriptor>) -> Result<CartanConnection<TrigPoly>> {
    CartanConnection::new(file.form("omega", alg)?, file.form("e", alg)?)
}

/// Evaluates `action` on the forms of `file`.
///
/// `cs` reads the form `A`, or `omega` plus `e` when there is no `A`; `tmg`
/// reads the coframe `e`; the others read `omega` and `e`.
pub fn eval_fields(file: &FieldFile, action: ActionName, opts: &EvalOptions) -> Result<EvalOutput> {
    let alg = file.algebra_descriptor()?;
    let mut out = EvalOutput {
        action,
        algebra: file.algebra.clone(),
        couplings: None,
        value: ActionValue::exact(Q::ZERO, file.torus_dim),
        refinement: None,
    };
    match action {
        ActionName::Cs => {
            let c = opts.couplings(action)?;
            let a: LieForm<TrigPoly> = if file.has("A") { file.form("A", &alg)? } else { pair(file, &alg)?.form() };
            out.value = cs_action_with(&a, &c)?;
            out.couplings = Some(c);
        }
        ActionName::Palatini => {
            let conn = pair(file, &alg)?;
            out.value = palatini_action(conn.omega(), conn.coframe())?;
        }
        ActionName::CsOmegaTorsion => {
            let conn = pair(file, &alg)?;
            out.value = cs_omega_torsion_action(conn.omega(), conn.coframe())?;
        }
        ActionName::Tmg => {
            let mu = opts.mu.ok_or_else(|| Error::Precondition("tmg needs μ".into()))?;
            let e = file.form("e", &alg)?;
            let r = tmg_action_refined(&e, mu, opts.grid.unwrap_or(DEFAULT_GRID))?;
            out.couplings = Some(Couplings::tmg(mu)?);
            out.value = r.coarse.clone();
            out.refinement = Some(r);
        }
        ActionName::Mm => {
            let c = opts.couplings(action)?;
            out.value = mm_action(&pair(file, &alg)?, &c)?;
            out.couplings = Some(c);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyOutput {
    pub model: String,
    pub steps: usize,
    pub closed: bool,
    /// Row-major.
    pub matrix: Vec<Vec<f64>>,
    /// Distance of the transport matrix from the structure group.
    pub group_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_angle: Option<f64>,
}

impl HolonomyOutput {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("holonomy output serializes")
    }
}

impl fmt::Display for HolonomyOutput {
    /// Entries with 12 significant digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "model {}, {} steps, {} path",
            self.model,
            self.steps,
            if self.closed { "closed" } else { "open" }
        )?;
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>19.11e}")).collect();
            writeln!(f, "[{} ]", cells.join(""))?;
        }
        write!(f, "group defect: {:.3e}", self.group_defect)?;
        if let Some(a) = self.rotation_angle {
            write!(f, "\nrotation angle: {a:.11e}")?;
        }
        Ok(())
    }
}

/// Transport of a bundled rolling model around `path`.
pub fn holonomy_of(model: &str, path: &PathSpec, steps: usize) -> Result<HolonomyOutput> {
    let m: RollingModel = model.parse()?;
    let r = holonomy(&m, path, steps)?;
    Ok(HolonomyOutput {
        model: model.to_string(),
        steps: r.steps,
        closed: r.closed,
        matrix: r.matrix.row_iter().map(|row| row.iter().copied().collect()).collect(),
        group_defect: r.group_defect,
        rotation_angle: r.rotation_angle(),
    })
}
