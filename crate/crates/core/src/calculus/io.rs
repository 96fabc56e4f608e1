use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Freq, LieForm, Support, TrigPoly};
use crate::algebra::{build_algebra, AlgebraDescriptor};
use crate::error::{Error, Result};
use crate::rational::{Cq, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeJson {
    pub k: Vec<i16>,
    pub re: Q,
    pub im: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub lie_index: usize,
    pub multi_index: Vec<usize>,
    pub coeffs: Vec<ModeJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub name: String,
    pub degree: usize,
    pub support: Support,
    pub components: Vec<ComponentJson>,
}

/// Named exact forms over one algebra and torus, as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    pub torus_dim: usize,
    pub algebra: String,
    pub forms: Vec<FormJson>,
}

impl FieldFile {
    pub fn new(algebra: &str, torus_dim: usize) -> FieldFile {
        FieldFile { torus_dim, algebra: algebra.to_string(), forms: Vec::new() }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<FieldFile> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("field file serializes")
    }

    pub fn algebra_descriptor(&self) -> Result<Arc<AlgebraDescriptor>> {
        build_algebra(&self.algebra)
    }

    pub fn push(&mut self, name: &str, form: &LieForm<TrigPoly>, support: Support) -> Result<()> {
        if form.torus_dim() != self.torus_dim {
            return Err(Error::DimensionMismatch(format!(
                "form on T^{} in a T^{} file",
                form.torus_dim(),
                self.torus_dim
            )));
        }
        if form.algebra().name().as_str() != self.algebra {
            return Err(Error::AlgebraMismatch(self.algebra.clone(), form.algebra().name().to_string()));
        }
        let mut components = Vec::new();
        let idx = form.multi_indices();
        let slots = form.slots();
        for (i, c) in form.components().iter().enumerate() {
            if c.terms().is_empty() {
                continue;
            }
            components.push(ComponentJson {
                lie_index: i / slots,
                multi_index: idx[i % slots].clone(),
                coeffs: c
                    .terms()
                    .iter()
                    .map(|(k, v)| ModeJson { k: k[..self.torus_dim].to_vec(), re: v.re, im: v.im })
                    .collect(),
            });
        }
        self.forms.retain(|f| f.name != name);
        self.forms.push(FormJson { name: name.to_string(), degree: form.degree(), support, components });
        Ok(())
    }

    pub fn has(&self, name: &str) -> bool {
        self.forms.iter().any(|f| f.name == name)
    }

    pub fn form(&self, name: &str, algebra: &Arc<AlgebraDescriptor>) -> Result<LieForm<TrigPoly>> {
        let fj = self
            .forms
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::Parse(format!("field file has no form named {name:?}")))?;
        let n = self.torus_dim;
        let mut form = LieForm::zero(algebra.clone(), n, fj.degree)?;
        for c in &fj.components {
            if !fj.support.allows(algebra, c.lie_index.min(algebra.dim().saturating_sub(1))) {
                return Err(Error::DimensionMismatch(format!(
                    "form {name:?} declared {}-valued has a component on basis index {}",
                    fj.support.as_str(),
                    c.lie_index
                )));
            }
            let mut terms = Vec::with_capacity(c.coeffs.len());
            for m in &c.coeffs {
                if m.k.len() != n {
                    return Err(Error::DimensionMismatch(format!("frequency {:?} on T^{n}", m.k)));
                }
                let mut k: Freq = [0; 4];
                k[..n].copy_from_slice(&m.k);
                terms.push((k, Cq::new(m.re, m.im)));
            }
            form.set(c.lie_index, &c.multi_index, TrigPoly::from_terms(n, terms)?)?;
        }
        Ok(form)
    }
}

impl std::str::FromStr for FieldFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<FieldFile> {
        let f: FieldFile = serde_json::from_str(s)?;
        if f.torus_dim == 0 || f.torus_dim > 4 {
            return Err(Error::Parse(format!("torus_dim {} outside 1..=4", f.torus_dim)));
        }
        f.algebra_descriptor()?;
        Ok(f)
    }
}
