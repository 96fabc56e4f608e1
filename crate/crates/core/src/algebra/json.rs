use serde::{Deserialize, Serialize};

use super::{AlgebraDescriptor, StarKind};
use crate::rational::Q;

/// Serializable snapshot of a descriptor, for golden files and interop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub matrix_dim: usize,
    pub spacetime_dim: usize,
    pub lambda_sign: i8,
    pub metric: Vec<i8>,
    pub labels: Vec<String>,
    pub h_indices: Vec<usize>,
    pub p_indices: Vec<usize>,
    pub basis: Vec<Vec<Vec<Q>>>,
    /// `[α, β, γ, C^γ_{αβ}]` for every nonzero constant.
    pub structure_constants: Vec<(usize, usize, usize, Q)>,
    pub star: String,
    pub star_square: i8,
}

impl AlgebraDescriptor {
    pub fn to_json(&self) -> AlgebraJson {
        let d = self.dim();
        let mut sc = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for &(g, c) in self.bracket_terms(a, b) {
                    sc.push((a, b, g, c));
                }
            }
        }
        let star = match self.star_kind() {
            StarKind::Full { .. } => "full",
            StarKind::Contraction { .. } => "contraction",
            StarKind::Stabilizer { .. } => "stabilizer",
        };
        AlgebraJson {
            name: self.name().to_string(),
            matrix_dim: self.matrix_dim(),
            spacetime_dim: self.spacetime_dim(),
            lambda_sign: self.lambda_sign(),
            metric: self.metric().to_vec(),
            labels: self.labels().to_vec(),
            h_indices: self.h_indices().to_vec(),
            p_indices: self.p_indices().to_vec(),
            basis: self.basis().iter().map(|m| m.to_rows()).collect(),
            structure_constants: sc,
            star: star.to_string(),
            star_square: self.star_kind().square(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("descriptor serializes")
    }
}
