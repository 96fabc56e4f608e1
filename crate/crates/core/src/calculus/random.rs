use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{binomial, LieForm, TrigPoly};
use crate::algebra::AlgebraDescriptor;
use crate::error::{Error, Result};
use crate::rational::Q;

/// Which algebra components a random form may populate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    H,
    P,
    Full,
}

impl Support {
    pub fn as_str(self) -> &'static str {
        match self {
            Support::H => "h",
            Support::P => "p",
            Support::Full => "full",
        }
    }

    pub fn allows(self, alg: &AlgebraDescriptor, alpha: usize) -> bool {
        match self {
            Support::H => alg.is_h_index(alpha),
            Support::P => !alg.is_h_index(alpha),
            Support::Full => true,
        }
    }
}

impl FromStr for Support {
    type Err = Error;

    fn from_str(s: &str) -> Result<Support> {
        match s {
            "h" => Ok(Support::H),
            "p" => Ok(Support::P),
            "full" => Ok(Support::Full),
            _ => Err(Error::Parse(format!("unknown support {s:?}; expected h, p or full"))),
        }
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3..=3);
    }
    Q::new(n, rng.gen_range(1..=3))
}

/// A frequency with `max |k_i| ≤ cutoff`. Four draws in five come from the
/// low-order set (entries in `{-1, 0, 1}` with at most two nonzero, or `±2e_i`
/// when the cutoff allows) so that products of random fields resonate and
/// multilinear integrals are rarely zero by accident.
fn random_freq(rng: &mut ChaCha8Rng, dim: usize, cutoff: u16) -> Vec<i16> {
    let c = cutoff as i16;
    if rng.gen_bool(0.2) {
        return (0..dim).map(|_| rng.gen_range(-c..=c)).collect();
    }
    let mut k = vec![0i16; dim];
    if c >= 2 && rng.gen_bool(0.2) {
        k[rng.gen_range(0..dim)] = if rng.gen_bool(0.5) { 2 } else { -2 };
        return k;
    }
    let i = rng.gen_range(0..dim);
    k[i] = if rng.gen_bool(0.5) { 1 } else { -1 };
    if dim > 1 && rng.gen_bool(0.5) {
        let j = (i + rng.gen_range(1..dim)) % dim;
        k[j] = if rng.gen_bool(0.5) { 1 } else { -1 };
    }
    k
}

/// Random real trigonometric polynomial: optional constant plus `modes`
/// random `a cos(k·x) + b sin(k·x)` terms with `max |k_i| ≤ cutoff`.
pub fn random_trigpoly(rng: &mut ChaCha8Rng, dim: usize, cutoff: u16, modes: usize) -> TrigPoly {
    use super::Coeff;
    let mut f = if rng.gen_bool(0.5) { TrigPoly::constant(dim, small_rational(rng)) } else { TrigPoly::zero(dim) };
    for _ in 0..modes {
        let k = random_freq(rng, dim, cutoff);
        let a = if rng.gen_bool(0.7) { small_rational(rng) } else { Q::ZERO };
        let b = if rng.gen_bool(0.7) { small_rational(rng) } else { Q::ZERO };
        f = f.add(&TrigPoly::cos_sin(dim, &k, a, b));
    }
    f
}

/// Deterministic random `degree`-form on `T^torus_dim`. About three quarters of the
/// allowed components are populated, each with one to three Fourier modes.
pub fn random_form(
    seed: u64,
    degree: usize,
    algebra: Arc<AlgebraDescriptor>,
    torus_dim: usize,
    cutoff: u16,
    support: Support,
) -> Result<LieForm<TrigPoly>> {
    if cutoff < 1 {
        return Err(Error::Precondition("frequency cutoff must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = binomial(torus_dim, degree);
    let mut comps = Vec::with_capacity(algebra.dim() * slots);
    for alpha in 0..algebra.dim() {
        for _ in 0..slots {
            let keep = support.allows(&algebra, alpha) && rng.gen_bool(0.75);
            comps.push(if keep {
                let modes = rng.gen_range(1..=3);
                random_trigpoly(&mut rng, torus_dim, cutoff, modes)
            } else {
                TrigPoly::zero(torus_dim)
            });
        }
    }
    LieForm::from_components(algebra, torus_dim, degree, comps)
}
