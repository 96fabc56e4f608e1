//! Lie-algebra-valued differential forms on the flat torus `Tⁿ = (ℝ/2πℤ)ⁿ`,
//! `n ≤ 4`.
//!
//! Forms are generic over their component functions. [`TrigPoly`] gives the
//! exact pipeline (finite Fourier series with rational coefficients, so `d`,
//! `∧` and `∫` are exact); [`GridFn`] gives a sampled pipeline with spectral
//! derivatives for fields that are not trigonometric polynomials.
//!
//! Integrals are reported as multiples of `(2π)ⁿ`, i.e. as torus means.

mod form;
mod grid;
mod io;
mod random;
mod trig;

use std::fmt;
use std::sync::OnceLock;

use crate::rational::Q;

pub use form::{beta_pair, covariant_d, exterior_d, integrate, lie_bracket_forms, wedge, LieForm, ScalarForm};
pub use grid::{Grid, GridFn};
pub use io::{ComponentJson, FieldFile, FormJson, ModeJson};
pub use random::{random_form, random_trigpoly, Support};
pub use trig::{Freq, TrigPoly};

/// Component function of a differential form.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    /// What two coefficients must share to be combined.
    type Domain: Clone + PartialEq + fmt::Debug;
    /// Result of a torus mean.
    type Value: Copy + PartialEq + fmt::Debug;
    /// Buffer for summing many terms before normalizing.
    type Acc;
    /// Operand of repeated products, converted once.
    type Prepared<'a>
    where
        Self: 'a;

    fn zero(domain: &Self::Domain) -> Self;
    fn torus_dim(domain: &Self::Domain) -> usize;
    fn is_zero(&self) -> bool;
    fn scale(&self, s: Q) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// `∂/∂x^axis`.
    fn partial(&self, axis: usize) -> Self;
    /// `(2π)⁻ⁿ ∫ f`.
    fn mean(&self) -> Self::Value;
    /// `(2π)⁻ⁿ ∫ f g`, without forming the full product.
    fn mean_of_product(&self, other: &Self) -> Self::Value;
    fn value_zero() -> Self::Value;
    fn value_add(a: Self::Value, b: Self::Value) -> Self::Value;
    fn value_scale(a: Self::Value, s: Q) -> Self::Value;
    fn value_to_f64(v: Self::Value) -> f64;

    fn acc_new(domain: &Self::Domain) -> Self::Acc;
    /// `acc += s · f`.
    fn acc_add(acc: &mut Self::Acc, f: &Self, s: Q);
    fn acc_finish(acc: Self::Acc, domain: &Self::Domain) -> Self;
    fn prepare(&self) -> Self::Prepared<'_>;
    /// `acc += s · f g`.
    fn acc_add_product(acc: &mut Self::Acc, f: &Self::Prepared<'_>, g: &Self::Prepared<'_>, s: Q);
}

/// Ordering of strictly increasing multi-indices, stored as bitmasks.
pub(crate) struct Layout {
    masks: Vec<Vec<u8>>,
    slot: [usize; 16],
}

impl Layout {
    fn build(n: usize) -> Layout {
        let mut masks = vec![Vec::new(); n + 1];
        let mut slot = [usize::MAX; 16];
        for (p, list) in masks.iter_mut().enumerate() {
            let mut combos: Vec<Vec<usize>> = Vec::new();
            combinations(n, p, 0, &mut Vec::new(), &mut combos);
            for c in combos {
                let m = c.iter().fold(0u8, |m, &i| m | (1 << i));
                slot[m as usize] = list.len();
                list.push(m);
            }
        }
        Layout { masks, slot }
    }

    #[inline]
    pub(crate) fn masks(&self, p: usize) -> &[u8] {
        &self.masks[p]
    }

    #[inline]
    pub(crate) fn slot(&self, mask: u8) -> usize {
        self.slot[mask as usize]
    }
}

fn combinations(n: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == p {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, p, i + 1, cur, out);
        cur.pop();
    }
}

pub(crate) fn layout(n: usize) -> &'static Layout {
    static LAYOUTS: OnceLock<Vec<Layout>> = OnceLock::new();
    &LAYOUTS.get_or_init(|| (0..=4).map(Layout::build).collect())[n]
}

pub(crate) fn mask_of(idx: &[usize]) -> u8 {
    idx.iter().fold(0u8, |m, &i| m | (1 << i))
}

pub(crate) fn indices_of(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `dx^I ∧ dx^J` relative to `dx^{I∪J}`, or `None` on overlap.
#[inline]
pub(crate) fn wedge_sign(i: u8, j: u8) -> Option<i8> {
    if i & j != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        inversions += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts() {
        for n in 0..=4 {
            for p in 0..=n {
                assert_eq!(layout(n).masks(p).len(), binomial(n, p));
            }
        }
        assert_eq!(layout(3).masks(2), &[0b011, 0b101, 0b110]);
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b001, 0b010), Some(1));
        assert_eq!(wedge_sign(0b010, 0b001), Some(-1));
        assert_eq!(wedge_sign(0b010, 0b101), Some(-1));
        assert_eq!(wedge_sign(0b011, 0b001), None);
    }
}
