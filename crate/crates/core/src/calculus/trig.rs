use std::f64::consts::PI;
use std::fmt;

use super::grid::{Grid, GridFn};
use super::Coeff;
use crate::error::{Error, Result};
use crate::rational::{gcd, Cq, Q};

/// Integer frequency vector; unused trailing axes are zero.
pub type Freq = [i16; 4];

fn neg(k: Freq) -> Freq {
    [-k[0], -k[1], -k[2], -k[3]]
}

fn add(a: Freq, b: Freq) -> Freq {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Real-valued finite Fourier series `Σ c_k e^{i k·x}` on `Tⁿ` with exact
/// complex-rational coefficients. Terms are kept sorted, nonzero and
/// Hermitian (`c_{−k} = conj c_k`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TrigPoly {
    dim: u8,
    terms: Vec<(Freq, Cq)>,
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}e{:?}", &k[..self.dim as usize])?;
        }
        Ok(())
    }
}

/// Integer numerators over a common positive denominator. The exact kernels
/// below work on these and fall back to `Cq` arithmetic on overflow.
type IntTerm = (Freq, i128, i128);

fn lcm(a: i128, b: i128) -> Option<i128> {
    (a / gcd(a, b)).checked_mul(b)
}

/// `s · f` as `(den, numerators)`.
fn int_form(terms: &[(Freq, Cq)], s: Q) -> Option<(i128, Vec<IntTerm>)> {
    let mut den = 1;
    for (_, c) in terms {
        den = lcm(den, c.re.denom())?;
        den = lcm(den, c.im.denom())?;
    }
    let sn = s.numer();
    let num = |q: Q| -> Option<i128> { q.numer().checked_mul(den / q.denom())?.checked_mul(sn) };
    let mut out = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        out.push((*k, num(c.re)?, num(c.im)?));
    }
    Some((den.checked_mul(s.denom())?, out))
}

/// Sorts by frequency and sums duplicates; drops zeros.
fn merge_int(raw: &mut [IntTerm]) -> Option<Vec<IntTerm>> {
    raw.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<IntTerm> = Vec::with_capacity(raw.len());
    for &(k, re, im) in raw.iter() {
        match out.last_mut() {
            Some(last) if last.0 == k => {
                last.1 = last.1.checked_add(re)?;
                last.2 = last.2.checked_add(im)?;
            }
            _ => {
                if out.last().is_some_and(|l| l.1 == 0 && l.2 == 0) {
                    out.pop();
                }
                out.push((k, re, im));
            }
        }
    }
    if out.last().is_some_and(|l| l.1 == 0 && l.2 == 0) {
        out.pop();
    }
    Some(out)
}

fn from_int(den: i128, terms: Vec<IntTerm>) -> Vec<(Freq, Cq)> {
    terms.into_iter().map(|(k, re, im)| (k, Cq::new(Q::new(re, den), Q::new(im, den)))).collect()
}

fn mul_int(a: &[(Freq, Cq)], b: &[(Freq, Cq)]) -> Option<Vec<(Freq, Cq)>> {
    let (da, ia) = int_form(a, Q::ONE)?;
    let (db, ib) = int_form(b, Q::ONE)?;
    let den = da.checked_mul(db)?;
    let mut raw = Vec::with_capacity(ia.len() * ib.len());
    for (ka, ar, ai) in &ia {
        for (kb, br, bi) in &ib {
            let re = ar.checked_mul(*br)?.checked_sub(ai.checked_mul(*bi)?)?;
            let im = ar.checked_mul(*bi)?.checked_add(ai.checked_mul(*br)?)?;
            raw.push((add(*ka, *kb), re, im));
        }
    }
    Some(from_int(den, merge_int(&mut raw)?))
}

fn mul_exact(a: &[(Freq, Cq)], b: &[(Freq, Cq)]) -> Vec<(Freq, Cq)> {
    let mut raw = Vec::with_capacity(a.len() * b.len());
    for (ka, ca) in a {
        for (kb, cb) in b {
            raw.push((add(*ka, *kb), *ca * *cb));
        }
    }
    normalize(raw)
}

/// Accumulator of [`TrigPoly`] sums.
#[derive(Debug, Default)]
pub struct TrigAcc {
    den: i128,
    terms: Vec<IntTerm>,
    /// Terms that did not fit the integer path.
    spill: Vec<(Freq, Cq)>,
}

/// A [`TrigPoly`] with its integer form precomputed.
pub struct PreparedPoly<'a> {
    poly: &'a TrigPoly,
    int: Option<(i128, Vec<IntTerm>)>,
}

fn product_term(a: &IntTerm, b: &IntTerm, sn: i128) -> Option<IntTerm> {
    let re = a.1.checked_mul(b.1)?.checked_sub(a.2.checked_mul(b.2)?)?;
    let im = a.1.checked_mul(b.2)?.checked_add(a.2.checked_mul(b.1)?)?;
    Some((add(a.0, b.0), re.checked_mul(sn)?, im.checked_mul(sn)?))
}

impl TrigAcc {
    fn flush(&mut self) {
        let terms = std::mem::take(&mut self.terms);
        self.spill.extend(from_int(self.den.max(1), terms));
        self.den = 1;
    }

    /// Appends `items / den`; on overflow nothing is appended.
    fn try_extend(&mut self, den: i128, items: impl Iterator<Item = Option<IntTerm>>) -> Option<()> {
        if self.terms.is_empty() {
            self.den = den;
        }
        let l = lcm(self.den, den)?;
        let fa = l / self.den;
        if fa != 1 {
            let mut scaled = Vec::with_capacity(self.terms.len());
            for (k, re, im) in &self.terms {
                scaled.push((*k, re.checked_mul(fa)?, im.checked_mul(fa)?));
            }
            self.terms = scaled;
            self.den = l;
        }
        let fb = l / den;
        let start = self.terms.len();
        for item in items {
            let t = item.and_then(|(k, re, im)| Some((k, re.checked_mul(fb)?, im.checked_mul(fb)?)));
            match t {
                Some(t) => self.terms.push(t),
                None => {
                    self.terms.truncate(start);
                    return None;
                }
            }
        }
        if self.terms.len() > 4096 {
            match merge_int(&mut self.terms) {
                Some(m) => self.terms = m,
                None => self.flush(),
            }
        }
        Some(())
    }

    fn add(&mut self, f: &TrigPoly, s: Q) {
        if let Some((den, terms)) = int_form(&f.terms, s) {
            for _ in 0..2 {
                if self.try_extend(den, terms.iter().map(|t| Some(*t))).is_some() {
                    return;
                }
                self.flush();
            }
        }
        self.spill.extend(f.terms.iter().map(|(k, c)| (*k, c.scale(s))));
    }

    fn add_product(&mut self, f: &PreparedPoly<'_>, g: &PreparedPoly<'_>, s: Q) {
        if let (Some((da, ta)), Some((db, tb))) = (&f.int, &g.int) {
            if let Some(den) = da.checked_mul(*db).and_then(|d| d.checked_mul(s.denom())) {
                let sn = s.numer();
                for _ in 0..2 {
                    let items = ta.iter().flat_map(|a| tb.iter().map(move |b| product_term(a, b, sn)));
                    if self.try_extend(den, items).is_some() {
                        return;
                    }
                    self.flush();
                }
            }
        }
        let prod = mul_exact(&f.poly.terms, &g.poly.terms);
        self.spill.extend(prod.into_iter().map(|(k, c)| (k, c.scale(s))));
    }

    fn finish(mut self, dim: usize) -> TrigPoly {
        let den = self.den.max(1);
        let terms = match merge_int(&mut self.terms) {
            Some(t) if self.spill.is_empty() => from_int(den, t),
            merged => {
                let mut all = from_int(den, merged.unwrap_or(self.terms));
                all.append(&mut self.spill);
                normalize(all)
            }
        };
        TrigPoly { dim: dim as u8, terms }
    }
}

fn normalize(mut raw: Vec<(Freq, Cq)>) -> Vec<(Freq, Cq)> {
    raw.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Freq, Cq)> = Vec::with_capacity(raw.len());
    for (k, c) in raw {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc += c,
            _ => {
                if let Some((_, lc)) = out.last() {
                    if lc.is_zero() {
                        out.pop();
                    }
                }
                out.push((k, c));
            }
        }
    }
    if let Some((_, lc)) = out.last() {
        if lc.is_zero() {
            out.pop();
        }
    }
    out
}

impl TrigPoly {
    pub fn zero(dim: usize) -> TrigPoly {
        assert!(dim <= 4, "torus dimension at most 4");
        TrigPoly { dim: dim as u8, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Q) -> TrigPoly {
        let mut t = TrigPoly::zero(dim);
        if !c.is_zero() {
            t.terms.push(([0; 4], Cq::real(c)));
        }
        t
    }

    /// `a·cos(k·x) + b·sin(k·x)`.
    pub fn cos_sin(dim: usize, k: &[i16], a: Q, b: Q) -> TrigPoly {
        let mut f = [0i16; 4];
        f[..k.len()].copy_from_slice(k);
        if f == [0; 4] {
            return TrigPoly::constant(dim, a);
        }
        let half = Q::new(1, 2);
        // cos = (e + ē)/2, sin = (e − ē)/2i
        let c = Cq::new(a * half, -(b * half));
        TrigPoly { dim: dim as u8, terms: normalize(vec![(f, c), (neg(f), c.conj())]) }
    }

    /// Builds from arbitrary terms; fails unless the result is Hermitian.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Freq, Cq)>) -> Result<TrigPoly> {
        let t = TrigPoly { dim: dim as u8, terms: normalize(terms.into_iter().collect()) };
        if t.terms.iter().any(|(k, _)| k[dim..].iter().any(|&x| x != 0)) {
            return Err(Error::DimensionMismatch(format!("frequency outside T^{dim}")));
        }
        if !t.is_hermitian() {
            return Err(Error::Parse("coefficients are not Hermitian-symmetric (function must be real)".into()));
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn terms(&self) -> &[(Freq, Cq)] {
        &self.terms
    }

    pub fn coeff(&self, k: &Freq) -> Cq {
        match self.terms.binary_search_by(|t| t.0.cmp(k)) {
            Ok(i) => self.terms[i].1,
            Err(_) => Cq::ZERO,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(k, c)| self.coeff(&neg(*k)) == c.conj())
    }

    /// Largest `|k_i|` over all terms.
    pub fn max_freq(&self) -> i16 {
        self.terms.iter().flat_map(|(k, _)| k.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, c) in &self.terms {
            let phase: f64 = (0..self.dim as usize).map(|i| k[i] as f64 * x[i]).sum();
            acc += c.re.to_f64() * phase.cos() - c.im.to_f64() * phase.sin();
        }
        acc
    }

    /// Samples on the uniform grid `x_j = 2πj/n` per axis.
    pub fn sample(&self, grid: Grid) -> GridFn {
        assert_eq!(grid.dim, self.dim as usize, "grid dimension");
        let n = grid.n;
        let kmax = self.max_freq() as usize;
        // e^{i k x_j} tables per |k|.
        let table: Vec<Vec<(f64, f64)>> = (0..=kmax)
            .map(|k| (0..n).map(|j| (2.0 * PI * (k * j) as f64 / n as f64).sin_cos()).map(|(s, c)| (c, s)).collect())
            .collect();
        let mut values = vec![0.0; grid.len()];
        let coeffs: Vec<(Freq, f64, f64)> =
            self.terms.iter().map(|(k, c)| (*k, c.re.to_f64(), c.im.to_f64())).collect();
        for (idx, v) in values.iter_mut().enumerate() {
            let pt = grid.point(idx);
            let mut acc = 0.0;
            for (k, re, im) in &coeffs {
                let (mut cr, mut ci) = (1.0, 0.0);
                for a in 0..grid.dim {
                    let kk = k[a];
                    if kk == 0 {
                        continue;
                    }
                    let (c, s) = table[kk.unsigned_abs() as usize][pt[a]];
                    let s = if kk < 0 { -s } else { s };
                    (cr, ci) = (cr * c - ci * s, cr * s + ci * c);
                }
                acc += re * cr - im * ci;
            }
            *v = acc;
        }
        GridFn::from_values(grid, values)
    }

    fn dim_check(&self, other: &TrigPoly) {
        assert_eq!(self.dim, other.dim, "mixing torus dimensions");
    }
}

impl Coeff for TrigPoly {
    type Domain = usize;
    type Value = Q;
    type Acc = TrigAcc;
    type Prepared<'a> = PreparedPoly<'a>;

    fn zero(domain: &usize) -> TrigPoly {
        TrigPoly::zero(*domain)
    }

    fn torus_dim(domain: &usize) -> usize {
        *domain
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn scale(&self, s: Q) -> TrigPoly {
        if s.is_zero() {
            return TrigPoly::zero(self.dim as usize);
        }
        TrigPoly { dim: self.dim, terms: self.terms.iter().map(|(k, c)| (*k, c.scale(s))).collect() }
    }

    fn add(&self, other: &TrigPoly) -> TrigPoly {
        self.dim_check(other);
        let mut raw = self.terms.clone();
        raw.extend_from_slice(&other.terms);
        TrigPoly { dim: self.dim, terms: normalize(raw) }
    }

    fn mul(&self, other: &TrigPoly) -> TrigPoly {
        self.dim_check(other);
        if self.terms.is_empty() || other.terms.is_empty() {
            return TrigPoly::zero(self.dim as usize);
        }
        let terms = mul_int(&self.terms, &other.terms).unwrap_or_else(|| mul_exact(&self.terms, &other.terms));
        TrigPoly { dim: self.dim, terms }
    }

    fn partial(&self, axis: usize) -> TrigPoly {
        assert!(axis < self.dim as usize, "axis out of range");
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k[axis] != 0)
                .map(|(k, c)| (*k, c.times_ik(k[axis] as i64)))
                .collect(),
        }
    }

    fn mean(&self) -> Q {
        let c = self.coeff(&[0; 4]);
        debug_assert!(c.im.is_zero());
        c.re
    }

    fn mean_of_product(&self, other: &TrigPoly) -> Q {
        self.dim_check(other);
        let mut acc = Q::ZERO;
        let (small, large) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        for (k, c) in &small.terms {
            let d = large.coeff(&neg(*k));
            if !d.is_zero() {
                acc += (*c * d).re;
            }
        }
        acc
    }

    fn value_zero() -> Q {
        Q::ZERO
    }

    fn value_add(a: Q, b: Q) -> Q {
        a + b
    }

    fn value_scale(a: Q, s: Q) -> Q {
        a * s
    }

    fn value_to_f64(v: Q) -> f64 {
        v.to_f64()
    }

    fn acc_new(_: &usize) -> TrigAcc {
        TrigAcc::default()
    }

    fn acc_add(acc: &mut TrigAcc, f: &TrigPoly, s: Q) {
        if !s.is_zero() && !f.terms.is_empty() {
            acc.add(f, s);
        }
    }

    fn acc_finish(acc: TrigAcc, domain: &usize) -> TrigPoly {
        acc.finish(*domain)
    }

    fn prepare(&self) -> PreparedPoly<'_> {
        PreparedPoly { poly: self, int: int_form(&self.terms, Q::ONE) }
    }

    fn acc_add_product(acc: &mut TrigAcc, f: &PreparedPoly<'_>, g: &PreparedPoly<'_>, s: Q) {
        if !s.is_zero() && !f.poly.terms.is_empty() && !g.poly.terms.is_empty() {
            acc.add_product(f, g, s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly() -> impl Strategy<Value = TrigPoly> {
        let coeff = (-40i128..40, 1i128..13).prop_map(|(n, d)| Q::new(n, d));
        let big = (-(1i128 << 24)..(1i128 << 24), 1i128..(1i128 << 16)).prop_map(|(n, d)| Q::new(n, d));
        let c = prop_oneof![4 => coeff, 1 => big];
        prop::collection::vec(([-2i16..=2, -2i16..=2], c.clone(), c), 0..6).prop_map(|modes| {
            modes.into_iter().fold(TrigPoly::zero(2), |acc, (k, a, b)| acc.add(&TrigPoly::cos_sin(2, &k, a, b)))
        })
    }

    #[test]
    fn integer_overflow_falls_back_to_exact_arithmetic() {
        // Coprime denominators near 2^60: the common denominator overflows i128
        // while every individual product still fits.
        let (p, q) = ((1i128 << 61) - 1, (1i128 << 59) - 55);
        let f = TrigPoly::cos_sin(2, &[1, 0], Q::new(1, p), Q::ZERO).add(&TrigPoly::cos_sin(
            2,
            &[0, 1],
            Q::new(1, q),
            Q::ZERO,
        ));
        let g = TrigPoly::cos_sin(2, &[2, 0], Q::new(1, q), Q::ZERO);
        assert!(mul_int(&f.terms, &g.terms).is_none());
        assert_eq!(f.mul(&g).terms, mul_exact(&f.terms, &g.terms));
        let mut acc = TrigAcc::default();
        Coeff::acc_add(&mut acc, &f, Q::ONE);
        Coeff::acc_add(&mut acc, &g, Q::new(1, p));
        assert_eq!(TrigPoly::acc_finish(acc, &2), f.add(&g.scale(Q::new(1, p))));
        let mut acc = TrigAcc::default();
        TrigPoly::acc_add_product(&mut acc, &f.prepare(), &g.prepare(), Q::ONE);
        TrigPoly::acc_add_product(&mut acc, &g.prepare(), &g.prepare(), Q::new(1, 2));
        assert_eq!(TrigPoly::acc_finish(acc, &2), f.mul(&g).add(&g.mul(&g).scale(Q::new(1, 2))));
    }

    proptest! {
        #[test]
        fn integer_kernels_match_exact_arithmetic(f in poly(), g in poly(), h in poly(), s in -7i128..7) {
            prop_assert_eq!(f.mul(&g).terms, mul_exact(&f.terms, &g.terms));
            let mut acc = TrigAcc::default();
            for (p, t) in [(&f, Q::new(s, 5)), (&g, Q::ONE), (&h, Q::new(-3, 7))] {
                Coeff::acc_add(&mut acc, p, t);
            }
            let want = f.scale(Q::new(s, 5)).add(&g).add(&h.scale(Q::new(-3, 7)));
            prop_assert_eq!(TrigPoly::acc_finish(acc, &2), want);
            let mut acc = TrigAcc::default();
            TrigPoly::acc_add_product(&mut acc, &f.prepare(), &g.prepare(), Q::new(s, 3));
            TrigPoly::acc_add_product(&mut acc, &h.prepare(), &f.prepare(), Q::ONE);
            let want = f.mul(&g).scale(Q::new(s, 3)).add(&h.mul(&f));
            prop_assert_eq!(TrigPoly::acc_finish(acc, &2), want);
        }
    }

    #[test]
    fn cos_squared() {
        let c = TrigPoly::cos_sin(3, &[1, 0, 0], Q::ONE, Q::ZERO);
        let sq = c.mul(&c);
        let expect = TrigPoly::constant(3, Q::new(1, 2)).add(&TrigPoly::cos_sin(3, &[2, 0, 0], Q::new(1, 2), Q::ZERO));
        assert_eq!(sq, expect);
        assert_eq!(sq.mean(), Q::new(1, 2));
    }

    #[test]
    fn derivative_of_sine() {
        let s = TrigPoly::cos_sin(2, &[3, 0], Q::ZERO, Q::ONE);
        assert_eq!(s.partial(0), TrigPoly::cos_sin(2, &[3, 0], Q::int(3), Q::ZERO));
        assert!(s.partial(1).is_zero());
    }

    #[test]
    fn hermitian_enforced() {
        let bad = TrigPoly::from_terms(1, [([1, 0, 0, 0], Cq::real(Q::ONE))]);
        assert!(bad.is_err());
    }

    #[test]
    fn pointwise_eval() {
        let f = TrigPoly::cos_sin(2, &[1, -2], Q::new(1, 3), Q::new(-2, 5));
        let x = [0.3, 1.1];
        let expect = (0.3f64 - 2.2).cos() / 3.0 - 0.4 * (0.3f64 - 2.2).sin();
        assert!((f.eval(&x) - expect).abs() < 1e-14);
    }
}
