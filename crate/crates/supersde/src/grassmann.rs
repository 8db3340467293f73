//! Exact arithmetic in a finitely generated Grassmann algebra.
//!
//! Elements are stored in canonical form: a map from strictly increasing
//! generator-index sequences to nonzero real coefficients. The empty key
//! holds the scalar part. Reordering signs are absorbed into the
//! coefficients, so equality of canonical forms is exact.

use std::collections::BTreeMap;

/// Index of one odd generator. Canonical order is numeric order.
pub type GeneratorId = u32;

/// Element of a Grassmann algebra over real coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GrassmannElement {
    terms: BTreeMap<Vec<GeneratorId>, f64>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GrassmannError {
    #[error("repeated generator {0} in Berezin integration list")]
    RepeatedGenerator(GeneratorId),
}

/// Sorts `key` in place, returns the permutation sign, or `None` if a
/// generator repeats (the monomial vanishes).
fn sort_key(key: &mut Vec<GeneratorId>) -> Option<f64> {
    // insertion sort, counting transpositions
    let mut swaps = 0usize;
    for i in 1..key.len() {
        let mut j = i;
        while j > 0 && key[j - 1] > key[j] {
            key.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    for w in key.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

impl GrassmannElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: f64) -> Self {
        let mut e = Self::default();
        e.insert(vec![], c);
        e
    }

    pub fn one() -> Self {
        Self::scalar(1.0)
    }

    /// Single generator θ_i.
    pub fn generator(i: GeneratorId) -> Self {
        Self::monomial(&[i], 1.0)
    }

    /// c·θ_{i1}⋯θ_{ik} with the key given in any order; the reordering
    /// sign is absorbed into the coefficient.
    pub fn monomial(key: &[GeneratorId], c: f64) -> Self {
        let mut k = key.to_vec();
        let mut e = Self::default();
        if let Some(sign) = sort_key(&mut k) {
            e.insert(k, sign * c);
        }
        e
    }

    fn insert(&mut self, key: Vec<GeneratorId>, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the canonical monomial `key` (must be strictly increasing).
    pub fn coeff(&self, key: &[GeneratorId]) -> f64 {
        debug_assert!(key.windows(2).all(|w| w[0] < w[1]));
        self.terms.get(key).copied().unwrap_or(0.0)
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeff(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[GeneratorId], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Largest coefficient magnitude; zero element gives 0.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// a + c·b
    pub fn add_scale(&self, b: &Self, c: f64) -> Self {
        let mut out = self.clone();
        for (k, v) in &b.terms {
            out.insert(k.clone(), c * v);
        }
        out
    }

    pub fn add(&self, b: &Self) -> Self {
        self.add_scale(b, 1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::default();
        for (k, v) in &self.terms {
            out.insert(k.clone(), c * v);
        }
        out
    }

    /// Bilinear associative product. The sign of each term pair is the
    /// parity of the transpositions needed to sort the concatenated key;
    /// terms with a repeated generator drop out (θ² = 0).
    pub fn mul(&self, b: &Self) -> Self {
        let mut out = Self::default();
        for (ka, va) in &self.terms {
            for (kb, vb) in &b.terms {
                let mut key: Vec<GeneratorId> = Vec::with_capacity(ka.len() + kb.len());
                key.extend_from_slice(ka);
                key.extend_from_slice(kb);
                if let Some(sign) = sort_key(&mut key) {
                    out.insert(key, sign * va * vb);
                }
            }
        }
        out
    }

    /// Single-variable Berezin integral ∫·dθ_g: terms lacking θ_g vanish;
    /// otherwise θ_g is moved to the rightmost position and removed,
    /// ∫Θθdθ = Θ.
    pub fn berezin_single(&self, g: GeneratorId) -> Self {
        let mut out = Self::default();
        for (k, v) in &self.terms {
            if let Some(pos) = k.iter().position(|&x| x == g) {
                let moves = k.len() - 1 - pos;
                let sign = if moves % 2 == 0 { 1.0 } else { -1.0 };
                let mut key = k.clone();
                key.remove(pos);
                out.insert(key, sign * v);
            }
        }
        out
    }

    /// Iterated Berezin integral ∫⋯dθ_{g1}⋯dθ_{gk}, applied innermost-first
    /// (g1 first). Rejects repeated generators.
    pub fn berezin(&self, gens: &[GeneratorId]) -> Result<Self, GrassmannError> {
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].contains(g) {
                return Err(GrassmannError::RepeatedGenerator(*g));
            }
        }
        let mut cur = self.clone();
        for &g in gens {
            cur = cur.berezin_single(g);
        }
        Ok(cur)
    }

    /// Graded left derivative ∂_{θ_g}: θ_g is moved to the leftmost
    /// position (anticommuting past the others) and removed.
    pub fn left_derivative(&self, g: GeneratorId) -> Self {
        let mut out = Self::default();
        for (k, v) in &self.terms {
            if let Some(pos) = k.iter().position(|&x| x == g) {
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let mut key = k.clone();
                key.remove(pos);
                out.insert(key, sign * v);
            }
        }
        out
    }

    /// Exact equality of canonical forms up to `tol` on every coefficient.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.add_scale(other, -1.0).max_abs_coeff() <= tol
    }
}
