//! Ext over an exterior Hopf algebra `Λ_{F_q}(τ_1, …, τ_n)` with primitive
//! generators of internal degree −1, from the reduced cobar complex.
//!
//! A cobar element `[τ_{S_1} | … | τ_{S_s}]` is a sequence of nonempty
//! subsets. The differential preserves how often each generator occurs
//! (the multidegree), so the complex splits into small blocks that are
//! handled one at a time.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::field::{self, FieldError, Fq};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobarError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("characteristic 2 is out of scope")]
    EvenCharacteristic,
    #[error("cobar computations are limited to n <= {max_n} generators and s <= {max_s}")]
    TooLarge { max_n: usize, max_s: usize },
}

pub const MAX_GENERATORS: usize = 4;
pub const MAX_DEGREE: usize = 6;

#[derive(Clone, Debug)]
pub struct ExteriorHopf {
    n: usize,
    field: Fq,
}

impl ExteriorHopf {
    pub fn new(n: usize, q: u64) -> Result<Self, CobarError> {
        let field = Fq::new(q)?;
        if field.characteristic() == 2 {
            return Err(CobarError::EvenCharacteristic);
        }
        if n > MAX_GENERATORS {
            return Err(CobarError::TooLarge {
                max_n: MAX_GENERATORS,
                max_s: MAX_DEGREE,
            });
        }
        Ok(ExteriorHopf { n, field })
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    /// Reduced coproduct of `τ_S` (`S` a bitmask): the signed sum over
    /// splittings `S = S' ⊔ S''` into nonempty parts, the sign being that of
    /// the shuffle putting `S'` before `S''`.
    pub fn reduced_coproduct(&self, set: u8) -> Vec<(u8, u8, i64)> {
        let mut out = Vec::new();
        let mut left = (set.wrapping_sub(1)) & set;
        while left != 0 {
            let right = set & !left;
            out.push((left, right, shuffle_sign(left, right)));
            left = (left.wrapping_sub(1)) & set;
        }
        out
    }
}

/// Sign of the permutation sorting the elements of `left` followed by those
/// of `right`: `(−1)^{#{(a, b) : a ∈ left, b ∈ right, a > b}}`.
fn shuffle_sign(left: u8, right: u8) -> i64 {
    let mut inversions = 0;
    for a in 0..8 {
        if left & (1 << a) != 0 {
            inversions += (right & ((1u8 << a) - 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Dimensions of `Ext^{s,t}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTable {
    pub n: usize,
    pub s_max: usize,
    /// Nonzero dimensions keyed by `(s, t)`.
    pub dims: BTreeMap<(usize, i64), usize>,
}

impl ExtTable {
    pub fn get(&self, s: usize, t: i64) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    /// Total dimension in cohomological degree `s`.
    pub fn total(&self, s: usize) -> usize {
        self.dims
            .iter()
            .filter(|((ss, _), _)| *ss == s)
            .map(|(_, d)| d)
            .sum()
    }
}

/// Basis of `C^s` in multidegree `m`: sequences of `s` nonempty subsets in
/// which generator `i` occurs `m[i]` times.
fn block_basis(n: usize, s: usize, m: &[u8]) -> Vec<Vec<u8>> {
    fn go(n: usize, left: usize, m: &mut [u8], cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left == 0 {
            if m.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        // prune: every remaining factor needs at least one generator
        let remaining: usize = m.iter().map(|&x| x as usize).sum();
        if remaining < left || m.iter().any(|&x| x as usize > left) {
            return;
        }
        for set in 1u8..(1u8 << n) {
            if (0..n).all(|i| set & (1 << i) == 0 || m[i] > 0) {
                for i in 0..n {
                    if set & (1 << i) != 0 {
                        m[i] -= 1;
                    }
                }
                cur.push(set);
                go(n, left - 1, m, cur, out);
                cur.pop();
                for i in 0..n {
                    if set & (1 << i) != 0 {
                        m[i] += 1;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(n, s, &mut m.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Images of the basis of `C^s_m` under `d`, in coordinates of `C^{s+1}_m`.
fn block_differential(h: &ExteriorHopf, source: &[Vec<u8>], target: &[Vec<u8>]) -> Vec<Vec<u16>> {
    let fq = &h.field;
    let index: HashMap<&[u8], usize> = target
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    source
        .iter()
        .map(|word| {
            let mut img = vec![0u16; target.len()];
            for (pos, &set) in word.iter().enumerate() {
                let position_sign = if pos % 2 == 0 { 1 } else { -1 };
                for (l, r, sign) in h.reduced_coproduct(set) {
                    let mut w = Vec::with_capacity(word.len() + 1);
                    w.extend_from_slice(&word[..pos]);
                    w.push(l);
                    w.push(r);
                    w.extend_from_slice(&word[pos + 1..]);
                    let j = index[w.as_slice()];
                    img[j] = fq.add(img[j], fq.from_int(position_sign * sign));
                }
            }
            img
        })
        .collect()
}

/// All multidegrees `m ∈ {0..=bound}^n`.
fn multidegrees(n: usize, bound: u8) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=bound).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn check_size(s_max: usize) -> Result<(), CobarError> {
    if s_max > MAX_DEGREE {
        return Err(CobarError::TooLarge {
            max_n: MAX_GENERATORS,
            max_s: MAX_DEGREE,
        });
    }
    Ok(())
}

/// `Ext^{s,t}` for `s ≤ s_max` by ranks of cobar differentials.
pub fn cobar_ext(h: &ExteriorHopf, s_max: usize) -> Result<ExtTable, CobarError> {
    check_size(s_max)?;
    let n = h.n;
    let mut dims = BTreeMap::new();
    dims.insert((0, 0), 1);
    // an element of C^s in multidegree m has m_i ≤ s for every i
    for m in multidegrees(n, s_max as u8) {
        let weight: usize = m.iter().map(|&x| x as usize).sum();
        if weight == 0 {
            continue;
        }
        let t = -(weight as i64);
        let bases: Vec<Vec<Vec<u8>>> = (0..=s_max + 1).map(|s| block_basis(n, s, &m)).collect();
        let ranks: Vec<usize> = (0..=s_max)
            .map(|s| {
                if bases[s].is_empty() || bases[s + 1].is_empty() {
                    0
                } else {
                    field::rank(&h.field, block_differential(h, &bases[s], &bases[s + 1]))
                }
            })
            .collect();
        for s in 1..=s_max {
            let dim = bases[s].len() - ranks[s] - ranks[s - 1];
            if dim > 0 {
                *dims.entry((s, t)).or_insert(0) += dim;
            }
        }
    }
    Ok(ExtTable { n, s_max, dims })
}

/// `d ∘ d = 0` on every block up to `C^{s_max}`.
pub fn check_d_squared(h: &ExteriorHopf, s_max: usize) -> Result<bool, CobarError> {
    check_size(s_max)?;
    let fq = &h.field;
    for m in multidegrees(h.n, s_max as u8) {
        let bases: Vec<Vec<Vec<u8>>> = (0..=s_max).map(|s| block_basis(h.n, s, &m)).collect();
        for s in 0..s_max.saturating_sub(1) {
            if bases[s].is_empty() || bases[s + 2].is_empty() {
                continue;
            }
            let first = block_differential(h, &bases[s], &bases[s + 1]);
            let second = block_differential(h, &bases[s + 1], &bases[s + 2]);
            for img in &first {
                let mut out = vec![0u16; bases[s + 2].len()];
                for (j, &c) in img.iter().enumerate() {
                    if c != 0 {
                        field::axpy(fq, &mut out, c, &second[j]);
                    }
                }
                if out.iter().any(|&x| x != 0) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Dimensions of `Sym(V)` with `V` of dimension `n` in bidegree `(1, −1)`:
/// `C(n + s − 1, s)` in bidegree `(s, −s)`.
pub fn symmetric_oracle(n: usize, s_max: usize) -> ExtTable {
    let mut dims = BTreeMap::new();
    for s in 0..=s_max {
        let d = binomial((n + s).saturating_sub(1), s);
        if d > 0 {
            dims.insert((s, -(s as i64)), d);
        }
    }
    ExtTable { n, s_max, dims }
}

fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coproduct_signs() {
        let h = ExteriorHopf::new(2, 3).unwrap();
        let mut terms = h.reduced_coproduct(0b11);
        terms.sort();
        // τ_1τ_2 ↦ τ_1 ⊗ τ_2 − τ_2 ⊗ τ_1
        assert_eq!(terms, vec![(0b01, 0b10, 1), (0b10, 0b01, -1)]);
        assert!(h.reduced_coproduct(0b01).is_empty());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(symmetric_oracle(3, 2).get(2, -2), 6);
        assert_eq!(symmetric_oracle(2, 0).get(0, 0), 1);
        assert_eq!(symmetric_oracle(2, 4).get(4, -4), 5);
    }

    #[test]
    fn cobar_examples() {
        let one = cobar_ext(&ExteriorHopf::new(1, 3).unwrap(), 5).unwrap();
        assert!((0..=5).all(|s| one.get(s, -(s as i64)) == 1 && one.total(s) == 1));
        let two = cobar_ext(&ExteriorHopf::new(2, 5).unwrap(), 3).unwrap();
        assert_eq!(two.get(2, -2), 3);
        assert_eq!(two.total(2), 3);
        assert_eq!(two.get(0, 0), 1);
    }

    #[test]
    fn matches_oracle_over_f9() {
        let h = ExteriorHopf::new(2, 9).unwrap();
        assert_eq!(cobar_ext(&h, 4).unwrap(), symmetric_oracle(2, 4));
        assert!(check_d_squared(&h, 4).unwrap());
    }

    #[test]
    fn rejects_out_of_scope() {
        assert_eq!(ExteriorHopf::new(2, 4).unwrap_err(), CobarError::EvenCharacteristic);
        assert!(ExteriorHopf::new(5, 3).is_err());
        assert!(cobar_ext(&ExteriorHopf::new(1, 3).unwrap(), 7).is_err());
    }
}
