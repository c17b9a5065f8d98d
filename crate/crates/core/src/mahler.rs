//! Truncated Mahler-basis model of continuous functions `Z_p → Z_p`.
//!
//! A function is stored through its first `L` Mahler coefficients
//! `f = Σ c_i b_i` with `b_i(x) = (x choose i)`, modulo `p^N`. The span of
//! `b_0, …, b_{L−1}` is the space of integer-valued polynomials of degree
//! below `L`, which is stable under `x ↦ ψx`; on it the action of the
//! topological generator is upper triangular with diagonal `ψ^i`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use thiserror::Error;

use crate::gmod::{snf, ModMatrix};
use crate::grpcoh::{character_cohomology, CharacterCohomology, CohomologyError};
use crate::padic::{binom, psi_generator_exact, vp_factorial, PadicError, PadicInt, PadicScaled, Zpn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MahlerError {
    #[error("a Mahler window needs at least {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("values at mixed precisions")]
    MixedRings,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("precision {precision} too low: invariants need at least {needed}")]
    Precision { precision: u32, needed: u32 },
    #[error("unexpected rational H^1 contributions from characters {0:?}")]
    Rational(Vec<i64>),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MahlerFunction {
    ring: Zpn,
    coeffs: Vec<PadicInt>,
}

impl MahlerFunction {
    pub fn new(ring: Zpn, coeffs: Vec<PadicInt>) -> Result<Self, MahlerError> {
        if coeffs.is_empty() {
            return Err(MahlerError::TooShort { needed: 1, got: 0 });
        }
        if coeffs.iter().any(|c| c.ring() != ring) {
            return Err(MahlerError::MixedRings);
        }
        Ok(MahlerFunction { ring, coeffs })
    }

    pub fn from_i64s(ring: Zpn, coeffs: &[i64]) -> Result<Self, MahlerError> {
        Self::new(ring, coeffs.iter().map(|&c| ring.from_i64(c)).collect())
    }

    /// `b_i` in a window of length `len`.
    pub fn basis(ring: Zpn, len: usize, i: usize) -> Self {
        assert!(i < len, "basis index outside the window");
        let mut coeffs = vec![ring.zero(); len];
        coeffs[i] = ring.one();
        MahlerFunction { ring, coeffs }
    }

    pub fn constant(ring: Zpn, len: usize, c: PadicInt) -> Self {
        Self::basis(ring, len, 0).scale(c)
    }

    pub fn scale(&self, c: PadicInt) -> Self {
        MahlerFunction {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn ring(&self) -> Zpn {
        self.ring
    }

    /// Truncation length `L`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    /// `f(0), …, f(L−1)`.
    pub fn values(&self) -> Vec<PadicInt> {
        let len = self.len();
        // f(n) = Σ_{i ≤ n} (n choose i) c_i, via the inverse difference table
        let mut table = self.coeffs.clone();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(table[0]);
            for i in 0..len - 1 {
                table[i] = table[i] + table[i + 1];
            }
        }
        out
    }

    /// Value at a non-negative integer, exact modulo `p^N`.
    pub fn evaluate_integer(&self, n: &BigUint) -> PadicInt {
        let binoms = binomials(self.ring, n, self.len());
        self.coeffs
            .iter()
            .zip(binoms)
            .fold(self.ring.zero(), |acc, (&c, b)| acc + c * b)
    }

    /// Value at a `p`-adic argument known modulo `p^N`; the result is
    /// determined modulo `p^{N − v_p((L−1)!)}`.
    pub fn evaluate(&self, x: PadicInt) -> Result<PadicInt, MahlerError> {
        let lost = vp_factorial(self.ring.prime(), self.len() as u64 - 1);
        let target = self.ring.precision().checked_sub(lost).filter(|&n| n > 0).ok_or(
            PadicError::PrecisionLoss {
                precision: self.ring.precision(),
                lost,
            },
        )?;
        let mut acc = self.ring.with_precision(target)?.zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let b = binom(x, i as u64)?.reduce(target)?;
            acc = acc + c.reduce(target)? * b;
        }
        Ok(acc)
    }

    /// `index,residue,valuation` table of the coefficients.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,residue,valuation\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{i},{},{}", c.residue(), c.valuation()).expect("write to string");
        }
        out
    }
}

/// `(n choose i)` modulo `p^N` for `i < len`, from the ratio recursion.
fn binomials(ring: Zpn, n: &BigUint, len: usize) -> Vec<PadicInt> {
    let mut out = Vec::with_capacity(len);
    let mut acc = PadicScaled::new(0, ring.one());
    for i in 0..len {
        out.push(acc.to_int(ring).expect("binomial coefficients are integral"));
        let ii = BigUint::from(i as u64);
        if n <= &ii {
            acc = PadicScaled::zero();
            continue;
        }
        let num = PadicScaled::from_integer(ring, &(n - &ii));
        let den = PadicScaled::from_integer(ring, &BigUint::from(i as u64 + 1));
        acc = (acc * num).div(&den).expect("nonzero divisor");
    }
    out
}

/// Mahler coefficients from the values `f(0), …, f(L−1)` by finite
/// differences, `c_i = (Δ^i f)(0)`.
pub fn mahler_coeffs(values: &[PadicInt]) -> Result<MahlerFunction, MahlerError> {
    let ring = values
        .first()
        .ok_or(MahlerError::TooShort { needed: 1, got: 0 })?
        .ring();
    if values.iter().any(|v| v.ring() != ring) {
        return Err(MahlerError::MixedRings);
    }
    let mut table = values.to_vec();
    let mut coeffs = Vec::with_capacity(values.len());
    for len in (1..=values.len()).rev() {
        coeffs.push(table[0]);
        for i in 0..len - 1 {
            table[i] = table[i + 1] - table[i];
        }
    }
    MahlerFunction::new(ring, coeffs)
}

/// `ψ` modulo `p^{N + v_p((L−1)!)}`, enough to evaluate `b_i(ψ x)` modulo
/// `p^N` for every `i < L`.
fn psi_for_window(ring: Zpn, len: usize) -> (BigUint, BigUint) {
    let p = ring.prime();
    let m = ring.precision() + vp_factorial(p, len.saturating_sub(1) as u64);
    (psi_generator_exact(p, m), BigUint::from(p).pow(m))
}

/// `(ψ·f)(x) = f(xψ)`, recomputed from sampled values.
pub fn act_psi(f: &MahlerFunction) -> MahlerFunction {
    let ring = f.ring;
    let (psi, modulus) = psi_for_window(ring, f.len());
    let values: Vec<PadicInt> = (0..f.len() as u64)
        .map(|j| f.evaluate_integer(&((&psi * j) % &modulus)))
        .collect();
    mahler_coeffs(&values).expect("nonempty window")
}

/// Matrix of `ψ` on the length-`len` window: column `i` holds the Mahler
/// coefficients of `x ↦ b_i(ψx)`.
pub fn psi_matrix(ring: Zpn, len: usize) -> ModMatrix {
    let (psi, modulus) = psi_for_window(ring, len);
    // sample[j][i] = b_i(ψ j)
    let samples: Vec<Vec<PadicInt>> = (0..len as u64)
        .map(|j| binomials(ring, &((&psi * j) % &modulus), len))
        .collect();
    let mut m = ModMatrix::zeros(ring, len, len);
    for i in 0..len {
        let column: Vec<PadicInt> = samples.iter().map(|row| row[i]).collect();
        let coeffs = mahler_coeffs(&column).expect("nonempty window");
        for (r, &c) in coeffs.coeffs().iter().enumerate() {
            m.set(r, i, c);
        }
    }
    m
}

/// Pointwise product, exact: the result has length `L_f + L_g − 1`,
/// enough to hold a product of polynomials of degrees `< L_f` and `< L_g`.
pub fn pointwise_product(f: &MahlerFunction, g: &MahlerFunction) -> Result<MahlerFunction, MahlerError> {
    if f.ring != g.ring {
        return Err(MahlerError::MixedRings);
    }
    let len = f.len() + g.len() - 1;
    let fv = f.padded(len).values();
    let gv = g.padded(len).values();
    mahler_coeffs(&fv.iter().zip(&gv).map(|(&a, &b)| a * b).collect::<Vec<_>>())
}

/// Product at a common length `L`, exact modulo `b_{≥L}`.
pub fn truncated_product(f: &MahlerFunction, g: &MahlerFunction) -> Result<MahlerFunction, MahlerError> {
    if f.len() != g.len() {
        return Err(MahlerError::LengthMismatch(f.len(), g.len()));
    }
    let mut full = pointwise_product(f, g)?;
    full.coeffs.truncate(f.len());
    Ok(full)
}

impl MahlerFunction {
    /// The same function in a longer window.
    pub fn padded(&self, len: usize) -> MahlerFunction {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() < len {
            coeffs.resize(len, self.ring.zero());
        }
        MahlerFunction {
            ring: self.ring,
            coeffs,
        }
    }
}

/// `ker(id − ψ)` on a length-`L` window.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub len: usize,
    /// Rank of the `Z_p`-module of invariants.
    pub rank: usize,
    /// A basis of the invariants.
    pub basis: Vec<MahlerFunction>,
    /// Finite valuations in the Smith form of `id − ψ` at the working
    /// precision; invariant factors beyond it are not listed.
    pub torsion: Vec<u32>,
}

/// Invariants of the ψ-action on the Mahler window of length `len`.
///
/// A direction that looks free modulo `p^N` may be a large cyclic factor of
/// the cokernel, so the Smith form alone only bounds the rank from above.
/// The action is upper triangular, and every diagonal entry `1 − ψ^i` of
/// valuation below `N` is certified nonzero, which gives a second bound;
/// constants are invariant on the nose, which gives the lower bound.
pub fn invariants(len: usize, ring: Zpn) -> Result<InvariantReport, MahlerError> {
    if len < 2 {
        return Err(MahlerError::TooShort { needed: 2, got: len });
    }
    let n = ring.precision();
    let d = ModMatrix::identity(ring, len).sub(&psi_matrix(ring, len));
    debug_assert!((0..len).all(|j| (j + 1..len).all(|i| d.get(i, j).is_zero())));
    let s = snf(&d);
    let torsion: Vec<u32> = s.diagonal.iter().copied().filter(|&v| v < n).collect();
    let diagonal: Vec<u32> = (0..len).map(|i| d.get(i, i).valuation()).collect();
    let certified_rank = torsion
        .len()
        .max(diagonal.iter().filter(|&&v| v < n).count());
    let upper = len - certified_rank;
    let constant = MahlerFunction::basis(ring, len, 0);
    let lower = usize::from(act_psi(&constant) == constant);
    if upper != lower {
        // index 0 is the constant direction, every other diagonal entry must be certified
        let needed = diagonal[1..].iter().copied().max().unwrap_or(0) + 1;
        return Err(MahlerError::Precision {
            precision: n,
            needed: needed.max(n + 1),
        });
    }
    Ok(InvariantReport {
        len,
        rank: upper,
        basis: if upper == 1 { vec![constant] } else { Vec::new() },
        torsion,
    })
}

/// Cohomology of the characters `b^k`, `k` in a window.
#[derive(Clone, Debug)]
pub struct RationalProfile {
    pub characters: Vec<(i64, CharacterCohomology)>,
    /// Characters with nonzero rational `H^1`.
    pub contributing: Vec<i64>,
}

impl RationalProfile {
    /// Rational ranks of `H^0` and `H^1` of the whole window.
    pub fn rational_ranks(&self) -> (usize, usize) {
        self.characters
            .iter()
            .fold((0, 0), |(a, b), (_, c)| {
                (a + usize::from(c.h0_rank), b + usize::from(c.h1_rank))
            })
    }
}

/// Aggregates character cohomology over `[k_min, k_max]`; only the trivial
/// character may contribute rationally.
pub fn h1_rational_profile(k_min: i64, k_max: i64, ring: Zpn) -> Result<RationalProfile, MahlerError> {
    let mut characters = Vec::new();
    for k in k_min..=k_max {
        characters.push((k, character_cohomology(k, ring)?));
    }
    let contributing: Vec<i64> = characters
        .iter()
        .filter(|(_, c)| c.h1_rank > 0)
        .map(|&(k, _)| k)
        .collect();
    let expected: Vec<i64> = if (k_min..=k_max).contains(&0) { vec![0] } else { vec![] };
    if contributing != expected {
        return Err(MahlerError::Rational(contributing));
    }
    Ok(RationalProfile {
        characters,
        contributing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::psi_generator;

    fn ring(p: u64, n: u32) -> Zpn {
        Zpn::new(p, n).unwrap()
    }

    fn residues(f: &MahlerFunction) -> Vec<u64> {
        f.coeffs().iter().map(|c| c.residue()).collect()
    }

    #[test]
    fn coefficient_examples() {
        let r = ring(3, 6);
        let square: Vec<PadicInt> = (0..6).map(|x| r.from_u64(x * x)).collect();
        assert_eq!(residues(&mahler_coeffs(&square).unwrap()), vec![0, 1, 2, 0, 0, 0]);
        let one = vec![r.one(); 5];
        assert_eq!(residues(&mahler_coeffs(&one).unwrap()), vec![1, 0, 0, 0, 0]);
        let b3: Vec<PadicInt> = (0..8u64)
            .map(|x| r.from_u64(x * x.saturating_sub(1) * x.saturating_sub(2) / 6))
            .collect();
        assert_eq!(residues(&mahler_coeffs(&b3).unwrap()), vec![0, 0, 0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn psi_action_examples() {
        let r = ring(3, 6);
        let psi = psi_generator(r);
        let b1 = MahlerFunction::basis(r, 5, 1);
        let out = act_psi(&b1);
        assert_eq!(out.coeffs()[1], psi);
        assert!(out.coeffs().iter().enumerate().all(|(i, c)| i == 1 || c.is_zero()));
        let c = MahlerFunction::constant(r, 5, r.from_u64(7));
        assert_eq!(act_psi(&c), c);
        // (ψx choose 2) = ψ(ψ-1)/2 · x + ψ^2 · (x choose 2)
        let out = act_psi(&MahlerFunction::basis(r, 4, 2));
        let half = r.from_u64(2).inv().unwrap();
        assert_eq!(out.coeffs()[1], psi * (psi - r.one()) * half);
        assert_eq!(out.coeffs()[2], psi * psi);
        assert!(out.coeffs()[0].is_zero() && out.coeffs()[3].is_zero());
    }

    #[test]
    fn matrix_agrees_with_action() {
        let r = ring(5, 4);
        let m = psi_matrix(r, 7);
        for i in 0..7 {
            let out = act_psi(&MahlerFunction::basis(r, 7, i));
            for (k, &c) in out.coeffs().iter().enumerate() {
                assert_eq!(m.get(k, i), c);
            }
        }
    }

    #[test]
    fn invariants_are_constants() {
        for (len, p, n) in [(16, 3, 8), (2, 5, 6), (64, 3, 12), (32, 3, 12), (64, 5, 12)] {
            let rep = invariants(len, ring(p, n)).map_err(|e| format!("{len} {p} {n}: {e}")).unwrap();
            assert_eq!(rep.rank, 1, "L = {len}, p = {p}");
            let g = &rep.basis[0];
            assert_eq!(g.coeffs()[0], g.ring().one());
        }
        assert!(matches!(
            invariants(1, ring(3, 6)),
            Err(MahlerError::TooShort { .. })
        ));
    }

    #[test]
    fn rational_profile() {
        let prof = h1_rational_profile(-20, 20, ring(3, 12)).unwrap();
        assert_eq!(prof.contributing, vec![0]);
        assert_eq!(prof.rational_ranks(), (1, 1));
        let two = prof.characters.iter().find(|(k, _)| *k == 2).unwrap().1;
        assert_eq!((two.h1_rank, two.torsion_valuation), (0, 1));
    }

    #[test]
    fn evaluation_at_padic_points() {
        let r = ring(5, 6);
        let b2 = MahlerFunction::basis(r, 3, 2);
        let x = r.from_i64(-1);
        assert_eq!(b2.evaluate(x).unwrap().residue(), 1);
        assert_eq!(b2.evaluate_integer(&BigUint::from(10u32)).residue(), 45);
    }

    #[test]
    fn csv_dump() {
        let f = MahlerFunction::from_i64s(ring(3, 3), &[1, 3, 0]).unwrap();
        assert_eq!(f.to_csv(), "index,residue,valuation\n0,1,0\n1,3,1\n2,0,3\n");
    }
}
