//! Finite fields and dense row reduction over them.

use std::fmt;

use thiserror::Error;

use crate::padic::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} is too large for table arithmetic")]
    TooLarge(u64),
}

/// The field `F_q`, `q = p^e`, with elements encoded as `0..q`.
///
/// For `e = 1` the code is the residue. For `e > 1` the code `Σ a_i p^i`
/// stands for the polynomial `Σ a_i x^i` modulo [`Fq::modulus_poly`], the
/// lexicographically first monic irreducible of degree `e`.
#[derive(Clone)]
pub struct Fq {
    p: u64,
    degree: u32,
    q: usize,
    modulus_poly: Vec<u64>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus_poly == other.modulus_poly
    }
}

/// Prime fields use direct modular arithmetic; extension fields use tables.
const MAX_PRIME: u64 = u16::MAX as u64;
const MAX_TABLE_ORDER: u64 = 256;

impl Fq {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, degree) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if (degree == 1 && q > MAX_PRIME) || (degree > 1 && q > MAX_TABLE_ORDER) {
            return Err(FieldError::TooLarge(q));
        }
        let modulus_poly = if degree == 1 {
            vec![0, 1]
        } else {
            first_irreducible(p, degree)
        };
        let qs = q as usize;
        let table = if degree == 1 { 0 } else { qs };
        let mut f = Fq {
            p,
            degree,
            q: qs,
            modulus_poly,
            add: vec![0; table * table],
            mul: vec![0; table * table],
            neg: vec![0; table],
            inv: vec![0; table],
        };
        if degree == 1 {
            return Ok(f);
        }
        for a in 0..qs {
            for b in 0..qs {
                f.add[a * qs + b] = f.slow_add(a as u64, b as u64) as u16;
                f.mul[a * qs + b] = f.slow_mul(a as u64, b as u64) as u16;
            }
        }
        for a in 0..qs {
            f.neg[a] = (0..qs).find(|&b| f.add[a * qs + b] == 0).unwrap() as u16;
            if a != 0 {
                f.inv[a] = (1..qs).find(|&b| f.mul[a * qs + b] == 1).unwrap() as u16;
            }
        }
        Ok(f)
    }

    pub fn order(&self) -> u64 {
        self.q as u64
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Coefficients (constant term first) of the defining polynomial.
    pub fn modulus_poly(&self) -> &[u64] {
        &self.modulus_poly
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        if self.degree == 1 {
            return ((a as u32 + b as u32) % self.p as u32) as u16;
        }
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if self.degree == 1 {
            return ((a as u32 * b as u32) % self.p as u32) as u16;
        }
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        if self.degree == 1 {
            return if a == 0 { 0 } else { (self.p as u16) - a };
        }
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        if self.degree == 1 {
            let p = self.p as u32;
            let (mut base, mut e, mut acc) = (a as u32, p - 2, 1u32);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p;
                }
                base = base * base % p;
                e >>= 1;
            }
            return Some(acc as u16);
        }
        Some(self.inv[a as usize])
    }

    /// Image of an integer under `Z → F_p ⊂ F_q`.
    pub fn from_int(&self, n: i64) -> u16 {
        n.rem_euclid(self.p as i64) as u16
    }

    fn digits(&self, mut a: u64) -> Vec<u64> {
        let mut d = vec![0; self.degree as usize];
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    fn slow_add(&self, a: u64, b: u64) -> u64 {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&s)
    }

    fn slow_mul(&self, a: u64, b: u64) -> u64 {
        let e = self.degree as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * e];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        // reduce by the monic modulus from the top down
        for k in (e..2 * e).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                let sub = c * self.modulus_poly[i] % self.p;
                let idx = k - e + i;
                prod[idx] = (prod[idx] + self.p - sub) % self.p;
            }
        }
        self.undigits(&prod[..e])
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    if !is_prime(p) {
        return None;
    }
    let (mut m, mut e) = (q, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// First monic irreducible of the given degree over `F_p` in the order of
/// its coefficient vector read as a base-`p` number (constant term lowest).
fn first_irreducible(p: u64, degree: u32) -> Vec<u64> {
    let e = degree as usize;
    let count = p.pow(degree);
    for code in 0..count {
        let mut poly: Vec<u64> = (0..e).map(|i| (code / p.pow(i as u32)) % p).collect();
        poly.push(1);
        if has_no_factor(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn has_no_factor(p: u64, poly: &[u64]) -> bool {
    let e = poly.len() - 1;
    for d in 1..=e / 2 {
        for code in 0..p.pow(d as u32) {
            let mut divisor: Vec<u64> = (0..d).map(|i| (code / p.pow(i as u32)) % p).collect();
            divisor.push(1);
            if poly_rem_is_zero(p, poly, &divisor) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(p: u64, poly: &[u64], divisor: &[u64]) -> bool {
    let mut r = poly.to_vec();
    let d = divisor.len() - 1;
    for k in (d..r.len()).rev() {
        let c = r[k];
        if c == 0 {
            continue;
        }
        for i in 0..=d {
            let idx = k - d + i;
            r[idx] = (r[idx] + p * p - c * divisor[i] % p) % p;
        }
    }
    r[..d].iter().all(|&c| c == 0)
}

/// Reduced row echelon data of a set of vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    /// Rows in reduced form, each with a leading 1 at `pivots[i]`.
    pub rows: Vec<Vec<u16>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Eliminates the echelon pivots from `v` in place.
    pub fn reduce(&self, field: &Fq, v: &mut [u16]) {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                axpy(field, v, field.neg(c), row);
            }
        }
    }
}

/// `y ← y + a·x`.
#[inline]
pub fn axpy(field: &Fq, y: &mut [u16], a: u16, x: &[u16]) {
    if field.degree == 1 {
        let p = field.p as u32;
        let a = a as u32;
        for (yi, &xi) in y.iter_mut().zip(x) {
            if xi != 0 {
                *yi = ((*yi as u32 + a * xi as u32) % p) as u16;
            }
        }
    } else {
        let q = field.q;
        let row = &field.mul[a as usize * q..(a as usize + 1) * q];
        for (yi, &xi) in y.iter_mut().zip(x) {
            if xi != 0 {
                *yi = field.add[*yi as usize * q + row[xi as usize] as usize];
            }
        }
    }
}

/// Fully reduced row echelon form of `rows` (all of equal length).
pub fn rref(field: &Fq, rows: &[Vec<u16>]) -> Echelon {
    let mut work: Vec<Vec<u16>> = rows.to_vec();
    let width = work.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..work.len()).find(|&i| work[i][col] != 0) else {
            continue;
        };
        work.swap(rank, found);
        let inv = field.inv(work[rank][col]).unwrap();
        if inv != 1 {
            for x in work[rank].iter_mut() {
                *x = field.mul(*x, inv);
            }
        }
        let pivot_row = work[rank].clone();
        for (i, row) in work.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = field.neg(row[col]);
                axpy(field, row, c, &pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    work.truncate(rank);
    Echelon { rows: work, pivots }
}

/// Rank of a dense matrix given by rows, consuming it.
///
/// Forward elimination only; cheaper than [`rref`] when only the rank matters.
pub fn rank(field: &Fq, mut rows: Vec<Vec<u16>>) -> usize {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = field.inv(rows[rank][col]).unwrap();
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            let c = row[col];
            if c != 0 {
                let factor = field.neg(field.mul(c, inv));
                axpy(field, &mut row[col..], factor, &pivot_row[col..]);
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Solves `Σ λ_i rows[i] = target`, if possible.
pub fn solve(field: &Fq, rows: &[Vec<u16>], target: &[u16]) -> Option<Vec<u16>> {
    let n = rows.len();
    let width = target.len();
    // augment each row with its identity tag to track combinations
    let augmented: Vec<Vec<u16>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| u16::from(i == j)));
            v
        })
        .collect();
    let ech = rref(field, &augmented);
    let mut rest: Vec<u16> = target.to_vec();
    rest.extend(std::iter::repeat_n(0, n));
    let mut combo = vec![0u16; n];
    for (row, &piv) in ech.rows.iter().zip(&ech.pivots) {
        if piv >= width {
            break;
        }
        let c = rest[piv];
        if c != 0 {
            axpy(field, &mut rest, field.neg(c), row);
            for (j, slot) in combo.iter_mut().enumerate() {
                *slot = field.add(*slot, field.mul(c, row[width + j]));
            }
        }
    }
    rest[..width].iter().all(|&x| x == 0).then_some(combo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields_are_modular() {
        let f = Fq::new(7).unwrap();
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.add(4, 5), 2);
        assert_eq!(f.inv(3), Some(5));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn f9_is_a_field() {
        let f = Fq::new(9).unwrap();
        assert_eq!(f.modulus_poly(), &[1, 0, 1]);
        for a in 1..9u16 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        // multiplicative group is cyclic of order 8
        let has_generator = (1..9u16).any(|g| {
            let mut x = 1u16;
            (1..=8).all(|k| {
                x = f.mul(x, g);
                (k == 8) == (x == 1)
            })
        });
        assert!(has_generator);
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(Fq::new(6).unwrap_err(), FieldError::NotPrimePower(6));
        assert_eq!(Fq::new(1).unwrap_err(), FieldError::NotPrimePower(1));
    }

    #[test]
    fn rank_and_rref_agree() {
        let f = Fq::new(3).unwrap();
        let rows = vec![vec![1, 2, 0, 1], vec![2, 1, 0, 2], vec![0, 1, 1, 0]];
        assert_eq!(rank(&f, rows.clone()), 2);
        let e = rref(&f, &rows);
        assert_eq!(e.rank(), 2);
        assert_eq!(e.pivots, vec![0, 1]);
    }

    #[test]
    fn solve_finds_combinations() {
        let f = Fq::new(5).unwrap();
        let rows = vec![vec![1, 0, 2], vec![0, 1, 3]];
        let combo = solve(&f, &rows, &[2, 3, 3]).unwrap();
        assert_eq!(combo, vec![2, 3]);
        assert_eq!(solve(&f, &rows, &[0, 0, 1]), None);
    }
}
