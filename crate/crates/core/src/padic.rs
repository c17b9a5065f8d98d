//! Residues modulo `p^N` with p-adic semantics.
//!
//! Every value carries its ring `Z/p^N`, so precision is part of the value
//! and operations that lose precision say so in their output.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

/// Default working precision for runs that do not specify one.
pub const DEFAULT_PRECISION: u32 = 12;

/// Residues are stored in a `u64`; products go through `u128`.
const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("{p}^{precision} does not fit the residue representation")]
    ModulusTooLarge { p: u64, precision: u32 },
    #[error("{x} is divisible by the prime {p}")]
    NotCoprime { x: i64, p: u64 },
    #[error("precision exhausted: dividing by p^{lost} at precision {precision}")]
    PrecisionLoss { precision: u32, lost: u32 },
}

/// Returns true when `n` is prime (trial division; primes here are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `v_p(n)` for a nonzero integer; `None` for zero.
pub fn vp(p: u64, n: i64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut m = n.unsigned_abs();
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    Some(v)
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(p: u64, n: u64) -> u32 {
    let mut v = 0;
    let mut q = n / p;
    while q > 0 {
        v += q as u32;
        q /= p;
    }
    v
}

/// The ring `Z/p^N` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zpn {
    p: u64,
    precision: u32,
    modulus: u64,
}

impl Zpn {
    pub fn new(p: u64, precision: u32) -> Result<Self, PadicError> {
        if p == 2 || !is_prime(p) {
            return Err(PadicError::NotOddPrime(p));
        }
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        let mut modulus: u64 = 1;
        for _ in 0..precision {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(PadicError::ModulusTooLarge { p, precision })?;
        }
        Ok(Zpn {
            p,
            precision,
            modulus,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The same prime at another precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self, PadicError> {
        Zpn::new(self.p, precision)
    }

    /// `p^k` as an integer, for `k ≤ N`.
    pub fn p_power(&self, k: u32) -> u64 {
        debug_assert!(k <= self.precision);
        self.p.pow(k)
    }

    pub fn zero(&self) -> PadicInt {
        PadicInt {
            residue: 0,
            ring: *self,
        }
    }

    pub fn one(&self) -> PadicInt {
        self.from_u64(1)
    }

    pub fn from_u64(&self, x: u64) -> PadicInt {
        PadicInt {
            residue: x % self.modulus,
            ring: *self,
        }
    }

    pub fn from_i64(&self, x: i64) -> PadicInt {
        let m = self.modulus as i128;
        let r = (x as i128).rem_euclid(m);
        PadicInt {
            residue: r as u64,
            ring: *self,
        }
    }

    pub(crate) fn reduce_u128(&self, x: u128) -> u64 {
        (x % self.modulus as u128) as u64
    }
}

impl fmt::Display for Zpn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.precision)
    }
}

/// An element of `Z/p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    residue: u64,
    ring: Zpn,
}

impl PadicInt {
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn ring(&self) -> Zpn {
        self.ring
    }

    pub fn prime(&self) -> u64 {
        self.ring.p
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    /// Largest `v ≤ N` with `p^v | residue`; `N` for zero.
    pub fn valuation(&self) -> u32 {
        if self.residue == 0 {
            return self.ring.precision;
        }
        let mut r = self.residue;
        let mut v = 0;
        while r.is_multiple_of(self.ring.p) {
            r /= self.ring.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_multiple_of(self.ring.p)
    }

    /// The residue read as a signed integer in `(-p^N/2, p^N/2]`.
    pub fn signed(&self) -> i64 {
        let m = self.ring.modulus;
        if self.residue > m / 2 {
            self.residue as i64 - m as i64
        } else {
            self.residue as i64
        }
    }

    pub fn pow(&self, mut e: u64) -> PadicInt {
        let mut base = *self;
        let mut acc = self.ring.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Integer powers; negative exponents need a unit.
    pub fn pow_signed(&self, e: i64) -> Option<PadicInt> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|x| x.pow(e.unsigned_abs()))
        }
    }

    /// Multiplicative inverse, present iff the element is a unit.
    pub fn inv(&self) -> Option<PadicInt> {
        if !self.is_unit() {
            return None;
        }
        let (g, x, _) = ext_gcd(self.residue as i128, self.ring.modulus as i128);
        debug_assert_eq!(g, 1);
        Some(PadicInt {
            residue: x.rem_euclid(self.ring.modulus as i128) as u64,
            ring: self.ring,
        })
    }

    /// Reduction to a lower precision.
    pub fn reduce(&self, precision: u32) -> Result<PadicInt, PadicError> {
        let ring = self.ring.with_precision(precision)?;
        debug_assert!(precision <= self.ring.precision);
        Ok(ring.from_u64(self.residue))
    }

    /// Exact division by `p^k`: the result lives in `Z/p^{N-k}`.
    ///
    /// The caller must know `p^k` divides the residue.
    pub fn div_p_power(&self, k: u32) -> Result<PadicInt, PadicError> {
        if k >= self.ring.precision {
            return Err(PadicError::PrecisionLoss {
                precision: self.ring.precision,
                lost: k,
            });
        }
        let pk = self.ring.p_power(k);
        debug_assert_eq!(self.residue % pk, 0);
        let ring = self.ring.with_precision(self.ring.precision - k)?;
        Ok(ring.from_u64(self.residue / pk))
    }

    /// `(v, u)` with `self = p^v u` and `u` a unit of `Z/p^{N-v}`; `None` for zero.
    pub fn split(&self) -> Option<(u32, PadicInt)> {
        if self.is_zero() {
            return None;
        }
        let v = self.valuation();
        Some((v, self.div_p_power(v).expect("valuation below precision")))
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.ring.p, self.ring.precision)
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: PadicInt) -> PadicInt {
        debug_assert_eq!(self.ring, rhs.ring);
        let s = self.residue as u128 + rhs.residue as u128;
        PadicInt {
            residue: self.ring.reduce_u128(s),
            ring: self.ring,
        }
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: PadicInt) -> PadicInt {
        self + (-rhs)
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> PadicInt {
        let r = if self.residue == 0 {
            0
        } else {
            self.ring.modulus - self.residue
        };
        PadicInt {
            residue: r,
            ring: self.ring,
        }
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: PadicInt) -> PadicInt {
        debug_assert_eq!(self.ring, rhs.ring);
        let prod = self.residue as u128 * rhs.residue as u128;
        PadicInt {
            residue: self.ring.reduce_u128(prod),
            ring: self.ring,
        }
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// An element `p^offset · unit` of `Q_p`, or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadicScaled {
    valuation_offset: i64,
    unit_part: Option<PadicInt>,
}

impl PadicScaled {
    pub fn zero() -> Self {
        PadicScaled {
            valuation_offset: 0,
            unit_part: None,
        }
    }

    /// `p^offset · unit`; the second argument must be a unit.
    pub fn new(valuation_offset: i64, unit: PadicInt) -> Self {
        assert!(unit.is_unit(), "unit part must be a unit");
        PadicScaled {
            valuation_offset,
            unit_part: Some(unit),
        }
    }

    pub fn from_int(x: PadicInt) -> Self {
        match x.split() {
            None => Self::zero(),
            Some((v, u)) => PadicScaled::new(v as i64, u),
        }
    }

    /// Exact integer input: the unit part keeps the full precision of `ring`.
    pub fn from_integer(ring: Zpn, n: &BigUint) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        let p = BigUint::from(ring.prime());
        let mut m = n.clone();
        let mut v = 0i64;
        while (&m % &p).is_zero() {
            m /= &p;
            v += 1;
        }
        let r = &m % BigUint::from(ring.modulus());
        let unit = ring.from_u64(r.iter_u64_digits().next().unwrap_or(0));
        PadicScaled::new(v, unit)
    }

    pub fn is_zero(&self) -> bool {
        self.unit_part.is_none()
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.unit_part.map(|_| self.valuation_offset)
    }

    pub fn unit(&self) -> Option<PadicInt> {
        self.unit_part
    }

    /// Quotient; `None` when dividing by zero.
    pub fn div(&self, rhs: &PadicScaled) -> Option<PadicScaled> {
        let ru = rhs.unit_part?;
        Some(match self.unit_part {
            None => Self::zero(),
            Some(u) => {
                let (u, ru) = common_precision(u, ru);
                PadicScaled::new(
                    self.valuation_offset - rhs.valuation_offset,
                    u * ru.inv().expect("unit"),
                )
            }
        })
    }

    /// Projection to `Z/p^N`, or `None` if the element is not integral.
    pub fn to_int(&self, ring: Zpn) -> Option<PadicInt> {
        match self.unit_part {
            None => Some(ring.zero()),
            Some(u) => {
                if self.valuation_offset < 0 {
                    return None;
                }
                let v = self.valuation_offset as u64;
                if v >= ring.precision() as u64 {
                    return Some(ring.zero());
                }
                let lifted = ring.from_u64(u.residue());
                Some(lifted * ring.from_u64(ring.p_power(v as u32)))
            }
        }
    }
}

impl Mul for PadicScaled {
    type Output = PadicScaled;
    fn mul(self, rhs: PadicScaled) -> PadicScaled {
        match (self.unit_part, rhs.unit_part) {
            (Some(a), Some(b)) => {
                let (a, b) = common_precision(a, b);
                PadicScaled::new(self.valuation_offset + rhs.valuation_offset, a * b)
            }
            _ => PadicScaled::zero(),
        }
    }
}

fn common_precision(a: PadicInt, b: PadicInt) -> (PadicInt, PadicInt) {
    let n = a.precision().min(b.precision());
    (
        a.reduce(n).expect("positive precision"),
        b.reduce(n).expect("positive precision"),
    )
}

/// Teichmüller representative of `x0`: the `(p-1)`-th root of unity congruent
/// to `x0` mod `p`, by `N` rounds of Frobenius `x ↦ x^p`.
pub fn teichmuller(x0: i64, ring: Zpn) -> Result<PadicInt, PadicError> {
    let p = ring.prime();
    if x0.rem_euclid(p as i64) == 0 {
        return Err(PadicError::NotCoprime { x: x0, p });
    }
    let mut x = ring.from_i64(x0);
    for _ in 0..ring.precision() {
        x = x.pow(p);
    }
    Ok(x)
}

/// Smallest positive primitive root modulo `p`.
pub fn smallest_primitive_root(p: u64) -> u64 {
    let order = p - 1;
    let mut factors = Vec::new();
    let mut m = order;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    (2..p)
        .find(|&g| factors.iter().all(|&q| powmod(g, order / q) != 1))
        .unwrap_or(1)
}

/// The topological generator `ψ = σ(1+p)` of `Z_p^×`, with `σ` the
/// Teichmüller lift of the smallest primitive root.
pub fn psi_generator(ring: Zpn) -> PadicInt {
    let g = smallest_primitive_root(ring.prime());
    let sigma = teichmuller(g as i64, ring).expect("primitive root is a unit");
    sigma * ring.from_u64(1 + ring.prime())
}

/// `ψ` as an exact integer representative modulo `p^precision`, for
/// precisions beyond what [`Zpn`] can hold.
pub fn psi_generator_exact(p: u64, precision: u32) -> BigUint {
    let modulus = BigUint::from(p).pow(precision);
    let g = BigUint::from(smallest_primitive_root(p));
    let pb = BigUint::from(p);
    let mut sigma = g;
    for _ in 0..precision {
        sigma = sigma.modpow(&pb, &modulus);
    }
    (sigma * BigUint::from(1 + p)) % modulus
}

/// `ψ^k` for any integer `k`.
pub fn psi_power(ring: Zpn, k: i64) -> PadicInt {
    psi_generator(ring)
        .pow_signed(k)
        .expect("psi is a unit")
}

/// The p-adic binomial coefficient `a choose i`.
///
/// Computed as `∏ (a - j) / (j + 1)`; the `p`-part of `i!` is cancelled
/// against the numerator, so the result lives in `Z/p^{N - v_p(i!)}`.
pub fn binom(a: PadicInt, i: u64) -> Result<PadicInt, PadicError> {
    let ring = a.ring();
    let lost = vp_factorial(ring.prime(), i);
    if lost >= ring.precision() {
        return Err(PadicError::PrecisionLoss {
            precision: ring.precision(),
            lost,
        });
    }
    let mut numerator = ring.one();
    let mut denominator_unit = ring.one();
    for j in 0..i {
        numerator = numerator * (a - ring.from_u64(j));
        let mut d = j + 1;
        while d % ring.prime() == 0 {
            d /= ring.prime();
        }
        denominator_unit = denominator_unit * ring.from_u64(d);
    }
    let reduced = numerator.div_p_power(lost)?;
    let unit = denominator_unit
        .reduce(reduced.precision())?
        .inv()
        .expect("p-free part of i! is a unit");
    Ok(reduced * unit)
}

/// Binomial `n choose i` for an exact non-negative integer `n`, as `p^v · unit`
/// with the unit taken modulo `p^N` of `ring`.
pub fn binom_exact(ring: Zpn, n: &BigUint, i: u64) -> PadicScaled {
    let mut acc = PadicScaled::new(0, ring.one());
    for j in 0..i {
        let jj = BigUint::from(j);
        if n <= &jj {
            return PadicScaled::zero();
        }
        let factor = PadicScaled::from_integer(ring, &(n - &jj));
        let divisor = PadicScaled::from_integer(ring, &BigUint::from(j + 1));
        acc = (acc * factor).div(&divisor).expect("nonzero divisor");
    }
    if !acc.is_zero() && acc.valuation_offset < 0 {
        unreachable!("binomial coefficients are integral");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: u32) -> Zpn {
        Zpn::new(p, n).unwrap()
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ring(3, 4).from_u64(18).valuation(), 2);
        assert_eq!(ring(3, 4).zero().valuation(), 4);
        assert_eq!(ring(5, 3).from_u64(7).valuation(), 0);
    }

    #[test]
    fn rejects_bad_rings() {
        assert_eq!(Zpn::new(2, 4), Err(PadicError::NotOddPrime(2)));
        assert_eq!(Zpn::new(9, 4), Err(PadicError::NotOddPrime(9)));
        assert_eq!(Zpn::new(3, 0), Err(PadicError::ZeroPrecision));
        assert!(matches!(
            Zpn::new(3, 60),
            Err(PadicError::ModulusTooLarge { .. })
        ));
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(2, ring(3, 3)).unwrap().residue(), 26);
        assert_eq!(teichmuller(1, ring(7, 5)).unwrap().residue(), 1);
        assert_eq!(teichmuller(2, ring(5, 2)).unwrap().residue(), 7);
        assert_eq!(
            teichmuller(6, ring(3, 3)),
            Err(PadicError::NotCoprime { x: 6, p: 3 })
        );
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_generator(ring(3, 3)).residue(), 23);
        assert_eq!(psi_generator(ring(5, 2)).residue(), 17);
        for p in [3u64, 5, 7, 11, 13] {
            let r = ring(p, 6);
            assert_eq!(psi_generator(r).residue() % p, smallest_primitive_root(p));
        }
    }

    #[test]
    fn exact_psi_matches_bounded_psi() {
        for p in [3u64, 5, 7] {
            let exact = psi_generator_exact(p, 30);
            let r = ring(p, 10);
            let reduced = &exact % BigUint::from(r.modulus());
            assert_eq!(
                reduced.iter_u64_digits().next().unwrap_or(0),
                psi_generator(r).residue()
            );
        }
    }

    #[test]
    fn binom_examples() {
        let r = ring(3, 6);
        let minus_one = r.from_i64(-1);
        let b = binom(minus_one, 3).unwrap();
        assert_eq!(b.precision(), 5);
        assert_eq!(b, b.ring().from_i64(-1));

        let r9 = ring(3, 2);
        let half = r9.from_u64(5);
        let b = binom(half, 2).unwrap();
        assert_eq!(b.residue(), 1);
        assert_eq!(b.precision(), 2);

        assert_eq!(binom(r.from_u64(17), 0).unwrap(), r.one());
    }

    #[test]
    fn binom_reports_precision_loss() {
        let r = ring(3, 2);
        assert!(matches!(
            binom(r.from_u64(4), 9),
            Err(PadicError::PrecisionLoss { .. })
        ));
    }

    #[test]
    fn binom_exact_agrees_with_integer_binomials() {
        let r = ring(3, 8);
        let n = BigUint::from(30u32);
        let mut expect: u64 = 1;
        for i in 0..=30u64 {
            let got = binom_exact(r, &n, i).to_int(r).unwrap();
            assert_eq!(got.residue(), expect % r.modulus(), "i = {i}");
            expect = expect * (30 - i) / (i + 1);
        }
        assert!(binom_exact(r, &n, 31).is_zero());
    }

    #[test]
    fn scaled_arithmetic() {
        let r = ring(5, 6);
        let a = PadicScaled::from_int(r.from_u64(50));
        assert_eq!(a.valuation(), Some(2));
        let b = PadicScaled::from_int(r.from_u64(5));
        let q = a.div(&b).unwrap();
        assert_eq!(q.valuation(), Some(1));
        let inv = b.div(&a).unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert_eq!(inv.to_int(r), None);
        assert!(PadicScaled::zero().div(&a).unwrap().is_zero());
        assert_eq!(a.div(&PadicScaled::zero()), None);
    }

    #[test]
    fn inverse_and_signed() {
        let r = ring(7, 3);
        let x = r.from_u64(10);
        assert_eq!(x * x.inv().unwrap(), r.one());
        assert_eq!(r.from_u64(14).inv(), None);
        assert_eq!(r.from_i64(-3).signed(), -3);
        assert_eq!(x.pow_signed(-2).unwrap() * x.pow(2), r.one());
    }
}
