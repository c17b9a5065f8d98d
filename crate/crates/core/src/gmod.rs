//! Finitely generated `Z/p^N`-modules: matrices, Smith normal form,
//! homology, and submodule arithmetic inside `(Z/p^N)^n`.

use std::fmt;

use thiserror::Error;

use crate::padic::{PadicInt, Zpn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GmodError {
    #[error("composite of differentials is nonzero: complex is mis-built")]
    NotAComplex,
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// Dense matrix over `Z/p^N`, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct ModMatrix {
    ring: Zpn,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ModMatrix over {} ({}x{})", self.ring, self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl ModMatrix {
    pub fn zeros(ring: Zpn, rows: usize, cols: usize) -> Self {
        ModMatrix {
            ring,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: Zpn, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// `p^k · I`.
    pub fn scalar_p_power(ring: Zpn, n: usize, k: u32) -> Self {
        let mut m = Self::zeros(ring, n, n);
        if k < ring.precision() {
            let c = ring.p_power(k);
            for i in 0..n {
                m.data[i * n + i] = c;
            }
        }
        m
    }

    pub fn from_fn(ring: Zpn, rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = ring.from_i64(f(i, j)).residue();
            }
        }
        m
    }

    pub fn from_rows(ring: Zpn, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(ring, r, c, |i, j| rows[i][j])
    }

    pub fn ring(&self) -> Zpn {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> PadicInt {
        self.ring.from_u64(self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, x: PadicInt) {
        debug_assert_eq!(x.ring(), self.ring);
        self.data[i * self.cols + j] = x.residue();
    }

    pub(crate) fn raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.raw(i, j) == 0))
    }

    pub fn column(&self, j: usize) -> Vec<PadicInt> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self, idx: &[usize]) -> ModMatrix {
        let mut m = Self::zeros(self.ring, self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + k] = self.raw(i, j);
            }
        }
        m
    }

    pub fn row_range(&self, start: usize, end: usize) -> ModMatrix {
        ModMatrix {
            ring: self.ring,
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut m = Self::zeros(self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.raw(i, j);
            }
        }
        m
    }

    pub fn mul(&self, rhs: &ModMatrix) -> Result<ModMatrix, GmodError> {
        if self.cols != rhs.rows {
            return Err(GmodError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.ring, self.rows, rhs.cols);
        let m = self.ring.modulus() as u128;
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc += self.raw(i, k) as u128 * rhs.raw(k, j) as u128;
                    if acc >= 1 << 126 {
                        acc %= m;
                    }
                }
                out.data[i * rhs.cols + j] = (acc % m) as u64;
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hcat(&self, rhs: &ModMatrix) -> Result<ModMatrix, GmodError> {
        if self.rows != rhs.rows {
            return Err(GmodError::Shape("hcat row mismatch".into()));
        }
        let cols = self.cols + rhs.cols;
        let mut m = Self::zeros(self.ring, self.rows, cols);
        for i in 0..self.rows {
            m.data[i * cols..i * cols + self.cols]
                .copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            m.data[i * cols + self.cols..(i + 1) * cols]
                .copy_from_slice(&rhs.data[i * rhs.cols..(i + 1) * rhs.cols]);
        }
        Ok(m)
    }

    /// Vertical concatenation.
    pub fn vcat(&self, rhs: &ModMatrix) -> Result<ModMatrix, GmodError> {
        if self.cols != rhs.cols {
            return Err(GmodError::Shape("vcat column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(ModMatrix {
            ring: self.ring,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn neg(&self) -> ModMatrix {
        let mut m = self.clone();
        for x in m.data.iter_mut() {
            *x = (-self.ring.from_u64(*x)).residue();
        }
        m
    }

    pub fn sub(&self, rhs: &ModMatrix) -> ModMatrix {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut m = self.clone();
        for (x, &y) in m.data.iter_mut().zip(&rhs.data) {
            *x = (self.ring.from_u64(*x) - self.ring.from_u64(y)).residue();
        }
        m
    }

    /// Reduction to a lower precision of the same prime.
    pub fn reduce(&self, ring: Zpn) -> ModMatrix {
        debug_assert_eq!(ring.prime(), self.ring.prime());
        ModMatrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x % ring.modulus()).collect(),
        }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, rhs: &ModMatrix) -> ModMatrix {
        let mut m = Self::zeros(self.ring, self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i * m.cols + j] = self.raw(i, j);
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                m.data[(i + self.rows) * m.cols + j + self.cols] = rhs.raw(i, j);
            }
        }
        m
    }

    /// Invertible over `Z/p^N` iff square and invertible mod `p`.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && {
            let s = snf(self);
            s.diagonal.len() == self.rows && s.diagonal.iter().all(|&v| v == 0)
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c · row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: u64) {
        if c == 0 {
            return;
        }
        let m = self.ring.modulus() as u128;
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j];
            if s != 0 {
                let d = &mut self.data[dst * self.cols + j];
                *d = ((*d as u128 + c as u128 * s as u128) % m) as u64;
            }
        }
    }

    /// col[dst] += c · col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: u64) {
        if c == 0 {
            return;
        }
        let m = self.ring.modulus() as u128;
        for i in 0..self.rows {
            let s = self.data[i * self.cols + src];
            if s != 0 {
                let d = &mut self.data[i * self.cols + dst];
                *d = ((*d as u128 + c as u128 * s as u128) % m) as u64;
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: u64) {
        let m = self.ring.modulus() as u128;
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x = (*x as u128 * c as u128 % m) as u64;
        }
    }

    fn scale_col(&mut self, j: usize, c: u64) {
        let m = self.ring.modulus() as u128;
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            *x = (*x as u128 * c as u128 % m) as u64;
        }
    }
}

/// Smith normal form `U·A·V = D`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: ModMatrix,
    pub u_inv: ModMatrix,
    pub d: ModMatrix,
    pub v: ModMatrix,
    pub v_inv: ModMatrix,
    /// Valuations of the nonzero diagonal entries, non-decreasing. The
    /// remaining `min(rows, cols) - len` diagonal entries are zero.
    pub diagonal: Vec<u32>,
}

impl Snf {
    /// Valuation of the `k`-th diagonal entry, `N` for zero entries.
    pub fn diagonal_valuation(&self, k: usize) -> u32 {
        self.diagonal
            .get(k)
            .copied()
            .unwrap_or(self.d.ring.precision())
    }
}

/// Smith normal form over the local ring `Z/p^N` by valuation pivoting:
/// the entry of least valuation (ties row-major) is moved to the pivot,
/// normalised to `p^v`, and its row and column cleared.
pub fn snf(a: &ModMatrix) -> Snf {
    let ring = a.ring;
    let (r, c) = (a.rows, a.cols);
    let p = ring.prime();
    let mut d = a.clone();
    let mut u = ModMatrix::identity(ring, r);
    let mut u_inv = ModMatrix::identity(ring, r);
    let mut v = ModMatrix::identity(ring, c);
    let mut v_inv = ModMatrix::identity(ring, c);
    let mut diagonal = Vec::new();
    let modulus = ring.modulus();

    for k in 0..r.min(c) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in k..r {
            for j in k..c {
                let x = d.raw(i, j);
                if x == 0 {
                    continue;
                }
                let val = ring.from_u64(x).valuation();
                if best.is_none_or(|(bv, _, _)| val < bv) {
                    best = Some((val, i, j));
                    if val == diagonal.last().copied().unwrap_or(0) {
                        break 'search;
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };

        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        u_inv.swap_cols(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);
        v_inv.swap_rows(k, pj);

        let pv = p.pow(val);
        // the integer quotient is prime to p, hence a unit at full precision
        let unit = ring.from_u64(d.raw(k, k) / pv);
        let inv = unit.inv().expect("pivot unit");
        d.scale_row(k, inv.residue());
        u.scale_row(k, inv.residue());
        u_inv.scale_col(k, unit.residue());
        debug_assert_eq!(d.raw(k, k), pv);

        for i in k + 1..r {
            let x = d.raw(i, k);
            if x != 0 {
                let q = x / pv;
                let neg_q = (modulus - q % modulus) % modulus;
                d.add_row(i, k, neg_q);
                u.add_row(i, k, neg_q);
                u_inv.add_col(k, i, q);
            }
        }
        for j in k + 1..c {
            let x = d.raw(k, j);
            if x != 0 {
                let q = x / pv;
                let neg_q = (modulus - q % modulus) % modulus;
                d.add_col(j, k, neg_q);
                v.add_col(j, k, neg_q);
                v_inv.add_row(k, j, q);
            }
        }
        diagonal.push(val);
    }
    Snf {
        u,
        u_inv,
        d,
        v,
        v_inv,
        diagonal,
    }
}

/// One cyclic summand of a finitely generated module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    /// `Z/p^e` with `e` below the working precision.
    Torsion(u32),
    /// `Z/p^N` at working precision `N`: possibly a truncated free summand.
    Saturated,
}

/// A finitely generated `Z/p^N`-module as its invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgModule {
    prime: u64,
    precision: u32,
    exponents: Vec<u32>,
}

impl FgModule {
    pub fn zero(ring: Zpn) -> Self {
        FgModule {
            prime: ring.prime(),
            precision: ring.precision(),
            exponents: Vec::new(),
        }
    }

    /// Exponents are clamped to `[1, N]`; zeros are dropped.
    pub fn from_exponents(ring: Zpn, exps: impl IntoIterator<Item = u32>) -> Self {
        let mut exponents: Vec<u32> = exps
            .into_iter()
            .filter(|&e| e > 0)
            .map(|e| e.min(ring.precision()))
            .collect();
        exponents.sort_unstable();
        FgModule {
            prime: ring.prime(),
            precision: ring.precision(),
            exponents,
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn factors(&self) -> Vec<Factor> {
        self.exponents
            .iter()
            .map(|&e| {
                if e == self.precision {
                    Factor::Saturated
                } else {
                    Factor::Torsion(e)
                }
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `log_p` of the order.
    pub fn length(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn saturated_rank(&self) -> usize {
        self.exponents.iter().filter(|&&e| e == self.precision).count()
    }

    /// Exponents of the torsion (non-saturated) summands.
    pub fn torsion_exponents(&self) -> Vec<u32> {
        self.exponents
            .iter()
            .copied()
            .filter(|&e| e < self.precision)
            .collect()
    }

    pub fn direct_sum(&self, other: &FgModule) -> FgModule {
        debug_assert_eq!(self.precision, other.precision);
        let mut exponents = self.exponents.clone();
        exponents.extend_from_slice(&other.exponents);
        exponents.sort_unstable();
        FgModule {
            prime: self.prime,
            precision: self.precision,
            exponents,
        }
    }
}

impl fmt::Display for FgModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .factors()
            .iter()
            .map(|fac| match fac {
                Factor::Torsion(1) => format!("Z/{}", self.prime),
                Factor::Torsion(e) => format!("Z/{}^{}", self.prime, e),
                Factor::Saturated => format!("Z/{}^{}*", self.prime, self.precision),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cokernel of `A: (Z/p^N)^n → (Z/p^N)^m`, read from its Smith form.
pub fn cokernel(a: &ModMatrix) -> FgModule {
    let s = snf(a);
    FgModule::from_exponents(a.ring, (0..a.rows).map(|k| s.diagonal_valuation(k)))
}

fn check_complex(d_in: &ModMatrix, d_out: &ModMatrix) -> Result<(), GmodError> {
    if d_in.rows != d_out.cols {
        return Err(GmodError::Shape(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(GmodError::NotAComplex);
    }
    Ok(())
}

/// `ker(d_out) / im(d_in)` as a `Z/p^N`-module.
///
/// `d_in: C_{-1} → C`, `d_out: C → C_{+1}`; use zero-width or zero-height
/// matrices at the ends of a complex.
pub fn homology(d_in: &ModMatrix, d_out: &ModMatrix) -> Result<FgModule, GmodError> {
    check_complex(d_in, d_out)?;
    let ring = d_out.ring;
    let n = ring.precision();
    let m = d_out.cols;
    let s = snf(d_out);
    // in y = V^{-1} x coordinates, ker d_out = ⊕ p^{N - e_j} Z/p^N
    let e: Vec<u32> = (0..m)
        .map(|j| if j < d_out.rows { s.diagonal_valuation(j) } else { n })
        .collect();
    let w = s.v_inv.mul(d_in)?;
    // z_j = y_j / p^{N - e_j} identifies ker with ⊕ Z/p^{e_j}
    let mut rel = ModMatrix::zeros(ring, m, w.cols + m);
    for j in 0..m {
        let shift = n - e[j];
        for k in 0..w.cols {
            let x = w.raw(j, k);
            debug_assert_eq!(x % ring.p_power(shift), 0);
            rel.data[j * rel.cols + k] = x / ring.p_power(shift);
        }
        if e[j] < n {
            rel.data[j * rel.cols + w.cols + j] = ring.p_power(e[j]);
        }
    }
    let r = snf(&rel);
    Ok(FgModule::from_exponents(
        ring,
        (0..m).map(|k| r.diagonal_valuation(k)),
    ))
}

/// Homology of a complex of free `Z_p`-modules known modulo `p^N`.
///
/// Unlike [`homology`], the kernel is the `Z_p`-kernel: only directions where
/// `d_out` vanishes to full precision count as cycles, so elements of
/// `Z/p^N` killed by truncation (`p^{N-e}` against a `p^e` entry) do not
/// appear. Saturated factors are free summands at this precision.
pub fn lattice_homology(d_in: &ModMatrix, d_out: &ModMatrix) -> Result<FgModule, GmodError> {
    check_complex(d_in, d_out)?;
    let ring = d_out.ring;
    let n = ring.precision();
    let m = d_out.cols;
    let s = snf(d_out);
    let free: Vec<usize> = (0..m)
        .filter(|&j| j >= d_out.rows || s.diagonal_valuation(j) == n)
        .collect();
    let w = s.v_inv.mul(d_in)?;
    let mut sub = ModMatrix::zeros(ring, free.len(), w.cols);
    for (i, &j) in free.iter().enumerate() {
        for k in 0..w.cols {
            sub.data[i * w.cols + k] = w.raw(j, k);
        }
    }
    let r = snf(&sub);
    Ok(FgModule::from_exponents(
        ring,
        (0..free.len()).map(|k| r.diagonal_valuation(k)),
    ))
}

/// A submodule of `(Z/p^N)^n`, stored as a generating set (columns).
#[derive(Clone, Debug)]
pub struct Submodule {
    gens: ModMatrix,
}

impl Submodule {
    pub fn from_generators(gens: ModMatrix) -> Self {
        Submodule { gens }
    }

    pub fn zero(ring: Zpn, n: usize) -> Self {
        Submodule {
            gens: ModMatrix::zeros(ring, n, 0),
        }
    }

    pub fn whole(ring: Zpn, n: usize) -> Self {
        Submodule {
            gens: ModMatrix::identity(ring, n),
        }
    }

    /// `p^f · (Z/p^N)^n`; zero from `f = N` on.
    pub fn p_power(ring: Zpn, n: usize, f: u32) -> Self {
        if f >= ring.precision() {
            return Self::zero(ring, n);
        }
        Submodule {
            gens: ModMatrix::scalar_p_power(ring, n, f),
        }
    }

    pub fn generators(&self) -> &ModMatrix {
        &self.gens
    }

    pub fn ambient_rank(&self) -> usize {
        self.gens.rows
    }

    pub fn ring(&self) -> Zpn {
        self.gens.ring
    }

    /// `log_p |S|`.
    pub fn length(&self) -> u32 {
        let s = snf(&self.gens);
        let n = self.ring().precision();
        s.diagonal.iter().map(|&e| n - e).sum()
    }

    pub fn sum(&self, other: &Submodule) -> Submodule {
        Submodule {
            gens: self.gens.hcat(&other.gens).expect("same ambient rank"),
        }
    }

    /// Image under `a`.
    pub fn image(&self, a: &ModMatrix) -> Submodule {
        Submodule {
            gens: a.mul(&self.gens).expect("compatible shapes"),
        }
    }

    /// Generators of `ker(a)`.
    pub fn kernel(a: &ModMatrix) -> Submodule {
        let ring = a.ring;
        let n = ring.precision();
        let s = snf(a);
        let mut cols: Vec<Vec<u64>> = Vec::new();
        for j in 0..a.cols {
            let e = if j < a.rows { s.diagonal_valuation(j) } else { n };
            if e == 0 {
                continue;
            }
            let scale = ring.from_u64(ring.p_power(n - e));
            cols.push(
                (0..a.cols)
                    .map(|i| (s.v.get(i, j) * scale).residue())
                    .collect(),
            );
        }
        let mut gens = ModMatrix::zeros(ring, a.cols, cols.len());
        for (k, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                gens.data[i * cols.len() + k] = x;
            }
        }
        Submodule { gens }
    }

    /// `{x : a·x ∈ target}`.
    pub fn preimage(a: &ModMatrix, target: &Submodule) -> Submodule {
        let stacked = a.hcat(&target.gens.neg()).expect("same codomain");
        let k = Submodule::kernel(&stacked);
        Submodule {
            gens: k.gens.row_range(0, a.cols),
        }
    }

    pub fn intersect(&self, other: &Submodule) -> Submodule {
        let stacked = self.gens.hcat(&other.gens.neg()).expect("same ambient");
        let k = Submodule::kernel(&stacked);
        let coeffs = k.gens.row_range(0, self.gens.cols);
        Submodule {
            gens: self.gens.mul(&coeffs).expect("shapes"),
        }
    }

    pub fn contains(&self, x: &ModMatrix) -> bool {
        let with = self.sum(&Submodule::from_generators(x.clone()));
        with.length() == self.length()
    }
}
