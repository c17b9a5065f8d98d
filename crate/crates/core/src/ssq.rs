//! The spectral sequence of the two-term complex `∂ = id − ψ: M → M`
//! filtered by powers of `p`.
//!
//! Pages are computed degree by degree from the filtered-complex recipe
//!
//! ```text
//! E_r^{f,c} = (Z_r^f + F^{f+1}) / (B_r^f + F^{f+1}),
//! Z_r^f = F^f ∩ ∂^{-1} F^{f+r},    B_r^f = ∂ F^{f-r+1} ∩ F^f,
//! ```
//!
//! with every subgroup of `(Z/p^N)^n` handled by [`Submodule`]. The
//! differential `d_r` raises the `p`-adic filtration by `r` and the
//! cohomological degree by one, and is read off as the induced map between
//! subquotients.
//!
//! Page numbering follows the Adams convention: the first page is `E_2`
//! (the cohomology of the associated graded) and `d_r` acts on `E_{r+1}`.
//! A class `ζ^ε b^j x` is reported at Adams filtration `f = j + ε`, which
//! places it at chart coordinates `(stem, s) = (t − ε, j + ε)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{self, Echelon, Fq};
use crate::gmod::{snf, ModMatrix, Submodule};
use crate::grpcoh::{CohomologyError, CohomologyReport, PsiModule};
use crate::padic::Zpn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SsError {
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("precision {precision} too low in degree {t}: need at least {needed}")]
    Precision { t: i64, precision: u32, needed: u32 },
    #[error("window error: {0}")]
    Window(String),
    #[error("abutment mismatch at (s, t) = ({s}, {t}): E_infinity gives {e_infinity}, cohomology gives {cohomology}")]
    Mismatch {
        s: u8,
        t: i64,
        e_infinity: String,
        cohomology: String,
    },
}

/// Widest internal-degree window a run accepts.
pub const MAX_WINDOW_SPAN: i64 = 1 << 16;

/// A named class `ζ^ε b^j x` in tridegree `(t, f, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChartClass {
    pub name: String,
    /// Internal degree.
    pub t: i64,
    /// Adams filtration `j + ε`.
    pub f: u32,
    /// Cohomological degree `ε`.
    pub c: u8,
    /// Label of the module generator `x`.
    pub generator: String,
}

impl ChartClass {
    pub fn new(generator: &str, t: i64, b_exponent: u32, zeta: bool) -> Self {
        let mut parts = Vec::new();
        if zeta {
            parts.push("zeta".to_string());
        }
        match b_exponent {
            0 => {}
            1 => parts.push("b".to_string()),
            j => parts.push(format!("b^{j}")),
        }
        if generator != "1" || parts.is_empty() {
            parts.push(generator.to_string());
        }
        ChartClass {
            name: parts.join(" "),
            t,
            f: b_exponent + u32::from(zeta),
            c: u8::from(zeta),
            generator: generator.to_string(),
        }
    }

    /// Exponent of `b`, the `p`-adic filtration of the class.
    pub fn b_exponent(&self) -> u32 {
        self.f - u32::from(self.c)
    }

    pub fn stem(&self) -> i64 {
        self.t - i64::from(self.c)
    }

    pub fn has_zeta(&self) -> bool {
        self.c == 1
    }
}

impl fmt::Display for ChartClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `d_r(source) = coefficient · target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DifferentialRecord {
    /// Length `r`: the jump in `p`-adic filtration.
    pub r: u32,
    pub source: ChartClass,
    pub target: ChartClass,
    /// Nonzero element of `F_p`.
    pub coefficient: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    /// Adams page number, starting at 2.
    pub page: u32,
    pub classes: Vec<ChartClass>,
}

/// Group structure read off `E_∞` by following multiplication by `b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResolvedGroup {
    pub torsion: Vec<u32>,
    pub saturated: usize,
}

impl ResolvedGroup {
    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.saturated == 0
    }

    /// `log_p` of the order at the working precision.
    pub fn length(&self, precision: u32) -> u32 {
        self.torsion.iter().sum::<u32>() + self.saturated as u32 * precision
    }
}

/// Output of a spectral sequence run.
#[derive(Clone, Debug)]
pub struct SsRun {
    pub prime: u64,
    pub precision: u32,
    pub t_min: i64,
    pub t_max: i64,
    pub pages: Vec<Page>,
    pub differentials: Vec<DifferentialRecord>,
    /// Permanent classes below the precision horizon.
    pub e_infinity: Vec<ChartClass>,
    /// Permanent cycles whose survival may be an artifact of truncation:
    /// their differential would land at or above filtration `N`.
    pub horizon: Vec<ChartClass>,
    /// Extensions of `E_∞` resolved by `b`-multiplication, keyed by `(s, t)`.
    pub extensions: BTreeMap<(u8, i64), ResolvedGroup>,
    degrees: BTreeMap<i64, DegreeRun>,
}

/// Subquotient `num / den` of `F_p^n`, with a basis of a complement to
/// `den` in `num` in reduced echelon form.
#[derive(Clone, Debug)]
struct Subquotient {
    den: Echelon,
    basis: Echelon,
}

impl Subquotient {
    fn new(fp: &Fq, num: &[Vec<u16>], den: &[Vec<u16>]) -> Self {
        let den = field::rref(fp, den);
        let reduced: Vec<Vec<u16>> = num
            .iter()
            .map(|v| {
                let mut w = v.clone();
                den.reduce(fp, &mut w);
                w
            })
            .collect();
        let basis = field::rref(fp, &reduced);
        Subquotient { den, basis }
    }

    fn dim(&self) -> usize {
        self.basis.rank()
    }

    /// Coordinates of `v ∈ num` in the complement basis.
    fn coords(&self, fp: &Fq, v: &[u16]) -> Vec<u16> {
        let mut w = v.to_vec();
        self.den.reduce(fp, &mut w);
        let mut out = Vec::with_capacity(self.dim());
        for (row, &piv) in self.basis.rows.iter().zip(&self.basis.pivots) {
            let c = w[piv];
            out.push(c);
            if c != 0 {
                field::axpy(fp, &mut w, fp.neg(c), row);
            }
        }
        debug_assert!(w.iter().all(|&x| x == 0), "vector outside numerator");
        out
    }
}

/// Induced map between two subquotients; `matrix[i][j]` is the coefficient
/// of target basis vector `i` in the image of source basis vector `j`.
#[derive(Clone, Debug)]
struct InducedMap {
    source_f: u32,
    matrix: Vec<Vec<u16>>,
}

#[derive(Clone, Debug)]
struct PageDegree {
    /// `sub[c][f]`
    sub: [Vec<Subquotient>; 2],
    /// `d_r` out of `(f, 0)`, one entry per source filtration with a target.
    diffs: Vec<InducedMap>,
}

#[derive(Clone, Debug)]
struct DegreeRun {
    labels: Vec<String>,
    /// `p`-adic filtration from which `c = 0` survivors are uncertified.
    horizon: u32,
    /// Index `r - 1` holds the data for the page carrying `d_r`; the last
    /// entry (`r = N`) is `E_∞`.
    pages: Vec<PageDegree>,
}

/// The `p`-adic filtration spectral sequence of a ψ-module.
pub struct FilteredComplexSs<'a> {
    module: &'a PsiModule,
    probe: Option<&'a PsiModule>,
    fp: Fq,
}

impl<'a> FilteredComplexSs<'a> {
    /// `probe` is the same module at a higher precision; when given, a
    /// differential that is invisible at the working precision but visible
    /// in the probe is reported as a precision failure.
    pub fn new(module: &'a PsiModule, probe: Option<&'a PsiModule>) -> Result<Self, SsError> {
        let ring = module.ring();
        let fp = Fq::new(ring.prime()).map_err(|e| SsError::Window(e.to_string()))?;
        if let Some(pr) = probe {
            if pr.ring().prime() != ring.prime() || pr.ring().precision() <= ring.precision() {
                return Err(SsError::Window("probe must have a higher precision".into()));
            }
        }
        Ok(FilteredComplexSs { module, probe, fp })
    }

    fn ring(&self) -> Zpn {
        self.module.ring()
    }

    /// Largest finite valuation of `∂` in degree `t`, checked against the
    /// precision requirement `N ≥ ℓ + 2`.
    fn longest_possible(&self, t: i64, d: &ModMatrix) -> Result<u32, SsError> {
        let n = self.ring().precision();
        let s = snf(d);
        let ell = s.diagonal.iter().copied().filter(|&v| v < n).max().unwrap_or(0);
        if ell + 2 > n {
            return Err(SsError::Precision {
                t,
                precision: n,
                needed: ell + 2,
            });
        }
        if let Some(piece) = self.probe.and_then(|m| m.piece(t)) {
            let hi = snf(&piece.boundary());
            let nhi = piece.psi.ring().precision();
            let rank = (0..d.rows().min(d.cols()))
                .map(|k| s.diagonal.get(k).copied().unwrap_or(n))
                .collect::<Vec<_>>();
            for (k, &v_lo) in rank.iter().enumerate() {
                let v_hi = hi.diagonal.get(k).copied().unwrap_or(nhi);
                if v_lo == n && v_hi < nhi {
                    return Err(SsError::Precision {
                        t,
                        precision: n,
                        needed: v_hi + 2,
                    });
                }
            }
        }
        Ok(ell)
    }

    fn reduce_at(&self, s: &Submodule, f: u32) -> Vec<Vec<u16>> {
        let g = s.generators();
        let pf = self.ring().p_power(f);
        let p = self.ring().prime();
        (0..g.cols())
            .map(|j| {
                (0..g.rows())
                    .map(|i| {
                        let x = g.get(i, j).residue();
                        debug_assert_eq!(x % pf, 0, "generator outside F^{f}");
                        ((x / pf) % p) as u16
                    })
                    .collect::<Vec<u16>>()
            })
            .collect()
    }

    fn filt(&self, n: usize, f: i64) -> Submodule {
        let ring = self.ring();
        if f <= 0 {
            Submodule::whole(ring, n)
        } else {
            Submodule::p_power(ring, n, f as u32)
        }
    }

    fn run_degree(&self, t: i64, labels: &[String], d: &ModMatrix) -> Result<DegreeRun, SsError> {
        let ring = self.ring();
        let n = ring.precision();
        let rank = labels.len();
        let ell = self.longest_possible(t, d)?;
        let fp = &self.fp;
        let all: Vec<Vec<u16>> = (0..rank)
            .map(|i| (0..rank).map(|j| u16::from(i == j)).collect())
            .collect();

        let mut pages = Vec::new();
        for r in 1..=n {
            let mut sub0 = Vec::new();
            let mut sub1 = Vec::new();
            let mut cycles = Vec::new();
            for f in 0..n {
                let ff = self.filt(rank, f as i64);
                let target = self.filt(rank, (f + r) as i64);
                let z = ff.intersect(&Submodule::preimage(d, &target));
                let zr = self.reduce_at(&z, f);
                sub0.push(Subquotient::new(fp, &zr, &[]));
                cycles.push((z, zr));

                let src = self.filt(rank, f as i64 - r as i64 + 1);
                let b = src.image(d).intersect(&ff);
                sub1.push(Subquotient::new(fp, &all, &self.reduce_at(&b, f)));
            }
            let mut diffs = Vec::new();
            for f in 0..n {
                let tf = f + r;
                if tf >= n || sub0[f as usize].dim() == 0 || sub1[tf as usize].dim() == 0 {
                    continue;
                }
                let (z, zr) = &cycles[f as usize];
                let src = &sub0[f as usize];
                let dst = &sub1[tf as usize];
                let mut matrix = vec![vec![0u16; src.dim()]; dst.dim()];
                for (j, basis_row) in src.basis.rows.iter().enumerate() {
                    let lambda =
                        field::solve(fp, zr, basis_row).expect("basis vector lies in the cycles");
                    let x = lift_combination(ring, z.generators(), &lambda);
                    let y = d.mul(&x).expect("shapes");
                    let v = self.reduce_at(&Submodule::from_generators(y), tf).remove(0);
                    for (i, c) in dst.coords(fp, &v).into_iter().enumerate() {
                        matrix[i][j] = c;
                    }
                }
                diffs.push(InducedMap { source_f: f, matrix });
            }
            pages.push(PageDegree {
                sub: [sub0, sub1],
                diffs,
            });
        }
        Ok(DegreeRun {
            labels: labels.to_vec(),
            horizon: n - ell,
            pages,
        })
    }

    /// Runs every degree of the module.
    pub fn run(&self) -> Result<SsRun, SsError> {
        let ring = self.ring();
        let n = ring.precision();
        let (t_min, t_max) = self.module.window();
        let mut degrees = BTreeMap::new();
        for (t, piece) in self.module.degrees() {
            let run = self.run_degree(t, &piece.labels, &piece.boundary())?;
            degrees.insert(t, run);
        }

        let class_of = |t: i64, dr: &DegreeRun, c: usize, f: u32, piv: usize| {
            ChartClass::new(&dr.labels[piv], t, f, c == 1)
        };

        // pages: one per r, E_{r+1}
        let mut pages = Vec::new();
        for r in 1..=n {
            let mut classes = Vec::new();
            for (&t, dr) in &degrees {
                let pd = &dr.pages[r as usize - 1];
                for c in 0..2 {
                    for f in 0..n {
                        let sq = &pd.sub[c][f as usize];
                        for &piv in &sq.basis.pivots {
                            classes.push(class_of(t, dr, c, f, piv));
                        }
                    }
                }
            }
            classes.sort_by(class_order);
            pages.push(Page {
                page: r + 1,
                classes,
            });
        }
        // drop trailing pages equal to E_∞
        while pages.len() >= 2 && pages[pages.len() - 1].classes == pages[pages.len() - 2].classes {
            pages.pop();
        }

        let mut differentials = Vec::new();
        for (&t, dr) in &degrees {
            for (ri, pd) in dr.pages.iter().enumerate() {
                let r = ri as u32 + 1;
                for im in &pd.diffs {
                    let src = &pd.sub[0][im.source_f as usize];
                    let dst = &pd.sub[1][(im.source_f + r) as usize];
                    for (i, row) in im.matrix.iter().enumerate() {
                        for (j, &coef) in row.iter().enumerate() {
                            if coef != 0 {
                                differentials.push(DifferentialRecord {
                                    r,
                                    source: class_of(t, dr, 0, im.source_f, src.basis.pivots[j]),
                                    target: class_of(
                                        t,
                                        dr,
                                        1,
                                        im.source_f + r,
                                        dst.basis.pivots[i],
                                    ),
                                    coefficient: coef as u64,
                                });
                            }
                        }
                    }
                }
            }
        }
        differentials.sort_by(|a, b| {
            class_order(&a.source, &b.source)
                .then(a.r.cmp(&b.r))
                .then(class_order(&a.target, &b.target))
        });

        let mut e_infinity = Vec::new();
        let mut horizon = Vec::new();
        let mut extensions = BTreeMap::new();
        for (&t, dr) in &degrees {
            let last = dr.pages.last().expect("at least one page");
            for c in 0..2usize {
                for f in 0..n {
                    for &piv in &last.sub[c][f as usize].basis.pivots {
                        let class = class_of(t, dr, c, f, piv);
                        if c == 0 && f >= dr.horizon {
                            horizon.push(class);
                        } else {
                            e_infinity.push(class);
                        }
                    }
                }
                let top = if c == 0 { dr.horizon } else { n };
                extensions.insert((c as u8, t), resolve_extension(&self.fp, &last.sub[c], top));
            }
        }
        e_infinity.sort_by(class_order);
        horizon.sort_by(class_order);

        Ok(SsRun {
            prime: ring.prime(),
            precision: n,
            t_min,
            t_max,
            pages,
            differentials,
            e_infinity,
            horizon,
            extensions,
            degrees,
        })
    }

    /// The `E_2` page alone.
    pub fn e2(&self) -> Result<Vec<ChartClass>, SsError> {
        let n = self.ring().precision();
        let mut classes = Vec::new();
        for (t, piece) in self.module.degrees() {
            let d = piece.boundary();
            let rank = piece.rank();
            let all: Vec<Vec<u16>> = (0..rank)
                .map(|i| (0..rank).map(|j| u16::from(i == j)).collect())
                .collect();
            for f in 0..n {
                let ff = self.filt(rank, f as i64);
                let next = self.filt(rank, f as i64 + 1);
                let z = ff.intersect(&Submodule::preimage(&d, &next));
                let sq0 = Subquotient::new(&self.fp, &self.reduce_at(&z, f), &[]);
                let b = ff.image(&d).intersect(&ff);
                let sq1 = Subquotient::new(&self.fp, &all, &self.reduce_at(&b, f));
                for &piv in &sq0.basis.pivots {
                    classes.push(ChartClass::new(&piece.labels[piv], t, f, false));
                }
                for &piv in &sq1.basis.pivots {
                    classes.push(ChartClass::new(&piece.labels[piv], t, f, true));
                }
            }
        }
        classes.sort_by(class_order);
        Ok(classes)
    }
}

/// `Σ λ_j g_j` for the generator columns `g_j`.
fn lift_combination(ring: Zpn, g: &ModMatrix, lambda: &[u16]) -> ModMatrix {
    let coeffs = ModMatrix::from_fn(ring, g.cols(), 1, |j, _| i64::from(lambda[j]));
    g.mul(&coeffs).expect("shapes")
}

/// Ordering used for every class listing: by internal degree, then
/// cohomological degree, filtration and name.
pub fn class_order(a: &ChartClass, b: &ChartClass) -> std::cmp::Ordering {
    (a.t, a.c, a.f, &a.name).cmp(&(b.t, b.c, b.f, &b.name))
}

/// Interval decomposition of `b` acting on `⊕_{f < top} E^f`; intervals
/// reaching `top − 1` are saturated (free at this precision).
fn resolve_extension(fp: &Fq, subs: &[Subquotient], top: u32) -> ResolvedGroup {
    let top = top as usize;
    if top == 0 {
        return ResolvedGroup::default();
    }
    // b: E^f → E^{f+1} is induced by the identity on reduced vectors
    let bmaps: Vec<Vec<Vec<u16>>> = (0..top.saturating_sub(1))
        .map(|f| {
            let src = &subs[f];
            let dst = &subs[f + 1];
            let mut m = vec![vec![0u16; src.dim()]; dst.dim()];
            for (j, row) in src.basis.rows.iter().enumerate() {
                for (i, c) in dst.coords(fp, row).into_iter().enumerate() {
                    m[i][j] = c;
                }
            }
            m
        })
        .collect();
    // ρ(a, b) = rank of the composite E^a → E^b
    let rho = |a: i64, b: i64| -> usize {
        if a < 0 || b >= top as i64 || a > b {
            return 0;
        }
        let (a, b) = (a as usize, b as usize);
        let mut acc: Vec<Vec<u16>> = (0..subs[a].dim())
            .map(|i| (0..subs[a].dim()).map(|j| u16::from(i == j)).collect())
            .collect();
        for m in &bmaps[a..b] {
            acc = mat_mul(fp, m, &acc, subs[a].dim());
        }
        if acc.is_empty() {
            return 0;
        }
        // rank on rows
        field::rank(fp, acc)
    };
    let mut out = ResolvedGroup::default();
    for a in 0..top as i64 {
        for b in a..top as i64 {
            let mult = rho(a, b) as i64 - rho(a - 1, b) as i64 - rho(a, b + 1) as i64
                + rho(a - 1, b + 1) as i64;
            debug_assert!(mult >= 0);
            for _ in 0..mult.max(0) {
                if b == top as i64 - 1 {
                    out.saturated += 1;
                } else {
                    out.torsion.push((b - a + 1) as u32);
                }
            }
        }
    }
    out.torsion.sort_unstable();
    out
}

fn mat_mul(fp: &Fq, a: &[Vec<u16>], b: &[Vec<u16>], b_cols: usize) -> Vec<Vec<u16>> {
    a.iter()
        .map(|row| {
            let mut out = vec![0u16; b_cols];
            for (k, &x) in row.iter().enumerate() {
                if x != 0 {
                    field::axpy(fp, &mut out, x, &b[k]);
                }
            }
            out
        })
        .collect()
}

impl SsRun {
    /// Classes of the page `E_page`; pages past the last stored one equal `E_∞`.
    pub fn page(&self, page: u32) -> Option<&Page> {
        if page < 2 {
            return None;
        }
        self.pages
            .iter()
            .find(|p| p.page == page)
            .or_else(|| self.pages.last())
    }

    /// Dimension of `E_page` in tridegree `(t, f, c)` (Adams filtration `f`).
    pub fn dim(&self, page: u32, t: i64, f: u32, c: u8) -> usize {
        self.page(page).map_or(0, |p| {
            p.classes
                .iter()
                .filter(|k| k.t == t && k.f == f && k.c == c)
                .count()
        })
    }

    /// Checks `E_{r+1} = H(E_r, d_r)` dimension by dimension, from the
    /// differential matrices against the independently computed next page.
    pub fn check_page_recursion(&self) -> Result<(), String> {
        let fp = Fq::new(self.prime).map_err(|e| e.to_string())?;
        for (&t, dr) in &self.degrees {
            for ri in 0..dr.pages.len().saturating_sub(1) {
                let r = ri as u32 + 1;
                let pd = &dr.pages[ri];
                let next = &dr.pages[ri + 1];
                let n = pd.sub[0].len();
                let mut rank_out = vec![0usize; n];
                let mut rank_in = vec![0usize; n];
                for im in &pd.diffs {
                    let rk = if im.matrix.is_empty() {
                        0
                    } else {
                        field::rank(&fp, im.matrix.clone())
                    };
                    rank_out[im.source_f as usize] = rk;
                    rank_in[(im.source_f + r) as usize] = rk;
                }
                for f in 0..n {
                    let want0 = pd.sub[0][f].dim() - rank_out[f];
                    let want1 = pd.sub[1][f].dim() - rank_in[f];
                    if next.sub[0][f].dim() != want0 || next.sub[1][f].dim() != want1 {
                        return Err(format!(
                            "t = {t}, r = {r}, f = {f}: expected ({want0}, {want1}), got ({}, {})",
                            next.sub[0][f].dim(),
                            next.sub[1][f].dim()
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks `d_r ∘ d_r = 0` on every page. Sources of `d_r` sit in
    /// cohomological degree 0 and targets in degree 1, where every
    /// differential vanishes, so each composite is a product with a zero map.
    pub fn check_d_squared(&self) -> Result<(), String> {
        let fp = Fq::new(self.prime).map_err(|e| e.to_string())?;
        for (&t, dr) in &self.degrees {
            for (ri, pd) in dr.pages.iter().enumerate() {
                let r = ri as u32 + 1;
                for first in &pd.diffs {
                    let mid = first.source_f + r;
                    // differentials leaving cohomological degree 1 land in C^2 = 0
                    let second: Vec<Vec<u16>> = Vec::new();
                    let composite = mat_mul(&fp, &second, &first.matrix, pd.sub[0][first.source_f as usize].dim());
                    if composite.iter().flatten().any(|&x| x != 0) {
                        return Err(format!("d^2 != 0 at t = {t}, r = {r}, f = {mid}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Compares `E_∞`, with extensions resolved by `b`, against directly
    /// computed cohomology on the same window.
    pub fn abutment_check(&self, cohomology: &CohomologyReport) -> Result<Vec<AbutmentLine>, SsError> {
        let mut lines = Vec::new();
        for (&(s, t), resolved) in &self.extensions {
            let h = cohomology.get(s, t);
            let ok = h.torsion == resolved.torsion && h.saturated == resolved.saturated;
            if !ok {
                return Err(SsError::Mismatch {
                    s,
                    t,
                    e_infinity: format!("{resolved:?}"),
                    cohomology: h.render(self.prime, self.precision),
                });
            }
            let survivors = self
                .e_infinity
                .iter()
                .filter(|k| k.t == t && k.c == s)
                .count();
            lines.push(AbutmentLine {
                s,
                t,
                survivors,
                group: resolved.clone(),
            });
        }
        Ok(lines)
    }

    /// Tower of `E_r` in Adams bidegree `(s, t)` for `s = f`, across pages.
    pub fn complete_convergence_probe(&self, s: u32, t: i64) -> ConvergenceProbe {
        let dims: Vec<(u32, usize)> = self
            .pages
            .iter()
            .map(|p| {
                (
                    p.page,
                    p.classes.iter().filter(|k| k.t == t && k.f == s).count(),
                )
            })
            .collect();
        let lim = dims.last().map_or(0, |&(_, d)| d);
        ConvergenceProbe {
            dims,
            lim_dim: lim,
            // finite-dimensional pages satisfy Mittag-Leffler
            lim1_nonzero: false,
        }
    }

    /// JSON page dump with stable key order.
    pub fn dump(&self) -> PageDump {
        let class = |k: &ChartClass| ClassDump {
            name: k.name.clone(),
            t: k.t,
            f: k.f,
            c: k.c,
        };
        PageDump {
            prime: self.prime,
            precision: self.precision,
            window: WindowDump {
                t_min: self.t_min,
                t_max: self.t_max,
            },
            pages: self
                .pages
                .iter()
                .map(|p| PageEntry {
                    r: p.page,
                    classes: p.classes.iter().map(class).collect(),
                })
                .collect(),
            differentials: self
                .differentials
                .iter()
                .map(|d| DifferentialDump {
                    r: d.r,
                    source: d.source.name.clone(),
                    target: d.target.name.clone(),
                })
                .collect(),
            e_infinity: self.e_infinity.iter().map(class).collect(),
            precision_horizon: self.horizon.iter().map(class).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbutmentLine {
    pub s: u8,
    pub t: i64,
    pub survivors: usize,
    pub group: ResolvedGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceProbe {
    /// `(page, dim E_page)`.
    pub dims: Vec<(u32, usize)>,
    pub lim_dim: usize,
    pub lim1_nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDump {
    pub prime: u64,
    pub precision: u32,
    pub window: WindowDump,
    pub pages: Vec<PageEntry>,
    pub differentials: Vec<DifferentialDump>,
    pub e_infinity: Vec<ClassDump>,
    pub precision_horizon: Vec<ClassDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowDump {
    pub t_min: i64,
    pub t_max: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageEntry {
    pub r: u32,
    pub classes: Vec<ClassDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDump {
    pub name: String,
    pub t: i64,
    pub f: u32,
    pub c: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialDump {
    pub r: u32,
    pub source: String,
    pub target: String,
}

fn check_window(t_min: i64, t_max: i64) -> Result<(), SsError> {
    if t_min > t_max {
        return Err(SsError::Window(format!("empty window [{t_min}, {t_max}]")));
    }
    if t_max - t_min > MAX_WINDOW_SPAN {
        return Err(SsError::Window(format!(
            "window [{t_min}, {t_max}] exceeds {MAX_WINDOW_SPAN} degrees"
        )));
    }
    Ok(())
}

/// The spectral sequence for the sphere: `M = E_*` on `[t_min, t_max]`,
/// probed two digits above the working precision.
pub fn run(ring: Zpn, t_min: i64, t_max: i64) -> Result<SsRun, SsError> {
    check_window(t_min, t_max)?;
    let module = PsiModule::lubin_tate(ring, t_min, t_max)?;
    let probe_ring = ring.with_precision(ring.precision() + 2).map_err(CohomologyError::from)?;
    let probe = PsiModule::lubin_tate(probe_ring, t_min, t_max)?;
    FilteredComplexSs::new(&module, Some(&probe))?.run()
}

/// `E_2` classes of the sphere on `[t_min, t_max]` with Adams filtration at
/// most `f_max`.
pub fn e2_page(ring: Zpn, t_min: i64, t_max: i64, f_max: u32) -> Result<Vec<ChartClass>, SsError> {
    check_window(t_min, t_max)?;
    let module = PsiModule::lubin_tate(ring, t_min, t_max)?;
    let mut classes = FilteredComplexSs::new(&module, None)?.e2()?;
    classes.retain(|k| k.f <= f_max);
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: u32) -> Zpn {
        Zpn::new(p, n).unwrap()
    }

    fn names(classes: &[ChartClass]) -> Vec<&str> {
        classes.iter().map(|k| k.name.as_str()).collect()
    }

    #[test]
    fn class_names() {
        assert_eq!(ChartClass::new("1", 0, 0, false).name, "1");
        assert_eq!(ChartClass::new("1", 0, 0, true).name, "zeta");
        assert_eq!(ChartClass::new("1", 0, 2, false).name, "b^2");
        assert_eq!(ChartClass::new("v_1^3", 12, 2, true).name, "zeta b^2 v_1^3");
        let k = ChartClass::new("v_1", 4, 1, true);
        assert_eq!((k.f, k.c, k.stem(), k.b_exponent()), (2, 1, 3, 1));
    }

    #[test]
    fn e2_bottom_corner() {
        let e2 = e2_page(ring(3, 6), 0, 0, 2).unwrap();
        assert_eq!(names(&e2), vec!["1", "b", "b^2", "zeta", "zeta b"]);
        assert!(e2_page(ring(3, 6), 2, 2, 5).unwrap().is_empty());
        let e2 = e2_page(ring(5, 6), 8, 8, 0).unwrap();
        assert_eq!(names(&e2), vec!["v_1"]);
    }

    #[test]
    fn first_differentials_at_three() {
        let out = run(ring(3, 8), 0, 12).unwrap();
        let find = |src: &str| {
            out.differentials
                .iter()
                .find(|d| d.source.name == src)
                .map(|d| (d.r, d.target.name.clone()))
        };
        assert_eq!(find("v_1"), Some((1, "zeta b v_1".into())));
        assert_eq!(find("v_1^2"), Some((1, "zeta b v_1^2".into())));
        assert_eq!(find("v_1^3"), Some((2, "zeta b^2 v_1^3".into())));
        assert_eq!(find("1"), None);
        out.check_page_recursion().unwrap();
        out.check_d_squared().unwrap();
    }

    #[test]
    fn e_infinity_resolves_to_cyclic_groups() {
        let out = run(ring(3, 8), 0, 12).unwrap();
        assert_eq!(
            out.extensions[&(1, 12)],
            ResolvedGroup {
                torsion: vec![2],
                saturated: 0
            }
        );
        assert_eq!(out.extensions[&(1, 0)].saturated, 1);
        assert_eq!(out.extensions[&(0, 0)].saturated, 1);
        assert!(out.extensions[&(0, 4)].is_zero());
        assert!(out.extensions[&(1, 2)].is_zero());
        // b^7 v_1 survives only because its target is beyond filtration 8
        assert!(out.horizon.iter().any(|k| k.name == "b^7 v_1"));
    }

    #[test]
    fn precision_failure_is_detected() {
        // v_1^9 at p = 3 supports d_3, which needs N ≥ 5
        let err = run(ring(3, 4), 36, 36).unwrap_err();
        assert!(matches!(err, SsError::Precision { t: 36, .. }), "{err:?}");
        // v_1^27 at N = 3: ∂ vanishes mod 27, so only the probe sees it
        let err = run(ring(3, 3), 108, 108).unwrap_err();
        assert!(matches!(err, SsError::Precision { t: 108, .. }), "{err:?}");
    }

    #[test]
    fn window_errors() {
        assert!(matches!(run(ring(3, 6), 4, 0), Err(SsError::Window(_))));
        assert!(matches!(
            run(ring(3, 6), 0, MAX_WINDOW_SPAN + 2),
            Err(SsError::Window(_))
        ));
    }

    #[test]
    fn convergence_probe_on_sphere() {
        let out = run(ring(3, 6), 0, 4).unwrap();
        let probe = out.complete_convergence_probe(0, 4);
        assert_eq!(probe.dims.first(), Some(&(2, 1)));
        assert_eq!(probe.lim_dim, 0);
        assert!(!probe.lim1_nonzero);
        let probe = out.complete_convergence_probe(0, 0);
        assert!(probe.dims.iter().all(|&(_, d)| d == 1));
    }
}
