//! Continuous cohomology of `Z_p^×` through the two-term complex
//! `∂ = id − ψ_*: M → M`, where `ψ` is the topological generator.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::gmod::{lattice_homology, FgModule, GmodError, ModMatrix};
use crate::padic::{psi_generator, vp, PadicError, Zpn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Gmod(#[from] GmodError),
    #[error("psi does not act invertibly in degree {0}")]
    NotInvertible(i64),
    #[error("precision {precision} is too low: need at least {needed}")]
    Precision { precision: u32, needed: u32 },
    #[error("invalid degree window [{0}, {1}]")]
    Window(i64, i64),
    #[error("torsion in degree {t} changed between precisions: {low} vs {high}")]
    Unstable { t: i64, low: String, high: String },
}

/// One internal degree of a ψ-module: named generators and the matrix of `ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreePiece {
    pub labels: Vec<String>,
    pub psi: ModMatrix,
}

impl DegreePiece {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    /// The differential `id − ψ`.
    pub fn boundary(&self) -> ModMatrix {
        ModMatrix::identity(self.psi.ring(), self.rank()).sub(&self.psi)
    }
}

/// A graded `Z/p^N`-module with an action of the generator `ψ`, finitely
/// generated in every degree of a window.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiModule {
    ring: Zpn,
    t_min: i64,
    t_max: i64,
    pieces: BTreeMap<i64, DegreePiece>,
}

impl PsiModule {
    /// Degrees outside `pieces` but inside the window are zero.
    pub fn new(
        ring: Zpn,
        t_min: i64,
        t_max: i64,
        pieces: BTreeMap<i64, DegreePiece>,
    ) -> Result<Self, CohomologyError> {
        if t_min > t_max {
            return Err(CohomologyError::Window(t_min, t_max));
        }
        for (&t, piece) in &pieces {
            if t < t_min || t > t_max {
                return Err(CohomologyError::Window(t_min, t_max));
            }
            if piece.psi.rows() != piece.rank()
                || piece.psi.cols() != piece.rank()
                || piece.psi.ring() != ring
            {
                return Err(GmodError::Shape(format!("psi matrix in degree {t}")).into());
            }
            if !piece.psi.is_invertible() {
                return Err(CohomologyError::NotInvertible(t));
            }
        }
        Ok(PsiModule {
            ring,
            t_min,
            t_max,
            pieces,
        })
    }

    /// `E_* = Z_p[u^{±1}]` with `|u| = 2` and `ψ_*(u) = ψu`, on even degrees
    /// of `[t_min, t_max]`. Generators `u^j` with `(p−1) | j` are labelled as
    /// powers of `v_1 = u^{p−1}`.
    pub fn lubin_tate(ring: Zpn, t_min: i64, t_max: i64) -> Result<Self, CohomologyError> {
        if t_min > t_max {
            return Err(CohomologyError::Window(t_min, t_max));
        }
        let psi = psi_generator(ring);
        let p = ring.prime() as i64;
        let mut pieces = BTreeMap::new();
        for t in (t_min..=t_max).filter(|t| t.rem_euclid(2) == 0) {
            let j = t / 2;
            let scalar = psi.pow_signed(j).expect("unit");
            let label = if j % (p - 1) == 0 {
                v1_label(j / (p - 1))
            } else {
                format!("u^{j}")
            };
            let mut m = ModMatrix::zeros(ring, 1, 1);
            m.set(0, 0, scalar);
            pieces.insert(
                t,
                DegreePiece {
                    labels: vec![label],
                    psi: m,
                },
            );
        }
        PsiModule::new(ring, t_min, t_max, pieces)
    }

    /// The character `Q_p(k)`'s lattice `Z_p(k)`: rank one in degree 0 with
    /// `ψ` acting by `ψ^k`.
    pub fn character(ring: Zpn, k: i64) -> Self {
        let mut m = ModMatrix::zeros(ring, 1, 1);
        m.set(0, 0, psi_generator(ring).pow_signed(k).expect("unit"));
        let mut pieces = BTreeMap::new();
        pieces.insert(
            0,
            DegreePiece {
                labels: vec![format!("b^{k}")],
                psi: m,
            },
        );
        PsiModule {
            ring,
            t_min: 0,
            t_max: 0,
            pieces,
        }
    }

    pub fn ring(&self) -> Zpn {
        self.ring
    }

    pub fn window(&self) -> (i64, i64) {
        (self.t_min, self.t_max)
    }

    pub fn piece(&self, t: i64) -> Option<&DegreePiece> {
        self.pieces.get(&t)
    }

    pub fn degrees(&self) -> impl Iterator<Item = (i64, &DegreePiece)> {
        self.pieces.iter().map(|(&t, p)| (t, p))
    }

    pub fn direct_sum(&self, other: &PsiModule) -> Result<PsiModule, CohomologyError> {
        let t_min = self.t_min.min(other.t_min);
        let t_max = self.t_max.max(other.t_max);
        let mut pieces = self.pieces.clone();
        for (&t, piece) in &other.pieces {
            pieces
                .entry(t)
                .and_modify(|mine| {
                    mine.labels.extend(piece.labels.iter().cloned());
                    mine.psi = mine.psi.direct_sum(&piece.psi);
                })
                .or_insert_with(|| piece.clone());
        }
        PsiModule::new(self.ring, t_min, t_max, pieces)
    }
}

pub(crate) fn v1_label(k: i64) -> String {
    match k {
        0 => "1".to_string(),
        1 => "v_1".to_string(),
        _ => format!("v_1^{k}"),
    }
}

/// A cohomology group: precision-stable torsion plus saturated summands,
/// the latter promoted to `Z_p` when saturation persisted across two
/// precisions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CohomologyGroup {
    pub torsion: Vec<u32>,
    pub saturated: usize,
    pub free_certified: bool,
}

impl CohomologyGroup {
    fn from_module(m: &FgModule) -> Self {
        CohomologyGroup {
            torsion: m.torsion_exponents(),
            saturated: m.saturated_rank(),
            free_certified: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.saturated == 0
    }

    /// Render with a prime; `Z_p` for certified free summands, `Z/p^N*` for
    /// saturated factors seen at a single precision.
    pub fn render(&self, p: u64, precision: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for _ in 0..self.saturated {
            parts.push(if self.free_certified {
                format!("Z_{p}")
            } else {
                format!("Z/{p}^{precision}*")
            });
        }
        for &e in &self.torsion {
            parts.push(if e == 1 {
                format!("Z/{p}")
            } else {
                format!("Z/{p}^{e}")
            });
        }
        parts.join(" + ")
    }
}

/// `H^{s,t}` for `s ∈ {0, 1}` over a window of internal degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyReport {
    pub prime: u64,
    pub precision: u32,
    pub groups: BTreeMap<(u8, i64), CohomologyGroup>,
}

impl CohomologyReport {
    /// Zero outside `s ∈ {0, 1}` and outside the computed degrees.
    pub fn get(&self, s: u8, t: i64) -> CohomologyGroup {
        self.groups.get(&(s, t)).cloned().unwrap_or(CohomologyGroup {
            torsion: Vec::new(),
            saturated: 0,
            free_certified: false,
        })
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&(u8, i64), &CohomologyGroup)> {
        self.groups.iter().filter(|(_, g)| !g.is_zero())
    }
}

impl fmt::Display for CohomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "s\tt\tgroup")?;
        for ((s, t), g) in self.nonzero() {
            writeln!(f, "{s}\t{t}\t{}", g.render(self.prime, self.precision))?;
        }
        Ok(())
    }
}

/// `H^0 = ker ∂` and `H^1 = coker ∂` in every degree of `M`.
///
/// Kernels are taken in the `Z_p`-lattice sense (see
/// [`crate::gmod::lattice_homology`]).
pub fn two_term_cohomology(m: &PsiModule) -> Result<CohomologyReport, CohomologyError> {
    let ring = m.ring;
    let mut groups = BTreeMap::new();
    for (t, piece) in m.degrees() {
        let d = piece.boundary();
        let r = piece.rank();
        let h0 = lattice_homology(&ModMatrix::zeros(ring, r, 0), &d)?;
        let h1 = lattice_homology(&d, &ModMatrix::zeros(ring, 0, r))?;
        groups.insert((0, t), CohomologyGroup::from_module(&h0));
        groups.insert((1, t), CohomologyGroup::from_module(&h1));
    }
    Ok(CohomologyReport {
        prime: ring.prime(),
        precision: ring.precision(),
        groups,
    })
}

/// Cohomology of a single character `Q_p(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacterCohomology {
    /// Rank of `H^0` over `Q_p`.
    pub h0_rank: u8,
    /// Rank of `H^1` over `Q_p`.
    pub h1_rank: u8,
    /// `v_p(1 − ψ^k)`: the exponent of `H^1` of the lattice `Z_p(k)`;
    /// equal to the precision when `1 − ψ^k` vanishes to full precision.
    pub torsion_valuation: u32,
}

/// By valuation arithmetic: the rational rank is one exactly when
/// `1 − ψ^k` vanishes to full precision.
pub fn character_cohomology(k: i64, ring: Zpn) -> Result<CharacterCohomology, CohomologyError> {
    let n = ring.precision();
    if let Some(vk) = vp(ring.prime(), k) {
        if n <= vk + 2 {
            return Err(CohomologyError::Precision {
                precision: n,
                needed: vk + 3,
            });
        }
    }
    let psi_k = psi_generator(ring).pow_signed(k).expect("unit");
    let v = (ring.one() - psi_k).valuation();
    let rational = u8::from(v == n);
    Ok(CharacterCohomology {
        h0_rank: rational,
        h1_rank: rational,
        torsion_valuation: v,
    })
}

/// `H^{s,t}(Z_p^×, Z_p[u^{±1}])` over even `t ∈ [t_min, t_max]`, computed
/// at the precision of `ring` and re-checked two digits higher; saturated
/// factors seen at both precisions are certified free, torsion must agree.
pub fn abutment(ring: Zpn, t_min: i64, t_max: i64) -> Result<CohomologyReport, CohomologyError> {
    let low = two_term_cohomology(&PsiModule::lubin_tate(ring, t_min, t_max)?)?;
    let high_ring = ring.with_precision(ring.precision() + 2)?;
    let high = two_term_cohomology(&PsiModule::lubin_tate(high_ring, t_min, t_max)?)?;
    let mut groups = BTreeMap::new();
    for (&(s, t), g) in &low.groups {
        let h = high.get(s, t);
        if g.torsion != h.torsion || g.saturated != h.saturated {
            // torsion near the horizon means the precision was too low
            let needed = g.torsion.iter().chain(&h.torsion).max().copied().unwrap_or(0) + 2;
            if needed > ring.precision() {
                return Err(CohomologyError::Precision {
                    precision: ring.precision(),
                    needed,
                });
            }
            return Err(CohomologyError::Unstable {
                t,
                low: g.render(ring.prime(), ring.precision()),
                high: h.render(ring.prime(), high_ring.precision()),
            });
        }
        let mut g = g.clone();
        g.free_certified = g.saturated > 0;
        groups.insert((s, t), g);
    }
    Ok(CohomologyReport {
        prime: ring.prime(),
        precision: ring.precision(),
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: u32) -> Zpn {
        Zpn::new(p, n).unwrap()
    }

    #[test]
    fn degree_zero_is_saturated() {
        let r = ring(3, 8);
        let h = two_term_cohomology(&PsiModule::lubin_tate(r, 0, 0).unwrap()).unwrap();
        assert_eq!(h.get(0, 0).saturated, 1);
        assert_eq!(h.get(1, 0).saturated, 1);
        assert!(h.get(0, 0).torsion.is_empty());
    }

    #[test]
    fn unit_degree_is_acyclic() {
        let r = ring(3, 8);
        let h = two_term_cohomology(&PsiModule::lubin_tate(r, 2, 2).unwrap()).unwrap();
        assert!(h.get(0, 2).is_zero());
        assert!(h.get(1, 2).is_zero());
    }

    #[test]
    fn image_of_j_torsion() {
        let r = ring(3, 8);
        let h = two_term_cohomology(&PsiModule::lubin_tate(r, 0, 12).unwrap()).unwrap();
        assert_eq!(h.get(1, 4).torsion, vec![1]);
        assert_eq!(h.get(1, 12).torsion, vec![2]);
        assert!(h.get(0, 12).is_zero());
    }

    #[test]
    fn character_examples() {
        let r = ring(3, 8);
        assert_eq!(
            character_cohomology(0, r).unwrap(),
            CharacterCohomology {
                h0_rank: 1,
                h1_rank: 1,
                torsion_valuation: 8
            }
        );
        let c1 = character_cohomology(1, r).unwrap();
        assert_eq!((c1.h0_rank, c1.h1_rank, c1.torsion_valuation), (0, 0, 0));
        let c6 = character_cohomology(6, r).unwrap();
        assert_eq!((c6.h0_rank, c6.h1_rank, c6.torsion_valuation), (0, 0, 2));
    }

    #[test]
    fn character_needs_headroom() {
        // v_3(54) = 3 needs precision at least 6
        let r = ring(3, 5);
        assert!(matches!(
            character_cohomology(54, r),
            Err(CohomologyError::Precision { .. })
        ));
    }

    #[test]
    fn abutment_certifies_free_part() {
        let a = abutment(ring(5, 6), -16, 16).unwrap();
        assert!(a.get(0, 0).free_certified);
        assert_eq!(a.get(1, 8).torsion, vec![1]);
        assert_eq!(a.get(1, -8).torsion, vec![1]);
        assert!(a.get(1, 2).is_zero());
        assert_eq!(a.get(1, 0).render(5, 6), "Z_5");
    }

    #[test]
    fn rejects_non_invertible_psi() {
        let r = ring(3, 4);
        let mut pieces = BTreeMap::new();
        pieces.insert(
            0,
            DegreePiece {
                labels: vec!["x".into()],
                psi: ModMatrix::from_rows(r, &[vec![3]]),
            },
        );
        assert_eq!(
            PsiModule::new(r, 0, 0, pieces),
            Err(CohomologyError::NotInvertible(0))
        );
    }
}
