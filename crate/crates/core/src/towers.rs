//! `lim` and `lim¹` of towers of `F_p`-vector spaces.
//!
//! A tower is given by finitely many explicit stages and a declared tail.
//! `lim¹` depends on the whole tail, so a tower without one is refused.

use std::fmt;

use thiserror::Error;

use crate::field::{self, Fq};
use crate::padic::Zpn;
use crate::ssq::{self, SsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("tail pattern not declared: lim^1 is not determined by finitely many stages")]
    UndeclaredTail,
    #[error("inconsistent tower: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Spectral(#[from] SsError),
}

/// Support function `g` of a nested tower `A_r = ⊕_{k ≥ g(r)} F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    /// `g(r) = max(0, r − shift)`, unbounded.
    Shifted { shift: u32 },
    /// `g(r) = values[min(r, len − 1)]`, eventually constant.
    Stabilizing { values: Vec<u32> },
}

impl Support {
    pub fn at(&self, r: u32) -> u32 {
        match self {
            Support::Shifted { shift } => r.saturating_sub(*shift),
            Support::Stabilizing { values } => {
                values[(r as usize).min(values.len() - 1)]
            }
        }
    }

    /// `sup_r g(r)`, `None` when unbounded.
    pub fn limit(&self) -> Option<u32> {
        match self {
            Support::Shifted { .. } => None,
            Support::Stabilizing { values } => values.last().copied(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Every later stage equals the last explicit one, with identity maps.
    EventuallyConstant,
    /// Stage `r` is `⊕_{k ≥ g(r)} F_p` inside `⊕_{k ≥ 0} F_p`.
    NestedSubSums(Support),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    /// `F_p^dim` with the structure map to the previous stage, as a
    /// `dim_prev × dim` matrix (empty for the first stage).
    Finite { dim: usize, map: Vec<Vec<u16>> },
    /// `⊕_{k ≥ from} F_p`, included in the previous stage.
    SubSum { from: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub prime: u64,
    /// Index of the first stage (for a tower of pages, the first page).
    pub first_index: u32,
    pub stages: Vec<Stage>,
    pub tail: Option<Tail>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimDescription {
    Zero,
    Finite { dim: usize },
    SubSum { from: u32 },
}

impl fmt::Display for LimDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimDescription::Zero => f.write_str("0"),
            LimDescription::Finite { dim } => write!(f, "F_p^{dim}"),
            LimDescription::SubSum { from } => write!(f, "sum_{{k>={from}}} F_p"),
        }
    }
}

/// An element of `∏ F_p` outside the image of `⊕ F_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `(1, 1, 1, …)`.
    AllOnes,
}

impl Witness {
    pub fn prefix(&self, len: usize) -> Vec<u16> {
        match self {
            Witness::AllOnes => vec![1; len],
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::AllOnes => f.write_str("(1, 1, 1, ...)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimResult {
    pub lim: LimDescription,
    pub lim1_nonzero: bool,
    pub witness: Option<Witness>,
}

impl TowerSpec {
    /// Checks that structure maps compose and the tail matches the stages.
    pub fn validate(&self) -> Result<(), TowerError> {
        if !crate::padic::is_prime(self.prime) {
            return Err(TowerError::Inconsistent(format!("{} is not prime", self.prime)));
        }
        if self.stages.is_empty() {
            return Err(TowerError::Inconsistent("no stages".into()));
        }
        match &self.tail {
            None => Err(TowerError::UndeclaredTail),
            Some(Tail::EventuallyConstant) => {
                let mut prev: Option<usize> = None;
                for (i, st) in self.stages.iter().enumerate() {
                    let Stage::Finite { dim, map } = st else {
                        return Err(TowerError::Inconsistent(format!(
                            "stage {i} is not finite in an eventually constant tower"
                        )));
                    };
                    if let Some(pd) = prev {
                        if map.len() != pd || map.iter().any(|row| row.len() != *dim) {
                            return Err(TowerError::Inconsistent(format!(
                                "structure map into stage {} has the wrong shape",
                                i - 1
                            )));
                        }
                    }
                    prev = Some(*dim);
                }
                Ok(())
            }
            Some(Tail::NestedSubSums(g)) => {
                let mut last = 0;
                for (i, st) in self.stages.iter().enumerate() {
                    let Stage::SubSum { from } = st else {
                        return Err(TowerError::Inconsistent(format!(
                            "stage {i} is not a sub-sum in a nested tower"
                        )));
                    };
                    let expected = g.at(self.first_index + i as u32);
                    if *from != expected || *from < last {
                        return Err(TowerError::Inconsistent(format!(
                            "stage {i} starts at {from}, support function gives {expected}"
                        )));
                    }
                    last = *from;
                }
                Ok(())
            }
        }
    }

    fn support(&self) -> Option<&Support> {
        match &self.tail {
            Some(Tail::NestedSubSums(g)) => Some(g),
            _ => None,
        }
    }
}

/// `lim` and `lim¹` of a tower with a declared tail.
pub fn lim_lim1(tower: &TowerSpec) -> Result<LimResult, TowerError> {
    tower.validate()?;
    match tower.tail.as_ref().expect("validated") {
        Tail::EventuallyConstant => {
            // the limit of a tower ending in identities is its last stage
            let Stage::Finite { dim, .. } = tower.stages.last().expect("validated") else {
                unreachable!("validated")
            };
            Ok(LimResult {
                lim: if *dim == 0 {
                    LimDescription::Zero
                } else {
                    LimDescription::Finite { dim: *dim }
                },
                lim1_nonzero: false,
                witness: None,
            })
        }
        Tail::NestedSubSums(g) => Ok(match g.limit() {
            // images stabilise: Mittag-Leffler
            Some(from) => LimResult {
                lim: LimDescription::SubSum { from },
                lim1_nonzero: false,
                witness: None,
            },
            // 0 → lim → ⊕ F_p → ∏ F_p → lim¹ → 0 with finite-support image
            None => LimResult {
                lim: LimDescription::Zero,
                lim1_nonzero: true,
                witness: Some(Witness::AllOnes),
            },
        }),
    }
}

/// The tower `E_R^{0,0}(X)`, `R ≥ 2`, for `X = L_{K(1)} ⊕_{k ≥ 0} S^{−λ_k}`
/// with `λ_k = 2(p−1)p^k`.
///
/// The bottom class of the `k`-th summand is `v_1^{p^k}`, which supports a
/// differential of length `1 + v_p(p^k) = k + 1` and so lives through page
/// `E_{k+2}`. Page `R` is therefore spanned by the summands `k ≥ R − 2`.
pub fn moore_example(p: u64) -> TowerSpec {
    const EXPLICIT_PAGES: u32 = 8;
    let first = 2;
    let stages = (first..first + EXPLICIT_PAGES)
        .map(|page| {
            // v_1^{p^k} is on page R iff its differential has length ≥ R − 1
            let survivors_from = (0u32..)
                .find(|&k| differential_length(p, k) + 1 >= page)
                .expect("lengths are unbounded");
            Stage::SubSum {
                from: survivors_from,
            }
        })
        .collect();
    TowerSpec {
        prime: p,
        first_index: first,
        stages,
        tail: Some(Tail::NestedSubSums(Support::Shifted { shift: 2 })),
    }
}

/// Length of the differential on `v_1^{p^k}`: `1 + v_p(p^k)`.
fn differential_length(p: u64, k: u32) -> u32 {
    1 + crate::padic::vp(p, p.pow(k) as i64).expect("nonzero")
}

/// `λ_k = 2(p−1)p^k`.
pub fn moore_degree(p: u64, k: u32) -> i64 {
    (2 * (p - 1) * p.pow(k)) as i64
}

/// Checks the window form of exactness of `0 → lim → ⊕ F_p → ∏ F_p`: the
/// kernel of `⊕_{k<R} F_p → ∏_r (A_0/A_r)` equals `lim ∩ ⊕_{k<R}`. The
/// kernel is computed by rank over `F_p`.
pub fn truncated_exactness(tower: &TowerSpec, window: usize) -> Result<bool, TowerError> {
    let res = lim_lim1(tower)?;
    let g = tower
        .support()
        .ok_or_else(|| TowerError::Inconsistent("not a nested tower".into()))?;
    let fp = Fq::new(tower.prime).map_err(|e| TowerError::Inconsistent(e.to_string()))?;
    // stack the projections ⊕_{k<R} → A_0/A_r ≅ ⊕_{k<g(r)} over r until g(r) ≥ R or g stops growing
    let mut rows: Vec<Vec<u16>> = Vec::new();
    let mut r = tower.first_index;
    loop {
        let cut = (g.at(r) as usize).min(window);
        for k in 0..cut {
            let mut row = vec![0u16; window];
            row[k] = 1;
            rows.push(row);
        }
        let stable = g.limit().is_some_and(|l| g.at(r) == l);
        if cut == window || stable {
            break;
        }
        r += 1;
    }
    let ech = field::rref(&fp, &rows);
    let kernel_dim = window - ech.rank();
    // kernel is spanned by coordinates not hit by any projection
    let kernel_support: Vec<usize> = (0..window).filter(|k| !ech.pivots.contains(k)).collect();
    let expected: Vec<usize> = match res.lim {
        LimDescription::Zero => Vec::new(),
        LimDescription::SubSum { from } => (from as usize..window).collect(),
        LimDescription::Finite { .. } => unreachable!("nested towers have sub-sum limits"),
    };
    Ok(kernel_dim == expected.len() && kernel_support == expected)
}

/// One comparison between the declared Moore tower and a spectral
/// sequence run on a single summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreCheck {
    pub k: u32,
    pub page: u32,
    pub declared: bool,
    pub computed: bool,
}

/// Runs the spectral sequence of the sphere in degree `λ_k` for each
/// summand `k < summands` and compares `dim E_R^{0, λ_k}` with the
/// declared tower for pages `2..=last_page`.
pub fn moore_cross_check(p: u64, summands: u32, last_page: u32) -> Result<Vec<MooreCheck>, TowerError> {
    let tower = moore_example(p);
    let g = tower.support().expect("nested tower").clone();
    let mut out = Vec::new();
    for k in 0..summands {
        let t = moore_degree(p, k);
        let ring = Zpn::new(p, k + 4).map_err(|e| TowerError::Inconsistent(e.to_string()))?;
        let run = ssq::run(ring, t, t)?;
        for page in 2..=last_page {
            out.push(MooreCheck {
                k,
                page,
                declared: k >= g.at(page),
                computed: run.dim(page, t, 0, 0) == 1,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_tower() {
        let id = vec![vec![1, 0], vec![0, 1]];
        let t = TowerSpec {
            prime: 3,
            first_index: 0,
            stages: vec![
                Stage::Finite { dim: 2, map: vec![] },
                Stage::Finite { dim: 2, map: id },
            ],
            tail: Some(Tail::EventuallyConstant),
        };
        let res = lim_lim1(&t).unwrap();
        assert_eq!(res.lim, LimDescription::Finite { dim: 2 });
        assert!(!res.lim1_nonzero && res.witness.is_none());
    }

    #[test]
    fn undeclared_tail_is_refused() {
        let mut t = moore_example(3);
        t.tail = None;
        assert_eq!(lim_lim1(&t), Err(TowerError::UndeclaredTail));
    }

    #[test]
    fn moore_tower_has_lim1() {
        for p in [3, 5] {
            let t = moore_example(p);
            let froms: Vec<u32> = t
                .stages
                .iter()
                .map(|s| match s {
                    Stage::SubSum { from } => *from,
                    Stage::Finite { .. } => panic!("finite stage"),
                })
                .collect();
            assert_eq!(&froms[..4], &[0, 1, 2, 3]);
            let res = lim_lim1(&t).unwrap();
            assert_eq!(res.lim, LimDescription::Zero);
            assert!(res.lim1_nonzero);
            assert_eq!(res.witness.unwrap().prefix(3), vec![1, 1, 1]);
        }
    }

    #[test]
    fn bounded_support_is_mittag_leffler() {
        let t = TowerSpec {
            prime: 5,
            first_index: 0,
            stages: vec![Stage::SubSum { from: 0 }, Stage::SubSum { from: 2 }],
            tail: Some(Tail::NestedSubSums(Support::Stabilizing { values: vec![0, 2, 3] })),
        };
        let res = lim_lim1(&t).unwrap();
        assert_eq!(res.lim, LimDescription::SubSum { from: 3 });
        assert!(!res.lim1_nonzero);
        assert!(truncated_exactness(&t, 10).unwrap());
    }

    #[test]
    fn inconsistent_stages_are_rejected() {
        let mut t = moore_example(3);
        t.stages[1] = Stage::SubSum { from: 4 };
        assert!(matches!(lim_lim1(&t), Err(TowerError::Inconsistent(_))));
    }

    #[test]
    fn exactness_in_windows() {
        let t = moore_example(3);
        for r in 1..=16 {
            assert!(truncated_exactness(&t, r).unwrap());
        }
    }

    #[test]
    fn spectral_sequence_agrees_with_declared_tower() {
        for c in moore_cross_check(3, 4, 5).unwrap() {
            assert_eq!(c.declared, c.computed, "{c:?}");
        }
    }
}
