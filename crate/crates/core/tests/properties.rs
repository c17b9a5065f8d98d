//! Randomised checks against independent oracles.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use chromatic::cobar::{self, ExteriorHopf};
use chromatic::gmod::{cokernel, homology, lattice_homology, snf, ModMatrix};
use chromatic::mahler::{self, MahlerFunction};
use chromatic::padic::{binom, psi_power, teichmuller, Zpn};
use chromatic::ssq;

fn ring(p: u64, n: u32) -> Zpn {
    Zpn::new(p, n).expect("valid ring")
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7])
}

fn matrix(max_dim: usize) -> impl Strategy<Value = (u64, u32, usize, usize, Vec<u64>)> {
    (prime(), 1u32..=5, 1..=max_dim, 1..=max_dim).prop_flat_map(|(p, n, rows, cols)| {
        let modulus = p.pow(n);
        (
            Just(p),
            Just(n),
            Just(rows),
            Just(cols),
            prop::collection::vec((0..modulus, 0u32..3), rows * cols)
                .prop_map(move |v| v.into_iter().map(|(x, e)| x * p.pow(e) % modulus).collect()),
        )
    })
}

fn build(r: Zpn, rows: usize, cols: usize, entries: &[u64]) -> ModMatrix {
    ModMatrix::from_fn(r, rows, cols, |i, j| entries[i * cols + j] as i64)
}

/// `ψ` recomputed from scratch: brute-force primitive root, Teichmüller
/// lift by iterated `p`-th powers, times `1 + p`.
fn psi_oracle(p: u64, n: u32) -> BigUint {
    let order_is = |g: u64| {
        let mut x = 1u64;
        (1..p).position(|_| {
            x = x * g % p;
            x == 1
        }) == Some(p as usize - 2)
    };
    let g = (2..p).find(|&g| order_is(g)).expect("primitive root exists");
    let modulus = BigUint::from(p).pow(n);
    let mut w = BigUint::from(g);
    for _ in 0..n {
        w = w.modpow(&BigUint::from(p), &modulus);
    }
    w * BigUint::from(1 + p) % modulus
}

fn big_valuation(p: u64, x: &BigUint, cap: u32) -> u32 {
    let pb = BigUint::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while v < cap && !y.is_zero() && (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    if y.is_zero() {
        cap
    } else {
        v
    }
}

fn exact_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Every vector of `(Z/p^N)^m`.
fn all_vectors(modulus: u64, m: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..modulus).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn apply(a: &ModMatrix, x: &[u64], modulus: u64) -> Vec<u64> {
    (0..a.rows())
        .map(|i| {
            (0..a.cols()).fold(0u64, |acc, j| (acc + a.get(i, j).residue() * x[j]) % modulus)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_round_trip((p, n, rows, cols, entries) in matrix(12)) {
        let r = ring(p, n);
        let a = build(r, rows, cols, &entries);
        let s = snf(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert!(s.d.is_diagonal());
        prop_assert_eq!(s.u.mul(&s.u_inv).unwrap(), ModMatrix::identity(r, rows));
        prop_assert_eq!(s.v_inv.mul(&s.v).unwrap(), ModMatrix::identity(r, cols));
        prop_assert!(s.diagonal.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn kernel_cokernel_lengths((p, n, rows, cols, entries) in matrix(8)) {
        let r = ring(p, n);
        let a = build(r, rows, cols, &entries);
        let ker = homology(&ModMatrix::zeros(r, cols, 0), &a).unwrap();
        let coker = cokernel(&a);
        prop_assert_eq!(ker.length() + n * rows as u32, coker.length() + n * cols as u32);
        let lattice = lattice_homology(&ModMatrix::zeros(r, cols, 0), &a).unwrap();
        prop_assert!(lattice.length() <= ker.length());
        // a final map to zero leaves the cokernel in both readings
        let end = ModMatrix::zeros(r, 0, rows);
        prop_assert_eq!(homology(&a, &end).unwrap(), coker.clone());
        prop_assert_eq!(lattice_homology(&a, &end).unwrap(), coker);
    }

    #[test]
    fn homology_counts_cosets(
        n in 1u32..=2,
        m in 1usize..=3,
        d_in_entries in prop::collection::vec(0u64..9, 9),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..=3),
    ) {
        let p = 3;
        let r = ring(p, n);
        let modulus = r.modulus();
        let k = 3.min(d_in_entries.len() / m);
        let d_in = ModMatrix::from_fn(r, m, k, |i, j| (d_in_entries[i * k + j] % modulus) as i64);
        let vectors = all_vectors(modulus, m);
        // rows of d_out drawn from the left annihilator of d_in
        let annihilating: Vec<&Vec<u64>> = vectors
            .iter()
            .filter(|y| (0..k).all(|j| (0..m).map(|i| y[i] * d_in.get(i, j).residue()).sum::<u64>() % modulus == 0))
            .collect();
        let rows: Vec<Vec<i64>> = picks
            .iter()
            .map(|ix| ix.get(&annihilating).iter().map(|&x| x as i64).collect())
            .collect();
        let d_out = if rows.is_empty() {
            ModMatrix::zeros(r, 0, m)
        } else {
            ModMatrix::from_rows(r, &rows)
        };
        let cycles = vectors.iter().filter(|x| apply(&d_out, x, modulus).iter().all(|&c| c == 0)).count();
        let boundaries: std::collections::BTreeSet<Vec<u64>> =
            all_vectors(modulus, k).iter().map(|x| apply(&d_in, x, modulus)).collect();
        let h = homology(&d_in, &d_out).unwrap();
        prop_assert_eq!((cycles / boundaries.len()) as u64, p.pow(h.length()));
    }

    #[test]
    fn pascal(p in prime(), a in 0u64..1_000_000, i in 0u64..10) {
        let r = ring(p, 10);
        let a = r.from_u64(a);
        let x = binom(a, i).unwrap();
        let y = binom(a, i + 1).unwrap();
        let z = binom(a + r.one(), i + 1).unwrap();
        let m = x.precision().min(y.precision()).min(z.precision());
        prop_assert_eq!(x.reduce(m).unwrap() + y.reduce(m).unwrap(), z.reduce(m).unwrap());
    }

    #[test]
    fn binomial_matches_integers(p in prime(), a in 0u64..60, i in 0u64..12) {
        let r = ring(p, 8);
        let got = binom(r.from_u64(a), i).unwrap();
        let modulus = BigUint::from(p).pow(got.precision());
        let want = (exact_binomial(a, i) % modulus).to_u64().unwrap();
        prop_assert_eq!(got.residue(), want);
    }

    #[test]
    fn teichmuller_lift(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), x in 1i64..13, n in 1u32..=8) {
        prop_assume!((x as u64) < p);
        let r = ring(p, n);
        let w = teichmuller(x, r).unwrap();
        prop_assert_eq!(w.pow(p - 1), r.one());
        prop_assert_eq!(w.residue() % p, x as u64);
    }

    #[test]
    fn psi_power_valuations(p in prime(), k in -200i64..=200) {
        let n = 10;
        let r = ring(p, n);
        let modulus = BigUint::from(p).pow(n);
        let psi = psi_oracle(p, n);
        let e = k.rem_euclid(((p - 1) * p.pow(n - 1)) as i64) as u64;
        let power = psi.modpow(&BigUint::from(e), &modulus);
        prop_assert_eq!(psi_power(r, k).residue(), power.to_u64().unwrap());
        let diff = (&modulus + BigUint::one() - power) % &modulus;
        let v = big_valuation(p, &diff, n);
        prop_assert_eq!((r.one() - psi_power(r, k)).valuation(), v);
        let expected = if k == 0 {
            n
        } else if k % (p as i64 - 1) == 0 {
            (1 + big_valuation(p, &BigUint::from(k.unsigned_abs()), n)).min(n)
        } else {
            0
        };
        prop_assert_eq!(v, expected);
    }

    #[test]
    fn mahler_round_trip(p in prime(), values in prop::collection::vec(any::<u64>(), 1..48)) {
        let r = ring(p, 8);
        let values: Vec<_> = values.into_iter().map(|x| r.from_u64(x % r.modulus())).collect();
        let f = mahler::mahler_coeffs(&values).unwrap();
        prop_assert_eq!(f.values(), values);
    }

    #[test]
    fn basis_products(p in prime(), i in 0usize..10, j in 0usize..10) {
        let r = ring(p, 8);
        let prod = mahler::pointwise_product(
            &MahlerFunction::basis(r, i + 1, i),
            &MahlerFunction::basis(r, j + 1, j),
        ).unwrap();
        let len = i + j + 1;
        let want: Vec<_> = (0..len)
            .map(|k| {
                let c = if k < j { BigUint::zero() } else {
                    exact_binomial(k as u64, i as u64) * exact_binomial(i as u64, (k - j) as u64)
                };
                r.from_u64((c % r.modulus()).to_u64().unwrap())
            })
            .collect();
        prop_assert_eq!(prod.coeffs(), want.as_slice());
    }

    #[test]
    fn psi_is_multiplicative(
        p in prime(),
        f in prop::collection::vec(0i64..1000, 1..8),
        g in prop::collection::vec(0i64..1000, 1..8),
    ) {
        let r = ring(p, 6);
        let f = MahlerFunction::from_i64s(r, &f).unwrap();
        let g = MahlerFunction::from_i64s(r, &g).unwrap();
        let fg = mahler::pointwise_product(&f, &g).unwrap();
        let len = fg.len();
        let lhs = mahler::act_psi(&fg);
        let rhs = mahler::pointwise_product(&mahler::act_psi(&f), &mahler::act_psi(&g)).unwrap();
        prop_assert_eq!(&lhs, &rhs.padded(len));
        let m = mahler::psi_matrix(r, len);
        let column = ModMatrix::from_fn(r, len, 1, |k, _| fg.coeffs()[k].residue() as i64);
        let image = m.mul(&column).unwrap();
        prop_assert!((0..len).all(|k| image.get(k, 0) == lhs.coeffs()[k]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cobar_matches_symmetric_algebra(n in 0usize..=3, q in prop::sample::select(vec![3u64, 5, 7, 9, 25]), s in 0usize..=4) {
        let h = ExteriorHopf::new(n, q).unwrap();
        prop_assert_eq!(cobar::cobar_ext(&h, s).unwrap(), cobar::symmetric_oracle(n, s));
        prop_assert!(cobar::check_d_squared(&h, s).unwrap());
    }

    #[test]
    fn differentials_are_linear(p in prime(), k in -12i64..=12) {
        prop_assume!(k != 0);
        let n = 8;
        let period = 2 * (p as i64 - 1);
        let t = period * k;
        let out = ssq::run(ring(p, n), t, t).unwrap();
        // ζ-multiples are permanent: all sources are ζ-free
        prop_assert!(out.differentials.iter().all(|d| !d.source.has_zeta() && d.target.has_zeta()));
        let r = out.differentials[0].r;
        prop_assert!(out.differentials.iter().all(|d| d.r == r));
        // one differential from each b^j with j + r < N
        let mut sources: Vec<u32> = out.differentials.iter().map(|d| d.source.b_exponent()).collect();
        sources.sort();
        prop_assert_eq!(sources, (0..n - r).collect::<Vec<_>>());
        prop_assert!(out.differentials.iter().all(|d| d.target.b_exponent() == d.source.b_exponent() + r));
    }

    #[test]
    fn leibniz_on_p_th_powers(p in prime(), k in -6i64..=6) {
        prop_assume!(k != 0);
        let n = 8;
        let period = 2 * (p as i64 - 1);
        let length = |t: i64| {
            let out = ssq::run(ring(p, n), t, t).unwrap();
            out.differentials
                .iter()
                .find(|d| d.source.b_exponent() == 0)
                .map(|d| d.r)
        };
        let base = length(period * k).unwrap();
        let power = length(period * k * p as i64);
        // d_i(v_1^{pk}) vanishes for every i up to the length on v_1^k
        match power {
            Some(r) => prop_assert_eq!(r, base + 1),
            None => prop_assert!(base + 1 >= n),
        }
    }
}
