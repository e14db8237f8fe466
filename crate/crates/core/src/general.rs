//! Sums `Σ_k (a_1+k)^{m_1} ⋯ (a_n+k)^{m_n}` with any number of distinct
//! offsets, evaluated three ways: bounded compositions, coefficient
//! extraction and elementary symmetric polynomials.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::modarith::{Prime, Residue};
use crate::oracle::SumSpec;
use crate::polyring::{build_product, PolyZp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralSumParams {
    pr: Prime,
    offsets: Vec<Residue>,
    exps: Vec<i64>,
}

impl GeneralSumParams {
    pub fn new(pr: &Prime, offsets: &[Residue], exps: &[i64]) -> Result<Self> {
        if offsets.is_empty() || offsets.len() != exps.len() {
            return Err(Error::BadParams(format!(
                "need matching nonempty offsets and exponents (got {} and {})",
                offsets.len(),
                exps.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &a in offsets {
            if a >= pr.p() {
                return Err(Error::RangeViolation(format!(
                    "offset {a} not below p = {}",
                    pr.p()
                )));
            }
            if !seen.insert(a) {
                return Err(Error::DuplicateOffsets(a));
            }
        }
        if let Some(&m) = exps.iter().find(|&&m| !(1..=pr.order()).contains(&m)) {
            return Err(Error::BadParams(format!(
                "exponent {m} outside [1, {}]",
                pr.order()
            )));
        }
        Ok(GeneralSumParams {
            pr: pr.clone(),
            offsets: offsets.to_vec(),
            exps: exps.to_vec(),
        })
    }

    pub fn prime(&self) -> &Prime {
        &self.pr
    }

    pub fn offsets(&self) -> &[Residue] {
        &self.offsets
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// `b_i = a_i - a_n`; the last entry is always 0.
    pub fn shifted_offsets(&self) -> Vec<Residue> {
        let last = *self.offsets.last().unwrap();
        self.offsets.iter().map(|&a| self.pr.sub(a, last)).collect()
    }

    pub fn exp_total(&self) -> i64 {
        self.exps.iter().sum()
    }

    /// `N = m_1 + ... + m_{n-1}`.
    pub fn big_n(&self) -> i64 {
        self.exp_total() - self.exps.last().unwrap()
    }

    /// `M_i = Σ m_j - i(p-1)`.
    pub fn big_m(&self, i: i64) -> i64 {
        self.exp_total() - i * self.pr.order()
    }

    /// Largest `i` with `M_i >= 0`.
    pub fn t(&self) -> i64 {
        self.exp_total() / self.pr.order()
    }

    pub fn to_spec(&self) -> SumSpec {
        let terms: Vec<_> = self
            .offsets
            .iter()
            .copied()
            .zip(self.exps.iter().copied())
            .collect();
        SumSpec::new(&self.pr, terms, []).expect("positive exponents never need exclusions")
    }

    fn all_top(&self) -> bool {
        self.exps.iter().all(|&m| m == self.pr.order())
    }
}

/// Elementary symmetric polynomials `e_0, ..., e_r` of the roots `-b_i`
/// (with multiplicity `m_i`, `i < n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EspVector {
    pub values: Vec<Residue>,
}

impl EspVector {
    pub fn get(&self, r: usize) -> Residue {
        self.values[r]
    }
}

pub fn multi_index_j(gp: &GeneralSumParams) -> Residue {
    let pr = &gp.pr;
    if gp.exp_total() < pr.order() {
        return 0;
    }
    if gp.all_top() {
        return pr.neg(pr.reduce(gp.len() as i64));
    }
    let b = gp.shifted_offsets();
    let n1 = gp.len() - 1;
    let caps: Vec<i64> = gp.exps[..n1].to_vec();
    // suffix[i] = most that coordinates i.. can absorb
    let mut suffix = vec![0i64; n1 + 1];
    for i in (0..n1).rev() {
        suffix[i] = suffix[i + 1] + caps[i];
    }
    let mut total = 0;
    for i in 1..=gp.t() {
        let target = gp.big_m(i);
        total = pr.add(total, compositions(pr, &b[..n1], &caps, &suffix, 0, target));
    }
    pr.neg(total)
}

fn compositions(
    pr: &Prime,
    b: &[Residue],
    caps: &[i64],
    suffix: &[i64],
    idx: usize,
    rest: i64,
) -> Residue {
    if idx == caps.len() {
        return u64::from(rest == 0);
    }
    if rest > suffix[idx] {
        return 0;
    }
    let mut acc = 0;
    for j in 0..=caps[idx].min(rest) {
        let sub = compositions(pr, b, caps, suffix, idx + 1, rest - j);
        if sub == 0 {
            continue;
        }
        let w = pr.mul(pr.binom_unchecked(caps[idx], j), pr.pow(b[idx], j as u64));
        acc = pr.add(acc, pr.mul(w, sub));
    }
    acc
}

/// `Π_{i<n} (b_i + x)^{m_i}`.
pub fn product_polynomial(gp: &GeneralSumParams) -> PolyZp {
    let b = gp.shifted_offsets();
    let n1 = gp.len() - 1;
    let exps: Vec<u64> = gp.exps[..n1].iter().map(|&m| m as u64).collect();
    build_product(&gp.pr, &b[..n1], &exps)
}

pub fn coeff_extraction_sum(gp: &GeneralSumParams) -> Residue {
    let pr = &gp.pr;
    let poly = product_polynomial(gp);
    let m_n = *gp.exps.last().unwrap();
    let big_n = gp.big_n();
    let mut total = 0;
    let mut i = 1;
    while i * pr.order() - m_n <= big_n {
        total = pr.add(total, poly.coeff(i * pr.order() - m_n));
        i += 1;
    }
    pr.neg(total)
}

/// `p_r = (-1)^r Σ_{i<n} m_i b_i^r`.
pub fn root_power_sum(gp: &GeneralSumParams, r: u64) -> Residue {
    let pr = &gp.pr;
    let b = gp.shifted_offsets();
    let n1 = gp.len() - 1;
    let s = b[..n1].iter().zip(&gp.exps).fold(0, |acc, (&bi, &mi)| {
        pr.add(acc, pr.mul(pr.reduce(mi), pr.pow(bi, r)))
    });
    pr.mul(pr.sign(r as i64), s)
}

/// Newton's identities up to `e_{r_max}`.
pub fn newton_esp(gp: &GeneralSumParams, r_max: usize) -> Result<EspVector> {
    let pr = &gp.pr;
    if r_max as u64 >= pr.p() {
        return Err(Error::IndexNotInvertible { r_max, p: pr.p() });
    }
    let power: Vec<Residue> = (0..=r_max as u64)
        .map(|r| if r == 0 { 0 } else { root_power_sum(gp, r) })
        .collect();
    let mut e = vec![1];
    for r in 1..=r_max {
        let mut acc = 0;
        for i in 1..=r {
            let term = pr.mul(e[r - i], power[i]);
            acc = if i % 2 == 1 {
                pr.add(acc, term)
            } else {
                pr.sub(acc, term)
            };
        }
        e.push(pr.mul(acc, pr.inv(r as u64)?));
    }
    Ok(EspVector { values: e })
}

/// `e_r = (-1)^r [x^{N-r}] P` for `r = 0..=r_max`.
pub fn esp_from_coefficients(gp: &GeneralSumParams, r_max: usize) -> EspVector {
    let pr = &gp.pr;
    let poly = product_polynomial(gp);
    let big_n = gp.big_n();
    let values = (0..=r_max as i64)
        .map(|r| pr.mul(pr.sign(r), poly.coeff(big_n - r)))
        .collect();
    EspVector { values }
}

pub fn esp_sum(gp: &GeneralSumParams) -> Residue {
    let pr = &gp.pr;
    let t = gp.t();
    if t < 1 {
        return 0;
    }
    let top = gp.big_m(1) as usize;
    let e = if (top as u64) < pr.p() {
        newton_esp(gp, top).expect("index below p")
    } else {
        esp_from_coefficients(gp, top)
    };
    let mut total = 0;
    for i in 1..=t {
        let mi = gp.big_m(i);
        if mi > gp.big_n() {
            continue;
        }
        total = pr.add(total, pr.mul(pr.sign(mi), e.get(mi as usize)));
    }
    pr.neg(total)
}

/// Substitutes `k -> b_{n-1} k`, returning `(b_{n-1}^{M_1}, c)` with
/// `c_i = b_{n-1}^{-1} b_i` so that the sum equals `scale · sum(c)`.
pub fn scaling_reduce(gp: &GeneralSumParams) -> Result<(Residue, GeneralSumParams)> {
    let pr = &gp.pr;
    if gp.len() < 2 {
        return Err(Error::ZeroPivot);
    }
    let b = gp.shifted_offsets();
    let pivot = b[gp.len() - 2];
    if pivot == 0 {
        return Err(Error::ZeroPivot);
    }
    let inv = pr.inv(pivot)?;
    let reduced: Vec<Residue> = b.iter().map(|&bi| pr.mul(inv, bi)).collect();
    let scale = pr.pow_signed(pivot, gp.exp_total());
    Ok((scale, GeneralSumParams::new(pr, &reduced, &gp.exps)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::make_prime;
    use crate::oracle::brute_sum;
    use proptest::prelude::*;

    fn gp(p: i64, offsets: &[u64], exps: &[i64]) -> GeneralSumParams {
        GeneralSumParams::new(&make_prime(p).unwrap(), offsets, exps).unwrap()
    }

    #[test]
    fn worked_example_three_ways() {
        let g = gp(17, &[14, 10, 4], &[3, 8, 9]);
        assert_eq!(multi_index_j(&g), 15);
        assert_eq!(coeff_extraction_sum(&g), 15);
        assert_eq!(esp_sum(&g), 15);
        assert_eq!(brute_sum(&g.to_spec()).unwrap(), 15);
        assert_eq!(g.shifted_offsets(), vec![10, 6, 0]);
        assert_eq!(g.t(), 1);
        assert_eq!(g.big_m(1), 4);
    }

    #[test]
    fn power_sums_and_esp() {
        let g = gp(17, &[13, 1, 0], &[3, 8, 9]);
        assert_eq!(root_power_sum(&g, 1), 4);
        assert_eq!(root_power_sum(&g, 4), 11);
        assert_eq!(root_power_sum(&g, 3), 14);
        assert_eq!(root_power_sum(&g, 5), 4);
        let e = newton_esp(&g, 4).unwrap();
        assert_eq!(e.values, vec![1, 4, 14, 11, 9]);
        assert_eq!(esp_from_coefficients(&g, 4), e);
        assert_eq!(
            newton_esp(&g, 17),
            Err(Error::IndexNotInvertible { r_max: 17, p: 17 })
        );
    }

    #[test]
    fn small_total_and_all_top() {
        let g = gp(11, &[3, 5, 8, 9], &[2, 2, 2, 2]);
        assert_eq!(multi_index_j(&g), 0);
        assert_eq!(esp_sum(&g), 0);
        assert_eq!(coeff_extraction_sum(&g), 0);
        let g = gp(11, &[3, 5, 8, 9], &[10, 10, 10, 10]);
        assert_eq!(multi_index_j(&g), 7);
        assert_eq!(coeff_extraction_sum(&g), 7);
        assert_eq!(esp_sum(&g), 7);
        let g = gp(11, &[4, 0], &[10, 10]);
        assert_eq!(esp_sum(&g), 9);
    }

    #[test]
    fn single_term() {
        assert_eq!(coeff_extraction_sum(&gp(13, &[5], &[7])), 0);
        assert_eq!(multi_index_j(&gp(13, &[5], &[7])), 0);
        assert_eq!(multi_index_j(&gp(13, &[5], &[12])), 12);
        assert_eq!(coeff_extraction_sum(&gp(13, &[5], &[12])), 12);
    }

    #[test]
    fn constructor_errors() {
        let pr = make_prime(11).unwrap();
        assert_eq!(
            GeneralSumParams::new(&pr, &[3, 4, 3], &[1, 2, 3]),
            Err(Error::DuplicateOffsets(3))
        );
        assert!(GeneralSumParams::new(&pr, &[3, 4], &[0, 2]).is_err());
        assert!(GeneralSumParams::new(&pr, &[3, 4], &[11, 2]).is_err());
        assert!(GeneralSumParams::new(&pr, &[3], &[1, 2]).is_err());
        assert!(GeneralSumParams::new(&pr, &[12], &[1]).is_err());
    }

    #[test]
    fn scaling_examples() {
        let (scale, reduced) = scaling_reduce(&gp(17, &[10, 6, 0], &[3, 8, 9])).unwrap();
        assert_eq!(scale, 4);
        assert_eq!(reduced.offsets(), &[13, 1, 0]);
        let g = gp(17, &[13, 1, 0], &[3, 8, 9]);
        let (scale, reduced) = scaling_reduce(&g).unwrap();
        assert_eq!(scale, 1);
        assert_eq!(reduced, g);
        let g = gp(11, &[4, 2, 0], &[3, 3, 5]);
        let (scale, reduced) = scaling_reduce(&g).unwrap();
        assert_eq!(scale, 2);
        assert_eq!(
            brute_sum(&g.to_spec()).unwrap(),
            make_prime(11)
                .unwrap()
                .mul(scale, brute_sum(&reduced.to_spec()).unwrap())
        );
        assert_eq!(scaling_reduce(&gp(11, &[4], &[3])), Err(Error::ZeroPivot));
    }

    #[test]
    fn unit_offsets_collapse_to_binomial() {
        let pr = make_prime(13).unwrap();
        let g = gp(13, &[1, 0], &[9, 7]);
        let expect = pr.neg(pr.binom(9, g.big_m(1)).unwrap());
        assert_eq!(multi_index_j(&g), expect);
    }

    fn params() -> impl Strategy<Value = GeneralSumParams> {
        prop::sample::select(vec![5i64, 7, 11, 13]).prop_flat_map(|p| {
            let n = 1usize..=4;
            n.prop_flat_map(move |n| {
                (
                    prop::sample::subsequence((0..p as u64).collect::<Vec<_>>(), n).prop_shuffle(),
                    prop::collection::vec(1..p, n),
                )
            })
            .prop_map(move |(offs, exps)| gp(p, &offs, &exps))
        })
    }

    proptest! {
        #[test]
        fn three_way_agreement(g in params()) {
            let brute = brute_sum(&g.to_spec()).unwrap();
            prop_assert_eq!(multi_index_j(&g), brute);
            prop_assert_eq!(coeff_extraction_sum(&g), brute);
            prop_assert_eq!(esp_sum(&g), brute);
        }

        #[test]
        fn newton_matches_coefficients(g in params()) {
            let r_max = (g.big_n() as usize).min(g.prime().p() as usize - 1);
            prop_assert_eq!(newton_esp(&g, r_max).unwrap(), esp_from_coefficients(&g, r_max));
        }

        #[test]
        fn scaling_preserves_sum(g in params()) {
            prop_assume!(g.len() >= 2);
            let (scale, reduced) = scaling_reduce(&g).unwrap();
            let pr = g.prime();
            prop_assert_eq!(
                brute_sum(&g.to_spec()).unwrap(),
                pr.mul(scale, brute_sum(&reduced.to_spec()).unwrap())
            );
        }
    }
}
