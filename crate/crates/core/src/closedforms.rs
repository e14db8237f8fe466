//! Closed forms for sums of products and ratios of two or three shifted
//! powers modulo p.
//!
//! Each evaluator checks its hypotheses and then dispatches over the cases
//! in the order they are stated; the first matching case wins. Results are
//! canonical residues, so `-2` comes back as `p - 2`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::modarith::{Prime, Residue};
use crate::oracle::{auto_exclusions, SumSpec, Term};

/// Offsets and exponents of a two-term sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairParams {
    pub pr: Prime,
    pub a: Residue,
    pub b: Residue,
    pub m: i64,
    pub n: i64,
}

impl PairParams {
    pub fn new(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64) -> Result<Self> {
        let top = pr.order();
        if a >= pr.p() || b >= pr.p() || !(0..=top).contains(&m) || !(0..=top).contains(&n) {
            return Err(Error::HypothesisViolation(format!(
                "pair parameters out of range: a={a} b={b} m={m} n={n}"
            )));
        }
        Ok(PairParams {
            pr: pr.clone(),
            a,
            b,
            m,
            n,
        })
    }
}

/// Offsets and exponents of `Σ (a+k)^m (b+k)^n (c+k)^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleParams {
    pub pr: Prime,
    pub a: Residue,
    pub b: Residue,
    pub c: Residue,
    pub m: i64,
    pub n: i64,
    pub s: i64,
}

impl TripleParams {
    pub fn new(
        pr: &Prime,
        a: Residue,
        b: Residue,
        c: Residue,
        m: i64,
        n: i64,
        s: i64,
    ) -> Result<Self> {
        let top = pr.order();
        for (name, e) in [("m", m), ("n", n), ("s", s)] {
            if !(1..=top).contains(&e) {
                return Err(Error::HypothesisViolation(format!(
                    "{name} = {e} not in [1, {top}]"
                )));
            }
        }
        if a >= pr.p() || b >= pr.p() || c >= pr.p() {
            return Err(Error::HypothesisViolation(
                "offsets must lie in [0, p)".into(),
            ));
        }
        Ok(TripleParams {
            pr: pr.clone(),
            a,
            b,
            c,
            m,
            n,
            s,
        })
    }

    /// `m + n + s - (p - 1)`
    pub fn big_m(&self) -> i64 {
        self.m + self.n + self.s - self.pr.order()
    }

    /// `m + n + s - 2(p - 1)`
    pub fn big_r(&self) -> i64 {
        self.m + self.n + self.s - 2 * self.pr.order()
    }
}

fn check_exp(pr: &Prime, name: &str, e: i64, lo: i64) -> Result<()> {
    if e < lo || e > pr.order() {
        return Err(Error::HypothesisViolation(format!(
            "{name} = {e} not in [{lo}, {}]",
            pr.order()
        )));
    }
    Ok(())
}

fn check_offset(pr: &Prime, name: &str, x: Residue, lo: u64) -> Result<()> {
    if x < lo || x >= pr.p() {
        return Err(Error::HypothesisViolation(format!(
            "{name} = {x} not in [{lo}, {}]",
            pr.p() - 1
        )));
    }
    Ok(())
}

/// `coeff · base^exp`, skipping the power when the coefficient vanishes so a
/// formally negative exponent attached to a zero binomial is never raised.
#[inline]
fn scaled_power(pr: &Prime, coeff: Residue, base: Residue, exp: i64) -> Residue {
    if coeff == 0 {
        0
    } else {
        pr.mul(coeff, pr.pow_signed(base, exp))
    }
}

/// `Σ_{k=1}^{p-1} k^n`: `-1` when `(p-1) | n` (including `n = 0`), else 0.
pub fn power_sum(pr: &Prime, n: u64) -> Residue {
    if n.is_multiple_of(pr.p() - 1) {
        pr.p() - 1
    } else {
        0
    }
}

/// `Σ_{k=1, k≠a}^{p-1} k^m / (a-k)^n`.
pub fn ratio_single(pr: &Prime, a: Residue, m: i64, n: i64) -> Result<Residue> {
    if a == 0 {
        return Err(Error::OffsetZero);
    }
    check_offset(pr, "a", a, 1)?;
    check_exp(pr, "m", m, 0)?;
    check_exp(pr, "n", n, 0)?;
    let top = pr.order();
    let edge = |e: i64| e == 0 || e == top;
    Ok(if m == 0 && (1..top).contains(&n) {
        pr.neg(pr.pow_signed(a, top - n))
    } else if n == top && (1..top).contains(&m) {
        pr.neg(pr.pow_signed(a, m))
    } else if edge(m) && edge(n) {
        pr.reduce(-2)
    } else {
        let c = pr.mul(pr.sign(n + 1), pr.binom_unchecked(m, n));
        scaled_power(pr, c, a, m - n)
    })
}

/// `Σ_{k ≢ -a,-b} (a+k)^m / (b+k)^n` for `a ≠ b`.
pub fn ratio_pair(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64) -> Result<Residue> {
    check_offset(pr, "a", a, 0)?;
    check_offset(pr, "b", b, 0)?;
    if a == b {
        return Err(Error::EqualOffsets(a));
    }
    check_exp(pr, "m", m, 0)?;
    check_exp(pr, "n", n, 0)?;
    let top = pr.order();
    let d = pr.sub(a, b);
    let edge = |e: i64| e == 0 || e == top;
    Ok(if m == 0 && (1..top).contains(&n) {
        pr.mul(pr.sign(n + 1), pr.pow_signed(d, top - n))
    } else if n == top && (1..top).contains(&m) {
        pr.neg(pr.pow_signed(d, m))
    } else if edge(m) && edge(n) {
        pr.reduce(-2)
    } else {
        pr.neg(scaled_power(pr, pr.binom_unchecked(m, n), d, m - n))
    })
}

/// `Σ_{k ≢ -a} (a+k)^m / (a+k)^n`, the equal-offset case of [`ratio_pair`].
pub fn ratio_equal_offsets(pr: &Prime, a: Residue, m: i64, n: i64) -> Result<Residue> {
    check_offset(pr, "a", a, 0)?;
    check_exp(pr, "m", m, 1)?;
    check_exp(pr, "n", n, 1)?;
    Ok(match m.cmp(&n) {
        std::cmp::Ordering::Greater => power_sum(pr, (m - n) as u64),
        std::cmp::Ordering::Less => power_sum(pr, (pr.order() + m - n) as u64),
        std::cmp::Ordering::Equal => pr.p() - 1,
    })
}

/// `Σ_{k=0}^{p-1} (a+k)^m k^n`.
pub fn product_pair_k(pr: &Prime, a: Residue, m: i64, n: i64) -> Result<Residue> {
    check_offset(pr, "a", a, 1)?;
    check_exp(pr, "m", m, 1)?;
    check_exp(pr, "n", n, 1)?;
    let top = pr.order();
    if m == top && n == top {
        return Ok(pr.reduce(-2));
    }
    let c = pr.binom_unchecked(m, top - n);
    Ok(pr.neg(scaled_power(pr, c, a, m + n - top)))
}

/// `Σ_{k=0}^{p-1} (a+k)^m (b+k)^n` for distinct nonzero `a`, `b`.
pub fn product_pair(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64) -> Result<Residue> {
    check_offset(pr, "a", a, 1)?;
    check_offset(pr, "b", b, 1)?;
    if a == b {
        return Err(Error::EqualOffsets(a));
    }
    check_exp(pr, "m", m, 1)?;
    check_exp(pr, "n", n, 1)?;
    let top = pr.order();
    if m == top && n == top {
        return Ok(pr.reduce(-2));
    }
    let d = pr.sub(a, b);
    let c = pr.binom_unchecked(m, top - n);
    Ok(pr.neg(scaled_power(pr, c, d, pr.fermat_reduce(m + n))))
}

fn check_triple_offsets(pr: &Prime, a: Residue, b: Residue) -> Result<()> {
    check_offset(pr, "a", a, 1)?;
    check_offset(pr, "b", b, 1)?;
    if a == b {
        return Err(Error::EqualOffsets(a));
    }
    Ok(())
}

/// `Σ_j C(m, level-j) C(n, j) a^{level-j} b^j` over `j` in `lo..=hi`, with
/// out-of-range binomials contributing nothing.
fn weighted_convolution(pr: &Prime, tp: &TripleParams, level: i64, lo: i64, hi: i64) -> Residue {
    let mut acc = 0;
    for j in lo.max(0)..=hi {
        let c = pr.mul(
            pr.binom_unchecked(tp.m, level - j),
            pr.binom_unchecked(tp.n, j),
        );
        if c != 0 {
            let t = pr.mul(
                c,
                pr.mul(pr.pow_signed(tp.a, level - j), pr.pow_signed(tp.b, j)),
            );
            acc = pr.add(acc, t);
        }
    }
    acc
}

/// `Σ_{j=0}^{M} C(m,M-j) C(n,j) a^{M-j} b^j`.
pub fn triple_i1(tp: &TripleParams) -> Residue {
    let big_m = tp.big_m();
    weighted_convolution(&tp.pr, tp, big_m, 0, big_m)
}

/// The mirrored form `Σ_{j=0}^{M} C(m,j) C(n,M-j) a^j b^{M-j}`.
pub fn triple_i1_mirrored(tp: &TripleParams) -> Residue {
    let pr = &tp.pr;
    let big_m = tp.big_m();
    let mut acc = 0;
    for j in 0..=big_m {
        let c = pr.mul(
            pr.binom_unchecked(tp.m, j),
            pr.binom_unchecked(tp.n, big_m - j),
        );
        if c != 0 {
            acc = pr.add(
                acc,
                pr.mul(
                    c,
                    pr.mul(pr.pow(tp.a, j as u64), pr.pow_signed(tp.b, big_m - j)),
                ),
            );
        }
    }
    acc
}

/// `Σ_{j=M-m}^{n} C(m,M-j) C(n,j) a^{M-j} b^j`.
pub fn triple_i2(tp: &TripleParams) -> Residue {
    let big_m = tp.big_m();
    weighted_convolution(&tp.pr, tp, big_m, big_m - tp.m, tp.n)
}

/// `Σ_{j=0}^{R} C(m,R-j) C(n,j) a^{R-j} b^j`.
pub fn triple_i3(tp: &TripleParams) -> Residue {
    let big_r = tp.big_r();
    weighted_convolution(&tp.pr, tp, big_r, 0, big_r)
}

/// `Σ_{k=0}^{p-1} (a+k)^m (b+k)^n k^s` split by which multiples of `p-1`
/// the total degree reaches.
pub fn triple_binomial(tp: &TripleParams) -> Result<Residue> {
    let pr = &tp.pr;
    check_triple_offsets(pr, tp.a, tp.b)?;
    if tp.c != 0 {
        return Err(Error::HypothesisViolation(
            "third offset must be 0 (k-term form)".into(),
        ));
    }
    let top = pr.order();
    let total = tp.m + tp.n + tp.s;
    Ok(if tp.m == top && tp.n == top && tp.s == top {
        pr.reduce(-3)
    } else if total < top {
        0
    } else if total < 2 * top {
        pr.neg(triple_i1(tp))
    } else {
        pr.neg(pr.add(triple_i2(tp), triple_i3(tp)))
    })
}

/// `Σ_{k=0}^{p-1} (a+k)^m (b+k)^n k`.
pub fn triple_s1(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64) -> Result<Residue> {
    check_triple_offsets(pr, a, b)?;
    check_exp(pr, "m", m, 1)?;
    check_exp(pr, "n", n, 1)?;
    let top = pr.order();
    let d = pr.sub(a, b);
    let d_pm2 = pr.pow_signed(d, top - 1);
    Ok(if m == top && n == top {
        pr.add(a, b)
    } else if m == top && n == top - 1 {
        pr.sub(pr.reduce(-2), pr.mul(b, d_pm2))
    } else if m == top - 1 && n == top {
        pr.add(pr.reduce(-2), pr.mul(a, d_pm2))
    } else {
        let p = top + 1;
        let first = scaled_power(
            pr,
            pr.binom_unchecked(m, p - n - 2),
            d,
            pr.fermat_reduce(m + n + 1),
        );
        let second = scaled_power(
            pr,
            pr.binom_unchecked(m, p - n - 1),
            d,
            pr.fermat_reduce(m + n),
        );
        pr.sub(pr.mul(b, second), first)
    })
}

/// `Σ_{k=0}^{p-1} (a+k)^m (b+k)^n k²`.
pub fn triple_s2(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64) -> Result<Residue> {
    check_triple_offsets(pr, a, b)?;
    check_exp(pr, "m", m, 1)?;
    check_exp(pr, "n", n, 1)?;
    let top = pr.order();
    let p = top + 1;
    let d = pr.sub(a, b);
    let d_pm2 = pr.pow_signed(d, p - 2);
    let (a2, b2) = (pr.mul(a, a), pr.mul(b, b));
    Ok(if m == top && n == top {
        pr.neg(pr.add(a2, b2))
    } else if m == top && n == top - 1 {
        pr.add(pr.mul(2, b), pr.mul(a2, d_pm2))
    } else if m == top - 1 && n == top {
        pr.sub(pr.mul(2, a), pr.mul(b2, d_pm2))
    } else if m == top - 1 && n == top - 1 {
        let t = pr.mul(pr.mul(2, pr.mul(a, b)), pr.pow_signed(d, p - 3));
        pr.sub(t, 1)
    } else {
        let t0 = scaled_power(
            pr,
            pr.binom_unchecked(m, p - n - 3),
            d,
            pr.fermat_reduce(m + n + 2),
        );
        let t1 = scaled_power(
            pr,
            pr.binom_unchecked(m, p - n - 2),
            d,
            pr.fermat_reduce(m + n + 1),
        );
        let t2 = scaled_power(
            pr,
            pr.binom_unchecked(m, p - n - 1),
            d,
            pr.fermat_reduce(m + n),
        );
        let j = pr.sub(pr.mul(pr.mul(2, b), t1), pr.add(t0, pr.mul(b2, t2)));
        // m + n + 2 = 2(p-1) with one exponent at p-1 picks up a second power sum
        if (m, n) == (top - 2, top) || (m, n) == (top, top - 2) {
            pr.sub(j, 1)
        } else {
            j
        }
    })
}

/// `Σ_{k=0}^{p-1} (a+k)^m (b+k)^n k^s` for arbitrary `s`.
pub fn triple_general(
    pr: &Prime,
    a: Residue,
    b: Residue,
    m: i64,
    n: i64,
    s: i64,
) -> Result<Residue> {
    check_triple_offsets(pr, a, b)?;
    let tp = TripleParams::new(pr, a, b, 0, m, n, s)?;
    let top = pr.order();
    if m == top && n == top && s == top {
        return Ok(pr.reduce(-3));
    }
    if m == top {
        let first = scaled_power(pr, pr.binom_unchecked(n, top - s), b, n + s - top);
        let second = pr.mul(pr.pow(pr.sub(b, a), n as u64), pr.pow(pr.neg(a), s as u64));
        return Ok(pr.neg(pr.add(first, second)));
    }
    let big_m = tp.big_m();
    let big_r = tp.big_r();
    let low = weighted_convolution(pr, &tp, big_r, 0, big_m - m - 1);
    let high = weighted_convolution(pr, &tp, big_m, big_m - m, n);
    Ok(pr.neg(pr.add(low, high)))
}

/// Known constant values of special sum shapes, when one applies.
///
/// Covers pure products via the small-total-degree cases (sum of exponents
/// below `p-1`, equal to `p-1`, `p`, or `p+1` for three factors, or all
/// exponents `p-1`), the two-term ratio with `m < n`, and the three-term
/// ratios that vanish by degree.
pub fn quick_case(spec: &SumSpec) -> Option<Residue> {
    let pr = &spec.pr;
    let top = pr.order();
    let terms = &spec.terms;
    if terms.is_empty() {
        return None;
    }
    let distinct = {
        let mut seen: Vec<Residue> = terms.iter().map(|t| t.offset).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == terms.len()
    };
    if !distinct {
        return None;
    }

    if spec.is_pure_product() {
        let count = terms.len() as i64;
        let total: i64 = terms.iter().map(|t| t.exp).sum();
        if terms.iter().all(|t| t.exp == top) {
            return Some(pr.reduce(-count));
        }
        if total < top {
            return Some(0);
        }
        if total == top {
            return Some(pr.reduce(-1));
        }
        if total == top + 1 {
            let weighted = terms
                .iter()
                .fold(0, |acc, t| pr.add(acc, pr.mul(pr.reduce(t.exp), t.offset)));
            return Some(pr.neg(weighted));
        }
        if total == top + 2 && terms.len() == 3 {
            let c = terms[2].offset;
            let (a, b) = (pr.sub(terms[0].offset, c), pr.sub(terms[1].offset, c));
            let (m, n) = (terms[0].exp, terms[1].exp);
            let v = pr.add(
                pr.add(
                    pr.mul(pr.binom_unchecked(m, 2), pr.mul(a, a)),
                    pr.mul(pr.reduce(m * n), pr.mul(a, b)),
                ),
                pr.mul(pr.binom_unchecked(n, 2), pr.mul(b, b)),
            );
            return Some(pr.neg(v));
        }
        return None;
    }

    if terms.len() == 2 && terms[0].exp >= 1 && terms[1].exp < 0 {
        let (a, b) = (terms[0].offset, terms[1].offset);
        let (m, n) = (terms[0].exp, -terms[1].exp);
        let expected = [pr.neg(a), pr.neg(b)].into_iter().collect();
        if spec.exclusions == expected && m < n && (1..top).contains(&m) && (1..top).contains(&n) {
            return Some(0);
        }
    }

    if terms.len() == 3
        && terms.iter().all(|t| t.exp != 0)
        && spec.exclusions == auto_exclusions(pr, terms)
    {
        let (num, den): (Vec<&Term>, Vec<&Term>) = terms.iter().partition(|t| t.exp > 0);
        let den_ok = den.iter().all(|t| -t.exp != top);
        let num_sum: i64 = num.iter().map(|t| t.exp).sum();
        let den_sum: i64 = den.iter().map(|t| -t.exp).sum();
        let vanishes = match den.len() {
            1 => num_sum < den_sum && den_ok,
            2 => den_sum - num_sum > top && den_ok,
            3 => den_sum > 2 * top && den_ok,
            _ => false,
        };
        if vanishes {
            return Some(0);
        }
    }
    None
}

/// Rewrites a sum as an equivalent all-positive-exponent sum whose last
/// offset is 0.
///
/// A denominator `(a+k)^n` becomes `(a+k)^{p-1-n}` and its excluded zero is
/// dropped, since the new factor vanishes there. Repeated offsets are merged.
/// Exponent-0 factors are removed, keeping their exclusions.
pub fn normalize_spec(spec: &SumSpec) -> Result<SumSpec> {
    let pr = &spec.pr;
    let top = pr.order();
    let mut merged: BTreeMap<Residue, (usize, i64)> = BTreeMap::new();
    for (pos, t) in spec.terms.iter().enumerate() {
        let e = if t.exp < 0 {
            if -t.exp == top {
                return Err(Error::ConversionInvalid(t.exp));
            }
            top + t.exp
        } else {
            t.exp
        };
        if e == 0 {
            continue;
        }
        let slot = merged.entry(t.offset).or_insert((pos, 0));
        slot.1 += e;
        if slot.1 > top {
            slot.1 -= top;
        }
    }
    let mut terms: Vec<(usize, Term)> = merged
        .into_iter()
        .map(|(offset, (pos, e))| (pos, Term::new(offset, e)))
        .collect();
    terms.sort_by_key(|&(pos, _)| pos);
    let terms: Vec<Term> = terms.into_iter().map(|(_, t)| t).collect();

    let exclusions = spec
        .exclusions
        .iter()
        .copied()
        .filter(|&k| !terms.iter().any(|t| (t.offset + k) % pr.p() == 0))
        .collect();
    let product = SumSpec {
        pr: pr.clone(),
        terms,
        exclusions,
    };
    Ok(match product.terms.last() {
        Some(last) => product.shifted(-(last.offset as i64)),
        None => product,
    })
}
