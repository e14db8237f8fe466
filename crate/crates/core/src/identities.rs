//! Binomial congruences. Every checker evaluates both sides separately.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{Prime, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityInstance {
    pub name: &'static str,
    pub params: Vec<(&'static str, i64)>,
    pub lhs: Residue,
    pub rhs: Residue,
    pub holds: bool,
}

impl IdentityInstance {
    fn new(
        name: &'static str,
        params: Vec<(&'static str, i64)>,
        lhs: Residue,
        rhs: Residue,
    ) -> Self {
        IdentityInstance {
            name,
            params,
            lhs,
            rhs,
            holds: lhs == rhs,
        }
    }
}

fn range_check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::RangeViolation(what()))
    }
}

/// `C(n,k) C(k,s) = C(n,s) C(n-s,k-s)`.
pub fn cancellation(pr: &Prime, n: i64, k: i64, s: i64) -> Result<IdentityInstance> {
    range_check(0 <= s && s <= k && k <= n && n < pr.p() as i64, || {
        format!("need 0 <= s <= k <= n < p, got n={n} k={k} s={s}")
    })?;
    let lhs = pr.mul(pr.binom(n, k)?, pr.binom(k, s)?);
    let rhs = pr.mul(pr.binom(n, s)?, pr.binom(n - s, k - s)?);
    Ok(IdentityInstance::new(
        "cancellation",
        vec![("n", n), ("k", k), ("s", s)],
        lhs,
        rhs,
    ))
}

/// `C(k,s) ≡ (-1)^{k+s} C(p-1-s, k-s)` and `C(k,s) ≡ (-1)^s C(p-1-k+s, s)`.
pub fn semi_symmetry(pr: &Prime, k: i64, s: i64) -> Result<(IdentityInstance, IdentityInstance)> {
    let top = pr.order();
    range_check(0 <= s && s <= k && k <= top, || {
        format!("need 0 <= s <= k < p, got k={k} s={s}")
    })?;
    let lhs = pr.binom(k, s)?;
    let first = pr.mul(pr.sign(k + s), pr.binom(top - s, k - s)?);
    let second = pr.mul(pr.sign(s), pr.binom(top - k + s, s)?);
    let params = vec![("k", k), ("s", s)];
    Ok((
        IdentityInstance::new("semi_symmetry", params.clone(), lhs, first),
        IdentityInstance::new("semi_symmetry_reflected", params, lhs, second),
    ))
}

/// `C(m, p-1-n) ≡ (-1)^{m+n} C(n, p-1-m)`.
pub fn transpose_binomial(pr: &Prime, m: i64, n: i64) -> Result<IdentityInstance> {
    let top = pr.order();
    range_check((0..=top).contains(&m) && (0..=top).contains(&n), || {
        format!("need 0 <= m, n <= p-1, got m={m} n={n}")
    })?;
    let lhs = pr.binom(m, top - n)?;
    let rhs = pr.mul(pr.sign(m + n), pr.binom(n, top - m)?);
    Ok(IdentityInstance::new(
        "transpose",
        vec![("m", m), ("n", n)],
        lhs,
        rhs,
    ))
}

/// `M = m + n + s - (p-1)`, checked against `0 <= M < p-1`. The corner
/// `m = n = p-1, s = 0` (where `M = p-1`) is also admitted.
fn shifted_total(pr: &Prime, m: i64, n: i64, s: i64) -> Result<i64> {
    let top = pr.order();
    for (name, v) in [("m", m), ("n", n), ("s", s)] {
        if !(0..=top).contains(&v) {
            return Err(Error::HypothesisViolation(format!(
                "{name} = {v} outside [0, {top}]"
            )));
        }
    }
    let big_m = m + n + s - top;
    let corner = m == top && n == top && s == 0;
    if big_m < 0 || (big_m >= top && !corner) {
        return Err(Error::HypothesisViolation(format!(
            "M = {big_m} outside [0, {})",
            top
        )));
    }
    Ok(big_m)
}

/// `(-1)^j C(m,M-j) C(n,j) ≡ Σ_{k=0}^{s} C(s,k) C(m,M-k) C(M-k,j-k)`.
pub fn cong_general(pr: &Prime, m: i64, n: i64, s: i64, j: i64) -> Result<IdentityInstance> {
    let big_m = shifted_total(pr, m, n, s)?;
    if !(0..=big_m).contains(&j) {
        return Err(Error::HypothesisViolation(format!(
            "j = {j} outside [0, {big_m}]"
        )));
    }
    let b = |n, k| pr.binom_unchecked(n, k);
    let lhs = pr.mul(pr.sign(j), pr.mul(b(m, big_m - j), b(n, j)));
    let mut rhs = 0;
    for k in 0..=s.min(big_m) {
        let term = pr.mul(b(s, k), pr.mul(b(m, big_m - k), b(big_m - k, j - k)));
        rhs = pr.add(rhs, term);
    }
    Ok(IdentityInstance::new(
        "cong_general",
        vec![("m", m), ("n", n), ("s", s), ("j", j), ("M", big_m)],
        lhs,
        rhs,
    ))
}

/// Left side as in [`cong_general`], right side in the expanded form written
/// out for `s = 0, 1, 2`.
pub fn cong_printed(pr: &Prime, m: i64, n: i64, s: i64, j: i64) -> Result<IdentityInstance> {
    let general = cong_general(pr, m, n, s, j)?;
    let big_m = m + n + s - pr.order();
    // tops M-1 and M-2 may go negative; those terms vanish
    let b = |top: i64, k: i64| {
        if top < 0 {
            0
        } else {
            pr.binom_unchecked(top, k)
        }
    };
    let rhs = match s {
        0 => pr.mul(b(m, big_m), b(big_m, j)),
        1 => pr.add(
            pr.mul(b(m, big_m), b(big_m, j)),
            pr.mul(b(m, big_m - 1), b(big_m - 1, j - 1)),
        ),
        2 => {
            let t0 = pr.mul(b(m, big_m), b(big_m, j));
            let t1 = pr.mul(2, pr.mul(b(m, big_m - 1), b(big_m - 1, j - 1)));
            let t2 = pr.mul(b(m, big_m - 2), b(big_m - 2, j - 2));
            pr.add(pr.add(t0, t1), t2)
        }
        _ => return Err(Error::BadParams(format!("no expanded form for s = {s}"))),
    };
    Ok(IdentityInstance::new(
        "cong_printed",
        general.params,
        general.lhs,
        rhs,
    ))
}

/// `Σ_{j=0}^{top} c(j) x^{deg-j} y^j` by Horner's rule in `x`.
fn homogeneous(
    pr: &Prime,
    x: Residue,
    y: Residue,
    deg: i64,
    top: i64,
    c: impl Fn(i64) -> Residue,
) -> Residue {
    let mut acc = 0;
    let mut y_pow = 1;
    for j in 0..=top {
        acc = pr.add(pr.mul(acc, x), pr.mul(c(j), y_pow));
        y_pow = pr.mul(y_pow, y);
    }
    pr.mul(acc, pr.pow(x, (deg - top) as u64))
}

fn comp_lhs(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64, big_m: i64) -> Residue {
    homogeneous(pr, a, b, big_m, big_m, |j| {
        pr.mul(pr.binom_unchecked(m, big_m - j), pr.binom_unchecked(n, j))
    })
}

fn comp_check(pr: &Prime, a: Residue, b: Residue, m: i64, n: i64, s: i64) -> Result<i64> {
    if a == b {
        return Err(Error::EqualOffsets(a));
    }
    if !(1..pr.p()).contains(&a) || !(1..pr.p()).contains(&b) {
        return Err(Error::HypothesisViolation(format!(
            "offsets {a}, {b} must lie in [1, p-1]"
        )));
    }
    shifted_total(pr, m, n, s)
}

/// `Σ_j C(m,M-j) C(n,j) a^{M-j} b^j ≡ Σ_{k=0}^{s} C(m,M-k) C(s,k) (a-b)^{M-k} (-b)^k`.
pub fn comp_general(
    pr: &Prime,
    a: Residue,
    b: Residue,
    m: i64,
    n: i64,
    s: i64,
) -> Result<IdentityInstance> {
    let big_m = comp_check(pr, a, b, m, n, s)?;
    let lhs = comp_lhs(pr, a, b, m, n, big_m);
    let rhs = homogeneous(pr, pr.sub(a, b), pr.neg(b), big_m, s.min(big_m), |k| {
        pr.mul(pr.binom_unchecked(m, big_m - k), pr.binom_unchecked(s, k))
    });
    Ok(IdentityInstance::new(
        "comp_general",
        vec![
            ("a", a as i64),
            ("b", b as i64),
            ("m", m),
            ("n", n),
            ("s", s),
            ("M", big_m),
        ],
        lhs,
        rhs,
    ))
}

/// Left side as in [`comp_general`], right side in the closed form written
/// out for `s = 0, 1, 2`.
pub fn comp_printed(
    pr: &Prime,
    a: Residue,
    b: Residue,
    m: i64,
    n: i64,
    s: i64,
) -> Result<IdentityInstance> {
    let big_m = comp_check(pr, a, b, m, n, s)?;
    let lhs = comp_lhs(pr, a, b, m, n, big_m);
    let p = pr.p() as i64;
    let d = pr.sub(a, b);
    let bin = |k: i64| pr.binom_unchecked(m, k);
    let dpow = |e: i64| pr.pow(d, e as u64);
    let rhs = match s {
        0 => pr.mul(dpow(big_m), bin(p - n - 1)),
        1 => pr.sub(
            pr.mul(dpow(m + n + 1), bin(p - n - 2)),
            pr.mul(b, pr.mul(dpow(m + n), bin(p - n - 1))),
        ),
        2 => {
            let t0 = pr.mul(dpow(m + n + 2), bin(p - n - 3));
            let t1 = pr.mul(pr.mul(2, b), pr.mul(dpow(m + n + 1), bin(p - n - 2)));
            let t2 = pr.mul(pr.mul(b, b), pr.mul(dpow(m + n), bin(p - n - 1)));
            pr.add(pr.sub(t0, t1), t2)
        }
        _ => return Err(Error::BadParams(format!("no closed form for s = {s}"))),
    };
    Ok(IdentityInstance::new(
        "comp_printed",
        vec![
            ("a", a as i64),
            ("b", b as i64),
            ("m", m),
            ("n", n),
            ("s", s),
            ("M", big_m),
        ],
        lhs,
        rhs,
    ))
}

/// `Σ_j C(m,M-j) C(n,j) = C(m+n, M)`.
pub fn vandermonde(pr: &Prime, m: i64, n: i64, big_m: i64) -> Result<IdentityInstance> {
    range_check(
        m >= 0 && n >= 0 && m + n < pr.p() as i64 && (0..=m + n).contains(&big_m),
        || format!("need m + n < p and 0 <= M <= m + n, got m={m} n={n} M={big_m}"),
    )?;
    let lhs = (0..=big_m).fold(0, |acc, j| {
        pr.add(
            acc,
            pr.mul(pr.binom_unchecked(m, big_m - j), pr.binom_unchecked(n, j)),
        )
    });
    let rhs = pr.binom(m + n, big_m)?;
    Ok(IdentityInstance::new(
        "vandermonde",
        vec![("m", m), ("n", n), ("M", big_m)],
        lhs,
        rhs,
    ))
}

/// Families that can be swept over their whole precondition grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityFamily {
    Cancellation,
    SemiSymmetry,
    Transpose,
    /// `s = None` sweeps every `s`.
    Cong {
        s: Option<i64>,
    },
    /// Expanded right side for a fixed `s` in `0..=2`.
    CongPrinted {
        s: i64,
    },
    Comp {
        s: Option<i64>,
    },
    CompPrinted {
        s: i64,
    },
    Vandermonde,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridOutcome {
    pub checked: u64,
    pub failures: Vec<IdentityInstance>,
}

impl GridOutcome {
    fn merge(mut self, other: GridOutcome) -> GridOutcome {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self
    }

    fn record(&mut self, inst: IdentityInstance) {
        self.checked += 1;
        if !inst.holds {
            self.failures.push(inst);
        }
    }
}

/// Checks every admissible parameter tuple of `family` modulo `pr`.
///
/// Failures are reported in lexicographic parameter order.
pub fn check_grid(pr: &Prime, family: IdentityFamily) -> GridOutcome {
    let top = pr.order();
    let s_range = |s: Option<i64>| match s {
        Some(s) => s..=s,
        None => 0..=top,
    };
    // outer loop is parallel; each worker returns its own outcome
    let outer: Vec<i64> = match family {
        IdentityFamily::Comp { .. } | IdentityFamily::CompPrinted { .. } => (1..=top).collect(),
        _ => (0..=top).collect(),
    };
    outer
        .into_par_iter()
        .map(|x| {
            let mut out = GridOutcome::default();
            match family {
                IdentityFamily::Cancellation => {
                    for k in 0..=x {
                        for s in 0..=k {
                            out.record(cancellation(pr, x, k, s).unwrap());
                        }
                    }
                }
                IdentityFamily::SemiSymmetry => {
                    for s in 0..=x {
                        let (first, second) = semi_symmetry(pr, x, s).unwrap();
                        out.record(first);
                        out.record(second);
                    }
                }
                IdentityFamily::Transpose => {
                    for n in 0..=top {
                        out.record(transpose_binomial(pr, x, n).unwrap());
                    }
                }
                IdentityFamily::Cong { .. } | IdentityFamily::CongPrinted { .. } => {
                    let (s, printed) = match family {
                        IdentityFamily::Cong { s } => (s, false),
                        IdentityFamily::CongPrinted { s } => (Some(s), true),
                        _ => unreachable!(),
                    };
                    for n in 0..=top {
                        for s in s_range(s) {
                            let Ok(big_m) = shifted_total(pr, x, n, s) else {
                                continue;
                            };
                            for j in 0..=big_m {
                                let inst = if printed {
                                    cong_printed(pr, x, n, s, j)
                                } else {
                                    cong_general(pr, x, n, s, j)
                                };
                                out.record(inst.unwrap());
                            }
                        }
                    }
                }
                IdentityFamily::Comp { .. } | IdentityFamily::CompPrinted { .. } => {
                    let (s, printed) = match family {
                        IdentityFamily::Comp { s } => (s, false),
                        IdentityFamily::CompPrinted { s } => (Some(s), true),
                        _ => unreachable!(),
                    };
                    let a = x as u64;
                    for b in (1..=top as u64).filter(|&b| b != a) {
                        for m in 0..=top {
                            for n in 0..=top {
                                for s in s_range(s) {
                                    if shifted_total(pr, m, n, s).is_err() {
                                        continue;
                                    }
                                    let inst = if printed {
                                        comp_printed(pr, a, b, m, n, s)
                                    } else {
                                        comp_general(pr, a, b, m, n, s)
                                    };
                                    out.record(inst.unwrap());
                                }
                            }
                        }
                    }
                }
                IdentityFamily::Vandermonde => {
                    for n in 0..=(top - x) {
                        for big_m in 0..=(x + n) {
                            out.record(vandermonde(pr, x, n, big_m).unwrap());
                        }
                    }
                }
            }
            out
        })
        .reduce(GridOutcome::default, GridOutcome::merge)
}
