//! Grid sweeps comparing closed forms against brute force.
//!
//! Each registered check names a parameter domain and a list of strategies.
//! A tuple passes when every strategy returns the same residue. Domains small
//! enough for the budget are enumerated; larger ones are sampled with a
//! seeded ChaCha stream, so reports are reproducible.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closedforms::{self as cf, TripleParams};
use crate::error::{Error, Result};
use crate::general::{self, GeneralSumParams};
use crate::identities::{check_grid, IdentityFamily};
use crate::modarith::{Prime, Residue};
use crate::oracle::{self, SumSpec};
use crate::polyring::{symbolic_coeff_table, symbolic_sum_table, BiPolyZp};

pub const DEFAULT_BUDGET: u64 = 200_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Largest domain enumerated in full; bigger domains get this many samples.
    pub budget: u64,
    pub seed: u64,
    /// Check power-sum congruences modulo `p^2` where they are claimed.
    pub mod_p2: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
            mod_p2: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub params: Vec<i64>,
    pub expected: Option<Residue>,
    pub got: Option<Residue>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub title: String,
    pub prime: u64,
    pub grid_size: u64,
    pub exhaustive: bool,
    pub failures: Vec<Failure>,
    pub elapsed_ms: f64,
    pub strategies: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

struct Ctx<'a> {
    pr: &'a Prime,
    mod_p2: bool,
}

type CheckFn = fn(&Ctx, &[i64]) -> Result<Vec<Residue>>;
type FilterFn = fn(&Prime, &[i64]) -> bool;

/// Product of inclusive ranges, thinned by a filter.
struct Domain {
    ranges: Vec<(i64, i64)>,
    filter: FilterFn,
}

enum Kind {
    Grid {
        domains: fn(&Prime) -> Vec<Domain>,
        check: CheckFn,
    },
    Identity(&'static [IdentityFamily]),
}

pub struct Theorem {
    pub id: &'static str,
    pub title: &'static str,
    strategies: &'static [&'static str],
    kind: Kind,
}

impl Theorem {
    pub fn strategies(&self) -> &'static [&'static str] {
        self.strategies
    }
}

fn any(_: &Prime, _: &[i64]) -> bool {
    true
}

fn top(pr: &Prime) -> i64 {
    pr.order()
}

fn dom(ranges: Vec<(i64, i64)>, filter: FilterFn) -> Vec<Domain> {
    vec![Domain { ranges, filter }]
}

fn u(x: i64) -> Residue {
    x as Residue
}

fn brute(pr: &Prime, terms: &[(Residue, i64)], excl: &[i64]) -> Result<Residue> {
    oracle::brute_sum(&SumSpec::new(
        pr,
        terms.iter().copied(),
        excl.iter().copied(),
    )?)
}

fn triple_brute(pr: &Prime, t: &[i64]) -> Result<Residue> {
    brute(pr, &[(u(t[0]), t[2]), (u(t[1]), t[3]), (0, t[4])], &[])
}

fn disagree(what: &str, t: &[i64]) -> Error {
    Error::Disagreement(format!("{what} at {t:?}"))
}

fn distinct2(_: &Prime, t: &[i64]) -> bool {
    t[0] != t[1]
}

fn distinct3(_: &Prime, t: &[i64]) -> bool {
    t[0] != t[1] && t[1] != t[2] && t[0] != t[2]
}

fn general_domains(pr: &Prime, sizes: std::ops::RangeInclusive<usize>) -> Vec<Domain> {
    sizes
        .map(|n| {
            let mut ranges = vec![(0, top(pr)); n];
            ranges.extend(vec![(1, top(pr)); n]);
            Domain {
                ranges,
                filter: |_, t| {
                    let n = t.len() / 2;
                    (0..n).all(|i| (i + 1..n).all(|j| t[i] != t[j]))
                },
            }
        })
        .collect()
}

fn general_params(pr: &Prime, t: &[i64]) -> Result<GeneralSumParams> {
    let n = t.len() / 2;
    let offsets: Vec<Residue> = t[..n].iter().map(|&x| u(x)).collect();
    GeneralSumParams::new(pr, &offsets, &t[n..])
}

fn general_brute(gp: &GeneralSumParams) -> Result<Residue> {
    oracle::brute_sum(&gp.to_spec())
}

/// Three-term ratio shapes: one, two or three denominators.
fn ratio_terms(t: &[i64]) -> Vec<(Residue, i64)> {
    let (a, b, c, m, n, s, form) = (u(t[0]), u(t[1]), u(t[2]), t[3], t[4], t[5], t[6]);
    match form {
        0 => vec![(a, m), (b, n), (c, -s)],
        1 => vec![(a, m), (b, -n), (c, -s)],
        _ => vec![(a, -m), (b, -n), (c, -s)],
    }
}

fn vanishing_ratio(pr: &Prime, t: &[i64]) -> bool {
    let q = pr.order();
    let (m, n, s) = (t[3], t[4], t[5]);
    distinct3(pr, t)
        && match t[6] {
            0 => m + n < s && s != q,
            1 => q < n + s - m && n != q && s != q,
            _ => 2 * q < m + n + s && m != q && n != q && s != q,
        }
}

fn table_check(pr: &Prime, t: &[i64], levels: usize) -> Result<Vec<Residue>> {
    let mismatches = table_mismatches(pr, t[0], t[1], levels)?;
    if mismatches > 0 {
        return Err(disagree(&format!("{mismatches} rows"), t));
    }
    Ok(vec![0, 0])
}

fn registry() -> Vec<Theorem> {
    use IdentityFamily as F;
    vec![
        Theorem {
            id: "thm1.1",
            title: "power sums of residues",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(0, 3 * top(pr))], any),
                check: |c, t| {
                    // exponents beyond p - 1 are outside SumSpec's range
                    let direct =
                        (1..c.pr.p()).fold(0, |acc, k| c.pr.add(acc, c.pr.pow(k, u(t[0]))));
                    Ok(vec![cf::power_sum(c.pr, u(t[0])), direct])
                },
            },
        },
        Theorem {
            id: "thm1.2",
            title: "inverse power sums of exponent 1, 2, 3",
            strategies: &["zero", "brute"],
            kind: Kind::Grid {
                domains: |_| dom(vec![(1, 3)], any),
                check: |c, t| {
                    let e = t[0] as u64;
                    let full = oracle::brute_sum_mod_p2(c.pr, e);
                    let lifted = c.mod_p2 && (e == 1 || (e == 3 && c.pr.p() > 5));
                    Ok(vec![0, if lifted { full } else { full % c.pr.p() }])
                },
            },
        },
        Theorem {
            id: "thm1.3",
            title: "odd and even inverse power sums",
            strategies: &["zero", "odd", "even"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr) / 2)], any),
                check: |c, t| {
                    let n = t[0] as u64;
                    let p = c.pr.p();
                    let odd = oracle::brute_sum_mod_p2(c.pr, 2 * n - 1);
                    let odd = if c.mod_p2 { odd } else { odd % p };
                    Ok(vec![0, odd, oracle::brute_sum_mod_p2(c.pr, 2 * n) % p])
                },
            },
        },
        Theorem {
            id: "thm1.3-interior",
            title: "odd and even inverse power sums, 2n <= p - 3",
            strategies: &["zero", "odd", "even"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, (top(pr) - 2) / 2)], any),
                check: |c, t| {
                    let n = t[0] as u64;
                    let p = c.pr.p();
                    let odd = oracle::brute_sum_mod_p2(c.pr, 2 * n - 1);
                    let odd = if c.mod_p2 { odd } else { odd % p };
                    Ok(vec![0, odd, oracle::brute_sum_mod_p2(c.pr, 2 * n) % p])
                },
            },
        },
        Theorem {
            id: "thm2.1",
            title: "single ratio k^m / (a-k)^n",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)), (0, top(pr)), (0, top(pr))], any),
                check: |c, t| {
                    Ok(vec![
                        cf::ratio_single(c.pr, u(t[0]), t[1], t[2])?,
                        oracle::ratio_single_direct(c.pr, u(t[0]), t[1] as u64, t[2] as u64),
                    ])
                },
            },
        },
        Theorem {
            id: "rem2.2",
            title: "shifted power sums",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(0, top(pr)), (0, top(pr))], any),
                check: |c, t| {
                    let (a, m) = (u(t[0]), t[1]);
                    let excluded = brute(c.pr, &[(a, m)], &[-t[0]])?;
                    if m != 0 && brute(c.pr, &[(a, m)], &[])? != excluded {
                        return Err(disagree("full and excluded sums", t));
                    }
                    Ok(vec![cf::power_sum(c.pr, m as u64), excluded])
                },
            },
        },
        Theorem {
            id: "thm2.3",
            title: "ratio (a+k)^m / (b+k)^n",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| {
                    dom(
                        vec![(0, top(pr)), (0, top(pr)), (0, top(pr)), (0, top(pr))],
                        distinct2,
                    )
                },
                check: |c, t| {
                    Ok(vec![
                        cf::ratio_pair(c.pr, u(t[0]), u(t[1]), t[2], t[3])?,
                        brute(c.pr, &[(u(t[0]), t[2]), (u(t[1]), -t[3])], &[-t[0], -t[1]])?,
                    ])
                },
            },
        },
        Theorem {
            id: "cor2.4",
            title: "vanishing ratios with m < n",
            strategies: &["zero", "quick", "brute"],
            kind: Kind::Grid {
                domains: |pr| {
                    dom(
                        vec![
                            (0, top(pr)),
                            (0, top(pr)),
                            (1, top(pr) - 1),
                            (1, top(pr) - 1),
                        ],
                        |_, t| t[0] != t[1] && t[2] < t[3],
                    )
                },
                check: |c, t| {
                    let spec =
                        SumSpec::new(c.pr, [(u(t[0]), t[2]), (u(t[1]), -t[3])], [-t[0], -t[1]])?;
                    let quick =
                        cf::quick_case(&spec).ok_or_else(|| disagree("no quick case", t))?;
                    if t[0] >= 1
                        && oracle::ratio_single_direct(c.pr, u(t[0]), t[2] as u64, t[3] as u64) != 0
                    {
                        return Err(disagree("single ratio nonzero", t));
                    }
                    Ok(vec![0, quick, oracle::brute_sum(&spec)?])
                },
            },
        },
        Theorem {
            id: "rem2.5",
            title: "ratio with equal offsets",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(0, top(pr)), (1, top(pr)), (1, top(pr))], any),
                check: |c, t| {
                    let a = u(t[0]);
                    Ok(vec![
                        cf::ratio_equal_offsets(c.pr, a, t[1], t[2])?,
                        brute(c.pr, &[(a, t[1]), (a, -t[2])], &[-t[0]])?,
                    ])
                },
            },
        },
        Theorem {
            id: "thm2.6",
            title: "product (a+k)^m k^n",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 3], any),
                check: |c, t| {
                    Ok(vec![
                        cf::product_pair_k(c.pr, u(t[0]), t[1], t[2])?,
                        brute(c.pr, &[(u(t[0]), t[1]), (0, t[2])], &[])?,
                    ])
                },
            },
        },
        Theorem {
            id: "cor2.7",
            title: "transposed binomials",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::Transpose]),
        },
        Theorem {
            id: "thm2.8",
            title: "product (a+k)^m (b+k)^n",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 4], distinct2),
                check: |c, t| {
                    Ok(vec![
                        cf::product_pair(c.pr, u(t[0]), u(t[1]), t[2], t[3])?,
                        brute(c.pr, &[(u(t[0]), t[2]), (u(t[1]), t[3])], &[])?,
                    ])
                },
            },
        },
        Theorem {
            id: "cor2.9",
            title: "two-term products of low degree",
            strategies: &["closed", "quick", "brute"],
            kind: Kind::Grid {
                domains: |pr| {
                    dom(vec![(1, top(pr)); 4], |pr, t| {
                        t[0] != t[1] && t[2] + t[3] <= pr.p() as i64
                    })
                },
                check: |c, t| {
                    let pr = c.pr;
                    let (a, b, m, n) = (u(t[0]), u(t[1]), t[2], t[3]);
                    let (pair, k_form) = match (m + n).cmp(&top(pr)) {
                        std::cmp::Ordering::Less => (0, 0),
                        std::cmp::Ordering::Equal => (pr.p() - 1, pr.p() - 1),
                        std::cmp::Ordering::Greater => (
                            pr.mul(pr.reduce(m), pr.sub(b, a)),
                            pr.neg(pr.mul(pr.reduce(m), a)),
                        ),
                    };
                    if brute(pr, &[(a, m), (0, n)], &[])? != k_form {
                        return Err(disagree("k-form", t));
                    }
                    let spec = SumSpec::new(pr, [(a, m), (b, n)], [])?;
                    let quick =
                        cf::quick_case(&spec).ok_or_else(|| disagree("no quick case", t))?;
                    Ok(vec![pair, quick, oracle::brute_sum(&spec)?])
                },
            },
        },
        Theorem {
            id: "eq2",
            title: "cancellation identity",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::Cancellation]),
        },
        Theorem {
            id: "eq3",
            title: "semi-symmetry",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::SemiSymmetry]),
        },
        Theorem {
            id: "thm3.1",
            title: "triple product via binomial sums",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 5], distinct2),
                check: |c, t| {
                    let tp = TripleParams::new(c.pr, u(t[0]), u(t[1]), 0, t[2], t[3], t[4])?;
                    Ok(vec![cf::triple_binomial(&tp)?, triple_brute(c.pr, t)?])
                },
            },
        },
        Theorem {
            id: "cor3.2",
            title: "triple products of low degree",
            strategies: &["closed", "quick", "brute"],
            kind: Kind::Grid {
                domains: |pr| {
                    dom(vec![(1, top(pr)); 5], |pr, t| {
                        let q = top(pr);
                        t[0] != t[1]
                            && (t[2] + t[3] + t[4] <= q + 2
                                || (t[2] == q && t[3] == q && t[4] == q))
                    })
                },
                check: |c, t| {
                    let pr = c.pr;
                    let (a, b, m, n, s) = (u(t[0]), u(t[1]), t[2], t[3], t[4]);
                    let q = top(pr);
                    let total = m + n + s;
                    let printed = if m == q && n == q && s == q {
                        pr.neg(3)
                    } else if total < q {
                        0
                    } else if total == q {
                        pr.p() - 1
                    } else if total == q + 1 {
                        pr.neg(pr.add(pr.mul(pr.reduce(m), a), pr.mul(pr.reduce(n), b)))
                    } else {
                        let sq = |x: Residue| pr.mul(x, x);
                        let t1 = pr.mul(pr.binom(m, 2)?, sq(a));
                        let t2 = pr.mul(pr.mul(pr.reduce(m * n), a), b);
                        let t3 = pr.mul(pr.binom(n, 2)?, sq(b));
                        pr.neg(pr.add(pr.add(t1, t2), t3))
                    };
                    let spec = SumSpec::new(pr, [(a, m), (b, n), (0, s)], [])?;
                    let quick =
                        cf::quick_case(&spec).ok_or_else(|| disagree("no quick case", t))?;
                    Ok(vec![printed, quick, oracle::brute_sum(&spec)?])
                },
            },
        },
        Theorem {
            id: "lem3.3",
            title: "recurrence between linear-weight and plain products",
            strategies: &["closed", "via_b", "via_a"],
            kind: Kind::Grid {
                domains: |pr| {
                    dom(
                        vec![
                            (1, top(pr)),
                            (1, top(pr)),
                            (1, top(pr) - 1),
                            (1, top(pr) - 1),
                        ],
                        distinct2,
                    )
                },
                check: |c, t| {
                    let pr = c.pr;
                    let (a, b, m, n) = (u(t[0]), u(t[1]), t[2], t[3]);
                    let base = cf::product_pair(pr, a, b, m, n)?;
                    Ok(vec![
                        cf::triple_s1(pr, a, b, m, n)?,
                        pr.sub(cf::product_pair(pr, a, b, m, n + 1)?, pr.mul(b, base)),
                        pr.sub(cf::product_pair(pr, a, b, m + 1, n)?, pr.mul(a, base)),
                    ])
                },
            },
        },
        Theorem {
            id: "thm3.4",
            title: "triple product with weight k",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 4], distinct2),
                check: |c, t| {
                    let tuple = [t[0], t[1], t[2], t[3], 1];
                    Ok(vec![
                        cf::triple_s1(c.pr, u(t[0]), u(t[1]), t[2], t[3])?,
                        triple_brute(c.pr, &tuple)?,
                    ])
                },
            },
        },
        Theorem {
            id: "thm3.5",
            title: "triple product with weight k^2",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 4], distinct2),
                check: |c, t| {
                    let tuple = [t[0], t[1], t[2], t[3], 2];
                    Ok(vec![
                        cf::triple_s2(c.pr, u(t[0]), u(t[1]), t[2], t[3])?,
                        triple_brute(c.pr, &tuple)?,
                    ])
                },
            },
        },
        Theorem {
            id: "thm3.6",
            title: "triple product with weight k^s",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 5], distinct2),
                check: |c, t| {
                    Ok(vec![
                        cf::triple_general(c.pr, u(t[0]), u(t[1]), t[2], t[3], t[4])?,
                        triple_brute(c.pr, t)?,
                    ])
                },
            },
        },
        Theorem {
            id: "thm3.7",
            title: "binomial comparison, s = 1",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::CompPrinted { s: 1 }]),
        },
        Theorem {
            id: "thm3.8",
            title: "coefficient congruence, s = 1",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::CongPrinted { s: 1 }]),
        },
        Theorem {
            id: "thm3.9",
            title: "binomial comparison, s = 2",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::CompPrinted { s: 2 }]),
        },
        Theorem {
            id: "thm3.10",
            title: "coefficient congruence, s = 2",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::CongPrinted { s: 2 }]),
        },
        Theorem {
            id: "thm3.11",
            title: "coefficient congruence, any s",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::Cong { s: None }]),
        },
        Theorem {
            id: "cor3.12",
            title: "coefficient congruence and comparison, s = 0",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::CongPrinted { s: 0 }, F::CompPrinted { s: 0 }]),
        },
        Theorem {
            id: "thm3.13",
            title: "binomial comparison, any s",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::Comp { s: None }]),
        },
        Theorem {
            id: "cor3.14",
            title: "three-term ratios vanishing by degree",
            strategies: &["zero", "brute"],
            kind: Kind::Grid {
                domains: |pr| {
                    let q = top(pr);
                    dom(
                        vec![(0, q), (0, q), (0, q), (1, q), (1, q), (1, q), (0, 2)],
                        vanishing_ratio,
                    )
                },
                check: |c, t| {
                    let spec = SumSpec::with_auto_exclusions(c.pr, ratio_terms(t))?;
                    if cf::quick_case(&spec).is_some_and(|v| v != 0) {
                        return Err(disagree("quick case nonzero", t));
                    }
                    Ok(vec![0, oracle::brute_sum(&spec)?])
                },
            },
        },
        Theorem {
            id: "rem3.15",
            title: "ratios rewritten as products",
            strategies: &["brute", "normalized", "general"],
            kind: Kind::Grid {
                domains: |pr| {
                    let q = top(pr);
                    dom(
                        vec![
                            (0, q),
                            (0, q),
                            (0, q),
                            (1, q - 1),
                            (1, q - 1),
                            (1, q - 1),
                            (0, 2),
                        ],
                        distinct3,
                    )
                },
                check: |c, t| {
                    let spec = SumSpec::with_auto_exclusions(c.pr, ratio_terms(t))?;
                    let norm = cf::normalize_spec(&spec)?;
                    let offsets: Vec<Residue> = norm.terms.iter().map(|x| x.offset).collect();
                    let exps: Vec<i64> = norm.terms.iter().map(|x| x.exp).collect();
                    let gp = GeneralSumParams::new(c.pr, &offsets, &exps)?;
                    Ok(vec![
                        oracle::brute_sum(&spec)?,
                        oracle::brute_sum(&norm)?,
                        general::multi_index_j(&gp),
                    ])
                },
            },
        },
        Theorem {
            id: "cor3.16",
            title: "rescaling a triple product",
            strategies: &["closed", "scaled", "brute"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 5], distinct2),
                check: |c, t| {
                    let pr = c.pr;
                    let (a, b, m, n, s) = (u(t[0]), u(t[1]), t[2], t[3], t[4]);
                    let ratio = pr.mul(a, pr.inv(b)?);
                    let big_m = m + n + s - top(pr);
                    Ok(vec![
                        cf::triple_general(pr, a, b, m, n, s)?,
                        pr.mul(
                            pr.pow_signed(b, big_m),
                            cf::triple_general(pr, ratio, 1, m, n, s)?,
                        ),
                        triple_brute(pr, t)?,
                    ])
                },
            },
        },
        Theorem {
            id: "thm4.1",
            title: "n-term product via bounded compositions",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| general_domains(pr, 1..=4),
                check: |c, t| {
                    let gp = general_params(c.pr, t)?;
                    Ok(vec![general::multi_index_j(&gp), general_brute(&gp)?])
                },
            },
        },
        Theorem {
            id: "cor4.2",
            title: "n-term products of low degree",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| {
                    let mut ds = general_domains(pr, 1..=4);
                    for d in &mut ds {
                        d.filter = |pr, t| {
                            let n = t.len() / 2;
                            let exps = &t[n..];
                            let distinct = (0..n).all(|i| (i + 1..n).all(|j| t[i] != t[j]));
                            distinct
                                && (exps.iter().sum::<i64>() <= pr.p() as i64
                                    || exps.iter().all(|&m| m == top(pr)))
                        };
                    }
                    ds
                },
                check: |c, t| {
                    let pr = c.pr;
                    let gp = general_params(pr, t)?;
                    let n = t.len() / 2;
                    let total = gp.exp_total();
                    let printed = if gp.exps().iter().all(|&m| m == top(pr)) {
                        pr.neg(pr.reduce(n as i64))
                    } else if total < top(pr) {
                        0
                    } else if total == top(pr) {
                        pr.p() - 1
                    } else {
                        let s = (0..n).fold(0, |acc, i| {
                            pr.add(acc, pr.mul(pr.reduce(t[n + i]), u(t[i])))
                        });
                        pr.neg(s)
                    };
                    Ok(vec![printed, general_brute(&gp)?])
                },
            },
        },
        Theorem {
            id: "cor4.3",
            title: "rescaling an n-term product",
            strategies: &["brute", "scaled", "scaled_closed"],
            kind: Kind::Grid {
                domains: |pr| {
                    (1..=3)
                        .map(|n1| {
                            let mut ranges = vec![(1, top(pr)); n1];
                            ranges.extend(vec![(1, top(pr)); n1 + 1]);
                            Domain {
                                ranges,
                                filter: |_, t| {
                                    let n1 = t.len() / 2;
                                    (0..n1).all(|i| (i + 1..n1).all(|j| t[i] != t[j]))
                                },
                            }
                        })
                        .collect()
                },
                check: |c, t| {
                    let n1 = t.len() / 2;
                    let mut offsets: Vec<Residue> = t[..n1].iter().map(|&x| u(x)).collect();
                    offsets.push(0);
                    let gp = GeneralSumParams::new(c.pr, &offsets, &t[n1..])?;
                    let (scale, reduced) = general::scaling_reduce(&gp)?;
                    Ok(vec![
                        general_brute(&gp)?,
                        c.pr.mul(scale, general_brute(&reduced)?),
                        c.pr.mul(scale, general::multi_index_j(&reduced)),
                    ])
                },
            },
        },
        Theorem {
            id: "thm4.4",
            title: "n-term product via coefficient extraction",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| general_domains(pr, 1..=4),
                check: |c, t| {
                    let gp = general_params(c.pr, t)?;
                    Ok(vec![
                        general::coeff_extraction_sum(&gp),
                        general_brute(&gp)?,
                    ])
                },
            },
        },
        Theorem {
            id: "thm4.5",
            title: "n-term product via elementary symmetric polynomials",
            strategies: &["closed", "brute"],
            kind: Kind::Grid {
                domains: |pr| general_domains(pr, 1..=4),
                check: |c, t| {
                    let gp = general_params(c.pr, t)?;
                    Ok(vec![general::esp_sum(&gp), general_brute(&gp)?])
                },
            },
        },
        Theorem {
            id: "vandermonde",
            title: "Vandermonde convolution",
            strategies: &["lhs", "rhs"],
            kind: Kind::Identity(&[F::Vandermonde]),
        },
        Theorem {
            id: "figures",
            title: "residue matrix observations",
            strategies: &["expected", "violations"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr))], any),
                check: |c, t| {
                    let failures = oracle::residue_matrix(c.pr, u(t[0]))?.observation_failures();
                    if let Some(first) = failures.first() {
                        return Err(Error::Disagreement(first.clone()));
                    }
                    Ok(vec![0, 0])
                },
            },
        },
        Theorem {
            id: "tables",
            title: "sum table rows from coefficient table rows",
            strategies: &["sum_table", "coeff_rows"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 2], any),
                check: |c, t| table_check(c.pr, t, 2),
            },
        },
        Theorem {
            id: "tables-complete",
            title: "sum table rows from coefficient table rows, third row included",
            strategies: &["sum_table", "coeff_rows"],
            kind: Kind::Grid {
                domains: |pr| dom(vec![(1, top(pr)); 2], any),
                check: |c, t| table_check(c.pr, t, 3),
            },
        },
    ]
}

/// Number of `s` whose sum-table row differs from the sum of coefficient
/// rows `i(p-1) - s` for `i = 1..=levels`.
pub fn table_mismatches(pr: &Prime, m: i64, n: i64, levels: usize) -> Result<usize> {
    let sums = symbolic_sum_table(pr, m, n)?;
    let coeffs = symbolic_coeff_table(pr, m, n)?;
    let q = pr.order() as usize;
    let mut bad = 0;
    for (idx, sum_row) in sums.iter().enumerate() {
        let s = idx + 1;
        let mut expect = BiPolyZp::zero(pr, m as usize, n as usize)?;
        for i in 1..=levels {
            if let Some(r) = coeffs.get(i * q - s) {
                expect = expect.add(r)?;
            }
        }
        if expect.monomials() != sum_row.monomials() {
            bad += 1;
        }
    }
    Ok(bad)
}

pub fn theorem_ids() -> Vec<&'static str> {
    registry().iter().map(|t| t.id).collect()
}

pub fn find(id: &str) -> Result<Theorem> {
    registry()
        .into_iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

/// Resolves `all` or a list of ids, in registry order, without duplicates.
pub fn resolve(ids: &[String]) -> Result<Vec<Theorem>> {
    if ids.iter().any(|s| s == "all") {
        return Ok(registry());
    }
    for id in ids {
        find(id)?;
    }
    Ok(registry()
        .into_iter()
        .filter(|t| ids.iter().any(|s| s == t.id))
        .collect())
}

fn stream_seed(seed: u64, id: &str, p: u64, domain: usize) -> u64 {
    // FNV-1a over the inputs; stable across builds
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = id
        .bytes()
        .chain(seed.to_le_bytes())
        .chain(p.to_le_bytes())
        .chain((domain as u64).to_le_bytes());
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn decode(mut idx: u128, ranges: &[(i64, i64)]) -> Vec<i64> {
    let mut out = vec![0; ranges.len()];
    for (slot, &(lo, hi)) in out.iter_mut().zip(ranges).rev() {
        let width = (hi - lo + 1) as u128;
        *slot = lo + (idx % width) as i64;
        idx /= width;
    }
    out
}

fn evaluate(ctx: &Ctx, check: CheckFn, t: &[i64]) -> Option<Failure> {
    match check(ctx, t) {
        Ok(values) => {
            let expected = values[0];
            values.iter().find(|&&v| v != expected).map(|&got| Failure {
                params: t.to_vec(),
                expected: Some(expected),
                got: Some(got),
                detail: format!("values {values:?}"),
            })
        }
        Err(e) => Some(Failure {
            params: t.to_vec(),
            expected: None,
            got: None,
            detail: e.to_string(),
        }),
    }
}

fn run_domain(
    ctx: &Ctx,
    check: CheckFn,
    d: &Domain,
    cfg: &VerifyConfig,
    rng_seed: u64,
) -> (u64, bool, Vec<Failure>) {
    let total: u128 = d
        .ranges
        .iter()
        .map(|&(lo, hi)| (hi - lo + 1).max(0) as u128)
        .product();
    if total == 0 {
        return (0, true, vec![]);
    }
    if total <= cfg.budget as u128 {
        let (count, mut fails) = (0..total as u64)
            .into_par_iter()
            .filter_map(|i| {
                let t = decode(i as u128, &d.ranges);
                (d.filter)(ctx.pr, &t).then(|| (i, evaluate(ctx, check, &t)))
            })
            .fold(
                || (0u64, Vec::new()),
                |(n, mut f), (i, fail)| {
                    if let Some(fail) = fail {
                        f.push((i, fail));
                    }
                    (n + 1, f)
                },
            )
            .reduce(
                || (0, Vec::new()),
                |(n1, mut f1), (n2, f2)| {
                    f1.extend(f2);
                    (n1 + n2, f1)
                },
            );
        fails.sort_by_key(|(i, _)| *i);
        return (count, true, fails.into_iter().map(|(_, f)| f).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut samples = Vec::with_capacity(cfg.budget as usize);
    let max_draws = cfg.budget.saturating_mul(1000);
    let mut draws = 0u64;
    while (samples.len() as u64) < cfg.budget && draws < max_draws {
        draws += 1;
        let t: Vec<i64> = d
            .ranges
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        if (d.filter)(ctx.pr, &t) {
            samples.push(t);
        }
    }
    let fails: Vec<Failure> = samples
        .par_iter()
        .filter_map(|t| evaluate(ctx, check, t))
        .collect();
    (samples.len() as u64, false, fails)
}

/// Runs one check at one prime.
pub fn verify_theorem(th: &Theorem, pr: &Prime, cfg: &VerifyConfig) -> VerificationReport {
    let start = Instant::now();
    let ctx = Ctx {
        pr,
        mod_p2: cfg.mod_p2,
    };
    let (grid_size, exhaustive, failures) = match &th.kind {
        Kind::Grid { domains, check } => {
            let mut size = 0;
            let mut full = true;
            let mut fails = Vec::new();
            for (idx, d) in domains(pr).iter().enumerate() {
                let seed = stream_seed(cfg.seed, th.id, pr.p(), idx);
                let (n, ex, f) = run_domain(&ctx, *check, d, cfg, seed);
                size += n;
                full &= ex;
                fails.extend(f);
            }
            (size, full, fails)
        }
        Kind::Identity(families) => {
            let mut size = 0;
            let mut fails = Vec::new();
            for &family in families.iter() {
                let out = check_grid(pr, family);
                size += out.checked;
                fails.extend(out.failures.into_iter().map(|inst| Failure {
                    params: inst.params.iter().map(|&(_, v)| v).collect(),
                    expected: Some(inst.lhs),
                    got: Some(inst.rhs),
                    detail: format!("{} {:?}", inst.name, inst.params),
                }));
            }
            (size, true, fails)
        }
    };
    VerificationReport {
        theorem: th.id.to_string(),
        title: th.title.to_string(),
        prime: pr.p(),
        grid_size,
        exhaustive,
        failures,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        strategies: th.strategies.iter().map(|s| s.to_string()).collect(),
    }
}

/// Runs every `(theorem, prime)` pair, ordered by theorem then prime.
pub fn verify_all(
    theorems: &[Theorem],
    primes: &[Prime],
    cfg: &VerifyConfig,
) -> Vec<VerificationReport> {
    theorems
        .iter()
        .flat_map(|th| primes.iter().map(move |pr| verify_theorem(th, pr, cfg)))
        .collect()
}

/// Parses `5,7,11` or `5..97` (inclusive, primes only) or a mix.
pub fn parse_primes(spec: &str) -> Result<Vec<Prime>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: i64 = lo
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad bound in `{part}`")))?;
            let hi: i64 = hi
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad bound in `{part}`")))?;
            if lo < 5 {
                return Err(Error::TooSmall(lo));
            }
            out.extend((lo..=hi).filter_map(|q| crate::make_prime(q).ok()));
        } else {
            let q: i64 = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime `{part}`")))?;
            out.push(crate::make_prime(q)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("no primes in `{spec}`")));
    }
    out.sort_by_key(Prime::p);
    out.dedup_by_key(|p| p.p());
    Ok(out)
}

/// Sizes the global rayon pool from `WOLSTENHOLME_THREADS`, if set.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var("WOLSTENHOLME_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second call keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}
