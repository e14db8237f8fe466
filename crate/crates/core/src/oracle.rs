//! Brute-force evaluation of residue sums: the ground truth every closed
//! form is checked against.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{mod_inverse, mod_pow, Prime, Residue};

/// One factor `(offset + k)^exp`; a negative exponent puts it in the
/// denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub offset: Residue,
    pub exp: i64,
}

impl Term {
    pub fn new(offset: Residue, exp: i64) -> Self {
        Term { offset, exp }
    }
}

impl From<(Residue, i64)> for Term {
    fn from((offset, exp): (Residue, i64)) -> Self {
        Term { offset, exp }
    }
}

/// `Σ_{k ∉ exclusions} Π (offset_i + k)^{exp_i}` over all residues `k` mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumSpec {
    pub pr: Prime,
    pub terms: Vec<Term>,
    pub exclusions: BTreeSet<Residue>,
}

impl SumSpec {
    /// Builds a spec, normalizing offsets into `[0, p)` and checking that
    /// every exponent satisfies `|exp| <= p - 1` and every denominator zero
    /// is excluded.
    pub fn new(
        pr: &Prime,
        terms: impl IntoIterator<Item = impl Into<Term>>,
        exclusions: impl IntoIterator<Item = i64>,
    ) -> Result<Self> {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(Into::into)
            .map(|t: Term| Term::new(t.offset % pr.p(), t.exp))
            .collect();
        let exclusions = exclusions.into_iter().map(|k| pr.reduce(k)).collect();
        let spec = SumSpec {
            pr: pr.clone(),
            terms,
            exclusions,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec whose exclusions are exactly the zeros of its
    /// denominators.
    pub fn with_auto_exclusions(
        pr: &Prime,
        terms: impl IntoIterator<Item = impl Into<Term>>,
    ) -> Result<Self> {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(Into::into)
            .map(|t: Term| Term::new(t.offset % pr.p(), t.exp))
            .collect();
        let exclusions = auto_exclusions(pr, &terms);
        let spec = SumSpec {
            pr: pr.clone(),
            terms,
            exclusions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.pr.p();
        for t in &self.terms {
            if t.offset >= p {
                return Err(Error::InvalidSpec(format!(
                    "offset {} not in [0, {p})",
                    t.offset
                )));
            }
            if t.exp.unsigned_abs() > p - 1 {
                return Err(Error::InvalidSpec(format!(
                    "|exponent {}| exceeds p - 1",
                    t.exp
                )));
            }
            if t.exp < 0 {
                let zero = (p - t.offset) % p;
                if !self.exclusions.contains(&zero) {
                    return Err(Error::InvalidSpec(format!(
                        "denominator (k + {}) vanishes at k = {zero}, which is not excluded",
                        t.offset
                    )));
                }
            }
        }
        if let Some(&k) = self.exclusions.iter().find(|&&k| k >= p) {
            return Err(Error::InvalidSpec(format!("exclusion {k} not in [0, {p})")));
        }
        Ok(())
    }

    /// Replaces every offset `a` by `a + c` and every excluded `k` by `k - c`.
    /// The value of the sum is unchanged.
    pub fn shifted(&self, c: i64) -> SumSpec {
        let pr = &self.pr;
        SumSpec {
            pr: pr.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(pr.reduce(t.offset as i64 + c), t.exp))
                .collect(),
            exclusions: self
                .exclusions
                .iter()
                .map(|&k| pr.reduce(k as i64 - c))
                .collect(),
        }
    }

    pub fn is_pure_product(&self) -> bool {
        self.exclusions.is_empty() && self.terms.iter().all(|t| t.exp >= 1)
    }
}

/// `{ -offset mod p : exp < 0 }`.
pub fn auto_exclusions(pr: &Prime, terms: &[Term]) -> BTreeSet<Residue> {
    terms
        .iter()
        .filter(|t| t.exp < 0)
        .map(|t| pr.neg(t.offset % pr.p()))
        .collect()
}

/// Direct evaluation of the sum, ascending in `k`.
pub fn brute_sum(spec: &SumSpec) -> Result<Residue> {
    let pr = &spec.pr;
    let p = pr.p();
    let mut total = 0;
    for k in 0..p {
        if spec.exclusions.contains(&k) {
            continue;
        }
        let mut prod = 1;
        for t in &spec.terms {
            let base = (t.offset + k) % p;
            let factor = if t.exp >= 0 {
                pr.pow(base, t.exp as u64)
            } else {
                if base == 0 {
                    return Err(Error::ZeroDenominator {
                        offset: t.offset,
                        k,
                    });
                }
                pr.pow(pr.inv(base)?, t.exp.unsigned_abs())
            };
            prod = pr.mul(prod, factor);
            if prod == 0 {
                break;
            }
        }
        total = pr.add(total, prod);
    }
    Ok(total)
}

/// `Σ_{k=0}^{p-1} Π (offset_i + k)^{exp_i}` for nonnegative exponents, with
/// no exclusions. Allocation-free shortcut used by the verification grids.
pub fn brute_product(pr: &Prime, terms: &[(Residue, u64)]) -> Residue {
    let p = pr.p();
    let mut total = 0;
    for k in 0..p {
        let mut prod = 1;
        for &(offset, exp) in terms {
            prod = pr.mul(prod, pr.pow((offset + k) % p, exp));
        }
        total = pr.add(total, prod);
    }
    total
}

/// `Σ_{k=1}^{p-1} (k^{-1} mod p²)^exp mod p²`.
pub fn brute_sum_mod_p2(pr: &Prime, exp: u64) -> Residue {
    let m = pr.p_squared();
    let mut total = 0u64;
    for k in 1..pr.p() {
        let inv = mod_inverse(k, m).expect("k < p is a unit mod p^2");
        total = (total + mod_pow(inv, exp, m)) % m;
    }
    total
}

/// `Σ_{k=1, k≠a}^{p-1} k^m / (a-k)^n`, summed directly.
pub fn ratio_single_direct(pr: &Prime, a: Residue, m: u64, n: u64) -> Residue {
    let p = pr.p();
    let mut total = 0;
    for k in 1..p {
        if k == a {
            continue;
        }
        let den = pr.inv(pr.sub(a, k)).expect("a - k is nonzero");
        total = pr.add(total, pr.mul(pr.pow(k, m), pr.pow(den, n)));
    }
    total
}

/// `p × p` grid of `Σ_{k≠a} k^m/(a-k)^n` indexed `[m][n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueMatrix {
    pub p: u64,
    pub a: Residue,
    pub entries: Vec<Vec<Residue>>,
}

pub fn residue_matrix(pr: &Prime, a: Residue) -> Result<ResidueMatrix> {
    let p = pr.p();
    if a == 0 || a >= p {
        return Err(Error::BadParams(format!(
            "a = {a} must lie in [1, {}]",
            p - 1
        )));
    }
    let entries = (0..p)
        .map(|m| (0..p).map(|n| ratio_single_direct(pr, a, m, n)).collect())
        .collect();
    Ok(ResidueMatrix { p, a, entries })
}

impl ResidueMatrix {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(vec![]);
        for row in &self.entries {
            w.serialize(row)
                .map_err(|e| Error::BadParams(e.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::BadParams(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    /// Checks the five structural observations about the grid and returns
    /// a description of every violation.
    pub fn observation_failures(&self) -> Vec<String> {
        let p = self.p as usize;
        let e = &self.entries;
        let a = self.a;
        let minus_two = self.p - 2;
        let mut fails = Vec::new();

        for (i, j) in [(0, 0), (0, p - 1), (p - 1, 0), (p - 1, p - 1)] {
            if e[i][j] != minus_two {
                fails.push(format!("corner [{i}][{j}] = {} != -2", e[i][j]));
            }
        }
        for t in 0..p {
            if e[0][t] != e[p - 1][t] {
                fails.push(format!("row 0 and row p-1 differ at column {t}"));
            }
            if e[t][0] != e[t][p - 1] {
                fails.push(format!("column 0 and column p-1 differ at row {t}"));
            }
            if e[0][p - 1 - t] != e[t][0] {
                fails.push(format!(
                    "reversed first row differs from first column at {t}"
                ));
            }
        }
        for (m, row) in e.iter().enumerate().take(p - 1).skip(1) {
            let expected = (self.p - mod_pow(a, m as u64, self.p)) % self.p;
            if row[0] != expected {
                fails.push(format!("column 0 row {m}: {} != -a^{m}", row[0]));
            }
        }
        for i in 0..p - 1 {
            for j in 1..p {
                let lhs = (e[i][j - 1] + e[i + 1][j]) % self.p;
                let rhs = a * e[i][j] % self.p;
                if lhs != rhs {
                    fails.push(format!("modified Pascal fails at ({i}, {j})"));
                }
            }
        }
        fails
    }
}
