//! Dense univariate and bivariate polynomials over Z/pZ.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{Prime, Residue};

/// Dense polynomial, `coeffs[j]` is the coefficient of `x^j`. Trailing zeros
/// are trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyZp {
    p: u64,
    coeffs: Vec<Residue>,
}

impl PolyZp {
    pub fn new(p: u64, coeffs: impl IntoIterator<Item = u64>) -> Self {
        let mut poly = PolyZp {
            p,
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
        };
        poly.trim();
        poly
    }

    pub fn zero(p: u64) -> Self {
        PolyZp { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        PolyZp { p, coeffs: vec![1] }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `[x^j] f`, zero outside `0..=deg f`.
    pub fn coeff(&self, j: i64) -> Residue {
        if j < 0 {
            return 0;
        }
        self.coeffs.get(j as usize).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &PolyZp) -> Result<PolyZp> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let sum = (0..len).map(|j| (self.coeff(j as i64) + other.coeff(j as i64)) % self.p);
        Ok(PolyZp::new(self.p, sum))
    }

    /// Schoolbook product.
    pub fn mul(&self, other: &PolyZp) -> Result<PolyZp> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(PolyZp::zero(self.p));
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &f) in self.coeffs.iter().enumerate() {
            if f == 0 {
                continue;
            }
            for (j, &g) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + f * g) % p;
            }
        }
        Ok(PolyZp::new(p, out))
    }

    /// Multiplies in place by `(b + x)`.
    fn mul_linear(&mut self, b: Residue) {
        let p = self.p;
        self.coeffs.push(0);
        for j in (0..self.coeffs.len()).rev() {
            let shifted = if j > 0 { self.coeffs[j - 1] } else { 0 };
            self.coeffs[j] = (self.coeffs[j] * b + shifted) % p;
        }
        self.trim();
    }

    pub fn evaluate(&self, x: Residue) -> Residue {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (acc * x + c) % self.p)
    }
}

pub fn poly_mul(f: &PolyZp, g: &PolyZp) -> Result<PolyZp> {
    f.mul(g)
}

pub fn coeff(f: &PolyZp, j: i64) -> Residue {
    f.coeff(j)
}

/// `(b_1 + x)^{m_1} ⋯ (b_r + x)^{m_r}`, monic of degree `Σ m_i`.
pub fn build_product(pr: &Prime, offsets: &[Residue], exps: &[u64]) -> PolyZp {
    debug_assert_eq!(offsets.len(), exps.len());
    let mut poly = PolyZp::one(pr.p());
    for (&b, &m) in offsets.iter().zip(exps) {
        for _ in 0..m {
            poly.mul_linear(b % pr.p());
        }
    }
    poly
}

/// Polynomial in two symbols `a`, `b`; `coeffs[i][j]` multiplies `a^i b^j`.
///
/// Exponents are kept as formal symbols and never reduced by Fermat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiPolyZp {
    p: u64,
    coeffs: Vec<Vec<Residue>>,
}

/// How coefficients are printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoeffDisplay {
    /// Every coefficient in `[0, p)`.
    #[default]
    Canonical,
    /// Coefficients above `p / 2` printed as negatives.
    Signed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub ca: u32,
    pub cb: u32,
    pub coeff: Residue,
}

impl BiPolyZp {
    /// Zero polynomial with room for `a^i b^j`, `i <= deg_a`, `j <= deg_b`.
    pub fn zero(pr: &Prime, deg_a: usize, deg_b: usize) -> Result<Self> {
        let bound = pr.order() as usize;
        if deg_a > bound || deg_b > bound {
            return Err(Error::RangeViolation(format!(
                "per-variable degree ({deg_a}, {deg_b}) exceeds p - 1 = {bound}"
            )));
        }
        Ok(BiPolyZp {
            p: pr.p(),
            coeffs: vec![vec![0; deg_b + 1]; deg_a + 1],
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> Residue {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .copied()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: Residue) {
        let cell = &mut self.coeffs[i][j];
        *cell = (*cell + c % self.p) % self.p;
    }

    pub fn add(&self, other: &BiPolyZp) -> Result<BiPolyZp> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        let da = self.coeffs.len().max(other.coeffs.len());
        let db = self
            .coeffs
            .iter()
            .chain(&other.coeffs)
            .map(Vec::len)
            .max()
            .unwrap_or(1);
        let mut out = BiPolyZp {
            p: self.p,
            coeffs: vec![vec![0; db]; da],
        };
        for i in 0..da {
            for j in 0..db {
                out.coeffs[i][j] = (self.get(i, j) + other.get(i, j)) % self.p;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(|&c| c == 0)
    }

    pub fn evaluate(&self, a: Residue, b: Residue) -> Residue {
        let p = self.p;
        let mut total = 0;
        let mut a_pow = 1;
        for row in &self.coeffs {
            let mut b_pow = 1;
            for &c in row {
                total = (total + c * a_pow % p * b_pow) % p;
                b_pow = b_pow * b % p;
            }
            a_pow = a_pow * a % p;
        }
        total
    }

    /// Nonzero monomials, ascending in total degree and, within a degree,
    /// descending in the power of `a`.
    pub fn monomials(&self) -> Vec<Monomial> {
        let mut out: Vec<Monomial> = self
            .coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(move |(j, &c)| Monomial {
                        ca: i as u32,
                        cb: j as u32,
                        coeff: c,
                    })
            })
            .collect();
        out.sort_by_key(|m| (m.ca + m.cb, std::cmp::Reverse(m.ca)));
        out
    }

    /// Text form such as `10 + 9 a^7 b^3 + 8 a^6 b^4`.
    pub fn render(&self, mode: CoeffDisplay) -> String {
        let monos = self.monomials();
        if monos.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, mono) in monos.iter().enumerate() {
            let signed = mode == CoeffDisplay::Signed && mono.coeff > self.p / 2;
            let magnitude = if signed {
                self.p - mono.coeff
            } else {
                mono.coeff
            };
            match (idx, signed) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let symbol = symbol_part(mono.ca, mono.cb);
            if symbol.is_empty() {
                write!(out, "{magnitude}").unwrap();
            } else if magnitude == 1 {
                out.push_str(&symbol);
            } else {
                write!(out, "{magnitude} {symbol}").unwrap();
            }
        }
        out
    }
}

fn symbol_part(ca: u32, cb: u32) -> String {
    let power = |name: &str, e: u32| match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    };
    [power("a", ca), power("b", cb)]
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Row `j` (for `j = 0..=m+n`) is `-[x^j] (a+x)^m (b+x)^n` as a polynomial in
/// `a`, `b`.
pub fn symbolic_coeff_table(pr: &Prime, m: i64, n: i64) -> Result<Vec<BiPolyZp>> {
    check_table_params(pr, m, n)?;
    let (mu, nu) = (m as usize, n as usize);
    let mut rows = Vec::with_capacity(mu + nu + 1);
    for j in 0..=(mu + nu) {
        let mut row = BiPolyZp::zero(pr, mu, nu)?;
        for i1 in 0..=mu {
            // (m - i1) + (n - i2) = j
            let i2 = mu as i64 + nu as i64 - j as i64 - i1 as i64;
            if !(0..=n).contains(&i2) {
                continue;
            }
            let c = pr.mul(pr.binom_unchecked(m, i1 as i64), pr.binom_unchecked(n, i2));
            row.add_term(i1, i2 as usize, pr.neg(c));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Entry `s - 1` (for `s = 1..p-1`) is `Σ_{k=0}^{p-1} (a+k)^m (b+k)^n k^s`
/// expanded symbolically in `a`, `b`, accumulated one `k` at a time.
pub fn symbolic_sum_table(pr: &Prime, m: i64, n: i64) -> Result<Vec<BiPolyZp>> {
    check_table_params(pr, m, n)?;
    let (mu, nu) = (m as usize, n as usize);
    let p = pr.p();
    let mut rows = Vec::with_capacity(p as usize - 1);
    for s in 1..p {
        let mut row = BiPolyZp::zero(pr, mu, nu)?;
        for k in 0..p {
            let ks = pr.pow(k, s);
            if ks == 0 {
                continue;
            }
            for i1 in 0..=mu {
                let left = pr.mul(
                    pr.binom_unchecked(m, i1 as i64),
                    pr.pow(k, (mu - i1) as u64),
                );
                for i2 in 0..=nu {
                    let right = pr.mul(
                        pr.binom_unchecked(n, i2 as i64),
                        pr.pow(k, (nu - i2) as u64),
                    );
                    row.add_term(i1, i2, pr.mul(pr.mul(left, right), ks));
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn check_table_params(pr: &Prime, m: i64, n: i64) -> Result<()> {
    let top = pr.order();
    if !(1..=top).contains(&m) || !(1..=top).contains(&n) {
        return Err(Error::BadParams(format!(
            "m = {m}, n = {n} must lie in [1, {top}]"
        )));
    }
    Ok(())
}

/// Renders table rows as `index: polynomial` lines.
pub fn render_table(rows: &[(usize, &BiPolyZp)], mode: CoeffDisplay) -> String {
    let mut out = String::new();
    for (index, row) in rows {
        writeln!(out, "{index}: {}", row.render(mode)).unwrap();
    }
    out
}

#[derive(Serialize)]
struct JsonRow {
    index: usize,
    monomials: Vec<Monomial>,
}

#[derive(Serialize)]
struct JsonTable {
    p: u64,
    rows: Vec<JsonRow>,
}

pub fn table_to_json(p: u64, rows: &[(usize, &BiPolyZp)]) -> String {
    let table = JsonTable {
        p,
        rows: rows
            .iter()
            .map(|(index, row)| JsonRow {
                index: *index,
                monomials: row.monomials(),
            })
            .collect(),
    };
    serde_json::to_string(&table).expect("table serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::make_prime;
    use proptest::prelude::*;

    fn p(n: i64) -> Prime {
        make_prime(n).unwrap()
    }

    #[test]
    fn poly_mul_examples() {
        let f = PolyZp::new(5, [1, 1]);
        assert_eq!(poly_mul(&f, &f).unwrap().coeffs(), &[1, 2, 1]);
        assert!(poly_mul(&f, &PolyZp::zero(5)).unwrap().is_zero());
        let g = PolyZp::new(11, [2, 1]);
        let cube = g.mul(&g).unwrap().mul(&g).unwrap();
        assert_eq!(cube.coeffs(), &[8, 1, 6, 1]);
        assert_eq!(f.mul(&g), Err(Error::ModulusMismatch(5, 11)));
    }

    #[test]
    fn degree_and_coeff() {
        let pr = p(5);
        let f = build_product(&pr, &[1], &[4]);
        assert_eq!(f.degree(), Some(4));
        assert_eq!(coeff(&f, 2), 1);
        assert_eq!(coeff(&f, -1), 0);
        assert_eq!(coeff(&f, 9), 0);
        assert_eq!(PolyZp::zero(5).degree(), None);
        assert_eq!(PolyZp::new(7, [3, 0, 7]).degree(), Some(0));
    }

    #[test]
    fn build_product_examples() {
        assert_eq!(build_product(&p(7), &[], &[]).coeffs(), &[1]);
        let pr = p(11);
        let f = build_product(&pr, &[4], &[6]);
        for j in 0..=6 {
            let expect = pr.mul(pr.binom(6, j).unwrap(), pr.pow(4, (6 - j) as u64));
            assert_eq!(f.coeff(j), expect);
        }
        let f = build_product(&p(17), &[13, 1], &[3, 8]);
        assert_eq!(f.degree(), Some(11));
        assert_eq!(f.coeff(11), 1);
    }

    #[test]
    fn coeff_of_instantiated_table_product() {
        let pr = p(11);
        let f = build_product(&pr, &[6, 2], &[7, 7]);
        assert_eq!(f.coeff(14), 1);
    }

    #[test]
    fn coeff_table_rows() {
        let pr = p(11);
        let t = symbolic_coeff_table(&pr, 7, 7).unwrap();
        assert_eq!(t.len(), 15);
        assert_eq!(t[14].render(CoeffDisplay::Canonical), "10");
        assert_eq!(t[14].render(CoeffDisplay::Signed), "-1");
        assert_eq!(t[13].render(CoeffDisplay::Canonical), "4 a + 4 b");
        assert_eq!(t[0].render(CoeffDisplay::Canonical), "10 a^7 b^7");
        let t = symbolic_coeff_table(&pr, 6, 9).unwrap();
        assert_eq!(t[15].render(CoeffDisplay::Canonical), "10");
        assert!(symbolic_coeff_table(&pr, 0, 3).is_err());
    }

    #[test]
    fn sum_table_rows() {
        let pr = p(11);
        let t = symbolic_sum_table(&pr, 7, 7).unwrap();
        assert_eq!(t.len(), 10);
        assert_eq!(
            t[5].render(CoeffDisplay::Canonical),
            "10 + 9 a^7 b^3 + 8 a^6 b^4 + 10 a^5 b^5 + 8 a^4 b^6 + 9 a^3 b^7"
        );
        assert_eq!(
            t[9].render(CoeffDisplay::Canonical),
            "9 a^4 + 8 a^3 b + 10 a^2 b^2 + 8 a b^3 + 9 b^4 + 10 a^7 b^7"
        );
        let t = symbolic_sum_table(&pr, 6, 9).unwrap();
        assert_eq!(
            t[5].render(CoeffDisplay::Canonical),
            "5 a + 2 b + 6 a^6 b^5 + 2 a^5 b^6 + 10 a^4 b^7 + 7 a^3 b^8 + 7 a^2 b^9"
        );
    }

    #[test]
    fn signed_render_and_json() {
        let pr = p(11);
        let t = symbolic_coeff_table(&pr, 7, 7).unwrap();
        assert_eq!(
            t[7].render(CoeffDisplay::Signed),
            "-a^7 - 5 a^6 b - a^5 b^2 - 4 a^4 b^3 - 4 a^3 b^4 - a^2 b^5 - 5 a b^6 - b^7"
        );
        let json = table_to_json(11, &[(14, &t[14])]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["p"], 11);
        assert_eq!(v["rows"][0]["index"], 14);
        assert_eq!(v["rows"][0]["monomials"][0]["coeff"], 10);
        assert_eq!(v["rows"][0]["monomials"][0]["ca"], 0);
    }

    #[test]
    fn bipoly_degree_bound() {
        assert!(BiPolyZp::zero(&p(5), 5, 1).is_err());
        assert!(BiPolyZp::zero(&p(5), 4, 4).is_ok());
    }

    fn poly(p: u64) -> impl Strategy<Value = PolyZp> {
        prop::collection::vec(0..p, 0..8).prop_map(move |c| PolyZp::new(p, c))
    }

    proptest! {
        #[test]
        fn ring_laws(f in poly(13), g in poly(13), h in poly(13)) {
            prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
            prop_assert_eq!(
                f.mul(&g).unwrap().mul(&h).unwrap(),
                f.mul(&g.mul(&h).unwrap()).unwrap()
            );
            prop_assert_eq!(
                f.mul(&g.add(&h).unwrap()).unwrap(),
                f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
            );
        }

        #[test]
        fn product_evaluates_pointwise(f in poly(17), g in poly(17), x in 0u64..17) {
            prop_assert_eq!(f.mul(&g).unwrap().evaluate(x), f.evaluate(x) * g.evaluate(x) % 17);
        }
    }
}
