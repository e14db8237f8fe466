//! Evaluates a [`SumSpec`] by a chosen method.

use std::fmt;
use std::str::FromStr;

use crate::closedforms as cf;
use crate::error::{Error, Result};
use crate::general::{self, GeneralSumParams};
use crate::modarith::Residue;
use crate::oracle::{brute_sum, SumSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Brute,
    /// Special-case formulas for one to three terms, the composition sum beyond.
    Closed,
    Coeff,
    Esp,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Brute,
        Strategy::Closed,
        Strategy::Coeff,
        Strategy::Esp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Brute => "brute",
            Strategy::Closed => "closed",
            Strategy::Coeff => "coeff",
            Strategy::Esp => "esp",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown strategy `{s}`")))
    }
}

fn inapplicable(why: &str) -> Error {
    Error::StrategyInapplicable(why.to_string())
}

/// Product form with no exclusions left, ready for the general formulas.
fn product_form(spec: &SumSpec) -> Result<SumSpec> {
    let norm =
        cf::normalize_spec(spec).map_err(|e| inapplicable(&format!("no product form: {e}")))?;
    if norm.terms.is_empty() || !norm.exclusions.is_empty() {
        return Err(inapplicable("no product form without exclusions"));
    }
    Ok(norm)
}

fn general_params(norm: &SumSpec) -> Result<GeneralSumParams> {
    let offsets: Vec<Residue> = norm.terms.iter().map(|t| t.offset).collect();
    let exps: Vec<i64> = norm.terms.iter().map(|t| t.exp).collect();
    GeneralSumParams::new(&norm.pr, &offsets, &exps)
}

fn closed(spec: &SumSpec) -> Result<Residue> {
    if let Some(v) = cf::quick_case(spec) {
        return Ok(v);
    }
    let pr = &spec.pr;
    if let [x, y] = spec.terms[..] {
        if x.exp > 0 && y.exp < 0 {
            return if x.offset == y.offset {
                cf::ratio_equal_offsets(pr, x.offset, x.exp, -y.exp)
            } else {
                cf::ratio_pair(pr, x.offset, y.offset, x.exp, -y.exp)
            };
        }
    }
    let norm = product_form(spec)?;
    match norm.terms[..] {
        [t] => Ok(cf::power_sum(pr, t.exp as u64)),
        [x, k] => cf::product_pair_k(pr, x.offset, x.exp, k.exp),
        [x, y, k] => cf::triple_general(pr, x.offset, y.offset, x.exp, y.exp, k.exp),
        _ => Ok(general::multi_index_j(&general_params(&norm)?)),
    }
}

pub fn evaluate(spec: &SumSpec, strategy: Strategy) -> Result<Residue> {
    match strategy {
        Strategy::Brute => brute_sum(spec),
        Strategy::Closed => closed(spec),
        Strategy::Coeff => Ok(general::coeff_extraction_sum(&general_params(
            &product_form(spec)?,
        )?)),
        Strategy::Esp => Ok(general::esp_sum(&general_params(&product_form(spec)?)?)),
    }
}

/// Every strategy's outcome, in [`Strategy::ALL`] order.
pub fn evaluate_all(spec: &SumSpec) -> Vec<(Strategy, Result<Residue>)> {
    Strategy::ALL
        .into_iter()
        .map(|s| (s, evaluate(spec, s)))
        .collect()
}

/// The common value of all applicable strategies.
pub fn agreed_value(outcomes: &[(Strategy, Result<Residue>)]) -> Result<Residue> {
    let mut value = None;
    for (strategy, outcome) in outcomes {
        match outcome {
            Ok(v) => match value {
                None => value = Some((*strategy, *v)),
                Some((first, w)) if w != *v => {
                    return Err(Error::Disagreement(format!(
                        "{first} gives {w}, {strategy} gives {v}"
                    )));
                }
                Some(_) => {}
            },
            Err(Error::StrategyInapplicable(_)) => {}
            Err(e) => return Err(e.clone()),
        }
    }
    value
        .map(|(_, v)| v)
        .ok_or_else(|| inapplicable("no strategy applies"))
}
