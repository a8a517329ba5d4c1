//! Constants predicted by the ∂-biLipschitz characterization chain, as pure
//! functions of the measured or declared inputs.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// ∂-Lipschitz `(L, λ)` gives relative with `θ(t) = L t`, `t_0 = λ`.
    PartialToRelative,
    /// Relative gives semisolid with `c_2 = 24 c c_1 / t_1`.
    RelativeToSemisolid,
    /// Semisolid gives ∂-Lipschitz with `λ = 1/(36 c² c_2)`, `L = 24 c c_2`.
    SemisolidToPartial,
    /// Relative gives locally biLipschitz with `ϑ_1 = t_0/(8 c_1)`, `L_1 = 4 c_1`.
    RelativeToLocalBilipschitz,
    /// Locally biLipschitz gives locally quasisymmetric with `η(t) = L_1² t`.
    LocalBilipschitzToLocalQs,
    /// Locally quasisymmetric and semisolid give ∂-Lipschitz with `L = 8 c c_2 / q_1`.
    LocalQsToPartial,
    /// Quasihyperbolic step bound `4 A² log 2` below `t_1`.
    StepBound,
}

/// Inputs to [`predicted_constants`]. Only the fields a lemma needs are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LedgerInputs {
    pub c: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub lambda: Option<f64>,
    pub t0: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub q: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub eta_slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsLedger {
    pub lemma: LemmaId,
    pub inputs: LedgerInputs,
    pub derived: BTreeMap<String, f64>,
}

fn need(v: Option<f64>, name: &str, lemma: LemmaId) -> Result<f64> {
    v.ok_or_else(|| Error::config(format!("{lemma:?} needs input {name}")))
}

fn at_least_one(v: f64, name: &str) -> Result<f64> {
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err(Error::config(format!("hypothesis {name} >= 1 violated: {name} = {v}")))
    }
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(format!("hypothesis {name} > 0 violated: {name} = {v}")))
    }
}

fn open_unit(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::config(format!("hypothesis 0 < {name} < 1 violated: {name} = {v}")))
    }
}

fn half_open_unit(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(Error::config(format!("hypothesis 0 < {name} <= 1 violated: {name} = {v}")))
    }
}

/// `t_1 = min{log(t_0/2 + 1), log(1 + 1/(3 c_1 c))}`
pub fn relative_t1(c: f64, c1: f64, t0: f64) -> f64 {
    (t0 / 2.0 + 1.0).ln().min((1.0 + 1.0 / (3.0 * c1 * c)).ln())
}

/// `q_1 = min{1/(2 + c), q/2}`
pub fn local_q1(c: f64, q: f64) -> f64 {
    (1.0 / (2.0 + c)).min(q / 2.0)
}

/// `t_1 = min{log(1 + η^{-1}(1/(4A)) q/2), log(1 + q/2)}` for linear `η(t) = s t`.
pub fn step_t1(a: f64, q: f64, eta_slope: f64) -> f64 {
    let q1 = q / 2.0;
    (1.0 + (1.0 / (4.0 * a)) / eta_slope * q1).ln().min((1.0 + q1).ln())
}

/// `4 A² log 2`
pub fn step_bound(a: f64) -> f64 {
    4.0 * a * a * LN_2
}

/// Evaluate the explicit constants of `lemma` from `inputs`.
pub fn predicted_constants(lemma: LemmaId, inputs: LedgerInputs) -> Result<ConstantsLedger> {
    let mut out = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        out.insert(k.to_string(), v);
    };
    match lemma {
        LemmaId::PartialToRelative => {
            let l = at_least_one(need(inputs.l, "L", lemma)?, "L")?;
            let lambda = open_unit(need(inputs.lambda, "lambda", lemma)?, "lambda")?;
            put("theta_slope", l);
            put("t0", lambda);
        }
        LemmaId::RelativeToSemisolid => {
            let c = at_least_one(need(inputs.c, "c", lemma)?, "c")?;
            let c1 = at_least_one(need(inputs.c1, "c1", lemma)?, "c1")?;
            let t0 = half_open_unit(need(inputs.t0, "t0", lemma)?, "t0")?;
            let t1 = relative_t1(c, c1, t0);
            put("t1", t1);
            put("c2", 24.0 * c * c1 / t1);
        }
        LemmaId::SemisolidToPartial => {
            let c = at_least_one(need(inputs.c, "c", lemma)?, "c")?;
            let c2 = positive(need(inputs.c2, "c2", lemma)?, "c2")?;
            put("lambda", 1.0 / (36.0 * c * c * c2));
            put("L", 24.0 * c * c2);
        }
        LemmaId::RelativeToLocalBilipschitz => {
            let c1 = at_least_one(need(inputs.c1, "c1", lemma)?, "c1")?;
            let t0 = half_open_unit(need(inputs.t0, "t0", lemma)?, "t0")?;
            put("theta1", t0 / (8.0 * c1));
            put("L1", 4.0 * c1);
        }
        LemmaId::LocalBilipschitzToLocalQs => {
            let l1 = at_least_one(need(inputs.l, "L1", lemma)?, "L1")?;
            let q = open_unit(need(inputs.q, "q", lemma)?, "q")?;
            put("q", q);
            put("eta_slope", l1 * l1);
        }
        LemmaId::LocalQsToPartial => {
            let c = at_least_one(need(inputs.c, "c", lemma)?, "c")?;
            let c2 = positive(need(inputs.c2, "c2", lemma)?, "c2")?;
            let q = open_unit(need(inputs.q, "q", lemma)?, "q")?;
            let q1 = local_q1(c, q);
            put("q1", q1);
            put("L", 8.0 * c * c2 / q1);
            put("lambda", q1 / (2.0 * c * c2));
        }
        LemmaId::StepBound => {
            let a = at_least_one(need(inputs.a, "A", lemma)?, "A")?;
            let q = open_unit(need(inputs.q, "q", lemma)?, "q")?;
            let s = positive(need(inputs.eta_slope, "eta_slope", lemma)?, "eta_slope")?;
            put("q1", q / 2.0);
            put("t1", step_t1(a, q, s));
            put("step_bound", step_bound(a));
        }
    }
    Ok(ConstantsLedger {
        lemma,
        inputs,
        derived: out,
    })
}
