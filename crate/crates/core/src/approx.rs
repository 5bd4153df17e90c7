//! Linear extrapolation of the game-value series past its initial
//! stagnation: where the fitted line crosses 1 estimates the exponent.

use num_traits::{One, Signed, Zero};

use crate::automata::{aut_of, eppstein, is_synchronizing, sg_diameter};
use crate::boolmat::MatrixSet;
use crate::error::{Error, Result};
use crate::lp::{rat_int, Rational};
use crate::spf::SpfSeries;

/// How the fitting horizon `t'` is chosen as a function of `n`. The log
/// schedules take the ceiling of the natural logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TprimeSchedule {
    LogN,
    ThreeHalvesLogN,
    TwoLogN,
    Explicit(usize),
}

impl TprimeSchedule {
    pub fn evaluate(&self, n: usize) -> usize {
        let ln = (n as f64).ln();
        match self {
            TprimeSchedule::LogN => ln.ceil() as usize,
            TprimeSchedule::ThreeHalvesLogN => (1.5 * ln).ceil() as usize,
            TprimeSchedule::TwoLogN => (2.0 * ln).ceil() as usize,
            TprimeSchedule::Explicit(t) => *t,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TprimeSchedule::LogN => "ceil(ln n)".into(),
            TprimeSchedule::ThreeHalvesLogN => "ceil(1.5 ln n)".into(),
            TprimeSchedule::TwoLogN => "ceil(2 ln n)".into(),
            TprimeSchedule::Explicit(t) => format!("explicit {t}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitMethod {
    /// Line through the two points at `l0` and `t'`.
    R1,
    /// Least-squares line over all points in `l0..=t'`.
    R2,
}

/// A fitted line `value = slope * t + intercept` and the abscissa where it
/// reaches 1.
#[derive(Clone, Debug)]
pub struct ApproxResult {
    pub method: FitMethod,
    pub l0: usize,
    pub tprime: usize,
    pub slope: Rational,
    pub intercept: Rational,
    pub estimate: Rational,
}

fn series_value(series: &SpfSeries, t: usize) -> Result<Rational> {
    series
        .value_clamped(t)
        .ok_or_else(|| Error::Invalid(format!("series not computed up to t = {t}")))
}

/// Two-point fit: the line through `(l0, K(l0))` and `(t', K(t'))`.
pub fn r1_estimate(series: &SpfSeries, l0: usize, tprime: usize) -> Result<ApproxResult> {
    if tprime <= l0 {
        return Err(Error::Invalid(format!(
            "t' = {tprime} must exceed l0 = {l0}"
        )));
    }
    let y0 = series_value(series, l0)?;
    let y1 = series_value(series, tprime)?;
    if y1 == y0 {
        return Err(Error::DegenerateFit(format!(
            "series is flat between t = {l0} and t = {tprime}"
        )));
    }
    let slope = (&y1 - &y0) / rat_int((tprime - l0) as i64);
    let intercept = &y0 - &slope * rat_int(l0 as i64);
    let estimate = (Rational::one() - &intercept) / &slope;
    Ok(ApproxResult {
        method: FitMethod::R1,
        l0,
        tprime,
        slope,
        intercept,
        estimate,
    })
}

/// Least-squares fit over the points `(i, K(i))` for `i = l0..=t'`, via the
/// normal equations in exact rationals.
pub fn r2_estimate(series: &SpfSeries, l0: usize, tprime: usize) -> Result<ApproxResult> {
    if tprime <= l0 {
        return Err(Error::Invalid(format!(
            "t' = {tprime} must exceed l0 = {l0}"
        )));
    }
    let count = rat_int((tprime - l0 + 1) as i64);
    let mut sx = Rational::zero();
    let mut sy = Rational::zero();
    let mut sxx = Rational::zero();
    let mut sxy = Rational::zero();
    for t in l0..=tprime {
        let x = rat_int(t as i64);
        let y = series_value(series, t)?;
        sx += &x;
        sxx += &x * &x;
        sxy += &x * &y;
        sy += y;
    }
    let denom = &count * &sxx - &sx * &sx;
    debug_assert!(denom.is_positive());
    let slope = (&count * &sxy - &sx * &sy) / &denom;
    if slope.is_zero() {
        return Err(Error::DegenerateFit(format!(
            "all ordinates equal on t = {l0}..={tprime}"
        )));
    }
    let intercept = (&sy - &slope * &sx) / &count;
    let estimate = (Rational::one() - &intercept) / &slope;
    Ok(ApproxResult {
        method: FitMethod::R2,
        l0,
        tprime,
        slope,
        intercept,
        estimate,
    })
}

/// How an estimate sits between the merging-diameter lower bound and the
/// greedy-reset-word upper bound of the exponent.
#[derive(Clone, Debug)]
pub struct BoundsVerdict {
    pub diameter_lower: usize,
    pub eppstein_upper: usize,
    pub respects_lower: bool,
    pub respects_upper: bool,
}

pub fn evaluate_against_bounds(set: &MatrixSet, result: &ApproxResult) -> Result<BoundsVerdict> {
    let dfa = aut_of(set)?;
    if !is_synchronizing(&dfa) {
        return Err(Error::NotPrimitive);
    }
    let dfa_t = aut_of(&set.transpose())?;
    let diameter_lower = sg_diameter(&dfa);
    let eppstein_upper =
        eppstein(&dfa)?.rt.unwrap() + eppstein(&dfa_t)?.rt.unwrap() + set.dim() - 1;
    Ok(BoundsVerdict {
        diameter_lower,
        eppstein_upper,
        respects_lower: result.estimate >= rat_int(diameter_lower as i64),
        respects_upper: result.estimate <= rat_int(eppstein_upper as i64),
    })
}
