//! Closed-form ensemble averages, variances and entropy bounds.
//!
//! `d_A = 2^{N_A}`, `d_Ā = 2^{N_Ā}` and `d = d_A d_Ā` throughout. Exact formulas return
//! big rationals; asymptotic estimates and bounds return floats and are labelled as such
//! in [`FormulaReport`].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::sharp4::{sharp4_oracle, sharp4_paper_formula};
use crate::{Error, Result};

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn int(v: u64) -> BigInt {
    BigInt::from(v)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn require_sides(n_a: u32, n_b: u32) -> Result<()> {
    if n_a == 0 || n_b == 0 {
        Err(Error::InvalidArgument(
            "both subsystems need at least one qubit",
        ))
    } else if n_a + n_b > 1024 {
        Err(Error::InvalidArgument("subsystem sizes beyond 1024 qubits"))
    } else {
        Ok(())
    }
}

/// `(d_A + d_Ā) / (d + 1)`.
pub fn haar_avg_purity(n_a: u32, n_b: u32) -> Result<BigRational> {
    require_sides(n_a, n_b)?;
    Ok(ratio(pow2(n_a) + pow2(n_b), pow2(n_a + n_b) + 1))
}

/// `(d_A + d_Ā − 1) / d`.
pub fn cz_avg_purity(n_a: u32, n_b: u32) -> Result<BigRational> {
    require_sides(n_a, n_b)?;
    Ok(ratio(pow2(n_a) + pow2(n_b) - 1, pow2(n_a + n_b)))
}

/// `(d_A + d_Ā − 1)/d + N_A(N_A+1) N_Ā(N_Ā+1) / d²`.
pub fn ccz_avg_purity(n_a: u32, n_b: u32) -> Result<BigRational> {
    require_sides(n_a, n_b)?;
    if n_a + n_b < 3 {
        return Err(Error::InvalidArgument("the CCZ average needs N >= 3"));
    }
    let (a, b) = (u64::from(n_a), u64::from(n_b));
    let extra = ratio(int(a * (a + 1) * b * (b + 1)), pow2(2 * (n_a + n_b)));
    Ok(cz_avg_purity(n_a, n_b)? + extra)
}

/// `(d_A + d_Ā − 1)/d + d_A(d_A − 1) N_Ā(N_Ā+1) / d²`.
pub fn ccz_half_avg_purity(n_a: u32, n_b: u32) -> Result<BigRational> {
    require_sides(n_a, n_b)?;
    require_half(n_b)?;
    let b = u64::from(n_b);
    let d_a = pow2(n_a);
    let extra = ratio(&d_a * (&d_a - 1) * int(b * (b + 1)), pow2(2 * (n_a + n_b)));
    Ok(cz_avg_purity(n_a, n_b)? + extra)
}

fn require_half(n_b: u32) -> Result<()> {
    if n_b < 2 {
        Err(Error::InvalidArgument(
            "the half-CCZ ensemble needs N_Ā >= 2",
        ))
    } else {
        Ok(())
    }
}

/// `(d_A − 1)(d_Ā − 1) / d²`.
pub fn cz_purity_variance(n_a: u32, n_b: u32) -> Result<BigRational> {
    require_sides(n_a, n_b)?;
    Ok(ratio(
        (pow2(n_a) - 1) * (pow2(n_b) - 1),
        pow2(2 * (n_a + n_b)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sharp4Source {
    /// Exact count from [`sharp4_oracle`].
    Oracle,
    /// The large-`m` closed expression, [`sharp4_paper_formula`].
    PaperFormula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfVariance {
    pub value: BigRational,
    pub validity: Validity,
    /// `9 d_A / d²`.
    pub bound: f64,
}

/// `d_A²(d_A − 1){#₄ − [d_Ā + N_Ā(N_Ā+1)]²} / d⁴` with `#₄` taken at `m = N_Ā`.
pub fn ccz_half_purity_variance(n_a: u32, n_b: u32, source: Sharp4Source) -> Result<HalfVariance> {
    require_sides(n_a, n_b)?;
    require_half(n_b)?;
    let (sharp4, validity) = match source {
        Sharp4Source::Oracle => (BigInt::from(sharp4_oracle(n_b)), Validity::Exact),
        Sharp4Source::PaperFormula => (sharp4_paper_formula(n_b), Validity::Asymptotic),
    };
    let b = u64::from(n_b);
    let d_a = pow2(n_a);
    let inner = pow2(n_b) + int(b * (b + 1));
    let num = &d_a * &d_a * (&d_a - 1) * (sharp4 - &inner * &inner);
    let n = f64::from(n_a + n_b);
    Ok(HalfVariance {
        value: ratio(num, pow2(4 * (n_a + n_b))),
        validity,
        bound: 9.0 * libm::exp2(f64::from(n_a)) / libm::exp2(2.0 * n),
    })
}

/// Leading-order CCZ purity variance `4/d² − 2(d_A + d_Ā)/d³` and the rigorous
/// `3 N² d^{-3/2}` bound, as `(estimate, upper_bound)`.
pub fn ccz_purity_variance_leading(n_a: u32, n_b: u32) -> Result<(f64, f64)> {
    require_sides(n_a, n_b)?;
    if n_a + n_b < 3 {
        return Err(Error::InvalidArgument("the CCZ variance needs N >= 3"));
    }
    let n = f64::from(n_a + n_b);
    let d = libm::exp2(n);
    let (da, db) = (libm::exp2(f64::from(n_a)), libm::exp2(f64::from(n_b)));
    let estimate = 4.0 / (d * d) - 2.0 * (da + db) / (d * d * d);
    let bound = 3.0 * n * n * libm::pow(d, -1.5);
    Ok((estimate, bound))
}

/// Limiting probability that a uniform random `n × n` GF(2) matrix has rank `n − s`:
/// `2^{-s²} ∏_{i>s} (1 − 2^{-i}) / ∏_{i≤s} (1 − 2^{-i})`.
///
/// The infinite product stops once a factor is within `1e-15` of one, or after
/// `terms` factors, whichever comes first.
pub fn rank_defect_prob(s: u32, terms: u32) -> f64 {
    let mut tail = 1.0;
    let mut i = s + 1;
    while i - s <= terms {
        let f = libm::exp2(-f64::from(i));
        if f < 1e-15 {
            break;
        }
        tail *= 1.0 - f;
        i += 1;
    }
    let head: f64 = (1..=s).map(|i| 1.0 - libm::exp2(-f64::from(i))).product();
    libm::exp2(-f64::from(s) * f64::from(s)) * tail / head
}

/// Default product length for [`rank_defect_prob`].
pub const RANK_PRODUCT_TERMS: u32 = 200;

/// `−log₂((d_A + d_Ā)/d)`, the lower bound on the average Rényi-2 entropy.
pub fn entropy_lower_bound(n_a: u32, n_b: u32) -> Result<f64> {
    require_sides(n_a, n_b)?;
    let n = f64::from(n_a + n_b);
    let sum = libm::exp2(f64::from(n_a)) + libm::exp2(f64::from(n_b));
    Ok(n - libm::log2(sum))
}

/// Entropy deviation bound: `S₂` falls below `threshold` with probability at most
/// `probability_bound = variance / ε²` (not clipped to 1).
pub fn deviation_bound(n_a: u32, n_b: u32, epsilon: f64, variance: f64) -> Result<(f64, f64)> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument("epsilon must be positive"));
    }
    if variance.is_nan() || variance < 0.0 {
        return Err(Error::InvalidArgument("variance must be non-negative"));
    }
    let threshold = entropy_lower_bound(n_a, n_b)? - 1.5 * epsilon * libm::exp2(f64::from(n_a));
    Ok((threshold, variance / (epsilon * epsilon)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyEnsemble {
    Cz,
    Ccz,
}

/// Equal-partition bounds on `Var[S₂]`: `< 1.6 N 2^{-N/2}` for CCZ, `> 0.128` for CZ
/// (the CZ report also carries the underlying constant `(4/9) Q₀`).
pub fn entropy_variance_bounds(n: u32, ensemble: EntropyEnsemble) -> Result<FormulaReport> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidArgument(
            "equal partition needs an even N >= 2",
        ));
    }
    let inputs = vec![("n", Input::Int(i64::from(n)))];
    Ok(match ensemble {
        EntropyEnsemble::Ccz => FormulaReport {
            label: "ccz_entropy_variance_upper_bound",
            inputs,
            value: FormulaValue::Real(1.6 * f64::from(n) * libm::exp2(-f64::from(n) / 2.0)),
            validity: Validity::Bound,
            extras: Vec::new(),
        },
        EntropyEnsemble::Cz => FormulaReport {
            label: "cz_entropy_variance_lower_bound",
            inputs,
            value: FormulaValue::Real(0.128),
            validity: Validity::Bound,
            extras: vec![(
                "four_ninths_q0",
                FormulaValue::Real(4.0 / 9.0 * rank_defect_prob(0, RANK_PRODUCT_TERMS)),
            )],
        },
    })
}

/// How a formula value may be used when comparing against data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Validity {
    Exact,
    Asymptotic,
    Bound,
}

impl Validity {
    pub fn name(&self) -> &'static str {
        match self {
            Validity::Exact => "exact",
            Validity::Asymptotic => "asymptotic",
            Validity::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormulaValue {
    Rational(BigRational),
    Integer(BigInt),
    Real(f64),
}

impl FormulaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            FormulaValue::Rational(r) => rational_to_f64(r),
            FormulaValue::Integer(i) => i.to_f64().unwrap_or(f64::INFINITY),
            FormulaValue::Real(x) => *x,
        }
    }

    /// Exact text for rationals and integers, shortest round-trip decimal for reals.
    pub fn exact_text(&self) -> Option<String> {
        match self {
            FormulaValue::Rational(r) => Some(alloc::format!("{r}")),
            FormulaValue::Integer(i) => Some(alloc::format!("{i}")),
            FormulaValue::Real(_) => None,
        }
    }
}

impl fmt::Display for FormulaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaValue::Rational(r) => write!(f, "{r}"),
            FormulaValue::Integer(i) => write!(f, "{i}"),
            FormulaValue::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Float value of a big rational, robust to huge numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (n, d) = (r.numer(), r.denom());
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && b != 0.0 => a / b,
        _ => {
            let shift = n.bits().max(d.bits()).saturating_sub(900) as usize;
            let a = (n >> shift).to_f64().unwrap_or(0.0);
            let b = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
            a / b
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Input {
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulaReport {
    pub label: &'static str,
    pub inputs: Vec<(&'static str, Input)>,
    pub value: FormulaValue,
    pub validity: Validity,
    /// Companion values (bounds reported next to an estimate, derivation constants).
    pub extras: Vec<(&'static str, FormulaValue)>,
}

/// A formula and its arguments, for uniform dispatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Formula {
    HaarAvgPurity {
        n_a: u32,
        n_b: u32,
    },
    CzAvgPurity {
        n_a: u32,
        n_b: u32,
    },
    CczAvgPurity {
        n_a: u32,
        n_b: u32,
    },
    CczHalfAvgPurity {
        n_a: u32,
        n_b: u32,
    },
    CzPurityVariance {
        n_a: u32,
        n_b: u32,
    },
    CczHalfPurityVariance {
        n_a: u32,
        n_b: u32,
        source: Sharp4Source,
    },
    CczPurityVarianceLeading {
        n_a: u32,
        n_b: u32,
    },
    Sharp4Oracle {
        m: u32,
    },
    Sharp4PaperFormula {
        m: u32,
    },
    RankDefectProb {
        s: u32,
        terms: u32,
    },
    EntropyLowerBound {
        n_a: u32,
        n_b: u32,
    },
    DeviationBound {
        n_a: u32,
        n_b: u32,
        epsilon: f64,
        variance: f64,
    },
    EntropyVarianceBounds {
        n: u32,
        ensemble: EntropyEnsemble,
    },
}

fn sides(n_a: u32, n_b: u32) -> Vec<(&'static str, Input)> {
    vec![
        ("n_a", Input::Int(n_a.into())),
        ("n_b", Input::Int(n_b.into())),
    ]
}

fn exact(label: &'static str, inputs: Vec<(&'static str, Input)>, r: BigRational) -> FormulaReport {
    FormulaReport {
        label,
        inputs,
        value: FormulaValue::Rational(r),
        validity: Validity::Exact,
        extras: Vec::new(),
    }
}

impl Formula {
    pub fn evaluate(&self) -> Result<FormulaReport> {
        use Formula::*;
        Ok(match *self {
            HaarAvgPurity { n_a, n_b } => exact(
                "haar_avg_purity",
                sides(n_a, n_b),
                haar_avg_purity(n_a, n_b)?,
            ),
            CzAvgPurity { n_a, n_b } => {
                exact("cz_avg_purity", sides(n_a, n_b), cz_avg_purity(n_a, n_b)?)
            }
            CczAvgPurity { n_a, n_b } => {
                exact("ccz_avg_purity", sides(n_a, n_b), ccz_avg_purity(n_a, n_b)?)
            }
            CczHalfAvgPurity { n_a, n_b } => exact(
                "ccz_half_avg_purity",
                sides(n_a, n_b),
                ccz_half_avg_purity(n_a, n_b)?,
            ),
            CzPurityVariance { n_a, n_b } => exact(
                "cz_purity_variance",
                sides(n_a, n_b),
                cz_purity_variance(n_a, n_b)?,
            ),
            CczHalfPurityVariance { n_a, n_b, source } => {
                let v = ccz_half_purity_variance(n_a, n_b, source)?;
                FormulaReport {
                    label: match source {
                        Sharp4Source::Oracle => "ccz_half_purity_variance",
                        Sharp4Source::PaperFormula => "ccz_half_purity_variance_paper_sharp4",
                    },
                    inputs: sides(n_a, n_b),
                    value: FormulaValue::Rational(v.value),
                    validity: v.validity,
                    extras: vec![("upper_bound_9da_over_d2", FormulaValue::Real(v.bound))],
                }
            }
            CczPurityVarianceLeading { n_a, n_b } => {
                let (estimate, bound) = ccz_purity_variance_leading(n_a, n_b)?;
                FormulaReport {
                    label: "ccz_purity_variance_leading",
                    inputs: sides(n_a, n_b),
                    value: FormulaValue::Real(estimate),
                    validity: Validity::Asymptotic,
                    extras: vec![("upper_bound_3n2_d_pow_m1_5", FormulaValue::Real(bound))],
                }
            }
            Sharp4Oracle { m } => FormulaReport {
                label: "sharp4_oracle",
                inputs: vec![("m", Input::Int(m.into()))],
                value: FormulaValue::Integer(BigInt::from(sharp4_oracle(m))),
                validity: Validity::Exact,
                extras: Vec::new(),
            },
            Sharp4PaperFormula { m } => FormulaReport {
                label: "sharp4_paper_formula",
                inputs: vec![("m", Input::Int(m.into()))],
                value: FormulaValue::Integer(sharp4_paper_formula(m)),
                validity: Validity::Asymptotic,
                extras: Vec::new(),
            },
            RankDefectProb { s, terms } => FormulaReport {
                label: "rank_defect_prob",
                inputs: vec![
                    ("s", Input::Int(s.into())),
                    ("terms", Input::Int(terms.into())),
                ],
                value: FormulaValue::Real(rank_defect_prob(s, terms)),
                validity: Validity::Asymptotic,
                extras: Vec::new(),
            },
            EntropyLowerBound { n_a, n_b } => FormulaReport {
                label: "entropy_lower_bound",
                inputs: sides(n_a, n_b),
                value: FormulaValue::Real(entropy_lower_bound(n_a, n_b)?),
                validity: Validity::Bound,
                extras: Vec::new(),
            },
            DeviationBound {
                n_a,
                n_b,
                epsilon,
                variance,
            } => {
                let (threshold, prob) = deviation_bound(n_a, n_b, epsilon, variance)?;
                let mut inputs = sides(n_a, n_b);
                inputs.push(("epsilon", Input::Real(epsilon)));
                inputs.push(("variance", Input::Real(variance)));
                FormulaReport {
                    label: "deviation_bound",
                    inputs,
                    value: FormulaValue::Real(prob),
                    validity: Validity::Bound,
                    extras: vec![("threshold", FormulaValue::Real(threshold))],
                }
            }
            EntropyVarianceBounds { n, ensemble } => entropy_variance_bounds(n, ensemble)?,
        })
    }
}

/// Closed-form `Σ_s Q_s (s − E s)²`, the limiting variance of the rank defect.
pub fn rank_defect_variance() -> f64 {
    let q: Vec<f64> = (0..40)
        .map(|s| rank_defect_prob(s, RANK_PRODUCT_TERMS))
        .collect();
    let mean: f64 = q.iter().enumerate().map(|(s, p)| s as f64 * p).sum();
    q.iter()
        .enumerate()
        .map(|(s, p)| p * (s as f64 - mean) * (s as f64 - mean))
        .sum()
}

/// Exact value as a reduced fraction of big unsigned integers, for callers that want
/// `p/q` text without sign handling. `None` for negative values.
pub fn to_fraction(r: &BigRational) -> Option<(BigUint, BigUint)> {
    Some((r.numer().to_biguint()?, r.denom().to_biguint()?))
}
