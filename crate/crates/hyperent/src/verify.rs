//! The verification suite: simulation results against closed forms and oracles.
//!
//! Each criterion yields a [`CriterionResult`] with the expected value, the observed
//! value and the tolerance used. The GF(2) rank routine is a parameter so that a broken
//! implementation can be injected and shown to be caught.

use std::time::Instant;

use hyperent_core::closed_forms::{
    ccz_avg_purity, ccz_half_avg_purity, ccz_half_purity_variance, ccz_purity_variance_leading,
    cz_avg_purity, cz_purity_variance, rank_defect_prob, rational_to_f64, Sharp4Source,
    RANK_PRODUCT_TERMS,
};
use hyperent_core::ensemble::{Ensemble, EnsembleReport, DEFAULT_ENUMERATION_CAP_LOG2};
use hyperent_core::purity::{graph_cut_matrix, reduced_purity};
use hyperent_core::sharp4::{sharp4_brute_force, sharp4_oracle};
use hyperent_core::{
    Bipartition, CounterRng, DyadicRational, EnsembleSpec, Family, Hypergraph, Method, SignTable,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::CliResult;
use crate::report::{encode, Format, MomentsRow};
use crate::run::{RankFn, Runner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Reduced Monte Carlo sample counts; exhaustive checks unchanged.
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub workers: usize,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&'static str> {
        self.criteria
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }
}

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "cz_exact_mean"),
    (2, "cz_exact_variance"),
    (3, "ccz_exact_mean"),
    (4, "ccz_half_exact_moments"),
    (5, "sharp4_oracle"),
    (6, "rank_purity_equivalence"),
    (7, "monte_carlo_consistency"),
    (8, "ccz_variance_order"),
    (9, "rank_distribution"),
    (10, "entropy_variance_separation"),
    (11, "determinism"),
];

struct Outcome {
    passed: bool,
    expected: String,
    observed: String,
    tolerance: String,
    detail: String,
}

pub struct Harness<'a> {
    pub runner: &'a Runner,
    pub suite: Suite,
    pub rank: RankFn,
    pub seed: u64,
    pub max_qubits: u32,
}

fn frac(r: &BigRational) -> String {
    r.to_string()
}

fn dyadic(r: &EnsembleReport) -> (BigRational, BigRational) {
    let m = r.purity.mean.exact().expect("exact mean").to_rational();
    let v = r
        .purity
        .variance
        .exact()
        .expect("exact variance")
        .to_rational();
    (m, v)
}

impl<'a> Harness<'a> {
    pub fn new(runner: &'a Runner, suite: Suite) -> Self {
        Harness {
            runner,
            suite,
            rank: hyperent_core::Gf2Matrix::rank,
            seed: 2024,
            max_qubits: hyperent_core::DEFAULT_MAX_QUBITS,
        }
    }

    fn samples(&self, full: u64, quick: u64) -> u64 {
        match self.suite {
            Suite::Full => full,
            Suite::Quick => quick,
        }
    }

    fn ensemble(&self, family: Family, n: u32, n_a: u32) -> CliResult<Ensemble> {
        let part = Bipartition::first(n, n_a)?;
        Ok(Ensemble::new(EnsembleSpec::new(family, n), part)?.with_max_qubits(self.max_qubits))
    }

    fn exhaustive(
        &self,
        family: Family,
        n: u32,
        n_a: u32,
        method: Method,
    ) -> CliResult<EnsembleReport> {
        let ens = self.ensemble(family, n, n_a)?;
        self.runner
            .exact(&ens, method, DEFAULT_ENUMERATION_CAP_LOG2)
    }

    pub fn run_all(&self) -> VerifyReport {
        self.run_all_filtered(&[])
    }

    /// Runs the listed criteria, or all of them when `only` is empty.
    pub fn run_all_filtered(&self, only: &[u32]) -> VerifyReport {
        let criteria: Vec<_> = CRITERIA
            .iter()
            .filter(|(id, _)| only.is_empty() || only.contains(id))
            .map(|&(id, _)| self.run(id))
            .collect();
        VerifyReport {
            suite: self.suite,
            seed: self.seed,
            workers: self.runner.workers(),
            passed: criteria.iter().all(|c| c.passed),
            criteria,
        }
    }

    /// Runs criterion `id` (1 to 11). Domain errors count as failures.
    pub fn run(&self, id: u32) -> CriterionResult {
        let name = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .expect("criterion id in 1..=11");
        let limit = match id {
            1 => Some(10.0),
            3 | 10 => Some(900.0),
            4 => Some(60.0),
            5 => Some(120.0),
            7 => Some(600.0),
            _ => None,
        };
        let start = Instant::now();
        let outcome = match id {
            1 => self.cz_mean(),
            2 => self.cz_variance(),
            3 => self.ccz_mean(),
            4 => self.half_moments(),
            5 => self.sharp4(),
            6 => self.rank_purity(),
            7 => self.monte_carlo(),
            8 => self.ccz_variance_order(),
            9 => self.rank_distribution(),
            10 => self.entropy_separation(),
            _ => self.determinism(),
        };
        let seconds = start.elapsed().as_secs_f64();
        let mut o = outcome.unwrap_or_else(|e| Outcome {
            passed: false,
            expected: String::new(),
            observed: String::new(),
            tolerance: String::new(),
            detail: format!("error: {e}"),
        });
        if let (Some(l), Suite::Full) = (limit, self.suite) {
            if seconds > l {
                o.passed = false;
                o.detail = format!("{}; runtime {seconds:.1}s over {l}s", o.detail);
            }
        }
        CriterionResult {
            id,
            name,
            passed: o.passed,
            expected: o.expected,
            observed: o.observed,
            tolerance: o.tolerance,
            detail: o.detail,
            seconds,
            limit_seconds: limit,
        }
    }

    fn cz_mean(&self) -> CliResult<Outcome> {
        let (mean, _) = dyadic(&self.exhaustive(Family::Cz, 8, 4, Method::Rank)?);
        let want = cz_avg_purity(4, 4)?;
        Ok(Outcome {
            passed: mean == want,
            expected: frac(&want),
            observed: frac(&mean),
            tolerance: "0".into(),
            detail: "2^16 cross-edge graphs, N=8, N_A=4, rank method".into(),
        })
    }

    fn cz_variance(&self) -> CliResult<Outcome> {
        let (_, var) = dyadic(&self.exhaustive(Family::Cz, 8, 4, Method::Rank)?);
        let want = cz_purity_variance(4, 4)?;
        Ok(Outcome {
            passed: var == want,
            expected: frac(&want),
            observed: frac(&var),
            tolerance: "0".into(),
            detail: "2^16 cross-edge graphs, N=8, N_A=4, rank method".into(),
        })
    }

    fn ccz_mean(&self) -> CliResult<Outcome> {
        let (mean, _) = dyadic(&self.exhaustive(Family::Ccz, 6, 3, Method::StateVector)?);
        let want = ccz_avg_purity(3, 3)?;
        let rel = (rational_to_f64(&mean) / rational_to_f64(&want) - 1.0).abs();
        Ok(Outcome {
            passed: rel <= 1e-9,
            expected: frac(&want),
            observed: frac(&mean),
            tolerance: "relative 1e-9".into(),
            detail: if mean == want {
                "2^18 cross 3-edge hypergraphs, N=6, N_A=3; exact equality".into()
            } else {
                format!("residual {}", frac(&(&mean - &want)))
            },
        })
    }

    fn half_moments(&self) -> CliResult<Outcome> {
        let mut expected = Vec::new();
        let mut observed = Vec::new();
        let mut passed = true;
        for (na, nb) in [(1, 2), (2, 2), (1, 3), (3, 3)] {
            let (mean, var) =
                dyadic(&self.exhaustive(Family::CczHalf, na + nb, na, Method::StateVector)?);
            let want_mean = ccz_half_avg_purity(na, nb)?;
            let want_var = ccz_half_purity_variance(na, nb, Sharp4Source::Oracle)?.value;
            passed &= mean == want_mean && var == want_var;
            expected.push(format!(
                "({na},{nb}) {} {}",
                frac(&want_mean),
                frac(&want_var)
            ));
            observed.push(format!("({na},{nb}) {} {}", frac(&mean), frac(&var)));
        }
        Ok(Outcome {
            passed,
            expected: expected.join("; "),
            observed: observed.join("; "),
            tolerance: "0".into(),
            detail: "mean and variance per (N_A,N_Ā)".into(),
        })
    }

    fn sharp4(&self) -> CliResult<Outcome> {
        let oracle: Vec<BigUint> = (0..=5).map(sharp4_oracle).collect();
        let naive: Vec<BigUint> = (0..=5)
            .map(|m| BigUint::from(sharp4_brute_force(m)))
            .collect();
        let pinned = [16u32, 136, 704].map(BigUint::from);
        let show = |v: &[BigUint]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        Ok(Outcome {
            passed: oracle == naive && oracle[1..=3] == pinned,
            expected: show(&naive),
            observed: show(&oracle),
            tolerance: "0".into(),
            detail: "m = 0..5, naive 16^m enumeration".into(),
        })
    }

    fn rank_purity(&self) -> CliResult<Outcome> {
        let mut mismatches = 0;
        let mut first = String::new();
        const GRAPHS: u64 = 500;
        for i in 0..GRAPHS {
            let mut rng = CounterRng::for_stream(self.seed ^ 6, i);
            let n = 2 + (rng.next_u64() % 9) as u32;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.bernoulli(0.5) {
                        edges.push([a, b]);
                    }
                }
            }
            let h = Hypergraph::new(n, &edges)?;
            let a_mask = loop {
                let m = rng.next_u64() & ((1 << n) - 1);
                if m != 0 && m != (1 << n) - 1 {
                    break m;
                }
            };
            let part = Bipartition::new(n, a_mask)?;
            let rank = (self.rank)(&graph_cut_matrix(&h, &part)?);
            let purity = reduced_purity(&SignTable::build(&h, self.max_qubits)?, &part)?;
            if purity != DyadicRational::new(1, rank as u32) {
                if mismatches == 0 {
                    first = format!("graph {i}: n={n} A={a_mask:#b} rank={rank} purity={purity}");
                }
                mismatches += 1;
            }
        }
        Ok(Outcome {
            passed: mismatches == 0,
            expected: format!("{GRAPHS} matches"),
            observed: format!("{} matches", GRAPHS - mismatches),
            tolerance: "0".into(),
            detail: if first.is_empty() {
                "random graphs, n in 2..=10, random cuts".into()
            } else {
                format!("first mismatch {first}")
            },
        })
    }

    fn mc_row(
        &self,
        family: Family,
        n: u32,
        samples: u64,
        seed: u64,
        runner: &Runner,
    ) -> CliResult<MomentsRow> {
        let ens = self.ensemble(family, n, n / 2)?;
        let method = ens.resolve_method(Method::Auto)?;
        let report = runner.monte_carlo(&ens, samples, seed, method)?;
        Ok(MomentsRow::new(&ens, &report, method.name(), Some(seed)))
    }

    fn monte_carlo_rows(&self, runner: &Runner) -> CliResult<[MomentsRow; 2]> {
        Ok([
            self.mc_row(
                Family::Cz,
                16,
                self.samples(100_000, 20_000),
                self.seed ^ 7,
                runner,
            )?,
            self.mc_row(
                Family::Ccz,
                14,
                self.samples(10_000, 2_000),
                self.seed ^ 77,
                runner,
            )?,
        ])
    }

    fn monte_carlo(&self) -> CliResult<Outcome> {
        let rows = self.monte_carlo_rows(self.runner)?;
        let z: Vec<f64> = rows.iter().map(|r| r.z_score.unwrap_or(f64::NAN)).collect();
        Ok(Outcome {
            passed: z.iter().all(|z| z.abs() <= 5.0),
            expected: format!(
                "cz N=16 {}; ccz N=14 {}",
                rows[0].closed_form_mean.unwrap_or(f64::NAN),
                rows[1].closed_form_mean.unwrap_or(f64::NAN)
            ),
            observed: format!(
                "cz {} (z={:.3}, {} samples); ccz {} (z={:.3}, {} samples)",
                rows[0].mean, z[0], rows[0].samples, rows[1].mean, z[1], rows[1].samples
            ),
            tolerance: "|z| <= 5".into(),
            detail: "equal partitions".into(),
        })
    }

    fn ccz_variance_order(&self) -> CliResult<Outcome> {
        let (_, var) = dyadic(&self.exhaustive(Family::Ccz, 6, 3, Method::StateVector)?);
        let (lead, bound) = ccz_purity_variance_leading(3, 3)?;
        let v = rational_to_f64(&var);
        let ratio = v / lead;
        Ok(Outcome {
            passed: (0.5..=2.0).contains(&ratio),
            expected: format!("{lead:e}"),
            observed: format!("{v:e} ({})", frac(&var)),
            tolerance: "factor 2".into(),
            detail: format!("ratio {ratio:.4}; rigorous bound 3N^2 d^-3/2 = {bound:e}"),
        })
    }

    fn rank_distribution(&self) -> CliResult<Outcome> {
        let samples = self.samples(100_000, 20_000);
        let h = self
            .runner
            .rank_histogram(16, samples, self.seed ^ 9, self.rank);
        let q0 = rank_defect_prob(0, RANK_PRODUCT_TERMS);
        let (f0, f1, f2) = (h.frequency(0), h.frequency(1), h.frequency(2));
        let sd = (q0 * (1.0 - q0) / samples as f64).sqrt();
        let (r1, r2) = (f1 / f0, f2 / f0);
        Ok(Outcome {
            passed: (f0 - q0).abs() <= 5.0 * sd
                && (r1 - 2.0).abs() <= 0.1
                && (r2 - 4.0 / 9.0).abs() <= 0.05,
            expected: format!("Q0={q0:.6}, Q1/Q0=2, Q2/Q0={:.6}", 4.0 / 9.0),
            observed: format!("f0={f0:.6}, f1/f0={r1:.4}, f2/f0={r2:.4}"),
            tolerance: format!("5 sd = {:.6}; 0.1; 0.05", 5.0 * sd),
            detail: format!("n=16, {samples} samples"),
        })
    }

    fn entropy_separation(&self) -> CliResult<Outcome> {
        let cz = self.ensemble(Family::Cz, 32, 16)?;
        let cz_r = self.runner.monte_carlo(
            &cz,
            self.samples(100_000, 20_000),
            self.seed ^ 10,
            Method::Rank,
        )?;
        let ccz = self.ensemble(Family::Ccz, 12, 6)?;
        let ccz_r = self.runner.monte_carlo(
            &ccz,
            self.samples(2_000, 500),
            self.seed ^ 100,
            Method::StateVector,
        )?;
        let cz_var = cz_r.entropy.variance.to_f64();
        let ccz_var = ccz_r.entropy.variance.to_f64();
        let ccz_mean = ccz_r.entropy.mean.to_f64();
        let floor = 6.0 - 1.0 - 3.0 * ccz_r.entropy.std_error_mean;
        let bound = 1.6 * 12.0 * 2f64.powi(-6);
        Ok(Outcome {
            passed: (0.3..=0.5).contains(&cz_var)
                && cz_var > 0.128
                && ccz_var < bound
                && ccz_mean >= floor,
            expected: format!(
                "cz Var[S2] in [0.3,0.5] and > 0.128; ccz Var[S2] < {bound:.4}; ccz <S2> >= {floor:.4}"
            ),
            observed: format!("cz Var={cz_var:.4}; ccz Var={ccz_var:.5}, <S2>={ccz_mean:.4}"),
            tolerance: "as stated".into(),
            detail: format!("cz N=32 {} samples; ccz N=12 {} samples", cz_r.entropy.samples, ccz_r.entropy.samples),
        })
    }

    fn determinism(&self) -> CliResult<Outcome> {
        let first = encode(&self.monte_carlo_rows(self.runner)?, Format::Csv, "moments")?;
        let second = encode(&self.monte_carlo_rows(self.runner)?, Format::Csv, "moments")?;
        let other_workers = if self.runner.workers() == 1 { 4 } else { 1 };
        let other = Runner::new(Some(other_workers))?;
        let serial = encode(&self.monte_carlo_rows(&other)?, Format::Csv, "moments")?;
        let digest = |b: &[u8]| {
            b.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &x| {
                (h ^ u64::from(x)).wrapping_mul(0x100_0000_01b3)
            })
        };
        Ok(Outcome {
            passed: first == second && first == serial,
            expected: format!("{:016x}", digest(&first)),
            observed: format!("{:016x} {:016x}", digest(&second), digest(&serial)),
            tolerance: "byte-identical".into(),
            detail: format!(
                "monte carlo report re-run with {} workers, then with {other_workers}",
                self.runner.workers()
            ),
        })
    }
}
