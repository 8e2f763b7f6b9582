//! Acceptance suite. Each criterion prints one PASS/FAIL line; expected values come
//! from pinned constants or from oracles written here, not from the library's closed
//! forms. Runs without the libtest harness so the lines always show.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperent::report::{encode, Format, MomentsRow};
use hyperent::run::Runner;
use hyperent_core::ensemble::{Ensemble, EnsembleReport};
use hyperent_core::purity::reduced_purity;
use hyperent_core::sharp4::sharp4_oracle;
use hyperent_core::{
    Bipartition, CounterRng, DyadicRational, EnsembleSpec, Family, Gf2Matrix, Hypergraph, Method,
    SignTable,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

const SEED: u64 = 20_240_611;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn big_q(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn to_f64(r: &BigRational) -> f64 {
    hyperent_core::closed_forms::rational_to_f64(r)
}

/// Row-reduction rank over GF(2) of rows given as bit masks.
fn rank_of_rows(mut rows: Vec<u64>) -> u32 {
    let mut rank = 0;
    while let Some(pivot_row) = rows.iter().copied().find(|&r| r != 0) {
        let pivot = pivot_row & pivot_row.wrapping_neg();
        rows = rows
            .into_iter()
            .filter(|&r| r != pivot_row)
            .map(|r| if r & pivot != 0 { r ^ pivot_row } else { r })
            .collect();
        rank += 1;
    }
    rank
}

/// Number of `m`-tuples over F₂⁴ with pairwise-orthogonal entries, by direct search.
fn naive_sharp4(m: u32) -> u64 {
    let dot = |a: u32, b: u32| (a & b).count_ones().is_multiple_of(2);
    let mut count = 0;
    for code in 0..16u64.pow(m) {
        let v: Vec<u32> = (0..m).map(|i| (code >> (4 * i) & 15) as u32).collect();
        if (0..v.len()).all(|i| (i + 1..v.len()).all(|j| dot(v[i], v[j]))) {
            count += 1;
        }
    }
    count
}

fn pow2(k: u32) -> BigInt {
    BigInt::from(1) << k as usize
}

fn cz_mean(na: u32, nb: u32) -> BigRational {
    big_q(pow2(na) + pow2(nb) - 1, pow2(na + nb))
}

fn ccz_mean(na: u32, nb: u32) -> BigRational {
    let extra = q((na * (na + 1) * nb * (nb + 1)) as i64, 1) / big_q(pow2(2 * (na + nb)), 1.into());
    cz_mean(na, nb) + extra
}

fn half_mean(na: u32, nb: u32) -> BigRational {
    let da = pow2(na);
    cz_mean(na, nb) + big_q(&da * (&da - 1) * (nb * (nb + 1)), pow2(2 * (na + nb)))
}

fn half_variance(na: u32, nb: u32) -> BigRational {
    let da = pow2(na);
    let inner = pow2(nb) + (nb * (nb + 1));
    let s4 = BigInt::from(naive_sharp4(nb));
    big_q(
        &da * &da * (&da - 1) * (s4 - &inner * &inner),
        pow2(4 * (na + nb)),
    )
}

fn rank_defect_limit(s: u32) -> f64 {
    let tail: f64 = (s + 1..=200).map(|i| 1.0 - 0.5f64.powi(i as i32)).product();
    let head: f64 = (1..=s).map(|i| 1.0 - 0.5f64.powi(i as i32)).product();
    0.5f64.powi((s * s) as i32) * tail / head
}

fn exact_pair(r: &EnsembleReport) -> (BigRational, BigRational) {
    (
        r.purity.mean.exact().unwrap().to_rational(),
        r.purity.variance.exact().unwrap().to_rational(),
    )
}

struct Ctx {
    runner: Runner,
}

impl Ctx {
    fn ensemble(&self, family: Family, n: u32, na: u32) -> Ensemble {
        Ensemble::new(
            EnsembleSpec::new(family, n),
            Bipartition::first(n, na).unwrap(),
        )
        .unwrap()
    }

    fn exact(&self, family: Family, n: u32, na: u32, method: Method) -> EnsembleReport {
        self.runner
            .exact(&self.ensemble(family, n, na), method, 26)
            .unwrap()
    }

    fn mc(
        &self,
        runner: &Runner,
        family: Family,
        n: u32,
        samples: u64,
        seed: u64,
    ) -> (Ensemble, EnsembleReport) {
        let ens = self.ensemble(family, n, n / 2);
        let r = runner
            .monte_carlo(&ens, samples, seed, Method::Auto)
            .unwrap();
        (ens, r)
    }
}

struct Check {
    id: u32,
    title: &'static str,
    limit: Option<Duration>,
    run: fn(&Ctx) -> Result<String, String>,
}

fn ensure(ok: bool, msg: String) -> Result<String, String> {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c1(ctx: &Ctx) -> Result<String, String> {
    let (mean, _) = exact_pair(&ctx.exact(Family::Cz, 8, 4, Method::Rank));
    // Oracle: every 4x4 cut block, purity 2^-rank.
    let mut sum = BigInt::from(0);
    for bits in 0u64..1 << 16 {
        let rows = (0..4).map(|r| bits >> (4 * r) & 15).collect();
        sum += BigInt::from(1u64 << (4 - rank_of_rows(rows)));
    }
    let oracle = big_q(sum, pow2(20));
    ensure(
        mean == q(31, 256) && mean == oracle,
        format!("mean {mean}, pinned 31/256, enumeration oracle {oracle}"),
    )
}

fn c2(ctx: &Ctx) -> Result<String, String> {
    let (_, var) = exact_pair(&ctx.exact(Family::Cz, 8, 4, Method::Rank));
    ensure(
        var == q(225, 65536),
        format!("variance {var}, pinned 225/65536"),
    )
}

fn c3(ctx: &Ctx) -> Result<String, String> {
    let (mean, _) = exact_pair(&ctx.exact(Family::Ccz, 6, 3, Method::StateVector));
    let want = q(1104, 4096);
    let rel = (to_f64(&mean) / to_f64(&want) - 1.0).abs();
    let residual = &mean - &want;
    ensure(
        rel <= 1e-9,
        format!("mean {mean}, expected {want}, relative error {rel:e}, exact residual {residual}"),
    )
}

fn c4(ctx: &Ctx) -> Result<String, String> {
    let mut notes = Vec::new();
    let mut ok = true;
    for (na, nb) in [(1, 2), (2, 2), (1, 3), (3, 3)] {
        let (mean, var) = exact_pair(&ctx.exact(Family::CczHalf, na + nb, na, Method::StateVector));
        ok &= mean == half_mean(na, nb) && var == half_variance(na, nb);
        notes.push(format!("({na},{nb}) mean {mean} var {var}"));
    }
    ok &= half_variance(1, 2) == q(9, 256) && half_variance(2, 2) == q(27, 1024);
    ensure(ok, notes.join("; "))
}

fn c5(_: &Ctx) -> Result<String, String> {
    let naive: Vec<u64> = (0..=5).map(naive_sharp4).collect();
    let ok = (0..=5).all(|m| sharp4_oracle(m) == BigUint::from(naive[m as usize]))
        && naive[1..=3] == [16, 136, 704];
    ensure(ok, format!("naive counts {naive:?}"))
}

fn c6(_: &Ctx) -> Result<String, String> {
    let mut bad = 0;
    for i in 0..500u64 {
        let mut rng = CounterRng::for_stream(SEED, i);
        let n = 2 + (rng.next_u64() % 9) as u32;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.next_u64() & 1 == 1 {
                    edges.push([a, b]);
                }
            }
        }
        let a_mask = 1 + rng.next_u64() % ((1 << n) - 2);
        let cut_rows = (0..n)
            .filter(|v| a_mask >> v & 1 == 1)
            .map(|v| {
                edges.iter().fold(0u64, |row, e| {
                    let other = if e[0] == v {
                        e[1]
                    } else if e[1] == v {
                        e[0]
                    } else {
                        return row;
                    };
                    if a_mask >> other & 1 == 0 {
                        row ^ 1 << other
                    } else {
                        row
                    }
                })
            })
            .collect();
        let rank = rank_of_rows(cut_rows);
        let h = Hypergraph::new(n, &edges).unwrap();
        let t = SignTable::build(&h, 16).unwrap();
        let p = reduced_purity(&t, &Bipartition::new(n, a_mask).unwrap()).unwrap();
        if p != DyadicRational::new(1, rank) {
            bad += 1;
        }
    }
    ensure(bad == 0, format!("{} of 500 graphs agree", 500 - bad))
}

fn c7(ctx: &Ctx) -> Result<String, String> {
    let (_, cz) = ctx.mc(&ctx.runner, Family::Cz, 16, 100_000, SEED);
    let (_, ccz) = ctx.mc(&ctx.runner, Family::Ccz, 14, 10_000, SEED + 1);
    let z_cz = cz.purity.z_score(to_f64(&cz_mean(8, 8)));
    let z_ccz = ccz.purity.z_score(to_f64(&ccz_mean(7, 7)));
    ensure(
        z_cz.abs() <= 5.0 && z_ccz.abs() <= 5.0,
        format!("z(cz N=16) = {z_cz:.3}, z(ccz N=14) = {z_ccz:.3}"),
    )
}

fn c8(ctx: &Ctx) -> Result<String, String> {
    let (_, var) = exact_pair(&ctx.exact(Family::Ccz, 6, 3, Method::StateVector));
    let d = 64.0f64;
    let lead = 4.0 / (d * d) - 2.0 * 16.0 / (d * d * d);
    let ratio = to_f64(&var) / lead;
    ensure(
        (0.5..=2.0).contains(&ratio),
        format!(
            "exhaustive variance {var} = {:e}, leading term {lead:e}, ratio {ratio:.4}",
            to_f64(&var)
        ),
    )
}

fn c9(ctx: &Ctx) -> Result<String, String> {
    let samples = 100_000u64;
    let h = ctx
        .runner
        .rank_histogram(16, samples, SEED, Gf2Matrix::rank);
    let q0 = rank_defect_limit(0);
    let sd = (q0 * (1.0 - q0) / samples as f64).sqrt();
    let (f0, f1, f2) = (h.frequency(0), h.frequency(1), h.frequency(2));
    ensure(
        (f0 - q0).abs() <= 5.0 * sd
            && (f1 / f0 - 2.0).abs() <= 0.1
            && (f2 / f0 - 4.0 / 9.0).abs() <= 0.05,
        format!(
            "f0 {f0:.5} vs Q0 {q0:.5} (sd {sd:.5}), f1/f0 {:.4}, f2/f0 {:.4}",
            f1 / f0,
            f2 / f0
        ),
    )
}

fn c10(ctx: &Ctx) -> Result<String, String> {
    let (_, cz) = ctx.mc(&ctx.runner, Family::Cz, 32, 100_000, SEED);
    let (_, ccz) = ctx.mc(&ctx.runner, Family::Ccz, 12, 2_000, SEED + 2);
    let cz_var = cz.entropy.variance.to_f64();
    let ccz_var = ccz.entropy.variance.to_f64();
    let ccz_mean = ccz.entropy.mean.to_f64();
    let floor = 12.0 / 2.0 - 1.0 - 3.0 * ccz.entropy.std_error_mean;
    ensure(
        (0.3..=0.5).contains(&cz_var) && cz_var > 0.128 && ccz_var < 0.3 && ccz_mean >= floor,
        format!("cz Var[S2] {cz_var:.4}; ccz Var[S2] {ccz_var:.5}, <S2> {ccz_mean:.4} (floor {floor:.4})"),
    )
}

fn c11(ctx: &Ctx) -> Result<String, String> {
    let report = |runner: &Runner| {
        let rows: Vec<MomentsRow> = [(Family::Cz, 16, 100_000), (Family::Ccz, 14, 10_000)]
            .into_iter()
            .map(|(f, n, s)| {
                let (ens, r) = ctx.mc(runner, f, n, s, SEED);
                MomentsRow::new(
                    &ens,
                    &r,
                    ens.resolve_method(Method::Auto).unwrap().name(),
                    Some(SEED),
                )
            })
            .collect();
        encode(&rows, Format::Csv, "moments").unwrap()
    };
    let a = report(&ctx.runner);
    let b = report(&ctx.runner);
    let other = Runner::new(Some(if ctx.runner.workers() == 1 { 3 } else { 1 })).unwrap();
    let c = report(&other);
    ensure(
        a == b && a == c,
        format!(
            "{} bytes; same-worker rerun equal: {}; other worker count equal: {}",
            a.len(),
            a == b,
            a == c
        ),
    )
}

fn main() -> ExitCode {
    let ctx = Ctx {
        runner: Runner::new(None).unwrap(),
    };
    let secs = Duration::from_secs;
    let checks = [
        Check {
            id: 1,
            title: "exact CZ mean, N=8 N_A=4 exhaustive",
            limit: Some(secs(10)),
            run: c1,
        },
        Check {
            id: 2,
            title: "exact CZ variance, N=8 N_A=4 exhaustive",
            limit: None,
            run: c2,
        },
        Check {
            id: 3,
            title: "exact CCZ mean, N=6 N_A=3 exhaustive",
            limit: Some(secs(900)),
            run: c3,
        },
        Check {
            id: 4,
            title: "exact half-CCZ mean and variance",
            limit: Some(secs(60)),
            run: c4,
        },
        Check {
            id: 5,
            title: "#4 oracle against naive enumeration",
            limit: Some(secs(120)),
            run: c5,
        },
        Check {
            id: 6,
            title: "graph rank equals state-vector purity",
            limit: None,
            run: c6,
        },
        Check {
            id: 7,
            title: "Monte Carlo means within 5 standard errors",
            limit: Some(secs(600)),
            run: c7,
        },
        Check {
            id: 8,
            title: "CCZ variance within factor 2 of leading term",
            limit: None,
            run: c8,
        },
        Check {
            id: 9,
            title: "GF(2) rank-defect distribution",
            limit: None,
            run: c9,
        },
        Check {
            id: 10,
            title: "entropy variance separation",
            limit: Some(secs(900)),
            run: c10,
        },
        Check {
            id: 11,
            title: "byte-identical Monte Carlo reports",
            limit: None,
            run: c11,
        },
    ];
    let mut failed = 0;
    for c in &checks {
        let start = Instant::now();
        let result = (c.run)(&ctx);
        let took = start.elapsed();
        let over = c.limit.is_some_and(|l| took > l);
        let (ok, msg) = match result {
            Ok(m) if !over => (true, m),
            Ok(m) => (
                false,
                format!("{m}; runtime {took:.1?} over {:?}", c.limit.unwrap()),
            ),
            Err(m) => (false, m),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {} ({:.2?}): {msg}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            took
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
