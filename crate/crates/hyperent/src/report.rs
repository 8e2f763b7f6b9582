//! Output records and their CSV / JSON encodings.

use std::io::Write;

use hyperent_core::closed_forms::{
    ccz_avg_purity, ccz_half_avg_purity, ccz_half_purity_variance, ccz_purity_variance_leading,
    cz_avg_purity, cz_purity_variance, rank_defect_prob, rational_to_f64, FormulaReport,
    FormulaValue, Input, Sharp4Source, RANK_PRODUCT_TERMS,
};
use hyperent_core::ensemble::{Ensemble, EnsembleReport};
use hyperent_core::stats::Moment;
use hyperent_core::{Family, RankHistogram};
use serde::Serialize;

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// One `(n, n_a)` point of a moments sweep. The first twelve columns are the sweep
/// schema; the rest carry exact values and entropy moments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentsRow {
    pub n: u32,
    pub n_a: u32,
    pub family: String,
    pub scope: &'static str,
    pub p: f64,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub std_err_mean: f64,
    pub closed_form_mean: Option<f64>,
    pub closed_form_variance: Option<f64>,
    pub z_score: Option<f64>,
    pub exact: bool,
    pub method: &'static str,
    pub seed: Option<u64>,
    pub mean_exact: Option<String>,
    pub variance_exact: Option<String>,
    pub std_err_variance: f64,
    pub closed_form_mean_exact: Option<String>,
    pub closed_form_variance_exact: Option<String>,
    pub closed_form_variance_validity: Option<&'static str>,
    pub entropy_mean: f64,
    pub entropy_variance: f64,
    pub entropy_std_err_mean: f64,
}

struct ClosedForms {
    mean: Option<num_rational::BigRational>,
    variance: Option<(FormulaValue, &'static str)>,
}

fn closed_forms(family: Family, p: f64, n_a: u32, n_b: u32) -> ClosedForms {
    let none = ClosedForms {
        mean: None,
        variance: None,
    };
    if p != 0.5 {
        return none;
    }
    let exact = |r: hyperent_core::Result<num_rational::BigRational>| {
        r.ok().map(|r| (FormulaValue::Rational(r), "exact"))
    };
    match family {
        Family::Cz => ClosedForms {
            mean: cz_avg_purity(n_a, n_b).ok(),
            variance: exact(cz_purity_variance(n_a, n_b)),
        },
        Family::Ccz => ClosedForms {
            mean: ccz_avg_purity(n_a, n_b).ok(),
            variance: ccz_purity_variance_leading(n_a, n_b)
                .ok()
                .map(|(v, _)| (FormulaValue::Real(v), "asymptotic")),
        },
        Family::CczHalf => ClosedForms {
            mean: ccz_half_avg_purity(n_a, n_b).ok(),
            variance: exact(
                ccz_half_purity_variance(n_a, n_b, Sharp4Source::Oracle).map(|v| v.value),
            ),
        },
        Family::KUniform(_) => none,
    }
}

fn exact_text(m: &Moment) -> Option<String> {
    m.exact().map(|d| d.to_string())
}

impl MomentsRow {
    pub fn new(
        ens: &Ensemble,
        report: &EnsembleReport,
        method: &'static str,
        seed: Option<u64>,
    ) -> Self {
        let spec = ens.spec();
        let part = ens.partition();
        let (n_a, n_b) = (part.n_a(), part.n_b());
        let cf = closed_forms(spec.family, spec.edge_probability, n_a, n_b);
        let pur = &report.purity;
        let closed_mean = cf.mean.as_ref().map(rational_to_f64);
        MomentsRow {
            n: spec.n_qubits,
            n_a,
            family: spec.family.to_string(),
            scope: spec.scope.name(),
            p: spec.edge_probability,
            samples: pur.samples,
            mean: pur.mean.to_f64(),
            variance: pur.variance.to_f64(),
            std_err_mean: pur.std_error_mean,
            closed_form_mean: closed_mean,
            closed_form_variance: cf.variance.as_ref().map(|(v, _)| v.to_f64()),
            z_score: match (&cf.mean, pur.mean.exact()) {
                (Some(c), Some(m)) => Some(if &m.to_rational() == c {
                    0.0
                } else if m.to_rational() > *c {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }),
                (Some(_), None) => closed_mean.map(|c| pur.z_score(c)),
                (None, _) => None,
            },
            exact: pur.exact,
            method,
            seed,
            mean_exact: exact_text(&pur.mean),
            variance_exact: exact_text(&pur.variance),
            std_err_variance: pur.std_error_variance,
            closed_form_mean_exact: cf.mean.as_ref().map(|r| r.to_string()),
            closed_form_variance_exact: cf.variance.as_ref().and_then(|(v, _)| v.exact_text()),
            closed_form_variance_validity: cf.variance.as_ref().map(|(_, k)| *k),
            entropy_mean: report.entropy.mean.to_f64(),
            entropy_variance: report.entropy.variance.to_f64(),
            entropy_std_err_mean: report.entropy.std_error_mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankdistRow {
    pub s: usize,
    pub count: u64,
    pub frequency: f64,
    #[serde(rename = "closed_form_Qs")]
    pub closed_form_qs: f64,
    /// Binomial standard error of the frequency under the closed-form probability.
    pub std_err: f64,
}

/// Rows `s = 0 ..= max(observed, 3)`, capped at `n`.
pub fn rankdist_rows(h: &RankHistogram) -> Vec<RankdistRow> {
    let last = h.max_defect().max(3).min(h.n);
    (0..=last)
        .map(|s| {
            let q = rank_defect_prob(s as u32, RANK_PRODUCT_TERMS);
            RankdistRow {
                s,
                count: h.count(s),
                frequency: h.frequency(s),
                closed_form_qs: q,
                std_err: (q * (1.0 - q) / h.samples as f64).sqrt(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateRow {
    pub n: u32,
    pub a_mask: u64,
    pub n_a: u32,
    pub edges: usize,
    pub purity_numerator: String,
    pub purity_exponent: u32,
    pub purity: String,
    pub purity_decimal: f64,
    pub renyi2: f64,
    pub cut_rank: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaDoc {
    pub label: &'static str,
    pub inputs: serde_json::Map<String, serde_json::Value>,
    pub value: serde_json::Value,
    pub value_decimal: f64,
    pub validity: &'static str,
    pub extras: serde_json::Map<String, serde_json::Value>,
}

fn value_json(v: &FormulaValue) -> serde_json::Value {
    match v {
        FormulaValue::Real(x) => serde_json::json!(x),
        other => serde_json::Value::String(other.to_string()),
    }
}

impl From<&FormulaReport> for FormulaDoc {
    fn from(r: &FormulaReport) -> Self {
        let inputs = r
            .inputs
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    Input::Int(i) => serde_json::json!(i),
                    Input::Real(x) => serde_json::json!(x),
                };
                (k.to_string(), v)
            })
            .collect();
        let extras = r
            .extras
            .iter()
            .map(|(k, v)| (k.to_string(), value_json(v)))
            .collect();
        FormulaDoc {
            label: r.label,
            inputs,
            value: value_json(&r.value),
            value_decimal: r.value.to_f64(),
            validity: r.validity.name(),
            extras,
        }
    }
}

/// Streams CSV rows (flushed one by one) or collects them into a JSON document.
pub struct TableWriter<W: Write> {
    format: Format,
    command: &'static str,
    csv: Option<csv::Writer<W>>,
    json_out: Option<W>,
    rows: Vec<serde_json::Value>,
}

impl<W: Write> TableWriter<W> {
    pub fn new(out: W, format: Format, command: &'static str) -> Self {
        match format {
            Format::Csv => TableWriter {
                format,
                command,
                csv: Some(csv::Writer::from_writer(out)),
                json_out: None,
                rows: Vec::new(),
            },
            Format::Json => TableWriter {
                format,
                command,
                csv: None,
                json_out: Some(out),
                rows: Vec::new(),
            },
        }
    }

    pub fn row<T: Serialize>(&mut self, row: &T) -> CliResult<()> {
        match self.format {
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.serialize(row)?;
                w.flush()?;
            }
            Format::Json => self.rows.push(serde_json::to_value(row)?),
        }
        Ok(())
    }

    pub fn finish(self) -> CliResult<()> {
        if let Some(mut w) = self.csv {
            w.flush()?;
        }
        if let Some(mut out) = self.json_out {
            let doc = serde_json::json!({ "command": self.command, "rows": self.rows });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
        Ok(())
    }
}

/// Encodes `rows` in one go; used for byte-level determinism checks.
pub fn encode<T: Serialize>(
    rows: &[T],
    format: Format,
    command: &'static str,
) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut w = TableWriter::new(&mut buf, format, command);
    for r in rows {
        w.row(r)?;
    }
    w.finish()?;
    Ok(buf)
}
