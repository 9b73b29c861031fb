//! CSV emission shared by the command line and the bindings.
//!
//! Every table starts with `# glassey-lab v1 <subcommand>` and a header
//! row. Floats use Rust's shortest round-trip formatting, so equal inputs
//! give byte-identical files.

use std::fmt::Write as _;

use crate::estimates::IneqSample;
use crate::lifespan::{FitResult, LifespanRecord};
use crate::picard::PicardTrace;

pub const CSV_TAG: &str = "glassey-lab v1";

pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    subcommand: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(subcommand: &str, header: &[&str]) -> Self {
        Self { subcommand: subcommand.to_owned(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {CSV_TAG} {}", self.subcommand);
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

pub const INEQ_COLUMNS: [&str; 12] =
    ["lemma_id", "n", "s", "s1", "s2", "delta", "delta_prime", "T", "seed", "ratio", "bound", "violation"];

pub fn ineq_csv(subcommand: &str, samples: &[IneqSample]) -> Csv {
    let mut csv = Csv::new(subcommand, &INEQ_COLUMNS);
    for s in samples {
        let p = &s.params;
        csv.push(vec![
            s.lemma.as_str().to_owned(),
            p.n.to_string(),
            opt(p.s),
            opt(p.s1),
            opt(p.s2),
            opt(p.delta),
            opt(p.delta_prime),
            opt(p.horizon),
            s.seed.to_string(),
            fmt_f64(s.ratio),
            opt(s.bound),
            s.violation().to_string(),
        ]);
    }
    csv
}

/// Labeled per-term breakdown of each sample, one row per label.
pub fn ineq_detail_csv(subcommand: &str, samples: &[IneqSample]) -> Csv {
    let mut csv = Csv::new(subcommand, &["lemma_id", "T", "seed", "term", "value"]);
    for s in samples {
        for (label, v) in &s.detail {
            csv.push(vec![s.lemma.as_str().to_owned(), opt(s.params.horizon), s.seed.to_string(), label.to_string(), fmt_f64(*v)]);
        }
    }
    csv
}

pub fn picard_csv(trace: &[PicardTrace]) -> Csv {
    let mut csv = Csv::new("picard", &["iteration", "rho_step", "e1", "e2", "le1", "le2"]);
    for t in trace {
        csv.push(vec![
            t.iteration.to_string(),
            fmt_f64(t.rho_step),
            fmt_f64(t.e1),
            fmt_f64(t.e2),
            fmt_f64(t.le1),
            fmt_f64(t.le2),
        ]);
    }
    csv
}

pub fn sweep_csv(records: &[LifespanRecord]) -> Csv {
    let mut csv = Csv::new("lifespan", &["epsilon", "t_observed", "censored", "num_cells", "agreement"]);
    for r in records {
        csv.push(vec![
            fmt_f64(r.epsilon),
            fmt_f64(r.t_observed),
            r.censored.to_string(),
            r.num_cells.to_string(),
            fmt_f64(r.agreement),
        ]);
    }
    csv
}

pub fn fit_csv(fits: &[FitResult]) -> Csv {
    let mut csv = Csv::new("lifespan", &["model", "slope", "intercept", "r_squared", "predicted_slope", "verdict"]);
    for f in fits {
        csv.push(vec![
            f.model.as_str().to_owned(),
            fmt_f64(f.slope),
            fmt_f64(f.intercept),
            fmt_f64(f.r_squared),
            fmt_f64(f.predicted_slope),
            f.verdict.as_str().to_owned(),
        ]);
    }
    csv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_float_format() {
        let mut c = Csv::new("norms", &["a", "b"]);
        c.push(vec![fmt_f64(0.1), fmt_f64(1.0)]);
        assert_eq!(c.render(), "# glassey-lab v1 norms\na,b\n0.1,1\n");
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5e-7] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
