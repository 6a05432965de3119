use std::fmt;

/// Outcome of one row or one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// A valid estimate held everywhere within budget.
    Bounded,
    /// A valid estimate was violated beyond budget.
    Violation,
    /// A counterexample showed the expected growth.
    Blowup,
    /// A counterexample failed to grow as expected.
    NoBlowup,
    IdentityOk,
    IdentityFail,
    /// No pass/fail semantics.
    Exploratory,
}

impl Verdict {
    pub const ALL: [Verdict; 7] = [
        Verdict::Bounded,
        Verdict::Violation,
        Verdict::Blowup,
        Verdict::NoBlowup,
        Verdict::IdentityOk,
        Verdict::IdentityFail,
        Verdict::Exploratory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::Violation => "violation",
            Verdict::Blowup => "blowup",
            Verdict::NoBlowup => "no-blowup",
            Verdict::IdentityOk => "identity-ok",
            Verdict::IdentityFail => "identity-fail",
            Verdict::Exploratory => "exploratory",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        Verdict::ALL.into_iter().find(|v| v.name() == s)
    }

    pub fn passed(self) -> bool {
        !matches!(self, Verdict::Violation | Verdict::NoBlowup | Verdict::IdentityFail)
    }

    /// `ok` maps to `self`, a failure to the matching negative verdict.
    pub fn or_fail(self, ok: bool) -> Verdict {
        if ok {
            return self;
        }
        match self {
            Verdict::Bounded => Verdict::Violation,
            Verdict::Blowup => Verdict::NoBlowup,
            Verdict::IdentityOk => Verdict::IdentityFail,
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub param_key: String,
    pub param_value: String,
    pub resolution: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub verdict: Verdict,
    pub runtime_s: f64,
}

/// `lhs/rhs`, with `0/0 = 0` and `x/0 = ∞`.
pub fn guarded_ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
    /// Named scalar outcomes the acceptance suite checks against its own
    /// tolerances.
    pub metrics: Vec<(String, f64)>,
    /// One line of human-readable context.
    pub summary: String,
}

impl ExperimentReport {
    pub fn new(id: &str) -> Self {
        ExperimentReport { id: id.to_string(), rows: Vec::new(), verdict: Verdict::Exploratory, metrics: Vec::new(), summary: String::new() }
    }

    pub fn row(&mut self, key: &str, value: impl fmt::Display, resolution: usize, lhs: f64, rhs: f64, verdict: Verdict) {
        self.rows.push(Row {
            experiment: self.id.clone(),
            param_key: key.to_string(),
            param_value: value.to_string(),
            resolution,
            lhs,
            rhs,
            ratio: guarded_ratio(lhs, rhs),
            verdict,
            runtime_s: 0.0,
        });
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.push((name.to_string(), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Metric by name; panics if absent (for tests).
    pub fn expect(&self, name: &str) -> f64 {
        self.get(name).unwrap_or_else(|| panic!("{}: no metric '{name}'", self.id))
    }

    /// Sets the verdict and orders the rows by (params, resolution); numeric
    /// parameter values sort numerically.
    pub fn finish(mut self, verdict: Verdict, summary: String) -> Self {
        self.verdict = verdict;
        self.summary = summary;
        self.rows.sort_by(|a, b| {
            let key = |r: &Row| (r.param_key.clone(), r.param_value.parse::<f64>().ok());
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0)
                .then_with(|| match (ka.1, kb.1) {
                    (Some(x), Some(y)) => x.total_cmp(&y),
                    _ => a.param_value.cmp(&b.param_value),
                })
                .then(a.resolution.cmp(&b.resolution))
        });
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}
