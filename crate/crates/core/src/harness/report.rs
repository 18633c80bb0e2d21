/// Decision rule of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    /// `|statistic − target| ≤ tolerance`.
    Within { target: f64, tolerance: f64 },
    /// `statistic ≤ limit`.
    AtMost(f64),
    /// `statistic ≥ limit`.
    AtLeast(f64),
    /// `statistic < limit`.
    StrictlyBelow(f64),
    /// `p_value ≥ threshold`.
    PValueAtLeast(f64),
    /// Reported without a verdict.
    Informational,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Within { .. } => "within",
            Criterion::AtMost(_) => "at_most",
            Criterion::AtLeast(_) => "at_least",
            Criterion::StrictlyBelow(_) => "strictly_below",
            Criterion::PValueAtLeast(_) => "p_value_at_least",
            Criterion::Informational => "informational",
        }
    }

    /// Reference value the statistic is compared with.
    pub fn target(&self) -> Option<f64> {
        match *self {
            Criterion::Within { target, .. } => Some(target),
            Criterion::AtMost(l) | Criterion::AtLeast(l) | Criterion::StrictlyBelow(l) => Some(l),
            Criterion::PValueAtLeast(_) | Criterion::Informational => None,
        }
    }

    /// Tolerance or p-value threshold.
    pub fn tolerance(&self) -> Option<f64> {
        match *self {
            Criterion::Within { tolerance, .. } => Some(tolerance),
            Criterion::PValueAtLeast(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub criterion: Criterion,
    pub replications: u64,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl TestReport {
    pub fn new(name: impl Into<String>, statistic: f64, criterion: Criterion) -> Self {
        Self {
            name: name.into(),
            statistic,
            p_value: None,
            criterion,
            replications: 0,
            seed: None,
            notes: Vec::new(),
        }
    }

    pub fn with_p_value(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    pub fn with_replications(mut self, replications: u64) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Verdict; `None` for informational reports. NaN statistics fail.
    pub fn pass(&self) -> Option<bool> {
        let s = self.statistic;
        match self.criterion {
            Criterion::Within { target, tolerance } => Some((s - target).abs() <= tolerance),
            Criterion::AtMost(l) => Some(s <= l),
            Criterion::AtLeast(l) => Some(s >= l),
            Criterion::StrictlyBelow(l) => Some(s < l),
            Criterion::PValueAtLeast(t) => Some(self.p_value.is_some_and(|p| p >= t)),
            Criterion::Informational => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let r = TestReport::new("x", 1.04, Criterion::Within { target: 1.0, tolerance: 0.05 });
        assert_eq!(r.pass(), Some(true));
        let r = TestReport::new("x", f64::NAN, Criterion::AtMost(1.0));
        assert_eq!(r.pass(), Some(false));
        let r = TestReport::new("x", 0.1, Criterion::PValueAtLeast(0.01));
        assert_eq!(r.pass(), Some(false));
        assert_eq!(r.clone().with_p_value(0.5).pass(), Some(true));
        assert_eq!(TestReport::new("x", 0.0, Criterion::Informational).pass(), None);
        assert_eq!(TestReport::new("x", 0.0, Criterion::StrictlyBelow(0.0)).pass(), Some(false));
    }
}
