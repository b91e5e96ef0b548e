use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One tested relation: a numeric value against its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub relation: String,
    pub i: usize,
    pub j: usize,
    pub value: Complex64,
    pub target: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Outcome of a verification suite.
///
/// `pass` holds exactly when every entry's deviation is below `tolerance`.
/// The deviation is `abs_err` for absolute reports and `rel_err`
/// (normalised by `max(1, |target|)`) for relative ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub check: String,
    pub entries: Vec<BracketEntry>,
    pub pass: bool,
    pub tolerance: f64,
    pub relative: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BracketReport {
    pub fn new(check: impl Into<String>, tolerance: f64, relative: bool) -> Self {
        BracketReport {
            check: check.into(),
            entries: Vec::new(),
            pass: true,
            tolerance,
            relative,
            notes: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        relation: impl Into<String>,
        i: usize,
        j: usize,
        value: Complex64,
        target: Complex64,
    ) {
        let abs_err = (value - target).norm();
        let rel_err = abs_err / target.norm().max(1.0);
        let dev = if self.relative { rel_err } else { abs_err };
        if !(dev <= self.tolerance) {
            self.pass = false;
        }
        self.entries.push(BracketEntry {
            relation: relation.into(),
            i,
            j,
            value,
            target,
            abs_err,
            rel_err,
        });
    }

    /// Records a failure that is not a numeric comparison.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.pass = false;
        self.notes.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Largest deviation in the report's own norm.
    pub fn worst(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| if self.relative { e.rel_err } else { e.abs_err })
            .fold(0.0, f64::max)
    }

    /// Folds another report into this one, prefixing its relations.
    pub fn absorb(&mut self, other: BracketReport) {
        for e in other.entries {
            let dev = if self.relative { e.rel_err } else { e.abs_err };
            if !(dev <= self.tolerance) {
                self.pass = false;
            }
            self.entries.push(BracketEntry {
                relation: format!("{}: {}", other.check, e.relation),
                ..e
            });
        }
        if !other.pass {
            self.pass = false;
        }
        self.notes.extend(other.notes);
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} relations, worst {} deviation {:.3e}, tolerance {:.1e})",
            self.check,
            if self.pass { "PASS" } else { "FAIL" },
            self.entries.len(),
            if self.relative {
                "relative"
            } else {
                "absolute"
            },
            self.worst(),
            self.tolerance
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_tracks_tolerance() {
        let mut r = BracketReport::new("t", 1e-6, false);
        r.push(
            "a",
            0,
            0,
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0 + 1e-8, 0.0),
        );
        assert!(r.pass);
        r.push(
            "b",
            0,
            1,
            Complex64::new(0.0, 1e-3),
            Complex64::new(0.0, 0.0),
        );
        assert!(!r.pass);
        assert!((r.worst() - 1e-3).abs() < 1e-15);

        let mut rel = BracketReport::new("t", 1e-6, true);
        rel.push(
            "big",
            0,
            0,
            Complex64::new(1e6 + 0.1, 0.0),
            Complex64::new(1e6, 0.0),
        );
        assert!(rel.pass);
        rel.push(
            "nan",
            0,
            0,
            Complex64::new(f64::NAN, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!(!rel.pass);
    }

    #[test]
    fn json_shape() {
        let mut r = BracketReport::new("canonicity", 1e-6, false);
        r.push(
            "x",
            1,
            2,
            Complex64::new(0.5, -1.0),
            Complex64::new(0.5, -1.0),
        );
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["check"], "canonicity");
        assert_eq!(v["entries"][0]["value"], serde_json::json!([0.5, -1.0]));
        assert_eq!(v["pass"], true);
        assert!(v.get("notes").is_none());
    }
}
