/// Outcome of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Verdict {
    Pass,
    Fail,
    /// Within the stability band of the decision threshold.
    Inconclusive,
    /// Not run: not requested, not applicable, or short-circuited.
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Skipped => "skipped",
        }
    }

    /// Conjunction: any fail wins, then any inconclusive. Skipped entries are ignored.
    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Skipped;
        for v in verdicts {
            out = match (out, v) {
                (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
                (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
                _ => Verdict::Skipped,
            };
        }
        out
    }

    pub fn is_conclusive(self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

/// Pass when `excess <= band`, fail beyond twice the band, inconclusive in between.
pub fn banded(excess: f64, band: f64) -> Verdict {
    if excess.is_nan() {
        Verdict::Inconclusive
    } else if excess <= band {
        Verdict::Pass
    } else if excess > 2.0 * band {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction() {
        assert_eq!(Verdict::all([Verdict::Pass, Verdict::Inconclusive]), Verdict::Inconclusive);
        assert_eq!(Verdict::all([Verdict::Inconclusive, Verdict::Fail]), Verdict::Fail);
        assert_eq!(Verdict::all([Verdict::Skipped, Verdict::Pass]), Verdict::Pass);
        assert_eq!(Verdict::all([]), Verdict::Skipped);
    }

    #[test]
    fn bands() {
        assert_eq!(banded(0.04, 0.05), Verdict::Pass);
        assert_eq!(banded(0.07, 0.05), Verdict::Inconclusive);
        assert_eq!(banded(0.5, 0.05), Verdict::Fail);
    }
}
