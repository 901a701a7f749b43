//! Degree obstruction for taming snakes: along the line x = 0 the
//! x-gradient of a taming polynomial is a polynomial in z that must change
//! sign at every turn, so a snake with `turns` turns needs degree at least
//! turns + 1, and infinitely many turns rule out any polynomial at all.

use serde::Serialize;

use crate::verify::VerificationReport;

/// Number of turns of a snake, finite or countably infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TurnCount {
    Finite(u64),
    Infinite,
}

/// Outcome of the necessary-condition check.
#[derive(Debug, Clone, Serialize)]
pub struct ObstructionOutcome {
    pub taming_possible: bool,
    pub explanation: String,
    /// Minimal polynomial degree compatible with the turn count, when one
    /// exists at all.
    pub min_degree: Option<u64>,
}

/// Smallest degree whose x-gradient can alternate sign at `turns` turns.
pub fn required_degree(turns: u64) -> u64 {
    turns + 1
}

/// Whether a degree-m polynomial can possibly tame a snake with the given
/// number of turns: p_x(0, z) has z-degree at most m - 1 and needs one sign
/// change per turn.
pub fn obstruction_check(turns: TurnCount, m: u64) -> ObstructionOutcome {
    match turns {
        TurnCount::Finite(t) => {
            let min = required_degree(t);
            if m >= min {
                ObstructionOutcome {
                    taming_possible: true,
                    explanation: format!(
                        "degree {m} leaves p_x(0, z) room for {} sign changes, enough for {t} turns",
                        m.saturating_sub(1)
                    ),
                    min_degree: Some(min),
                }
            } else {
                ObstructionOutcome {
                    taming_possible: false,
                    explanation: format!(
                        "degree < turns+1: p_x(0, z) has degree at most {} and cannot change sign {t} times",
                        m.saturating_sub(1)
                    ),
                    min_degree: Some(min),
                }
            }
        }
        TurnCount::Infinite => ObstructionOutcome {
            taming_possible: false,
            explanation: "p_x(0, z) is a polynomial in z and cannot alternate sign infinitely often"
                .into(),
            min_degree: None,
        },
    }
}

/// Report wrapper: pass holds exactly when the necessary condition does.
pub fn obstruction_suite(turns: TurnCount, m: u64) -> VerificationReport {
    let outcome = obstruction_check(turns, m);
    let label = match turns {
        TurnCount::Finite(t) => format!("turns={t}, degree={m}: {}", outcome.explanation),
        TurnCount::Infinite => format!("turns=inf, degree={m}: {}", outcome.explanation),
    };
    let mut report = VerificationReport::new("obstruction", 0.0);
    report.add_samples(1);
    report.record(
        label,
        if outcome.taming_possible { 1.0 } else { 0.0 },
        1.0,
        outcome.taming_possible,
    );
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{count_sign_changes, taming_p, turn_product, VAR_X};

    #[test]
    fn truth_table_matches_the_degree_bound() {
        for turns in 1..=10u64 {
            for m in 1..=12u64 {
                let outcome = obstruction_check(TurnCount::Finite(turns), m);
                assert_eq!(outcome.taming_possible, m >= turns + 1, "turns={turns} m={m}");
                assert_eq!(outcome.min_degree, Some(turns + 1));
            }
            assert!(!obstruction_check(TurnCount::Infinite, turns).taming_possible);
        }
    }

    #[test]
    fn named_cases() {
        assert!(!obstruction_check(TurnCount::Finite(3), 3).taming_possible);
        assert!(obstruction_check(TurnCount::Finite(1), 3).taming_possible);
        assert!(!obstruction_check(TurnCount::Infinite, 10_000).taming_possible);
    }

    /// The constructed family instantiates the bound: the surface with l
    /// equilibria has l - 1 turns, its taming polynomial has degree 2l - 1,
    /// and p_x(0, z) really does change sign at every turn (Sturm oracle).
    #[test]
    fn constructed_family_is_consistent_with_the_bound() {
        for l in 2..=6usize {
            let turns = (l - 1) as u64;
            assert!(obstruction_check(TurnCount::Finite(turns), (2 * l - 1) as u64).taming_possible);
            assert!(!obstruction_check(TurnCount::Finite(turns), turns).taming_possible);

            let px = taming_p(l, 1.0).unwrap().partial(VAR_X).unwrap();
            assert_eq!(px, turn_product(l).unwrap());
            assert_eq!(
                count_sign_changes(&px, (0.0, (l - 1) as f64)).unwrap(),
                l - 1
            );
        }
    }

    #[test]
    fn suite_report_passes_and_fails_accordingly() {
        assert!(obstruction_suite(TurnCount::Finite(1), 3).pass);
        assert!(!obstruction_suite(TurnCount::Finite(5), 4).pass);
        assert!(!obstruction_suite(TurnCount::Infinite, 99).pass);
    }
}
