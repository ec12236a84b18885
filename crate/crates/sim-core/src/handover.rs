//! A3 handover condition, load-triggered margin, target selection, and
//! the time-to-trigger state machine.

use crate::config::SimError;

/// A3 entering condition: the target measured with the margin bias must
/// strictly exceed the serving cell.
///
/// The margin is applied as a bias on the target cell, so a larger margin
/// favors earlier handover toward the (underloaded) target.
pub fn a3_condition(rsrp_serving: f64, rsrp_target: f64, hom_effective: f64) -> bool {
    rsrp_target + hom_effective > rsrp_serving
}

/// The configured margin is active only while the serving cell is loaded
/// at or above the threshold; otherwise it is zero. Never an intermediate
/// value.
pub fn effective_hom(serving_load: f64, configured_hom: f64, load_threshold: f64) -> f64 {
    if serving_load >= load_threshold {
        configured_hom
    } else {
        0.0
    }
}

/// Neighbor-cell measurement used for target selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub cell_id: usize,
    pub rsrp: f64,
    pub load: f64,
}

/// Picks the handover target: the strongest cell among the restricted
/// list of underloaded neighbors (`load < load_threshold`); if every
/// neighbor is overloaded the strongest neighbor overall is used. Ties
/// break toward the lowest cell id.
pub fn select_target(neighbors: &[Neighbor], load_threshold: f64) -> Result<usize, SimError> {
    if neighbors.is_empty() {
        return Err(SimError::NoNeighbors);
    }
    let best = |iter: &mut dyn Iterator<Item = &Neighbor>| -> Option<usize> {
        let mut choice: Option<&Neighbor> = None;
        for n in iter {
            match choice {
                Some(c) if n.rsrp <= c.rsrp => {}
                _ => choice = Some(n),
            }
        }
        choice.map(|n| n.cell_id)
    };
    let restricted = best(&mut neighbors.iter().filter(|n| n.load < load_threshold));
    Ok(match restricted {
        Some(id) => id,
        None => best(&mut neighbors.iter()).expect("non-empty"),
    })
}

/// In-progress A3 event: the target under evaluation and how long the
/// condition has held.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TttCandidate {
    pub target: usize,
    /// Time the condition has held so far, ms. Stays within `[0, ttt]`.
    pub elapsed: f64,
}

/// One tick of the TTT machine.
///
/// An existing candidate accumulates elapsed time while its condition
/// holds and is dropped the moment it fails. With no candidate, a fresh
/// target whose condition holds arms a new candidate at elapsed 0. The
/// handover executes once elapsed reaches the configured TTT, so
/// `ttt = 0` executes on the entry tick.
///
/// Returns the updated candidate and, when the timer expired, the target
/// to execute toward (the candidate is consumed).
pub fn advance_ttt(
    candidate: Option<TttCandidate>,
    candidate_a3_holds: bool,
    fresh_target: Option<usize>,
    fresh_target_a3_holds: bool,
    tick_ms: f64,
    ttt_ms: f64,
) -> (Option<TttCandidate>, Option<usize>) {
    let mut cand = match candidate {
        Some(mut c) if candidate_a3_holds => {
            c.elapsed += tick_ms;
            Some(c)
        }
        _ => None,
    };
    if cand.is_none() && fresh_target_a3_holds {
        if let Some(target) = fresh_target {
            cand = Some(TttCandidate {
                target,
                elapsed: 0.0,
            });
        }
    }
    match cand {
        Some(c) if c.elapsed >= ttt_ms => (None, Some(c.target)),
        other => (other, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a3_examples() {
        assert!(a3_condition(-90.0, -85.0, 3.0));
        // strict inequality at the equality point
        assert!(!a3_condition(-85.0, -88.0, 3.0));
        assert!(!a3_condition(-80.0, -90.0, 5.0));
    }

    #[test]
    fn a3_monotone_in_margin() {
        let (s, t) = (-77.0, -83.5);
        let mut previous = false;
        for step in 0..80 {
            let hom = step as f64 * 0.5;
            let now = a3_condition(s, t, hom);
            assert!(now >= previous, "condition regressed at hom={hom}");
            previous = now;
        }
    }

    #[test]
    fn effective_hom_bimodal() {
        assert_eq!(effective_hom(0.50, 6.0, 0.65), 0.0);
        assert_eq!(effective_hom(0.70, 6.0, 0.65), 6.0);
        // boundary is inclusive: activation at exactly the threshold
        assert_eq!(effective_hom(0.65, 6.0, 0.65), 6.0);
    }

    fn n(cell_id: usize, rsrp: f64, load: f64) -> Neighbor {
        Neighbor {
            cell_id,
            rsrp,
            load,
        }
    }

    #[test]
    fn target_from_restricted_list() {
        let neighbors = [n(0, -80.0, 0.9), n(1, -85.0, 0.3), n(2, -83.0, 0.4)];
        assert_eq!(select_target(&neighbors, 0.65).unwrap(), 2);
    }

    #[test]
    fn target_falls_back_to_global_best() {
        let neighbors = [n(0, -80.0, 0.9), n(1, -85.0, 0.9)];
        assert_eq!(select_target(&neighbors, 0.65).unwrap(), 0);
    }

    #[test]
    fn target_tie_breaks_to_lowest_id() {
        let neighbors = [n(0, -80.0, 0.3), n(1, -80.0, 0.3)];
        assert_eq!(select_target(&neighbors, 0.65).unwrap(), 0);
    }

    #[test]
    fn target_of_empty_list_is_an_error() {
        assert!(matches!(
            select_target(&[], 0.65),
            Err(SimError::NoNeighbors)
        ));
    }

    #[test]
    fn selected_target_is_member_and_underloaded_when_possible() {
        let neighbors = [n(3, -90.0, 0.2), n(5, -70.0, 0.99), n(9, -95.0, 0.1)];
        let id = select_target(&neighbors, 0.65).unwrap();
        let chosen = neighbors.iter().find(|x| x.cell_id == id).unwrap();
        assert!(chosen.load < 0.65);
    }

    #[test]
    fn ttt_zero_executes_on_entry() {
        let (cand, exec) = advance_ttt(None, false, Some(4), true, 40.0, 0.0);
        assert_eq!(exec, Some(4));
        assert!(cand.is_none());
    }

    #[test]
    fn ttt_two_ticks_requires_sustained_condition() {
        // ttt = 80 ms with a 40 ms tick: arm, accumulate, then execute.
        let (cand, exec) = advance_ttt(None, false, Some(2), true, 40.0, 80.0);
        assert_eq!(exec, None);
        let cand = cand.unwrap();
        assert_eq!((cand.target, cand.elapsed), (2, 0.0));

        let (cand, exec) = advance_ttt(Some(cand), true, Some(2), true, 40.0, 80.0);
        assert_eq!(exec, None);
        let cand = cand.unwrap();
        assert_eq!(cand.elapsed, 40.0);

        let (cand, exec) = advance_ttt(Some(cand), true, Some(2), true, 40.0, 80.0);
        assert_eq!(exec, Some(2));
        assert!(cand.is_none());
    }

    #[test]
    fn ttt_resets_when_condition_fails() {
        let armed = TttCandidate {
            target: 2,
            elapsed: 40.0,
        };
        // condition held one tick then failed: candidate dropped, no HO
        let (cand, exec) = advance_ttt(Some(armed), false, None, false, 40.0, 80.0);
        assert_eq!(exec, None);
        assert!(cand.is_none());
    }

    #[test]
    fn ttt_candidate_elapsed_bounded() {
        // elapsed never exceeds the configured ttt: execution consumes it
        let mut cand = Some(TttCandidate {
            target: 1,
            elapsed: 0.0,
        });
        for _ in 0..10 {
            let (next, exec) = advance_ttt(cand, true, Some(1), true, 40.0, 128.0);
            if let Some(c) = next {
                assert!(c.elapsed <= 128.0);
            }
            if exec.is_some() {
                break;
            }
            cand = next;
        }
    }
}
