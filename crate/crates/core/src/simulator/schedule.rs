//! Stochastic daily routine.
//!
//! Each day starts and ends at the sleep spot. In between the resident
//! visits daytime spots and leaves the flat once. Arrival times are planned
//! independently of walking speed so that the same seed yields the same
//! itinerary whatever the gait.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::FloorPlan;
use super::Scenario;

pub const MIN_VISITS: usize = 20;
pub const MAX_VISITS: usize = 60;

/// Number of standing points per spot (the centre plus jittered ones).
pub const STANDING_VARIANTS: u8 = 5;

/// Planned idle gap before each arrival; walking happens inside it.
const TRAVEL_SLACK: (f64, f64) = (60.0, 120.0);

const WAKE_WINDOW: (f64, f64) = (0.25, 0.33);
const BEDTIME_LIMIT: f64 = 0.92;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Destination {
    Spot(usize),
    /// Leave through the door and come back after the dwell.
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Visit {
    pub destination: Destination,
    /// Which standing point of the spot; 0 is the spot centre.
    pub variant: u8,
    /// Planned arrival, seconds from the start of the day.
    pub arrival: f64,
    pub dwell: f64,
}

/// Independent random stream for one simulated day.
pub fn day_rng(seed: u64, day: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(day));
    rng
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// The day's itinerary, a pure function of `(scenario.seed, day)` and the plan.
pub fn generate_schedule(day: u32, scenario: &Scenario, plan: &FloorPlan) -> Vec<Visit> {
    let rng = &mut day_rng(scenario.seed, day);
    let day_length = scenario.day_length;
    let sleep = plan.sleep_spot();
    let daytime: Vec<usize> = (0..plan.spots.len())
        .filter(|&i| i != sleep && plan.spots[i].weight > 0.0)
        .collect();
    let weights = WeightedIndex::new(daytime.iter().map(|&i| plan.spots[i].weight))
        .expect("validated plan has a weighted daytime spot");

    let total_visits = rng.random_range(MIN_VISITS..=MAX_VISITS);
    let daytime_visits = total_visits - 2;
    let door_slot = rng.random_range(0..=daytime_visits);

    let mut plan_seq: Vec<(Destination, u8, f64)> = Vec::with_capacity(total_visits);
    let mut previous = Some(sleep);
    for slot in 0..=daytime_visits {
        if slot == door_slot {
            plan_seq.push((Destination::Outside, 0, uniform(rng, plan.door.away)));
            previous = None;
        }
        if slot == daytime_visits {
            break;
        }
        let mut spot = daytime[weights.sample(rng)];
        if daytime.len() > 1 {
            while Some(spot) == previous {
                spot = daytime[weights.sample(rng)];
            }
        }
        let variant = rng.random_range(0..STANDING_VARIANTS);
        plan_seq.push((Destination::Spot(spot), variant, uniform(rng, plan.spots[spot].dwell)));
        previous = Some(spot);
    }
    let slacks: Vec<f64> = (0..total_visits).map(|_| uniform(rng, TRAVEL_SLACK)).collect();
    let wake = uniform(rng, (WAKE_WINDOW.0 * day_length, WAKE_WINDOW.1 * day_length));

    // squeeze the routine if it overruns bedtime
    let available = BEDTIME_LIMIT * day_length - wake;
    let busy: f64 = plan_seq.iter().map(|v| v.2).sum::<f64>() + slacks.iter().sum::<f64>();
    let squeeze = if busy > available { available / busy } else { 1.0 };

    let mut visits = Vec::with_capacity(total_visits);
    let mut t = wake;
    for ((destination, variant, dwell), slack) in plan_seq.into_iter().zip(&slacks) {
        let arrival = t + slack * squeeze;
        let dwell = (dwell * squeeze).max(1.0);
        visits.push(Visit {
            destination,
            variant,
            arrival,
            dwell,
        });
        t = arrival + dwell;
    }
    let arrival = t + slacks[total_visits - 1] * squeeze;
    visits.push(Visit {
        destination: Destination::Spot(sleep),
        variant: 0,
        arrival,
        dwell: (day_length - arrival).max(1.0),
    });
    visits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Scenario, FloorPlan) {
        (Scenario::default(), FloorPlan::builtin("A").unwrap())
    }

    #[test]
    fn same_seed_and_day_repeat() {
        let (sc, plan) = setup();
        let a = generate_schedule(5, &sc, &plan);
        let b = generate_schedule(5, &sc, &plan);
        assert_eq!(a, b);
        let c = generate_schedule(6, &sc, &plan);
        assert_ne!(a, c);
    }

    #[test]
    fn visit_counts_and_timing_bounds() {
        let (sc, plan) = setup();
        for day in 1..=200 {
            let visits = generate_schedule(day, &sc, &plan);
            assert!((MIN_VISITS..=MAX_VISITS).contains(&visits.len()), "{}", visits.len());
            assert_eq!(visits.iter().filter(|v| v.destination == Destination::Outside).count(), 1);
            assert_eq!(visits.last().unwrap().destination, Destination::Spot(plan.sleep_spot()));
            let mut end = 0.0;
            for v in &visits {
                assert!(v.dwell >= 1.0);
                assert!(v.arrival > end);
                end = v.arrival + v.dwell;
            }
            assert!(end <= sc.day_length + 1e-6);
        }
    }

    #[test]
    fn short_days_are_squeezed_to_fit() {
        let (mut sc, plan) = setup();
        sc.day_length = 4.0 * 3600.0;
        for day in 1..=30 {
            let visits = generate_schedule(day, &sc, &plan);
            let last = visits.last().unwrap();
            assert!(last.arrival < sc.day_length);
            assert!(visits.iter().all(|v| v.dwell >= 1.0));
        }
    }
}
