//! Monte-Carlo channel simulation: the reference against which every closed form is checked.

mod scenario;
mod simulate;
pub mod stats;

pub use scenario::{Antennas, Metric, Scenario, SweepMeta, SweepResult, DEFAULT_SAMPLES, MIN_SAMPLES};
pub use simulate::{
    draw_effective_gain, draw_effective_gain_with, simulate_ec, simulate_ec_with, simulate_op, simulate_op_with,
    simulate_sum_rate, simulate_sum_rate_with,
};
