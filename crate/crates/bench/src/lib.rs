//! Fixtures shared by the criterion benches.

use medsim_core::scenario::generate_scenario;
use medsim_core::{derive_stream, Condition, Purpose, Scenario, ScenarioParams};

pub fn fixture_scenario(load: u32, trial: u32) -> Scenario {
    let cond = Condition::new(0, 0.5, load).expect("valid condition");
    generate_scenario(cond, &ScenarioParams::default(), &mut derive_stream(1, 0, trial, 0, Purpose::Scenario))
}
