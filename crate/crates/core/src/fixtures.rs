//! The bundled Simplified Coffee domain, problem and reference trajectories.

/// Coffee domain with `deliver-coffee`'s effect balanced.
pub const COFFEE_DOMAIN: &str = include_str!("../fixtures/coffee-domain.ppddl");
/// Coffee domain whose `deliver-coffee` effect applies `not` to two formulas; must be rejected.
pub const COFFEE_DOMAIN_MALFORMED: &str = include_str!("../fixtures/coffee-domain-malformed.ppddl");
pub const COFFEE_PROBLEM: &str = include_str!("../fixtures/coffee-problem.ppddl");

/// T1..T4 as tabulated, weight 1 each.
pub const TRACES: &str = include_str!("../fixtures/coffee-traces.traj");
pub const TRACES_X100: &str = include_str!("../fixtures/coffee-traces-x100.traj");
/// Weights 895, 95, 10, 1000.
pub const TRACES_SKEWED: &str = include_str!("../fixtures/coffee-traces-skewed.traj");
/// Weights 895, 95, 19, 1000.
pub const TRACES_SKEWED_19: &str = include_str!("../fixtures/coffee-traces-skewed-19.traj");

/// T3 as tabulated moves back to the office "with umbrella" while holding
/// none, which the domain forbids. These variants use the umbrella-less move.
pub const TRACES_T3_MTOWOU: &str = include_str!("../fixtures/coffee-traces-t3-mtowou.traj");
pub const TRACES_T3_MTOWOU_SKEWED: &str = include_str!("../fixtures/coffee-traces-t3-mtowou-skewed.traj");

/// Action abbreviations used in the worked example.
pub const ABBREVIATIONS: [(&str, &str); 7] = [
    ("BC", "buy-coffee"),
    ("MTOWU", "move-to-office-with-umbrella"),
    ("LOWU", "leave-office-with-umbrella"),
    ("MTOWOU", "move-to-office-without-umbrella"),
    ("LOWOU", "leave-office-without-umbrella"),
    ("GU", "get-umbrella"),
    ("DC", "deliver-coffee"),
];
