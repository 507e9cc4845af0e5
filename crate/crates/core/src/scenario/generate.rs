use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{apply_event, settle_phase_one, EngineError, Event};
use crate::graph::{GraphError, GraphState, NodeId};
use crate::kernel::KernelParams;

/// Redraws allowed for one phase before generation gives up.
const MAX_REDRAWS: usize = 1000;

/// Probabilities of each event kind per phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventMix {
    pub add_edge: f64,
    pub add_node: f64,
    pub prune: f64,
}

impl EventMix {
    pub const EDGES_ONLY: EventMix = EventMix {
        add_edge: 1.0,
        add_node: 0.0,
        prune: 0.0,
    };
}

/// Mostly new associations with occasional new nodes and no forgetting.
impl Default for EventMix {
    fn default() -> Self {
        EventMix {
            add_edge: 0.8,
            add_node: 0.2,
            prune: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelChoice {
    Fixed(KernelParams),
    /// Draw `mu` and `sigma` uniformly from these closed ranges, once per scenario.
    Draw {
        mu: (f64, f64),
        sigma: (f64, f64),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n_initial: usize,
    pub mass_range: (f64, f64),
    pub weight_range: (f64, f64),
    pub initial_edge_density: f64,
    /// Index of the last phase. Phase 1 is the settlement, so the scenario
    /// carries `n_phases - 1` events.
    pub n_phases: usize,
    pub event_mix: EventMix,
    pub prune_threshold: f64,
    pub kernel: KernelChoice,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 0,
            n_initial: 5,
            mass_range: (2.0, 100.0),
            weight_range: (2.0, 100.0),
            initial_edge_density: 0.3,
            n_phases: 22,
            event_mix: EventMix::default(),
            prune_threshold: 3.0,
            kernel: KernelChoice::Fixed(KernelParams::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error("no event could be drawn for phase {phase} after {MAX_REDRAWS} attempts (no unconnected pair left)")]
    Exhausted { phase: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A generated phase-0 state plus its event script.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub initial: GraphState,
    pub events: Vec<Event>,
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<(), ScenarioError> {
    if lo > 1.0 && lo <= hi && hi.is_finite() {
        Ok(())
    } else {
        Err(ScenarioError::InvalidConfig(format!(
            "{name} ({lo}, {hi}) must satisfy 1 < lo <= hi < inf"
        )))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        check_range("mass_range", self.mass_range)?;
        check_range("weight_range", self.weight_range)?;
        if !(0.0..=1.0).contains(&self.initial_edge_density) {
            return Err(ScenarioError::InvalidConfig(format!(
                "initial_edge_density {} outside [0, 1]",
                self.initial_edge_density
            )));
        }
        if self.n_phases < 1 {
            return Err(ScenarioError::InvalidConfig(
                "n_phases must be at least 1 (phase 1 is the settlement)".into(),
            ));
        }
        let m = self.event_mix;
        let probs = [m.add_edge, m.add_node, m.prune];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || ((m.add_edge + m.add_node + m.prune) - 1.0).abs() > 1e-12 {
            return Err(ScenarioError::InvalidConfig(format!(
                "event mix ({}, {}, {}) must be probabilities summing to 1",
                m.add_edge, m.add_node, m.prune
            )));
        }
        if self.prune_threshold.is_nan() {
            return Err(ScenarioError::InvalidConfig("prune_threshold is NaN".into()));
        }
        if let KernelChoice::Draw { mu, sigma } = self.kernel {
            if !(mu.0 <= mu.1) || !mu.0.is_finite() || !mu.1.is_finite() {
                return Err(ScenarioError::InvalidConfig(format!(
                    "mu range ({}, {}) is not ordered",
                    mu.0, mu.1
                )));
            }
            if !(sigma.0 > 0.0 && sigma.0 <= sigma.1) || !sigma.1.is_finite() {
                return Err(ScenarioError::InvalidConfig(format!(
                    "sigma range ({}, {}) must satisfy 0 < lo <= hi",
                    sigma.0, sigma.1
                )));
            }
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Picks a uniformly random unconnected pair of alive nodes, or `None`.
fn draw_free_pair(rng: &mut ChaCha8Rng, state: &GraphState) -> Option<(NodeId, NodeId)> {
    let alive: Vec<NodeId> = state.alive_nodes().map(|n| n.id).collect();
    let len = alive.len();
    let all_pairs = len * len.saturating_sub(1) / 2;
    // Every present edge joins two alive nodes.
    let free = all_pairs - state.edge_count();
    if free == 0 {
        return None;
    }
    let mut r = rng.gen_range(0..free);
    for (a, &i) in alive.iter().enumerate() {
        let later = len - a - 1;
        let higher = state.neighbors(i).ok()?.filter(|&p| p > i).count();
        let row_free = later - higher;
        if r >= row_free {
            r -= row_free;
            continue;
        }
        for &j in &alive[a + 1..] {
            if state.has_edge(i, j) {
                continue;
            }
            if r == 0 {
                return Some((i, j));
            }
            r -= 1;
        }
    }
    None
}

/// Draws a phase-0 state and an event script from `config`.
///
/// Draw order is fixed (kernel, masses, initial edges row by row, then one
/// event per phase), so the output depends on the config alone. The
/// generator replays its own events to know which pairs are free.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let params = match config.kernel {
        KernelChoice::Fixed(p) => p,
        KernelChoice::Draw { mu, sigma } => {
            let mu = draw(&mut rng, mu);
            let sigma = draw(&mut rng, sigma);
            KernelParams::new(mu, sigma).map_err(|e| ScenarioError::InvalidConfig(format!("{e}")))?
        }
    };

    let masses: Vec<f64> = (0..config.n_initial)
        .map(|_| draw(&mut rng, config.mass_range))
        .collect();
    let mut weights = Vec::new();
    for i in 1..=config.n_initial as u32 {
        for j in i + 1..=config.n_initial as u32 {
            if rng.gen::<f64>() < config.initial_edge_density {
                weights.push((i, j, draw(&mut rng, config.weight_range)));
            }
        }
    }
    let initial = GraphState::new(&masses, &weights, params)?;

    let mix = config.event_mix;
    let mut state = settle_phase_one(&initial)?;
    let mut events = Vec::with_capacity(config.n_phases.saturating_sub(1));
    for _ in 1..config.n_phases {
        let mut event = None;
        for _ in 0..MAX_REDRAWS {
            let u: f64 = rng.gen();
            if u < mix.add_edge {
                if let Some((k, l)) = draw_free_pair(&mut rng, &state) {
                    let initial_weight = draw(&mut rng, config.weight_range);
                    event = Some(Event::AddEdge { k, l, initial_weight });
                    break;
                }
            } else if u < mix.add_edge + mix.add_node {
                let initial_mass = draw(&mut rng, config.mass_range);
                event = Some(Event::AddNode {
                    initial_mass,
                    label: None,
                });
                break;
            } else {
                event = Some(Event::Prune {
                    threshold: config.prune_threshold,
                });
                break;
            }
        }
        let event = event.ok_or(ScenarioError::Exhausted {
            phase: state.phase() + 1,
        })?;
        state = apply_event(&state, &event)?.0;
        events.push(event);
    }
    Ok(Scenario { initial, events })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_scenario() {
        let config = ScenarioConfig {
            seed: 42,
            ..ScenarioConfig::default()
        };
        let a = generate_scenario(&config).unwrap();
        let b = generate_scenario(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.events.len(), 21);
        assert!(a.events.iter().any(|e| matches!(e, Event::AddEdge { .. })));
        let other = generate_scenario(&ScenarioConfig { seed: 43, ..config }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn edges_only_on_small_graph_saturates() {
        // five nodes hold at most ten edges
        let config = ScenarioConfig {
            seed: 42,
            event_mix: EventMix::EDGES_ONLY,
            ..ScenarioConfig::default()
        };
        assert!(matches!(
            generate_scenario(&config),
            Err(ScenarioError::Exhausted { .. })
        ));
        let wide = ScenarioConfig {
            n_initial: 8,
            initial_edge_density: 0.0,
            ..config
        };
        assert_eq!(generate_scenario(&wide).unwrap().events.len(), 21);
    }

    #[test]
    fn draws_stay_in_range() {
        let config = ScenarioConfig {
            seed: 7,
            n_initial: 8,
            n_phases: 40,
            event_mix: EventMix {
                add_edge: 0.6,
                add_node: 0.3,
                prune: 0.1,
            },
            ..ScenarioConfig::default()
        };
        let s = generate_scenario(&config).unwrap();
        for node in s.initial.nodes() {
            assert!((2.0..=100.0).contains(&node.mass));
        }
        for edge in s.initial.edges() {
            assert!((2.0..=100.0).contains(&edge.weight));
        }
        for event in &s.events {
            match event {
                Event::AddEdge { initial_weight, .. } => assert!((2.0..=100.0).contains(initial_weight)),
                Event::AddNode { initial_mass, .. } => assert!((2.0..=100.0).contains(initial_mass)),
                Event::Prune { threshold } => assert_eq!(*threshold, 3.0),
            }
        }
    }

    #[test]
    fn saturated_pair_fails() {
        let config = ScenarioConfig {
            seed: 1,
            n_initial: 2,
            initial_edge_density: 1.0,
            n_phases: 3,
            event_mix: EventMix::EDGES_ONLY,
            ..ScenarioConfig::default()
        };
        assert_eq!(generate_scenario(&config), Err(ScenarioError::Exhausted { phase: 2 }));
    }

    #[test]
    fn drawn_kernel_within_bounds() {
        let config = ScenarioConfig {
            seed: 9,
            kernel: KernelChoice::Draw {
                mu: (-1.0, 1.0),
                sigma: (0.5, 2.0),
            },
            ..ScenarioConfig::default()
        };
        let s = generate_scenario(&config).unwrap();
        let p = s.initial.params();
        assert!((-1.0..=1.0).contains(&p.mu()));
        assert!((0.5..=2.0).contains(&p.sigma()));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = ScenarioConfig::default();
        let bad = [
            ScenarioConfig {
                mass_range: (1.0, 5.0),
                ..base.clone()
            },
            ScenarioConfig {
                weight_range: (5.0, 2.0),
                ..base.clone()
            },
            ScenarioConfig {
                initial_edge_density: 1.5,
                ..base.clone()
            },
            ScenarioConfig {
                n_phases: 0,
                ..base.clone()
            },
            ScenarioConfig {
                event_mix: EventMix {
                    add_edge: 0.5,
                    add_node: 0.2,
                    prune: 0.2,
                },
                ..base.clone()
            },
            ScenarioConfig {
                kernel: KernelChoice::Draw {
                    mu: (0.0, 1.0),
                    sigma: (0.0, 1.0),
                },
                ..base.clone()
            },
        ];
        for config in bad {
            assert!(
                matches!(generate_scenario(&config), Err(ScenarioError::InvalidConfig(_))),
                "{config:?}"
            );
        }
    }

    #[test]
    fn free_pair_draw_is_exhaustive() {
        // Every unconnected pair must be reachable.
        let g = GraphState::new(
            &[2.0; 5],
            &[(1, 2, 3.0), (2, 4, 3.0), (3, 5, 3.0)],
            KernelParams::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = alloc::collections::BTreeSet::new();
        for _ in 0..500 {
            let (i, j) = draw_free_pair(&mut rng, &g).unwrap();
            assert!(i < j && !g.has_edge(i, j));
            seen.insert((i, j));
        }
        assert_eq!(seen.len(), 10 - 3);
    }
}
