//! Experience storage. Append-only within a run; iteration order is
//! insertion order, which keeps everything downstream deterministic.

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub next_state: Vec<f64>,
    pub reward: f64,
}

impl Transition {
    pub fn is_finite(&self) -> bool {
        self.state.iter().all(|v| v.is_finite())
            && self.action.iter().all(|v| v.is_finite())
            && self.next_state.iter().all(|v| v.is_finite())
            && self.reward.is_finite()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReplayBuffer {
    transitions: Vec<Transition>,
}

impl ReplayBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn push(&mut self, t: Transition) {
        debug_assert!(t.is_finite(), "non-finite transition appended");
        debug_assert!(
            self.transitions
                .first()
                .map_or(true, |f| f.state.len() == t.state.len()
                    && f.action.len() == t.action.len()),
            "transition dimensions changed mid-run"
        );
        self.transitions.push(t);
    }

    pub fn extend(&mut self, episode: impl IntoIterator<Item = Transition>) {
        for t in episode {
            self.push(t);
        }
    }

    pub fn get(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Transition> {
        self.transitions.iter()
    }

    pub fn state_dim(&self) -> Option<usize> {
        self.transitions.first().map(|t| t.state.len())
    }

    pub fn action_dim(&self) -> Option<usize> {
        self.transitions.first().map(|t| t.action.len())
    }
}
