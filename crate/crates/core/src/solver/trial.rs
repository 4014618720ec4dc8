use crate::scalar::Scalar;

use super::TrialPolicy;

/// Trial step for iteration `k ≥ 1` under the self-adaptive rule.
///
/// `history` holds the last two `(trial, accepted)` pairs, oldest first:
/// `[(λ̄_{k−2}, λ_{k−2}), (λ̄_{k−1}, λ_{k−1})]`. It is ignored for `k = 1`.
pub fn next_trial_step<T: Scalar>(history: [(T, T); 2], gamma: T, lambda_bar_1: T, k: usize) -> T {
    if k <= 1 {
        return lambda_bar_1;
    }
    let [(trial_2, accepted_2), (trial_1, accepted_1)] = history;
    if accepted_2 == trial_2 && accepted_1 == trial_1 {
        gamma * accepted_1
    } else {
        accepted_1
    }
}

/// Per-stage step history. Starts from `λ̄₀ = λ₀ = 0`.
#[derive(Clone, Debug)]
pub struct TrialHistory<T> {
    k: usize,
    pairs: [(T, T); 2],
}

impl<T: Scalar> Default for TrialHistory<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> TrialHistory<T> {
    pub fn new() -> Self {
        Self {
            k: 1,
            pairs: [(T::zero(), T::zero()); 2],
        }
    }

    pub fn next_trial(&self, policy: &TrialPolicy<T>) -> T {
        match *policy {
            TrialPolicy::Constant { lambda_bar } => lambda_bar,
            TrialPolicy::SelfAdaptive {
                gamma,
                lambda_bar_1,
            } => next_trial_step(self.pairs, gamma, lambda_bar_1, self.k),
        }
    }

    pub fn record(&mut self, trial: T, accepted: T) {
        self.pairs = [self.pairs[1], (trial, accepted)];
        self.k += 1;
    }
}
