#pragma once

#include <vector>

namespace vcsim {

/// Adaptive-learning vote of one customer for one product on the 0-10 scale.
/// The observable output equals the state.
struct VoteState {
  double x = 0.0;
  long k = 0;

  double output() const noexcept { return x; }
};

inline constexpr double kVoteMin = 0.0;
inline constexpr double kVoteMax = 10.0;

/// Weights of the vote input. The signs of `delta` (delay) and `phi` (quality)
/// are configuration, not fixed by the model.
struct SatisfactionParams {
  double alpha = 0.3; // forgetting factor, 0 < alpha < 1
  double xi = 0.5;    // support quality
  double beta = 0.0;  // price variation; >= 0, zero disables
  double delta = -0.05;
  double phi = 0.02;
  double eta = 0.1; // coupling to the other customers' vote
};

/// Throws ConfigError("forgetting_factor_out_of_range") or
/// ConfigError("price_weight_negative").
void validate(const SatisfactionParams &params);

struct InputSignals {
  bool innovation = false;      // I_n
  bool support_ok = false;      // s
  double price_variation = 0.0; // percent of the previous price
  double delay = 0.0;           // percent relative to the mean delivery time
  double quality = 0.0;         // percent relative to the mean quality level
  double other_vote = 0.0;      // other customers' vote for the same product
};

/// f * I_n + xi*s + beta*dp + delta*d + phi*q + eta*x_other, unclamped.
double generic_input(double f_value, const InputSignals &signals, const SatisfactionParams &params);

/// The firm's innovation response: (9 - 1.2 (1 - alpha) x) / alpha.
/// Throws ConfigError when alpha is outside (0, 1).
double firm_f(double x, double alpha);

/// Firm-specific input: generic_input with f = firm_f(x, alpha).
double firm_input(double x, const InputSignals &signals, const SatisfactionParams &params);

/// One step of the firm-specific model. Algebraically equal to
/// update_vote(state, firm_input(x, ...)), but the innovation term is expanded
/// as (9 - 1.2 (1 - alpha) x) so alpha cancels instead of being divided and
/// re-multiplied; from x = 0 an innovation step lands on exactly 9.
VoteState firm_update(const VoteState &state, const InputSignals &signals,
                      const SatisfactionParams &params);

/// One learning step, x' = clamp((1 - alpha) x + alpha u, 0, 10); k' = k + 1.
VoteState update_vote(const VoteState &state, double u, const SatisfactionParams &params);

/// The same step without the clamp; used to check geometric convergence.
double unclamped_step(double x, double u, double alpha) noexcept;

/// x_0 .. x_n under zero input: x_i = (1 - alpha)^i x_0.
std::vector<double> decay_trajectory(double x0, double alpha, int n);

/// Closed form of one update with I_n = 1 and every other signal zero:
/// 9 - 0.2 (1 - alpha) x.
double innovation_step_bound(double x, double alpha);

} // namespace vcsim
