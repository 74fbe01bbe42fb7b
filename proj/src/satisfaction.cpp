#include "vcsim/satisfaction.hpp"

#include "vcsim/error.hpp"
#include "vcsim/types.hpp"

#include <algorithm>

namespace vcsim {

namespace {
void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("forgetting_factor_out_of_range",
                      "forgetting factor out of range: alpha=" + format_number(alpha) +
                          " must lie in (0, 1)");
}
} // namespace

void validate(const SatisfactionParams &params) {
  check_alpha(params.alpha);
  if (params.beta < 0.0)
    throw ConfigError("price_weight_negative", "price-variation weight beta must not be negative");
}

double generic_input(double f_value, const InputSignals &s, const SatisfactionParams &p) {
  return f_value * (s.innovation ? 1.0 : 0.0) + p.xi * (s.support_ok ? 1.0 : 0.0) +
         p.beta * s.price_variation + p.delta * s.delay + p.phi * s.quality +
         p.eta * s.other_vote;
}

double firm_f(double x, double alpha) {
  check_alpha(alpha);
  return (9.0 - 1.2 * (1.0 - alpha) * x) / alpha;
}

double firm_input(double x, const InputSignals &signals, const SatisfactionParams &params) {
  return generic_input(firm_f(x, params.alpha), signals, params);
}

double unclamped_step(double x, double u, double alpha) noexcept {
  return (1.0 - alpha) * x + alpha * u;
}

VoteState update_vote(const VoteState &state, double u, const SatisfactionParams &params) {
  return VoteState{std::clamp(unclamped_step(state.x, u, params.alpha), kVoteMin, kVoteMax),
                   state.k + 1};
}

VoteState firm_update(const VoteState &state, const InputSignals &signals,
                      const SatisfactionParams &params) {
  check_alpha(params.alpha);
  const double a = params.alpha;
  double next = (1.0 - a) * state.x + a * generic_input(0.0, signals, params);
  if (signals.innovation)
    next += 9.0 - 1.2 * (1.0 - a) * state.x;
  return VoteState{std::clamp(next, kVoteMin, kVoteMax), state.k + 1};
}

std::vector<double> decay_trajectory(double x0, double alpha, int n) {
  check_alpha(alpha);
  std::vector<double> xs{x0};
  xs.reserve(static_cast<std::size_t>(std::max(n, 0)) + 1);
  for (int i = 0; i < n; ++i)
    xs.push_back((1.0 - alpha) * xs.back());
  return xs;
}

double innovation_step_bound(double x, double alpha) {
  check_alpha(alpha);
  return 9.0 - 0.2 * (1.0 - alpha) * x;
}

} // namespace vcsim
