#include "vcsim/engine.hpp"

#include "vcsim/error.hpp"

#include <cmath>

namespace vcsim {

std::string Event::payload_digest() const { return hex64(fnv1a64(std::to_string(payload))); }

const Event &EventQueue::schedule(Hours now, Hours at, ActorId target, std::string kind,
                                  std::int64_t payload) {
  if (!(at >= now) || !std::isfinite(at)) {
    throw InvariantViolation("past_event", "past event: '" + kind + "' for " + target.str() +
                                               " at t=" + format_number(at) +
                                               " while now=" + format_number(now));
  }
  heap_.push(Event{at, next_sequence_++, std::move(target), std::move(kind), payload});
  return heap_.top();
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

double RandomStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double mean) { return -mean * std::log(uniform_open_closed()); }

std::uint64_t RandomStreams::derive_seed(std::uint64_t seed, std::string_view name) {
  // splitmix64 finaliser over seed ^ hash(name)
  std::uint64_t z = seed ^ fnv1a64(name);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream &RandomStreams::stream(const std::string &name) {
  auto it = streams_.find(name);
  if (it == streams_.end())
    it = streams_.emplace(name, RandomStream(derive_seed(seed_, name))).first;
  return it->second;
}

Engine::Engine(Hours horizon) : horizon_(horizon) {
  if (!(horizon >= 0.0))
    throw ConfigError("negative_horizon", "run horizon must be non-negative");
}

const Event &Engine::schedule(Hours at, ActorId target, std::string kind, std::int64_t payload) {
  return queue_.schedule(now_, at, std::move(target), std::move(kind), payload);
}

const Event &Engine::schedule_in(Hours delay, ActorId target, std::string kind,
                                 std::int64_t payload) {
  return schedule(now_ + delay, std::move(target), std::move(kind), payload);
}

std::int64_t periodic_activation_count(Hours interval, Hours horizon) {
  if (!(interval > 0.0))
    throw ConfigError("non_positive_interval", "periodic interval must be positive");
  std::int64_t n = 0;
  while (static_cast<double>(n + 1) * interval <= horizon)
    ++n;
  return n;
}

void Engine::register_periodic(const ActorId &actor, const std::string &process, Hours interval) {
  const std::int64_t n = periodic_activation_count(interval, horizon_);
  for (std::int64_t k = 1; k <= n; ++k)
    schedule(static_cast<double>(k) * interval, actor, process, k);
}

std::optional<Event> Engine::advance() {
  if (queue_.empty())
    return std::nullopt;
  Event e = queue_.pop();
  now_ = e.fire_time;
  return e;
}

EventTrace Engine::run_until(Hours t_end, const Handler &handler) {
  EventTrace trace;
  while (!queue_.empty() && queue_.top().fire_time <= t_end) {
    Event e = *advance();
    handler(e);
    trace.push_back(std::move(e));
  }
  return trace;
}

} // namespace vcsim
