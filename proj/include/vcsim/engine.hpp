#pragma once

#include "vcsim/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace vcsim {

/// A scheduled occurrence. `kind` is the process-activation tag
/// ("activate-deliver", "order-arrival", "production-complete", ...) and
/// `payload` is an opaque integer the handler interprets (usually an order id).
struct Event {
  Hours fire_time = 0.0;
  std::uint64_t sequence_no = 0;
  ActorId target;
  std::string kind;
  std::int64_t payload = 0;

  /// FNV-1a digest of the payload's decimal rendering, as exported in traces.
  std::string payload_digest() const;
};

/// Ordering key is (fire_time, sequence_no); sequence numbers are handed out
/// in insertion order, so simultaneous events are FIFO.
class EventQueue {
public:
  /// Enqueues at `at`, assigning the next sequence number. Throws
  /// InvariantViolation("past_event") when `at < now`.
  const Event &schedule(Hours now, Hours at, ActorId target, std::string kind,
                        std::int64_t payload = 0);

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  const Event &top() const { return heap_.top(); }
  Event pop();

private:
  struct Later {
    bool operator()(const Event &a, const Event &b) const noexcept {
      if (a.fire_time != b.fire_time)
        return a.fire_time > b.fire_time;
      return a.sequence_no > b.sequence_no;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

/// Uniform and exponential draws on top of a 64-bit Mersenne twister. The
/// conversions are written out here (instead of std distributions) so draw
/// sequences are identical across standard library implementations.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double mean);

private:
  std::mt19937_64 gen_;
};

/// Named substreams derived from one run seed. A substream's sequence depends
/// only on (seed, name), never on how draws interleave across substreams.
class RandomStreams {
public:
  explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}

  RandomStream &stream(const std::string &name);
  std::uint64_t seed() const noexcept { return seed_; }

  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view name);

private:
  std::uint64_t seed_;
  std::map<std::string, RandomStream> streams_;
};

using EventTrace = std::vector<Event>;

/// Future-event-list scheduler: owns the clock and queue and dispatches fired
/// events to a single handler.
class Engine {
public:
  using Handler = std::function<void(const Event &)>;

  /// `horizon` bounds periodic activations; events past it are never fired by
  /// run_until(horizon).
  explicit Engine(Hours horizon);

  Hours now() const noexcept { return now_; }
  Hours horizon() const noexcept { return horizon_; }

  const Event &schedule(Hours at, ActorId target, std::string kind, std::int64_t payload = 0);
  /// Schedules at now + delay.
  const Event &schedule_in(Hours delay, ActorId target, std::string kind,
                           std::int64_t payload = 0);

  /// Pre-schedules activations at interval, 2*interval, ... up to the horizon.
  /// The first activation is one full interval after t = 0.
  void register_periodic(const ActorId &actor, const std::string &process, Hours interval);

  /// Removes and returns the next event and moves the clock to it. An empty
  /// optional means the simulation is exhausted.
  std::optional<Event> advance();

  /// Fires every event with fire_time <= t_end in (fire_time, sequence_no)
  /// order and returns them. Exhaustion before t_end is normal.
  EventTrace run_until(Hours t_end, const Handler &handler);

  std::size_t pending() const noexcept { return queue_.size(); }

private:
  Hours now_ = 0.0;
  Hours horizon_;
  EventQueue queue_;
};

/// Number of activations a periodic process of `interval` makes over [0, horizon].
std::int64_t periodic_activation_count(Hours interval, Hours horizon);

} // namespace vcsim
