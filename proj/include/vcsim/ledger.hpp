#pragma once

#include "vcsim/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vcsim {

enum class OrderStatus : std::uint8_t {
  kOpen,
  kInProduction,
  kFgi,
  kInTransit,
  kDelivered,
  kReturnRequested,
  kResolved,
  kRejected,
};

inline constexpr OrderStatus kAllStatuses[] = {
    OrderStatus::kOpen,      OrderStatus::kInProduction,    OrderStatus::kFgi,
    OrderStatus::kInTransit, OrderStatus::kDelivered,       OrderStatus::kReturnRequested,
    OrderStatus::kResolved,  OrderStatus::kRejected,
};

std::string_view to_string(OrderStatus status);
OrderStatus parse_order_status(std::string_view text);

/// Legal edges of the order state machine:
/// Open -> {InProduction, FGI, InTransit, Rejected}, InProduction -> FGI,
/// FGI -> InTransit, InTransit -> Delivered, Delivered -> ReturnRequested,
/// ReturnRequested -> Resolved.
bool is_legal_transition(OrderStatus from, OrderStatus to) noexcept;

/// Why an order exists; lets metrics and invariants pick out replenishment,
/// support replacements and contract demand without guessing from parties.
enum class OrderOrigin : std::uint8_t {
  kDemand,        // end-customer request
  kReplenishment, // (s, S) reorder by a stocking actor
  kBackToBack,    // make-to-order pass-through of a customer request
  kReplacement,   // support replacement for a defective lot
  kContract,      // recurring demand from a Sell contract
};

std::string_view to_string(OrderOrigin origin);
OrderOrigin parse_order_origin(std::string_view text);

struct Order {
  OrderId id = 0;
  ActorId client;
  ActorId provider;
  Item item;
  Quantity quantity = 0.0;
  Hours created_at = 0.0;
  OrderStatus status = OrderStatus::kOpen;
  OrderOrigin origin = OrderOrigin::kDemand;
  /// Earliest time the provider may ship it (support handling delay).
  Hours hold_until = 0.0;
  /// Linked order: the defective original for replacements, the customer
  /// request for back-to-back orders. 0 when unlinked.
  OrderId parent = 0;

  Hours last_change_at = 0.0;
  std::optional<Hours> delivered_at;

  bool operator==(const Order &) const = default;
};

struct SupportTicket {
  std::int64_t id = 0;
  OrderId order_id = 0;
  ActorId customer;
  Quantity defective = 0.0;
  Hours opened_at = 0.0;
  OrderId replacement = 0;
  std::optional<Hours> resolved_at;

  bool operator==(const SupportTicket &) const = default;
};

/// Parties and items a ledger accepts. An open catalog accepts anything (used
/// when importing a ledger without its scenario).
struct Catalog {
  std::set<ActorId> actors;
  std::set<Item> items;
  bool open = false;

  bool knows(const ActorId &a) const { return open || actors.count(a) > 0; }
  bool knows(const Item &i) const { return open || items.count(i) > 0; }
};

namespace ledger_record {
struct OrderCreated {
  Order order;
};
struct StatusChange {
  OrderId order_id;
  OrderStatus from;
  OrderStatus to;
  Hours at;
};
struct TicketOpened {
  SupportTicket ticket;
};
struct TicketLinked {
  std::int64_t ticket_id;
  OrderId replacement;
};
struct TicketResolved {
  std::int64_t ticket_id;
  Hours at;
};
} // namespace ledger_record

using LedgerRecord =
    std::variant<ledger_record::OrderCreated, ledger_record::StatusChange,
                 ledger_record::TicketOpened, ledger_record::TicketLinked,
                 ledger_record::TicketResolved>;

/// Append-only order book: every client->provider order, every status change,
/// and the support tickets raised against deliveries. The record log replays
/// to the current state.
class Ledger {
public:
  Ledger() : catalog_{{}, {}, true} {}
  explicit Ledger(Catalog catalog) : catalog_(std::move(catalog)) {}

  /// Validates and stores a new Open order. `order.id == 0` asks for the next
  /// id; an explicit id that already exists is a corruption error.
  OrderId append_order(Order order);

  void transition(OrderId id, OrderStatus to, Hours at);

  /// Open orders addressed to `provider`, oldest first (created_at, then id).
  std::vector<const Order *> open_orders(const ActorId &provider,
                                         std::optional<Item> item = std::nullopt) const;

  /// Every order addressed to `provider`, in id order.
  std::vector<const Order *> orders_for(const ActorId &provider) const;

  const Order &order(OrderId id) const;
  bool contains(OrderId id) const { return orders_.count(id) > 0; }
  const std::map<OrderId, Order> &orders() const noexcept { return orders_; }
  std::size_t size() const noexcept { return orders_.size(); }

  std::int64_t open_ticket(OrderId order_id, const ActorId &customer, Quantity defective,
                           Hours at);
  void link_replacement(std::int64_t ticket_id, OrderId replacement);
  void resolve_ticket(std::int64_t ticket_id, Hours at);
  const SupportTicket &ticket(std::int64_t id) const;
  const std::map<std::int64_t, SupportTicket> &tickets() const noexcept { return tickets_; }

  const std::vector<LedgerRecord> &records() const noexcept { return log_; }
  const Catalog &catalog() const noexcept { return catalog_; }

  /// Folds a record log from an empty ledger.
  static Ledger replay(const std::vector<LedgerRecord> &records, Catalog catalog = {{}, {}, true});

  /// Same orders and tickets (the log itself is not compared).
  bool same_state(const Ledger &other) const {
    return orders_ == other.orders_ && tickets_ == other.tickets_;
  }

private:
  void apply(const LedgerRecord &r);

  Catalog catalog_;
  std::map<OrderId, Order> orders_;
  std::map<ActorId, std::vector<OrderId>> by_provider_;
  std::map<std::int64_t, SupportTicket> tickets_;
  std::vector<LedgerRecord> log_;
  OrderId next_id_ = 1;
  std::int64_t next_ticket_ = 1;
};

struct StockPolicy {
  Quantity reorder_point = 0.0; // s: reorder when on hand is strictly below
  Quantity order_up_to = 0.0;   // S
};

struct StockSample {
  Hours at;
  Quantity level;
};

/// One stock position (actor, item). `on_hand` is free stock; `allocated` is
/// stock reserved against specific orders but still physically held. Samples
/// track the physical level so holding cost and mean stock see both.
class InventoryRecord {
public:
  InventoryRecord() = default;
  InventoryRecord(ActorId owner, Item item, Quantity initial,
                  std::optional<StockPolicy> policy = std::nullopt, double unit_holding_cost = 0.0,
                  double unit_value = 0.0);

  const ActorId &owner() const noexcept { return owner_; }
  const Item &item() const noexcept { return item_; }
  Quantity on_hand() const noexcept { return on_hand_; }
  Quantity allocated() const noexcept { return allocated_; }
  Quantity physical() const noexcept { return on_hand_ + allocated_; }
  const std::optional<StockPolicy> &policy() const noexcept { return policy_; }
  double unit_holding_cost() const noexcept { return unit_holding_cost_; }
  double unit_value() const noexcept { return unit_value_; }
  void set_unit_value(double v) { unit_value_ = v; }

  /// Changes free stock by `delta`. Going negative throws
  /// ValidationError("reservation"); the caller must backlog instead.
  void adjust(Quantity delta, Hours at);
  /// Moves `qty` from free to allocated stock.
  void reserve(Quantity qty, Hours at);
  /// Removes `qty` of allocated stock (it has shipped).
  void release(Quantity qty, Hours at);

  const std::vector<StockSample> &samples() const noexcept { return samples_; }
  /// Integral of the physical level over [0, t_end] (unit-hours).
  double integral(Hours t_end) const;
  /// integral / t_end; requires t_end > 0.
  double time_weighted_mean(Hours t_end) const;

private:
  void sample(Hours at);

  ActorId owner_;
  Item item_;
  Quantity on_hand_ = 0.0;
  Quantity allocated_ = 0.0;
  std::optional<StockPolicy> policy_;
  double unit_holding_cost_ = 0.0;
  double unit_value_ = 0.0;
  std::vector<StockSample> samples_;
};

/// (s, S) order-up-to decision: the quantity to order when on_hand < s.
std::optional<Quantity> reorder_quantity(Quantity on_hand, const StockPolicy &policy);

/// Time-weighted mean of a step function given by (time, level) samples over
/// [0, t_end]. The level before the first sample is taken as zero.
double step_integral(const std::vector<StockSample> &samples, Hours t_end);

} // namespace vcsim
