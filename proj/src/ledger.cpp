#include "vcsim/ledger.hpp"

#include "vcsim/error.hpp"

#include <algorithm>
#include <cmath>

namespace vcsim {

namespace {

constexpr std::pair<OrderStatus, std::string_view> kStatusNames[] = {
    {OrderStatus::kOpen, "Open"},
    {OrderStatus::kInProduction, "InProduction"},
    {OrderStatus::kFgi, "FGI"},
    {OrderStatus::kInTransit, "InTransit"},
    {OrderStatus::kDelivered, "Delivered"},
    {OrderStatus::kReturnRequested, "ReturnRequested"},
    {OrderStatus::kResolved, "Resolved"},
    {OrderStatus::kRejected, "Rejected"},
};

constexpr std::pair<OrderOrigin, std::string_view> kOriginNames[] = {
    {OrderOrigin::kDemand, "demand"},
    {OrderOrigin::kReplenishment, "replenishment"},
    {OrderOrigin::kBackToBack, "back-to-back"},
    {OrderOrigin::kReplacement, "replacement"},
    {OrderOrigin::kContract, "contract"},
};

} // namespace

std::string_view to_string(OrderStatus status) {
  for (auto [s, n] : kStatusNames)
    if (s == status)
      return n;
  return "?";
}

OrderStatus parse_order_status(std::string_view text) {
  for (auto [s, n] : kStatusNames)
    if (n == text)
      return s;
  throw ValidationError("unknown_status", "unknown order status '" + std::string(text) + "'");
}

std::string_view to_string(OrderOrigin origin) {
  for (auto [o, n] : kOriginNames)
    if (o == origin)
      return n;
  return "?";
}

OrderOrigin parse_order_origin(std::string_view text) {
  for (auto [o, n] : kOriginNames)
    if (n == text)
      return o;
  throw ValidationError("unknown_origin", "unknown order origin '" + std::string(text) + "'");
}

bool is_legal_transition(OrderStatus from, OrderStatus to) noexcept {
  using S = OrderStatus;
  switch (from) {
  case S::kOpen:
    return to == S::kInProduction || to == S::kFgi || to == S::kInTransit || to == S::kRejected;
  case S::kInProduction:
    return to == S::kFgi;
  case S::kFgi:
    return to == S::kInTransit;
  case S::kInTransit:
    return to == S::kDelivered;
  case S::kDelivered:
    return to == S::kReturnRequested;
  case S::kReturnRequested:
    return to == S::kResolved;
  case S::kResolved:
  case S::kRejected:
    return false;
  }
  return false;
}

OrderId Ledger::append_order(Order order) {
  if (!(order.quantity > 0.0) || !std::isfinite(order.quantity))
    throw ValidationError("non_positive_quantity",
                          "order quantity must be positive, got " + format_number(order.quantity));
  if (order.status != OrderStatus::kOpen)
    throw ValidationError("not_open", "new orders must be Open");
  if (!catalog_.knows(order.client))
    throw ConfigError("unknown_actor", "unknown client '" + order.client.str() + "'");
  if (!catalog_.knows(order.provider))
    throw ConfigError("unknown_actor", "unknown provider '" + order.provider.str() + "'");
  if (!catalog_.knows(order.item))
    throw ConfigError(order.item.is_product() ? "unknown_product" : "unknown_raw",
                      "unknown item " + to_string(order.item));
  if (order.id == 0)
    order.id = next_id_;
  else if (orders_.count(order.id))
    throw InvariantViolation("duplicate_order_id",
                             "ledger corruption: order id " + std::to_string(order.id) +
                                 " already present");
  order.last_change_at = order.created_at;
  order.delivered_at.reset();
  next_id_ = std::max(next_id_, order.id + 1);
  log_.push_back(ledger_record::OrderCreated{order});
  by_provider_[order.provider].push_back(order.id);
  const OrderId id = order.id;
  orders_.emplace(id, std::move(order));
  return id;
}

void Ledger::transition(OrderId id, OrderStatus to, Hours at) {
  auto it = orders_.find(id);
  if (it == orders_.end())
    throw ValidationError("unknown_order", "no order " + std::to_string(id));
  Order &o = it->second;
  if (!is_legal_transition(o.status, to))
    throw InvariantViolation("illegal_transition",
                             "order " + std::to_string(id) + ": illegal transition " +
                                 std::string(to_string(o.status)) + " -> " +
                                 std::string(to_string(to)));
  if (at < o.last_change_at)
    throw InvariantViolation("non_monotone_timestamp",
                             "order " + std::to_string(id) + ": transition at t=" +
                                 format_number(at) + " precedes last change at t=" +
                                 format_number(o.last_change_at));
  log_.push_back(ledger_record::StatusChange{id, o.status, to, at});
  o.status = to;
  o.last_change_at = at;
  if (to == OrderStatus::kDelivered)
    o.delivered_at = at;
}

std::vector<const Order *> Ledger::open_orders(const ActorId &provider,
                                               std::optional<Item> item) const {
  std::vector<const Order *> out;
  auto it = by_provider_.find(provider);
  if (it == by_provider_.end())
    return out;
  for (OrderId id : it->second) {
    const Order &o = orders_.at(id);
    if (o.status == OrderStatus::kOpen && (!item || o.item == *item))
      out.push_back(&o);
  }
  std::stable_sort(out.begin(), out.end(), [](const Order *a, const Order *b) {
    if (a->created_at != b->created_at)
      return a->created_at < b->created_at;
    return a->id < b->id;
  });
  return out;
}

std::vector<const Order *> Ledger::orders_for(const ActorId &provider) const {
  std::vector<const Order *> out;
  auto it = by_provider_.find(provider);
  if (it == by_provider_.end())
    return out;
  for (OrderId id : it->second)
    out.push_back(&orders_.at(id));
  std::sort(out.begin(), out.end(), [](const Order *a, const Order *b) { return a->id < b->id; });
  return out;
}

const Order &Ledger::order(OrderId id) const {
  auto it = orders_.find(id);
  if (it == orders_.end())
    throw ValidationError("unknown_order", "no order " + std::to_string(id));
  return it->second;
}

std::int64_t Ledger::open_ticket(OrderId order_id, const ActorId &customer, Quantity defective,
                                 Hours at) {
  auto it = orders_.find(order_id);
  if (it == orders_.end())
    throw ValidationError("unknown_order", "support ticket for unknown order " +
                                               std::to_string(order_id));
  if (!(defective > 0.0) || defective > it->second.quantity)
    throw ValidationError("defective_quantity",
                          "defective quantity " + format_number(defective) +
                              " outside (0, order quantity " +
                              format_number(it->second.quantity) + "]");
  SupportTicket t;
  t.id = next_ticket_++;
  t.order_id = order_id;
  t.customer = customer;
  t.defective = defective;
  t.opened_at = at;
  log_.push_back(ledger_record::TicketOpened{t});
  tickets_.emplace(t.id, t);
  return t.id;
}

void Ledger::link_replacement(std::int64_t ticket_id, OrderId replacement) {
  auto it = tickets_.find(ticket_id);
  if (it == tickets_.end())
    throw ValidationError("unknown_ticket", "no ticket " + std::to_string(ticket_id));
  log_.push_back(ledger_record::TicketLinked{ticket_id, replacement});
  it->second.replacement = replacement;
}

void Ledger::resolve_ticket(std::int64_t ticket_id, Hours at) {
  auto it = tickets_.find(ticket_id);
  if (it == tickets_.end())
    throw ValidationError("unknown_ticket", "no ticket " + std::to_string(ticket_id));
  if (at < it->second.opened_at)
    throw InvariantViolation("non_monotone_timestamp", "ticket resolved before it was opened");
  log_.push_back(ledger_record::TicketResolved{ticket_id, at});
  it->second.resolved_at = at;
}

const SupportTicket &Ledger::ticket(std::int64_t id) const {
  auto it = tickets_.find(id);
  if (it == tickets_.end())
    throw ValidationError("unknown_ticket", "no ticket " + std::to_string(id));
  return it->second;
}

void Ledger::apply(const LedgerRecord &r) {
  std::visit(
      [this](const auto &rec) {
        using T = std::decay_t<decltype(rec)>;
        if constexpr (std::is_same_v<T, ledger_record::OrderCreated>) {
          append_order(rec.order);
        } else if constexpr (std::is_same_v<T, ledger_record::StatusChange>) {
          if (order(rec.order_id).status != rec.from)
            throw InvariantViolation("replay_mismatch",
                                     "replayed transition source status does not match order " +
                                         std::to_string(rec.order_id));
          transition(rec.order_id, rec.to, rec.at);
        } else if constexpr (std::is_same_v<T, ledger_record::TicketOpened>) {
          if (tickets_.count(rec.ticket.id))
            throw InvariantViolation("duplicate_ticket_id", "ticket id replayed twice");
          next_ticket_ = rec.ticket.id;
          open_ticket(rec.ticket.order_id, rec.ticket.customer, rec.ticket.defective,
                      rec.ticket.opened_at);
        } else if constexpr (std::is_same_v<T, ledger_record::TicketLinked>) {
          link_replacement(rec.ticket_id, rec.replacement);
        } else {
          resolve_ticket(rec.ticket_id, rec.at);
        }
      },
      r);
}

Ledger Ledger::replay(const std::vector<LedgerRecord> &records, Catalog catalog) {
  Ledger l(std::move(catalog));
  for (const auto &r : records)
    l.apply(r);
  return l;
}

InventoryRecord::InventoryRecord(ActorId owner, Item item, Quantity initial,
                                 std::optional<StockPolicy> policy, double unit_holding_cost,
                                 double unit_value)
    : owner_(std::move(owner)), item_(item), on_hand_(initial), policy_(policy),
      unit_holding_cost_(unit_holding_cost), unit_value_(unit_value) {
  if (initial < 0.0)
    throw ConfigError("negative_stock", "initial stock of " + to_string(item_) + " at " +
                                            owner_.str() + " is negative");
  if (policy_ && !(policy_->reorder_point < policy_->order_up_to))
    throw ConfigError("reorder_point_not_below_order_up_to",
                      "stock policy for " + to_string(item_) + " at " + owner_.str() +
                          " needs s < S");
  samples_.push_back({0.0, physical()});
}

void InventoryRecord::sample(Hours at) {
  if (!samples_.empty() && samples_.back().at == at)
    samples_.back().level = physical();
  else
    samples_.push_back({at, physical()});
}

void InventoryRecord::adjust(Quantity delta, Hours at) {
  if (on_hand_ + delta < 0.0)
    throw ValidationError("reservation", "stock of " + to_string(item_) + " at " + owner_.str() +
                                             " would go negative (" + format_number(on_hand_) +
                                             " + " + format_number(delta) + ")");
  on_hand_ += delta;
  sample(at);
}

void InventoryRecord::reserve(Quantity qty, Hours at) {
  if (qty < 0.0 || qty > on_hand_)
    throw ValidationError("reservation", "cannot reserve " + format_number(qty) + " of " +
                                             to_string(item_) + " at " + owner_.str());
  on_hand_ -= qty;
  allocated_ += qty;
  sample(at);
}

void InventoryRecord::release(Quantity qty, Hours at) {
  if (qty < 0.0 || qty > allocated_)
    throw InvariantViolation("allocation_underflow", "cannot ship " + format_number(qty) +
                                                         " unreserved units of " +
                                                         to_string(item_) + " at " +
                                                         owner_.str());
  allocated_ -= qty;
  sample(at);
}

double step_integral(const std::vector<StockSample> &samples, Hours t_end) {
  double area = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Hours from = samples[i].at;
    if (from >= t_end)
      break;
    const Hours to = i + 1 < samples.size() ? std::min(samples[i + 1].at, t_end) : t_end;
    area += samples[i].level * (to - from);
  }
  return area;
}

double InventoryRecord::integral(Hours t_end) const { return step_integral(samples_, t_end); }

double InventoryRecord::time_weighted_mean(Hours t_end) const {
  if (!(t_end > 0.0))
    throw ValidationError("empty_period", "time-weighted mean needs a positive period");
  return integral(t_end) / t_end;
}

std::optional<Quantity> reorder_quantity(Quantity on_hand, const StockPolicy &policy) {
  if (on_hand < policy.reorder_point)
    return policy.order_up_to - on_hand;
  return std::nullopt;
}

} // namespace vcsim
