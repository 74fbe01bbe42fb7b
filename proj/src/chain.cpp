#include "vcsim/chain.hpp"

#include "vcsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vcsim {

namespace {

constexpr double kEps = 1e-9;

const std::set<std::string_view> &vcor_kinds() {
  static const std::set<std::string_view> kinds{
      kind::kMarket,         kind::kArchitect,       kind::kIntroduceTechnology, kind::kLaunch,
      kind::kSell,           kind::kContractDemand,  kind::kManageIncident,      kind::kResolveProblem,
      kind::kEducate,        kind::kMonitor,
  };
  return kinds;
}

[[noreturn]] void broken(const std::string &code, const std::string &msg) {
  throw InvariantViolation(code, "invariant violated: " + msg);
}

} // namespace

bool is_vcor_event_kind(std::string_view k) { return vcor_kinds().count(k) > 0; }

// ---------------------------------------------------------------------------
// Pure process decisions

Quantity CapacityAccount::grant(Hours hours) {
  const double total = carry_ + per_hour_ * hours;
  const double whole = std::floor(total + kEps);
  carry_ = std::max(0.0, total - whole);
  return whole;
}

Quantity raw_limited_boxes(const std::vector<BomLine> &bom,
                           const std::map<int, Quantity> &raw_on_hand) {
  Quantity boxes = std::numeric_limits<Quantity>::infinity();
  for (const auto &line : bom) {
    auto it = raw_on_hand.find(line.raw);
    const Quantity have = it == raw_on_hand.end() ? 0.0 : it->second;
    boxes = std::min(boxes, std::floor(have / line.kg_per_box + kEps));
  }
  return boxes;
}

Quantity defective_quantity(Quantity lot, double u, double max_fraction) {
  const Quantity q = std::ceil(u * max_fraction * lot - kEps);
  return std::clamp(q, std::min(1.0, lot), lot);
}

double educate(double defective_probability, double decay) {
  return std::max(0.0, defective_probability * decay);
}

int least_sold_product(const std::map<int, Quantity> &sales) {
  if (sales.empty())
    throw ValidationError("no_products", "least sold product of an empty catalog");
  auto best = sales.begin();
  for (auto it = sales.begin(); it != sales.end(); ++it)
    if (it->second < best->second)
      best = it;
  return best->first;
}

std::optional<double> mean_vote(const std::vector<double> &votes) {
  if (votes.empty())
    return std::nullopt;
  return std::accumulate(votes.begin(), votes.end(), 0.0) / static_cast<double>(votes.size());
}

bool market_trigger(const std::vector<double> &votes, double threshold, bool project_active) {
  if (project_active)
    return false;
  auto m = mean_vote(votes);
  return m && *m < threshold;
}

std::vector<Prospect> qualify_targets(std::vector<Prospect> pool, double capacity_cap,
                                      double daily_capacity, double already_committed) {
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Prospect &a, const Prospect &b) { return a.priority > b.priority; });
  const double limit = capacity_cap * daily_capacity;
  std::vector<Prospect> accepted;
  double committed = already_committed;
  for (auto &p : pool) {
    if (committed + p.boxes_per_day <= limit + kEps) {
      committed += p.boxes_per_day;
      accepted.push_back(std::move(p));
    }
  }
  return accepted;
}

std::vector<Hours> contract_order_times(double boxes_per_day, Quantity lot, Hours start,
                                        Hours end) {
  std::vector<Hours> times;
  if (!(boxes_per_day > 0.0) || !(lot > 0.0))
    return times;
  const Hours spacing = 24.0 * lot / boxes_per_day;
  for (long k = 1;; ++k) {
    const Hours t = start + static_cast<double>(k) * spacing;
    if (t > end)
      break;
    times.push_back(t);
  }
  return times;
}

std::optional<Hours> demand_interarrival(double monthly_boxes, Quantity lot) {
  if (!(monthly_boxes > 0.0))
    return std::nullopt;
  return lot * kHoursPerMonth / monthly_boxes;
}

int active_month(int start_month, Hours t) {
  const auto elapsed = static_cast<long>(std::floor(t / kHoursPerMonth));
  return static_cast<int>((start_month - 1 + elapsed) % 12) + 1;
}

// ---------------------------------------------------------------------------
// Simulation setup

namespace {

Catalog catalog_for(const Scenario &s) {
  Catalog c;
  c.actors = {kRetailer, kFirm, kUpstream};
  for (const auto &sup : s.suppliers)
    c.actors.insert(ActorId(sup.id));
  for (const auto &cu : s.customers)
    c.actors.insert(ActorId(cu.id));
  for (const auto &p : s.firm.sell.prospects)
    c.actors.insert(ActorId(p.id));
  for (const auto &p : s.products)
    c.items.insert(Item::product(p.id));
  for (const auto &r : s.raws)
    c.items.insert(Item::raw(r.id));
  return c;
}

double bom_cost(const Scenario &s, const std::vector<BomLine> &bom) {
  double v = 0.0;
  for (const auto &l : bom)
    v += l.kg_per_box * s.raw(l.raw).price_per_kg;
  return v;
}

} // namespace

Simulation::Simulation(Scenario scenario)
    : scenario_((validate(scenario), std::move(scenario))), engine_(scenario_.horizon),
      rng_(scenario_.seed), ledger_(catalog_for(scenario_)),
      capacity_(scenario_.firm.daily_capacity) {
  const auto &s = scenario_;
  for (const auto &c : s.customers)
    customers_[ActorId(c.id)] = &c;
  for (const auto &p : s.firm.sell.prospects)
    prospects_.insert(ActorId(p.id));

  for (const auto &p : s.products) {
    bom_[p.id] = p.bom;
    unit_time_[p.id] = p.unit_production_time;
    retail_price_[p.id] = p.retail_price;
    customer_sales_[p.id] = 0.0;
    produced_[p.id] = 0.0;
  }

  auto add_stock = [this](const ActorId &owner, Item item, const StockLine *line, double holding,
                          double value) {
    stock_.emplace(std::make_pair(owner, item),
                   InventoryRecord(owner, item, line ? line->initial : 0.0,
                                   line ? line->policy : std::nullopt, holding, value));
  };
  auto find_line = [](const std::vector<StockLine> &lines, int id) -> const StockLine * {
    for (const auto &l : lines)
      if (l.item == id)
        return &l;
    return nullptr;
  };

  for (const auto &p : s.products)
    add_stock(kRetailer, Item::product(p.id), find_line(s.retailer.stock, p.id),
              s.retailer.holding_cost, p.wholesale_price);
  for (const auto &p : s.products)
    add_stock(kFirm, Item::product(p.id), find_line(s.firm.fgi, p.id), s.firm.fgi_holding_cost,
              p.production_cost + bom_cost(s, p.bom));
  for (const auto &r : s.raws)
    add_stock(kFirm, Item::raw(r.id), find_line(s.firm.raw, r.id), s.firm.raw_holding_cost,
              r.price_per_kg);
  for (const auto &sup : s.suppliers)
    for (const auto &l : sup.stock)
      add_stock(ActorId(sup.id), Item::raw(l.item), &l, sup.holding_cost,
                s.raw(l.item).upstream_price_per_kg);

  p_def_ = s.retailer.support.defective_probability;
  p_def_history_.push_back({0.0, p_def_});
  committed_history_.push_back({0.0, 0.0});

  for (const auto &c : s.customers) {
    const ActorId id(c.id);
    support_latch_[id] = false;
    for (int p : c.products) {
      votes_[{id, p}] = VoteState{s.satisfaction.initial_vote, 0};
      innovation_[{id, p}] = false;
      last_price_[{id, p}] = retail_price_.at(p);
      vote_series_.push_back({0, id, p, 0.0, s.satisfaction.initial_vote, false});
    }
  }

  // Periodic activations, in a fixed registration order.
  engine_.register_periodic(kRetailer, kind::kDeliver, s.retailer.deliver_interval);
  engine_.register_periodic(kRetailer, kind::kRetailerSource, s.retailer.source_interval);
  engine_.register_periodic(kFirm, kind::kDeliver, s.firm.deliver_interval);
  engine_.register_periodic(kFirm, kind::kSource, s.firm.source_interval);
  engine_.register_periodic(kFirm, kind::kMake, s.firm.make_interval);
  if (s.vcor.market)
    engine_.register_periodic(kFirm, kind::kMarket, s.firm.market.interval);
  if (s.vcor.sell)
    engine_.register_periodic(kFirm, kind::kSell, s.firm.sell.interval);
  for (const auto &sup : s.suppliers) {
    engine_.register_periodic(ActorId(sup.id), kind::kDeliver, sup.deliver_interval);
    engine_.register_periodic(ActorId(sup.id), kind::kSource, sup.source_interval);
  }

  for (const auto &c : s.customers)
    for (int p : c.products)
      schedule_next_demand(ActorId(c.id), p);

  for (std::size_t i = 0; i < s.price_changes.size(); ++i)
    engine_.schedule(s.price_changes[i].at, kRetailer, kind::kPriceChange,
                     static_cast<std::int64_t>(i));
}

// ---------------------------------------------------------------------------
// Lookups

bool Simulation::is_customer(const ActorId &a) const { return customers_.count(a) > 0; }

bool Simulation::is_supplier(const ActorId &a) const {
  return std::any_of(scenario_.suppliers.begin(), scenario_.suppliers.end(),
                     [&](const SupplierConfig &s) { return s.id == a.str(); });
}

bool Simulation::stocks(const ActorId &owner, Item item) const {
  return stock_.count({owner, item}) > 0;
}

InventoryRecord &Simulation::stock(const ActorId &owner, Item item) {
  auto it = stock_.find({owner, item});
  if (it == stock_.end())
    throw ValidationError("unknown_stock", owner.str() + " keeps no stock of " + to_string(item));
  return it->second;
}

const VoteState &Simulation::vote(const ActorId &customer, int product) const {
  auto it = votes_.find({customer, product});
  if (it == votes_.end())
    throw ValidationError("unknown_vote", customer.str() + " does not buy product " +
                                              std::to_string(product));
  return it->second;
}

bool Simulation::innovation_flag(const ActorId &customer, int product) const {
  auto it = innovation_.find({customer, product});
  return it != innovation_.end() && it->second;
}

bool Simulation::support_latch(const ActorId &customer) const {
  auto it = support_latch_.find(customer);
  return it != support_latch_.end() && it->second;
}

Quantity Simulation::allocated_to(OrderId order) const {
  auto it = allocated_.find(order);
  return it == allocated_.end() ? 0.0 : it->second;
}

Quantity Simulation::queued_production(int product) const {
  Quantity q = 0.0;
  for (const auto &j : jobs_)
    if (j.product == product)
      q += j.remaining;
  return q;
}

std::optional<int> Simulation::project_product() const {
  if (!project_)
    return std::nullopt;
  return project_->product;
}

double Simulation::price(const ActorId &provider, const ActorId &client, Item item) const {
  if (provider == kRetailer)
    return retail_price_.at(item.id);
  if (provider == kFirm)
    return scenario_.product(item.id).wholesale_price;
  if (provider == kUpstream)
    return scenario_.raw(item.id).upstream_price_per_kg;
  (void)client;
  return scenario_.raw(item.id).price_per_kg;
}

const LeadTime &Simulation::lead_time_of(const ActorId &provider) const {
  if (provider == kRetailer)
    return scenario_.retailer.lead_time;
  if (provider == kFirm)
    return scenario_.firm.lead_time;
  if (provider == kUpstream)
    return scenario_.upstream_lead_time;
  for (const auto &s : scenario_.suppliers)
    if (s.id == provider.str())
      return s.lead_time;
  throw ValidationError("unknown_actor", "no lead time for " + provider.str());
}

Hours Simulation::draw_lead_time(const LeadTime &lead, const std::string &stream) {
  switch (lead.kind) {
  case LeadTime::Kind::kFixed:
    return lead.a;
  case LeadTime::Kind::kUniform:
    return rng_.stream(stream).uniform(lead.a, lead.b);
  case LeadTime::Kind::kExponential:
    return rng_.stream(stream).exponential(lead.a);
  }
  return lead.a;
}

ProductionMode Simulation::firm_mode(int product) const {
  auto it = scenario_.firm.mode.find(product);
  return it == scenario_.firm.mode.end() ? ProductionMode::kMakeToStock : it->second;
}

ProductionMode Simulation::retailer_mode(int product) const {
  auto it = scenario_.retailer.mode.find(product);
  return it == scenario_.retailer.mode.end() ? ProductionMode::kMakeToStock : it->second;
}

// ---------------------------------------------------------------------------
// Order flow

OrderId Simulation::place_order(const ActorId &client, const ActorId &provider, Item item,
                                Quantity qty, OrderOrigin origin, OrderId parent,
                                Hours hold_until) {
  Order o;
  o.client = client;
  o.provider = provider;
  o.item = item;
  o.quantity = qty;
  o.created_at = engine_.now();
  o.origin = origin;
  o.parent = parent;
  o.hold_until = hold_until;
  const OrderId id = ledger_.append_order(std::move(o));

  if (origin == OrderOrigin::kReplenishment)
    pending_replenishment_[{client, item}] = id;
  if (provider == kFirm)
    engine_.schedule(engine_.now(), kFirm, kind::kOrderArrival, id);
  else if (provider == kUpstream)
    ship(ledger_.order(id), "upstream/deliver");
  return id;
}

void Simulation::ship(const Order &order, const std::string &stream) {
  const Hours lead = draw_lead_time(lead_time_of(order.provider), stream);
  ledger_.transition(order.id, OrderStatus::kInTransit, engine_.now());
  engine_.schedule(engine_.now() + lead, order.client, kind::kShipmentArrival, order.id);
}

std::vector<OrderId> Simulation::schedule_product_deliveries() {
  std::vector<OrderId> placed;
  for (const auto &p : scenario_.products) {
    const Item item = Item::product(p.id);
    if (retailer_mode(p.id) != ProductionMode::kMakeToStock)
      continue;
    auto &rec = stock(kRetailer, item);
    if (!rec.policy() || pending_replenishment_.count({kRetailer, item}))
      continue;
    if (auto qty = reorder_quantity(rec.on_hand(), *rec.policy()))
      placed.push_back(place_order(kRetailer, kFirm, item, *qty, OrderOrigin::kReplenishment));
  }
  return placed;
}

void Simulation::receive_order(OrderId id) {
  const Order &o = ledger_.order(id);
  const Hours now = engine_.now();
  if (o.provider != kFirm || o.status != OrderStatus::kOpen)
    throw ValidationError("not_receivable", "order " + std::to_string(id) +
                                                " is not an Open order addressed to the firm");
  if (!o.item.is_product() || !bom_.count(o.item.id)) {
    ledger_.transition(id, OrderStatus::kRejected, now);
    return;
  }
  const int p = o.item.id;
  if (firm_mode(p) == ProductionMode::kMakeToOrder) {
    jobs_.push_back({next_job_++, p, o.quantity, id});
    return;
  }
  auto &fgi = stock(kFirm, o.item);
  const Quantity take = std::min(fgi.on_hand(), o.quantity);
  if (take > 0.0) {
    fgi.reserve(take, now);
    allocated_[id] += take;
  }
  if (take >= o.quantity)
    ledger_.transition(id, OrderStatus::kFgi, now);
  else
    jobs_.push_back({next_job_++, p, o.quantity - take, id});
}

std::map<int, Quantity> Simulation::build_product() {
  const Hours now = engine_.now();
  std::map<int, Quantity> started;

  // Make-to-stock refill: the FGI position counts queued and running refill work.
  for (const auto &p : scenario_.products) {
    if (firm_mode(p.id) != ProductionMode::kMakeToStock)
      continue;
    auto &fgi = stock(kFirm, Item::product(p.id));
    if (!fgi.policy())
      continue;
    Quantity position = fgi.on_hand();
    for (const auto &j : jobs_)
      if (j.product == p.id && j.order == 0)
        position += j.remaining;
    for (const auto &l : lots_)
      if (l.product == p.id && l.order == 0 && !l.completed)
        position += l.quantity;
    if (auto qty = reorder_quantity(position, *fgi.policy()))
      jobs_.push_back({next_job_++, p.id, *qty, 0});
  }

  Quantity budget = capacity_.grant(scenario_.firm.make_interval);
  bool shortage = false;
  for (auto it = jobs_.begin(); it != jobs_.end() && budget > 0.0;) {
    const auto &bom = bom_.at(it->product);
    std::map<int, Quantity> raws;
    for (const auto &l : bom)
      raws[l.raw] = stock(kFirm, Item::raw(l.raw)).on_hand();
    const Quantity wanted = std::min(std::floor(it->remaining + kEps), budget);
    const Quantity n = std::min(wanted, raw_limited_boxes(bom, raws));
    if (n < wanted)
      shortage = true;
    if (n <= 0.0) {
      ++it;
      continue;
    }
    ProductionLot lot;
    lot.id = static_cast<std::int64_t>(lots_.size()) + 1;
    lot.product = it->product;
    lot.quantity = n;
    lot.order = it->order;
    lot.started_at = now;
    lot.completes_at = now + unit_time_.at(it->product) * n;
    for (const auto &l : bom) {
      stock(kFirm, Item::raw(l.raw)).adjust(-l.kg_per_box * n, now);
      lot.raw_used[l.raw] += l.kg_per_box * n;
    }
    const double cost = scenario_.product(it->product).production_cost * n;
    if (cost > 0.0)
      costs_.book(now, kFirm, CostCategory::kProduction, cost);
    if (lot.order != 0 && ledger_.order(lot.order).status == OrderStatus::kOpen)
      ledger_.transition(lot.order, OrderStatus::kInProduction, now);
    engine_.schedule(lot.completes_at, kFirm, kind::kProductionComplete, lot.id);
    started[lot.product] += n;
    lots_.push_back(std::move(lot));

    budget -= n;
    it->remaining -= n;
    if (it->remaining <= kEps)
      it = jobs_.erase(it);
    else
      ++it;
  }
  if (shortage)
    source_raws(kFirm);
  return started;
}

void Simulation::on_production_complete(std::int64_t lot_id) {
  auto &lot = lots_.at(static_cast<std::size_t>(lot_id - 1));
  const Hours now = engine_.now();
  lot.completed = true;
  produced_[lot.product] += lot.quantity;
  auto &fgi = stock(kFirm, Item::product(lot.product));
  fgi.adjust(lot.quantity, now);
  if (lot.order == 0)
    return;
  fgi.reserve(lot.quantity, now);
  allocated_[lot.order] += lot.quantity;
  const Order &o = ledger_.order(lot.order);
  if (allocated_[lot.order] >= o.quantity - kEps) {
    if (o.status == OrderStatus::kOpen)
      ledger_.transition(o.id, OrderStatus::kInProduction, now);
    ledger_.transition(o.id, OrderStatus::kFgi, now);
  }
}

std::vector<OrderId> Simulation::source_raws(const ActorId &actor) {
  std::vector<OrderId> placed;
  for (auto &[key, rec] : stock_) {
    if (key.first != actor || !key.second.is_raw() || !rec.policy())
      continue;
    if (pending_replenishment_.count(key))
      continue;
    auto qty = reorder_quantity(rec.on_hand(), *rec.policy());
    if (!qty)
      continue;
    const ActorId provider =
        actor == kFirm ? ActorId(scenario_.raw(key.second.id).source) : kUpstream;
    placed.push_back(place_order(actor, provider, key.second, *qty, OrderOrigin::kReplenishment));
  }
  return placed;
}

std::vector<OrderId> Simulation::deliver(const ActorId &actor) {
  const Hours now = engine_.now();
  std::vector<OrderId> shipped;

  if (actor == kFirm) {
    std::vector<OrderId> ready;
    for (const Order *o : ledger_.orders_for(kFirm))
      if (o->status == OrderStatus::kFgi)
        ready.push_back(o->id);
    for (OrderId id : ready) {
      const Order &o = ledger_.order(id);
      stock(kFirm, o.item).release(allocated_.at(id), now);
      allocated_.erase(id);
      ship(o, "firm/deliver");
      shipped.push_back(id);
    }
    return shipped;
  }

  std::set<Item> blocked;
  std::vector<OrderId> open;
  for (const Order *o : ledger_.open_orders(actor))
    open.push_back(o->id);
  for (OrderId id : open) {
    const Order &o = ledger_.order(id);
    if (now < o.hold_until || blocked.count(o.item))
      continue;
    const bool replacement = o.origin == OrderOrigin::kReplacement;
    if (actor == kRetailer && retailer_mode(o.item.id) == ProductionMode::kMakeToOrder) {
      if (!back_to_back_ready_.count(id))
        continue;
      back_to_back_ready_.erase(id);
    } else if (!stocks(actor, o.item)) {
      continue;
    } else {
      auto &rec = stock(actor, o.item);
      if (rec.on_hand() + kEps < o.quantity) {
        blocked.insert(o.item);
        continue;
      }
    }
    if (stocks(actor, o.item))
      stock(actor, o.item).adjust(-o.quantity, now);
    ship(o, replacement ? "retailer/support" : actor.str() + "/deliver");
    shipped.push_back(id);
  }
  return shipped;
}

void Simulation::on_shipment_arrival(OrderId id) {
  const Hours now = engine_.now();
  ledger_.transition(id, OrderStatus::kDelivered, now);
  const Order &o = ledger_.order(id);

  if (o.origin != OrderOrigin::kReplacement) {
    const double amount = o.quantity * price(o.provider, o.client, o.item);
    if (amount > 0.0) {
      costs_.book(now, o.provider, CostCategory::kSalesRevenue, amount);
      if (!is_customer(o.client) && !prospects_.count(o.client))
        costs_.book(now, o.client, CostCategory::kPurchase, amount);
    }
  }

  auto pending = pending_replenishment_.find({o.client, o.item});
  if (pending != pending_replenishment_.end() && pending->second == id)
    pending_replenishment_.erase(pending);

  if (is_customer(o.client)) {
    on_customer_delivery(o);
    return;
  }
  if (stocks(o.client, o.item))
    stock(o.client, o.item).adjust(o.quantity, now);
  if (o.origin == OrderOrigin::kBackToBack)
    back_to_back_ready_.insert(o.parent);
}

void Simulation::on_customer_delivery(const Order &o) {
  const Hours now = engine_.now();
  const int p = o.item.id;
  const auto &params = scenario_.satisfaction.params;
  if (o.origin != OrderOrigin::kReplacement)
    customer_sales_[p] += o.quantity;

  auto &defect = rng_.stream("retailer/defect");
  const double u_hit = defect.uniform();
  const double u_size = defect.uniform_open_closed();
  Quantity defective = 0.0;
  if (u_hit < p_def_)
    defective = defective_quantity(o.quantity, u_size,
                                   scenario_.retailer.support.max_defective_fraction);
  if (defective > 0.0 && scenario_.vcor.support) {
    pending_defects_[o.id] = defective;
    engine_.schedule(now, kRetailer, kind::kManageIncident, o.id);
  }

  const auto key = std::make_pair(o.client, p);
  auto vit = votes_.find(key);
  if (vit == votes_.end())
    return;

  InputSignals sig;
  sig.innovation = innovation_[key];
  sig.support_ok = support_latch_[o.client];

  const double prev_price = last_price_[key];
  const double cur_price = retail_price_.at(p);
  sig.price_variation = prev_price > 0.0 ? 100.0 * (cur_price - prev_price) / prev_price : 0.0;
  last_price_[key] = cur_price;

  const Hours dt = now - o.created_at;
  auto &dh = delay_history_[p];
  if (auto m = dh.mean(); m && *m > 0.0)
    sig.delay = 100.0 * (dt - *m) / *m;
  dh.sum += dt;
  ++dh.count;

  const double ratio = (o.quantity - defective) / o.quantity;
  auto &qh = quality_history_[p];
  if (auto m = qh.mean(); m && *m > 0.0)
    sig.quality = 100.0 * ratio / *m;
  else
    sig.quality = 100.0 * ratio;
  qh.sum += ratio;
  ++qh.count;

  std::vector<double> others;
  for (const auto &[k, st] : votes_)
    if (k.second == p && k.first != o.client)
      others.push_back(st.x);
  sig.other_vote = mean_vote(others).value_or(0.0);

  vit->second = firm_update(vit->second, sig, params);
  vote_series_.push_back({vit->second.k, o.client, p, now, vit->second.x, sig.innovation});

  support_latch_[o.client] = false;
  if (sig.innovation) {
    innovation_[key] = false;
    for (auto &span : innovation_spans_)
      if (span.customer == o.client && span.product == p && !span.cleared_at)
        span.cleared_at = now;
  }

  if (o.origin == OrderOrigin::kReplacement && scenario_.vcor.support) {
    for (const auto &[tid, t] : ledger_.tickets())
      if (t.replacement == o.id && !t.resolved_at)
        engine_.schedule(now, kRetailer, kind::kMonitor, tid);
  }
}

// ---------------------------------------------------------------------------
// Support

std::int64_t Simulation::manage_incident(OrderId order, Quantity defective) {
  const Hours now = engine_.now();
  const Order &o = ledger_.order(order);
  const std::int64_t ticket = ledger_.open_ticket(order, o.client, defective, now);
  ledger_.transition(order, OrderStatus::kReturnRequested, now);
  pending_defects_.erase(order);
  if (scenario_.retailer.support.cost_per_ticket > 0.0)
    costs_.book(now, kRetailer, CostCategory::kSupport, scenario_.retailer.support.cost_per_ticket);
  engine_.schedule(now, kRetailer, kind::kResolveProblem, ticket);
  return ticket;
}

OrderId Simulation::resolve_problem(std::int64_t ticket_id) {
  const Hours now = engine_.now();
  const SupportTicket &t = ledger_.ticket(ticket_id);
  if (t.replacement != 0)
    throw ValidationError("ticket_resolved", "ticket " + std::to_string(ticket_id) +
                                                 " already has a replacement");
  const Order &original = ledger_.order(t.order_id);
  const Item item = original.item;
  const OrderId rep = place_order(t.customer, kRetailer, item, t.defective,
                                  OrderOrigin::kReplacement, t.order_id,
                                  now + scenario_.retailer.support.handling_time);
  ledger_.link_replacement(ticket_id, rep);
  if (retailer_mode(item.id) == ProductionMode::kMakeToOrder)
    place_order(kRetailer, kFirm, item, t.defective, OrderOrigin::kBackToBack, rep);
  return rep;
}

void Simulation::monitor_experience(std::int64_t ticket_id) {
  const Hours now = engine_.now();
  const SupportTicket &t = ledger_.ticket(ticket_id);
  if (t.resolved_at)
    return;
  ledger_.resolve_ticket(ticket_id, now);
  if (ledger_.order(t.order_id).status == OrderStatus::kReturnRequested)
    ledger_.transition(t.order_id, OrderStatus::kResolved, now);
  support_latch_[t.customer] = true;
  engine_.schedule(now, kRetailer, kind::kEducate, ticket_id);
}

void Simulation::educate_customer() {
  p_def_ = educate(p_def_, scenario_.retailer.support.education_decay);
  p_def_history_.push_back({engine_.now(), p_def_});
}

// ---------------------------------------------------------------------------
// Market, Research, Develop

bool Simulation::analyze_market() {
  std::vector<double> current;
  for (const auto &[k, st] : votes_)
    if (st.k >= 1)
      current.push_back(st.x);
  if (!market_trigger(current, scenario_.firm.market.threshold, project_active()))
    return false;
  engine_.schedule(engine_.now(), kFirm, kind::kArchitect);
  return true;
}

int Simulation::architect_solution() {
  const Hours now = engine_.now();
  const int target = least_sold_product(customer_sales_);
  project_ = Project{target, now};
  const auto &m = scenario_.firm.market;
  if (scenario_.vcor.research)
    engine_.schedule(now + m.rd_delay, kFirm, kind::kIntroduceTechnology, target);
  else if (scenario_.vcor.develop)
    engine_.schedule(now + m.rd_delay, kFirm, kind::kLaunch, target);
  else
    project_.reset();
  return target;
}

void Simulation::introduce_technology() {
  if (!project_)
    return;
  const Hours now = engine_.now();
  const auto &m = scenario_.firm.market;
  const int p = project_->product;
  if (m.new_unit_production_time)
    unit_time_[p] = *m.new_unit_production_time;
  if (!m.new_bom.empty())
    bom_[p] = m.new_bom;
  if (m.technology_cost > 0.0)
    costs_.book(now, kFirm, CostCategory::kTechnology, m.technology_cost);
  if (scenario_.vcor.develop)
    engine_.schedule(now, kFirm, kind::kLaunch, p);
  else
    project_.reset();
}

void Simulation::launch_product(int product) {
  const Hours now = engine_.now();
  for (auto &[key, flag] : innovation_) {
    if (key.second != product)
      continue;
    if (!flag)
      innovation_spans_.push_back({key.first, product, now, std::nullopt});
    flag = true;
  }
  project_.reset();
}

// ---------------------------------------------------------------------------
// Sell

std::vector<Prospect> Simulation::qualify_prospects() {
  std::vector<Prospect> pool;
  for (const auto &p : scenario_.firm.sell.prospects)
    if (!contracted_.count(p.id))
      pool.push_back(p);
  return qualify_targets(std::move(pool), scenario_.firm.sell.capacity_cap,
                         scenario_.firm.daily_capacity, committed_per_day_);
}

void Simulation::finalize_contracts(const std::vector<Prospect> &accepted) {
  const Hours now = engine_.now();
  for (const auto &p : accepted) {
    if (contracted_.count(p.id))
      continue;
    contracted_.insert(p.id);
    committed_per_day_ += p.boxes_per_day;
    committed_history_.push_back({now, committed_per_day_});
    contracts_.push_back({p, now, 0});
    const Hours spacing = 24.0 * p.lot_size / p.boxes_per_day;
    engine_.schedule(now + spacing, kFirm, kind::kContractDemand,
                     static_cast<std::int64_t>(contracts_.size() - 1));
  }
}

void Simulation::on_contract_demand(std::size_t index) {
  auto &c = contracts_.at(index);
  place_order(ActorId(c.prospect.id), kFirm, Item::product(c.prospect.product),
              c.prospect.lot_size, OrderOrigin::kContract);
  ++c.issued;
  const Hours spacing = 24.0 * c.prospect.lot_size / c.prospect.boxes_per_day;
  engine_.schedule(c.start + static_cast<double>(c.issued + 1) * spacing, kFirm,
                   kind::kContractDemand, static_cast<std::int64_t>(index));
}

// ---------------------------------------------------------------------------
// Customers

std::optional<Hours> Simulation::next_demand_gap(const ActorId &customer, int product) {
  const auto &c = *customers_.at(customer);
  const int month = active_month(scenario_.start_month, engine_.now());
  auto spacing =
      demand_interarrival(scenario_.demand.boxes(c.table_index, product, month), c.lot_size);
  if (!spacing || scenario_.arrivals == ArrivalMode::kDeterministic)
    return spacing;
  return rng_.stream(customer.str() + "/demand/P" + std::to_string(product))
      .exponential(*spacing);
}

void Simulation::schedule_next_demand(const ActorId &customer, int product) {
  if (auto gap = next_demand_gap(customer, product)) {
    engine_.schedule_in(*gap, customer, kind::kCustomerDemand, product);
    return;
  }
  // No demand this month: wake up at the next month boundary if any month has demand.
  const auto &c = *customers_.at(customer);
  bool any = false;
  for (int m = 1; m <= 12; ++m)
    any = any || scenario_.demand.boxes(c.table_index, product, m) > 0.0;
  if (!any)
    return;
  const Hours boundary = (std::floor(engine_.now() / kHoursPerMonth) + 1.0) * kHoursPerMonth;
  engine_.schedule(boundary, customer, kind::kCustomerDemand, -product);
}

OrderId Simulation::generate_customer_demand(const ActorId &customer, int product) {
  const auto &c = *customers_.at(customer);
  const Item item = Item::product(product);
  const OrderId id = place_order(customer, kRetailer, item, c.lot_size, OrderOrigin::kDemand);
  if (retailer_mode(product) == ProductionMode::kMakeToOrder)
    place_order(kRetailer, kFirm, item, c.lot_size, OrderOrigin::kBackToBack, id);
  return id;
}

// ---------------------------------------------------------------------------
// Driving

void Simulation::dispatch(const Event &e) {
  const std::string &k = e.kind;
  if (k == kind::kDeliver) {
    deliver(e.target);
  } else if (k == kind::kRetailerSource) {
    schedule_product_deliveries();
  } else if (k == kind::kSource) {
    source_raws(e.target);
  } else if (k == kind::kMake) {
    build_product();
  } else if (k == kind::kOrderArrival) {
    receive_order(e.payload);
  } else if (k == kind::kShipmentArrival) {
    on_shipment_arrival(e.payload);
  } else if (k == kind::kProductionComplete) {
    on_production_complete(e.payload);
  } else if (k == kind::kCustomerDemand) {
    const int p = static_cast<int>(std::abs(e.payload));
    if (e.payload > 0)
      generate_customer_demand(e.target, p);
    schedule_next_demand(e.target, p);
  } else if (k == kind::kManageIncident) {
    manage_incident(e.payload, pending_defects_.at(e.payload));
  } else if (k == kind::kResolveProblem) {
    resolve_problem(e.payload);
  } else if (k == kind::kMonitor) {
    monitor_experience(e.payload);
  } else if (k == kind::kEducate) {
    educate_customer();
  } else if (k == kind::kMarket) {
    analyze_market();
  } else if (k == kind::kArchitect) {
    architect_solution();
  } else if (k == kind::kIntroduceTechnology) {
    introduce_technology();
  } else if (k == kind::kLaunch) {
    launch_product(static_cast<int>(e.payload));
  } else if (k == kind::kSell) {
    auto accepted = qualify_prospects();
    if (!accepted.empty())
      finalize_contracts(accepted);
  } else if (k == kind::kContractDemand) {
    on_contract_demand(static_cast<std::size_t>(e.payload));
  } else if (k == kind::kPriceChange) {
    const auto &pc = scenario_.price_changes.at(static_cast<std::size_t>(e.payload));
    retail_price_[pc.product] = pc.retail_price;
  } else {
    broken("unknown_event_kind", "no handler for event kind '" + k + "'");
  }
}

EventTrace Simulation::run_until(Hours t) {
  EventTrace fired = engine_.run_until(t, [this](const Event &e) { dispatch(e); });
  trace_.insert(trace_.end(), fired.begin(), fired.end());
  return fired;
}

void Simulation::check_invariants() const {
  const Hours T = scenario_.horizon;

  std::size_t census = 0;
  for (const auto &[status, n] : order_census(ledger_))
    census += n;
  if (census != ledger_.size())
    broken("ledger_census", "order census does not sum to the ledger length");

  for (const auto &[key, rec] : stock_)
    if (rec.on_hand() < -kEps || rec.allocated() < -kEps)
      broken("non_negative_stock", key.first.str() + " holds negative " + to_string(key.second));

  // Finished goods: the firm cannot ship more than it started with plus produced.
  for (const auto &p : scenario_.products) {
    Quantity shipped = 0.0;
    for (const Order *o : ledger_.orders_for(kFirm))
      if (o->item == Item::product(p.id) && o->delivered_at)
        shipped += o->quantity;
    const auto &fgi = stock_.at({kFirm, Item::product(p.id)});
    const Quantity initial = fgi.samples().front().level;
    if (shipped > initial + produced_.at(p.id) + kEps)
      broken("material_conservation", "firm delivered more " + to_string(Item::product(p.id)) +
                                          " than initial stock plus production");
  }

  // Raws at the firm: initial + received - consumed = final.
  for (const auto &r : scenario_.raws) {
    const Item item = Item::raw(r.id);
    const auto &rec = stock_.at({kFirm, item});
    Quantity received = 0.0;
    for (const auto &[id, o] : ledger_.orders())
      if (o.client == kFirm && o.item == item && o.delivered_at)
        received += o.quantity;
    Quantity consumed = 0.0;
    for (const auto &lot : lots_) {
      auto it = lot.raw_used.find(r.id);
      if (it != lot.raw_used.end())
        consumed += it->second;
    }
    const Quantity initial = rec.samples().front().level;
    if (std::abs(initial + received - consumed - rec.physical()) > 1e-6)
      broken("raw_conservation", "raw " + std::to_string(r.id) + " balance does not close");
  }

  Quantity replaced = 0.0, defective = 0.0;
  for (const auto &[id, t] : ledger_.tickets()) {
    if (t.replacement == 0)
      continue;
    defective += t.defective;
    replaced += ledger_.order(t.replacement).quantity;
  }
  if (std::abs(replaced - defective) > kEps)
    broken("replacement_conservation", "replacement quantities differ from defective quantities");

  for (std::size_t i = 1; i < p_def_history_.size(); ++i)
    if (p_def_history_[i].second > p_def_history_[i - 1].second)
      broken("support_monotonicity", "defective probability increased");

  const double cap = scenario_.firm.sell.capacity_cap * scenario_.firm.daily_capacity;
  for (const auto &[t, c] : committed_history_)
    if (c > cap + kEps)
      broken("sell_cap", "committed contracts exceed the capacity cap");

  std::map<std::pair<ActorId, Item>, int> open_replenishment;
  for (const auto &[id, o] : ledger_.orders())
    if (o.origin == OrderOrigin::kReplenishment && !o.delivered_at)
      if (++open_replenishment[{o.client, o.item}] > 1)
        broken("reorder_suppression", o.client.str() + " has two open replenishment orders for " +
                                          to_string(o.item));

  for (const auto &e : trace_)
    if (e.fire_time > T)
      broken("horizon", "event fired past the horizon");
  for (std::size_t i = 1; i < trace_.size(); ++i)
    if (trace_[i].fire_time < trace_[i - 1].fire_time)
      broken("clock_monotonicity", "trace is not time ordered");
}

RunArtifacts Simulation::collect(EventTrace trace) const {
  RunArtifacts a;
  a.scenario_digest = scenario_digest(scenario_);
  a.seed = scenario_.seed;
  a.horizon = scenario_.horizon;
  a.mode = scenario_.mode;
  a.topology = topology_of(scenario_);
  a.trace = std::move(trace);
  a.ledger = ledger_;
  a.costs = costs_;
  for (const auto &[key, rec] : stock_) {
    StockTrack t;
    t.owner = key.first;
    t.item = key.second;
    t.unit_value = rec.unit_value();
    t.unit_holding_cost = rec.unit_holding_cost();
    t.initial = rec.samples().front().level;
    t.final_level = rec.physical();
    t.samples = rec.samples();
    a.stocks.push_back(std::move(t));
  }
  a.votes = vote_series_;
  a.lots = lots_;
  a.innovation = innovation_spans_;
  a.defect_probability = p_def_history_;
  a.committed_contracts = committed_history_;
  a.contract_cap = scenario_.firm.sell.capacity_cap * scenario_.firm.daily_capacity;
  for (const auto &p : scenario_.products)
    a.initial_fgi[to_string(Item::product(p.id))] =
        stock_.at({kFirm, Item::product(p.id)}).samples().front().level;
  return a;
}

RunResult Simulation::run() {
  if (finished_)
    throw ValidationError("run_finished", "a simulation runs once");
  run_until(scenario_.horizon);
  finished_ = true;
  const Hours T = scenario_.horizon;
  for (const auto &[key, rec] : stock_) {
    const double cost = rec.unit_holding_cost() * rec.integral(T);
    if (cost > 0.0)
      costs_.book(T, key.first, CostCategory::kHolding, cost);
  }
  check_invariants();
  RunResult r;
  r.artifacts = collect(trace_);
  r.report = build_report(r.artifacts);
  return r;
}

RunResult run_scenario(const Scenario &scenario) { return Simulation(scenario).run(); }

} // namespace vcsim
