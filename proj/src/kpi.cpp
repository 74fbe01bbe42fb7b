#include "vcsim/kpi.hpp"

#include "vcsim/error.hpp"

#include <algorithm>
#include <cmath>

namespace vcsim {

namespace {

constexpr std::pair<CostCategory, std::string_view> kCategoryNames[] = {
    {CostCategory::kPurchase, "purchase"},     {CostCategory::kHolding, "holding"},
    {CostCategory::kProduction, "production"}, {CostCategory::kSupport, "support"},
    {CostCategory::kTechnology, "technology"}, {CostCategory::kSalesRevenue, "sales-revenue"},
};

} // namespace

std::string_view to_string(CostCategory c) {
  for (const auto &[cat, name] : kCategoryNames)
    if (cat == c)
      return name;
  return "unknown";
}

CostCategory parse_cost_category(std::string_view text) {
  for (const auto &[cat, name] : kCategoryNames)
    if (name == text)
      return cat;
  throw ValidationError("unknown_cost_category", "unknown cost category '" + std::string(text) + "'");
}

void CostLedger::book(Hours at, const ActorId &actor, CostCategory category, double amount) {
  if (!(amount >= 0.0) || !std::isfinite(amount))
    throw ValidationError("negative_amount", "cost entries must be non-negative, got " +
                                                 format_number(amount));
  entries_.push_back({at, actor, category, amount});
}

double CostLedger::total(const ActorId &actor, CostCategory category) const {
  double sum = 0.0;
  for (const auto &e : entries_)
    if (e.actor == actor && e.category == category)
      sum += e.amount;
  return sum;
}

double CostLedger::total_costs(const ActorId &actor) const {
  double sum = 0.0;
  for (const auto &e : entries_)
    if (e.actor == actor && e.category != CostCategory::kSalesRevenue)
      sum += e.amount;
  return sum;
}

Topology topology_of(const Scenario &scenario) {
  Topology t;
  t.actors = {"retailer", "firm"};
  for (const auto &s : scenario.suppliers)
    t.actors.push_back(s.id);
  t.actors.push_back("upstream");
  for (const auto &c : scenario.customers)
    t.actors.push_back(c.id);
  for (const auto &p : scenario.products)
    t.products.push_back(p.id);
  for (const auto &r : scenario.raws)
    t.raws.push_back(r.id);
  return t;
}

DeliveryStats delivery_times(const Ledger &ledger, const ActorId &provider) {
  DeliveryStats d;
  for (const Order *o : ledger.orders_for(provider))
    if (o->delivered_at)
      d.series.push_back({o->id, *o->delivered_at - o->created_at});
  std::sort(d.series.begin(), d.series.end());
  if (d.series.empty())
    return d;
  double sum = 0.0, mx = d.series.front().second;
  for (const auto &[id, t] : d.series) {
    sum += t;
    mx = std::max(mx, t);
  }
  d.mean = sum / static_cast<double>(d.series.size());
  d.max = mx;
  return d;
}

std::optional<double> sri(double sales_profit, double mean_stock_value) {
  if (!(mean_stock_value > 0.0))
    return std::nullopt;
  return sales_profit / mean_stock_value;
}

std::optional<double> smi(double period, std::optional<double> sri_value) {
  if (!sri_value || *sri_value == 0.0)
    return std::nullopt;
  return period / *sri_value;
}

std::optional<double> spi(double sales_profit, double costs) {
  if (sales_profit == 0.0)
    return std::nullopt;
  return (sales_profit - costs) / sales_profit;
}

std::map<OrderStatus, std::size_t> order_census(const Ledger &ledger) {
  std::map<OrderStatus, std::size_t> census;
  for (OrderStatus s : kAllStatuses)
    census[s] = 0;
  for (const auto &[id, o] : ledger.orders())
    ++census[o.status];
  return census;
}

const ActorKpi *KpiReport::actor(const std::string &id) const {
  for (const auto &a : actors)
    if (a.actor == id)
      return &a;
  return nullptr;
}

KpiReport build_report(const RunArtifacts &run) {
  KpiReport r;
  r.scenario_digest = run.scenario_digest;
  r.seed = run.seed;
  r.period = run.horizon;
  r.mode = run.mode;
  r.topology = run.topology;
  r.census = order_census(run.ledger);
  r.total_orders = run.ledger.size();
  r.support_tickets = run.ledger.tickets().size();
  r.satisfaction = run.votes;
  for (int p : run.topology.products)
    r.produced[p] = 0.0;
  for (const auto &lot : run.lots)
    if (lot.completed)
      r.produced[lot.product] += lot.quantity;

  for (const auto &name : run.topology.actors) {
    const ActorId id(name);
    const bool provider = !run.ledger.orders_for(id).empty();
    const bool holds = std::any_of(run.stocks.begin(), run.stocks.end(),
                                   [&](const StockTrack &t) { return t.owner == id; });
    if (!provider && !holds && name != "retailer" && name != "firm")
      continue;

    ActorKpi a;
    a.actor = name;
    a.delivery = delivery_times(run.ledger, id);
    for (const Order *o : run.ledger.orders_for(id)) {
      ++a.orders_received;
      if (o->delivered_at)
        ++a.orders_delivered;
    }
    a.sales_revenue = run.costs.total(id, CostCategory::kSalesRevenue);
    for (CostCategory c : kAllCostCategories)
      if (c != CostCategory::kSalesRevenue)
        a.costs[c] = run.costs.total(id, c);
    a.total_costs = run.costs.total_costs(id);

    std::map<std::string, double> value_integral;
    for (const auto &t : run.stocks)
      if (t.owner == id)
        value_integral[t.item.is_product() ? "fgi" : "raw"] +=
            t.unit_value * step_integral(t.samples, run.horizon);
    for (const auto &[cls, integral] : value_integral) {
      StockKpi k;
      if (run.horizon > 0.0)
        k.mean_stock_value = integral / run.horizon;
      if (k.mean_stock_value)
        k.sri = sri(a.sales_revenue, *k.mean_stock_value);
      k.smi = smi(run.horizon, k.sri);
      a.stock[cls] = k;
    }
    a.spi = spi(a.sales_revenue, a.total_costs);
    r.actors.push_back(std::move(a));
  }
  return r;
}

ComparisonRow compare_values(std::string key, std::optional<double> scor,
                             std::optional<double> vcor, bool higher_is_better) {
  ComparisonRow row;
  row.key = std::move(key);
  row.scor = scor;
  row.vcor = vcor;
  if (!scor || !vcor) {
    row.finding = "absent";
    return row;
  }
  row.delta = *vcor - *scor;
  if (*scor != 0.0)
    row.ratio = *vcor / *scor;
  if (*row.delta == 0.0)
    row.finding = "unchanged";
  else if ((*row.delta > 0.0) == higher_is_better)
    row.finding = "improved";
  else
    row.finding = "worse";
  return row;
}

const ComparisonRow *ComparisonReport::row(const std::string &key) const {
  for (const auto &r : rows)
    if (r.key == key)
      return &r;
  return nullptr;
}

ComparisonReport compare_runs(const KpiReport &scor, const KpiReport &vcor) {
  if (!(scor.topology == vcor.topology))
    throw ComparisonError("runs do not share a chain topology");
  ComparisonReport c;
  c.scor_digest = scor.scenario_digest;
  c.vcor_digest = vcor.scenario_digest;
  c.scor_seed = scor.seed;
  c.vcor_seed = vcor.seed;

  auto count = [](std::size_t n) { return std::optional<double>(static_cast<double>(n)); };
  std::vector<std::string> names;
  for (const auto &a : scor.actors)
    names.push_back(a.actor);
  for (const auto &a : vcor.actors)
    if (std::find(names.begin(), names.end(), a.actor) == names.end())
      names.push_back(a.actor);

  for (const auto &name : names) {
    const ActorKpi *s = scor.actor(name);
    const ActorKpi *v = vcor.actor(name);
    auto field = [&](const ActorKpi *a, auto get) -> std::optional<double> {
      return a ? get(*a) : std::nullopt;
    };
    auto add = [&](const std::string &k, auto get, bool higher) {
      c.rows.push_back(compare_values(name + "." + k, field(s, get), field(v, get), higher));
    };
    add("delivery_time.mean", [](const ActorKpi &a) { return a.delivery.mean; }, false);
    add("delivery_time.max", [](const ActorKpi &a) { return a.delivery.max; }, false);
    add("orders_delivered",
        [&](const ActorKpi &a) { return count(a.orders_delivered); }, true);
    add("sales_revenue",
        [](const ActorKpi &a) { return std::optional<double>(a.sales_revenue); }, true);
    add("total_costs",
        [](const ActorKpi &a) { return std::optional<double>(a.total_costs); }, false);
    for (const std::string cls : {"fgi", "raw"}) {
      const bool has = (s && s->stock.count(cls)) || (v && v->stock.count(cls));
      if (!has)
        continue;
      auto stock_field = [cls](auto member) {
        return [cls, member](const ActorKpi &a) -> std::optional<double> {
          auto it = a.stock.find(cls);
          return it == a.stock.end() ? std::nullopt : it->second.*member;
        };
      };
      add(cls + ".mean_stock_value", stock_field(&StockKpi::mean_stock_value), false);
      add(cls + ".sri", stock_field(&StockKpi::sri), true);
      add(cls + ".smi", stock_field(&StockKpi::smi), false);
    }
    add("spi", [](const ActorKpi &a) { return a.spi; }, true);
  }

  c.rows.push_back(compare_values("orders.total", count(scor.total_orders),
                                  count(vcor.total_orders), true));
  c.rows.push_back(compare_values("support.tickets", count(scor.support_tickets),
                                  count(vcor.support_tickets), false));
  for (int p : scor.topology.products) {
    auto produced = [p](const KpiReport &r) -> std::optional<double> {
      auto it = r.produced.find(p);
      return it == r.produced.end() ? std::nullopt : std::optional<double>(it->second);
    };
    c.rows.push_back(compare_values("produced.P" + std::to_string(p), produced(scor),
                                    produced(vcor), true));
  }
  return c;
}

} // namespace vcsim
