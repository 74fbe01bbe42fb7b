#include "doctest.h"

#include "vcsim/chain.hpp"
#include "vcsim/error.hpp"
#include "vcsim/kpi.hpp"

#include <random>

using namespace vcsim;

namespace {

Catalog chain_catalog() {
  Catalog c;
  c.actors = {"retailer", "firm", "customer1"};
  c.items = {Item::product(1), Item::product(2)};
  return c;
}

OrderId add(Ledger &l, Hours at, const char *provider = "firm") {
  Order o;
  o.client = provider == std::string("firm") ? "retailer" : "customer1";
  o.provider = provider;
  o.item = Item::product(1);
  o.quantity = 1;
  o.created_at = at;
  return l.append_order(o);
}

void deliver(Ledger &l, OrderId id, Hours at) {
  l.transition(id, OrderStatus::kInTransit, l.order(id).created_at);
  l.transition(id, OrderStatus::kDelivered, at);
}

} // namespace

TEST_CASE("delivery times") {
  Ledger l(chain_catalog());
  CHECK_FALSE(delivery_times(l, "firm").mean.has_value());

  const OrderId a = add(l, 0.0);
  const OrderId b = add(l, 2.0);
  add(l, 3.0); // never delivered
  deliver(l, b, 8.0);
  deliver(l, a, 4.0);
  const auto d = delivery_times(l, "firm");
  REQUIRE(d.series.size() == 2);
  CHECK(d.series[0] == std::make_pair(a, 4.0));
  CHECK(d.series[1] == std::make_pair(b, 6.0));
  CHECK(*d.mean == 5.0);
  CHECK(*d.max == 6.0);
  CHECK(delivery_times(l, "retailer").series.empty());
}

TEST_CASE("stock rotation") {
  CHECK(*sri(1075.2, 48.0) == doctest::Approx(22.4).epsilon(1e-12));
  CHECK(*sri(0.0, 48.0) == 0.0);
  CHECK(*sri(7.0, 7.0) == 1.0);
  CHECK_FALSE(sri(10.0, 0.0).has_value());
}

TEST_CASE("stock mean time") {
  CHECK(*smi(48.0, 22.4) == doctest::Approx(2.142857).epsilon(1e-6));
  CHECK(*smi(48.0, 48.0) == 1.0);
  CHECK(*smi(48.0, 0.69) == doctest::Approx(69.565).epsilon(1e-4));
  CHECK_FALSE(smi(48.0, 0.0).has_value());
  CHECK_FALSE(smi(48.0, std::nullopt).has_value());
}

TEST_CASE("SMI times SRI is the period") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.01, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double period = u(gen);
    const auto r = sri(u(gen), u(gen));
    CHECK(*smi(period, r) * *r == doctest::Approx(period).epsilon(1e-12));
  }
}

TEST_CASE("sales profitability") {
  CHECK(*spi(100.0, 87.0) == doctest::Approx(0.13).epsilon(1e-12));
  CHECK(*spi(50.0, 0.0) == 1.0);
  CHECK(*spi(50.0, 50.0) == 0.0);
  CHECK_FALSE(spi(0.0, 10.0).has_value());
  for (double scale : {0.001, 1.3, 1000.0})
    CHECK(*spi(100.0 * scale, 87.0 * scale) == doctest::Approx(0.13).epsilon(1e-12));
}

TEST_CASE("order census") {
  Ledger empty(chain_catalog());
  for (const auto &[s, n] : order_census(empty))
    CHECK(n == 0);
  CHECK(order_census(empty).size() == std::size(kAllStatuses));

  Ledger l(chain_catalog());
  for (int i = 0; i < 5; ++i)
    add(l, 0.0);
  deliver(l, 1, 1.0);
  deliver(l, 2, 1.0);
  deliver(l, 3, 1.0);
  l.transition(4, OrderStatus::kInTransit, 1.0);
  const auto c = order_census(l);
  CHECK(c.at(OrderStatus::kDelivered) == 3);
  CHECK(c.at(OrderStatus::kOpen) == 1);
  CHECK(c.at(OrderStatus::kInTransit) == 1);
  CHECK(c.at(OrderStatus::kFgi) == 0);
}

TEST_CASE("cost ledger") {
  CostLedger c;
  c.book(1.0, "firm", CostCategory::kProduction, 10.0);
  c.book(2.0, "firm", CostCategory::kHolding, 2.5);
  c.book(3.0, "firm", CostCategory::kSalesRevenue, 100.0);
  CHECK(c.total_costs("firm") == 12.5);
  CHECK(c.total("firm", CostCategory::kSalesRevenue) == 100.0);
  CHECK_THROWS_AS(c.book(1.0, "firm", CostCategory::kPurchase, -1.0), ValidationError);
  for (CostCategory cat : kAllCostCategories)
    CHECK(parse_cost_category(to_string(cat)) == cat);
}

TEST_CASE("case-study report") {
  const auto r = run_scenario(case_study_profile()).report;
  CHECK(r.period == 48.0);
  std::size_t census = 0;
  for (const auto &[s, n] : r.census)
    census += n;
  CHECK(census == r.total_orders);
  // The two-day run ends with work in progress.
  CHECK(r.census.at(OrderStatus::kOpen) + r.census.at(OrderStatus::kInTransit) +
            r.census.at(OrderStatus::kFgi) + r.census.at(OrderStatus::kInProduction) >
        0);
  const ActorKpi *firm = r.actor("firm");
  REQUIRE(firm != nullptr);
  REQUIRE(firm->stock.count("fgi"));
  REQUIRE(firm->stock.count("raw"));
  const auto &fgi = firm->stock.at("fgi");
  if (fgi.sri && fgi.smi && *fgi.sri > 0.0)
    CHECK(*fgi.sri * *fgi.smi == doctest::Approx(48.0).epsilon(1e-9));
  if (firm->spi)
    CHECK(*firm->spi <= 1.0);
}

TEST_CASE("comparison rows") {
  const auto up = compare_values("fgi.sri", 12.34, 22.4, true);
  CHECK(*up.ratio == doctest::Approx(1.815).epsilon(1e-3));
  CHECK(up.finding == "improved");

  const auto raw_smi = compare_values("raw.smi", 68.8, 39.8, false);
  CHECK(*raw_smi.ratio == doctest::Approx(0.578).epsilon(1e-3));
  CHECK(raw_smi.finding == "improved");

  const auto missing = compare_values("x", std::nullopt, 3.0, true);
  CHECK(missing.finding == "absent");
  CHECK_FALSE(missing.delta.has_value());

  CHECK(compare_values("x", 2.0, 2.0, true).finding == "unchanged");
}

TEST_CASE("comparing a run with itself gives zero deltas") {
  const auto r = run_scenario(case_study_profile()).report;
  const auto c = compare_runs(r, r);
  REQUIRE_FALSE(c.rows.empty());
  for (const auto &row : c.rows)
    if (row.delta)
      CHECK(*row.delta == 0.0);
  for (const char *key : {"firm.fgi.sri", "firm.fgi.smi", "firm.raw.sri", "firm.raw.smi", "firm.spi"})
    CHECK(c.row(key) != nullptr);
}

TEST_CASE("comparing different topologies fails") {
  const auto a = run_scenario(case_study_profile()).report;
  Scenario s = case_study_profile();
  s.customers.pop_back();
  const auto b = run_scenario(s).report;
  try {
    compare_runs(a, b);
    FAIL("expected error");
  } catch (const ComparisonError &e) {
    CHECK(e.code() == "comparison_mismatch");
  }
}
