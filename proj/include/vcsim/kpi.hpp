#pragma once

#include "vcsim/artifacts.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vcsim {

struct DeliveryStats {
  /// (order id, delivered_at - created_at), in order-id order.
  std::vector<std::pair<OrderId, Hours>> series;
  std::optional<double> mean;
  std::optional<double> max;
};

/// Delivery times of every delivered order the actor provided. Orders that
/// were delivered and later returned still count. An empty series has no mean.
DeliveryStats delivery_times(const Ledger &ledger, const ActorId &provider);

/// Stock rotation: sales / mean stock value. Absent when the mean stock value
/// is not positive.
std::optional<double> sri(double sales_profit, double mean_stock_value);
/// Stock mean time: period / SRI. Absent when SRI is absent or zero.
std::optional<double> smi(double period, std::optional<double> sri_value);
/// Sales profitability: (sales - costs) / sales. Absent when sales are zero.
std::optional<double> spi(double sales_profit, double costs);

std::map<OrderStatus, std::size_t> order_census(const Ledger &ledger);

struct StockKpi {
  std::optional<double> mean_stock_value;
  std::optional<double> sri;
  std::optional<double> smi;
};

struct ActorKpi {
  std::string actor;
  DeliveryStats delivery;
  std::size_t orders_received = 0;
  std::size_t orders_delivered = 0;
  double sales_revenue = 0.0;
  std::map<CostCategory, double> costs; // non-revenue categories
  double total_costs = 0.0;
  /// "fgi" (finished goods) and/or "raw".
  std::map<std::string, StockKpi> stock;
  std::optional<double> spi;
};

struct KpiReport {
  std::string scenario_digest;
  std::uint64_t seed = 0;
  Hours period = 0.0;
  RunMode mode = RunMode::kScor;
  Topology topology;
  std::vector<ActorKpi> actors;
  std::map<OrderStatus, std::size_t> census;
  std::size_t total_orders = 0;
  std::size_t support_tickets = 0;
  std::map<int, Quantity> produced;
  std::vector<VotePoint> satisfaction;

  const ActorKpi *actor(const std::string &id) const;
};

/// Reduces run artifacts to the report. Mean stock values are time-weighted
/// integrals over [0, period].
KpiReport build_report(const RunArtifacts &run);

struct ComparisonRow {
  std::string key;
  std::optional<double> scor;
  std::optional<double> vcor;
  std::optional<double> delta; // vcor - scor
  std::optional<double> ratio; // vcor / scor
  std::string finding;         // "improved", "worse", "increased", ... or empty
};

struct ComparisonReport {
  std::string scor_digest;
  std::string vcor_digest;
  std::uint64_t scor_seed = 0;
  std::uint64_t vcor_seed = 0;
  std::vector<ComparisonRow> rows;

  const ComparisonRow *row(const std::string &key) const;
};

/// One row: delta and ratio when both sides are present.
ComparisonRow compare_values(std::string key, std::optional<double> scor,
                             std::optional<double> vcor, bool higher_is_better);

/// Side-by-side KPIs. Throws ComparisonError when the topologies differ.
ComparisonReport compare_runs(const KpiReport &scor, const KpiReport &vcor);

} // namespace vcsim
