#pragma once

#include "vcsim/engine.hpp"
#include "vcsim/ledger.hpp"
#include "vcsim/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace vcsim {

enum class CostCategory : std::uint8_t {
  kPurchase,
  kHolding,
  kProduction,
  kSupport,
  kTechnology,
  kSalesRevenue,
};

inline constexpr CostCategory kAllCostCategories[] = {
    CostCategory::kPurchase,   CostCategory::kHolding,    CostCategory::kProduction,
    CostCategory::kSupport,    CostCategory::kTechnology, CostCategory::kSalesRevenue,
};

std::string_view to_string(CostCategory c);
CostCategory parse_cost_category(std::string_view text);

struct CostEntry {
  Hours at = 0.0;
  ActorId actor;
  CostCategory category = CostCategory::kPurchase;
  double amount = 0.0;
};

/// Cost and revenue flow of a run. Revenue is an entry like any other so the
/// whole money flow is one auditable list.
class CostLedger {
public:
  /// Throws ValidationError for negative amounts.
  void book(Hours at, const ActorId &actor, CostCategory category, double amount);

  const std::vector<CostEntry> &entries() const noexcept { return entries_; }
  double total(const ActorId &actor, CostCategory category) const;
  /// Sum of every non-revenue category for the actor.
  double total_costs(const ActorId &actor) const;

private:
  std::vector<CostEntry> entries_;
};

/// Physical stock history of one (actor, item) position.
struct StockTrack {
  ActorId owner;
  Item item;
  double unit_value = 0.0;
  double unit_holding_cost = 0.0;
  Quantity initial = 0.0;
  Quantity final_level = 0.0;
  std::vector<StockSample> samples;
};

struct VotePoint {
  long k = 0;
  ActorId customer;
  int product = 0;
  Hours at = 0.0;
  double vote = 0.0;
  bool innovation = false;
};

/// Interval on which a customer's innovation flag for a product was set.
struct InnovationSpan {
  ActorId customer;
  int product = 0;
  Hours set_at = 0.0;
  std::optional<Hours> cleared_at;
};

struct ProductionLot {
  std::int64_t id = 0;
  int product = 0;
  Quantity quantity = 0.0;
  OrderId order = 0; // 0: replenishes free FGI
  Hours started_at = 0.0;
  Hours completes_at = 0.0;
  std::map<int, Quantity> raw_used;
  bool completed = false;
};

struct Topology {
  std::vector<std::string> actors;
  std::vector<int> products;
  std::vector<int> raws;
  bool operator==(const Topology &) const = default;
};

Topology topology_of(const Scenario &scenario);

/// Everything a finished run leaves behind, before KPI reduction.
struct RunArtifacts {
  std::string scenario_digest;
  std::uint64_t seed = 0;
  Hours horizon = 0.0;
  RunMode mode = RunMode::kScor;
  Topology topology;

  EventTrace trace;
  Ledger ledger;
  CostLedger costs;
  std::vector<StockTrack> stocks;
  std::vector<VotePoint> votes;
  std::vector<ProductionLot> lots;
  std::vector<InnovationSpan> innovation;
  /// (time, p_def) after every change, starting with the initial value.
  std::vector<std::pair<Hours, double>> defect_probability;
  /// (time, committed boxes/day) after every accepted contract.
  std::vector<std::pair<Hours, double>> committed_contracts;
  double contract_cap = 0.0; // boxes/day
  std::map<std::string, Quantity> initial_fgi; // "P<id>" -> boxes at the firm
};

} // namespace vcsim
