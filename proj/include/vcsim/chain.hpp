#pragma once

#include "vcsim/artifacts.hpp"
#include "vcsim/engine.hpp"
#include "vcsim/kpi.hpp"
#include "vcsim/ledger.hpp"
#include "vcsim/satisfaction.hpp"
#include "vcsim/scenario.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vcsim {

// Event kinds. Activations of periodic processes share the "activate-" prefix.
namespace kind {
inline constexpr const char *kDeliver = "activate-deliver";
inline constexpr const char *kRetailerSource = "activate-S2.1";
inline constexpr const char *kSource = "activate-source";
inline constexpr const char *kMake = "activate-make";
inline constexpr const char *kMarket = "activate-M1";
inline constexpr const char *kSell = "activate-S2";
inline constexpr const char *kOrderArrival = "order-arrival";
inline constexpr const char *kShipmentArrival = "shipment-arrival";
inline constexpr const char *kProductionComplete = "production-complete";
inline constexpr const char *kCustomerDemand = "customer-demand";
inline constexpr const char *kContractDemand = "contract-demand";
inline constexpr const char *kArchitect = "market-M4";
inline constexpr const char *kIntroduceTechnology = "research-R8";
inline constexpr const char *kLaunch = "develop-D8";
inline constexpr const char *kManageIncident = "support-U2";
inline constexpr const char *kResolveProblem = "support-U3";
inline constexpr const char *kEducate = "support-U5";
inline constexpr const char *kMonitor = "support-U7";
inline constexpr const char *kPriceChange = "price-change";
} // namespace kind

/// True for event kinds that only VCOR processes (Support, Market, Research,
/// Develop, Sell) emit.
bool is_vcor_event_kind(std::string_view k);

inline const ActorId kRetailer{"retailer"};
inline const ActorId kFirm{"firm"};
inline const ActorId kUpstream{"upstream"};

// ---------------------------------------------------------------------------
// Process decisions that do not need the rest of the chain.

/// Pro-rates a daily capacity over activation intervals. Whole boxes are
/// granted; the fractional remainder carries to the next grant, unused whole
/// boxes do not.
class CapacityAccount {
public:
  explicit CapacityAccount(double boxes_per_day = 0.0) : per_hour_(boxes_per_day / 24.0) {}

  /// Whole boxes available for an activation covering `hours`.
  Quantity grant(Hours hours);
  double carry() const noexcept { return carry_; }

private:
  double per_hour_;
  double carry_ = 0.0;
};

/// Boxes the raw stock allows under a recipe (floor per raw, minimum over raws).
Quantity raw_limited_boxes(const std::vector<BomLine> &bom, const std::map<int, Quantity> &raw_on_hand);

/// Defective part of a lot: ceil(u * max_fraction * lot), at least 1, at most
/// the lot. `u` is a draw on (0, 1].
Quantity defective_quantity(Quantity lot, double u, double max_fraction);

/// One Educate Customer step: p_def * decay, floored at 0.
double educate(double defective_probability, double decay);

/// Product with the fewest cumulative boxes sold; ties go to the lowest id.
int least_sold_product(const std::map<int, Quantity> &sales);

/// Mean of the votes, or nothing for an empty set.
std::optional<double> mean_vote(const std::vector<double> &votes);

/// Analyze Market trigger: mean vote below threshold and no active project.
bool market_trigger(const std::vector<double> &votes, double threshold, bool project_active);

/// Qualify Target: greedy by descending priority (ties keep input order);
/// a prospect is accepted when committed + its rate stays within
/// cap * daily capacity, otherwise skipped.
std::vector<Prospect> qualify_targets(std::vector<Prospect> pool, double capacity_cap,
                                      double daily_capacity, double already_committed);

/// Contract order times: start + k * spacing for k >= 1 while <= end, where
/// spacing = 24 * lot / (boxes per day).
std::vector<Hours> contract_order_times(double boxes_per_day, Quantity lot, Hours start, Hours end);

/// Deterministic spacing between lots so a month (720 h) carries the table's
/// boxes. Absent when the month has no demand.
std::optional<Hours> demand_interarrival(double monthly_boxes, Quantity lot);

/// Demand-table month (1..12) active at time t.
int active_month(int start_month, Hours t);

// ---------------------------------------------------------------------------

struct RunResult {
  RunArtifacts artifacts;
  KpiReport report;
};

/// One deterministic run of a scenario. The constructor validates the
/// scenario, builds every actor, and schedules periodic activations and first
/// demand arrivals. Process operations are public so they can be exercised
/// one at a time; `run()` drives them all through the engine.
class Simulation {
public:
  explicit Simulation(Scenario scenario);

  /// Runs to the horizon, books holding costs, checks run invariants and
  /// reduces to KPIs. Throws InvariantViolation naming a broken invariant.
  RunResult run();

  /// Fires events up to `t` (inclusive) and returns them.
  EventTrace run_until(Hours t);

  void dispatch(const Event &event);

  // Retailer ---------------------------------------------------------------
  /// Schedule Product Deliveries: (s, S) reorder per make-to-stock product,
  /// at most one open replenishment per product.
  std::vector<OrderId> schedule_product_deliveries();

  // Firm -------------------------------------------------------------------
  /// Receive Order: reserve free FGI (partially if short), backlog the rest
  /// to production; make-to-order goes straight to production.
  void receive_order(OrderId order);
  /// Build Product: produce against the job queue within pro-rated capacity
  /// and raw stock. Returns boxes started per product.
  std::map<int, Quantity> build_product();
  /// Firm or supplier raw replenishment check.
  std::vector<OrderId> source_raws(const ActorId &actor);

  // Any provider -----------------------------------------------------------
  /// Ships every shippable order of `actor`; returns the shipped order ids.
  std::vector<OrderId> deliver(const ActorId &actor);

  // Support (retailer) -----------------------------------------------------
  std::int64_t manage_incident(OrderId order, Quantity defective);
  OrderId resolve_problem(std::int64_t ticket);
  void educate_customer();
  void monitor_experience(std::int64_t ticket);

  // Market / Research / Develop (firm) -------------------------------------
  bool analyze_market();
  int architect_solution();
  void introduce_technology();
  void launch_product(int product);

  // Sell (firm) ------------------------------------------------------------
  std::vector<Prospect> qualify_prospects();
  void finalize_contracts(const std::vector<Prospect> &accepted);

  // Customers --------------------------------------------------------------
  OrderId generate_customer_demand(const ActorId &customer, int product);

  // State access -------------------------------------------------------------
  const Scenario &scenario() const noexcept { return scenario_; }
  Engine &engine() noexcept { return engine_; }
  const Ledger &ledger() const noexcept { return ledger_; }
  Ledger &ledger() noexcept { return ledger_; }
  InventoryRecord &stock(const ActorId &owner, Item item);
  const CostLedger &costs() const noexcept { return costs_; }
  double defective_probability() const noexcept { return p_def_; }
  void set_defective_probability(double p) { p_def_ = p; }
  const VoteState &vote(const ActorId &customer, int product) const;
  bool innovation_flag(const ActorId &customer, int product) const;
  bool support_latch(const ActorId &customer) const;
  const std::map<int, Quantity> &customer_sales() const noexcept { return customer_sales_; }
  Quantity allocated_to(OrderId order) const;
  Quantity queued_production(int product) const;
  double committed_contracts() const noexcept { return committed_per_day_; }
  bool project_active() const noexcept { return project_.has_value(); }
  std::optional<int> project_product() const;
  const std::vector<BomLine> &bom(int product) const { return bom_.at(product); }
  Hours unit_production_time(int product) const { return unit_time_.at(product); }
  const std::vector<ProductionLot> &lots() const noexcept { return lots_; }
  const std::vector<VotePoint> &votes() const noexcept { return vote_series_; }

private:
  struct Job {
    std::int64_t id;
    int product;
    Quantity remaining;
    OrderId order; // 0: replenishes free FGI
  };
  struct Project {
    int product = -1;
    Hours started_at = 0.0;
  };
  struct Contract {
    Prospect prospect;
    Hours start = 0.0;
    long issued = 0;
  };
  struct History {
    double sum = 0.0;
    long count = 0;
    std::optional<double> mean() const {
      return count > 0 ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt;
    }
  };

  bool is_customer(const ActorId &a) const;
  bool is_supplier(const ActorId &a) const;
  bool stocks(const ActorId &owner, Item item) const;
  double price(const ActorId &provider, const ActorId &client, Item item) const;
  Hours draw_lead_time(const LeadTime &lead, const std::string &stream);
  const LeadTime &lead_time_of(const ActorId &provider) const;
  ProductionMode firm_mode(int product) const;
  ProductionMode retailer_mode(int product) const;
  OrderId place_order(const ActorId &client, const ActorId &provider, Item item, Quantity qty,
                      OrderOrigin origin, OrderId parent = 0, Hours hold_until = 0.0);
  void ship(const Order &order, const std::string &stream);
  void on_order_arrival(const Event &e);
  void on_shipment_arrival(OrderId id);
  void on_customer_delivery(const Order &order);
  void on_production_complete(std::int64_t lot_id);
  void on_contract_demand(std::size_t index);
  void schedule_next_demand(const ActorId &customer, int product);
  std::optional<Hours> next_demand_gap(const ActorId &customer, int product);
  void check_invariants() const;
  RunArtifacts collect(EventTrace trace) const;

  Scenario scenario_;
  std::map<ActorId, const CustomerConfig *> customers_;
  std::set<ActorId> prospects_;
  Engine engine_;
  EventTrace trace_;
  bool finished_ = false;
  RandomStreams rng_;
  Ledger ledger_;
  CostLedger costs_;
  std::map<std::pair<ActorId, Item>, InventoryRecord> stock_;
  std::map<std::pair<ActorId, Item>, OrderId> pending_replenishment_;

  // firm
  std::deque<Job> jobs_;
  std::int64_t next_job_ = 1;
  std::map<OrderId, Quantity> allocated_;
  CapacityAccount capacity_;
  std::vector<ProductionLot> lots_;
  std::map<int, Quantity> produced_;
  std::map<int, std::vector<BomLine>> bom_;
  std::map<int, Hours> unit_time_;
  std::optional<Project> project_;
  std::vector<Contract> contracts_;
  std::set<std::string> contracted_;
  double committed_per_day_ = 0.0;
  std::vector<std::pair<Hours, double>> committed_history_;

  // retailer support
  double p_def_ = 0.0;
  std::vector<std::pair<Hours, double>> p_def_history_;
  std::map<OrderId, Quantity> pending_defects_;
  std::set<OrderId> back_to_back_ready_;

  // customers
  std::map<std::pair<ActorId, int>, VoteState> votes_;
  std::map<std::pair<ActorId, int>, bool> innovation_;
  std::map<std::pair<ActorId, int>, double> last_price_;
  std::map<ActorId, bool> support_latch_;
  std::map<int, Quantity> customer_sales_;
  std::map<int, History> delay_history_;
  std::map<int, History> quality_history_;
  std::map<int, double> retail_price_;
  std::vector<VotePoint> vote_series_;
  std::vector<InnovationSpan> innovation_spans_;
};

/// Validates, runs and reduces one scenario.
RunResult run_scenario(const Scenario &scenario);

} // namespace vcsim
