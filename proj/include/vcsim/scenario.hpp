#pragma once

#include "vcsim/ledger.hpp"
#include "vcsim/satisfaction.hpp"
#include "vcsim/types.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vcsim {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr Hours kHoursPerMonth = 720.0;

/// Monthly boxes per (customer table index, product). A product row that is
/// absent or all dashes means zero demand.
struct DemandTable {
  std::map<std::pair<int, int>, std::array<double, 12>> rows;

  /// Boxes for `month` in 1..12; zero when the row is absent.
  double boxes(int customer, int product, int month) const;
  bool has_row(int customer, int product) const { return rows.count({customer, product}) > 0; }

  bool operator==(const DemandTable &) const = default;
};

/// The case-study demand of two customers over twelve months.
DemandTable builtin_demand_table();

/// Parses delimited text: header `customer,product,M1,...,M12`, one row per
/// (customer, product), `-` for no demand. Throws ConfigError("parse_error")
/// with a line number.
DemandTable parse_demand_table(const std::string &text);
DemandTable load_demand_table(const std::filesystem::path &path);
std::string serialize_demand_table(const DemandTable &table);

struct LeadTime {
  enum class Kind { kFixed, kUniform, kExponential } kind = Kind::kFixed;
  double a = 0.0; // fixed value, uniform lower bound, or exponential mean
  double b = 0.0; // uniform upper bound

  static LeadTime fixed(double h) { return {Kind::kFixed, h, h}; }
  static LeadTime uniform(double lo, double hi) { return {Kind::kUniform, lo, hi}; }
  static LeadTime exponential(double mean) { return {Kind::kExponential, mean, 0.0}; }
  double mean() const { return kind == Kind::kUniform ? 0.5 * (a + b) : a; }
  bool operator==(const LeadTime &) const = default;
};

enum class ProductionMode { kMakeToStock, kMakeToOrder };

struct BomLine {
  int raw = 0;
  double kg_per_box = 1.0;
  bool operator==(const BomLine &) const = default;
};

struct ProductSpec {
  int id = 0;
  std::string name;
  std::vector<BomLine> bom;
  Hours unit_production_time = 0.0;
  double production_cost = 0.0; // per box, booked at the firm
  double wholesale_price = 0.0; // firm -> retailer and contract clients
  double retail_price = 0.0;    // retailer -> customers
  bool operator==(const ProductSpec &) const = default;
};

struct RawSpec {
  int id = 0;
  double price_per_kg = 0.0;          // supplier -> firm
  double upstream_price_per_kg = 0.0; // upstream -> supplier
  std::vector<std::string> producers; // suppliers able to make it
  std::string source;                 // designated supplier the firm orders from
  bool operator==(const RawSpec &) const = default;
};

struct StockLine {
  int item = 0;
  Quantity initial = 0.0;
  std::optional<StockPolicy> policy;
  bool operator==(const StockLine &o) const {
    return item == o.item && initial == o.initial && policy.has_value() == o.policy.has_value() &&
           (!policy || (policy->reorder_point == o.policy->reorder_point &&
                        policy->order_up_to == o.policy->order_up_to));
  }
};

struct SupportConfig {
  double defective_probability = 0.05; // p_def, per retailer -> customer lot
  double education_decay = 0.9;        // p_def multiplier per resolved ticket
  double max_defective_fraction = 0.25;
  Hours handling_time = 2.0;
  double cost_per_ticket = 5.0;
  bool operator==(const SupportConfig &) const = default;
};

struct RetailerConfig {
  Hours deliver_interval = 2.0;
  Hours source_interval = 2.5;
  LeadTime lead_time = LeadTime::uniform(0.5, 2.5);
  std::map<int, ProductionMode> mode; // make-to-order products are ordered back-to-back
  std::vector<StockLine> stock;
  double holding_cost = 0.002; // per box-hour
  SupportConfig support;
  bool operator==(const RetailerConfig &) const = default;
};

struct MarketConfig {
  Hours interval = 6.0;
  double threshold = 6.0;
  Hours rd_delay = 8.0;
  double technology_cost = 500.0;
  std::optional<Hours> new_unit_production_time;
  std::vector<BomLine> new_bom; // empty keeps the current recipe
  bool operator==(const MarketConfig &) const = default;
};

struct Prospect {
  std::string id;
  int priority = 0;
  int product = 1;
  double boxes_per_day = 0.0;
  Quantity lot_size = 1.0;
  bool operator==(const Prospect &) const = default;
};

struct SellConfig {
  Hours interval = 12.0;
  double capacity_cap = 0.5;
  std::vector<Prospect> prospects;
  bool operator==(const SellConfig &) const = default;
};

struct FirmConfig {
  Hours deliver_interval = 2.5;
  Hours source_interval = 3.0;
  Hours make_interval = 3.0;
  double daily_capacity = 185.0; // boxes/day across products
  LeadTime lead_time = LeadTime::uniform(1.0, 4.0);
  std::map<int, ProductionMode> mode;
  std::vector<StockLine> fgi;
  std::vector<StockLine> raw;
  double fgi_holding_cost = 0.002; // per box-hour
  double raw_holding_cost = 0.001; // per kg-hour
  MarketConfig market;
  SellConfig sell;
  bool operator==(const FirmConfig &) const = default;
};

struct SupplierConfig {
  std::string id;
  Hours deliver_interval = 4.0;
  Hours source_interval = 4.0;
  LeadTime lead_time = LeadTime::uniform(2.0, 6.0);
  std::vector<StockLine> stock; // raw id -> kg
  double holding_cost = 0.001;
  bool operator==(const SupplierConfig &) const = default;
};

struct CustomerConfig {
  std::string id;
  int table_index = 1;
  std::vector<int> products;
  Quantity lot_size = 0.0; // required; no default in the model
  bool operator==(const CustomerConfig &) const = default;
};

struct SatisfactionConfig {
  SatisfactionParams params;
  double initial_vote = 8.0;
  bool operator==(const SatisfactionConfig &o) const {
    return initial_vote == o.initial_vote && params.alpha == o.params.alpha &&
           params.xi == o.params.xi && params.beta == o.params.beta &&
           params.delta == o.params.delta && params.phi == o.params.phi &&
           params.eta == o.params.eta;
  }
};

struct PriceChange {
  Hours at = 0.0;
  int product = 0;
  double retail_price = 0.0;
  bool operator==(const PriceChange &) const = default;
};

enum class RunMode { kScor, kVcor };
enum class ArrivalMode { kDeterministic, kMemoryless };

struct VcorToggles {
  bool support = false;
  bool market = false;
  bool research = false;
  bool develop = false;
  bool sell = false;

  bool any() const { return support || market || research || develop || sell; }
  static VcorToggles all() { return {true, true, true, true, true}; }
  bool operator==(const VcorToggles &) const = default;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "case-study";
  RunMode mode = RunMode::kScor;
  VcorToggles vcor;
  Hours horizon = 48.0;
  std::uint64_t seed = 1;
  int start_month = 1;
  ArrivalMode arrivals = ArrivalMode::kDeterministic;
  /// "builtin" or a path, relative to the scenario file, of a demand table.
  std::string demand_source = "builtin";
  DemandTable demand;

  std::vector<ProductSpec> products;
  std::vector<RawSpec> raws;
  RetailerConfig retailer;
  FirmConfig firm;
  std::vector<SupplierConfig> suppliers;
  LeadTime upstream_lead_time = LeadTime::fixed(24.0);
  std::vector<CustomerConfig> customers;
  SatisfactionConfig satisfaction;
  std::vector<PriceChange> price_changes;

  const ProductSpec &product(int id) const;
  const RawSpec &raw(int id) const;
  bool operator==(const Scenario &) const = default;
};

/// Built-in case-study profile: three suppliers, one firm, one retailer, two
/// customers, with the published inventory levels, frequencies and capacity.
/// Costs, prices, lead times and weights are profile choices, not published.
Scenario case_study_profile(RunMode mode = RunMode::kScor);

/// Full semantic validation. Each class of problem has its own ConfigError
/// code (reorder_point_not_below_order_up_to, forgetting_factor_out_of_range,
/// unknown_raw, mode_consistency, ...).
void validate(const Scenario &scenario);

/// Applies a mode change the way the CLI `--mode` flag does: scor clears every
/// VCOR toggle, vcor sets all of them.
void force_mode(Scenario &scenario, RunMode mode);

/// Parses YAML text over the built-in profile (maps merge key by key, lists
/// and scalars replace) and validates the result. `base_dir` resolves a
/// relative demand table path.
Scenario parse_scenario(const std::string &yaml_text,
                        const std::filesystem::path &base_dir = std::filesystem::path("."));
Scenario load_scenario(const std::filesystem::path &path);
std::string serialize_scenario(const Scenario &scenario);

/// Stable digest of the serialized scenario plus its demand table.
std::string scenario_digest(const Scenario &scenario);

std::string_view to_string(RunMode mode);
std::string_view to_string(ProductionMode mode);

} // namespace vcsim
