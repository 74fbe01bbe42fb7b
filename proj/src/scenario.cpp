#include "vcsim/scenario.hpp"

#include "vcsim/error.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace vcsim {

// ---------------------------------------------------------------------------
// Demand table

double DemandTable::boxes(int customer, int product, int month) const {
  auto it = rows.find({customer, product});
  if (it == rows.end() || month < 1 || month > 12)
    return 0.0;
  return it->second[static_cast<std::size_t>(month - 1)];
}

DemandTable builtin_demand_table() {
  DemandTable t;
  t.rows[{1, 1}] = {250, 260, 245, 247, 255, 257, 250, 251, 253, 255, 250, 241};
  t.rows[{1, 2}] = {550, 659, 580, 650, 770, 850, 890, 790, 700, 650, 590, 500};
  t.rows[{1, 3}] = {};
  t.rows[{2, 1}] = {300, 310, 312, 295, 311, 320, 301, 305, 313, 300, 295, 297};
  t.rows[{2, 2}] = {};
  t.rows[{2, 3}] = {70, 165, 140, 145, 250, 355, 397, 410, 380, 371, 280, 210};
  return t;
}

namespace {

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

[[noreturn]] void table_error(int line, const std::string &msg) {
  throw ConfigError("parse_error", "demand table line " + std::to_string(line) + ": " + msg);
}

double parse_cell(const std::string &cell, int line, const std::string &column) {
  if (cell == "-" || cell == "–")
    return 0.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() || v < 0.0)
      throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception &) {
    table_error(line, "column " + column + ": expected a non-negative number or '-', got '" +
                          cell + "'");
  }
}

} // namespace

DemandTable parse_demand_table(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  DemandTable table;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#')
      continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "customer" || fields[1] != "product")
        table_error(lineno, "header must start with 'customer,product'");
      for (int m = 1; m <= 12; ++m) {
        const std::string want = "M" + std::to_string(m);
        if (fields.size() < static_cast<std::size_t>(m + 2) || fields[m + 1] != want)
          table_error(lineno, "missing month column " + want);
      }
      if (fields.size() != 14)
        table_error(lineno, "unexpected columns after M12");
      have_header = true;
      continue;
    }
    if (fields.size() != 14)
      table_error(lineno, "expected 14 fields, got " + std::to_string(fields.size()));
    int customer = 0, product = 0;
    try {
      customer = std::stoi(fields[0]);
      product = std::stoi(fields[1]);
    } catch (const std::exception &) {
      table_error(lineno, "customer and product must be integers");
    }
    std::array<double, 12> months{};
    for (int m = 0; m < 12; ++m)
      months[static_cast<std::size_t>(m)] =
          parse_cell(fields[static_cast<std::size_t>(m + 2)], lineno, "M" + std::to_string(m + 1));
    if (!table.rows.emplace(std::make_pair(customer, product), months).second)
      table_error(lineno, "duplicate row for customer " + std::to_string(customer) +
                              ", product " + std::to_string(product));
  }
  if (!have_header)
    table_error(lineno, "missing header row");
  return table;
}

DemandTable load_demand_table(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("io_error", "cannot read demand table " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_demand_table(ss.str());
}

std::string serialize_demand_table(const DemandTable &table) {
  std::ostringstream out;
  out << "customer,product";
  for (int m = 1; m <= 12; ++m)
    out << ",M" << m;
  out << '\n';
  for (const auto &[key, months] : table.rows) {
    out << key.first << ',' << key.second;
    const bool dash = std::all_of(months.begin(), months.end(), [](double v) { return v == 0.0; });
    for (double v : months)
      out << ',' << (dash ? std::string("-") : format_number(v));
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Built-in profile

const ProductSpec &Scenario::product(int id) const {
  for (const auto &p : products)
    if (p.id == id)
      return p;
  throw ConfigError("unknown_product", "unknown product " + std::to_string(id));
}

const RawSpec &Scenario::raw(int id) const {
  for (const auto &r : raws)
    if (r.id == id)
      return r;
  throw ConfigError("unknown_raw", "unknown raw material " + std::to_string(id));
}

Scenario case_study_profile(RunMode mode) {
  Scenario s;
  s.name = mode == RunMode::kScor ? "case-study-scor" : "case-study-vcor";
  s.mode = mode;
  s.vcor = mode == RunMode::kVcor ? VcorToggles::all() : VcorToggles{};
  s.horizon = 48.0;
  s.seed = 20090101;
  s.demand = builtin_demand_table();

  const std::vector<BomLine> recipe{{1, 1.0}, {2, 1.0}, {3, 1.0}};
  s.products = {
      {1, "Product 1", recipe, 0.0, 3.0, 10.0, 14.0},
      {2, "Product 2", recipe, 0.0, 3.5, 12.0, 16.0},
      {3, "Product 3", recipe, 0.0, 4.0, 14.0, 19.0},
  };
  s.raws = {
      {1, 1.0, 0.6, {"supplier1", "supplier2"}, "supplier2"},
      {2, 1.0, 0.6, {"supplier2"}, "supplier2"},
      {3, 1.0, 0.6, {"supplier3"}, "supplier3"},
  };

  s.retailer.mode = {{1, ProductionMode::kMakeToStock},
                     {2, ProductionMode::kMakeToStock},
                     {3, ProductionMode::kMakeToOrder}};
  s.retailer.stock = {
      {1, 0.0, StockPolicy{15.0, 40.0}},
      {2, 0.0, StockPolicy{15.0, 40.0}},
      {3, 0.0, std::nullopt},
  };

  s.firm.mode = {{1, ProductionMode::kMakeToStock},
                 {2, ProductionMode::kMakeToStock},
                 {3, ProductionMode::kMakeToStock}};
  s.firm.fgi = {
      {1, 500.0, StockPolicy{450.0, 500.0}},
      {2, 500.0, StockPolicy{450.0, 500.0}},
      {3, 300.0, StockPolicy{270.0, 300.0}},
  };
  s.firm.raw = {
      {1, 200.0, StockPolicy{100.0, 200.0}},
      {2, 200.0, StockPolicy{100.0, 200.0}},
      {3, 200.0, StockPolicy{100.0, 200.0}},
  };
  s.firm.sell.prospects = {
      {"prospect1", 3, 1, 46.0, 23.0},
      {"prospect2", 2, 2, 40.0, 20.0},
      {"prospect3", 1, 1, 30.0, 15.0},
  };

  SupplierConfig s1;
  s1.id = "supplier1";
  s1.stock = {{1, 500.0, StockPolicy{100.0, 500.0}}};
  SupplierConfig s2;
  s2.id = "supplier2";
  s2.stock = {{1, 500.0, StockPolicy{100.0, 500.0}}, {2, 500.0, StockPolicy{100.0, 500.0}}};
  SupplierConfig s3;
  s3.id = "supplier3";
  s3.stock = {{3, 500.0, StockPolicy{100.0, 500.0}}};
  s.suppliers = {s1, s2, s3};

  s.customers = {
      {"customer1", 1, {1, 2}, 2.0},
      {"customer2", 2, {1, 3}, 2.0},
  };
  return s;
}

std::string_view to_string(RunMode mode) { return mode == RunMode::kScor ? "scor" : "vcor"; }

std::string_view to_string(ProductionMode mode) {
  return mode == ProductionMode::kMakeToStock ? "make-to-stock" : "make-to-order";
}

void force_mode(Scenario &scenario, RunMode mode) {
  scenario.mode = mode;
  scenario.vcor = mode == RunMode::kVcor ? VcorToggles::all() : VcorToggles{};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

[[noreturn]] void invalid(const std::string &code, const std::string &msg) {
  throw ConfigError(code, msg);
}

void check_interval(Hours h, const std::string &what) {
  if (!(h > 0.0))
    invalid("non_positive_interval", what + " must be positive, got " + format_number(h));
}

void check_lead(const LeadTime &l, const std::string &what) {
  const bool ok = (l.kind == LeadTime::Kind::kFixed && l.a >= 0.0) ||
                  (l.kind == LeadTime::Kind::kUniform && l.a >= 0.0 && l.a <= l.b) ||
                  (l.kind == LeadTime::Kind::kExponential && l.a > 0.0);
  if (!ok)
    invalid("invalid_lead_time", what + " has invalid parameters");
}

void check_stock(const std::vector<StockLine> &lines, const std::set<int> &known, bool raw,
                 const std::string &owner) {
  std::set<int> seen;
  for (const auto &l : lines) {
    const std::string what = owner + " stock of " + (raw ? "R" : "P") + std::to_string(l.item);
    if (!known.count(l.item))
      invalid(raw ? "unknown_raw" : "unknown_product", what + ": unknown item");
    if (!seen.insert(l.item).second)
      invalid("duplicate_stock_line", what + " listed twice");
    if (l.initial < 0.0)
      invalid("negative_stock", what + ": negative initial level");
    if (l.policy && !(l.policy->reorder_point < l.policy->order_up_to))
      invalid("reorder_point_not_below_order_up_to", what + ": need s < S");
  }
}

} // namespace

void validate(const Scenario &s) {
  if (s.schema_version != kScenarioSchemaVersion)
    invalid("unsupported_schema", "unsupported scenario schema_version " +
                                      std::to_string(s.schema_version));
  if (!(s.horizon >= 0.0))
    invalid("negative_horizon", "horizon must be non-negative");
  if (s.start_month < 1 || s.start_month > 12)
    invalid("invalid_month", "start_month must be in 1..12");
  if (s.mode == RunMode::kScor && s.vcor.any())
    invalid("mode_consistency", "mode scor does not allow VCOR processes to be enabled");

  std::set<int> product_ids, raw_ids;
  for (const auto &p : s.products) {
    if (!product_ids.insert(p.id).second)
      invalid("duplicate_product", "product " + std::to_string(p.id) + " defined twice");
  }
  for (const auto &r : s.raws) {
    if (!raw_ids.insert(r.id).second)
      invalid("duplicate_raw", "raw " + std::to_string(r.id) + " defined twice");
  }
  if (product_ids.empty())
    invalid("no_products", "scenario defines no products");

  auto check_bom = [&](const std::vector<BomLine> &bom, const std::string &what) {
    for (const auto &b : bom) {
      if (!raw_ids.count(b.raw))
        invalid("unknown_raw", what + " references unknown raw " + std::to_string(b.raw));
      if (!(b.kg_per_box > 0.0))
        invalid("non_positive_bom", what + ": kg per box must be positive");
    }
  };
  for (const auto &p : s.products) {
    check_bom(p.bom, "bill of materials of product " + std::to_string(p.id));
    if (p.unit_production_time < 0.0)
      invalid("negative_production_time", "product " + std::to_string(p.id));
    if (p.production_cost < 0.0 || p.wholesale_price < 0.0 || p.retail_price < 0.0)
      invalid("negative_price", "product " + std::to_string(p.id) + " has a negative price");
  }

  std::set<std::string> actors{"retailer", "firm", "upstream"};
  std::set<std::string> supplier_ids;
  for (const auto &sup : s.suppliers) {
    if (sup.id.empty() || !actors.insert(sup.id).second)
      invalid("duplicate_actor", "supplier id '" + sup.id + "' is empty or reused");
    supplier_ids.insert(sup.id);
    check_interval(sup.deliver_interval, sup.id + " deliver interval");
    check_interval(sup.source_interval, sup.id + " source interval");
    check_lead(sup.lead_time, sup.id + " lead time");
    check_stock(sup.stock, raw_ids, true, sup.id);
  }
  for (const auto &r : s.raws) {
    const std::string what = "raw " + std::to_string(r.id);
    if (r.producers.empty())
      invalid("raw_not_covered", what + " has no producing supplier");
    for (const auto &p : r.producers)
      if (!supplier_ids.count(p))
        invalid("unknown_supplier", what + " lists unknown supplier '" + p + "'");
    if (std::find(r.producers.begin(), r.producers.end(), r.source) == r.producers.end())
      invalid("raw_not_covered", what + ": designated source '" + r.source +
                                     "' is not among its producers");
    const auto &sup = *std::find_if(s.suppliers.begin(), s.suppliers.end(),
                                    [&](const SupplierConfig &c) { return c.id == r.source; });
    if (std::none_of(sup.stock.begin(), sup.stock.end(),
                     [&](const StockLine &l) { return l.item == r.id; }))
      invalid("raw_not_covered", what + ": supplier '" + r.source + "' keeps no stock of it");
    if (r.price_per_kg < 0.0 || r.upstream_price_per_kg < 0.0)
      invalid("negative_price", what + " has a negative price");
  }

  // retailer
  check_interval(s.retailer.deliver_interval, "retailer deliver interval");
  check_interval(s.retailer.source_interval, "retailer source interval");
  check_lead(s.retailer.lead_time, "retailer lead time");
  check_stock(s.retailer.stock, product_ids, false, "retailer");
  for (const auto &[p, m] : s.retailer.mode)
    if (!product_ids.count(p))
      invalid("unknown_product", "retailer mode for unknown product " + std::to_string(p));
  for (int p : product_ids) {
    auto mit = s.retailer.mode.find(p);
    const bool mto = mit != s.retailer.mode.end() && mit->second == ProductionMode::kMakeToOrder;
    auto line = std::find_if(s.retailer.stock.begin(), s.retailer.stock.end(),
                             [&](const StockLine &l) { return l.item == p; });
    if (!mto && (line == s.retailer.stock.end() || !line->policy))
      invalid("missing_stock_policy",
              "retailer make-to-stock product " + std::to_string(p) + " needs an (s, S) policy");
  }
  const auto &sup = s.retailer.support;
  if (!(sup.defective_probability >= 0.0 && sup.defective_probability <= 1.0))
    invalid("probability_out_of_range", "defective probability must lie in [0, 1]");
  if (!(sup.education_decay > 0.0 && sup.education_decay <= 1.0))
    invalid("decay_out_of_range", "education decay must lie in (0, 1]");
  if (!(sup.max_defective_fraction > 0.0 && sup.max_defective_fraction <= 1.0))
    invalid("fraction_out_of_range", "max defective fraction must lie in (0, 1]");
  if (sup.handling_time < 0.0 || sup.cost_per_ticket < 0.0)
    invalid("negative_support_parameter", "support handling time and cost must be >= 0");

  // firm
  const auto &f = s.firm;
  check_interval(f.deliver_interval, "firm deliver interval");
  check_interval(f.source_interval, "firm source interval");
  check_interval(f.make_interval, "firm make interval");
  check_interval(f.market.interval, "firm market interval");
  check_interval(f.sell.interval, "firm sell interval");
  check_lead(f.lead_time, "firm lead time");
  if (!(f.daily_capacity > 0.0))
    invalid("capacity_non_positive", "firm daily production capacity must be positive");
  check_stock(f.fgi, product_ids, false, "firm");
  check_stock(f.raw, raw_ids, true, "firm");
  for (int p : product_ids)
    if (std::none_of(f.fgi.begin(), f.fgi.end(), [&](const StockLine &l) { return l.item == p; }))
      invalid("missing_stock_line", "firm keeps no FGI line for product " + std::to_string(p));
  for (int r : raw_ids)
    if (std::none_of(f.raw.begin(), f.raw.end(), [&](const StockLine &l) { return l.item == r; }))
      invalid("missing_stock_line", "firm keeps no raw line for raw " + std::to_string(r));
  for (const auto &[p, m] : f.mode)
    if (!product_ids.count(p))
      invalid("unknown_product", "firm mode for unknown product " + std::to_string(p));
  if (!(f.market.threshold >= kVoteMin && f.market.threshold <= kVoteMax))
    invalid("threshold_out_of_range", "market threshold must lie on the 0-10 vote scale");
  if (f.market.rd_delay < 0.0 || f.market.technology_cost < 0.0)
    invalid("negative_market_parameter", "R&D delay and technology cost must be >= 0");
  if (f.market.new_unit_production_time && *f.market.new_unit_production_time < 0.0)
    invalid("negative_production_time", "new unit production time must be >= 0");
  check_bom(f.market.new_bom, "replacement bill of materials");
  if (!(f.sell.capacity_cap >= 0.0 && f.sell.capacity_cap <= 1.0))
    invalid("cap_out_of_range", "sell capacity cap must lie in [0, 1]");
  for (const auto &p : f.sell.prospects) {
    if (p.id.empty() || !actors.insert(p.id).second)
      invalid("duplicate_actor", "prospect id '" + p.id + "' is empty or reused");
    if (!product_ids.count(p.product))
      invalid("unknown_product", "prospect " + p.id + " wants unknown product");
    if (!(p.boxes_per_day > 0.0) || !(p.lot_size > 0.0))
      invalid("non_positive_rate", "prospect " + p.id + " needs positive rate and lot size");
  }

  check_lead(s.upstream_lead_time, "upstream lead time");

  for (const auto &c : s.customers) {
    if (c.id.empty() || !actors.insert(c.id).second)
      invalid("duplicate_actor", "customer id '" + c.id + "' is empty or reused");
    if (!(c.lot_size > 0.0))
      invalid("missing_lot_size", "customer " + c.id + " needs a positive lot_size");
    for (int p : c.products) {
      if (!product_ids.count(p))
        invalid("unknown_product", "customer " + c.id + " buys unknown product " +
                                       std::to_string(p));
      if (!s.demand.has_row(c.table_index, p))
        invalid("missing_demand_row", "demand table has no row for customer " +
                                          std::to_string(c.table_index) + ", product " +
                                          std::to_string(p));
    }
  }

  validate(s.satisfaction.params);
  if (!(s.satisfaction.initial_vote >= kVoteMin && s.satisfaction.initial_vote <= kVoteMax))
    invalid("vote_out_of_range", "initial vote must lie in [0, 10]");
  for (const auto &pc : s.price_changes) {
    if (!product_ids.count(pc.product))
      invalid("unknown_product", "price change for unknown product");
    if (!(pc.retail_price > 0.0) || pc.at < 0.0)
      invalid("invalid_price_change", "price changes need a positive price and time >= 0");
  }
}

// ---------------------------------------------------------------------------
// YAML encoding

namespace {

YAML::Node num(double v) { return YAML::Node(format_number(v)); }

YAML::Node encode_lead(const LeadTime &l) {
  YAML::Node n;
  switch (l.kind) {
  case LeadTime::Kind::kFixed:
    n["kind"] = "fixed";
    n["hours"] = num(l.a);
    break;
  case LeadTime::Kind::kUniform:
    n["kind"] = "uniform";
    n["min"] = num(l.a);
    n["max"] = num(l.b);
    break;
  case LeadTime::Kind::kExponential:
    n["kind"] = "exponential";
    n["mean"] = num(l.a);
    break;
  }
  return n;
}

YAML::Node encode_stock(const std::vector<StockLine> &lines) {
  YAML::Node seq(YAML::NodeType::Sequence);
  for (const auto &l : lines) {
    YAML::Node n;
    n["item"] = l.item;
    n["initial"] = num(l.initial);
    if (l.policy) {
      n["reorder_point"] = num(l.policy->reorder_point);
      n["order_up_to"] = num(l.policy->order_up_to);
    }
    seq.push_back(n);
  }
  return seq;
}

YAML::Node encode_bom(const std::vector<BomLine> &bom) {
  YAML::Node seq(YAML::NodeType::Sequence);
  for (const auto &b : bom) {
    YAML::Node n;
    n["raw"] = b.raw;
    n["kg_per_box"] = num(b.kg_per_box);
    seq.push_back(n);
  }
  return seq;
}

YAML::Node encode_modes(const std::map<int, ProductionMode> &modes) {
  YAML::Node n(YAML::NodeType::Map);
  for (const auto &[p, m] : modes)
    n[std::to_string(p)] = std::string(to_string(m));
  return n;
}

YAML::Node encode(const Scenario &s) {
  YAML::Node root;
  root["schema_version"] = s.schema_version;
  root["name"] = s.name;
  root["mode"] = std::string(to_string(s.mode));
  root["vcor"]["support"] = s.vcor.support;
  root["vcor"]["market"] = s.vcor.market;
  root["vcor"]["research"] = s.vcor.research;
  root["vcor"]["develop"] = s.vcor.develop;
  root["vcor"]["sell"] = s.vcor.sell;
  root["horizon_hours"] = num(s.horizon);
  root["seed"] = s.seed;
  root["start_month"] = s.start_month;
  root["arrivals"] = s.arrivals == ArrivalMode::kDeterministic ? "deterministic" : "memoryless";
  if (s.demand_source == "builtin") {
    root["demand_table"] = "builtin";
  } else {
    root["demand_table"] = "inline";
    YAML::Node rows(YAML::NodeType::Sequence);
    for (const auto &[key, months] : s.demand.rows) {
      YAML::Node r;
      r["customer"] = key.first;
      r["product"] = key.second;
      YAML::Node ms(YAML::NodeType::Sequence);
      for (double v : months)
        ms.push_back(num(v));
      ms.SetStyle(YAML::EmitterStyle::Flow);
      r["months"] = ms;
      rows.push_back(r);
    }
    root["demand"] = rows;
  }

  YAML::Node products(YAML::NodeType::Sequence);
  for (const auto &p : s.products) {
    YAML::Node n;
    n["id"] = p.id;
    n["name"] = p.name;
    n["bom"] = encode_bom(p.bom);
    n["unit_production_time"] = num(p.unit_production_time);
    n["production_cost"] = num(p.production_cost);
    n["wholesale_price"] = num(p.wholesale_price);
    n["retail_price"] = num(p.retail_price);
    products.push_back(n);
  }
  root["products"] = products;

  YAML::Node raws(YAML::NodeType::Sequence);
  for (const auto &r : s.raws) {
    YAML::Node n;
    n["id"] = r.id;
    n["price_per_kg"] = num(r.price_per_kg);
    n["upstream_price_per_kg"] = num(r.upstream_price_per_kg);
    YAML::Node producers(YAML::NodeType::Sequence);
    for (const auto &p : r.producers)
      producers.push_back(p);
    producers.SetStyle(YAML::EmitterStyle::Flow);
    n["producers"] = producers;
    n["source"] = r.source;
    raws.push_back(n);
  }
  root["raws"] = raws;

  YAML::Node ret;
  ret["deliver_interval"] = num(s.retailer.deliver_interval);
  ret["source_interval"] = num(s.retailer.source_interval);
  ret["lead_time"] = encode_lead(s.retailer.lead_time);
  ret["mode"] = encode_modes(s.retailer.mode);
  ret["stock"] = encode_stock(s.retailer.stock);
  ret["holding_cost"] = num(s.retailer.holding_cost);
  const auto &sup = s.retailer.support;
  ret["support"]["defective_probability"] = num(sup.defective_probability);
  ret["support"]["education_decay"] = num(sup.education_decay);
  ret["support"]["max_defective_fraction"] = num(sup.max_defective_fraction);
  ret["support"]["handling_time"] = num(sup.handling_time);
  ret["support"]["cost_per_ticket"] = num(sup.cost_per_ticket);
  root["retailer"] = ret;

  const auto &f = s.firm;
  YAML::Node firm;
  firm["deliver_interval"] = num(f.deliver_interval);
  firm["source_interval"] = num(f.source_interval);
  firm["make_interval"] = num(f.make_interval);
  firm["daily_capacity"] = num(f.daily_capacity);
  firm["lead_time"] = encode_lead(f.lead_time);
  firm["mode"] = encode_modes(f.mode);
  firm["fgi"] = encode_stock(f.fgi);
  firm["raw"] = encode_stock(f.raw);
  firm["fgi_holding_cost"] = num(f.fgi_holding_cost);
  firm["raw_holding_cost"] = num(f.raw_holding_cost);
  YAML::Node market;
  market["interval"] = num(f.market.interval);
  market["threshold"] = num(f.market.threshold);
  market["rd_delay"] = num(f.market.rd_delay);
  market["technology_cost"] = num(f.market.technology_cost);
  if (f.market.new_unit_production_time)
    market["new_unit_production_time"] = num(*f.market.new_unit_production_time);
  market["new_bom"] = encode_bom(f.market.new_bom);
  firm["market"] = market;
  YAML::Node sell;
  sell["interval"] = num(f.sell.interval);
  sell["capacity_cap"] = num(f.sell.capacity_cap);
  YAML::Node prospects(YAML::NodeType::Sequence);
  for (const auto &p : f.sell.prospects) {
    YAML::Node n;
    n["id"] = p.id;
    n["priority"] = p.priority;
    n["product"] = p.product;
    n["boxes_per_day"] = num(p.boxes_per_day);
    n["lot_size"] = num(p.lot_size);
    prospects.push_back(n);
  }
  sell["prospects"] = prospects;
  firm["sell"] = sell;
  root["firm"] = firm;

  YAML::Node suppliers(YAML::NodeType::Sequence);
  for (const auto &sp : s.suppliers) {
    YAML::Node n;
    n["id"] = sp.id;
    n["deliver_interval"] = num(sp.deliver_interval);
    n["source_interval"] = num(sp.source_interval);
    n["lead_time"] = encode_lead(sp.lead_time);
    n["stock"] = encode_stock(sp.stock);
    n["holding_cost"] = num(sp.holding_cost);
    suppliers.push_back(n);
  }
  root["suppliers"] = suppliers;
  root["upstream"]["lead_time"] = encode_lead(s.upstream_lead_time);

  YAML::Node customers(YAML::NodeType::Sequence);
  for (const auto &c : s.customers) {
    YAML::Node n;
    n["id"] = c.id;
    n["table_index"] = c.table_index;
    YAML::Node ps(YAML::NodeType::Sequence);
    for (int p : c.products)
      ps.push_back(p);
    ps.SetStyle(YAML::EmitterStyle::Flow);
    n["products"] = ps;
    n["lot_size"] = num(c.lot_size);
    customers.push_back(n);
  }
  root["customers"] = customers;

  const auto &sp = s.satisfaction.params;
  YAML::Node sat;
  sat["alpha"] = num(sp.alpha);
  sat["xi"] = num(sp.xi);
  sat["beta"] = num(sp.beta);
  sat["delta"] = num(sp.delta);
  sat["phi"] = num(sp.phi);
  sat["eta"] = num(sp.eta);
  sat["initial_vote"] = num(s.satisfaction.initial_vote);
  root["satisfaction"] = sat;

  YAML::Node prices(YAML::NodeType::Sequence);
  for (const auto &pc : s.price_changes) {
    YAML::Node n;
    n["at"] = num(pc.at);
    n["product"] = pc.product;
    n["retail_price"] = num(pc.retail_price);
    prices.push_back(n);
  }
  root["price_changes"] = prices;
  return root;
}

// ---------------------------------------------------------------------------
// YAML decoding

std::string where(const YAML::Node &n, const std::string &path) {
  const auto m = n.Mark();
  if (m.is_null() || m.line < 0)
    return "field '" + path + "'";
  return "line " + std::to_string(m.line + 1) + ", field '" + path + "'";
}

[[noreturn]] void field_error(const YAML::Node &n, const std::string &path,
                              const std::string &msg) {
  throw ConfigError("parse_error", where(n, path) + ": " + msg);
}

template <class T> T get(const YAML::Node &n, const std::string &path) {
  if (!n.IsScalar())
    field_error(n, path, "expected a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception &) {
    field_error(n, path, "cannot convert '" + n.Scalar() + "'");
  }
}

void require_map(const YAML::Node &n, const std::string &path) {
  if (!n.IsMap())
    field_error(n, path, "expected a mapping");
}

void require_seq(const YAML::Node &n, const std::string &path) {
  if (!n.IsSequence())
    field_error(n, path, "expected a list");
}

void check_keys(const YAML::Node &n, const std::string &path,
                std::initializer_list<const char *> allowed) {
  require_map(n, path);
  for (const auto &kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; }))
      throw ConfigError("unknown_field",
                        where(kv.first, path.empty() ? key : path + "." + key) + ": unknown field");
  }
}

template <class T> void opt(const YAML::Node &n, const char *key, const std::string &path, T &out) {
  if (n[key])
    out = get<T>(n[key], path.empty() ? key : path + "." + key);
}

template <class T>
T req(const YAML::Node &n, const char *key, const std::string &path) {
  const std::string p = path.empty() ? key : path + "." + key;
  if (!n[key])
    throw ConfigError("missing_field", where(n, path) + ": missing required field '" + p + "'");
  return get<T>(n[key], p);
}

LeadTime decode_lead(const YAML::Node &n, const std::string &path) {
  check_keys(n, path, {"kind", "hours", "min", "max", "mean"});
  const auto kind = req<std::string>(n, "kind", path);
  if (kind == "fixed")
    return LeadTime::fixed(req<double>(n, "hours", path));
  if (kind == "uniform")
    return LeadTime::uniform(req<double>(n, "min", path), req<double>(n, "max", path));
  if (kind == "exponential")
    return LeadTime::exponential(req<double>(n, "mean", path));
  field_error(n["kind"], path + ".kind", "expected fixed, uniform or exponential");
}

std::vector<StockLine> decode_stock(const YAML::Node &n, const std::string &path) {
  require_seq(n, path);
  std::vector<StockLine> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const YAML::Node e = n[i];
    check_keys(e, p, {"item", "initial", "reorder_point", "order_up_to"});
    StockLine l;
    l.item = req<int>(e, "item", p);
    l.initial = req<double>(e, "initial", p);
    if (e["reorder_point"] || e["order_up_to"])
      l.policy = StockPolicy{req<double>(e, "reorder_point", p), req<double>(e, "order_up_to", p)};
    out.push_back(l);
  }
  return out;
}

std::vector<BomLine> decode_bom(const YAML::Node &n, const std::string &path) {
  require_seq(n, path);
  std::vector<BomLine> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    check_keys(n[i], p, {"raw", "kg_per_box"});
    out.push_back({req<int>(n[i], "raw", p), req<double>(n[i], "kg_per_box", p)});
  }
  return out;
}

std::map<int, ProductionMode> decode_modes(const YAML::Node &n, const std::string &path) {
  require_map(n, path);
  std::map<int, ProductionMode> out;
  for (const auto &kv : n) {
    const std::string p = path + "." + kv.first.as<std::string>();
    const int id = get<int>(kv.first, p);
    const auto v = get<std::string>(kv.second, p);
    if (v == "make-to-stock")
      out[id] = ProductionMode::kMakeToStock;
    else if (v == "make-to-order")
      out[id] = ProductionMode::kMakeToOrder;
    else
      field_error(kv.second, p, "expected make-to-stock or make-to-order");
  }
  return out;
}

Scenario decode(const YAML::Node &root, const std::filesystem::path &base_dir) {
  check_keys(root, "",
             {"schema_version", "name", "mode", "vcor", "horizon_hours", "seed", "start_month",
              "arrivals", "demand_table", "demand", "products", "raws", "retailer", "firm",
              "suppliers", "upstream", "customers", "satisfaction", "price_changes"});
  Scenario s;
  opt(root, "schema_version", "", s.schema_version);
  if (s.schema_version != kScenarioSchemaVersion)
    throw ConfigError("unsupported_schema", where(root["schema_version"], "schema_version") +
                                                ": unsupported version " +
                                                std::to_string(s.schema_version));
  opt(root, "name", "", s.name);
  const auto mode = req<std::string>(root, "mode", "");
  if (mode == "scor")
    s.mode = RunMode::kScor;
  else if (mode == "vcor")
    s.mode = RunMode::kVcor;
  else
    field_error(root["mode"], "mode", "expected scor or vcor");
  if (root["vcor"]) {
    const auto v = root["vcor"];
    check_keys(v, "vcor", {"support", "market", "research", "develop", "sell"});
    opt(v, "support", "vcor", s.vcor.support);
    opt(v, "market", "vcor", s.vcor.market);
    opt(v, "research", "vcor", s.vcor.research);
    opt(v, "develop", "vcor", s.vcor.develop);
    opt(v, "sell", "vcor", s.vcor.sell);
  }
  opt(root, "horizon_hours", "", s.horizon);
  opt(root, "seed", "", s.seed);
  opt(root, "start_month", "", s.start_month);
  if (root["arrivals"]) {
    const auto a = get<std::string>(root["arrivals"], "arrivals");
    if (a == "deterministic")
      s.arrivals = ArrivalMode::kDeterministic;
    else if (a == "memoryless")
      s.arrivals = ArrivalMode::kMemoryless;
    else
      field_error(root["arrivals"], "arrivals", "expected deterministic or memoryless");
  }

  opt(root, "demand_table", "", s.demand_source);
  if (s.demand_source == "builtin") {
    s.demand = builtin_demand_table();
  } else if (s.demand_source == "inline") {
    if (!root["demand"])
      throw ConfigError("missing_field", "demand_table: inline needs a 'demand' list");
    const auto rows = root["demand"];
    require_seq(rows, "demand");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string p = "demand[" + std::to_string(i) + "]";
      check_keys(rows[i], p, {"customer", "product", "months"});
      const auto ms = rows[i]["months"];
      if (!ms || !ms.IsSequence() || ms.size() != 12)
        field_error(rows[i], p + ".months", "expected a list of 12 monthly values");
      std::array<double, 12> months{};
      for (std::size_t m = 0; m < 12; ++m) {
        const std::string mp = p + ".months[" + std::to_string(m) + "]";
        const auto cell = get<std::string>(ms[m], mp);
        months[m] = cell == "-" ? 0.0 : get<double>(ms[m], mp);
      }
      s.demand.rows[{req<int>(rows[i], "customer", p), req<int>(rows[i], "product", p)}] = months;
    }
  } else {
    const auto path = base_dir / s.demand_source;
    if (!std::filesystem::exists(path))
      throw ConfigError("missing_file", "demand table file not found: " + path.string());
    s.demand = load_demand_table(path);
    // the rows are embedded from here on, so a serialized copy is self-contained
    s.demand_source = "inline";
  }

  if (root["products"]) {
    const auto n = root["products"];
    require_seq(n, "products");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string p = "products[" + std::to_string(i) + "]";
      check_keys(n[i], p,
                 {"id", "name", "bom", "unit_production_time", "production_cost",
                  "wholesale_price", "retail_price"});
      ProductSpec ps;
      ps.id = req<int>(n[i], "id", p);
      ps.name = "Product " + std::to_string(ps.id);
      opt(n[i], "name", p, ps.name);
      ps.bom = n[i]["bom"] ? decode_bom(n[i]["bom"], p + ".bom")
                           : std::vector<BomLine>{{1, 1.0}, {2, 1.0}, {3, 1.0}};
      opt(n[i], "unit_production_time", p, ps.unit_production_time);
      opt(n[i], "production_cost", p, ps.production_cost);
      opt(n[i], "wholesale_price", p, ps.wholesale_price);
      opt(n[i], "retail_price", p, ps.retail_price);
      s.products.push_back(ps);
    }
  }

  if (root["raws"]) {
    const auto n = root["raws"];
    require_seq(n, "raws");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string p = "raws[" + std::to_string(i) + "]";
      check_keys(n[i], p, {"id", "price_per_kg", "upstream_price_per_kg", "producers", "source"});
      RawSpec r;
      r.id = req<int>(n[i], "id", p);
      opt(n[i], "price_per_kg", p, r.price_per_kg);
      opt(n[i], "upstream_price_per_kg", p, r.upstream_price_per_kg);
      if (n[i]["producers"]) {
        require_seq(n[i]["producers"], p + ".producers");
        for (const auto &x : n[i]["producers"])
          r.producers.push_back(get<std::string>(x, p + ".producers"));
      }
      r.source = req<std::string>(n[i], "source", p);
      s.raws.push_back(r);
    }
  }

  if (root["retailer"]) {
    const auto n = root["retailer"];
    check_keys(n, "retailer",
               {"deliver_interval", "source_interval", "lead_time", "mode", "stock",
                "holding_cost", "support"});
    auto &r = s.retailer;
    opt(n, "deliver_interval", "retailer", r.deliver_interval);
    opt(n, "source_interval", "retailer", r.source_interval);
    if (n["lead_time"])
      r.lead_time = decode_lead(n["lead_time"], "retailer.lead_time");
    if (n["mode"])
      r.mode = decode_modes(n["mode"], "retailer.mode");
    if (n["stock"])
      r.stock = decode_stock(n["stock"], "retailer.stock");
    opt(n, "holding_cost", "retailer", r.holding_cost);
    if (n["support"]) {
      const auto sn = n["support"];
      const std::string p = "retailer.support";
      check_keys(sn, p,
                 {"defective_probability", "education_decay", "max_defective_fraction",
                  "handling_time", "cost_per_ticket"});
      opt(sn, "defective_probability", p, r.support.defective_probability);
      opt(sn, "education_decay", p, r.support.education_decay);
      opt(sn, "max_defective_fraction", p, r.support.max_defective_fraction);
      opt(sn, "handling_time", p, r.support.handling_time);
      opt(sn, "cost_per_ticket", p, r.support.cost_per_ticket);
    }
  }

  if (root["firm"]) {
    const auto n = root["firm"];
    check_keys(n, "firm",
               {"deliver_interval", "source_interval", "make_interval", "daily_capacity",
                "lead_time", "mode", "fgi", "raw", "fgi_holding_cost", "raw_holding_cost",
                "market", "sell"});
    auto &f = s.firm;
    opt(n, "deliver_interval", "firm", f.deliver_interval);
    opt(n, "source_interval", "firm", f.source_interval);
    opt(n, "make_interval", "firm", f.make_interval);
    opt(n, "daily_capacity", "firm", f.daily_capacity);
    if (n["lead_time"])
      f.lead_time = decode_lead(n["lead_time"], "firm.lead_time");
    if (n["mode"])
      f.mode = decode_modes(n["mode"], "firm.mode");
    if (n["fgi"])
      f.fgi = decode_stock(n["fgi"], "firm.fgi");
    if (n["raw"])
      f.raw = decode_stock(n["raw"], "firm.raw");
    opt(n, "fgi_holding_cost", "firm", f.fgi_holding_cost);
    opt(n, "raw_holding_cost", "firm", f.raw_holding_cost);
    if (n["market"]) {
      const auto m = n["market"];
      const std::string p = "firm.market";
      check_keys(m, p,
                 {"interval", "threshold", "rd_delay", "technology_cost",
                  "new_unit_production_time", "new_bom"});
      opt(m, "interval", p, f.market.interval);
      opt(m, "threshold", p, f.market.threshold);
      opt(m, "rd_delay", p, f.market.rd_delay);
      opt(m, "technology_cost", p, f.market.technology_cost);
      if (m["new_unit_production_time"])
        f.market.new_unit_production_time =
            get<double>(m["new_unit_production_time"], p + ".new_unit_production_time");
      if (m["new_bom"])
        f.market.new_bom = decode_bom(m["new_bom"], p + ".new_bom");
    }
    if (n["sell"]) {
      const auto sn = n["sell"];
      const std::string p = "firm.sell";
      check_keys(sn, p, {"interval", "capacity_cap", "prospects"});
      opt(sn, "interval", p, f.sell.interval);
      opt(sn, "capacity_cap", p, f.sell.capacity_cap);
      if (sn["prospects"]) {
        const auto ps = sn["prospects"];
        require_seq(ps, p + ".prospects");
        f.sell.prospects.clear();
        for (std::size_t i = 0; i < ps.size(); ++i) {
          const std::string pp = p + ".prospects[" + std::to_string(i) + "]";
          check_keys(ps[i], pp, {"id", "priority", "product", "boxes_per_day", "lot_size"});
          Prospect pr;
          pr.id = req<std::string>(ps[i], "id", pp);
          opt(ps[i], "priority", pp, pr.priority);
          pr.product = req<int>(ps[i], "product", pp);
          pr.boxes_per_day = req<double>(ps[i], "boxes_per_day", pp);
          pr.lot_size = req<double>(ps[i], "lot_size", pp);
          f.sell.prospects.push_back(pr);
        }
      }
    }
  }

  if (root["suppliers"]) {
    const auto n = root["suppliers"];
    require_seq(n, "suppliers");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string p = "suppliers[" + std::to_string(i) + "]";
      check_keys(n[i], p,
                 {"id", "deliver_interval", "source_interval", "lead_time", "stock",
                  "holding_cost"});
      SupplierConfig c;
      c.id = req<std::string>(n[i], "id", p);
      opt(n[i], "deliver_interval", p, c.deliver_interval);
      opt(n[i], "source_interval", p, c.source_interval);
      if (n[i]["lead_time"])
        c.lead_time = decode_lead(n[i]["lead_time"], p + ".lead_time");
      if (n[i]["stock"])
        c.stock = decode_stock(n[i]["stock"], p + ".stock");
      opt(n[i], "holding_cost", p, c.holding_cost);
      s.suppliers.push_back(c);
    }
  }

  if (root["upstream"]) {
    check_keys(root["upstream"], "upstream", {"lead_time"});
    if (root["upstream"]["lead_time"])
      s.upstream_lead_time = decode_lead(root["upstream"]["lead_time"], "upstream.lead_time");
  }

  if (root["customers"]) {
    const auto n = root["customers"];
    require_seq(n, "customers");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string p = "customers[" + std::to_string(i) + "]";
      check_keys(n[i], p, {"id", "table_index", "products", "lot_size"});
      CustomerConfig c;
      c.id = req<std::string>(n[i], "id", p);
      c.table_index = req<int>(n[i], "table_index", p);
      if (n[i]["products"]) {
        require_seq(n[i]["products"], p + ".products");
        for (const auto &x : n[i]["products"])
          c.products.push_back(get<int>(x, p + ".products"));
      }
      c.lot_size = req<double>(n[i], "lot_size", p);
      s.customers.push_back(c);
    }
  }

  if (root["satisfaction"]) {
    const auto n = root["satisfaction"];
    check_keys(n, "satisfaction",
               {"alpha", "xi", "beta", "delta", "phi", "eta", "initial_vote"});
    auto &sp = s.satisfaction.params;
    opt(n, "alpha", "satisfaction", sp.alpha);
    opt(n, "xi", "satisfaction", sp.xi);
    opt(n, "beta", "satisfaction", sp.beta);
    opt(n, "delta", "satisfaction", sp.delta);
    opt(n, "phi", "satisfaction", sp.phi);
    opt(n, "eta", "satisfaction", sp.eta);
    opt(n, "initial_vote", "satisfaction", s.satisfaction.initial_vote);
  }

  if (root["price_changes"]) {
    const auto n = root["price_changes"];
    require_seq(n, "price_changes");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string p = "price_changes[" + std::to_string(i) + "]";
      check_keys(n[i], p, {"at", "product", "retail_price"});
      s.price_changes.push_back({req<double>(n[i], "at", p), req<int>(n[i], "product", p),
                                 req<double>(n[i], "retail_price", p)});
    }
  }
  return s;
}

/// Maps merge key by key; anything else in `over` replaces `base`. Production
/// mode maps are keyed by product id, so they replace like lists do.
YAML::Node merge(const YAML::Node &base, const YAML::Node &over) {
  if (!base.IsMap() || !over.IsMap())
    return over;
  YAML::Node out = YAML::Clone(base);
  for (const auto &kv : over) {
    const std::string key = kv.first.as<std::string>();
    if (key != "mode" && out[key] && out[key].IsMap() && kv.second.IsMap())
      out[key] = merge(out[key], kv.second);
    else
      out[key] = kv.second;
  }
  return out;
}

} // namespace

Scenario parse_scenario(const std::string &yaml_text, const std::filesystem::path &base_dir) {
  YAML::Node user;
  try {
    user = YAML::Load(yaml_text);
  } catch (const YAML::ParserException &e) {
    throw ConfigError("parse_error", "line " + std::to_string(e.mark.line + 1) + ", column " +
                                         std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  if (user.IsNull())
    user = YAML::Node(YAML::NodeType::Map);
  if (!user.IsMap())
    throw ConfigError("parse_error", "scenario document must be a mapping");

  // The profile supplies every default; its mode follows the user's so that a
  // bare `mode: vcor` file enables the VCOR processes.
  RunMode profile_mode = RunMode::kScor;
  if (user["mode"] && user["mode"].IsScalar() && user["mode"].Scalar() == "vcor")
    profile_mode = RunMode::kVcor;
  const YAML::Node merged = merge(encode(case_study_profile(profile_mode)), user);
  Scenario s = decode(merged, base_dir);
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("io_error", "cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.has_parent_path() ? path.parent_path()
                                                         : std::filesystem::path("."));
}

std::string serialize_scenario(const Scenario &scenario) {
  YAML::Emitter out;
  out << encode(scenario);
  return std::string(out.c_str()) + "\n";
}

std::string scenario_digest(const Scenario &scenario) {
  return hex64(fnv1a64(serialize_demand_table(scenario.demand),
                       fnv1a64(serialize_scenario(scenario))));
}

} // namespace vcsim
