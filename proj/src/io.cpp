#include "vcsim/io.hpp"

#include "vcsim/error.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace vcsim {

using json = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;

json header(const std::string &format, const std::string &digest, std::uint64_t seed) {
  json h;
  h["format"] = format;
  h["version"] = kFormatVersion;
  h["scenario_digest"] = digest;
  h["seed"] = seed;
  return h;
}

std::string comment_header(const std::string &digest, std::uint64_t seed) {
  return "# scenario_digest=" + digest + " seed=" + std::to_string(seed) + "\n";
}

json opt(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json &j) {
  if (j.is_null())
    return std::nullopt;
  return j.get<double>();
}

json order_json(const Order &o) {
  json j;
  j["id"] = o.id;
  j["client"] = o.client.str();
  j["provider"] = o.provider.str();
  j["item"] = to_string(o.item);
  j["quantity"] = o.quantity;
  j["created_at"] = o.created_at;
  j["status"] = to_string(o.status);
  j["origin"] = to_string(o.origin);
  j["hold_until"] = o.hold_until;
  j["parent"] = o.parent;
  return j;
}

Item parse_item(const std::string &text) {
  if (text.size() < 2 || (text[0] != 'P' && text[0] != 'R'))
    throw ValidationError("parse_error", "bad item '" + text + "'");
  const int id = std::stoi(text.substr(1));
  return text[0] == 'P' ? Item::product(id) : Item::raw(id);
}

Order order_from(const json &j) {
  Order o;
  o.id = j.at("id").get<OrderId>();
  o.client = ActorId(j.at("client").get<std::string>());
  o.provider = ActorId(j.at("provider").get<std::string>());
  o.item = parse_item(j.at("item").get<std::string>());
  o.quantity = j.at("quantity").get<double>();
  o.created_at = j.at("created_at").get<double>();
  o.status = parse_order_status(j.at("status").get<std::string>());
  o.origin = parse_order_origin(j.at("origin").get<std::string>());
  o.hold_until = j.at("hold_until").get<double>();
  o.parent = j.at("parent").get<OrderId>();
  return o;
}

json vote_json(const VotePoint &v) {
  json j;
  j["k"] = v.k;
  j["customer"] = v.customer.str();
  j["product"] = v.product;
  j["at"] = v.at;
  j["vote"] = v.vote;
  j["innovation"] = v.innovation;
  return j;
}

std::string csv_number(const std::optional<double> &v) { return v ? format_number(*v) : ""; }

} // namespace

std::string trace_jsonl(const RunArtifacts &run) {
  std::ostringstream out;
  out << header("vcsim-trace", run.scenario_digest, run.seed).dump() << '\n';
  for (const auto &e : run.trace) {
    json j;
    j["fire_time"] = e.fire_time;
    j["sequence_no"] = e.sequence_no;
    j["target"] = e.target.str();
    j["kind"] = e.kind;
    j["payload_digest"] = e.payload_digest();
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string ledger_jsonl(const Ledger &ledger, const std::string &digest, std::uint64_t seed) {
  std::ostringstream out;
  out << header("vcsim-ledger", digest, seed).dump() << '\n';
  for (const auto &rec : ledger.records()) {
    json j;
    std::visit(
        [&j](const auto &r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, ledger_record::OrderCreated>) {
            j["record"] = "order_created";
            j["order"] = order_json(r.order);
          } else if constexpr (std::is_same_v<T, ledger_record::StatusChange>) {
            j["record"] = "status_change";
            j["order_id"] = r.order_id;
            j["from"] = to_string(r.from);
            j["to"] = to_string(r.to);
            j["at"] = r.at;
          } else if constexpr (std::is_same_v<T, ledger_record::TicketOpened>) {
            j["record"] = "ticket_opened";
            j["ticket_id"] = r.ticket.id;
            j["order_id"] = r.ticket.order_id;
            j["customer"] = r.ticket.customer.str();
            j["defective"] = r.ticket.defective;
            j["at"] = r.ticket.opened_at;
          } else if constexpr (std::is_same_v<T, ledger_record::TicketLinked>) {
            j["record"] = "ticket_linked";
            j["ticket_id"] = r.ticket_id;
            j["replacement"] = r.replacement;
          } else {
            j["record"] = "ticket_resolved";
            j["ticket_id"] = r.ticket_id;
            j["at"] = r.at;
          }
        },
        rec);
    out << j.dump() << '\n';
  }
  return out.str();
}

Ledger parse_ledger_jsonl(const std::string &text) {
  std::vector<LedgerRecord> records;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    try {
      const json j = json::parse(line);
      if (j.contains("format"))
        continue;
      const std::string kind = j.at("record").get<std::string>();
      if (kind == "order_created") {
        records.push_back(ledger_record::OrderCreated{order_from(j.at("order"))});
      } else if (kind == "status_change") {
        records.push_back(ledger_record::StatusChange{
            j.at("order_id").get<OrderId>(), parse_order_status(j.at("from").get<std::string>()),
            parse_order_status(j.at("to").get<std::string>()), j.at("at").get<double>()});
      } else if (kind == "ticket_opened") {
        SupportTicket t;
        t.id = j.at("ticket_id").get<std::int64_t>();
        t.order_id = j.at("order_id").get<OrderId>();
        t.customer = ActorId(j.at("customer").get<std::string>());
        t.defective = j.at("defective").get<double>();
        t.opened_at = j.at("at").get<double>();
        records.push_back(ledger_record::TicketOpened{t});
      } else if (kind == "ticket_linked") {
        records.push_back(ledger_record::TicketLinked{j.at("ticket_id").get<std::int64_t>(),
                                                      j.at("replacement").get<OrderId>()});
      } else if (kind == "ticket_resolved") {
        records.push_back(ledger_record::TicketResolved{j.at("ticket_id").get<std::int64_t>(),
                                                        j.at("at").get<double>()});
      } else {
        throw ValidationError("parse_error", "unknown record '" + kind + "'");
      }
    } catch (const json::exception &e) {
      throw ValidationError("parse_error",
                            "ledger line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError &e) {
      throw ValidationError("parse_error",
                            "ledger line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return Ledger::replay(records);
}

std::string costs_jsonl(const RunArtifacts &run) {
  std::ostringstream out;
  out << header("vcsim-costs", run.scenario_digest, run.seed).dump() << '\n';
  for (const auto &e : run.costs.entries()) {
    json j;
    j["at"] = e.at;
    j["actor"] = e.actor.str();
    j["category"] = to_string(e.category);
    j["amount"] = e.amount;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string kpi_json(const KpiReport &r) {
  json j;
  j["scenario_digest"] = r.scenario_digest;
  j["seed"] = r.seed;
  j["format"] = "vcsim-kpi";
  j["version"] = kFormatVersion;
  j["period"] = r.period;
  j["mode"] = to_string(r.mode);
  j["topology"] = {{"actors", r.topology.actors},
                   {"products", r.topology.products},
                   {"raws", r.topology.raws}};
  json census = json::object();
  for (const auto &[s, n] : r.census)
    census[std::string(to_string(s))] = n;
  j["census"] = census;
  j["total_orders"] = r.total_orders;
  j["support_tickets"] = r.support_tickets;
  json produced = json::object();
  for (const auto &[p, q] : r.produced)
    produced["P" + std::to_string(p)] = q;
  j["produced"] = produced;

  json actors = json::array();
  for (const auto &a : r.actors) {
    json aj;
    aj["actor"] = a.actor;
    json series = json::array();
    for (const auto &[id, t] : a.delivery.series)
      series.push_back({id, t});
    aj["delivery_time"] = {
        {"mean", opt(a.delivery.mean)}, {"max", opt(a.delivery.max)}, {"series", series}};
    aj["orders_received"] = a.orders_received;
    aj["orders_delivered"] = a.orders_delivered;
    aj["sales_revenue"] = a.sales_revenue;
    json costs = json::object();
    for (const auto &[c, v] : a.costs)
      costs[std::string(to_string(c))] = v;
    aj["costs"] = costs;
    aj["total_costs"] = a.total_costs;
    json stock = json::object();
    for (const auto &[cls, k] : a.stock)
      stock[cls] = {{"mean_stock_value", opt(k.mean_stock_value)},
                    {"sri", opt(k.sri)},
                    {"smi", opt(k.smi)}};
    aj["stock"] = stock;
    aj["spi"] = opt(a.spi);
    actors.push_back(aj);
  }
  j["actors"] = actors;

  json votes = json::array();
  for (const auto &v : r.satisfaction)
    votes.push_back(vote_json(v));
  j["satisfaction"] = votes;
  return j.dump(2) + "\n";
}

KpiReport parse_kpi_json(const std::string &text) {
  KpiReport r;
  try {
    const json j = json::parse(text);
    r.scenario_digest = j.at("scenario_digest").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.period = j.at("period").get<double>();
    r.mode = j.at("mode").get<std::string>() == "vcor" ? RunMode::kVcor : RunMode::kScor;
    const auto &t = j.at("topology");
    r.topology.actors = t.at("actors").get<std::vector<std::string>>();
    r.topology.products = t.at("products").get<std::vector<int>>();
    r.topology.raws = t.at("raws").get<std::vector<int>>();
    for (const auto &[k, v] : j.at("census").items())
      r.census[parse_order_status(k)] = v.get<std::size_t>();
    r.total_orders = j.at("total_orders").get<std::size_t>();
    r.support_tickets = j.at("support_tickets").get<std::size_t>();
    for (const auto &[k, v] : j.at("produced").items())
      r.produced[std::stoi(k.substr(1))] = v.get<double>();
    for (const auto &aj : j.at("actors")) {
      ActorKpi a;
      a.actor = aj.at("actor").get<std::string>();
      const auto &d = aj.at("delivery_time");
      a.delivery.mean = opt_from(d.at("mean"));
      a.delivery.max = opt_from(d.at("max"));
      for (const auto &p : d.at("series"))
        a.delivery.series.push_back({p.at(0).get<OrderId>(), p.at(1).get<double>()});
      a.orders_received = aj.at("orders_received").get<std::size_t>();
      a.orders_delivered = aj.at("orders_delivered").get<std::size_t>();
      a.sales_revenue = aj.at("sales_revenue").get<double>();
      for (const auto &[k, v] : aj.at("costs").items())
        a.costs[parse_cost_category(k)] = v.get<double>();
      a.total_costs = aj.at("total_costs").get<double>();
      for (const auto &[cls, k] : aj.at("stock").items())
        a.stock[cls] = StockKpi{opt_from(k.at("mean_stock_value")), opt_from(k.at("sri")),
                                opt_from(k.at("smi"))};
      a.spi = opt_from(aj.at("spi"));
      r.actors.push_back(std::move(a));
    }
    for (const auto &v : j.at("satisfaction"))
      r.satisfaction.push_back({v.at("k").get<long>(), ActorId(v.at("customer").get<std::string>()),
                                v.at("product").get<int>(), v.at("at").get<double>(),
                                v.at("vote").get<double>(), v.at("innovation").get<bool>()});
  } catch (const json::exception &e) {
    throw ValidationError("parse_error", std::string("kpi report: ") + e.what());
  }
  return r;
}

std::string satisfaction_csv(const KpiReport &r) {
  std::ostringstream out;
  out << comment_header(r.scenario_digest, r.seed);
  out << "k,customer,product,time,vote,innovation\n";
  for (const auto &v : r.satisfaction)
    out << v.k << ',' << v.customer.str() << ',' << v.product << ',' << format_number(v.at)
        << ',' << format_number(v.vote) << ',' << (v.innovation ? 1 : 0) << '\n';
  return out.str();
}

std::string delivery_times_csv(const KpiReport &r) {
  std::ostringstream out;
  out << comment_header(r.scenario_digest, r.seed);
  out << "actor,order_id,delivery_time\n";
  for (const auto &a : r.actors)
    for (const auto &[id, t] : a.delivery.series)
      out << a.actor << ',' << id << ',' << format_number(t) << '\n';
  return out.str();
}

std::string stock_levels_csv(const RunArtifacts &run) {
  std::ostringstream out;
  out << comment_header(run.scenario_digest, run.seed);
  out << "owner,item,time,level\n";
  for (const auto &t : run.stocks)
    for (const auto &s : t.samples)
      out << t.owner.str() << ',' << to_string(t.item) << ',' << format_number(s.at) << ','
          << format_number(s.level) << '\n';
  return out.str();
}

std::string comparison_json(const ComparisonReport &c) {
  json j;
  j["scor"] = {{"scenario_digest", c.scor_digest}, {"seed", c.scor_seed}};
  j["vcor"] = {{"scenario_digest", c.vcor_digest}, {"seed", c.vcor_seed}};
  j["format"] = "vcsim-comparison";
  j["version"] = kFormatVersion;
  json rows = json::array();
  for (const auto &r : c.rows)
    rows.push_back({{"key", r.key},
                    {"scor", opt(r.scor)},
                    {"vcor", opt(r.vcor)},
                    {"delta", opt(r.delta)},
                    {"ratio", opt(r.ratio)},
                    {"finding", r.finding}});
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string comparison_csv(const ComparisonReport &c) {
  std::ostringstream out;
  out << "# scor scenario_digest=" << c.scor_digest << " seed=" << c.scor_seed
      << "; vcor scenario_digest=" << c.vcor_digest << " seed=" << c.vcor_seed << '\n';
  out << "key,scor,vcor,delta,ratio,finding\n";
  for (const auto &r : c.rows)
    out << r.key << ',' << csv_number(r.scor) << ',' << csv_number(r.vcor) << ','
        << csv_number(r.delta) << ',' << csv_number(r.ratio) << ',' << r.finding << '\n';
  return out.str();
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("io_error", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("io_error", "cannot write " + path.string());
  out << text;
  if (!out)
    throw IoError("io_error", "failed writing " + path.string());
}

void write_run_artifacts(const std::filesystem::path &dir, const RunResult &result,
                         const Scenario &scenario) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("io_error", "cannot create " + dir.string() + ": " + ec.message());
  const auto &a = result.artifacts;
  write_text_file(dir / "trace.jsonl", trace_jsonl(a));
  write_text_file(dir / "ledger.jsonl", ledger_jsonl(a.ledger, a.scenario_digest, a.seed));
  write_text_file(dir / "costs.jsonl", costs_jsonl(a));
  write_text_file(dir / "kpi.json", kpi_json(result.report));
  write_text_file(dir / "satisfaction.csv", satisfaction_csv(result.report));
  write_text_file(dir / "delivery_times.csv", delivery_times_csv(result.report));
  write_text_file(dir / "stock_levels.csv", stock_levels_csv(a));
  write_text_file(dir / "scenario.yaml", "# scenario_digest=" + a.scenario_digest +
                                             " seed=" + std::to_string(a.seed) + "\n" +
                                             serialize_scenario(scenario));
}

KpiReport read_kpi_report(const std::filesystem::path &dir) {
  return parse_kpi_json(read_text_file(dir / "kpi.json"));
}

void write_comparison(const std::filesystem::path &dir, const ComparisonReport &report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("io_error", "cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / "comparison.json", comparison_json(report));
  write_text_file(dir / "comparison.csv", comparison_csv(report));
}

} // namespace vcsim
