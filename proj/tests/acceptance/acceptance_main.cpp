// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "vcsim/chain.hpp"
#include "vcsim/error.hpp"
#include "vcsim/io.hpp"
#include "vcsim/kpi.hpp"
#include "vcsim/satisfaction.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace vcsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// 1 -------------------------------------------------------------------------
Outcome paper_table_consistency() {
  Outcome o;
  // (SRI, SMI hours) for FGI and raw materials, VCOR then SCOR.
  const std::pair<double, double> pairs[] = {{22.4, 2.13}, {12.34, 3.88}, {1.2, 39.8}, {0.69, 68.8}};
  std::ostringstream products;
  for (const auto &[sri_v, smi_v] : pairs) {
    const double period = sri_v * smi_v;
    products << period << " ";
    o.require(period >= 47.4 && period <= 48.0,
              "SRI x SMI = " + format_number(period) + " outside [47.4, 48]");
  }
  o.detail = o.pass ? "SRI x SMI = " + products.str() + "h" : o.detail;
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome satisfaction_closed_forms() {
  Outcome o;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> ux(0.0, 10.0), ua(0.01, 0.99);
  std::uniform_int_distribution<int> un(0, 50);

  for (int i = 0; i < 100; ++i) {
    const double x0 = ux(gen), a = ua(gen);
    const int n = un(gen);
    const auto xs = decay_trajectory(x0, a, n);
    o.require(xs.size() == static_cast<std::size_t>(n) + 1, "trajectory length");
    o.require(close(xs.back(), std::pow(1.0 - a, n) * x0, 1e-12), "zero-input decay");
  }
  for (int i = 0; i < 100; ++i) {
    SatisfactionParams p;
    p.alpha = ua(gen);
    p.xi = p.beta = p.delta = p.phi = p.eta = 0.0;
    InputSignals s;
    s.innovation = true;
    const double x = firm_update({0.0, 0}, s, p).x;
    o.require(x == 9.0, "innovation step from 0 gave " + format_number(x));
  }
  for (int i = 0; i < 100; ++i) {
    const double a = ua(gen), u = ux(gen);
    double x = ux(gen);
    for (int k = 0; k < 30; ++k) {
      const double next = unclamped_step(x, u, a);
      o.require(close(std::abs(next - u), (1.0 - a) * std::abs(x - u), 1e-12),
                "convergence ratio is not 1 - alpha");
      x = next;
    }
  }
  if (o.pass)
    o.detail = "decay, innovation=9 and geometric convergence over 100 draws each";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome kpi_algebra() {
  Outcome o;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.01, 1e5), scale(1e-3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double period = u(gen);
    const auto r = sri(u(gen), u(gen));
    o.require(close(*smi(period, r) * *r, period, 1e-9 * std::max(1.0, period)),
              "SMI x SRI != period");
    const double profit = u(gen), costs = u(gen), k = scale(gen);
    o.require(close(*spi(profit * k, costs * k), *spi(profit, costs), 1e-12),
              "SPI changes under currency rescaling");
  }
  const double p = 1234.5;
  o.require(close(*spi(p, 0.87 * p), 0.13, 1e-12), "SPI(profit, 0.87 profit) != 0.13");
  if (o.pass)
    o.detail = "identity, rescaling invariance, SPI = 0.13";
  return o;
}

// 4 -------------------------------------------------------------------------
Scenario restrict_products(Scenario s, int n) {
  auto keep = [n](int id) { return id <= n; };
  std::erase_if(s.products, [&](const ProductSpec &p) { return !keep(p.id); });
  std::erase_if(s.retailer.stock, [&](const StockLine &l) { return !keep(l.item); });
  std::erase_if(s.firm.fgi, [&](const StockLine &l) { return !keep(l.item); });
  std::erase_if(s.retailer.mode, [&](const auto &kv) { return !keep(kv.first); });
  std::erase_if(s.firm.mode, [&](const auto &kv) { return !keep(kv.first); });
  std::erase_if(s.demand.rows, [&](const auto &kv) { return !keep(kv.first.second); });
  std::erase_if(s.firm.sell.prospects, [&](const Prospect &p) { return !keep(p.product); });
  for (auto &c : s.customers)
    std::erase_if(c.products, [&](int p) { return !keep(p); });
  std::erase_if(s.customers, [](const CustomerConfig &c) { return c.products.empty(); });
  return s;
}

Scenario random_scenario(std::mt19937_64 &gen, int index) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto pick = [&](double lo, double hi) { return lo + (hi - lo) * u01(gen); };

  Scenario s = case_study_profile(u01(gen) < 0.5 ? RunMode::kScor : RunMode::kVcor);
  s = restrict_products(std::move(s), 1 + static_cast<int>(gen() % 3));
  s.name = "random-" + std::to_string(index);
  s.seed = gen();
  s.horizon = std::round(pick(1.0, 48.0) * 4.0) / 4.0;
  s.arrivals = u01(gen) < 0.5 ? ArrivalMode::kDeterministic : ArrivalMode::kMemoryless;
  s.firm.daily_capacity = std::round(pick(20.0, 400.0));
  s.retailer.lead_time = LeadTime::uniform(0.2, pick(0.5, 4.0));
  s.firm.lead_time = LeadTime::exponential(pick(0.5, 4.0));
  s.retailer.support.defective_probability = pick(0.0, 0.6);
  s.retailer.support.handling_time = pick(0.0, 4.0);
  s.firm.market.rd_delay = pick(0.0, 10.0);
  s.firm.market.threshold = pick(4.0, 9.0);
  for (auto &line : s.firm.raw)
    line.initial = std::round(pick(0.0, 200.0));
  for (auto &line : s.firm.fgi)
    line.initial = std::round(pick(0.0, 500.0));
  for (auto &[p, mode] : s.firm.mode)
    mode = u01(gen) < 0.3 ? ProductionMode::kMakeToOrder : ProductionMode::kMakeToStock;
  for (auto &c : s.customers)
    c.lot_size = std::round(pick(1.0, 20.0));
  return s;
}

Outcome conservation_suite() {
  Outcome o;
  std::mt19937_64 gen(20090101);
  std::size_t orders = 0, tickets = 0;
  for (int i = 0; i < 200 && o.pass; ++i) {
    const Scenario s = random_scenario(gen, i);
    RunResult r;
    try {
      r = run_scenario(s);
    } catch (const Error &e) {
      o.require(false, s.name + ": " + e.code() + ": " + e.what());
      break;
    }
    const auto &a = r.artifacts;
    const Ledger &l = a.ledger;
    orders += l.size();
    tickets += l.tickets().size();

    std::size_t census = 0;
    for (const auto &[status, n] : order_census(l))
      census += n;
    o.require(census == l.size(), s.name + ": census does not sum to the ledger length");

    std::map<int, Quantity> started;
    std::map<int, Quantity> consumed;
    for (const auto &lot : a.lots) {
      started[lot.product] += lot.quantity;
      for (const auto &[raw, kg] : lot.raw_used)
        consumed[raw] += kg;
    }
    for (const auto &p : s.products) {
      Quantity delivered = 0.0;
      for (const auto &[id, ord] : l.orders())
        if (ord.provider == kFirm && ord.item == Item::product(p.id) && ord.delivered_at)
          delivered += ord.quantity;
      const Quantity initial = a.initial_fgi.at(to_string(Item::product(p.id)));
      const Quantity produced = r.report.produced.count(p.id) ? r.report.produced.at(p.id) : 0.0;
      o.require(delivered <= initial + produced + 1e-9,
                s.name + ": firm delivered more " + to_string(Item::product(p.id)) +
                    " than initial FGI plus produced");
    }
    // Raw consumption is the recipe times boxes put into production, exactly,
    // and closes the firm's raw balance.
    std::map<int, Quantity> by_recipe;
    for (const auto &[p, boxes] : started)
      for (const auto &line : s.product(p).bom)
        by_recipe[line.raw] += line.kg_per_box * boxes;
    o.require(by_recipe == consumed, s.name + ": raw consumption differs from BOM x production");
    for (const auto &t : a.stocks) {
      if (t.owner != kFirm || !t.item.is_raw())
        continue;
      Quantity received = 0.0;
      for (const auto &[id, ord] : l.orders())
        if (ord.client == kFirm && ord.item == t.item && ord.delivered_at)
          received += ord.quantity;
      const Quantity used = consumed.count(t.item.id) ? consumed.at(t.item.id) : 0.0;
      o.require(close(t.initial + received - used, t.final_level, 1e-9),
                s.name + ": firm raw balance does not close");
    }
    for (const auto &[id, t] : l.tickets()) {
      o.require(t.defective <= l.order(t.order_id).quantity, s.name + ": ticket exceeds lot");
      if (t.replacement != 0)
        o.require(l.order(t.replacement).quantity == t.defective,
                  s.name + ": replacement quantity differs from defective quantity");
    }
  }
  if (o.pass)
    o.detail = "200 scenarios, " + std::to_string(orders) + " orders, " +
               std::to_string(tickets) + " tickets";
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome golden_oracle() {
  Outcome o;
  const auto r = run_scenario(load_scenario(VCSIM_GOLDEN_DIR "/micro.yaml"));
  std::istringstream in(read_text_file(VCSIM_GOLDEN_DIR "/micro_events.csv"));
  std::vector<std::string> expected;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#')
      expected.push_back(line);
  const auto &trace = r.artifacts.trace;
  o.require(trace.size() == expected.size(),
            "trace has " + std::to_string(trace.size()) + " events, hand trace " +
                std::to_string(expected.size()));
  for (std::size_t i = 0; i < std::min(trace.size(), expected.size()); ++i) {
    const auto &e = trace[i];
    const std::string got = format_number(e.fire_time) + "," + std::to_string(e.sequence_no) +
                            "," + e.target.str() + "," + e.kind;
    o.require(got == expected[i], "event " + std::to_string(i) + ": " + got + " != " + expected[i]);
  }
  using P = std::pair<OrderId, Hours>;
  const auto &l = r.artifacts.ledger;
  o.require(delivery_times(l, kRetailer).series == std::vector<P>{{1, 2.5}, {3, 3.5}, {4, 2.5}},
            "retailer delivery series");
  o.require(delivery_times(l, kFirm).series == std::vector<P>{{2, 4.5}}, "firm delivery series");
  const std::map<std::pair<std::string, std::string>, Quantity> finals{
      {{"retailer", "P1"}, 4.0}, {{"firm", "P1"}, 10.0},
      {{"firm", "R1"}, 14.0},    {{"supplier1", "R1"}, 100.0}};
  for (const auto &t : r.artifacts.stocks) {
    auto it = finals.find({t.owner.str(), to_string(t.item)});
    if (it != finals.end())
      o.require(t.final_level == it->second,
                "final " + t.owner.str() + " " + to_string(t.item) + " = " +
                    format_number(t.final_level));
  }
  if (o.pass)
    o.detail = std::to_string(trace.size()) + " events, delivery series and stocks match";
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome scor_vcor_structure() {
  Outcome o;
  const Scenario scor_s = case_study_profile(RunMode::kScor);
  const Scenario vcor_s = case_study_profile(RunMode::kVcor);
  o.require(vcor_s.seed == scor_s.seed, "seeds differ");
  o.require(!vcor_s.firm.sell.prospects.empty(), "no prospects");
  o.require(vcor_s.retailer.support.handling_time > 0.0, "zero support handling time");
  const auto scor = run_scenario(scor_s);
  const auto vcor = run_scenario(vcor_s);

  std::size_t vcor_events = 0;
  for (const auto &e : scor.artifacts.trace)
    vcor_events += is_vcor_event_kind(e.kind) ? 1 : 0;
  o.require(vcor_events == 0, "SCOR trace has VCOR process events");

  const auto fs_ = scor.report.actor("firm")->orders_delivered;
  const auto fv = vcor.report.actor("firm")->orders_delivered;
  o.require(fv > fs_, "firm deliveries VCOR " + std::to_string(fv) + " <= SCOR " +
                          std::to_string(fs_));

  const auto ms = scor.report.actor("retailer")->delivery.mean;
  const auto mv = vcor.report.actor("retailer")->delivery.mean;
  o.require(ms && mv && *mv >= *ms, "retailer mean delivery VCOR < SCOR");

  // Every vote taken with the innovation flag set is above the vote before it.
  std::map<std::pair<std::string, int>, double> last;
  int jumps = 0;
  double smallest = 1e9;
  for (const auto &v : vcor.artifacts.votes) {
    const auto key = std::make_pair(v.customer.str(), v.product);
    if (v.innovation && last.count(key)) {
      ++jumps;
      smallest = std::min(smallest, v.vote - last[key]);
    }
    last[key] = v.vote;
  }
  o.require(jumps > 0, "no vote taken after a launch");
  o.require(smallest > 0.0, "a post-launch vote did not rise");
  if (o.pass)
    o.detail = "firm deliveries " + std::to_string(fs_) + " -> " + std::to_string(fv) +
               ", retailer mean " + format_number(*ms) + " -> " + format_number(*mv) +
               " h, smallest launch jump " + format_number(smallest);
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "vcsim_acceptance_determinism";
  fs::remove_all(base);
  double slowest = 0.0;
  for (const char *run : {"a", "b"}) {
    const auto t0 = std::chrono::steady_clock::now();
#ifdef VCSIM_CLI
    const std::string cmd = std::string("\"") + VCSIM_CLI + "\" run --mode vcor --out \"" +
                            (base / run).string() + "\" > /dev/null";
    o.require(std::system(cmd.c_str()) == 0, "vcsim run failed");
#else
    const Scenario s = case_study_profile(RunMode::kVcor);
    write_run_artifacts(base / run, run_scenario(s), s);
#endif
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - t0;
    slowest = std::max(slowest, took.count());
  }
  for (const char *f : {"trace.jsonl", "ledger.jsonl", "kpi.json", "costs.jsonl"}) {
    std::string a, b;
    try {
      a = read_text_file(base / "a" / f);
      b = read_text_file(base / "b" / f);
    } catch (const Error &e) {
      o.require(false, e.what());
      break;
    }
    o.require(!a.empty() && a == b, std::string(f) + " differs between runs");
  }
  o.require(slowest < 10.0, "48 h case-study run took " + format_number(slowest) + " s");
  fs::remove_all(base);
  if (o.pass)
    o.detail = "byte-identical trace, ledger, costs and KPI files; slowest run " +
               format_number(std::round(slowest * 1000.0) / 1000.0) + " s";
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome baseline_topology() {
  Outcome o;
  const Scenario s = case_study_profile(RunMode::kScor);

  // Hand bound: the firm cannot build more than capacity x days boxes, each
  // box takes kg_per_box of every raw, and the firm's raw position (on hand
  // plus on order) never exceeds S. So the firm orders at most
  // S - initial + consumption of each raw from its source supplier over the run.
  const double days = s.horizon / 24.0;
  const double max_boxes = s.firm.daily_capacity * days; // 185 x 2 = 370
  bool covered = true;
  std::ostringstream audit;
  for (const auto &raw : s.raws) {
    double kg_per_box = 0.0;
    for (const auto &p : s.products)
      for (const auto &line : p.bom)
        if (line.raw == raw.id)
          kg_per_box = std::max(kg_per_box, line.kg_per_box);
    const StockLine *firm_line = nullptr;
    for (const auto &l : s.firm.raw)
      if (l.item == raw.id)
        firm_line = &l;
    const double max_consumed = kg_per_box * max_boxes;
    const double max_ordered = firm_line->policy->order_up_to - firm_line->initial + max_consumed;
    // The designated supplier must stay at or above its reorder point.
    for (const auto &sup : s.suppliers) {
      if (sup.id != raw.source)
        continue;
      for (const auto &l : sup.stock)
        if (l.item == raw.id) {
          const double headroom = l.initial - l.policy->reorder_point;
          audit << "R" << raw.id << ": " << max_ordered << " <= " << headroom << "; ";
          covered = covered && max_ordered <= headroom;
        }
    }
  }
  o.require(covered, "initial raw stocks do not cover the horizon: " + audit.str());

  const auto r = run_scenario(s);
  std::size_t upstream = 0;
  for (const auto &[id, ord] : r.artifacts.ledger.orders())
    upstream += ord.provider == kUpstream ? 1 : 0;
  o.require(upstream == 0, std::to_string(upstream) + " supplier -> upstream orders");
  if (o.pass)
    o.detail = "0 upstream orders; bound " + audit.str();
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Table 6 SRI x SMI within [47.4, 48] h", paper_table_consistency},
      {"satisfaction closed forms", satisfaction_closed_forms},
      {"KPI algebra", kpi_algebra},
      {"conservation over 200 random scenarios", conservation_suite},
      {"golden micro-scenario oracle", golden_oracle},
      {"SCOR/VCOR structural checks", scor_vcor_structure},
      {"determinism and runtime", determinism},
      {"baseline topology: no tier-2 replenishment", baseline_topology},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
              << criteria[i].first << " (" << o.detail << ")\n";
  }
  return failed == 0 ? 0 : 1;
}
