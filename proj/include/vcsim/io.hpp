#pragma once

#include "vcsim/chain.hpp"
#include "vcsim/kpi.hpp"

#include <filesystem>
#include <string>

namespace vcsim {

/// Line-delimited trace: a header record {"scenario_digest", "seed", ...}
/// followed by one record per fired event with fields fire_time, sequence_no,
/// target, kind, payload_digest.
std::string trace_jsonl(const RunArtifacts &run);

/// Ledger log as line-delimited records ("order_created", "status_change",
/// "ticket_opened", "ticket_linked", "ticket_resolved") after a header record.
std::string ledger_jsonl(const Ledger &ledger, const std::string &digest, std::uint64_t seed);
/// Replays an exported ledger log. Throws ValidationError("parse_error") on
/// malformed records.
Ledger parse_ledger_jsonl(const std::string &text);

std::string costs_jsonl(const RunArtifacts &run);

std::string kpi_json(const KpiReport &report);
KpiReport parse_kpi_json(const std::string &text);

/// Plot-ready series, each with a `#` provenance header line.
std::string satisfaction_csv(const KpiReport &report);
std::string delivery_times_csv(const KpiReport &report);
std::string stock_levels_csv(const RunArtifacts &run);

std::string comparison_json(const ComparisonReport &report);
std::string comparison_csv(const ComparisonReport &report);

/// Writes every run artifact into `dir` (created if needed): trace.jsonl,
/// ledger.jsonl, costs.jsonl, kpi.json, satisfaction.csv, delivery_times.csv,
/// stock_levels.csv and scenario.yaml. Throws IoError.
void write_run_artifacts(const std::filesystem::path &dir, const RunResult &result,
                         const Scenario &scenario);
KpiReport read_kpi_report(const std::filesystem::path &dir);
void write_comparison(const std::filesystem::path &dir, const ComparisonReport &report);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace vcsim
