#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace qmult::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct CommandOutput {
  nlohmann::json report;
  CsvTable table;
  bool passed = false;
};

inline constexpr const char* kCandidateLabel = "unconfirmed — optimizer lower bounds only";

// Each command throws ConfigError for input it cannot run on; verdict
// failures are carried in the output instead.
CommandOutput run_nu(const RunConfig& config);
CommandOutput run_check_mult(const RunConfig& config);
CommandOutput run_verify_lemma(const RunConfig& config);
CommandOutput run_search(const RunConfig& config);
CommandOutput run_validate(const RunConfig& config);

CommandOutput run_command(const RunConfig& config);

std::string format_number(double value);
std::string render_csv(const CsvTable& table);
std::string render_json(const nlohmann::json& report);

}  // namespace qmult::cli
