#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmult/channels.hpp"
#include "qmult/norm_order.hpp"

namespace qmult::cli {

// Malformed configuration or usage; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { json, csv };

struct LemmaConfig {
  std::size_t instances = 1000;      // trace-bound instances
  std::size_t cs_instances = 200;    // permutation-identity instances
  std::size_t max_m = 4;
  std::size_t max_n = 4;
  std::size_t cs_max_m = 3;
  std::size_t cs_max_n = 3;
  std::vector<std::size_t> dims{2, 3};
  double rank_one_fraction = 0.5;
};

struct SearchConfig {
  std::size_t samples = 8;
  std::size_t factors = 2;
  std::size_t dim = 2;
  std::size_t kraus = 3;
  std::string family = "random-kraus";   // or "depolarizing"
};

struct RunConfig {
  std::string command;
  std::string source = "<defaults>";

  // Channel spec for nu / validate, factor specs for check-mult. Kept in their
  // canonical JSON form so reports can echo them exactly.
  std::optional<nlohmann::json> channel;
  std::vector<nlohmann::json> factors;

  std::vector<NormOrder> p;
  std::size_t restarts = 64;
  std::uint64_t seed = 1;
  double tol = 1e-7;                 // violation threshold
  double ascent_tol = 1e-12;         // ascent convergence
  double ascent_slack = 1e-6;
  std::size_t max_iterations = 1000;
  std::size_t threads = 1;
  std::size_t max_dim = 64;
  std::size_t multiindex_cap = 1'000'000;

  LemmaConfig lemma;
  SearchConfig search;

  OutputFormat format = OutputFormat::json;
  std::optional<std::string> out;
  bool timings = false;
};

std::vector<NormOrder> default_orders(const std::string& command);

// Reads a YAML config file into `config`. Unknown keys are rejected with the
// offending field and line.
void load_config_file(const std::string& path, RunConfig& config);
void load_config_text(const std::string& text, const std::string& source, RunConfig& config);

// "1,2,inf" -> orders
std::vector<NormOrder> parse_order_list(const std::string& text);

// Builds the channel described by a canonical spec. Throws ConfigError.
QuantumChannel build_channel(const nlohmann::json& spec);

// Canonical spec of a channel, the inverse of build_channel.
nlohmann::json channel_spec(const QuantumChannel& channel);

// Resolved configuration as echoed in reports.
nlohmann::json to_json(const RunConfig& config);

}  // namespace qmult::cli
