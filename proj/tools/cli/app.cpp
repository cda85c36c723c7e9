#include "app.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace qmult::cli {
namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> p;
  std::optional<std::size_t> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> tol;
  std::optional<std::size_t> threads;
  bool timings = false;
};

void add_flags(CLI::App& sub, Flags& flags) {
  sub.add_option("--config", flags.config, "YAML run configuration")->check(CLI::ExistingFile);
  sub.add_option("--p", flags.p, "comma-separated norm orders, e.g. 1,2,inf");
  sub.add_option("--restarts", flags.restarts, "random starting points per optimization")->check(CLI::PositiveNumber);
  sub.add_option("--seed", flags.seed, "master seed (unsigned 64-bit)");
  sub.add_option("--out", flags.out, "write the report to this path instead of stdout");
  sub.add_option("--format", flags.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--tol", flags.tol, "violation threshold for multiplicativity checks")->check(CLI::PositiveNumber);
  sub.add_option("--threads", flags.threads, "worker threads for restarts")->check(CLI::PositiveNumber);
  sub.add_flag("--timings", flags.timings, "include wall-clock timings (breaks byte reproducibility)");
}

RunConfig resolve(const std::string& command, const Flags& flags) {
  RunConfig config;
  config.command = command;
  config.p = default_orders(command);
  if (flags.config) load_config_file(*flags.config, config);
  if (flags.p) config.p = parse_order_list(*flags.p);
  if (flags.restarts) config.restarts = *flags.restarts;
  if (flags.seed) config.seed = *flags.seed;
  if (flags.out) config.out = *flags.out;
  if (flags.format) config.format = *flags.format == "csv" ? OutputFormat::csv : OutputFormat::json;
  if (flags.tol) config.tol = *flags.tol;
  if (flags.threads) config.threads = *flags.threads;
  config.timings = flags.timings;
  return config;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximal output purity and multiplicativity checks for quantum channels", "qmult"};
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"nu", "optimize the maximal output p-norm of one channel"},
      {"check-mult", "compare nu_p of a tensor product with the product of the factors' nu_p"},
      {"verify-lemma", "run seeded batches of the trace bound and the permutation identity"},
      {"search", "sample random channel pairs and look for multiplicativity gaps"},
      {"validate", "check complete positivity and trace preservation"},
  };
  for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "qmult: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string command;
  for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();

  try {
    const RunConfig config = resolve(command, flags);
    const auto start = std::chrono::steady_clock::now();
    CommandOutput result = run_command(config);
    if (config.timings) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      result.report["timings"] = nlohmann::json{{"total_seconds", elapsed.count()}};
    }

    const std::string text =
        config.format == OutputFormat::csv ? render_csv(result.table) : render_json(result.report);
    if (config.out) {
      std::ofstream file(*config.out, std::ios::binary);
      if (!file) throw ConfigError(*config.out + ": cannot open output file");
      file << text;
      if (!file) throw ConfigError(*config.out + ": write failed");
    } else {
      out << text;
    }
    if (!result.passed) {
      err << "qmult " << command << ": verdict failure (see report)\n";
      return kExitVerdictFailure;
    }
    return kExitPass;
  } catch (const ConfigError& e) {
    err << "qmult " << command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "qmult " << command << ": invalid input: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace qmult::cli
