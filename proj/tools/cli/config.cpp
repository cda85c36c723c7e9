#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace qmult::cli {
namespace {

using nlohmann::json;

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    const YAML::Mark mark = node.Mark();
    if (!mark.is_null()) os << ':' << mark.line + 1 << ':' << mark.column + 1;
    os << ": field '" << field << "': " << message;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& field) const {
    if (!node.IsMap()) fail(node, field, "expected a mapping");
  }

  void require_keys(const YAML::Node& node, const std::string& field, std::initializer_list<const char*> allowed) const {
    for (const auto& entry : node) {
      const auto key = entry.first.as<std::string>();
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(entry.first, join(field, key), "unknown key");
    }
  }

  double real(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    double value = 0.0;
    if (!YAML::convert<double>::decode(node, value) || !std::isfinite(value)) fail(node, field, "expected a finite number");
    return value;
  }

  std::size_t count(const YAML::Node& node, const std::string& field, std::size_t min_value = 0) const {
    if (!node.IsScalar()) fail(node, field, "expected a non-negative integer");
    long long value = 0;
    if (!YAML::convert<long long>::decode(node, value) || value < 0) fail(node, field, "expected a non-negative integer");
    if (static_cast<std::size_t>(value) < min_value)
      fail(node, field, "must be at least " + std::to_string(min_value));
    return static_cast<std::size_t>(value);
  }

  std::uint64_t seed(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected an unsigned 64-bit integer");
    std::uint64_t value = 0;
    if (!YAML::convert<std::uint64_t>::decode(node, value) || node.Scalar().starts_with("-"))
      fail(node, field, "expected an unsigned 64-bit integer");
    return value;
  }

  std::string text(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  NormOrder order(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(node, field, "expected a norm order (number >= 1 or inf)");
    try {
      return NormOrder::parse(node.Scalar());
    } catch (const std::exception& e) {
      fail(node, field, e.what());
    }
  }

  std::vector<NormOrder> orders(const YAML::Node& node, const std::string& field) const {
    std::vector<NormOrder> out;
    if (node.IsScalar()) {
      out.push_back(order(node, field));
    } else if (node.IsSequence() && node.size() > 0) {
      for (std::size_t i = 0; i < node.size(); ++i) out.push_back(order(node[i], index(field, i)));
    } else {
      fail(node, field, "expected a norm order or a nonempty list of them");
    }
    return out;
  }

  json channel(const YAML::Node& node, const std::string& field) const {
    require_map(node, field);
    const YAML::Node kind_node = node["kind"];
    if (!kind_node) fail(node, join(field, "kind"), "missing");
    const std::string kind = text(kind_node, join(field, "kind"));

    if (kind == "depolarizing") {
      require_keys(node, field, {"kind", "dim", "q"});
      if (!node["dim"]) fail(node, join(field, "dim"), "missing");
      if (!node["q"]) fail(node, join(field, "q"), "missing");
      const std::size_t d = count(node["dim"], join(field, "dim"), 2);
      const double q = real(node["q"], join(field, "q"));
      if (q < 0.0 || q > 1.0) fail(node["q"], join(field, "q"), "must lie in [0, 1]");
      return json{{"kind", "depolarizing"}, {"dim", d}, {"q", q}};
    }
    if (kind == "identity") {
      require_keys(node, field, {"kind", "dim"});
      if (!node["dim"]) fail(node, join(field, "dim"), "missing");
      return json{{"kind", "identity"}, {"dim", count(node["dim"], join(field, "dim"), 2)}};
    }
    if (kind == "kraus") {
      require_keys(node, field, {"kind", "matrices"});
      const YAML::Node mats = node["matrices"];
      const std::string mfield = join(field, "matrices");
      if (!mats) fail(node, mfield, "missing");
      if (!mats.IsSequence() || mats.size() == 0) fail(mats, mfield, "expected a nonempty list of matrices");
      json out_mats = json::array();
      std::size_t entries_expected = 0;
      for (std::size_t k = 0; k < mats.size(); ++k) {
        const std::string kfield = index(mfield, k);
        json entries = matrix_entries(mats[k], kfield);
        if (k == 0) {
          const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
          if (d * d != entries.size()) fail(mats[k], kfield, "entry count " + std::to_string(entries.size()) + " is not a square");
          if (d < 2) fail(mats[k], kfield, "dimension must be at least 2");
          entries_expected = entries.size();
        } else if (entries.size() != entries_expected) {
          fail(mats[k], kfield, "expected " + std::to_string(entries_expected) + " entries like the first matrix");
        }
        out_mats.push_back(std::move(entries));
      }
      return json{{"kind", "kraus"}, {"matrices", std::move(out_mats)}};
    }
    if (kind == "product") {
      require_keys(node, field, {"kind", "factors"});
      const YAML::Node facs = node["factors"];
      const std::string ffield = join(field, "factors");
      if (!facs) fail(node, ffield, "missing");
      if (!facs.IsSequence() || facs.size() == 0) fail(facs, ffield, "expected a nonempty list of channels");
      json out = json::array();
      for (std::size_t i = 0; i < facs.size(); ++i) out.push_back(channel(facs[i], index(ffield, i)));
      return json{{"kind", "product"}, {"factors", std::move(out)}};
    }
    fail(kind_node, join(field, "kind"), "unknown channel kind '" + kind + "' (depolarizing, kraus, identity, product)");
  }

  static std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
  }
  static std::string index(const std::string& parent, std::size_t i) {
    return parent + "[" + std::to_string(i) + "]";
  }

private:
  // Accepts a flat row-major list of [re, im] pairs or a list of rows of pairs.
  json matrix_entries(const YAML::Node& node, const std::string& field) const {
    if (!node.IsSequence() || node.size() == 0) fail(node, field, "expected a list of [re, im] pairs");
    json out = json::array();
    const bool nested = node[0].IsSequence() && node[0].size() > 0 && node[0][0].IsSequence();
    auto pair = [&](const YAML::Node& p, const std::string& f) {
      if (!p.IsSequence() || p.size() != 2) fail(p, f, "expected an [re, im] pair");
      out.push_back(json::array({real(p[0], f + "[0]"), real(p[1], f + "[1]")}));
    };
    if (!nested) {
      for (std::size_t i = 0; i < node.size(); ++i) pair(node[i], index(field, i));
      return out;
    }
    for (std::size_t r = 0; r < node.size(); ++r) {
      const YAML::Node row = node[r];
      if (!row.IsSequence() || row.size() != node.size()) fail(row, index(field, r), "expected a row of " + std::to_string(node.size()) + " pairs");
      for (std::size_t c = 0; c < row.size(); ++c) pair(row[c], index(index(field, r), c));
    }
    return out;
  }

  std::string source_;
};

void apply_lemma(const Reader& rd, const YAML::Node& node, LemmaConfig& lemma) {
  rd.require_map(node, "lemma");
  rd.require_keys(node, "lemma", {"instances", "cs_instances", "max_m", "max_n", "cs_max_m", "cs_max_n", "dims",
                                  "rank_one_fraction"});
  if (node["instances"]) lemma.instances = rd.count(node["instances"], "lemma.instances");
  if (node["cs_instances"]) lemma.cs_instances = rd.count(node["cs_instances"], "lemma.cs_instances");
  if (node["max_m"]) lemma.max_m = rd.count(node["max_m"], "lemma.max_m", 1);
  if (node["max_n"]) lemma.max_n = rd.count(node["max_n"], "lemma.max_n", 1);
  if (node["cs_max_m"]) lemma.cs_max_m = rd.count(node["cs_max_m"], "lemma.cs_max_m", 1);
  if (node["cs_max_n"]) lemma.cs_max_n = rd.count(node["cs_max_n"], "lemma.cs_max_n", 1);
  if (const YAML::Node dims = node["dims"]) {
    if (!dims.IsSequence() || dims.size() == 0) rd.fail(dims, "lemma.dims", "expected a nonempty list of dimensions");
    lemma.dims.clear();
    for (std::size_t i = 0; i < dims.size(); ++i) lemma.dims.push_back(rd.count(dims[i], Reader::index("lemma.dims", i), 2));
  }
  if (const YAML::Node f = node["rank_one_fraction"]) {
    lemma.rank_one_fraction = rd.real(f, "lemma.rank_one_fraction");
    if (lemma.rank_one_fraction < 0.0 || lemma.rank_one_fraction > 1.0)
      rd.fail(f, "lemma.rank_one_fraction", "must lie in [0, 1]");
  }
}

void apply_search(const Reader& rd, const YAML::Node& node, SearchConfig& search) {
  rd.require_map(node, "search");
  rd.require_keys(node, "search", {"samples", "factors", "dim", "kraus", "family"});
  if (node["samples"]) search.samples = rd.count(node["samples"], "search.samples", 1);
  if (node["factors"]) search.factors = rd.count(node["factors"], "search.factors", 1);
  if (node["dim"]) search.dim = rd.count(node["dim"], "search.dim", 2);
  if (node["kraus"]) search.kraus = rd.count(node["kraus"], "search.kraus", 1);
  if (const YAML::Node f = node["family"]) {
    search.family = rd.text(f, "search.family");
    if (search.family != "random-kraus" && search.family != "depolarizing")
      rd.fail(f, "search.family", "expected random-kraus or depolarizing");
  }
}

void apply_root(const Reader& rd, const YAML::Node& root, RunConfig& config) {
  if (root.IsNull()) return;
  rd.require_map(root, "<root>");
  rd.require_keys(root, "", {"channel", "factors", "p", "restarts", "seed", "tol", "ascent_tol", "ascent_slack",
                             "max_iterations", "threads", "max_dim", "multiindex_cap", "lemma", "search", "format", "out"});

  if (const YAML::Node n = root["channel"]) config.channel = rd.channel(n, "channel");
  if (const YAML::Node n = root["factors"]) {
    if (!n.IsSequence() || n.size() == 0) rd.fail(n, "factors", "expected a nonempty list of channels");
    config.factors.clear();
    for (std::size_t i = 0; i < n.size(); ++i) config.factors.push_back(rd.channel(n[i], Reader::index("factors", i)));
  }
  if (const YAML::Node n = root["p"]) config.p = rd.orders(n, "p");
  if (const YAML::Node n = root["restarts"]) config.restarts = rd.count(n, "restarts", 1);
  if (const YAML::Node n = root["seed"]) config.seed = rd.seed(n, "seed");
  if (const YAML::Node n = root["tol"]) {
    config.tol = rd.real(n, "tol");
    if (config.tol <= 0.0) rd.fail(n, "tol", "must be positive");
  }
  if (const YAML::Node n = root["ascent_tol"]) {
    config.ascent_tol = rd.real(n, "ascent_tol");
    if (config.ascent_tol <= 0.0) rd.fail(n, "ascent_tol", "must be positive");
  }
  if (const YAML::Node n = root["ascent_slack"]) {
    config.ascent_slack = rd.real(n, "ascent_slack");
    if (config.ascent_slack < 0.0) rd.fail(n, "ascent_slack", "must be non-negative");
  }
  if (const YAML::Node n = root["max_iterations"]) config.max_iterations = rd.count(n, "max_iterations", 1);
  if (const YAML::Node n = root["threads"]) config.threads = rd.count(n, "threads", 1);
  if (const YAML::Node n = root["max_dim"]) config.max_dim = rd.count(n, "max_dim", 2);
  if (const YAML::Node n = root["multiindex_cap"]) config.multiindex_cap = rd.count(n, "multiindex_cap", 1);
  if (const YAML::Node n = root["lemma"]) apply_lemma(rd, n, config.lemma);
  if (const YAML::Node n = root["search"]) apply_search(rd, n, config.search);
  if (const YAML::Node n = root["format"]) {
    const std::string f = rd.text(n, "format");
    if (f == "json") config.format = OutputFormat::json;
    else if (f == "csv") config.format = OutputFormat::csv;
    else rd.fail(n, "format", "expected json or csv");
  }
  if (const YAML::Node n = root["out"]) config.out = rd.text(n, "out");
}

ComplexMatrix kraus_matrix(const json& entries) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      const json& e = entries.at(static_cast<std::size_t>(r * d + c));
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return m;
}

}  // namespace

std::vector<NormOrder> default_orders(const std::string& command) {
  if (command == "nu") return {NormOrder(1.0), NormOrder(2.0), NormOrder::infinity()};
  if (command == "search") return {NormOrder(2.0), NormOrder(3.0)};
  return {NormOrder(2.0), NormOrder::infinity()};
}

void load_config_text(const std::string& text, const std::string& source, RunConfig& config) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  config.source = source;
  apply_root(Reader(source), root, config);
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  load_config_text(buffer.str(), path, config);
}

std::vector<NormOrder> parse_order_list(const std::string& text) {
  std::vector<NormOrder> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("--p: empty entry in '" + text + "'");
    try {
      out.push_back(NormOrder::parse(item.substr(first, last - first + 1)));
    } catch (const std::exception& e) {
      throw ConfigError("--p: " + std::string(e.what()));
    }
  }
  if (out.empty()) throw ConfigError("--p: expected at least one norm order");
  return out;
}

QuantumChannel build_channel(const json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "depolarizing") return QuantumChannel::depolarizing(spec.at("dim").get<std::size_t>(), spec.at("q").get<double>());
  if (kind == "identity") return QuantumChannel::identity(spec.at("dim").get<std::size_t>());
  if (kind == "kraus") {
    std::vector<ComplexMatrix> ops;
    for (const json& m : spec.at("matrices")) ops.push_back(kraus_matrix(m));
    return QuantumChannel::kraus(std::move(ops));
  }
  if (kind == "product") {
    std::vector<QuantumChannel> factors;
    for (const json& f : spec.at("factors")) factors.push_back(build_channel(f));
    return QuantumChannel::product(std::move(factors));
  }
  throw ConfigError("unknown channel kind '" + kind + "'");
}

json channel_spec(const QuantumChannel& channel) {
  return std::visit(
      [](const auto& form) -> json {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, DepolarizingForm>) {
          return json{{"kind", "depolarizing"}, {"dim", form.d}, {"q", form.q}};
        } else if constexpr (std::is_same_v<T, KrausForm>) {
          json mats = json::array();
          for (const ComplexMatrix& op : form.ops) {
            json entries = json::array();
            for (Eigen::Index r = 0; r < op.rows(); ++r)
              for (Eigen::Index c = 0; c < op.cols(); ++c) entries.push_back(json::array({op(r, c).real(), op(r, c).imag()}));
            mats.push_back(std::move(entries));
          }
          return json{{"kind", "kraus"}, {"matrices", std::move(mats)}};
        } else {
          json factors = json::array();
          for (const QuantumChannel& f : form.factors) factors.push_back(channel_spec(f));
          return json{{"kind", "product"}, {"factors", std::move(factors)}};
        }
      },
      channel.form());
}

json to_json(const RunConfig& config) {
  json p = json::array();
  for (const NormOrder& order : config.p) p.push_back(order.to_string());
  json out{
      {"command", config.command},
      {"source", config.source},
      {"p", std::move(p)},
      {"restarts", config.restarts},
      {"seed", config.seed},
      {"tol", config.tol},
      {"ascent_tol", config.ascent_tol},
      {"ascent_slack", config.ascent_slack},
      {"max_iterations", config.max_iterations},
      {"threads", config.threads},
      {"max_dim", config.max_dim},
      {"format", config.format == OutputFormat::json ? "json" : "csv"},
  };
  if (config.channel) out["channel"] = *config.channel;
  if (!config.factors.empty()) out["factors"] = config.factors;
  if (config.command == "verify-lemma") {
    out["multiindex_cap"] = config.multiindex_cap;
    out["lemma"] = json{{"instances", config.lemma.instances},   {"cs_instances", config.lemma.cs_instances},
                        {"max_m", config.lemma.max_m},           {"max_n", config.lemma.max_n},
                        {"cs_max_m", config.lemma.cs_max_m},     {"cs_max_n", config.lemma.cs_max_n},
                        {"dims", config.lemma.dims},             {"rank_one_fraction", config.lemma.rank_one_fraction}};
  }
  if (config.command == "search") {
    out["search"] = json{{"samples", config.search.samples},
                         {"factors", config.search.factors},
                         {"dim", config.search.dim},
                         {"kraus", config.search.kraus},
                         {"family", config.search.family}};
  }
  return out;
}

}  // namespace qmult::cli
