#include "mqc/runner/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "mqc/errors.hpp"

namespace mqc::runner {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& field, const std::string& msg) {
  throw ConfigError(origin + ": " + field + ": " + msg);
}

// Typed access to one JSON object. Every value read is copied into `out`,
// with the default when the key is absent; finish() rejects unknown keys.
class Reader {
 public:
  Reader(const json& obj, std::string path, json& out, const std::string& origin)
      : obj_(obj), path_(std::move(path)), out_(out), origin_(origin) {
    if (!obj_.is_object()) fail(origin_, path_, "expected an object");
    out_ = json::object();
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] void error(const std::string& key, const std::string& msg) const {
    fail(origin_, field(key), msg);
  }
  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* get(const std::string& key, bool required) {
    seen_.insert(key);
    if (!obj_.contains(key)) {
      if (required) error(key, "required field missing");
      return nullptr;
    }
    return &obj_.at(key);
  }

  long long integer(const std::string& key, long long lo, long long hi,
                    std::optional<long long> def = std::nullopt) {
    const json* v = get(key, !def);
    long long x = def.value_or(0);
    if (v) {
      if (!v->is_number_integer()) error(key, "expected an integer");
      x = v->get<long long>();
    }
    if (x < lo || x > hi) {
      error(key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "]");
    }
    out_[key] = x;
    return x;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t def) {
    const json* v = get(key, false);
    std::uint64_t x = def;
    if (v) {
      if (!v->is_number_unsigned()) error(key, "expected a non-negative integer");
      x = v->get<std::uint64_t>();
    }
    out_[key] = x;
    return x;
  }

  double number(const std::string& key, double lo, double hi, std::optional<double> def = std::nullopt,
                bool open_lo = false) {
    const json* v = get(key, !def);
    double x = def.value_or(0.0);
    if (v) {
      if (!v->is_number()) error(key, "expected a number");
      x = v->get<double>();
    }
    check_number(key, x, lo, hi, open_lo);
    out_[key] = x;
    return x;
  }

  std::optional<double> optional_number(const std::string& key, double lo, double hi, bool open_lo) {
    const json* v = get(key, false);
    if (!v || v->is_null()) {
      out_[key] = nullptr;
      return std::nullopt;
    }
    if (!v->is_number()) error(key, "expected a number or null");
    const double x = v->get<double>();
    check_number(key, x, lo, hi, open_lo);
    out_[key] = x;
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = get(key, false);
    bool x = def;
    if (v) {
      if (!v->is_boolean()) error(key, "expected true or false");
      x = v->get<bool>();
    }
    out_[key] = x;
    return x;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> def = std::nullopt) {
    const json* v = get(key, !def);
    std::string x = def.value_or("");
    if (v) {
      if (!v->is_string()) error(key, "expected a string");
      x = v->get<std::string>();
    }
    check_choice(key, x, allowed);
    out_[key] = x;
    return x;
  }

  std::vector<double> numbers(const std::string& key, double lo, double hi,
                              std::optional<std::vector<double>> def = std::nullopt) {
    const json* v = get(key, !def);
    std::vector<double> xs = def.value_or(std::vector<double>{});
    if (v) {
      if (!v->is_array()) error(key, "expected an array of numbers");
      xs.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string k = key + "[" + std::to_string(i) + "]";
        if (!(*v)[i].is_number()) error(k, "expected a number");
        xs.push_back((*v)[i].get<double>());
        check_number(k, xs.back(), lo, hi, false);
      }
    }
    if (xs.empty()) error(key, "must not be empty");
    out_[key] = xs;
    return xs;
  }

  std::vector<int> integers(const std::string& key, int lo, int hi,
                            std::optional<std::vector<int>> def = std::nullopt) {
    const json* v = get(key, !def);
    std::vector<int> xs = def.value_or(std::vector<int>{});
    if (v) {
      if (!v->is_array()) error(key, "expected an array of integers");
      xs.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string k = key + "[" + std::to_string(i) + "]";
        if (!(*v)[i].is_number_integer()) error(k, "expected an integer");
        const long long x = (*v)[i].get<long long>();
        if (x < lo || x > hi) {
          error(k, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
        }
        xs.push_back(static_cast<int>(x));
      }
    }
    if (xs.empty()) error(key, "must not be empty");
    out_[key] = xs;
    return xs;
  }

  std::vector<std::string> choices(const std::string& key, const std::vector<std::string>& allowed,
                                   std::vector<std::string> def) {
    const json* v = get(key, false);
    std::vector<std::string> xs = std::move(def);
    if (v) {
      if (!v->is_array()) error(key, "expected an array of strings");
      xs.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string k = key + "[" + std::to_string(i) + "]";
        if (!(*v)[i].is_string()) error(k, "expected a string");
        xs.push_back((*v)[i].get<std::string>());
        check_choice(k, xs.back(), allowed);
      }
    }
    if (xs.empty()) error(key, "must not be empty");
    out_[key] = xs;
    return xs;
  }

  json& out() { return out_; }
  const std::string& path() const { return path_; }
  const std::string& origin() const { return origin_; }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) error(k, "unknown field");
    }
  }

 private:
  void check_number(const std::string& key, double x, double lo, double hi, bool open_lo) const {
    if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
      std::ostringstream os;
      os << "value " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      error(key, os.str());
    }
  }

  void check_choice(const std::string& key, const std::string& x,
                    const std::vector<std::string>& allowed) const {
    if (std::find(allowed.begin(), allowed.end(), x) != allowed.end()) return;
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    error(key, "'" + x + "' is not one of: " + list);
  }

  const json& obj_;
  std::string path_;
  json& out_;
  const std::string& origin_;
  std::set<std::string> seen_;
};

constexpr int kMaxScanSpins = 40;
constexpr int kMaxOracleSpins = 8;

std::vector<int> even_orders(int n) {
  std::vector<int> v;
  for (int m = 2; m <= n; m += 2) v.push_back(m);
  return v;
}

ClusterSpec read_cluster(Reader& r, int n_spins) {
  ClusterSpec c;
  c.n_spins = n_spins;
  c.co_max = static_cast<int>(r.integer("co_max", 0, n_spins, n_spins - n_spins % 2));
  c.weight_mode = parse_weight_mode(r.choice("weight", {"equal", "gaussian"}, "equal"));
  c.gaussian_width = r.optional_number("gaussian_width", 0.0, 1e6, true);
  c.mixing = r.number("mixing", 0.0, 1.0, 1.0);
  try {
    c.validate();
  } catch (const SpecError& e) {
    r.error("co_max", e.what());
  }
  return c;
}

InitialState read_initial(Reader& parent, int n_spins) {
  InitialState s;
  const json* v = parent.get("initial", false);
  json& out = parent.out()["initial"];
  const json obj = !v ? json{{"state", "thermal"}} : v->is_string() ? json{{"state", *v}} : *v;
  Reader r(obj, parent.field("initial"), out, parent.origin());
  const std::string kind = r.choice("state", {"thermal", "cluster", "ghz"});
  if (kind == "cluster") {
    s.kind = InitialKind::Cluster;
    s.cluster = read_cluster(r, n_spins);
  } else if (kind == "ghz") {
    s.kind = InitialKind::Ghz;
  }
  s.dephasing = r.number("dephasing", 0.0, 1.0, 0.0);
  r.finish();
  return s;
}

EvolutionConfig read_evolution(Reader& parent) {
  EvolutionConfig e;
  const json* v = parent.get("evolution", false);
  json& out = parent.out()["evolution"];
  const json obj = v ? *v : json::object();
  Reader r(obj, parent.field("evolution"), out, parent.origin());
  e.coupling = r.number("coupling", -1e12, 1e12, 1.0);
  e.cycle_time = r.number("cycle_time", 0.0, 1e12, 1.0, true);
  e.loops_prepare = static_cast<int>(r.integer("loops_prepare", 0, 100000, 0));
  e.loops_reverse = static_cast<int>(r.integer("loops_reverse", 0, 100000, 0));
  e.jitter = r.number("jitter", 0.0, 1e3, 0.0);
  e.c = r.number("c", 0.0, 1e6, default_dissipator_constant());
  e.steps_per_loop = static_cast<int>(r.integer("steps_per_loop", 1, 1 << 20, 16));
  e.tolerance = r.number("tolerance", 0.0, 1.0, 1e-10, true);
  e.plan = parse_run_plan(r.choice("plan", {"echo-matched", "partial-reversal"}, "echo-matched"));
  e.dephasing = r.number("dephasing", 0.0, 1.0, 0.0);
  e.integrator = parse_propagation_method(r.choice("integrator", {"rk4", "expm", "taylor"}, "rk4"));
  r.finish();
  try {
    e.validate();
  } catch (const ParameterError& err) {
    r.error("loops_reverse", err.what());
  }
  return e;
}

void read_pipeline(Reader& r, Pipeline& p) {
  const int max_n = p.type == "basis-info" ? 64 : p.type == "oracle-validate" ? kMaxOracleSpins
                                                                              : kMaxScanSpins;
  if (p.type == "basis-info") {
    BasisInfoParams b;
    b.n_spins = static_cast<int>(r.integer("n_spins", 1, max_n));
    b.labels = r.boolean("labels", true);
    p.basis_info = b;
  } else if (p.type == "build-cluster") {
    BuildClusterParams b;
    const int n = static_cast<int>(r.integer("n_spins", 1, max_n));
    b.cluster = read_cluster(r, n);
    b.dephasing = r.number("dephasing", 0.0, 1.0, 0.0);
    p.build_cluster = b;
  } else if (p.type == "mqc-scan") {
    ScanParams s;
    s.n_spins = static_cast<int>(r.integer("n_spins", 1, max_n));
    s.initial = read_initial(r, s.n_spins);
    s.evolution = read_evolution(r);
    s.phase_points = static_cast<int>(r.integer("phase_points", 2, 100000, 181));
    s.suppress_zero = r.boolean("suppress_zero", false);
    const std::string m = r.choice("method", {"auto", "direct", "adjoint"}, "auto");
    s.method = m == "direct" ? ScanMethod::Direct : m == "adjoint" ? ScanMethod::Adjoint : ScanMethod::Auto;
    s.fit = r.boolean("fit", true);
    p.scan = s;
  } else if (p.type == "jitter-sweep") {
    JitterSweepParams s;
    s.n_spins = static_cast<int>(r.integer("n_spins", 1, max_n));
    s.initial = read_initial(r, s.n_spins);
    s.evolution = read_evolution(r);
    s.deltas = r.numbers("deltas", 0.0, 1e3);
    s.m_c = r.integers("m_c", 0, s.n_spins, even_orders(s.n_spins));
    for (std::size_t i = 0; i < s.m_c.size(); ++i) {
      if (s.m_c[i] % 2) r.error("m_c[" + std::to_string(i) + "]", "must be even");
    }
    s.phase_points = static_cast<int>(r.integer("phase_points", 2, 100000, 181));
    s.suppress_zero = r.boolean("suppress_zero", true);
    p.jitter_sweep = s;
  } else if (p.type == "qfi-sweep") {
    QfiSweepParams s;
    s.n_spins = static_cast<int>(r.integer("n_spins", 2, max_n));
    s.m_c = r.integers("m_c", 2, s.n_spins, even_orders(s.n_spins));
    for (std::size_t i = 0; i < s.m_c.size(); ++i) {
      if (s.m_c[i] % 2) r.error("m_c[" + std::to_string(i) + "]", "must be even");
    }
    s.p = r.numbers("p", 0.0, 1.0);
    for (const auto& m : r.choices("modes", {"equal", "gaussian"}, {"equal", "gaussian"})) {
      s.modes.push_back(parse_weight_mode(m));
    }
    s.gaussian_width = r.optional_number("gaussian_width", 0.0, 1e6, true);
    s.mixing = r.number("mixing", 0.0, 1.0, 1.0);
    p.qfi_sweep = s;
  } else {
    OracleParams o;
    o.n_spins = r.integers("n_spins", 1, max_n, std::vector<int>{2, 3, 4, 5, 6});
    o.samples = static_cast<int>(r.integer("samples", 1, 10000, 20));
    p.oracle = o;
  }
}

RunConfig parse_document(const json& doc, const std::string& origin) {
  RunConfig cfg;
  json resolved;
  Reader top(doc, "", resolved, origin);
  cfg.seed = top.unsigned_integer("seed", 0);
  cfg.plots = top.boolean("plots", false);
  cfg.threads = static_cast<int>(top.integer("threads", 1, 1024, 1));
  resolved.erase("threads");

  const json* list = top.get("pipelines", true);
  if (!list->is_array()) top.error("pipelines", "expected an array");
  if (list->empty()) top.error("pipelines", "at least one pipeline is required");
  json out_list = json::array();
  std::set<std::pair<std::string, std::string>> outputs;
  static const std::regex name_re("[A-Za-z0-9_][A-Za-z0-9_.-]*");
  for (std::size_t i = 0; i < list->size(); ++i) {
    json out;
    Reader r((*list)[i], "pipelines[" + std::to_string(i) + "]", out, origin);
    Pipeline p;
    p.type = r.choice("type", pipeline_types());
    if (r.has("name")) {
      const json* nm = r.get("name", true);
      if (!nm->is_string() || !std::regex_match(nm->get<std::string>(), name_re)) {
        r.error("name", "expected a plain directory name");
      }
      p.name = nm->get<std::string>();
      out["name"] = p.name;
    }
    if (!outputs.insert({p.name, p.type}).second) {
      r.error("name", "another " + p.type + " pipeline writes to the same directory");
    }
    read_pipeline(r, p);
    r.finish();
    out_list.push_back(out);
    cfg.pipelines.push_back(std::move(p));
  }
  resolved["pipelines"] = out_list;
  top.finish();
  cfg.resolved = resolved;
  return cfg;
}

}  // namespace

const std::vector<std::string>& pipeline_types() {
  static const std::vector<std::string> t{"basis-info", "build-cluster", "mqc-scan",
                                          "jitter-sweep", "qfi-sweep", "oracle-validate"};
  return t;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string RunConfig::run_id() const { return sha256_hex(resolved.dump()).substr(0, 16); }

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + at, '\n'));
    const std::size_t nl = text.rfind('\n', at == 0 ? 0 : at - 1);
    const std::size_t col = nl == std::string::npos || at == 0 ? at + 1 : at - nl;
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      (pos == std::string::npos ? what : what.substr(pos)));
  }
  if (doc.is_object() && doc.contains("run_id") && doc.contains("parameters")) {
    doc = doc.at("parameters");
  }
  RunConfig cfg = parse_document(doc, origin);
  cfg.source_digest = sha256_hex(text);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace mqc::runner
