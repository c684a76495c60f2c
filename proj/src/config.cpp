#include "mcs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "mcs/errors.hpp"

namespace mcs {

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::auction: return "auction";
    case Algorithm::auction_infinite: return "auction-infinite";
    case Algorithm::nearest: return "nearest";
    case Algorithm::nearest_infinite: return "nearest-infinite";
    case Algorithm::bruteforce: return "bruteforce";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::auction, Algorithm::auction_infinite, Algorithm::nearest,
                 Algorithm::nearest_infinite, Algorithm::bruteforce})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

const char* to_string(SweepVar var) {
  switch (var) {
    case SweepVar::none: return "none";
    case SweepVar::clusters: return "clusters";
    case SweepVar::delta: return "delta";
    case SweepVar::epsilon: return "epsilon";
  }
  return "?";
}

std::optional<SweepVar> parse_sweep_var(std::string_view name) {
  for (auto v : {SweepVar::none, SweepVar::clusters, SweepVar::delta, SweepVar::epsilon})
    if (name == to_string(v)) return v;
  return std::nullopt;
}

namespace {

// ---------------------------------------------------------------------------
// Minimal reader for the TOML subset the config uses: [section] headers,
// key = value pairs, # comments, and values that are strings, booleans,
// integers, floats, or single-line arrays of those.

using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using Array = std::vector<Scalar>;
using Value = std::variant<Scalar, Array>;

struct Entry {
  Value value;
  int line = 0;
};

using Document = std::map<std::string, std::map<std::string, Entry>>;

class Cursor {
 public:
  Cursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool consume(char c) {
    skip_space();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line_); }

  Value value() {
    skip_space();
    if (peek() == '[') {
      ++pos_;
      Array items;
      skip_space();
      if (consume(']')) return items;
      for (;;) {
        items.push_back(scalar());
        if (consume(']')) break;
        if (!consume(',')) fail("expected ',' or ']' in array");
        if (consume(']')) break;  // trailing comma
      }
      return items;
    }
    return scalar();
  }

 private:
  Scalar scalar() {
    skip_space();
    const char c = peek();
    if (c == '"') return string();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  std::string string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
        continue;
      }
      out += c;
    }
    fail("unterminated string");
  }

  Scalar number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' ||
          c == '_')
        ++pos_;
      else
        break;
    }
    std::string token;
    for (char c : text_.substr(start, pos_ - start))
      if (c != '_') token += c;
    if (token.empty()) fail("expected a value");

    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    const char* first = token.data() + (token[0] == '+' ? 1 : 0);
    const char* last = token.data() + token.size();
    if (!is_float) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) return v;
    } else {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last && std::isfinite(v)) return v;
    }
    fail("invalid value '" + token + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;

  friend Document parse_document(std::string_view);
  friend std::string read_key(Cursor&);
};

bool key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string read_key(Cursor& cur) {
  cur.skip_space();
  const std::size_t start = cur.pos_;
  while (cur.pos_ < cur.text_.size() && key_char(cur.text_[cur.pos_])) ++cur.pos_;
  if (cur.pos_ == start) cur.fail("expected a key");
  return std::string(cur.text_.substr(start, cur.pos_ - start));
}

const std::set<std::string> kSections{"scenario", "channel", "auction", "run"};

Document parse_document(std::string_view text) {
  Document doc;
  std::string section;
  std::set<std::string> seen_sections;
  int line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    begin = end + 1;

    Cursor cur(line, line_no);
    if (cur.done()) continue;
    if (cur.consume('[')) {
      section = read_key(cur);
      if (!cur.consume(']')) cur.fail("expected ']' after section name");
      if (!cur.done()) cur.fail("unexpected text after section header");
      if (!seen_sections.insert(section).second) cur.fail("duplicate section [" + section + "]");
      if (!kSections.count(section)) cur.fail("unknown section [" + section + "]");
      doc[section];
      continue;
    }
    const std::string key = read_key(cur);
    if (!cur.consume('=')) cur.fail("expected '=' after key '" + key + "'");
    Value value = cur.value();
    if (!cur.done()) cur.fail("unexpected text after value of '" + key + "'");
    if (section.empty()) cur.fail("key '" + key + "' appears before any [section]");
    auto [it, inserted] = doc[section].try_emplace(key, Entry{std::move(value), line_no});
    if (!inserted) cur.fail("duplicate key '" + key + "' in [" + section + "]");
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Typed extraction. Type mismatches are syntax-level errors tied to a line.

class Section {
 public:
  Section(std::string name, std::map<std::string, Entry> entries)
      : name_(std::move(name)), entries_(std::move(entries)) {}

  template <typename Fn>
  void take(const std::string& key, Fn&& fn) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    fn(it->second);
    entries_.erase(it);
  }

  void real(const std::string& key, double& out) {
    take(key, [&](const Entry& e) { out = as_real(e, key); });
  }
  void real(const std::string& key, std::optional<double>& out) {
    take(key, [&](const Entry& e) { out = as_real(e, key); });
  }
  void integer(const std::string& key, int& out) {
    take(key, [&](const Entry& e) { out = static_cast<int>(as_int(e, key, INT32_MIN, INT32_MAX)); });
  }
  void integer(const std::string& key, std::optional<int>& out) {
    take(key, [&](const Entry& e) { out = static_cast<int>(as_int(e, key, INT32_MIN, INT32_MAX)); });
  }
  void text(const std::string& key, std::string& out) {
    take(key, [&](const Entry& e) { out = as_string(e, key); });
  }
  void boolean(const std::string& key, bool& out) {
    take(key, [&](const Entry& e) {
      const auto* s = std::get_if<Scalar>(&e.value);
      if (!s || !std::holds_alternative<bool>(*s)) fail(e, key, "a boolean");
      out = std::get<bool>(*s);
    });
  }

  static double scalar_real(const Scalar& s, const Entry& e, const std::string& key) {
    if (const auto* d = std::get_if<double>(&s)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
    fail(e, key, "a number");
  }
  static double as_real(const Entry& e, const std::string& key) {
    const auto* s = std::get_if<Scalar>(&e.value);
    if (!s) fail(e, key, "a number");
    return scalar_real(*s, e, key);
  }
  static std::int64_t as_int(const Entry& e, const std::string& key, std::int64_t lo,
                             std::int64_t hi) {
    const auto* s = std::get_if<Scalar>(&e.value);
    const auto* i = s ? std::get_if<std::int64_t>(s) : nullptr;
    if (!i) fail(e, key, "an integer");
    if (*i < lo || *i > hi) throw ConfigError("'" + key + "' is out of range", e.line);
    return *i;
  }
  static std::string as_string(const Entry& e, const std::string& key) {
    const auto* s = std::get_if<Scalar>(&e.value);
    const auto* str = s ? std::get_if<std::string>(s) : nullptr;
    if (!str) fail(e, key, "a string");
    return *str;
  }
  static const Array& as_array(const Entry& e, const std::string& key) {
    const auto* a = std::get_if<Array>(&e.value);
    if (!a) fail(e, key, "an array");
    return *a;
  }
  [[noreturn]] static void fail(const Entry& e, const std::string& key, const char* expected) {
    throw ConfigError("'" + key + "' must be " + expected, e.line);
  }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    const auto& [key, entry] = *entries_.begin();
    throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", entry.line);
  }

 private:
  std::string name_;
  std::map<std::string, Entry> entries_;
};

}  // namespace

std::vector<std::string> ExperimentConfig::problems() const {
  std::vector<std::string> out;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) out.push_back(what);
  };
  const auto& s = scenario;
  check(s.area_m > 0.0 && std::isfinite(s.area_m), "scenario.area_m must be positive");
  check(s.vehicles >= 1, "scenario.vehicles must be >= 1");
  check(s.clusters >= 1, "scenario.clusters must be >= 1");
  check(s.slots >= 1, "scenario.slots must be >= 1");
  if (s.capacity)
    check(*s.capacity >= 1 && *s.capacity <= s.slots,
          "scenario.capacity must lie in [1, scenario.slots]");
  check(std::isfinite(s.path_loss_exp) && s.path_loss_exp >= 0.0,
        "scenario.path_loss_exp must be non-negative");
  check(std::isfinite(s.tx_power_dbm), "scenario.tx_power_dbm must be finite");

  const auto& c = channel;
  check(c.b0_hz > 0.0 && std::isfinite(c.b0_hz), "channel.b0_hz must be positive");
  check(c.slot_s > 0.0 && std::isfinite(c.slot_s), "channel.slot_s must be positive");
  check(c.n_max >= 1, "channel.n_max must be >= 1");
  check(c.sigma2 > 0.0 && std::isfinite(c.sigma2), "channel noise power must be positive");
  check(c.epsilon > 0.0 && c.epsilon < 1.0, "channel.epsilon must lie in (0, 1)");

  check(auction.delta > 0.0 && std::isfinite(auction.delta), "auction.delta must be positive");
  if (auction.c_override)
    check(std::isfinite(*auction.c_override), "auction.c_override must be finite");

  check(run.replications >= 1, "run.replications must be >= 1");
  check(!run.algorithms.empty(), "run.algorithms must not be empty");
  check(run.threads >= 1, "run.threads must be >= 1");
  check(!run.output.empty(), "run.output must not be empty");
  if (run.sweep_var == SweepVar::none) {
    check(run.sweep_grid.empty(), "run.sweep_grid requires run.sweep_var");
  } else {
    check(!run.sweep_grid.empty(), "run.sweep_grid must not be empty");
    for (double v : run.sweep_grid) {
      switch (run.sweep_var) {
        case SweepVar::clusters:
          check(v >= 1.0 && v == std::floor(v) && v <= 1e6,
                "run.sweep_grid: cluster counts must be positive integers");
          break;
        case SweepVar::delta:
          check(v > 0.0 && std::isfinite(v), "run.sweep_grid: delta values must be positive");
          break;
        case SweepVar::epsilon:
          check(v > 0.0 && v < 1.0, "run.sweep_grid: epsilon values must lie in (0, 1)");
          break;
        case SweepVar::none: break;
      }
    }
  }
  return out;
}

void ExperimentConfig::validate() const {
  auto issues = problems();
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::vector<double> ExperimentConfig::sweep_points() const {
  if (run.sweep_var == SweepVar::none) return {std::numeric_limits<double>::quiet_NaN()};
  return run.sweep_grid;
}

ExperimentConfig ExperimentConfig::at_sweep_point(double value) const {
  ExperimentConfig out = *this;
  switch (run.sweep_var) {
    case SweepVar::clusters: out.scenario.clusters = static_cast<int>(value); break;
    case SweepVar::delta: out.auction.delta = value; break;
    case SweepVar::epsilon: out.channel.epsilon = value; break;
    case SweepVar::none: break;
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  Document doc = parse_document(text);
  ExperimentConfig config;
  {
    Section s("scenario", doc["scenario"]);
    auto& sc = config.scenario;
    s.real("area_m", sc.area_m);
    s.integer("vehicles", sc.vehicles);
    s.integer("clusters", sc.clusters);
    s.integer("slots", sc.slots);
    s.integer("capacity", sc.capacity);
    s.real("path_loss_exp", sc.path_loss_exp);
    s.real("tx_power_dbm", sc.tx_power_dbm);
    s.reject_leftovers();
  }
  {
    Section s("channel", doc["channel"]);
    auto& ch = config.channel;
    s.real("b0_hz", ch.b0_hz);
    s.real("slot_s", ch.slot_s);
    s.integer("n_max", ch.n_max);
    std::optional<double> sigma2;
    std::optional<double> noise_dbm;
    int noise_line = 0;
    s.take("sigma2", [&](const Entry& e) {
      sigma2 = Section::as_real(e, "sigma2");
      noise_line = e.line;
    });
    s.take("noise_dbm_per_hz", [&](const Entry& e) {
      noise_dbm = Section::as_real(e, "noise_dbm_per_hz");
      noise_line = e.line;
    });
    if (sigma2 && noise_dbm)
      throw ConfigError("set either sigma2 or noise_dbm_per_hz, not both", noise_line);
    if (sigma2) ch.sigma2 = *sigma2;
    if (noise_dbm) ch.sigma2 = dbm_to_watts(*noise_dbm);
    s.real("epsilon", ch.epsilon);
    s.take("blocklength", [&](const Entry& e) {
      const auto mode = Section::as_string(e, "blocklength");
      if (mode == "finite")
        ch.mode = Blocklength::finite;
      else if (mode == "infinite")
        ch.mode = Blocklength::infinite;
      else
        throw ConfigError("blocklength must be \"finite\" or \"infinite\"", e.line);
    });
    s.reject_leftovers();
  }
  {
    Section s("auction", doc["auction"]);
    s.real("delta", config.auction.delta);
    s.real("c_override", config.auction.c_override);
    s.reject_leftovers();
  }
  {
    Section s("run", doc["run"]);
    auto& run = config.run;
    s.take("seed", [&](const Entry& e) {
      run.seed = static_cast<std::uint64_t>(
          Section::as_int(e, "seed", 0, std::numeric_limits<std::int64_t>::max()));
    });
    s.integer("replications", run.replications);
    s.take("algorithms", [&](const Entry& e) {
      run.algorithms.clear();
      for (const auto& item : Section::as_array(e, "algorithms")) {
        const auto* name = std::get_if<std::string>(&item);
        const auto algo = name ? parse_algorithm(*name) : std::nullopt;
        if (!algo) throw ConfigError("unknown algorithm in 'algorithms'", e.line);
        run.algorithms.push_back(*algo);
      }
    });
    s.take("sweep_var", [&](const Entry& e) {
      const auto var = parse_sweep_var(Section::as_string(e, "sweep_var"));
      if (!var) throw ConfigError("sweep_var must be none, clusters, delta or epsilon", e.line);
      run.sweep_var = *var;
    });
    s.take("sweep_grid", [&](const Entry& e) {
      run.sweep_grid.clear();
      for (const auto& item : Section::as_array(e, "sweep_grid"))
        run.sweep_grid.push_back(Section::scalar_real(item, e, "sweep_grid"));
    });
    s.text("output", run.output);
    s.boolean("trace", run.trace);
    s.integer("threads", run.threads);
    s.reject_leftovers();
  }

  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  const auto& sc = config.scenario;
  j["scenario"] = {{"area_m", sc.area_m},
                   {"vehicles", sc.vehicles},
                   {"clusters", sc.clusters},
                   {"slots", sc.slots},
                   {"capacity", sc.effective_capacity()},
                   {"path_loss_exp", sc.path_loss_exp},
                   {"tx_power_dbm", sc.tx_power_dbm}};
  const auto& ch = config.channel;
  j["channel"] = {{"b0_hz", ch.b0_hz},     {"slot_s", ch.slot_s},   {"n_max", ch.n_max},
                  {"sigma2", ch.sigma2},   {"epsilon", ch.epsilon},
                  {"blocklength", to_string(ch.mode)}};
  j["auction"] = {{"delta", config.auction.delta}};
  j["auction"]["c_override"] =
      config.auction.c_override ? nlohmann::json(*config.auction.c_override) : nlohmann::json();
  const auto& run = config.run;
  nlohmann::json algorithms = nlohmann::json::array();
  for (auto a : run.algorithms) algorithms.push_back(to_string(a));
  j["run"] = {{"seed", run.seed},
              {"replications", run.replications},
              {"algorithms", algorithms},
              {"sweep_var", to_string(run.sweep_var)},
              {"sweep_grid", run.sweep_grid},
              {"output", run.output},
              {"trace", run.trace},
              {"threads", run.threads}};
  return j;
}

}  // namespace mcs
