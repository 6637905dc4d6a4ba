#include "bbh/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bbh/catalog.hpp"
#include "bbh/ffield.hpp"
#include "bbh/iso.hpp"
#include "bbh/measure.hpp"
#include "bbh/parallel.hpp"
#include "bbh/uniqueness.hpp"

namespace bbh {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      "p",    "g",     "c",       "D",          "N",
      "seed", "q",     "m",       "group",      "type",
      "mode", "out",   "check",   "workers",    "records",
      "cap-pc-order", "cap-concrete-order", "cap-iso-order", "cap-tuples", "cap-search", "cap-class-group"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      cfg.set(key, value);
    } catch (const ArgumentError& e) {
      throw ArgumentError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ArgumentError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ArgumentError("missing config key '" + key + "'");
  return it->second;
}

namespace {

long long parse_integer(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    // scientific shorthand such as 1e5
    try {
      std::size_t pos = 0;
      const double d = std::stod(s, &pos);
      if (pos == s.size() && d == std::floor(d) && std::abs(d) < 9e18) return static_cast<long long>(d);
    } catch (const std::exception&) {
    }
    throw ArgumentError("config key '" + key + "': '" + s + "' is not an integer");
  }
}

}  // namespace

long long Config::integer(const std::string& key) const { return parse_integer(key, str(key)); }

long long Config::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<long long> Config::integers(const std::string& key) const {
  std::vector<long long> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_integer(key, item));
  }
  if (out.empty()) throw ArgumentError("config key '" + key + "' is empty");
  return out;
}

bool Config::flag(const std::string& key) const {
  const std::string v = str(key, "0");
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ArgumentError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : values_) {
    if (k == "out" || k == "workers") continue;
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Caps caps_from_config(const Config& cfg) {
  Caps caps;
  auto take = [&](const char* key, std::uint64_t& slot) {
    if (!cfg.has(key)) return;
    const long long v = cfg.integer(key);
    if (v <= 0) throw ArgumentError(std::string("config key '") + key + "' must be positive");
    slot = static_cast<std::uint64_t>(v);
  };
  take("cap-pc-order", caps.pc_order);
  take("cap-concrete-order", caps.concrete_order);
  take("cap-iso-order", caps.exact_iso_order);
  take("cap-tuples", caps.enumeration_tuples);
  take("cap-search", caps.search_space);
  take("cap-class-group", caps.class_group_order);
  return caps;
}

Involution generator_inversion(const ConcreteGroup& H) {
  std::vector<int> images;
  for (int g : H.generators()) images.push_back(H.inv(g));
  return involution_from_generators(H, images);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

struct Params {
  int p, g, c, workers;
  Caps caps;
};

Params common_params(const Config& cfg) {
  Params P;
  P.p = static_cast<int>(cfg.integer("p", 3));
  P.g = static_cast<int>(cfg.integer("g", 2));
  P.c = static_cast<int>(cfg.integer("c", 2));
  P.workers = static_cast<int>(cfg.integer("workers", 1));
  P.caps = caps_from_config(cfg);
  require(P.p >= 3 && is_prime(P.p), "config key 'p' must be an odd prime");
  require(P.g >= 0, "config key 'g' must be non-negative");
  require(P.c >= 1, "config key 'c' must be positive");
  require(P.workers >= 1, "config key 'workers' must be positive");
  return P;
}

std::uint64_t required_seed(const Config& cfg) {
  if (!cfg.has("seed")) throw ArgumentError("missing config key 'seed' (required for stochastic experiments)");
  const long long s = cfg.integer("seed");
  require(s >= 0, "config key 'seed' must be non-negative");
  return static_cast<std::uint64_t>(s);
}

std::string tag(const Params& P) {
  return "p" + std::to_string(P.p) + "_g" + std::to_string(P.g) + "_c" + std::to_string(P.c);
}

std::string join(const std::vector<std::uint64_t>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

RunOutput run_qfree(const Config& cfg) {
  const Params P = common_params(cfg);
  const PcGroup F = build_free_pclass_quotient(P.g, P.c, P.p, P.caps);
  RunOutput out;
  out.files.push_back({"qfree_" + tag(P) + ".pc", serialize_presentation(F)});
  out.summary = {{"p", P.p},
                 {"g", P.g},
                 {"c", P.c},
                 {"generators", F.size()},
                 {"order_log_p", F.size()},
                 {"consistent", F.consistency_failures().empty()}};
  out.check_passed = F.consistency_failures().empty();
  return out;
}

RunOutput run_enumerate(const Config& cfg) {
  const Params P = common_params(cfg);
  const RelationSpace space = relation_space(P.g, P.c, P.p, P.caps);
  const auto classes = enumerate_quotient_classes(space, P.caps);
  std::ostringstream csv;
  csv << "p,g,c,fingerprint,tuples,conditional,formula,aut_sigma,h_c,d,pclass\n";
  RunOutput out;
  json rows = json::array();
  for (const auto& r : classes) {
    csv << P.p << ',' << P.g << ',' << P.c << ',' << r.id << ',' << r.tuples << ',' << to_string(r.conditional) << ','
        << to_string(r.formula_conditional) << ',' << r.aut_sigma << ',' << r.hc << ',' << r.d << ',' << r.pclass
        << '\n';
    if (r.conditional != r.formula_conditional) out.check_passed = false;
    rows.push_back({{"fingerprint", r.id},
                    {"order", r.group.order()},
                    {"conditional", to_string(r.conditional)},
                    {"formula", to_string(r.formula_conditional)},
                    {"measure", r.formula_value}});
  }
  out.files.push_back({"enumerate_" + tag(P) + ".csv", csv.str()});
  out.summary = {{"p", P.p},     {"g", P.g},
                 {"c", P.c},     {"pool_size", space.X.size()},
                 {"classes", rows}, {"formula_matches", out.check_passed}};
  return out;
}

RunOutput run_sample(const Config& cfg) {
  const Params P = common_params(cfg);
  const std::uint64_t seed = required_seed(cfg);
  const long long N = cfg.integer("N", 1000);
  require(N >= 1, "config key 'N' must be positive");
  const RelationSpace space = relation_space(P.g, P.c, P.p, P.caps);
  const ConcreteSpace cs = concrete_space(space, P.caps);
  const auto samples = sample_groups(space, cs, static_cast<std::uint64_t>(N), seed, P.workers);
  struct Tally {
    std::size_t order = 0;
    int pclass = 0;
    std::uint64_t count = 0;
  };
  std::map<std::string, Tally> tally;
  for (const auto& s : samples) {
    auto& t = tally[iso_fingerprint(s.group).id()];
    t.order = s.group.order();
    t.pclass = p_class(s.group);
    ++t.count;
  }
  RunOutput out;
  std::map<std::string, Rational> exact;
  if (cfg.flag("check")) {
    for (const auto& r : enumerate_quotient_classes(space, P.caps)) exact[r.id] = r.conditional;
  }
  std::ostringstream csv;
  csv << "fingerprint,order,pclass,count,frequency\n";
  json rows = json::array();
  for (const auto& [id, t] : tally) {
    const Rational freq(BigInt(t.count), BigInt(N));
    csv << id << ',' << t.order << ',' << t.pclass << ',' << t.count << ',' << to_string(freq) << '\n';
    json row = {{"fingerprint", id}, {"count", t.count}, {"frequency", static_cast<double>(freq)}};
    if (!exact.empty()) {
      const double pe = exact.count(id) ? static_cast<double>(exact[id]) : 0.0;
      const double se = std::sqrt(std::max(pe * (1 - pe), 1e-12) / static_cast<double>(N));
      row["exact"] = pe;
      if (std::abs(static_cast<double>(freq) - pe) > 5 * se) out.check_passed = false;
    }
    rows.push_back(row);
  }
  out.files.push_back({"sample_" + tag(P) + "_N" + std::to_string(N) + "_s" + std::to_string(seed) + ".csv", csv.str()});
  out.summary = {{"p", P.p}, {"g", P.g}, {"c", P.c}, {"N", N}, {"seed", seed}, {"classes", rows}};
  return out;
}

RunOutput run_moment(const Config& cfg) {
  const Params P = common_params(cfg);
  const std::string spec = cfg.str("group", "Z3");
  const int D = static_cast<int>(cfg.integer("D", 4));
  const std::string mode = cfg.str("mode", "exact");
  const ConcreteGroup H = ConcreteGroup::from_pc(group_from_spec(spec, P.p, P.caps), P.caps);
  const Involution sH = generator_inversion(H);
  RunOutput out;
  const std::string base = "moment_" + spec + "_p" + std::to_string(P.p) + "_c" + std::to_string(P.c) + "_D" +
                           std::to_string(D);
  if (mode == "exact") {
    const MomentResult m = moment_exact(H, sH, P.c, D, P.caps);
    std::ostringstream csv;
    csv << "g,mu_cl,route,expected,expected_strict\n";
    csv << std::setprecision(17);
    for (const auto& r : m.ranks)
      csv << r.g << ',' << r.mu << ',' << r.route << ',' << to_string(r.expected) << ','
          << (r.expected_strict ? to_string(*r.expected_strict) : "") << '\n';
    out.files.push_back({base + "_exact.csv", csv.str()});
    out.check_passed = std::abs(m.value - 1.0) <= m.tail_bound + 1e-12;
    out.summary = {{"group", spec}, {"p", P.p},           {"c", P.c},
                   {"D", D},        {"mode", mode},       {"value", m.value},
                   {"deviation", m.value - 1.0}, {"tail_bound", m.tail_bound}, {"within_tail_bound", out.check_passed}};
    if (m.value_strict) out.summary["value_strict"] = *m.value_strict;
  } else if (mode == "empirical") {
    const std::uint64_t seed = required_seed(cfg);
    const long long N = cfg.integer("N", 100000);
    require(N >= 1, "config key 'N' must be positive");
    const EmpiricalResult e = moment_empirical(H, sH, P.c, static_cast<std::uint64_t>(N), D, seed, P.workers, P.caps);
    std::ostringstream csv;
    csv << "g,samples\n";
    for (std::size_t g = 0; g < e.rank_counts.size(); ++g) csv << g << ',' << e.rank_counts[g] << '\n';
    out.files.push_back({base + "_N" + std::to_string(N) + "_s" + std::to_string(seed) + "_empirical.csv", csv.str()});
    out.check_passed = std::abs(e.estimate - 1.0) <= 3 * e.std_error;
    out.summary = {{"group", spec},
                   {"p", P.p},
                   {"c", P.c},
                   {"D", D},
                   {"mode", mode},
                   {"N", N},
                   {"seed", seed},
                   {"estimate", e.estimate},
                   {"std_error", e.std_error},
                   {"ci95", {e.ci_low, e.ci_high}},
                   {"sum", e.sum},
                   {"sum_squares", e.sum_squares.str()},
                   {"truncated_mass", e.truncated_mass},
                   {"within_3se", out.check_passed}};
  } else {
    throw ArgumentError("config key 'mode': expected 'exact' or 'empirical', got '" + mode + "'");
  }
  return out;
}

RunOutput run_matrix(const Config& cfg) {
  const Params P = common_params(cfg);
  const Truncation t = enumerated_truncation(P.p, P.c, P.g, P.caps);
  std::vector<ClassRep> classes = t.classes;
  const MomentMatrix M = build_moment_matrix(classes, P.caps, P.workers);
  const LaReport rep = check_la_hypotheses(M);
  RunOutput out;
  std::ostringstream csv;
  write_matrix_csv(csv, M);
  out.files.push_back({"matrix_p" + std::to_string(P.p) + "_c" + std::to_string(P.c) + "_r" + std::to_string(P.g) +
                           ".csv",
                       csv.str()});
  json rows = json::array();
  double max_err = 0;
  bool solved = false;
  if (rep.hypotheses_hold()) {
    const Solution s = unique_solution(M);
    const Solution gs = gauss_seidel_solution(M);
    for (std::size_t i = 0; i < M.size(); ++i) {
      max_err = std::max(max_err, std::abs(s.x[i] - t.expected_x[i]));
      rows.push_back({{"class", M.ids[i]},
                      {"row_sum", to_string(M.row_sums[i])},
                      {"x", s.x[i]},
                      {"x_reverse_sweep", gs.x[i]},
                      {"expected", t.expected_x[i]},
                      {"delta", t.delta[i]}});
    }
    solved = true;
  }
  out.check_passed = rep.diagonal_one && rep.below_19 && solved && max_err <= t.tolerance;
  out.summary = {{"p", P.p},
                 {"c", P.c},
                 {"max_rank", P.g},
                 {"classes", M.size()},
                 {"diagonal_one", rep.diagonal_one},
                 {"sup_row_sum", to_string(rep.sup_row_sum)},
                 {"margin", rep.margin},
                 {"row_sums_below_1.9", rep.below_19},
                 {"contraction", static_cast<double>(rep.sup_row_sum) - 1.0},
                 {"tolerance", t.tolerance},
                 {"max_error", max_err},
                 {"rows", rows}};
  return out;
}

std::vector<std::uint64_t> abelian_target(const std::string& spec, const Caps& caps) {
  if (spec == "1" || spec == "trivial") return {};
  // the prime is read off the first cyclic factor, e.g. Z9xZ3 -> 3
  const auto z = spec.find('Z');
  std::uint64_t n = 0;
  for (std::size_t i = z == std::string::npos ? spec.size() : z + 1;
       i < spec.size() && std::isdigit(static_cast<unsigned char>(spec[i])); ++i)
    n = n * 10 + static_cast<std::uint64_t>(spec[i] - '0');
  const auto p = prime_power(n).first;
  require(p != 0, "ff-scan: target group '" + spec + "' must be written with cyclic factors Z<p^k>");
  const ConcreteGroup A = ConcreteGroup::from_pc(group_from_spec(spec, static_cast<int>(p), caps), caps);
  require(derived_subgroup(A).size() == 1, "ff-scan: target group '" + spec + "' is not abelian");
  return abelian_invariants(A);
}

RunOutput run_ffscan(const Config& cfg) {
  const Caps caps = caps_from_config(cfg);
  const int workers = static_cast<int>(cfg.integer("workers", 1));
  const std::string spec = cfg.str("group", "Z3");
  const auto A = abelian_target(spec, caps);
  const auto qs = cfg.integers("q");
  const auto ms = cfg.has("m") ? cfg.integers("m") : std::vector<long long>{1};
  const std::string type_s = cfg.str("type", "I");
  std::vector<ff::FieldType> types;
  if (type_s == "both")
    types = {ff::FieldType::I, ff::FieldType::II};
  else
    types = {ff::parse_field_type(type_s)};
  const bool records = cfg.flag("records") || !cfg.has("records");
  RunOutput out;
  json rows = json::array();
  for (long long q : qs)
    for (long long m : ms) {
      std::optional<Rational> type_one;
      for (auto type : types) {
        const auto r = ff::moment_scan(static_cast<int>(q), static_cast<int>(m), A, type, workers, records, caps);
        const double avg = static_cast<double>(r.average);
        const double bound = 3.0 / std::sqrt(static_cast<double>(q));
        if (std::abs(avg - 1.0) > bound) out.check_passed = false;
        if (type == ff::FieldType::I) type_one = r.average;
        if (type == ff::FieldType::II && type_one && *type_one != r.average) out.check_passed = false;
        json hist = json::object();
        for (const auto& [k, v] : r.histogram) hist[k] = v;
        rows.push_back({{"q", q},
                        {"m", m},
                        {"type", ff::to_string(type)},
                        {"A", spec},
                        {"field_count", r.field_count},
                        {"average", avg},
                        {"average_exact", to_string(r.average)},
                        {"deviation", avg - 1.0},
                        {"histogram", hist}});
        if (records) {
          std::ostringstream csv;
          csv << "q,m,type,f,genus,L,h,invariants,sur\n";
          for (const auto& rec : r.records) {
            std::string L;
            for (std::size_t i = 0; i < rec.L.size(); ++i) L += (i ? " " : "") + std::to_string(rec.L[i]);
            csv << q << ',' << m << ',' << ff::to_string(type) << ',' << ff::to_string(rec.f) << ',' << rec.genus
                << ',' << L << ',' << rec.h << ',' << join(rec.factors, ' ') << ',' << rec.sur.str() << '\n';
          }
          out.files.push_back({"ffscan_q" + std::to_string(q) + "_m" + std::to_string(m) + "_" + ff::to_string(type) +
                                   "_" + spec + ".csv",
                               csv.str()});
        }
      }
    }
  out.summary = {{"scans", rows}, {"bound_constant", 3.0}, {"check", out.check_passed}};
  return out;
}

RunOutput run_noneq(const Config& cfg) {
  const Params P = common_params(cfg);
  const std::uint64_t seed = required_seed(cfg);
  const long long N = cfg.integer("N", 200);
  require(N >= 1, "config key 'N' must be positive");
  const std::string spec = cfg.str("group", "Z3");
  const ConcreteGroup H = ConcreteGroup::from_pc(group_from_spec(spec, P.p, P.caps), P.caps);
  const auto fibers = sigma_fiber_subgroups(H, P.caps);
  const RelationSpace space = relation_space(P.g, P.c, P.p, P.caps);
  const ConcreteSpace cs = concrete_space(space, P.caps);
  const auto samples = sample_groups(space, cs, static_cast<std::uint64_t>(N), seed, P.workers);
  std::vector<std::uint64_t> lhs(N), rhs(N);
  parallel_for(static_cast<std::size_t>(N), P.workers, [&](std::size_t i) {
    const auto& G = samples[i];
    lhs[i] = count_sur(G.group, H, P.caps);
    std::uint64_t s = 0;
    for (const auto& F : fibers) s += count_sur_sigma(G.group, G.sigma, F.subgroup.group, F.sigma, P.caps);
    rhs[i] = s;
  });
  RunOutput out;
  std::ostringstream csv;
  csv << "index,fingerprint,sur,sum_sur_sigma\n";
  std::uint64_t mismatches = 0;
  for (long long i = 0; i < N; ++i) {
    csv << i << ',' << iso_fingerprint(samples[i].group).id() << ',' << lhs[i] << ',' << rhs[i] << '\n';
    if (lhs[i] != rhs[i]) ++mismatches;
  }
  out.check_passed = mismatches == 0;
  out.files.push_back({"noneq_" + tag(P) + "_" + spec + "_N" + std::to_string(N) + "_s" + std::to_string(seed) + ".csv",
                       csv.str()});
  out.summary = {{"p", P.p},         {"g", P.g},           {"c", P.c},
                 {"group", spec},    {"N", N},             {"seed", seed},
                 {"fibers", fibers.size()}, {"mismatches", mismatches}};
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"qfree", "enumerate-bbh", "sample-bbh", "moment",
                                                 "matrix", "ff-scan", "noneq-check"};
  return kinds;
}

RunOutput run_experiment(const std::string& kind, const Config& cfg) {
  if (kind == "qfree") return run_qfree(cfg);
  if (kind == "enumerate-bbh") return run_enumerate(cfg);
  if (kind == "sample-bbh") return run_sample(cfg);
  if (kind == "moment") return run_moment(cfg);
  if (kind == "matrix") return run_matrix(cfg);
  if (kind == "ff-scan") return run_ffscan(cfg);
  if (kind == "noneq-check") return run_noneq(cfg);
  throw ArgumentError("unknown experiment kind '" + kind + "'");
}

void write_outputs(const std::string& kind, const Config& cfg, const RunOutput& out) {
  const std::filesystem::path dir = cfg.str("out", ".");
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ArgumentError("cannot write '" + (dir / name).string() + "'");
    f << content;
  };
  for (const auto& f : out.files) write(f.name, f.content);
  write(kind + "_summary.json", out.summary.dump(2) + "\n");
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  json config = json::object();
  for (const auto& [k, v] : cfg.values()) config[k] = v;
  json files = json::array();
  for (const auto& f : out.files) files.push_back(f.name);
  const json meta = {{"kind", kind},      {"config_hash", cfg.hash()}, {"version", kVersion},
                     {"timestamp", ts.str()}, {"config", config},      {"files", files},
                     {"check_passed", out.check_passed}};
  write(kind + "_meta.json", meta.dump(2) + "\n");
}

}  // namespace bbh
