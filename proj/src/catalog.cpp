#include "bbh/catalog.hpp"

#include <algorithm>
#include <regex>

namespace bbh {

PcGroup abelian_pc_group(int p, const std::vector<std::uint64_t>& factors) {
  std::vector<int> exps;
  for (auto f : factors) {
    if (f == 1) continue;
    require(prime_power(f).first == static_cast<std::uint64_t>(p), "abelian group: factor " + std::to_string(f) +
                                                                       " is not a power of " + std::to_string(p));
    exps.push_back(static_cast<int>(prime_power(f).second));
  }
  const int top = exps.empty() ? 0 : *std::max_element(exps.begin(), exps.end());
  // generator for (factor f, level t) ordered by level, then factor
  std::vector<std::pair<int, int>> slots;
  for (int t = 0; t < top; ++t)
    for (int f = 0; f < static_cast<int>(exps.size()); ++f)
      if (t < exps[f]) slots.push_back({t, f});
  std::vector<int> weights;
  for (auto [t, f] : slots) weights.push_back(t + 1);
  PcGroup G(p, weights, top);
  const int n = static_cast<int>(slots.size());
  for (int i = 0; i < n; ++i) {
    auto [t, f] = slots[i];
    for (int j = i + 1; j < n; ++j)
      if (slots[j] == std::pair{t + 1, f}) {
        Element rhs(n);
        rhs[j] = 1;
        G.set_power_relation(i, rhs);
      }
  }
  G.infer_definitions();
  return G;
}

PcGroup extraspecial_pc_group(int p) {
  PcGroup G(p, {1, 1, 2}, 2);
  Element c(3);
  c[2] = 1;
  G.set_commutator_relation(1, 0, c);
  G.infer_definitions();
  return G;
}

PcGroup group_from_spec(const std::string& spec, int p, const Caps& caps) {
  require(!spec.empty(), "group spec is empty");
  if (spec[0] == '@') return load_presentation(spec.substr(1));
  if (spec == "1" || spec == "trivial") return PcGroup(p, {}, 0);
  std::smatch m;
  static const std::regex q_re(R"(Q(\d+)_(\d+))");
  if (std::regex_match(spec, m, q_re)) return build_free_pclass_quotient(std::stoi(m[1]), std::stoi(m[2]), p, caps);
  static const std::regex e_re(R"(E(\d+))");
  if (std::regex_match(spec, m, e_re)) {
    require(std::stoull(m[1]) == ipow(p, 3), "group spec " + spec + ": extraspecial order must be p^3");
    return extraspecial_pc_group(p);
  }
  static const std::regex z_re(R"(Z(\d+)(\^(\d+))?)");
  std::vector<std::uint64_t> factors;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto end = std::min(spec.find('x', start), spec.size());
    const std::string tok = spec.substr(start, end - start);
    if (!std::regex_match(tok, m, z_re)) throw ArgumentError("unrecognised group spec `" + spec + "`");
    const int reps = m[3].matched ? std::stoi(m[3]) : 1;
    for (int r = 0; r < reps; ++r) factors.push_back(std::stoull(m[1]));
    start = end + 1;
  }
  return abelian_pc_group(p, factors);
}

}  // namespace bbh
