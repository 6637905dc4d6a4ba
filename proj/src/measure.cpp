#include "bbh/measure.hpp"

#include <cmath>
#include <algorithm>
#include <map>

#include "bbh/parallel.hpp"

namespace bbh {

double mu_cl(int g, int p, double precision) {
  require(g >= 0, "mu_cl: g must be non-negative");
  require(p >= 2, "mu_cl: p must be at least 2");
  const double ip = 1.0 / p;
  double prod = 1.0;
  // tail of log prod beyond i is at most p^{-i}/(1-1/p)^2
  double t = ip;
  for (int i = 1; i < 200; ++i) {
    prod *= 1.0 - t;
    t *= ip;
    if (t / ((1 - ip) * (1 - ip)) < precision * 1e-3) break;
  }
  double v = prod * std::pow(static_cast<double>(p), -static_cast<double>(g) * g);
  double pk = 1.0;
  for (int k = 1; k <= g; ++k) {
    pk *= ip;
    v /= (1.0 - pk) * (1.0 - pk);
  }
  return v;
}

double mu_cl_weighted_tail(int D, int p, double base) {
  double sum = 0;
  for (int g = D + 1; g < D + 200; ++g) {
    const double log_term = g * std::log(base) + std::log(mu_cl(g, p));
    if (log_term < -700) break;
    sum += std::exp(log_term);
  }
  return sum;
}

Rational lemma48_conditional(int p, int g, int h, std::uint64_t aut_sigma) {
  require(aut_sigma > 0, "lemma48_conditional: |Aut_sigma| must be positive");
  require(h >= 0 && h <= g, "lemma48_conditional: need 0 <= h <= g");
  Rational v = Rational(pow(BigInt(p), g * g)) / Rational(BigInt(aut_sigma));
  auto factor = [&](int k) { return Rational(1) - Rational(1, pow(BigInt(p), k)); };
  for (int k = 1; k <= g; ++k) v *= factor(k);
  for (int k = 1 + g - h; k <= g; ++k) v *= factor(k);
  return v;
}

// ---------------------------------------------------------------------------

Element RelationSpace::apply_sigma(const Element& x) const { return apply_pc_map(F, sigma, x); }

namespace {

RelationSpace make_space(int g, int c, int p, const Caps& caps, bool with_pool) {
  RelationSpace s;
  s.p = p;
  s.g = g;
  s.c = c;
  if (g == 0) {
    s.F = PcGroup(p, {}, 0);
    s.X = {s.F.identity()};
    return s;
  }
  s.F = build_free_pclass_quotient(g, c, p, caps);
  s.sigma = canonical_gi(s.F);
  for (int i = 0; i < s.F.size(); ++i)
    if (s.F.weight(i) >= 2) s.frattini_positions.push_back(i);
  s.phi_order = ipow(p, static_cast<unsigned>(s.frattini_positions.size()));
  if (!with_pool) return s;
  const std::size_t m = s.frattini_positions.size();
  std::vector<int> digits(m, 0);
  std::uint64_t z = 0;
  for (std::uint64_t idx = 0; idx < s.phi_order; ++idx) {
    Element u = s.F.identity();
    for (std::size_t t = 0; t < m; ++t) u[s.frattini_positions[t]] = static_cast<std::uint8_t>(digits[t]);
    const Element su = s.apply_sigma(u);
    if (su == s.F.inverse(u)) s.X.push_back(u);
    if (su == u) ++z;
    for (std::size_t t = m; t-- > 0;) {
      if (++digits[t] < p) break;
      digits[t] = 0;
    }
  }
  s.z_phi_order = z;
  std::sort(s.X.begin(), s.X.end());
  ensure(s.X.size() * z == s.phi_order, "relation_space: |Phi| != |Y(Phi)| |Z(Phi)|");
  return s;
}

}  // namespace

RelationSpace relation_space(int g, int c, int p, const Caps& caps) { return make_space(g, c, p, caps, true); }

Element sample_relation(const RelationSpace& space, std::mt19937_64& rng) {
  Element u = space.F.identity();
  for (int pos : space.frattini_positions) u[pos] = static_cast<std::uint8_t>(uniform_below(rng, space.p));
  return space.F.multiply(space.F.inverse(u), space.apply_sigma(u));
}

ConcreteSpace concrete_space(const RelationSpace& space, const Caps& caps) {
  ConcreteSpace cs;
  if (space.g == 0) {
    cs.F = ConcreteGroup::trivial(space.p);
    cs.sigma = identity_involution(cs.F);
    cs.X = {0};
    return cs;
  }
  cs.F = ConcreteGroup::from_pc(space.F, caps);
  cs.sigma = canonical_gi_concrete(space.F, cs.F);
  for (const auto& x : space.X) cs.X.push_back(static_cast<int>(space.F.index_of(x)));
  return cs;
}

SampledGroup quotient_by_relators(const ConcreteSpace& cs, std::vector<int> relators) {
  SampledGroup out;
  out.kernel = normal_closure(cs.F, relators);
  if (!is_invariant(cs.sigma, out.kernel))
    throw InvariantError("relator tuple produced a kernel that is not sigma-invariant");
  auto Q = quotient(cs.F, out.kernel);
  out.sigma = induced_involution(Q, cs.sigma);
  out.group = std::move(Q.group);
  out.relators = std::move(relators);
  return out;
}

SampledGroup sample_group(const RelationSpace& space, const ConcreteSpace& cs, std::mt19937_64& rng) {
  std::vector<int> rel;
  for (int i = 0; i < space.g; ++i) rel.push_back(static_cast<int>(space.F.index_of(sample_relation(space, rng))));
  return quotient_by_relators(cs, std::move(rel));
}

std::vector<SampledGroup> sample_groups(const RelationSpace& space, const ConcreteSpace& cs, std::uint64_t N,
                                        std::uint64_t seed, int workers) {
  std::vector<SampledGroup> out(N);
  const std::uint64_t nblocks = (N + kEmpiricalBlock - 1) / kEmpiricalBlock;
  parallel_for(nblocks, workers, [&](std::size_t b) {
    std::mt19937_64 rng(substream_seed(seed, b));
    const std::uint64_t end = std::min<std::uint64_t>(N, (b + 1) * kEmpiricalBlock);
    for (std::uint64_t i = b * kEmpiricalBlock; i < end; ++i) out[i] = sample_group(space, cs, rng);
  });
  return out;
}

namespace {

std::uint64_t tuple_count(std::size_t base, int g, const Caps& caps) {
  BigInt t = pow(BigInt(base), g);
  if (t > BigInt(caps.enumeration_tuples))
    throw CapError("enumeration_tuples", "X_c^g has " + t.str() + " tuples");
  return static_cast<std::uint64_t>(t);
}

// Distinct kernels over X_c^g with their tuple counts and first tuple.
std::map<ElementSet, std::pair<std::uint64_t, std::vector<int>>> kernels_by_tuple(const RelationSpace& space,
                                                                                   const ConcreteSpace& cs,
                                                                                   const Caps& caps) {
  const std::uint64_t total = tuple_count(cs.X.size(), space.g, caps);
  std::map<ElementSet, std::pair<std::uint64_t, std::vector<int>>> out;
  std::vector<std::size_t> digit(space.g, 0);
  std::vector<int> rel(space.g);
  for (std::uint64_t t = 0; t < total; ++t) {
    for (int i = 0; i < space.g; ++i) rel[i] = cs.X[digit[i]];
    auto K = normal_closure(cs.F, rel);
    if (!is_invariant(cs.sigma, K)) throw InvariantError("relator tuple produced a kernel that is not sigma-invariant");
    auto [it, fresh] = out.try_emplace(std::move(K), 0, rel);
    ++it->second.first;
    for (int i = space.g; i-- > 0;) {
      if (++digit[i] < cs.X.size()) break;
      digit[i] = 0;
    }
  }
  return out;
}

int hc_from_kernel(const ConcreteGroup& P, const RelationSpace& space, const PcSubgroup& R, const Caps& caps) {
  if (p_class(P) == space.c) return relator_dimension(space.F, R);
  return relation_rank(P, caps);
}

}  // namespace

int compute_hc(const ConcreteGroup& P, const Involution& sP, const RelationSpace& space, const Caps& caps) {
  require(generator_rank(P) == space.g, "compute_hc: d(P) differs from the rank of the space");
  require(p_class(P) <= space.c, "compute_hc: p-class of P exceeds c");
  if (space.g == 0) return 0;
  const auto basis = burnside_basis(P, y_set(P, sP));
  for (int b : basis)
    if (sP(b) != P.inv(b)) throw ArgumentError("compute_hc: no sigma-surjection from F_c onto P");
  return hc_from_kernel(P, space, pc_kernel(space.F, P, basis), caps);
}

std::vector<IsoClassRecord> enumerate_quotient_classes(const RelationSpace& space, const Caps& caps) {
  const ConcreteSpace cs = concrete_space(space, caps);
  const auto kernels = kernels_by_tuple(space, cs, caps);
  std::vector<IsoClassRecord> classes;
  for (const auto& [K, info] : kernels) {
    SampledGroup sg = quotient_by_relators(cs, info.second);
    Fingerprint fp = iso_fingerprint(sg.group);
    IsoClassRecord* hit = nullptr;
    for (auto& rec : classes)
      if (rec.fingerprint == fp && find_isomorphism(sg.group, rec.group, caps)) {
        hit = &rec;
        break;
      }
    if (hit) {
      hit->tuples += info.first;
      continue;
    }
    IsoClassRecord rec;
    rec.fingerprint = std::move(fp);
    rec.id = rec.fingerprint.id();
    rec.group = std::move(sg.group);
    rec.sigma = std::move(sg.sigma);
    rec.tuples = info.first;
    rec.example_relators = info.second;
    classes.push_back(std::move(rec));
  }

  const BigInt total = pow(BigInt(cs.X.size()), space.g);
  const double mu = mu_cl(space.g, space.p);
  for (auto& rec : classes) {
    rec.d = generator_rank(rec.group);
    ensure(rec.d == space.g, "enumeration: quotient has d != g");
    rec.pclass = p_class(rec.group);
    std::vector<Element> rels;
    for (int r : rec.example_relators) rels.push_back(space.F.element_at(static_cast<std::uint64_t>(r)));
    rec.hc = hc_from_kernel(rec.group, space, PcSubgroup::normal_closure(space.F, rels), caps);
    rec.aut_sigma = aut_sigma_order(rec.group, rec.sigma, caps);
    rec.conditional = Rational(BigInt(rec.tuples)) / Rational(total);
    rec.formula_conditional = lemma48_conditional(space.p, space.g, rec.hc, rec.aut_sigma);
    rec.formula_value = mu * static_cast<double>(rec.formula_conditional);
  }
  std::sort(classes.begin(), classes.end(), [](const IsoClassRecord& a, const IsoClassRecord& b) {
    if (a.group.order() != b.group.order()) return a.group.order() < b.group.order();
    return a.id < b.id;
  });
  return classes;
}

// ---------------------------------------------------------------------------
// Moments

namespace {

// spanning tuples in Y(H)^g counted by Mobius inversion over subspaces of H/Phi(H)
BigInt spanning_tuples(const SigmaTarget& T, int g) {
  const int p = T.H->prime();
  const int d = T.coords.rank();
  std::uint32_t size = 1;
  for (int i = 0; i < d; ++i) size *= p;
  std::vector<std::uint64_t> mult(size, 0);
  for (int y : T.Y) ++mult[T.coords.code(y)];
  BigInt total = 0;
  for (const auto& W : all_subspaces(p, d)) {
    const int dim = static_cast<int>(exact_log(W.size(), p));
    const int k = d - dim;
    BigInt mu = pow(BigInt(p), k * (k - 1) / 2);
    if (k % 2) mu = -mu;
    BigInt m = 0;
    for (auto w : W) m += mult[w];
    total += mu * pow(m, g);
  }
  return total;
}

Rational fiber_term(const SigmaTarget& T, const RelationSpace& space, const Caps& caps, std::string& route) {
  const ConcreteGroup& H = *T.H;
  const int g = space.g;
  if (g == 0) {
    route = "fiber";
    return H.order() == 1 ? 1 : 0;
  }
  if (T.coords.rank() > g) {
    route = "fiber";
    return 0;
  }
  const bool need_hom_check = T.pclass > space.c;
  const bool trivial_pool = space.X.size() == 1;
  if (trivial_pool && !need_hom_check) {
    route = "fiber-mobius";
    return Rational(spanning_tuples(T, g));
  }
  route = "fiber";
  BigInt cands = pow(BigInt(T.Y.size()), g);
  if (cands > BigInt(caps.search_space))
    throw CapError("search_space", "fiber route over " + cands.str() + " image tuples");
  const std::uint64_t total = static_cast<std::uint64_t>(cands);
  std::vector<std::size_t> digit(g, 0);
  std::vector<int> ys(g);
  BigInt sum = 0;
  for (std::uint64_t t = 0; t < total; ++t) {
    for (int i = 0; i < g; ++i) ys[i] = T.Y[digit[i]];
    for (int i = g; i-- > 0;) {
      if (++digit[i] < T.Y.size()) break;
      digit[i] = 0;
    }
    if (!T.coords.spans(ys)) continue;
    const auto img = pc_generator_images(space.F, H, ys);
    if (need_hom_check && !pc_relations_hold(space.F, H, img)) continue;
    std::uint64_t k = 0;
    for (const auto& r : space.X)
      if (pc_evaluate(space.F, H, img, r) == 0) ++k;
    sum += pow(BigInt(k), g);
  }
  return Rational(sum) / Rational(pow(BigInt(space.X.size()), g));
}

Rational subgroup_term(const SigmaTarget& T, const RelationSpace& space, const Caps& caps,
                       std::optional<Rational>* strict) {
  const ConcreteSpace cs = concrete_space(space, caps);
  const auto kernels = kernels_by_tuple(space, cs, caps);
  BigInt sum = 0, sum_strict = 0;
  for (const auto& [K, info] : kernels) {
    const SampledGroup sg = quotient_by_relators(cs, info.second);
    const std::uint64_t s = count_sur_sigma(sg.group, sg.sigma, *T.H, T.sigma, caps);
    sum += BigInt(info.first) * s;
    if (p_class(sg.group) == space.c) sum_strict += BigInt(info.first) * s;
  }
  const Rational total(pow(BigInt(cs.X.size()), space.g));
  if (strict) *strict = Rational(sum_strict) / total;
  return Rational(sum) / total;
}

bool subgroup_route_feasible(const RelationSpace& space, const Caps& caps) {
  if (space.X.size() == 1) return false;
  if (space.F.order() > caps.concrete_order) return false;
  return pow(BigInt(space.X.size()), space.g) <= BigInt(caps.enumeration_tuples);
}

Rational rank_term(const SigmaTarget& T, const RelationSpace& space, MomentRoute route, const Caps& caps,
                   std::string& name, std::optional<Rational>* strict) {
  if (route == MomentRoute::Subgroup || (route == MomentRoute::Auto && subgroup_route_feasible(space, caps))) {
    name = "subgroup";
    return subgroup_term(T, space, caps, strict);
  }
  Rational v = fiber_term(T, space, caps, name);
  if (strict) {
    // with a trivial pool the only quotient is F_c itself
    if (space.X.size() == 1)
      *strict = space.g > 0 ? v : Rational(0);
    else
      strict->reset();
  }
  return v;
}

}  // namespace

Rational moment_rank_term(const SigmaTarget& T, const RelationSpace& space, MomentRoute route, const Caps& caps,
                          std::optional<Rational>* strict) {
  std::string name;
  return rank_term(T, space, route, caps, name, strict);
}

Rational moment_rank_closed_form(const ConcreteGroup& H, const Involution& sH, int g) {
  const ElementSet phi = frattini(H);
  std::uint64_t y_phi = 0;
  for (int x : phi)
    if (sH(x) == H.inv(x)) ++y_phi;
  return Rational(sur_sigma_free_closed_form(g, H, sH)) / Rational(pow(BigInt(y_phi), g));
}

MomentResult moment_exact(const ConcreteGroup& H, const Involution& sH, int c, int D, const Caps& caps,
                          MomentRoute route) {
  require(c >= 1, "moment_exact: c must be positive");
  require(D >= 0, "moment_exact: D must be non-negative");
  require(is_gi(H, sH), "moment_exact: the involution on H is not GI");
  const SigmaTarget T(H, sH);
  require(T.pclass <= c, "moment_exact: p-class of H exceeds c");
  const int p = H.prime();
  MomentResult out;
  double strict_total = 0;
  bool strict_ok = true;
  for (int g = 0; g <= D; ++g) {
    const RelationSpace space = relation_space(g, c, p, caps);
    MomentRank mr;
    mr.g = g;
    mr.mu = mu_cl(g, p);
    mr.expected = rank_term(T, space, route, caps, mr.route, &mr.expected_strict);
    out.value += mr.mu * static_cast<double>(mr.expected);
    if (mr.expected_strict)
      strict_total += mr.mu * static_cast<double>(*mr.expected_strict);
    else
      strict_ok = false;
    out.ranks.push_back(std::move(mr));
  }
  if (strict_ok) out.value_strict = strict_total;
  out.tail_bound = mu_cl_weighted_tail(D, p, static_cast<double>(T.Y.size()));
  return out;
}

EmpiricalResult moment_empirical(const ConcreteGroup& H, const Involution& sH, int c, std::uint64_t N, int D,
                                 std::uint64_t seed, int workers, const Caps& caps) {
  require(N >= 1, "moment_empirical: N must be positive");
  require(c >= 1 && D >= 0, "moment_empirical: need c >= 1 and D >= 0");
  require(is_gi(H, sH), "moment_empirical: the involution on H is not GI");
  const SigmaTarget T(H, sH);
  const int p = H.prime();
  std::vector<RelationSpace> spaces;
  std::vector<double> cumulative;
  double mass = 0;
  for (int g = 0; g <= D; ++g) {
    spaces.push_back(make_space(g, c, p, caps, false));
    mass += mu_cl(g, p);
    cumulative.push_back(mass);
  }

  struct Block {
    std::uint64_t sum = 0;
    BigInt sumsq = 0;
    std::vector<std::uint64_t> ranks;
  };
  const std::uint64_t nblocks = (N + kEmpiricalBlock - 1) / kEmpiricalBlock;
  std::vector<Block> blocks(nblocks);
  parallel_for(nblocks, workers, [&](std::size_t b) {
    std::mt19937_64 rng(substream_seed(seed, b));
    Block& out = blocks[b];
    out.ranks.assign(D + 1, 0);
    const std::uint64_t begin = b * kEmpiricalBlock;
    const std::uint64_t end = std::min<std::uint64_t>(N, begin + kEmpiricalBlock);
    std::vector<Element> rels;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double u = uniform01(rng) * mass;
      int g = 0;
      while (g < D && cumulative[g] <= u) ++g;
      const RelationSpace& space = spaces[g];
      rels.clear();
      for (int k = 0; k < g; ++k) rels.push_back(sample_relation(space, rng));
      const std::uint64_t s = count_sur_sigma_pc(space.F, rels, T, caps);
      out.sum += s;
      out.sumsq += BigInt(s) * s;
      ++out.ranks[g];
    }
  });

  EmpiricalResult r;
  r.N = N;
  r.rank_counts.assign(D + 1, 0);
  for (const auto& b : blocks) {
    r.sum += b.sum;
    r.sum_squares += b.sumsq;
    for (int g = 0; g <= D; ++g) r.rank_counts[g] += b.ranks[g];
  }
  const double n = static_cast<double>(N);
  r.estimate = static_cast<double>(r.sum) / n;
  if (N > 1) {
    const Rational var = (Rational(r.sum_squares) - Rational(BigInt(r.sum)) * Rational(BigInt(r.sum)) / Rational(N)) /
                         Rational(N - 1);
    r.std_error = std::sqrt(static_cast<double>(var) / n);
  }
  r.ci_low = r.estimate - 1.96 * r.std_error;
  r.ci_high = r.estimate + 1.96 * r.std_error;
  r.truncated_mass = mu_cl_weighted_tail(D, p, 1.0);
  return r;
}

}  // namespace bbh
