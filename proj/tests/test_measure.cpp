#include <doctest.h>

#include <cmath>

#include "bbh/catalog.hpp"
#include "bbh/harness.hpp"
#include "bbh/iso.hpp"
#include "bbh/measure.hpp"
#include "oracles.hpp"

using namespace bbh;

namespace {

ConcreteGroup concrete(const std::string& spec, const Caps& caps = {}) {
  return ConcreteGroup::from_pc(group_from_spec(spec, 3, caps), caps);
}

// Independent product, no truncation logic.
double mu_reference(int g, int p) {
  double v = std::pow(static_cast<double>(p), -g * g);
  for (int k = 1; k <= g; ++k) v /= std::pow(1 - std::pow(static_cast<double>(p), -k), 2);
  for (int i = 1; i < 200; ++i) v *= 1 - std::pow(static_cast<double>(p), -i);
  return v;
}

const IsoClassRecord* find_order(const std::vector<IsoClassRecord>& v, std::size_t order) {
  for (const auto& r : v)
    if (r.group.order() == order) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("Cohen-Lenstra weights") {
  CHECK(mu_cl(0, 3) == doctest::Approx(0.560126).epsilon(1e-6));
  CHECK(mu_cl(1, 3) == doctest::Approx(0.420095).epsilon(1e-6));
  double total = 0;
  for (int g = 0; g <= 12; ++g) {
    CHECK(mu_cl(g, 3) == doctest::Approx(mu_reference(g, 3)).epsilon(1e-12));
    total += mu_cl(g, 3);
  }
  CHECK(std::abs(total - 1) < 1e-9);
  for (int p : {3, 5, 7}) {
    double s = 0;
    for (int g = 0; g <= 10; ++g) s += mu_cl(g, p);
    CHECK(std::abs(s - 1) < 1e-9);
  }
  // tail with base 1 is the missing mass
  double head = 0;
  for (int g = 0; g <= 3; ++g) head += mu_cl(g, 3);
  CHECK(mu_cl_weighted_tail(3, 3, 1.0) == doctest::Approx(1 - head).epsilon(1e-9));
}

TEST_CASE("relation pools") {
  CHECK(relation_space(1, 1, 3).X.size() == 1);
  CHECK(relation_space(1, 2, 3).X.size() == 3);
  CHECK(relation_space(2, 2, 3).X.size() == 9);
  // the pool is exactly the inverted part of Phi
  const RelationSpace s = relation_space(2, 2, 3);
  for (const auto& x : s.X) CHECK(s.apply_sigma(x) == s.F.inverse(x));
  CHECK(s.phi_order == s.X.size() * s.z_phi_order);
}

TEST_CASE("sampled relators lie in the pool and samples are reproducible") {
  const RelationSpace s = relation_space(2, 2, 3);
  std::set<Element> pool(s.X.begin(), s.X.end());
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) CHECK(pool.count(sample_relation(s, rng)));
  const ConcreteSpace cs = concrete_space(s);
  const auto a = sample_groups(s, cs, 2500, 17, 1);
  const auto b = sample_groups(s, cs, 2500, 17, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].relators == b[i].relators);
  const RelationSpace s11 = relation_space(1, 1, 3);
  const auto t = sample_groups(s11, concrete_space(s11), 20, 5);
  for (const auto& g : t) CHECK(g.group.order() == 3);
}

TEST_CASE("exhaustive class enumeration at small rank") {
  const auto c11 = enumerate_quotient_classes(relation_space(1, 1, 3));
  REQUIRE(c11.size() == 1);
  CHECK(c11[0].group.order() == 3);
  CHECK(c11[0].tuples == 1);

  const auto c12 = enumerate_quotient_classes(relation_space(1, 2, 3));
  REQUIRE(c12.size() == 2);
  CHECK(find_order(c12, 3)->tuples == 2);
  CHECK(find_order(c12, 9)->tuples == 1);

  const auto c22 = enumerate_quotient_classes(relation_space(2, 2, 3));
  std::uint64_t total = 0;
  for (const auto& r : c22) total += r.tuples;
  CHECK(total == 81);
  const auto* e27 = find_order(c22, 27);
  REQUIRE(e27);
  CHECK(e27->tuples == 48);
  CHECK(is_isomorphic(e27->group, concrete("E27")));
  CHECK(e27->aut_sigma == 48);
  CHECK(e27->hc == 2);
  CHECK(e27->conditional == Rational(16, 27));
  const auto* full = find_order(c22, 243);
  REQUIRE(full);
  CHECK(full->tuples == 1);
  CHECK(full->aut_sigma == 3888);
  CHECK(full->hc == 0);
  CHECK(full->conditional == Rational(1, 81));
}

TEST_CASE("tuple counts agree with a direct normal-closure census") {
  const RelationSpace s = relation_space(2, 2, 3);
  const ConcreteSpace cs = concrete_space(s);
  std::map<std::size_t, std::uint64_t> by_order;
  for (int a : cs.X)
    for (int b : cs.X) {
      const int rel[] = {a, b};
      ++by_order[cs.F.order() / normal_closure(cs.F, rel).size()];
    }
  std::map<std::size_t, std::uint64_t> expected;
  for (const auto& r : enumerate_quotient_classes(s)) expected[r.group.order()] += r.tuples;
  CHECK(by_order == expected);
}

TEST_CASE("measure formula") {
  // (Z/3)^g at c = 1 collapses to conditional 1
  for (int g = 1; g <= 3; ++g) {
    std::uint64_t gl = 1;
    for (int k = 0; k < g; ++k) gl *= ipow(3, g) - ipow(3, k);
    CHECK(lemma48_conditional(3, g, 0, gl) == 1);
  }
  CHECK(lemma48_conditional(3, 2, 2, 48) == Rational(16, 27));
  CHECK(lemma48_conditional(3, 2, 0, 3888) == Rational(1, 81));
  for (auto [g, c] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}})
    for (const auto& r : enumerate_quotient_classes(relation_space(g, c, 3))) {
      CHECK(r.conditional == r.formula_conditional);
      CHECK(r.formula_value == doctest::Approx(mu_cl(g, 3) * static_cast<double>(r.conditional)));
    }
}

TEST_CASE("relator dimension") {
  const RelationSpace s1 = relation_space(2, 1, 3);
  const ConcreteGroup A = concrete("Z3^2");
  CHECK(compute_hc(A, inversion_involution(A), s1) == 0);
  const RelationSpace s2 = relation_space(2, 2, 3);
  const ConcreteGroup E = concrete("E27");
  CHECK(compute_hc(E, generator_inversion(E), s2) == 2);
  const ConcreteSpace cs = concrete_space(s2);
  CHECK(compute_hc(cs.F, cs.sigma, s2) == 0);
}

TEST_CASE("moment rank terms agree across routes and with the closed form") {
  Caps caps;
  for (const std::string spec : {"Z3", "Z9", "Z3^2", "E27"}) {
    const ConcreteGroup H = concrete(spec);
    const Involution sH = generator_inversion(H);
    const SigmaTarget T(H, sH);
    for (int g = 1; g <= 2; ++g) {
      const int c = std::max(2, p_class(H));
      const RelationSpace s = relation_space(g, c, 3, caps);
      CAPTURE(spec);
      CAPTURE(g);
      const Rational a = moment_rank_term(T, s, MomentRoute::Subgroup, caps);
      const Rational b = moment_rank_term(T, s, MomentRoute::Fiber, caps);
      CHECK(a == b);
      CHECK(a == moment_rank_closed_form(H, sH, g));
    }
  }
  // rank term by enumeration: sum over classes of frequency * |Sur_sigma(P, H)|
  const RelationSpace s = relation_space(2, 2, 3);
  const ConcreteGroup Z3 = concrete("Z3");
  Rational direct = 0;
  for (const auto& r : enumerate_quotient_classes(s))
    direct += r.conditional * count_sur_sigma(r.group, r.sigma, Z3, inversion_involution(Z3));
  CHECK(direct == moment_rank_closed_form(Z3, inversion_involution(Z3), 2));
}

TEST_CASE("exact moments") {
  const ConcreteGroup one = ConcreteGroup::trivial(3);
  const auto m0 = moment_exact(one, identity_involution(one), 1, 6);
  double head = 0;
  for (int g = 0; g <= 6; ++g) head += mu_cl(g, 3);
  CHECK(m0.value == doctest::Approx(head).epsilon(1e-12));

  const ConcreteGroup Z3 = concrete("Z3");
  const auto m1 = moment_exact(Z3, inversion_involution(Z3), 1, 8);
  CHECK(std::abs(m1.value - 1) < 1e-6);
  // classical Cohen-Lenstra moment sum_g mu(g) (3^g - 1)
  double classical = 0;
  for (int g = 0; g <= 8; ++g) classical += mu_cl(g, 3) * (std::pow(3.0, g) - 1);
  CHECK(m1.value == doctest::Approx(classical).epsilon(1e-12));

  Caps caps;
  caps.pc_order = 4782969;
  const ConcreteGroup E = concrete("E27");
  const auto m2 = moment_exact(E, generator_inversion(E), 2, 4, caps);
  CHECK(std::abs(m2.value - 1) <= m2.tail_bound);
}

TEST_CASE("empirical moments") {
  const ConcreteGroup one = ConcreteGroup::trivial(3);
  const auto t = moment_empirical(one, identity_involution(one), 2, 5000, 4, 1);
  CHECK(t.estimate == 1.0);
  CHECK(t.std_error == 0.0);

  Caps caps;
  caps.pc_order = 4782969;
  const ConcreteGroup Z3 = concrete("Z3");
  const auto a = moment_empirical(Z3, inversion_involution(Z3), 2, 20000, 4, 42, 1, caps);
  const auto b = moment_empirical(Z3, inversion_involution(Z3), 2, 20000, 4, 42, 3, caps);
  CHECK(a.estimate == b.estimate);
  CHECK(a.sum_squares == b.sum_squares);
  CHECK(a.rank_counts == b.rank_counts);
  CHECK(std::abs(a.estimate - 1) <= 3 * a.std_error);

  const ConcreteGroup Z33 = concrete("Z3^2");
  const auto c = moment_empirical(Z33, inversion_involution(Z33), 1, 100000, 6, 5, 1, caps);
  CHECK(std::abs(c.estimate - 1) <= 3 * c.std_error);
}

TEST_CASE("sampled groups follow the enumerated class frequencies") {
  const RelationSpace s = relation_space(2, 2, 3);
  const ConcreteSpace cs = concrete_space(s);
  const auto classes = enumerate_quotient_classes(s);
  const std::uint64_t N = 100000;
  const auto samples = sample_groups(s, cs, N, 77);
  std::map<std::string, std::uint64_t> observed;
  for (const auto& g : samples) {
    CHECK(generator_rank(g.group) == 2);
    CHECK(is_invariant(cs.sigma, g.kernel));
    CHECK(is_gi(g.group, g.sigma));
    const Fingerprint fp = iso_fingerprint(g.group);
    std::string id;
    for (const auto& r : classes)
      if (r.fingerprint == fp) id = r.id;
    REQUIRE(!id.empty());
    ++observed[id];
  }
  double chi2 = 0;
  for (const auto& r : classes) {
    const double expected = static_cast<double>(r.conditional) * N;
    const double d = static_cast<double>(observed[r.id]) - expected;
    chi2 += d * d / expected;
  }
  // df = classes - 1 <= 5; 0.1% critical value of chi-square(5) is 20.5
  CHECK(classes.size() <= 6);
  CHECK(chi2 < 20.5);
}

TEST_CASE("exact moments increase with the rank bound and the tail bound is honest") {
  Caps caps;
  for (const std::string spec : {"Z3", "Z3^2", "Z9"}) {
    const ConcreteGroup H = concrete(spec);
    const Involution sH = generator_inversion(H);
    const int c = std::max(1, p_class(H));
    double prev = -1;
    for (int D = 0; D <= (c == 1 ? 8 : 4); ++D) {
      const auto m = moment_exact(H, sH, c, D, caps);
      CAPTURE(spec);
      CAPTURE(D);
      CHECK(m.value >= prev - 1e-15);
      CHECK(m.value <= 1 + 1e-12);
      CHECK(m.value + m.tail_bound >= 1 - 1e-12);
      prev = m.value;
    }
  }
}
