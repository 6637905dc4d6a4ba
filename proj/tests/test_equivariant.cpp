#include <doctest.h>

#include "bbh/catalog.hpp"
#include "bbh/equivariant.hpp"
#include "bbh/harness.hpp"
#include "oracles.hpp"

using namespace bbh;

namespace {

ConcreteGroup concrete(const std::string& spec) { return ConcreteGroup::from_pc(group_from_spec(spec, 3)); }

struct WithSigma {
  ConcreteGroup G;
  Involution s;
};

WithSigma gi(const std::string& spec) {
  ConcreteGroup G = concrete(spec);
  Involution s = generator_inversion(G);
  return {std::move(G), std::move(s)};
}

std::size_t count_if_set(const ConcreteGroup& G, const std::function<bool(int)>& pred) {
  std::size_t n = 0;
  for (std::size_t x = 0; x < G.order(); ++x) n += pred(static_cast<int>(x));
  return n;
}

}  // namespace

TEST_CASE("canonical involution on Q_2(F_2)") {
  const PcGroup F = build_free_pclass_quotient(2, 2, 3);
  const auto img = canonical_gi(F);
  // a1, a2, a1^3, a2^3 are inverted, [a2, a1] is fixed
  for (int i : {0, 1, 3, 4}) CHECK(img[i] == F.inverse(F.generator(i)));
  CHECK(img[2] == F.generator(2));

  const ConcreteGroup G = ConcreteGroup::from_pc(F);
  const Involution s = canonical_gi_concrete(F, G);
  CHECK(is_involution(G, s));
  CHECK(is_gi(G, s));
  // induced involution on the Frattini subgroup (Z/3)^3
  const Embedded phi = subgroup_as_group(G, frattini(G));
  const Involution sp = restricted_involution(phi, s);
  CHECK(y_set(phi.group, sp).size() == 9);
  CHECK(z_set(phi.group, sp).size() == 3);
}

TEST_CASE("Z/9 is Q_2(F_1) and its involution is inversion") {
  const PcGroup F = build_free_pclass_quotient(1, 2, 3);
  const ConcreteGroup G = ConcreteGroup::from_pc(F);
  const Involution s = canonical_gi_concrete(F, G);
  for (std::size_t x = 0; x < G.order(); ++x) CHECK(s(static_cast<int>(x)) == G.inv(static_cast<int>(x)));
}

TEST_CASE("GI and Y/Z sets") {
  const ConcreteGroup Z3 = concrete("Z3");
  CHECK(is_gi(Z3, inversion_involution(Z3)));
  CHECK_FALSE(is_gi(Z3, identity_involution(Z3)));
  CHECK(y_set(Z3, inversion_involution(Z3)).size() == 3);
  CHECK(z_set(Z3, inversion_involution(Z3)).size() == 1);
  const auto [E, s] = gi("E27");
  CHECK(is_gi(E, s));
  CHECK(f_map(E, s, E.identity()) == E.identity());
  for (int g = 1; g <= 3; ++g) {
    const ConcreteGroup A = ConcreteGroup::from_pc(abelian_pc_group(3, std::vector<std::uint64_t>(g, 3)));
    CHECK(is_gi(A, inversion_involution(A)));
  }
}

TEST_CASE("Y and Z sets match their definitions") {
  for (const std::string spec : {"Z9", "Z3^2", "E27", "Z9xZ3", "Q2_2"}) {
    const auto [G, s] = gi(spec);
    const auto Y = y_set(G, s);
    const auto Z = z_set(G, s);
    CHECK(Y.size() == count_if_set(G, [&](int x) { return s(x) == G.inv(x); }));
    CHECK(Z.size() == count_if_set(G, [&](int x) { return s(x) == x; }));
    CHECK(Y.size() * Z.size() == G.order());
    CHECK(check_order_split(G, s));
    CHECK(check_y_equidistribution(G, s));
  }
}

TEST_CASE("quotient lemmas for every invariant normal subgroup of small groups") {
  for (const std::string spec : {"Z9", "Z3^2", "E27", "Z9xZ3", "Z27"}) {
    const auto [G, s] = gi(spec);
    for (std::size_t x = 0; x < G.order(); ++x) {
      const int gens[] = {static_cast<int>(x), s(static_cast<int>(x))};
      const ElementSet K = normal_closure(G, gens);
      const auto q = check_quotient_lemmas(G, s, K);
      CHECK(q.z_surjective);
      CHECK(q.y_kernel);
    }
  }
}

TEST_CASE("surjection counts match exhaustive enumeration") {
  const auto Z3 = gi("Z3");
  const auto Z33 = gi("Z3^2");
  CHECK(count_sur_sigma(Z33.G, Z33.s, Z3.G, Z3.s) == 8);
  CHECK(count_sur_sigma(Z3.G, Z3.s, Z33.G, Z33.s) == 0);
  CHECK(count_sur_sigma(Z3.G, Z3.s, Z3.G, Z3.s) == 2);

  const std::vector<std::string> specs{"1", "Z3", "Z9", "Z3^2", "E27", "Z9xZ3"};
  for (const auto& a : specs)
    for (const auto& b : specs) {
      const auto G = gi(a), H = gi(b);
      if (std::pow(static_cast<double>(H.G.order()), G.G.generators().size()) > 1e6) continue;
      CAPTURE(a);
      CAPTURE(b);
      const auto ref = oracle::count_maps(G.G, G.s, H.G, H.s);
      CHECK(count_hom(G.G, H.G) == ref.hom);
      CHECK(count_sur(G.G, H.G) == ref.sur);
      CHECK(count_hom_sigma(G.G, G.s, H.G, H.s) == ref.hom_sigma);
      CHECK(count_sur_sigma(G.G, G.s, H.G, H.s) == ref.sur_sigma);
      if (a == b) CHECK(aut_sigma_order(G.G, G.s) == ref.aut_sigma);
    }
}

TEST_CASE("abelian homomorphism counts are products of gcds") {
  const std::vector<std::vector<std::uint64_t>> shapes{{3}, {9}, {3, 3}, {3, 9}, {27}};
  for (const auto& a : shapes)
    for (const auto& b : shapes) {
      const ConcreteGroup A = ConcreteGroup::from_pc(abelian_pc_group(3, a));
      const ConcreteGroup B = ConcreteGroup::from_pc(abelian_pc_group(3, b));
      CHECK(count_hom(A, B) == oracle::abelian_hom_count(a, b));
      CHECK(count_sur(A, B) == oracle::abelian_sur_count(a, b));
    }
}

TEST_CASE("equivariant automorphism groups") {
  const auto Z3 = gi("Z3");
  CHECK(aut_sigma_order(Z3.G, Z3.s) == 2);
  const auto Z33 = gi("Z3^2");
  CHECK(aut_sigma_order(Z33.G, Z33.s) == 48);
  const auto E = gi("E27");
  CHECK(aut_sigma_order(E.G, E.s) == 48);
  CHECK(oracle::count_maps(E.G, E.s, E.G, E.s).aut_sigma == 48);
  const ConcreteGroup Z333 = ConcreteGroup::from_pc(abelian_pc_group(3, {3, 3, 3}));
  CHECK(aut_sigma_order(Z333, inversion_involution(Z333)) == 26 * 24 * 18);
}

TEST_CASE("free surjection counts and the closed form") {
  const auto Z3 = gi("Z3");
  CHECK(sur_sigma_free_closed_form(1, Z3.G, Z3.s) == 2);
  CHECK(sur_sigma_free_closed_form(2, Z3.G, Z3.s) == 8);
  const auto Z33 = gi("Z3^2");
  CHECK(sur_sigma_free_closed_form(1, Z33.G, Z33.s) == 0);
  CHECK_THROWS_AS(sur_sigma_free_closed_form(2, Z3.G, identity_involution(Z3.G)), ArgumentError);
  for (const std::string spec : {"Z3", "Z9", "Z3^2", "Z27", "Z9xZ3", "E27"}) {
    const auto H = gi(spec);
    for (int d = 0; d <= 3; ++d) {
      // brute force: tuples of Y(H) that generate H
      const auto Y = y_set(H.G, H.s);
      std::uint64_t n = 0;
      oracle::for_each_tuple(d, Y.size(), [&](const std::vector<int>& t) {
        std::vector<int> xs;
        for (int i : t) xs.push_back(Y[i]);
        n += subgroup_closure(H.G, xs).size() == H.G.order();
      });
      CAPTURE(spec);
      CAPTURE(d);
      CHECK(sur_sigma_free_closed_form(d, H.G, H.s) == n);
      CHECK(count_sur_sigma_free(d, H.G, H.s) == n);
    }
  }
}

TEST_CASE("sigma fiber subgroups") {
  const ConcreteGroup one = ConcreteGroup::trivial(3);
  CHECK(sigma_fiber_subgroups(one).size() == 1);
  const ConcreteGroup Z3 = concrete("Z3");
  const auto fibers = sigma_fiber_subgroups(Z3);
  REQUIRE(fibers.size() == 3);
  const ConcreteGroup HH = direct_product(Z3, Z3);
  std::set<std::size_t> orders;
  for (const auto& f : fibers) orders.insert(f.subgroup.group.order());
  CHECK(orders == std::set<std::size_t>{3, 9});
  // decomposition: |Sur(G, H)| = sum over fibers of |Sur_sigma(G, F)|
  for (const std::string spec : {"Z3^2", "E27", "Z9xZ3"}) {
    const auto G = gi(spec);
    std::uint64_t total = 0;
    for (const auto& f : fibers) total += count_sur_sigma(G.G, G.s, f.subgroup.group, f.sigma);
    CHECK(total == count_sur(G.G, Z3));
  }
}
