#include <doctest.h>

#include <random>
#include <sstream>

#include "bbh/catalog.hpp"
#include "bbh/concrete.hpp"
#include "bbh/iso.hpp"
#include "bbh/pcgroup.hpp"
#include "oracles.hpp"

using namespace bbh;

namespace {

Element random_element(const PcGroup& G, std::mt19937_64& rng) {
  Element x(G.size());
  for (int i = 0; i < G.size(); ++i) x[i] = static_cast<std::uint8_t>(rng() % G.prime());
  return x;
}

std::vector<std::size_t> series_orders(const ConcreteGroup& G) {
  std::vector<std::size_t> out;
  for (const auto& t : lower_p_central_series(G).terms) out.push_back(t.size());
  return out;
}

ConcreteGroup concrete(const std::string& spec) { return ConcreteGroup::from_pc(group_from_spec(spec, 3)); }

}  // namespace

TEST_CASE("free p-class quotients have the expected shape") {
  const PcGroup Z3 = build_free_pclass_quotient(1, 1, 3);
  CHECK(Z3.order() == 3);
  for (int g = 1; g <= 4; ++g) {
    const PcGroup E = build_free_pclass_quotient(g, 1, 3);
    CHECK(E.order() == ipow(3, g));
    CHECK(abelian_invariants(ConcreteGroup::from_pc(E)) == std::vector<std::uint64_t>(g, 3));
  }
  const PcGroup F = build_free_pclass_quotient(2, 2, 3);
  CHECK(F.order() == 243);
  CHECK(F.pclass() == 2);
  CHECK(F.is_consistent());
  int w1 = 0, w2 = 0;
  for (int w : F.weights()) (w == 1 ? w1 : w2)++;
  CHECK(w1 == 2);
  CHECK(w2 == 3);
  for (int g = 1; g <= 3; ++g) CHECK(free_quotient_generator_count(g, 2) == g + g * (g - 1) / 2 + g);
}

TEST_CASE("collection in Q_2(F_2)") {
  const PcGroup F = build_free_pclass_quotient(2, 2, 3);
  const Element a1 = F.generator(0), a2 = F.generator(1);
  const Element e = F.identity();
  CHECK(F.multiply(e, a1) == a1);
  CHECK(F.multiply(a1, e) == a1);

  const Element cube = F.multiply(F.multiply(a1, a1), a1);
  CHECK(cube == F.power(a1, 3));
  CHECK(F.weight(static_cast<int>(cube.depth())) == 2);
  CHECK(cube == F.power_relation(0));

  // a2 a1 = a1 a2 [a2, a1]
  const Element c = F.commutator(a2, a1);
  CHECK(c == F.commutator_relation(1, 0));
  CHECK(F.multiply(a2, a1) == F.multiply(F.multiply(a1, a2), c));
  CHECK(F.multiply(a2, a1) != F.multiply(a1, a2));
}

TEST_CASE("PC arithmetic satisfies the group axioms on random elements") {
  std::mt19937_64 rng(7);
  for (auto [g, c] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}}) {
    const PcGroup F = build_free_pclass_quotient(g, c, 3);
    for (int trial = 0; trial < 200; ++trial) {
      const Element x = random_element(F, rng), y = random_element(F, rng), z = random_element(F, rng);
      CHECK(F.multiply(F.multiply(x, y), z) == F.multiply(x, F.multiply(y, z)));
      CHECK(F.multiply(x, F.inverse(x)).is_identity());
      CHECK(F.element_at(F.index_of(x)) == x);
    }
  }
}

TEST_CASE("lower p-central series") {
  CHECK(series_orders(concrete("Z3^2")) == std::vector<std::size_t>{9, 1});
  CHECK(p_class(concrete("Z3^2")) == 1);
  CHECK(series_orders(concrete("Z9")) == std::vector<std::size_t>{9, 3, 1});
  CHECK(p_class(concrete("Z9")) == 2);
  const ConcreteGroup Q = ConcreteGroup::from_pc(build_free_pclass_quotient(2, 2, 3));
  CHECK(series_orders(Q) == std::vector<std::size_t>{243, 27, 1});
}

TEST_CASE("quotients of Q_2(F_2)") {
  const PcGroup F = build_free_pclass_quotient(2, 2, 3);
  const ConcreteGroup G = ConcreteGroup::from_pc(F);
  const int none[] = {G.identity()};
  CHECK(quotient_by_normal_closure(G, none).group.order() == 243);

  const int cubes[] = {static_cast<int>(F.index_of(F.power(F.generator(0), 3))),
                       static_cast<int>(F.index_of(F.power(F.generator(1), 3)))};
  CHECK(normal_closure(G, cubes).size() == 9);
  const ConcreteGroup E = quotient_by_normal_closure(G, cubes).group;
  CHECK(E.order() == 27);
  CHECK(p_class(E) == 2);
  for (std::size_t x = 1; x < E.order(); ++x) CHECK(E.element_order(static_cast<int>(x)) == 3);
  CHECK(is_isomorphic(E, concrete("E27")));

  const ConcreteGroup ab = quotient(G, frattini(G)).group;
  CHECK(abelian_invariants(ab) == std::vector<std::uint64_t>{3, 3});
}

TEST_CASE("generator and relation ranks") {
  CHECK(generator_rank(concrete("Z9")) == 1);
  CHECK(relation_rank(concrete("Z9")) == 1);
  CHECK(abelian_invariants(concrete("Z9")) == std::vector<std::uint64_t>{9});
  CHECK(generator_rank(concrete("Z3^2")) == 2);
  CHECK(relation_rank(concrete("Z3^2")) == 3);
  CHECK(abelian_invariants(concrete("Z3^2")) == std::vector<std::uint64_t>{3, 3});
  CHECK(generator_rank(concrete("E27")) == 2);
  CHECK(relation_rank(concrete("E27")) == 4);
  // abelian groups of rank d need d(d+1)/2 relators
  for (int d = 1; d <= 3; ++d)
    CHECK(relation_rank(ConcreteGroup::from_pc(abelian_pc_group(3, std::vector<std::uint64_t>(d, 3)))) ==
          d * (d + 1) / 2);
  CHECK(relation_rank(ConcreteGroup::from_pc(abelian_pc_group(3, {9, 9}))) == 3);
}

TEST_CASE("isomorphism testing") {
  CHECK_FALSE(is_isomorphic(concrete("Z9"), concrete("Z3^2")));
  CHECK(is_isomorphic(concrete("Z9xZ3"), concrete("Z9xZ3")));
  CHECK_FALSE(is_isomorphic(concrete("Z27"), concrete("E27")));

  const ConcreteGroup A = concrete("E27");
  const PcGroup F = build_free_pclass_quotient(2, 2, 3);
  const ConcreteGroup G = ConcreteGroup::from_pc(F);
  const int cubes[] = {static_cast<int>(F.index_of(F.generator(3))), static_cast<int>(F.index_of(F.generator(4)))};
  const ConcreteGroup B = quotient_by_normal_closure(G, cubes).group;
  const auto iso = find_isomorphism(A, B);
  REQUIRE(iso);
  // the map is a bijective homomorphism
  std::set<int> image(iso->begin(), iso->end());
  CHECK(image.size() == 27);
  for (int x = 0; x < 27; ++x)
    for (int y = 0; y < 27; ++y) CHECK((*iso)[A.mul(x, y)] == B.mul((*iso)[x], (*iso)[y]));
}

TEST_CASE("presentation round trip") {
  const PcGroup F = build_free_pclass_quotient(2, 2, 3);
  const std::string text = serialize_presentation(F);
  const PcGroup G = parse_presentation(text);
  CHECK(G == F);
  CHECK(serialize_presentation(G) == text);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const Element x = random_element(F, rng), y = random_element(F, rng);
    CHECK(G.multiply(x, y) == F.multiply(x, y));
  }
  const auto path = std::filesystem::temp_directory_path() / "bbh_roundtrip.pc";
  save_presentation(F, path);
  CHECK(load_presentation(path) == F);
  std::filesystem::remove(path);
}

TEST_CASE("malformed presentations are rejected") {
  // [b, a] = b forces b = 1, so neither presentation is consistent
  CHECK_THROWS_AS(parse_presentation("3 2 1\ngen 1 weight 1\ngen 2 weight 1\ncomm 2 1 = 2^1\n"), ArgumentError);
  CHECK_THROWS_AS(parse_presentation("3 2 2\ngen 1 weight 1\ngen 2 weight 2\npow 1 = 2^1\ncomm 2 1 = 2^1\n"),
                  ArgumentError);
  CHECK_THROWS_AS(parse_presentation("not a presentation"), ArgumentError);
  const PcGroup F = build_free_pclass_quotient(1, 1, 3);
  Element bad(std::vector<std::uint8_t>{5});
  CHECK_THROWS_AS(F.validate(bad), ArgumentError);
}

TEST_CASE("caps stop oversized constructions") {
  Caps caps;
  caps.pc_order = 243;
  CHECK_THROWS_AS(build_free_pclass_quotient(3, 2, 3, caps), CapError);
  Caps small;
  small.concrete_order = 81;
  CHECK_THROWS_AS(ConcreteGroup::from_pc(build_free_pclass_quotient(2, 2, 3), small), CapError);
}

TEST_CASE("concrete tables match PC multiplication") {
  const PcGroup F = group_from_spec("Z9xZ3", 3);
  const ConcreteGroup G = ConcreteGroup::from_pc(F);
  CHECK(G.verify_associative());
  for (std::uint64_t a = 0; a < F.order(); ++a)
    for (std::uint64_t b = 0; b < F.order(); ++b)
      CHECK(static_cast<std::uint64_t>(G.mul(static_cast<int>(a), static_cast<int>(b))) ==
            F.index_of(F.multiply(F.element_at(a), F.element_at(b))));
}
