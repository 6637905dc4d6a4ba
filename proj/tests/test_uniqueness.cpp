#include <doctest.h>

#include <sstream>

#include "bbh/catalog.hpp"
#include "bbh/measure.hpp"
#include "bbh/uniqueness.hpp"

using namespace bbh;

namespace {

ClassRep elementary(int g) {
  ConcreteGroup G = g == 0 ? ConcreteGroup::trivial(3)
                           : ConcreteGroup::from_pc(abelian_pc_group(3, std::vector<std::uint64_t>(g, 3)));
  Involution s = inversion_involution(G);
  return {g == 0 ? "1" : "Z3^" + std::to_string(g), std::move(G), std::move(s), g, 0};
}

}  // namespace

TEST_CASE("moment matrix for elementary abelian classes") {
  std::vector<ClassRep> classes{elementary(0), elementary(1), elementary(2)};
  const MomentMatrix M = build_moment_matrix(classes);
  REQUIRE(M.size() == 3);
  const std::uint64_t aut[] = {1, 2, 48};
  const std::uint64_t sur[3][3] = {{1, 1, 1}, {0, 2, 8}, {0, 0, 48}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(M.a[i][j] == Rational(sur[i][j], aut[j]));
  for (int i = 0; i < 3; ++i) CHECK(M.a[i][i] == 1);

  std::vector<ClassRep> single{elementary(0)};
  const MomentMatrix I = build_moment_matrix(single);
  CHECK(I.size() == 1);
  CHECK(I.a[0][0] == 1);
}

TEST_CASE("linear algebra hypotheses and solution") {
  const MomentMatrix I = matrix_from_doubles({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  for (double x : unique_solution(I).x) CHECK(x == doctest::Approx(1.0));

  const MomentMatrix M = matrix_from_doubles({{1, 0.5}, {0.3, 1}});
  const LaReport rep = check_la_hypotheses(M);
  CHECK(rep.hypotheses_hold());
  const Solution s = unique_solution(M);
  CHECK(s.x[0] == doctest::Approx(10.0 / 17).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(14.0 / 17).epsilon(1e-12));
  const Solution gs = gauss_seidel_solution(M);
  CHECK(gs.x[0] == doctest::Approx(10.0 / 17).epsilon(1e-12));

  const MomentMatrix bad = matrix_from_doubles({{1, 1.5}, {0, 1}});
  CHECK_FALSE(check_la_hypotheses(bad).hypotheses_hold());
  CHECK_THROWS_AS(unique_solution(bad), ArgumentError);
  const MomentMatrix neg = matrix_from_doubles({{1, -0.1}, {0, 1}});
  CHECK_FALSE(check_la_hypotheses(neg).nonnegative);
}

TEST_CASE("random admissible matrices: both iterations solve Mx = 1") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 10);
    const auto raw = random_la_matrix(k, 0.9, rng);
    const MomentMatrix M = matrix_from_doubles(raw);
    REQUIRE(check_la_hypotheses(M).hypotheses_hold());
    const Solution a = unique_solution(M), b = gauss_seidel_solution(M);
    for (int i = 0; i < k; ++i) {
      double r = 0;
      for (int j = 0; j < k; ++j) r += raw[i][j] * a.x[j];
      CHECK(std::abs(r - 1) < 1e-10);
      CHECK(std::abs(a.x[i] - b.x[i]) < 1e-10);
      CHECK(a.x[i] > 0);
    }
  }
}

TEST_CASE("truncated system at c = 1 recovers mu * |Aut|") {
  const Truncation t = enumerated_truncation(3, 1, 2);
  REQUIRE(t.classes.size() == 3);
  std::vector<ClassRep> classes = t.classes;
  const MomentMatrix M = build_moment_matrix(classes);
  const LaReport rep = check_la_hypotheses(M);
  CHECK(rep.sup_row_sum == Rational(73, 48));
  const Solution s = unique_solution(M);
  const double expected[] = {mu_cl(0, 3), mu_cl(1, 3) * 2, mu_cl(2, 3) * 48};
  for (int i = 0; i < 3; ++i) {
    CHECK(t.expected_x[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(std::abs(s.x[i] - expected[i]) <= t.tolerance);
  }
}

TEST_CASE("truncated system at c = 2") {
  const Truncation t = enumerated_truncation(3, 2, 2);
  std::vector<ClassRep> classes = t.classes;
  const MomentMatrix M = build_moment_matrix(classes);
  CHECK(M.size() == 6);
  const LaReport rep = check_la_hypotheses(M);
  CHECK(rep.diagonal_one);
  CHECK(rep.below_19);
  for (const auto& r : M.row_sums) CHECK(r <= Rational(19, 10));
  CHECK(M.a[0][5] == Rational(1, 3888));
  const Solution s = unique_solution(M);
  for (std::size_t i = 0; i < M.size(); ++i) CHECK(std::abs(s.x[i] - t.expected_x[i]) <= t.tolerance);
  std::ostringstream os;
  write_matrix_csv(os, M);
  CHECK(os.str().rfind("class,", 0) == 0);
}
