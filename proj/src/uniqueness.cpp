#include "bbh/uniqueness.hpp"

#include <algorithm>
#include <cmath>

#include "bbh/measure.hpp"
#include "bbh/parallel.hpp"

namespace bbh {

MomentMatrix build_moment_matrix(std::vector<ClassRep>& classes, const Caps& caps, int workers) {
  std::sort(classes.begin(), classes.end(), [](const ClassRep& x, const ClassRep& y) {
    if (x.rank != y.rank) return x.rank < y.rank;
    if (x.group.order() != y.group.order()) return x.group.order() < y.group.order();
    return x.id < y.id;
  });
  const std::size_t k = classes.size();
  parallel_for(k, workers, [&](std::size_t j) {
    if (classes[j].aut_sigma == 0) classes[j].aut_sigma = aut_sigma_order(classes[j].group, classes[j].sigma, caps);
  });
  MomentMatrix M;
  M.a.assign(k, std::vector<Rational>(k));
  for (const auto& c : classes) M.ids.push_back(c.id);
  parallel_for(k * k, workers, [&](std::size_t t) {
    const std::size_t i = t / k, j = t % k;
    const auto& Si = classes[i];
    const auto& Sj = classes[j];
    const std::uint64_t s = count_sur_sigma(Sj.group, Sj.sigma, Si.group, Si.sigma, caps);
    M.a[i][j] = Rational(BigInt(s)) / Rational(BigInt(Sj.aut_sigma));
  });
  for (std::size_t i = 0; i < k; ++i) {
    if (M.a[i][i] != 1)
      throw InvariantError("moment matrix: diagonal entry " + std::to_string(i) + " is " + to_string(M.a[i][i]));
    Rational s = 0;
    for (const auto& v : M.a[i]) s += v;
    M.row_sums.push_back(s);
  }
  return M;
}

MomentMatrix matrix_from_doubles(const std::vector<std::vector<double>>& a) {
  MomentMatrix M;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].size() == a.size(), "matrix_from_doubles: matrix is not square");
    M.ids.push_back(std::to_string(i));
    std::vector<Rational> row;
    Rational s = 0;
    for (double v : a[i]) {
      row.emplace_back(v);
      s += row.back();
    }
    M.a.push_back(std::move(row));
    M.row_sums.push_back(s);
  }
  return M;
}

LaReport check_la_hypotheses(const MomentMatrix& M) {
  LaReport r;
  r.diagonal_one = true;
  r.nonnegative = true;
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (M.a[i][i] != 1) r.diagonal_one = false;
    for (const auto& v : M.a[i])
      if (v < 0) r.nonnegative = false;
    if (i == 0 || M.row_sums[i] > r.sup_row_sum) r.sup_row_sum = M.row_sums[i];
  }
  r.margin = 2.0 - static_cast<double>(r.sup_row_sum);
  r.below_19 = r.sup_row_sum <= Rational(19, 10);
  return r;
}

namespace {

std::vector<std::vector<double>> to_doubles(const MomentMatrix& M) {
  std::vector<std::vector<double>> a(M.size(), std::vector<double>(M.size()));
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = 0; j < M.size(); ++j) a[i][j] = static_cast<double>(M.a[i][j]);
  return a;
}

double residual(const std::vector<std::vector<double>>& a, const std::vector<double>& x) {
  double r = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[i][j] * x[j];
    r = std::max(r, std::abs(1.0 - s));
  }
  return r;
}

template <class Step>
Solution iterate(const MomentMatrix& M, double tol, int max_iter, Step step) {
  const LaReport rep = check_la_hypotheses(M);
  if (!rep.hypotheses_hold())
    throw ArgumentError("unique_solution: hypotheses fail (sup row sum " + to_string(rep.sup_row_sum) + ")");
  const auto a = to_doubles(M);
  Solution s;
  s.contraction = static_cast<double>(rep.sup_row_sum) - 1.0;
  s.x.assign(M.size(), 0.0);
  for (s.iterations = 0; s.iterations < max_iter; ++s.iterations) {
    s.residual = residual(a, s.x);
    if (s.residual < tol) return s;
    step(a, s.x);
  }
  throw InvariantError("unique_solution: no convergence after " + std::to_string(max_iter) + " iterations");
}

}  // namespace

Solution unique_solution(const MomentMatrix& M, double tol, int max_iter) {
  return iterate(M, tol, max_iter, [](const auto& a, std::vector<double>& x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double s = 0;
      for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
      y[i] = x[i] + (1.0 - s);
    }
    x.swap(y);
  });
}

Solution gauss_seidel_solution(const MomentMatrix& M, double tol, int max_iter) {
  return iterate(M, tol, max_iter, [](const auto& a, std::vector<double>& x) {
    for (std::size_t i = x.size(); i-- > 0;) {
      double s = 0;
      for (std::size_t j = 0; j < x.size(); ++j)
        if (j != i) s += a[i][j] * x[j];
      x[i] = 1.0 - s;
    }
  });
}

std::vector<std::vector<double>> random_la_matrix(int k, double max_off, std::mt19937_64& rng) {
  require(k >= 1, "random_la_matrix: k must be positive");
  require(max_off >= 0 && max_off < 1, "random_la_matrix: max_off must lie in [0, 1)");
  std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) {
    a[i][i] = 1.0;
    const double budget = max_off * uniform01(rng);
    std::vector<double> w(k, 0.0);
    double total = 0;
    for (int j = 0; j < k; ++j)
      if (j != i) total += (w[j] = uniform01(rng));
    if (total > 0)
      for (int j = 0; j < k; ++j)
        if (j != i) a[i][j] = budget * w[j] / total;
  }
  return a;
}

void write_matrix_csv(std::ostream& os, const MomentMatrix& M) {
  os << "class";
  for (const auto& id : M.ids) os << ',' << id;
  os << '\n';
  for (std::size_t i = 0; i < M.size(); ++i) {
    os << M.ids[i];
    for (const auto& v : M.a[i]) os << ',' << to_string(v);
    os << '\n';
  }
}

Truncation enumerated_truncation(int p, int c, int max_rank, const Caps& caps) {
  Truncation t;
  for (int g = 0; g <= max_rank; ++g) {
    const RelationSpace space = relation_space(g, c, p, caps);
    const double mu = mu_cl(g, p);
    for (auto& rec : enumerate_quotient_classes(space, caps)) {
      ClassRep cr;
      cr.id = rec.id;
      cr.group = std::move(rec.group);
      cr.sigma = std::move(rec.sigma);
      cr.rank = g;
      cr.aut_sigma = rec.aut_sigma;
      t.classes.push_back(std::move(cr));
      t.expected_x.push_back(mu * static_cast<double>(rec.conditional) * static_cast<double>(rec.aut_sigma));
    }
  }
  // same order as build_moment_matrix
  std::vector<std::size_t> order(t.classes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto &a = t.classes[x], &b = t.classes[y];
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.group.order() != b.group.order()) return a.group.order() < b.group.order();
    return a.id < b.id;
  });
  Truncation sorted;
  for (std::size_t i : order) {
    sorted.classes.push_back(std::move(t.classes[i]));
    sorted.expected_x.push_back(t.expected_x[i]);
  }
  for (auto& cr : sorted.classes) {
    double d = 0;
    for (int g = max_rank + 1;; ++g) {
      const double term = mu_cl(g, p) * static_cast<double>(moment_rank_closed_form(cr.group, cr.sigma, g));
      d += term;
      if (g > max_rank + 3 && term < 1e-300) break;
      if (g > max_rank + 60) break;
    }
    sorted.delta.push_back(d);
  }
  std::vector<ClassRep> copy = sorted.classes;
  const MomentMatrix M = build_moment_matrix(copy, caps);
  const double a = static_cast<double>(check_la_hypotheses(M).sup_row_sum);
  double dmax = 0;
  for (double d : sorted.delta) dmax = std::max(dmax, d);
  sorted.tolerance = a < 2 ? dmax / (2.0 - a) : INFINITY;
  return sorted;
}

}  // namespace bbh
