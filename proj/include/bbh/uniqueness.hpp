#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "bbh/concrete.hpp"
#include "bbh/equivariant.hpp"

namespace bbh {

struct ClassRep {
  std::string id;
  ConcreteGroup group;
  Involution sigma;
  int rank = 0;
  std::uint64_t aut_sigma = 0;  // 0 = compute in build_moment_matrix
};

/// a_ij = |Sur_sigma(S_j, S_i)| / |Aut_sigma(S_j)|, exact.
struct MomentMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> row_sums;

  std::size_t size() const { return ids.size(); }
};

/// Classes are sorted by (rank, order, id) before building.
MomentMatrix build_moment_matrix(std::vector<ClassRep>& classes, const Caps& caps = {}, int workers = 1);
MomentMatrix matrix_from_doubles(const std::vector<std::vector<double>>& a);

struct LaReport {
  bool diagonal_one = false;
  bool nonnegative = false;
  Rational sup_row_sum;
  double margin = 0;  // 2 - sup
  bool below_19 = false;
  bool hypotheses_hold() const { return diagonal_one && nonnegative && margin > 0; }
};
LaReport check_la_hypotheses(const MomentMatrix& M);

struct Solution {
  std::vector<double> x;
  double residual = 0;     // sup |1 - Mx|
  double contraction = 0;  // sup row sum - 1
  int iterations = 0;
};

/// Fixed point x <- x + (1 - Mx). Throws ArgumentError when the hypotheses fail
/// and InvariantError when max_iter is reached.
Solution unique_solution(const MomentMatrix& M, double tol = 1e-13, int max_iter = 100000);
/// Gauss-Seidel sweeps in reverse index order.
Solution gauss_seidel_solution(const MomentMatrix& M, double tol = 1e-13, int max_iter = 100000);

/// k x k matrix with unit diagonal and off-diagonal row sums below max_off.
std::vector<std::vector<double>> random_la_matrix(int k, double max_off, std::mt19937_64& rng);

void write_matrix_csv(std::ostream& os, const MomentMatrix& M);

/// Enumerated classes of positive mass at ranks <= max_rank with the exact
/// expected solution x_j = mu_BBH,c(S_j) |Aut_sigma(S_j)| and the propagated
/// truncation tolerance max_i delta_i / (2 - a), delta_i being the exact mass
/// of rank > max_rank in row i.
struct Truncation {
  std::vector<ClassRep> classes;
  std::vector<double> expected_x;
  std::vector<double> delta;
  double tolerance = 0;
};
Truncation enumerated_truncation(int p, int c, int max_rank, const Caps& caps = {});

}  // namespace bbh
