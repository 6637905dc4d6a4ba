#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bbh/concrete.hpp"
#include "bbh/equivariant.hpp"
#include "bbh/iso.hpp"
#include "bbh/pcgroup.hpp"

namespace bbh {

/// p^{-g^2} prod_{k<=g} (1-p^{-k})^{-2} prod_{i>=1} (1-p^{-i}), the infinite
/// product truncated once its relative tail is below `precision`.
double mu_cl(int g, int p, double precision = 1e-12);
/// sum_{g > D} mu_cl(g) * base^g, summed until terms vanish in double precision.
double mu_cl_weighted_tail(int D, int p, double base);

/// Conditional part of the exact measure of a class at rank g:
/// p^{g^2} / |Aut_sigma| * prod_{k=1}^{g} (1-p^{-k}) * prod_{k=1+g-h}^{g} (1-p^{-k}).
Rational lemma48_conditional(int p, int g, int h, std::uint64_t aut_sigma);

/// The free quotient F_c = Q_c(F_g), its canonical involution, and the
/// relation pool X_c = {s in Phi(F_c) : sigma(s) = s^-1}.
struct RelationSpace {
  int p = 0, g = 0, c = 0;
  PcGroup F;
  std::vector<Element> sigma;  // images of the PC generators
  std::vector<int> frattini_positions;
  std::uint64_t phi_order = 1;
  std::uint64_t z_phi_order = 1;
  std::vector<Element> X;

  Element apply_sigma(const Element& x) const;
};

RelationSpace relation_space(int g, int c, int p, const Caps& caps = {});

/// u^{-1} sigma(u) for u uniform in Phi(F_c).
Element sample_relation(const RelationSpace& space, std::mt19937_64& rng);

/// F_c as a ConcreteGroup with its involution and X_c as element indices.
struct ConcreteSpace {
  ConcreteGroup F;
  Involution sigma;
  std::vector<int> X;
};
ConcreteSpace concrete_space(const RelationSpace& space, const Caps& caps = {});

constexpr std::uint64_t kEmpiricalBlock = 1024;

struct SampledGroup {
  ConcreteGroup group;
  Involution sigma;
  std::vector<int> relators;  // indices in the concrete F_c
  ElementSet kernel;
};
SampledGroup sample_group(const RelationSpace& space, const ConcreteSpace& cs, std::mt19937_64& rng);

/// Quotient of the concrete F_c by the normal closure of relators, with the
/// induced involution. Throws InvariantError when the kernel is not sigma-invariant.
SampledGroup quotient_by_relators(const ConcreteSpace& cs, std::vector<int> relators);

/// N groups sampled at fixed rank, sample i drawn from block i / kEmpiricalBlock
/// with its own substream, so the list does not depend on `workers`.
std::vector<SampledGroup> sample_groups(const RelationSpace& space, const ConcreteSpace& cs, std::uint64_t N,
                                        std::uint64_t seed, int workers = 1);

struct IsoClassRecord {
  Fingerprint fingerprint;
  std::string id;
  ConcreteGroup group;
  Involution sigma;
  std::uint64_t tuples = 0;
  std::vector<int> example_relators;
  int d = 0;
  int pclass = 0;
  int hc = 0;
  std::uint64_t aut_sigma = 0;
  Rational conditional;          // tuples / |X_c|^g
  Rational formula_conditional;  // Lemma 4.8 conditional part
  double formula_value = 0;      // mu_cl(g) * formula_conditional
};

/// Exact tuple counts per isomorphism class of F_c / <<r_1..r_g>> over X_c^g.
std::vector<IsoClassRecord> enumerate_quotient_classes(const RelationSpace& space, const Caps& caps = {});

/// h_c(P): dim R/R^p[F_c,R] for the kernel R of a sigma-surjection F_c -> P when
/// class(P) = c, otherwise r(P).
int compute_hc(const ConcreteGroup& P, const Involution& sP, const RelationSpace& space, const Caps& caps = {});

enum class MomentRoute { Auto, Subgroup, Fiber };

struct MomentRank {
  int g = 0;
  double mu = 0;
  Rational expected;         // sum over classes at rank g of frequency * |Sur_sigma(P, H)|
  std::optional<Rational> expected_strict;  // same, restricted to classes of p-class exactly c
  std::string route;
};

struct MomentResult {
  double value = 0;
  std::optional<double> value_strict;
  double tail_bound = 0;
  std::vector<MomentRank> ranks;
};

/// sum_{g<=D} mu_cl(g) E_g with E_g computed exactly per rank, and a bound on the
/// omitted ranks: sum_{g>D} mu_cl(g) |Y(H)|^g.
MomentResult moment_exact(const ConcreteGroup& H, const Involution& sH, int c, int D, const Caps& caps = {},
                          MomentRoute route = MomentRoute::Auto);

/// E_g by one route, as an exact rational.
Rational moment_rank_term(const SigmaTarget& T, const RelationSpace& space, MomentRoute route, const Caps& caps,
                          std::optional<Rational>* strict = nullptr);

/// E_g in closed form for class(H) <= c: every sigma-surjection F_c -> H kills the
/// same number |X_c| / |Y(Phi(H))| of pool elements, so
/// E_g = |Sur_sigma(F_g, H)| / |Y(Phi(H))|^g.
Rational moment_rank_closed_form(const ConcreteGroup& H, const Involution& sH, int g);

struct EmpiricalResult {
  std::uint64_t N = 0;
  double estimate = 0;
  double std_error = 0;
  double ci_low = 0, ci_high = 0;  // estimate -/+ 1.96 standard errors
  double truncated_mass = 0;       // mu_cl mass above the rank bound
  std::uint64_t sum = 0;
  BigInt sum_squares;
  std::vector<std::uint64_t> rank_counts;
};

/// Two-stage sampling: rank g from mu_cl truncated to g <= D and renormalised,
/// then g relators u^{-1} sigma(u). Samples are split into blocks of
/// kEmpiricalBlock, block b drawing from mt19937_64(substream_seed(seed, b)), so
/// the result does not depend on `workers`.
EmpiricalResult moment_empirical(const ConcreteGroup& H, const Involution& sH, int c, std::uint64_t N, int D,
                                 std::uint64_t seed, int workers = 1, const Caps& caps = {});

}  // namespace bbh
