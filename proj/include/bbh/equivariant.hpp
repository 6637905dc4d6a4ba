#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bbh/concrete.hpp"
#include "bbh/pcgroup.hpp"

namespace bbh {

/// Automorphism of order <= 2 of a ConcreteGroup, stored as an element map.
struct Involution {
  std::vector<int> map;

  int operator()(int x) const { return map[x]; }
};

/// Extends generator images (one per G.generators()) and checks that the
/// result is a bijective homomorphism with square the identity.
Involution involution_from_generators(const ConcreteGroup& G, std::span<const int> images);
Involution identity_involution(const ConcreteGroup& G);
/// x -> x^-1; only an automorphism when G is abelian.
Involution inversion_involution(const ConcreteGroup& G);

/// Images of all PC generators of a free quotient under x_i -> x_i^-1.
std::vector<Element> canonical_gi(const PcGroup& F);
Element apply_pc_map(const PcGroup& F, const std::vector<Element>& gen_images, const Element& x);
/// The canonical involution on ConcreteGroup::from_pc(F).
Involution canonical_gi_concrete(const PcGroup& F, const ConcreteGroup& G);

bool is_involution(const ConcreteGroup& G, const Involution& s);
/// sigma^2 = 1 and sigma acts as inversion on G / Phi(G).
bool is_gi(const ConcreteGroup& G, const Involution& s);

ElementSet y_set(const ConcreteGroup& G, const Involution& s);
ElementSet z_set(const ConcreteGroup& G, const Involution& s);
/// g^-1 sigma(g)
inline int f_map(const ConcreteGroup& G, const Involution& s, int g) { return G.mul(G.inv(g), s(g)); }

bool is_invariant(const Involution& s, const ElementSet& S);
/// Induced involution on G/N; throws ArgumentError when N is not sigma-invariant.
Involution induced_involution(const Quotient& Q, const Involution& s);
/// Restriction to an invariant subgroup.
Involution restricted_involution(const Embedded& E, const Involution& s);
/// (a, b) -> (b, a) on direct_product(H, H).
Involution switch_involution(const ConcreteGroup& H);

/// |G| = |Y(G)| |Z(G)|.
bool check_order_split(const ConcreteGroup& G, const Involution& s);
/// Every coset of Phi(G) holds |Y(G)| / |G : Phi(G)| elements of Y(G).
bool check_y_equidistribution(const ConcreteGroup& G, const Involution& s);

struct QuotientLemmas {
  bool z_surjective = false;  // Z(G) maps onto Z(G/K)
  bool y_kernel = false;      // |Y(K)| = |Y(G)| / |Y(G/K)|
};
/// Both statements for the quotient map G -> G/K; K must be normal and sigma-invariant.
QuotientLemmas check_quotient_lemmas(const ConcreteGroup& G, const Involution& s, const ElementSet& K);

/// Exact counts by enumerating images of a Burnside basis of G (chosen inside
/// Y(G) where possible). Throw CapError("search_space") beyond caps.search_space.
std::uint64_t count_hom(const ConcreteGroup& G, const ConcreteGroup& H, const Caps& caps = {});
std::uint64_t count_sur(const ConcreteGroup& G, const ConcreteGroup& H, const Caps& caps = {});
std::uint64_t count_hom_sigma(const ConcreteGroup& G, const Involution& sG, const ConcreteGroup& H,
                              const Involution& sH, const Caps& caps = {});
std::uint64_t count_sur_sigma(const ConcreteGroup& G, const Involution& sG, const ConcreteGroup& H,
                              const Involution& sH, const Caps& caps = {});
std::uint64_t aut_sigma_order(const ConcreteGroup& G, const Involution& s, const Caps& caps = {});

/// |Sur_sigma(F_d, H)| for the free pro-p group: tuples in Y(H)^d generating H.
std::uint64_t count_sur_sigma_free(int d, const ConcreteGroup& H, const Involution& sH, const Caps& caps = {});

/// |Y(H)|^d (p^d - p^{r-1}) ... (p^d - 1) / p^{dr} with r = d(H).
BigInt sur_sigma_free_closed_form(int d, const ConcreteGroup& H, const Involution& sH);

struct SigmaFiber {
  Embedded subgroup;  // F inside H x H
  Involution sigma;   // factor switch restricted to F
};

/// Switch-invariant subgroups of H x H that project onto the first factor.
std::vector<SigmaFiber> sigma_fiber_subgroups(const ConcreteGroup& H, const Caps& caps = {});

/// Helper for surjectivity tests: coordinates of each element in H/Phi(H) as a
/// vector over F_p packed into an integer, plus a rank check.
class FrattiniCoordinates {
 public:
  explicit FrattiniCoordinates(const ConcreteGroup& H);
  int rank() const { return d_; }
  std::uint32_t code(int x) const { return code_[x]; }
  /// True when the given elements span H/Phi(H).
  bool spans(std::span<const int> xs) const;

 private:
  int p_;
  int d_;
  std::vector<std::uint32_t> code_;
};

/// Target group with the data reused across many surjection counts.
struct SigmaTarget {
  SigmaTarget(const ConcreteGroup& H, Involution sigma);

  const ConcreteGroup* H;
  Involution sigma;
  ElementSet Y;
  FrattiniCoordinates coords;
  int pclass;
};

/// |Sur_sigma(F / <<relators>>, H)| for a free quotient F with its canonical
/// involution: tuples y in Y(H)^g that generate H, define a homomorphism and
/// kill every relator. The homomorphism check is skipped when class(H) <= class(F).
std::uint64_t count_sur_sigma_pc(const PcGroup& F, std::span<const Element> relators, const SigmaTarget& T,
                                 const Caps& caps = {});
std::uint64_t count_sur_sigma_pc(const PcGroup& F, std::span<const Element> relators, const ConcreteGroup& H,
                                 const Involution& sH, const Caps& caps = {});

}  // namespace bbh
