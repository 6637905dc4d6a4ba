#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bbh/common.hpp"
#include "bbh/pcgroup.hpp"

namespace bbh {

/// Sorted list of element indices.
using ElementSet = std::vector<int>;

/// Finite p-group stored by its multiplication table. The identity is index 0.
class ConcreteGroup {
 public:
  ConcreteGroup() = default;
  /// Table is row-major order x order. Checks identity, latin-square shape and p-power order.
  ConcreteGroup(int p, std::size_t order, std::vector<std::uint16_t> table, std::vector<int> gens);

  static ConcreteGroup from_pc(const PcGroup& G, const Caps& caps = {});
  static ConcreteGroup trivial(int p);

  int prime() const { return p_; }
  std::size_t order() const { return n_; }
  int identity() const { return 0; }
  const std::vector<int>& generators() const { return gens_; }

  int mul(int a, int b) const { return mul_[static_cast<std::size_t>(a) * n_ + b]; }
  int inv(int a) const { return inv_[a]; }
  int pow(int a, std::uint64_t k) const;
  int commutator(int a, int b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }
  int conjugate(int a, int by) const { return mul(mul(inv(by), a), by); }
  int element_order(int a) const;

  /// Exhaustive check when order^3 <= limit, otherwise `samples` random triples.
  bool verify_associative(std::uint64_t limit = 729ULL * 729 * 729, int samples = 200000) const;

 private:
  int p_ = 0;
  std::size_t n_ = 0;
  std::vector<std::uint16_t> mul_;
  std::vector<std::uint16_t> inv_;
  std::vector<int> gens_;
};

ConcreteGroup direct_product(const ConcreteGroup& G, const ConcreteGroup& H);

/// Subgroup generated by the given elements.
ElementSet subgroup_closure(const ConcreteGroup& G, std::span<const int> gens);
ElementSet normal_closure(const ConcreteGroup& G, std::span<const int> gens);
/// A short generating list of the subgroup S (greedy, ascending index).
std::vector<int> generating_list(const ConcreteGroup& G, const ElementSet& S);
bool is_normal(const ConcreteGroup& G, const ElementSet& S);

struct Quotient {
  ConcreteGroup group;
  std::vector<int> proj;  // element of G -> coset index
};
Quotient quotient(const ConcreteGroup& G, const ElementSet& N);
Quotient quotient_by_normal_closure(const ConcreteGroup& G, std::span<const int> relators);

/// Subgroup S as a group in its own right; embed maps its elements into G.
struct Embedded {
  ConcreteGroup group;
  std::vector<int> embed;
};
Embedded subgroup_as_group(const ConcreteGroup& G, const ElementSet& S);

struct PCentralSeries {
  std::vector<ElementSet> terms;  // P_0 = G, ..., last term trivial
  int pclass = 0;
};
PCentralSeries lower_p_central_series(const ConcreteGroup& G);
ElementSet frattini(const ConcreteGroup& G);
ElementSet derived_subgroup(const ConcreteGroup& G);

int generator_rank(const ConcreteGroup& G);
int p_class(const ConcreteGroup& G);
/// Invariant factors of G^ab, ascending.
std::vector<std::uint64_t> abelian_invariants(const ConcreteGroup& G);
/// Same, for an abelian p-group from its element-order census.
std::vector<std::uint64_t> abelian_invariants_from_orders(int p, const std::vector<std::uint64_t>& orders);

/// d elements generating G. Elements of `prefer` are tried first, in order.
std::vector<int> burnside_basis(const ConcreteGroup& G, std::span<const int> prefer = {});

/// Extends maps defined on a generating list along a spanning tree of the
/// Cayley graph; reusable across many image tuples.
class HomExtender {
 public:
  HomExtender(const ConcreteGroup& G, std::vector<int> gens);
  const std::vector<int>& generators() const { return gens_; }
  /// Full element map, or nullopt when the images do not define a homomorphism.
  std::optional<std::vector<int>> extend(const ConcreteGroup& H, std::span<const int> images) const;
  /// Like extend but only reports whether a homomorphism exists.
  bool is_hom(const ConcreteGroup& H, std::span<const int> images) const;

 private:
  const ConcreteGroup* G_;
  std::vector<int> gens_;
  std::vector<int> order_;                     // BFS order of elements (excluding identity)
  std::vector<std::pair<int, int>> parent_;    // element -> (parent, generator slot)
  std::vector<std::pair<int, int>> nontree_;   // (element, generator slot) edges to verify
};

std::optional<std::vector<int>> extend_hom(const ConcreteGroup& G, std::span<const int> gens,
                                           const ConcreteGroup& H, std::span<const int> images);

bool is_injective(const std::vector<int>& map, std::size_t target_order);
bool is_surjective(const std::vector<int>& map, std::size_t target_order);

/// Images of all PC generators under the map free generator i -> free_images[i],
/// computed from the generator definitions. No relation is checked.
template <class T, class Mul, class Inv>
std::vector<T> images_from_definitions(const PcGroup& F, std::span<const T> free_images, T one, Mul mul, Inv inv);

/// Image of every PC generator in H under free generator i -> images[i].
std::vector<int> pc_generator_images(const PcGroup& F, const ConcreteGroup& H, std::span<const int> images);
/// True when every power and commutator relation of F holds for these generator images.
bool pc_relations_hold(const PcGroup& F, const ConcreteGroup& H, std::span<const int> gen_images);
int pc_evaluate(const PcGroup& F, const ConcreteGroup& H, std::span<const int> gen_images, const Element& x);

/// r(G) = dim H^2(G, F_p), via the kernel of a lift into the free quotient one class deeper.
/// `basis` picks the presentation; empty means burnside_basis(G).
int relation_rank(const ConcreteGroup& G, const Caps& caps = {}, std::span<const int> basis = {});

/// Kernel of the map F -> H sending free generator i to free_images[i], as a
/// PcSubgroup of F. Enumerates F; the map must be a homomorphism.
PcSubgroup pc_kernel(const PcGroup& F, const ConcreteGroup& H, std::span<const int> free_images);

/// dim R/R^p[F,R] for R the kernel inside the free quotient F.
int relator_dimension(const PcGroup& F, const PcSubgroup& R);

// ---------------------------------------------------------------------------

template <class T, class Mul, class Inv>
std::vector<T> images_from_definitions(const PcGroup& F, std::span<const T> free_images, T one, Mul mul, Inv inv) {
  const int n = F.size();
  const int p = F.prime();
  std::vector<T> img(n, one);
  auto power = [&](T x, int e) {
    T r = one;
    for (int i = 0; i < e; ++i) r = mul(r, x);
    return r;
  };
  for (int k = 0; k < n; ++k) {
    const Definition& d = F.definitions()[k];
    T lhs = one;
    const Element* rhs = nullptr;
    switch (d.kind) {
      case Definition::Kind::Free:
        img[k] = free_images[d.a];
        continue;
      case Definition::Kind::Power:
        lhs = power(img[d.a], p);
        rhs = &F.power_relation(d.a);
        break;
      case Definition::Kind::Commutator: {
        const T a = img[d.a], b = img[d.b];
        lhs = mul(mul(inv(a), inv(b)), mul(a, b));
        rhs = &F.commutator_relation(d.a, d.b);
        break;
      }
      case Definition::Kind::None:
        throw ArgumentError("images_from_definitions: generator " + std::to_string(k + 1) + " has no definition");
    }
    T prefix = one;
    for (int t = 0; t < k; ++t)
      if ((*rhs)[t]) prefix = mul(prefix, power(img[t], (*rhs)[t]));
    img[k] = mul(inv(prefix), lhs);
  }
  return img;
}

}  // namespace bbh
