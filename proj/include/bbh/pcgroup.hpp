#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bbh/common.hpp"

namespace bbh {

/// Normal-form element of a PcGroup: g_1^{e_1} ... g_n^{e_n} with 0 <= e_i < p.
struct Element {
  std::vector<std::uint8_t> exps;

  Element() = default;
  explicit Element(std::size_t n) : exps(n, 0) {}
  explicit Element(std::vector<std::uint8_t> e) : exps(std::move(e)) {}

  std::size_t size() const { return exps.size(); }
  std::uint8_t operator[](std::size_t i) const { return exps[i]; }
  std::uint8_t& operator[](std::size_t i) { return exps[i]; }
  bool is_identity() const;
  /// Index of the first nonzero exponent, or size() for the identity.
  std::size_t depth() const;

  auto operator<=>(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

/// How a generator arises: weight-1 generators are free, the rest are the
/// last letter of some power or commutator relation.
struct Definition {
  enum class Kind { Free, Power, Commutator, None };
  Kind kind = Kind::None;
  int a = -1;  // Free: index among weight-1 generators; Power: base; Commutator: larger index
  int b = -1;  // Commutator: smaller index
};

class ParseError : public ArgumentError {
 public:
  ParseError(int line, const std::string& msg)
      : ArgumentError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ConsistencyError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Finite p-group given by a weighted power-commutator presentation.
///
/// Generators are ordered by non-decreasing weight. The power relation of
/// g_i and the commutator relation [g_j, g_i] (j > i) are stored as normal
/// forms; both involve only generators of strictly larger index. Collection
/// is "from the left". Commutators follow [a, b] = a^-1 b^-1 a b, so that
/// g_j g_i = g_i g_j [g_j, g_i].
class PcGroup {
 public:
  PcGroup() = default;
  /// Presentation with every relation trivial (elementary abelian until relations are set).
  PcGroup(int p, std::vector<int> weights, int pclass);

  int prime() const { return p_; }
  int size() const { return n_; }
  int pclass() const { return c_; }
  int weight(int i) const { return weights_[i]; }
  const std::vector<int>& weights() const { return weights_; }
  /// Number of weight-1 generators.
  int rank() const;
  /// p^n; throws CapError beyond 2^63.
  std::uint64_t order() const;

  const Element& power_relation(int i) const { return pow_[i]; }
  const Element& commutator_relation(int j, int i) const { return comm_[idx(j, i)]; }
  void set_power_relation(int i, Element rhs);
  void set_commutator_relation(int j, int i, Element rhs);

  Element identity() const { return Element(n_); }
  Element generator(int i, int e = 1) const;
  Element multiply(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  Element power(const Element& a, std::uint64_t k) const;
  /// a^-1 b^-1 a b
  Element commutator(const Element& a, const Element& b) const;
  Element conjugate(const Element& a, const Element& by) const;

  /// Throws ArgumentError unless x has length n and entries in [0, p).
  void validate(const Element& x) const;

  /// Runs the standard overlap tests; each entry describes one failure.
  std::vector<std::string> consistency_failures() const;
  bool is_consistent() const { return consistency_failures().empty(); }

  /// Generator definitions; recomputed from the relations by infer_definitions().
  const std::vector<Definition>& definitions() const { return defs_; }
  void infer_definitions();
  bool fully_defined() const;

  /// Mixed-radix enumeration of elements, first generator most significant.
  std::uint64_t index_of(const Element& x) const;
  Element element_at(std::uint64_t index) const;

  bool operator==(const PcGroup& o) const;

  /// Callback receives (lhs, rhs, label) for every overlap test.
  template <class Fn>
  void for_each_overlap(int limit, Fn&& fn) const;

 private:
  std::size_t idx(int j, int i) const { return static_cast<std::size_t>(j) * n_ + i; }
  void collect(Element& x, std::vector<int>& stack) const;
  void refresh_caches();
  void check_relation_shape(int lhs_min, const Element& rhs, const std::string& what) const;

  int p_ = 0;
  int n_ = 0;
  int c_ = 0;
  std::vector<int> weights_;
  std::vector<Element> pow_;
  std::vector<Element> comm_;  // n*n, only j > i used
  std::vector<Definition> defs_;

  // collection caches
  std::vector<std::vector<int>> pow_letters_;
  std::vector<std::vector<int>> conj_letters_;  // g_j^{g_i} as letters, j > i
  std::vector<char> comm_trivial_;
};

/// Number of generators of Q_c(F_g) predicted by the Witt dimension formula.
int free_quotient_generator_count(int g, int c);

/// Q_c(F_g): c <= 2 closed form, c >= 3 iterated p-covering.
PcGroup build_free_pclass_quotient(int g, int c, int p, const Caps& caps = {});

/// p-covering group of a fully defined presentation: tails on every
/// non-defining relation, then consistency enforcement.
PcGroup p_covering_group(const PcGroup& G);

/// Text format: header `p n c`, then `gen i weight w`, `pow i = word`,
/// `comm j i = word`; words are `gen^exp` tokens with 1-based generators.
/// Trivial relations are omitted.
std::string serialize_presentation(const PcGroup& G);
PcGroup parse_presentation(std::string_view text);
void save_presentation(const PcGroup& G, const std::filesystem::path& path);
PcGroup load_presentation(const std::filesystem::path& path);

/// Subgroup of a PcGroup stored as an induced polycyclic sequence.
/// Keeps a pointer to the group; the group must outlive it.
class PcSubgroup {
 public:
  explicit PcSubgroup(const PcGroup& G);

  static PcSubgroup generated(const PcGroup& G, std::span<const Element> gens);
  static PcSubgroup normal_closure(const PcGroup& G, std::span<const Element> gens);

  const PcGroup& group() const { return *G_; }
  bool contains(const Element& x) const;
  void add(const Element& x) { close({x}, false); }
  void add_normal(const Element& x) { close({x}, true); }
  int log_order() const;
  std::uint64_t order() const;
  /// Leading depths of the sequence, ascending.
  std::vector<int> leading_depths() const;
  /// Canonical generating sequence (unique per subgroup), ascending depth.
  std::vector<Element> canonical_sequence() const;
  std::string key() const;
  /// Canonical representative of the right coset x N (valid for normal N).
  Element reduce(const Element& x) const;
  bool is_normal() const;

  bool operator==(const PcSubgroup& o) const { return key() == o.key(); }

 private:
  Element sift(Element x) const;
  void close(std::vector<Element> queue, bool normal);

  const PcGroup* G_;
  std::vector<std::optional<Element>> seq_;
  std::vector<std::vector<Element>> inv_powers_;  // seq[d]^{-e}, e = 0..p-1
};

/// Frattini subgroup of a free quotient: generated by generators of weight >= 2.
PcSubgroup pc_frattini(const PcGroup& G);

// ---------------------------------------------------------------------------

template <class Fn>
void PcGroup::for_each_overlap(int limit, Fn&& fn) const {
  const int n = limit < 0 ? n_ : limit;
  auto g = [&](int i) { return generator(i); };
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < j; ++i) {
        Element lhs = multiply(multiply(g(k), g(j)), g(i));
        Element rhs = multiply(g(k), multiply(g(j), g(i)));
        fn(lhs, rhs, "triple " + std::to_string(k + 1) + " " + std::to_string(j + 1) + " " + std::to_string(i + 1));
      }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      Element lhs = multiply(generator(j, p_ - 1), multiply(g(j), g(i)));
      Element rhs = multiply(pow_[j], g(i));
      fn(lhs, rhs, "power-left " + std::to_string(j + 1) + " " + std::to_string(i + 1));
      lhs = multiply(g(j), pow_[i]);
      rhs = multiply(multiply(g(j), g(i)), generator(i, p_ - 1));
      fn(lhs, rhs, "power-right " + std::to_string(j + 1) + " " + std::to_string(i + 1));
    }
  for (int i = 0; i < n; ++i) {
    Element lhs = multiply(g(i), pow_[i]);
    Element rhs = multiply(pow_[i], g(i));
    fn(lhs, rhs, "power " + std::to_string(i + 1));
  }
}

}  // namespace bbh
