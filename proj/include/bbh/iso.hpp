#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbh/concrete.hpp"

namespace bbh {

struct Fingerprint {
  std::size_t order = 0;
  std::vector<std::uint64_t> abelian_invariants;
  std::vector<std::size_t> p_central_orders;  // |G / P_i(G)| for i = 1..class
  std::map<int, int> order_census;            // element order -> count
  std::map<int, int> class_census;            // conjugacy class size -> number of classes

  bool operator==(const Fingerprint&) const = default;
  /// `<order>-<16 hex digits>`, safe for CSV cells and file names.
  std::string id() const;
};

Fingerprint iso_fingerprint(const ConcreteGroup& G);

/// Size of the conjugacy class of each element.
std::vector<int> conjugacy_class_sizes(const ConcreteGroup& G);

/// An isomorphism G -> H as an element map, found by searching images of a
/// Burnside basis among elements with matching order and class size.
/// Throws CapError when either order exceeds caps.exact_iso_order.
std::optional<std::vector<int>> find_isomorphism(const ConcreteGroup& G, const ConcreteGroup& H, const Caps& caps = {});

enum class IsoMode { Exact, FingerprintOnly };

/// In FingerprintOnly mode the answer is heuristic: equal fingerprints only.
bool is_isomorphic(const ConcreteGroup& G, const ConcreteGroup& H, IsoMode mode = IsoMode::Exact,
                   const Caps& caps = {});

}  // namespace bbh
