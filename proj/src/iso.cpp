#include "bbh/iso.hpp"

#include <cstdio>

namespace bbh {

std::vector<int> conjugacy_class_sizes(const ConcreteGroup& G) {
  const std::size_t n = G.order();
  std::vector<int> cls(n, -1), size;
  for (std::size_t x = 0; x < n; ++x) {
    if (cls[x] >= 0) continue;
    const int id = static_cast<int>(size.size());
    std::vector<int> orbit{static_cast<int>(x)};
    cls[x] = id;
    for (std::size_t i = 0; i < orbit.size(); ++i)
      for (int g : G.generators()) {
        const int y = G.conjugate(orbit[i], g);
        if (cls[y] < 0) {
          cls[y] = id;
          orbit.push_back(y);
        }
      }
    size.push_back(static_cast<int>(orbit.size()));
  }
  std::vector<int> out(n);
  for (std::size_t x = 0; x < n; ++x) out[x] = size[cls[x]];
  return out;
}

Fingerprint iso_fingerprint(const ConcreteGroup& G) {
  Fingerprint f;
  f.order = G.order();
  f.abelian_invariants = abelian_invariants(G);
  const auto series = lower_p_central_series(G);
  for (std::size_t i = 1; i < series.terms.size(); ++i) f.p_central_orders.push_back(G.order() / series.terms[i].size());
  for (std::size_t x = 0; x < G.order(); ++x) ++f.order_census[G.element_order(static_cast<int>(x))];
  const auto sizes = conjugacy_class_sizes(G);
  std::map<int, int> elements_by_size;
  for (int s : sizes) ++elements_by_size[s];
  for (auto [s, cnt] : elements_by_size) f.class_census[s] = cnt / s;
  return f;
}

std::string Fingerprint::id() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(order);
  mix(0xa1);
  for (auto v : abelian_invariants) mix(v);
  mix(0xa2);
  for (auto v : p_central_orders) mix(v);
  mix(0xa3);
  for (auto [k, v] : order_census) {
    mix(k);
    mix(v);
  }
  mix(0xa4);
  for (auto [k, v] : class_census) {
    mix(k);
    mix(v);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::to_string(order) + "-" + buf;
}

std::optional<std::vector<int>> find_isomorphism(const ConcreteGroup& G, const ConcreteGroup& H, const Caps& caps) {
  if (G.order() > caps.exact_iso_order || H.order() > caps.exact_iso_order)
    throw CapError("exact_iso_order", "exact isomorphism search above order " + std::to_string(caps.exact_iso_order));
  if (G.order() != H.order() || G.prime() != H.prime()) return std::nullopt;
  if (iso_fingerprint(G) != iso_fingerprint(H)) return std::nullopt;

  const auto basis = burnside_basis(G);
  const HomExtender ext(G, basis);
  const auto csG = conjugacy_class_sizes(G), csH = conjugacy_class_sizes(H);
  std::vector<std::vector<int>> cands(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int og = G.element_order(basis[i]);
    for (std::size_t y = 0; y < H.order(); ++y)
      if (H.element_order(static_cast<int>(y)) == og && csH[y] == csG[basis[i]]) cands[i].push_back(static_cast<int>(y));
  }
  std::vector<int> images(basis.size());
  std::optional<std::vector<int>> found;
  auto rec = [&](auto&& self, std::size_t i) -> bool {
    if (i == basis.size()) {
      auto map = ext.extend(H, images);
      if (map && is_injective(*map, H.order())) {
        found = std::move(map);
        return true;
      }
      return false;
    }
    for (int y : cands[i]) {
      images[i] = y;
      if (self(self, i + 1)) return true;
    }
    return false;
  };
  rec(rec, 0);
  return found;
}

bool is_isomorphic(const ConcreteGroup& G, const ConcreteGroup& H, IsoMode mode, const Caps& caps) {
  if (mode == IsoMode::FingerprintOnly) return iso_fingerprint(G) == iso_fingerprint(H);
  return find_isomorphism(G, H, caps).has_value();
}

}  // namespace bbh
