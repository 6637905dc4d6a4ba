#pragma once

// Brute-force reference computations used by the unit tests. Deliberately
// naive: they share no code with the library beyond the multiplication table.

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "bbh/concrete.hpp"
#include "bbh/equivariant.hpp"
#include "bbh/ffield.hpp"

namespace oracle {

using bbh::ConcreteGroup;
using bbh::Involution;

// Word map induced by generator images, or nullopt if it is not a homomorphism.
inline std::optional<std::vector<int>> extend(const ConcreteGroup& G, const ConcreteGroup& H,
                                              const std::vector<int>& images) {
  const auto& gens = G.generators();
  std::vector<int> map(G.order(), -1);
  map[G.identity()] = H.identity();
  std::queue<int> todo;
  todo.push(G.identity());
  while (!todo.empty()) {
    const int x = todo.front();
    todo.pop();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const int y = G.mul(x, gens[i]);
      const int img = H.mul(map[x], images[i]);
      if (map[y] < 0) {
        map[y] = img;
        todo.push(y);
      } else if (map[y] != img) {
        return std::nullopt;
      }
    }
  }
  for (std::size_t a = 0; a < G.order(); ++a)
    for (std::size_t b = 0; b < G.order(); ++b)
      if (map[G.mul(a, b)] != H.mul(map[a], map[b])) return std::nullopt;
  return map;
}

inline void for_each_tuple(std::size_t k, std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(k, 0);
  while (true) {
    fn(t);
    std::size_t i = 0;
    while (i < k && ++t[i] == static_cast<int>(n)) t[i++] = 0;
    if (i == k) return;
  }
}

struct Counts {
  std::uint64_t hom = 0, sur = 0, hom_sigma = 0, sur_sigma = 0, aut_sigma = 0;
};

// All five counts by enumerating images of every generator of G in H.
inline Counts count_maps(const ConcreteGroup& G, const Involution& sG, const ConcreteGroup& H,
                         const Involution& sH) {
  Counts c;
  for_each_tuple(G.generators().size(), H.order(), [&](const std::vector<int>& imgs) {
    const auto map = extend(G, H, imgs);
    if (!map) return;
    ++c.hom;
    std::set<int> image(map->begin(), map->end());
    const bool onto = image.size() == H.order();
    bool equivariant = true;
    for (std::size_t x = 0; x < G.order() && equivariant; ++x) equivariant = (*map)[sG(x)] == sH((*map)[x]);
    c.sur += onto;
    c.hom_sigma += equivariant;
    c.sur_sigma += onto && equivariant;
    c.aut_sigma += onto && equivariant && G.order() == H.order();
  });
  return c;
}

inline std::uint64_t abelian_hom_count(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::uint64_t n = 1;
  for (auto x : a)
    for (auto y : b) n *= std::gcd(x, y);
  return n;
}

// Surjections between abelian groups given by invariant factors, by listing
// every homomorphism as a matrix of generator images.
inline std::uint64_t abelian_sur_count(const std::vector<std::uint64_t>& C, const std::vector<std::uint64_t>& A) {
  std::uint64_t a_order = 1;
  for (auto x : A) a_order *= x;
  // image of generator i of C: element of A killed by C[i]
  std::vector<std::vector<std::vector<std::uint64_t>>> choices(C.size());
  for (std::size_t i = 0; i < C.size(); ++i) {
    for (std::uint64_t idx = 0; idx < a_order; ++idx) {
      std::vector<std::uint64_t> v;
      std::uint64_t t = idx;
      bool ok = true;
      for (auto f : A) {
        v.push_back(t % f);
        ok = ok && (v.back() * C[i]) % f == 0;
        t /= f;
      }
      if (ok) choices[i].push_back(v);
    }
  }
  std::uint64_t count = 0;
  std::vector<std::size_t> pick(C.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == C.size()) {
      std::set<std::vector<std::uint64_t>> span{std::vector<std::uint64_t>(A.size(), 0)};
      bool grew = true;
      while (grew) {
        grew = false;
        for (auto s : std::vector<std::vector<std::uint64_t>>(span.begin(), span.end()))
          for (std::size_t j = 0; j < C.size(); ++j) {
            auto v = s;
            for (std::size_t k = 0; k < A.size(); ++k) v[k] = (v[k] + choices[j][pick[j]][k]) % A[k];
            grew |= span.insert(v).second;
          }
      }
      count += span.size() == a_order;
      return;
    }
    for (pick[i] = 0; pick[i] < choices[i].size(); ++pick[i]) rec(i + 1);
  };
  rec(0);
  return count;
}

// Affine points of y^2 = f over the base field plus one at infinity.
inline std::uint64_t naive_points(const bbh::ff::FiniteField& F, const bbh::ff::Poly& f) {
  std::uint64_t n = 1;
  for (int x = 0; x < F.order(); ++x) {
    const int fx = bbh::ff::peval(F, f, x);
    for (int y = 0; y < F.order(); ++y) n += F.mul(y, y) == fx;
  }
  return n;
}

}  // namespace oracle
