#include "bbh/common.hpp"

#include <algorithm>
#include <set>

namespace bbh {

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.emplace_back(d, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::pair<std::uint64_t, unsigned> prime_power(std::uint64_t n) {
  auto f = factorize(n);
  if (f.size() != 1) return {0, 0};
  return f.front();
}

unsigned exact_log(std::uint64_t n, std::uint64_t p) {
  unsigned k = 0;
  while (n > 1) {
    ensure(n % p == 0, "exact_log: " + std::to_string(n) + " is not a power of " + std::to_string(p));
    n /= p;
    ++k;
  }
  ensure(n == 1, "exact_log: zero argument");
  return k;
}

std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

std::vector<std::vector<std::uint32_t>> all_subspaces(int p, int d) {
  std::uint32_t size = 1;
  for (int i = 0; i < d; ++i) size *= p;
  auto add = [&](std::uint32_t a, std::uint32_t b) {
    std::uint32_t r = 0, place = 1;
    for (int i = 0; i < d; ++i) {
      r += ((a % p + b % p) % p) * place;
      a /= p;
      b /= p;
      place *= p;
    }
    return r;
  };
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<std::vector<std::uint32_t>> out{{0}};
  seen.insert(out.front());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::uint32_t v = 0; v < size; ++v) {
      std::vector<char> in(size, 0);
      for (auto w : out[i]) in[w] = 1;
      if (in[v]) continue;
      std::vector<std::uint32_t> W = out[i];
      for (std::size_t j = 0; j < W.size(); ++j) {
        std::uint32_t x = W[j];
        for (int k = 1; k < p; ++k) {
          x = add(x, v);
          if (!in[x]) {
            in[x] = 1;
            W.push_back(x);
          }
        }
      }
      std::sort(W.begin(), W.end());
      if (seen.insert(W).second) out.push_back(std::move(W));
    }
  return out;
}

}  // namespace bbh
