#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bbh {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A configured size limit was exceeded. `which` names the cap that tripped.
class CapError : public std::runtime_error {
 public:
  CapError(std::string which, const std::string& what)
      : std::runtime_error(which + ": " + what), which_(std::move(which)) {}
  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

/// Caller handed in something outside an operation's contract.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An internal consistency check failed. Never caught inside the library.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Size caps shared by the group engine and the measure code.
struct Caps {
  std::uint64_t pc_order = 4782969;         // 3^14
  std::uint64_t concrete_order = 6561;      // 3^8
  std::uint64_t exact_iso_order = 2187;     // 3^7
  std::uint64_t enumeration_tuples = 1000000;
  std::uint64_t search_space = 50000000;    // candidate tuples in surjection searches
  std::uint64_t class_group_order = 100000;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ArgumentError(msg);
}

inline void ensure(bool ok, const std::string& msg) {
  if (!ok) throw InvariantError(msg);
}

std::uint64_t ipow(std::uint64_t base, unsigned exp);
bool is_prime(std::uint64_t n);

/// Returns (prime, exponent) pairs in increasing prime order.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

/// If n = p^k for a prime p returns {p, k}; otherwise {0, 0}.
std::pair<std::uint64_t, unsigned> prime_power(std::uint64_t n);

/// Exact log base p of n; throws if n is not a power of p.
unsigned exact_log(std::uint64_t n, std::uint64_t p);

std::string to_string(const Rational& r);

/// Every subspace of F_p^d, vectors packed as base-p integers (coordinate i is
/// digit i); each subspace is a sorted list. The zero subspace comes first.
std::vector<std::vector<std::uint32_t>> all_subspaces(int p, int d);

}  // namespace bbh
