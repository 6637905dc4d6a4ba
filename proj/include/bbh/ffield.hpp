#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bbh/common.hpp"

namespace bbh::ff {

/// F_Q for odd Q <= 4096. A prime field, or an extension of a smaller field by
/// the lexicographically first monic irreducible of the given degree. Elements
/// are integers in [0, Q): base-|base| digits of the polynomial coefficients,
/// so base field elements keep their encoding.
class FiniteField {
 public:
  static std::shared_ptr<const FiniteField> prime(int p);
  static std::shared_ptr<const FiniteField> extension(std::shared_ptr<const FiniteField> base, int k);
  /// F_q for a prime power q, built over its prime field.
  static std::shared_ptr<const FiniteField> of_order(int q);

  int order() const { return Q_; }
  int characteristic() const { return p_; }
  const std::shared_ptr<const FiniteField>& base() const { return base_; }
  /// Modulus coefficients over the base field, low to high (empty for a prime field).
  const std::vector<int>& modulus() const { return modulus_; }

  int add(int a, int b) const;
  int neg(int a) const { return neg_[a]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    int e = log_[a] + log_[b];
    if (e >= Q_ - 1) e -= Q_ - 1;
    return exp_[e];
  }
  int inv(int a) const;
  int div(int a, int b) const { return mul(a, inv(b)); }
  int pow(int a, std::uint64_t e) const;
  /// 1, -1 or 0.
  int chi(int a) const { return chi_[a]; }
  std::optional<int> sqrt(int a) const;
  int first_nonsquare() const { return first_nonsquare_; }
  int from_int(long long n) const;

 private:
  FiniteField() = default;
  void finish();

  int p_ = 0, Q_ = 0, k_ = 1;
  std::shared_ptr<const FiniteField> base_;
  std::vector<int> modulus_;
  std::vector<std::uint16_t> add_;  // full table when Q <= 1024
  std::vector<int> neg_, exp_, log_, chi_, sqrt_;
  int first_nonsquare_ = 0;
};

using FieldPtr = std::shared_ptr<const FiniteField>;

constexpr int kPolyCap = 24;

/// Dense polynomial, coefficients low to high; deg = -1 for zero.
struct Poly {
  std::array<int, kPolyCap> c{};
  int deg = -1;

  Poly() = default;
  Poly(std::initializer_list<int> coeffs);
  static Poly constant(int a);
  static Poly monomial(int a, int d);

  int lead() const { return deg < 0 ? 0 : c[deg]; }
  int operator[](int i) const { return i <= deg && i >= 0 ? c[i] : 0; }
  bool is_zero() const { return deg < 0; }
  void normalize();
  bool operator==(const Poly& o) const;
};

Poly padd(const FiniteField& F, const Poly& a, const Poly& b);
Poly psub(const FiniteField& F, const Poly& a, const Poly& b);
Poly pneg(const FiniteField& F, const Poly& a);
Poly pmul(const FiniteField& F, const Poly& a, const Poly& b);
Poly pscale(const FiniteField& F, const Poly& a, int s);
/// Quotient and remainder; b nonzero.
std::pair<Poly, Poly> pdivmod(const FiniteField& F, const Poly& a, const Poly& b);
Poly pmod(const FiniteField& F, const Poly& a, const Poly& b);
Poly pmonic(const FiniteField& F, const Poly& a);
Poly pderiv(const FiniteField& F, const Poly& a);
/// Monic gcd (zero when both are zero).
Poly pgcd(const FiniteField& F, Poly a, Poly b);
/// g = s a + t b with g monic.
struct Xgcd {
  Poly g, s, t;
};
Xgcd pxgcd(const FiniteField& F, const Poly& a, const Poly& b);
int peval(const FiniteField& F, const Poly& a, int x);
std::string to_string(const Poly& a);

bool squarefree(const FiniteField& F, const Poly& f);

enum class FieldType { I, II };
std::string to_string(FieldType t);
FieldType parse_field_type(const std::string& s);

/// Number of squarefree f of degree 2m+1 with the type's leading coefficient
/// (1 for type I, the first non-square for type II), by enumeration.
std::uint64_t count_imaginary(const FieldPtr& F, int m, FieldType type);
/// f with lower coefficients given by the base-q digits of index; nullopt if not squarefree.
std::optional<Poly> imaginary_candidate(const FiniteField& F, int m, FieldType type, std::uint64_t index);

/// y^2 = f with f squarefree of odd degree over F_q.
struct Curve {
  FieldPtr F;
  Poly f;
  int genus = 0;
};
Curve make_curve(FieldPtr F, const Poly& f);

/// Points of the smooth model over F_{q^k}: affine solutions plus the one point at infinity.
std::uint64_t count_points(const Curve& C, int k);
/// Coefficients a_0 = 1, ..., a_{2g} of L(T).
std::vector<long long> l_polynomial(const Curve& C);
long long class_number(const std::vector<long long>& L);

/// Reduced divisor in Mumford form: u monic, deg v < deg u <= g, u | v^2 - f.
struct Divisor {
  Poly u, v;
  bool operator==(const Divisor& o) const { return u == o.u && v == o.v; }
};

Divisor identity_divisor();
Divisor cantor_neg(const Curve& C, const Divisor& D);
Divisor cantor_add(const Curve& C, const Divisor& a, const Divisor& b);
Divisor cantor_mul(const Curve& C, const Divisor& D, std::uint64_t n);
bool is_reduced_divisor(const Curve& C, const Divisor& D);
std::uint64_t divisor_key(const Curve& C, const Divisor& D);
std::uint64_t divisor_order(const Curve& C, const Divisor& D, std::uint64_t h);

/// All reduced divisors (u monic of degree <= g, v solving u | v^2 - f).
/// Throws CapError("class_group_order") once more than cap have been found.
std::vector<Divisor> reduced_divisors(const Curve& C, std::uint64_t cap);

/// Deterministic stream of reduced divisors, u in increasing order.
class DivisorStream {
 public:
  explicit DivisorStream(const Curve& C);
  std::optional<Divisor> next();

 private:
  const Curve* C_;
  int deg_ = 0;
  std::uint64_t u_index_ = 0, v_index_ = 0;
  std::uint64_t u_count_ = 1, v_count_ = 1;
  Poly u_;
};

/// Size of the subgroup generated by the given divisors (closure under cantor_add).
std::uint64_t generated_subgroup_size(const Curve& C, const std::vector<Divisor>& gens, std::uint64_t cap);

/// Invariant factors of the Sylow-l subgroup, given h.
std::vector<std::uint64_t> sylow_structure(const Curve& C, std::uint64_t h, int l, std::uint64_t cap);
/// Invariant factors of the class group, ascending, each dividing the next.
std::vector<std::uint64_t> class_group_structure(const Curve& C, std::uint64_t h, std::uint64_t cap);

/// |Sur(C, A)| for finite abelian groups given by invariant factors, by
/// Mobius inversion over subgroups B with pA <= B <= A of |Hom(C, B)| = prod gcd.
/// A must be a p-group.
BigInt sur_count_abelian(const std::vector<std::uint64_t>& C, const std::vector<std::uint64_t>& A);

struct FieldRecord {
  Poly f;
  int genus = 0;
  std::vector<long long> L;
  long long h = 0;
  std::vector<std::uint64_t> factors;
  BigInt sur;
};

struct ScanResult {
  int q = 0, m = 0;
  FieldType type = FieldType::I;
  std::vector<std::uint64_t> A;
  std::uint64_t field_count = 0;
  BigInt sur_sum;
  Rational average;
  std::map<std::string, std::uint64_t> histogram;  // Sylow structure -> fields
  std::vector<FieldRecord> records;                // filled when requested, in enumeration order
};

/// Exact average of |Sur(Cl, A)| over all imaginary fields of the type with deg f = 2m+1.
ScanResult moment_scan(int q, int m, const std::vector<std::uint64_t>& A, FieldType type, int workers = 1,
                       bool keep_records = false, const Caps& caps = {});

std::string factors_to_string(const std::vector<std::uint64_t>& v);

}  // namespace bbh::ff
