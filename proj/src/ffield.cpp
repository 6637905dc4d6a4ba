#include "bbh/ffield.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "bbh/concrete.hpp"
#include "bbh/parallel.hpp"

namespace bbh::ff {

// ---------------------------------------------------------------------------
// Fields

namespace {

int slow_add(const FiniteField& F, int a, int b) {
  if (!F.base()) return (a + b) % F.order();
  const int B = F.base()->order();
  int r = 0, place = 1;
  while (a || b) {
    r += F.base()->add(a % B, b % B) * place;
    a /= B;
    b /= B;
    place *= B;
  }
  return r;
}

std::vector<int> digits(int a, int B, int k) {
  std::vector<int> d(k);
  for (int i = 0; i < k; ++i) {
    d[i] = a % B;
    a /= B;
  }
  return d;
}

int undigits(const std::vector<int>& d, int B) {
  int r = 0;
  for (std::size_t i = d.size(); i-- > 0;) r = r * B + d[i];
  return r;
}

// product in B[x]/(modulus), modulus monic of degree k
int slow_mul(const FiniteField& B, const std::vector<int>& modulus, int k, int a, int b) {
  const auto da = digits(a, B.order(), k), db = digits(b, B.order(), k);
  std::vector<int> prod(2 * k - 1, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) prod[i + j] = B.add(prod[i + j], B.mul(da[i], db[j]));
  for (int t = 2 * k - 2; t >= k; --t) {
    const int c = prod[t];
    if (!c) continue;
    prod[t] = 0;
    for (int i = 0; i < k; ++i) prod[t - k + i] = B.sub(prod[t - k + i], B.mul(c, modulus[i]));
  }
  prod.resize(k);
  return undigits(prod, B.order());
}

bool irreducible(const FiniteField& B, const Poly& f) {
  const int n = f.deg;
  for (int d = 1; 2 * d <= n; ++d) {
    const std::uint64_t count = ipow(B.order(), d);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      Poly g = Poly::monomial(1, d);
      std::uint64_t x = idx;
      for (int i = 0; i < d; ++i) {
        g.c[i] = static_cast<int>(x % B.order());
        x /= B.order();
      }
      if (pmod(B, f, g).is_zero()) return false;
    }
  }
  return true;
}

}  // namespace

FieldPtr FiniteField::prime(int p) {
  require(p >= 3 && is_prime(p), "FiniteField: characteristic must be an odd prime");
  auto F = std::shared_ptr<FiniteField>(new FiniteField());
  F->p_ = p;
  F->Q_ = p;
  F->finish();
  return F;
}

FieldPtr FiniteField::extension(FieldPtr base, int k) {
  require(base != nullptr && k >= 1, "FiniteField::extension: need a base field and k >= 1");
  if (k == 1) return base;
  const std::uint64_t Q = ipow(base->order(), k);
  require(Q <= 4096, "FiniteField::extension: order above 4096");
  auto F = std::shared_ptr<FiniteField>(new FiniteField());
  F->p_ = base->characteristic();
  F->Q_ = static_cast<int>(Q);
  F->k_ = k;
  const std::uint64_t count = ipow(base->order(), k);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    Poly f = Poly::monomial(1, k);
    std::uint64_t x = idx;
    // highest lower coefficient is the most significant digit
    for (int i = 0; i < k; ++i) {
      f.c[i] = static_cast<int>(x % base->order());
      x /= base->order();
    }
    if (irreducible(*base, f)) {
      F->modulus_.assign(f.c.begin(), f.c.begin() + k + 1);
      break;
    }
  }
  ensure(!F->modulus_.empty(), "FiniteField::extension: no irreducible polynomial found");
  F->base_ = std::move(base);
  F->finish();
  return F;
}

FieldPtr FiniteField::of_order(int q) {
  const auto [p, k] = prime_power(static_cast<std::uint64_t>(q));
  require(p != 0, "FiniteField: order must be a prime power");
  require(p != 2, "FiniteField: characteristic 2 is not supported");
  static std::mutex mu;
  static std::map<int, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  FieldPtr F = k == 1 ? prime(static_cast<int>(p)) : extension(prime(static_cast<int>(p)), static_cast<int>(k));
  cache.emplace(q, F);
  return F;
}

void FiniteField::finish() {
  const int Q = Q_;
  if (Q <= 1024) {
    add_.resize(static_cast<std::size_t>(Q) * Q);
    for (int a = 0; a < Q; ++a)
      for (int b = 0; b < Q; ++b) add_[static_cast<std::size_t>(a) * Q + b] = static_cast<std::uint16_t>(slow_add(*this, a, b));
  }
  neg_.assign(Q, 0);
  for (int a = 0; a < Q; ++a)
    for (int b = 0; b < Q; ++b)
      if (add(a, b) == 0) {
        neg_[a] = b;
        break;
      }
  auto smul = [&](int a, int b) {
    if (!base_) return static_cast<int>(static_cast<long long>(a) * b % Q);
    return slow_mul(*base_, modulus_, k_, a, b);
  };
  exp_.assign(Q - 1, 0);
  log_.assign(Q, -1);
  for (int gen = 2; gen < Q; ++gen) {
    int x = 1, n = 0;
    do {
      exp_[n] = x;
      x = smul(x, gen);
      ++n;
    } while (x != 1 && n < Q - 1);
    if (x == 1 && n == Q - 1) break;
  }
  for (int e = 0; e < Q - 1; ++e) log_[exp_[e]] = e;
  for (int a = 1; a < Q; ++a) ensure(log_[a] >= 0, "FiniteField: no primitive element");
  chi_.assign(Q, 0);
  sqrt_.assign(Q, -1);
  sqrt_[0] = 0;
  for (int a = 1; a < Q; ++a) {
    chi_[a] = log_[a] % 2 == 0 ? 1 : -1;
    const int s = mul(a, a);
    if (sqrt_[s] < 0 || a < sqrt_[s]) sqrt_[s] = a;
  }
  first_nonsquare_ = 0;
  for (int a = 1; a < Q; ++a)
    if (chi_[a] < 0) {
      first_nonsquare_ = a;
      break;
    }
}

int FiniteField::add(int a, int b) const {
  if (!add_.empty()) return add_[static_cast<std::size_t>(a) * Q_ + b];
  return slow_add(*this, a, b);
}

int FiniteField::inv(int a) const {
  require(a != 0, "FiniteField: inverse of zero");
  return log_[a] == 0 ? 1 : exp_[Q_ - 1 - log_[a]];
}

int FiniteField::pow(int a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[static_cast<std::size_t>((static_cast<std::uint64_t>(log_[a]) * (e % (Q_ - 1))) % (Q_ - 1))];
}

std::optional<int> FiniteField::sqrt(int a) const {
  if (sqrt_[a] < 0) return std::nullopt;
  return sqrt_[a];
}

int FiniteField::from_int(long long n) const {
  long long r = n % p_;
  if (r < 0) r += p_;
  return static_cast<int>(r);
}

namespace {

FieldPtr extension_cached(const FieldPtr& base, int k) {
  if (k == 1) return base;
  static std::mutex mu;
  static std::map<std::pair<const FiniteField*, int>, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(base.get(), k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  FieldPtr E = FiniteField::extension(base, k);
  cache.emplace(key, E);
  return E;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomials

Poly::Poly(std::initializer_list<int> coeffs) {
  require(coeffs.size() <= kPolyCap, "Poly: too many coefficients");
  int i = 0;
  for (int a : coeffs) c[i++] = a;
  deg = i - 1;
  normalize();
}

Poly Poly::constant(int a) {
  Poly r;
  r.c[0] = a;
  r.deg = a ? 0 : -1;
  return r;
}

Poly Poly::monomial(int a, int d) {
  require(d >= 0 && d < kPolyCap, "Poly: degree out of range");
  Poly r;
  if (a) {
    r.c[d] = a;
    r.deg = d;
  }
  return r;
}

void Poly::normalize() {
  while (deg >= 0 && c[deg] == 0) --deg;
}

bool Poly::operator==(const Poly& o) const {
  if (deg != o.deg) return false;
  for (int i = 0; i <= deg; ++i)
    if (c[i] != o.c[i]) return false;
  return true;
}

Poly padd(const FiniteField& F, const Poly& a, const Poly& b) {
  Poly r;
  r.deg = std::max(a.deg, b.deg);
  for (int i = 0; i <= r.deg; ++i) r.c[i] = F.add(a[i], b[i]);
  r.normalize();
  return r;
}

Poly pneg(const FiniteField& F, const Poly& a) {
  Poly r = a;
  for (int i = 0; i <= r.deg; ++i) r.c[i] = F.neg(a.c[i]);
  return r;
}

Poly psub(const FiniteField& F, const Poly& a, const Poly& b) { return padd(F, a, pneg(F, b)); }

Poly pmul(const FiniteField& F, const Poly& a, const Poly& b) {
  Poly r;
  if (a.is_zero() || b.is_zero()) return r;
  require(a.deg + b.deg < kPolyCap, "Poly: product degree exceeds capacity");
  r.deg = a.deg + b.deg;
  for (int i = 0; i <= a.deg; ++i) {
    if (!a.c[i]) continue;
    for (int j = 0; j <= b.deg; ++j) r.c[i + j] = F.add(r.c[i + j], F.mul(a.c[i], b.c[j]));
  }
  r.normalize();
  return r;
}

Poly pscale(const FiniteField& F, const Poly& a, int s) {
  Poly r = a;
  for (int i = 0; i <= r.deg; ++i) r.c[i] = F.mul(a.c[i], s);
  r.normalize();
  return r;
}

std::pair<Poly, Poly> pdivmod(const FiniteField& F, const Poly& a, const Poly& b) {
  require(!b.is_zero(), "Poly: division by zero");
  Poly q, r = a;
  const int li = F.inv(b.lead());
  while (r.deg >= b.deg) {
    const int shift = r.deg - b.deg;
    const int coef = F.mul(r.lead(), li);
    q.c[shift] = coef;
    q.deg = std::max(q.deg, shift);
    for (int i = 0; i <= b.deg; ++i) r.c[i + shift] = F.sub(r.c[i + shift], F.mul(coef, b.c[i]));
    r.normalize();
  }
  q.normalize();
  return {q, r};
}

Poly pmod(const FiniteField& F, const Poly& a, const Poly& b) { return pdivmod(F, a, b).second; }

Poly pmonic(const FiniteField& F, const Poly& a) {
  if (a.is_zero()) return a;
  return pscale(F, a, F.inv(a.lead()));
}

Poly pderiv(const FiniteField& F, const Poly& a) {
  Poly r;
  for (int i = 1; i <= a.deg; ++i) r.c[i - 1] = F.mul(F.from_int(i), a.c[i]);
  r.deg = a.deg - 1;
  r.normalize();
  return r;
}

Poly pgcd(const FiniteField& F, Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = pmod(F, a, b);
    a = b;
    b = r;
  }
  return pmonic(F, a);
}

Xgcd pxgcd(const FiniteField& F, const Poly& a, const Poly& b) {
  Poly r0 = a, r1 = b, s0 = Poly::constant(1), s1, t0, t1 = Poly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = pdivmod(F, r0, r1);
    Poly s2 = psub(F, s0, pmul(F, q, s1));
    Poly t2 = psub(F, t0, pmul(F, q, t1));
    r0 = r1;
    r1 = r;
    s0 = s1;
    s1 = s2;
    t0 = t1;
    t1 = t2;
  }
  if (r0.is_zero()) return {r0, s0, t0};
  const int li = F.inv(r0.lead());
  return {pscale(F, r0, li), pscale(F, s0, li), pscale(F, t0, li)};
}

int peval(const FiniteField& F, const Poly& a, int x) {
  int r = 0;
  for (int i = a.deg; i >= 0; --i) r = F.add(F.mul(r, x), a.c[i]);
  return r;
}

std::string to_string(const Poly& a) {
  std::string s;
  for (int i = 0; i <= std::max(a.deg, 0); ++i) {
    if (i) s += ' ';
    s += std::to_string(a[i]);
  }
  return s;
}

bool squarefree(const FiniteField& F, const Poly& f) {
  if (f.deg <= 0) return !f.is_zero();
  return pgcd(F, f, pderiv(F, f)).deg == 0;
}

// ---------------------------------------------------------------------------
// Enumeration

std::string to_string(FieldType t) { return t == FieldType::I ? "I" : "II"; }

FieldType parse_field_type(const std::string& s) {
  if (s == "I" || s == "1") return FieldType::I;
  if (s == "II" || s == "2") return FieldType::II;
  throw ArgumentError("unknown field type '" + s + "' (expected I or II)");
}

std::optional<Poly> imaginary_candidate(const FiniteField& F, int m, FieldType type, std::uint64_t index) {
  const int n = 2 * m + 1;
  Poly f = Poly::monomial(type == FieldType::I ? 1 : F.first_nonsquare(), n);
  for (int i = 0; i < n; ++i) {
    f.c[i] = static_cast<int>(index % F.order());
    index /= F.order();
  }
  if (!squarefree(F, f)) return std::nullopt;
  return f;
}

std::uint64_t count_imaginary(const FieldPtr& F, int m, FieldType type) {
  require(m >= 0, "count_imaginary: m must be non-negative");
  const std::uint64_t total = ipow(F->order(), 2 * m + 1);
  std::uint64_t n = 0;
  for (std::uint64_t i = 0; i < total; ++i)
    if (imaginary_candidate(*F, m, type, i)) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Curves, point counts, L-polynomials

Curve make_curve(FieldPtr F, const Poly& f) {
  require(F != nullptr, "make_curve: missing field");
  require(f.deg >= 1 && f.deg % 2 == 1, "make_curve: f must have odd degree");
  require(squarefree(*F, f), "make_curve: f is not squarefree");
  require(2 * f.deg + 2 < kPolyCap, "make_curve: degree too large");
  Curve C;
  C.F = std::move(F);
  C.f = f;
  C.genus = (f.deg - 1) / 2;
  return C;
}

std::uint64_t count_points(const Curve& C, int k) {
  require(k >= 1, "count_points: k must be positive");
  const FieldPtr E = extension_cached(C.F, k);
  const FiniteField& K = *E;
  std::uint64_t n = 1;
  for (int x = 0; x < K.order(); ++x) n += 1 + K.chi(peval(K, C.f, x));
  return n;
}

std::vector<long long> l_polynomial(const Curve& C) {
  const int g = C.genus;
  const long long q = C.F->order();
  std::vector<long long> s(g + 1, 0), a(2 * g + 1, 0);
  long long qk = 1;
  for (int k = 1; k <= g; ++k) {
    qk *= q;
    s[k] = qk + 1 - static_cast<long long>(count_points(C, k));
  }
  a[0] = 1;
  for (int k = 1; k <= g; ++k) {
    long long acc = 0;
    for (int i = 1; i <= k; ++i) acc += s[i] * a[k - i];
    ensure(acc % k == 0, "l_polynomial: Newton identity gave a non-integer coefficient");
    a[k] = -acc / k;
  }
  long long qp = 1;
  for (int k = g - 1; k >= 0; --k) {
    qp *= q;
    a[2 * g - k] = qp * a[k];
  }
  return a;
}

long long class_number(const std::vector<long long>& L) {
  long long h = 0;
  for (long long a : L) h += a;
  return h;
}

// ---------------------------------------------------------------------------
// Jacobian arithmetic

Divisor identity_divisor() { return {Poly::constant(1), Poly()}; }

Divisor cantor_neg(const Curve& C, const Divisor& D) { return {D.u, pneg(*C.F, D.v)}; }

Divisor cantor_add(const Curve& C, const Divisor& a, const Divisor& b) {
  const FiniteField& F = *C.F;
  if (a.u.deg == 0) return b;
  if (b.u.deg == 0) return a;
  const Xgcd x1 = pxgcd(F, a.u, b.u);
  const Xgcd x2 = pxgcd(F, x1.g, padd(F, a.v, b.v));
  const Poly& d = x2.g;
  const Poly s1 = pmul(F, x2.s, x1.s), s2 = pmul(F, x2.s, x1.t), s3 = x2.t;
  Poly u = pmul(F, a.u, b.u);
  Poly v;
  if (d.deg > 0) {
    u = pdivmod(F, u, pmul(F, d, d)).first;
    Poly num = padd(F, pmul(F, pmul(F, s1, a.u), b.v), pmul(F, pmul(F, s2, b.u), a.v));
    num = padd(F, num, pmul(F, s3, padd(F, pmul(F, a.v, b.v), C.f)));
    auto [qt, rem] = pdivmod(F, num, d);
    ensure(rem.is_zero(), "cantor_add: composition not divisible by d");
    v = pmod(F, qt, u);
  } else {
    Poly num = padd(F, pmul(F, pmul(F, s1, a.u), b.v), pmul(F, pmul(F, s2, b.u), a.v));
    num = padd(F, num, pmul(F, s3, padd(F, pmul(F, a.v, b.v), C.f)));
    v = pmod(F, num, u);
  }
  while (u.deg > C.genus) {
    auto [qt, rem] = pdivmod(F, psub(F, C.f, pmul(F, v, v)), u);
    ensure(rem.is_zero(), "cantor_add: reduction not exact");
    u = pmonic(F, qt);
    v = pmod(F, pneg(F, v), u);
  }
  return {u, v};
}

Divisor cantor_mul(const Curve& C, const Divisor& D, std::uint64_t n) {
  Divisor r = identity_divisor(), b = D;
  while (n) {
    if (n & 1) r = cantor_add(C, r, b);
    n >>= 1;
    if (n) b = cantor_add(C, b, b);
  }
  return r;
}

bool is_reduced_divisor(const Curve& C, const Divisor& D) {
  const FiniteField& F = *C.F;
  if (D.u.is_zero() || D.u.lead() != 1 || D.u.deg > C.genus) return false;
  if (D.v.deg >= D.u.deg) return false;
  return pmod(F, psub(F, pmul(F, D.v, D.v), C.f), D.u).is_zero();
}

std::uint64_t divisor_key(const Curve& C, const Divisor& D) {
  const std::uint64_t q = C.F->order();
  std::uint64_t key = 0;
  for (int i = 0; i < D.u.deg; ++i) key = key * q + D.u[i];
  for (int i = 0; i < D.u.deg; ++i) key = key * q + D.v[i];
  return key * (C.genus + 1) + D.u.deg;
}

std::uint64_t divisor_order(const Curve& C, const Divisor& D, std::uint64_t h) {
  std::uint64_t n = h;
  for (const auto& [l, e] : factorize(h)) {
    (void)e;
    while (n % l == 0 && cantor_mul(C, D, n / l).u.deg == 0) n /= l;
  }
  return n;
}

DivisorStream::DivisorStream(const Curve& C) : C_(&C) {}

std::optional<Divisor> DivisorStream::next() {
  const FiniteField& F = *C_->F;
  const std::uint64_t q = F.order();
  while (true) {
    if (v_index_ >= v_count_) {
      v_index_ = 0;
      ++u_index_;
      if (u_index_ >= u_count_) {
        ++deg_;
        if (deg_ > C_->genus) return std::nullopt;
        u_index_ = 0;
        u_count_ = ipow(q, deg_);
        v_count_ = u_count_;
      }
      u_ = Poly::monomial(1, deg_);
      std::uint64_t x = u_index_;
      for (int i = 0; i < deg_; ++i) {
        u_.c[i] = static_cast<int>(x % q);
        x /= q;
      }
    }
    if (deg_ == 0) {
      v_index_ = v_count_;
      continue;
    }
    Poly v;
    std::uint64_t x = v_index_++;
    v.deg = deg_ - 1;
    for (int i = 0; i < deg_; ++i) {
      v.c[i] = static_cast<int>(x % q);
      x /= q;
    }
    v.normalize();
    if (pmod(F, psub(F, pmul(F, v, v), C_->f), u_).is_zero()) return Divisor{u_, v};
  }
}

std::vector<Divisor> reduced_divisors(const Curve& C, std::uint64_t cap) {
  std::vector<Divisor> out{identity_divisor()};
  DivisorStream s(C);
  while (auto D = s.next()) {
    out.push_back(*D);
    if (out.size() > cap) throw CapError("class_group_order", "more than " + std::to_string(cap) + " reduced divisors");
  }
  return out;
}

std::uint64_t generated_subgroup_size(const Curve& C, const std::vector<Divisor>& gens, std::uint64_t cap) {
  std::unordered_set<std::uint64_t> seen{divisor_key(C, identity_divisor())};
  std::vector<Divisor> queue{identity_divisor()};
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& g : gens) {
      Divisor s = cantor_add(C, queue[i], g);
      if (seen.insert(divisor_key(C, s)).second) {
        queue.push_back(std::move(s));
        if (queue.size() > cap) throw CapError("class_group_order", "generated subgroup exceeds the cap");
      }
    }
  return queue.size();
}

std::vector<std::uint64_t> sylow_structure(const Curve& C, std::uint64_t h, int l, std::uint64_t cap) {
  require(h >= 1, "sylow_structure: h must be positive");
  std::uint64_t target = 1, m = h;
  while (m % l == 0) {
    m /= l;
    target *= l;
  }
  if (target == 1) return {};
  if (target == static_cast<std::uint64_t>(l)) return {target};
  require(target <= cap, "sylow_structure: Sylow subgroup above the class group cap");

  std::vector<Divisor> elems{identity_divisor()};
  std::unordered_map<std::uint64_t, std::size_t> index{{divisor_key(C, elems[0]), 0}};
  DivisorStream stream(C);
  while (elems.size() < target) {
    auto D = stream.next();
    ensure(D.has_value(), "sylow_structure: divisor stream exhausted before the Sylow subgroup was filled");
    const Divisor E = cantor_mul(C, *D, m);
    if (index.count(divisor_key(C, E))) continue;
    const std::size_t base_size = elems.size();
    Divisor X = E;
    while (!index.count(divisor_key(C, X)) || index.at(divisor_key(C, X)) >= base_size) {
      for (std::size_t b = 0; b < base_size; ++b) {
        Divisor s = cantor_add(C, elems[b], X);
        index.emplace(divisor_key(C, s), elems.size());
        elems.push_back(std::move(s));
      }
      X = cantor_add(C, X, E);
    }
    ensure(elems.size() <= target, "sylow_structure: subgroup larger than the l-part of h");
  }
  // order census through the multiplication-by-l map
  std::vector<std::size_t> times_l(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) times_l[i] = index.at(divisor_key(C, cantor_mul(C, elems[i], l)));
  std::vector<std::uint64_t> orders(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) {
    std::uint64_t o = 1;
    for (std::size_t x = i; x != 0; x = times_l[x]) o *= l;
    orders[i] = o;
  }
  return abelian_invariants_from_orders(l, orders);
}

std::vector<std::uint64_t> class_group_structure(const Curve& C, std::uint64_t h, std::uint64_t cap) {
  if (h > cap) throw CapError("class_group_order", "h = " + std::to_string(h));
  std::vector<std::vector<std::uint64_t>> parts;
  std::size_t len = 0;
  for (const auto& [l, e] : factorize(h)) {
    (void)e;
    auto s = sylow_structure(C, h, static_cast<int>(l), cap);
    std::reverse(s.begin(), s.end());
    len = std::max(len, s.size());
    parts.push_back(std::move(s));
  }
  std::vector<std::uint64_t> out(len, 1);
  for (const auto& s : parts)
    for (std::size_t i = 0; i < s.size(); ++i) out[i] *= s[i];
  std::reverse(out.begin(), out.end());
  std::uint64_t prod = 1;
  for (auto x : out) prod *= x;
  ensure(prod == h, "class_group_structure: invariant factors do not multiply to h");
  return out;
}

// ---------------------------------------------------------------------------
// Surjections onto abelian p-groups

BigInt sur_count_abelian(const std::vector<std::uint64_t>& C, const std::vector<std::uint64_t>& A) {
  std::vector<std::uint64_t> a;
  for (auto x : A)
    if (x > 1) a.push_back(x);
  if (a.empty()) return 1;
  const auto [p, k0] = prime_power(a[0]);
  require(p != 0, "sur_count_abelian: A must be a p-group");
  (void)k0;
  for (auto x : a) require(prime_power(x).first == p, "sur_count_abelian: A must be a p-group");
  const int r = static_cast<int>(a.size());
  // B = preimage of W in A, with invariant factors from its order census
  std::uint64_t order = 1;
  for (auto x : a) order *= x;
  require(order <= 1u << 20, "sur_count_abelian: A too large");
  auto hom_count = [&](const std::vector<std::uint64_t>& B) {
    BigInt n = 1;
    for (auto c : C)
      for (auto b : B) n *= std::gcd(c, b);
    return n;
  };
  BigInt total = 0;
  for (const auto& W : all_subspaces(static_cast<int>(p), r)) {
    // elements of B: x with (x_i mod p) in W
    std::vector<char> inW(ipow(p, r), 0);
    for (auto w : W) inW[w] = 1;
    std::vector<std::uint64_t> orders;
    std::vector<std::uint64_t> x(r, 0);
    for (std::uint64_t idx = 0; idx < order; ++idx) {
      std::uint64_t t = idx;
      std::uint32_t code = 0, place = 1;
      std::uint64_t o = 1;
      for (int i = 0; i < r; ++i) {
        x[i] = t % a[i];
        t /= a[i];
        code += static_cast<std::uint32_t>(x[i] % p) * place;
        place *= static_cast<std::uint32_t>(p);
        const std::uint64_t oi = a[i] / std::gcd(a[i], x[i]);
        o = std::max(o, oi);
      }
      if (inW[code]) orders.push_back(o);
    }
    const auto B = abelian_invariants_from_orders(static_cast<int>(p), orders);
    const int kdim = r - static_cast<int>(exact_log(W.size(), p));
    BigInt mu = pow(BigInt(p), kdim * (kdim - 1) / 2);
    if (kdim % 2) mu = -mu;
    total += mu * hom_count(B);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Scans

std::string factors_to_string(const std::vector<std::uint64_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s + "]";
}

ScanResult moment_scan(int q, int m, const std::vector<std::uint64_t>& A, FieldType type, int workers,
                       bool keep_records, const Caps& caps) {
  require(m >= 0, "moment_scan: m must be non-negative");
  const FieldPtr F = FiniteField::of_order(q);
  int l = 0;
  for (auto x : A)
    if (x > 1) l = static_cast<int>(prime_power(x).first);

  const std::uint64_t total = ipow(q, 2 * m + 1);
  constexpr std::uint64_t kChunk = 2048;
  const std::uint64_t nchunks = (total + kChunk - 1) / kChunk;
  struct Chunk {
    std::uint64_t fields = 0;
    BigInt sum = 0;
    std::map<std::string, std::uint64_t> hist;
    std::vector<FieldRecord> records;
  };
  std::vector<Chunk> chunks(nchunks);
  parallel_for(nchunks, workers, [&](std::size_t ci) {
    Chunk& out = chunks[ci];
    const std::uint64_t end = std::min(total, (ci + 1) * kChunk);
    for (std::uint64_t idx = ci * kChunk; idx < end; ++idx) {
      auto f = imaginary_candidate(*F, m, type, idx);
      if (!f) continue;
      const Curve C = make_curve(F, *f);
      const auto L = l_polynomial(C);
      const long long h = class_number(L);
      ensure(h > 0, "moment_scan: non-positive class number");
      std::vector<std::uint64_t> syl = l ? sylow_structure(C, h, l, caps.class_group_order) : std::vector<std::uint64_t>{};
      BigInt sur = sur_count_abelian(syl, A);
      ++out.fields;
      out.sum += sur;
      ++out.hist[factors_to_string(syl)];
      if (keep_records) {
        FieldRecord rec;
        rec.f = *f;
        rec.genus = C.genus;
        rec.L = L;
        rec.h = h;
        rec.factors = class_group_structure(C, h, caps.class_group_order);
        rec.sur = sur;
        out.records.push_back(std::move(rec));
      }
    }
  });

  ScanResult r;
  r.q = q;
  r.m = m;
  r.type = type;
  r.A = A;
  for (auto& c : chunks) {
    r.field_count += c.fields;
    r.sur_sum += c.sum;
    for (const auto& [k, v] : c.hist) r.histogram[k] += v;
    for (auto& rec : c.records) r.records.push_back(std::move(rec));
  }
  require(r.field_count > 0, "moment_scan: no fields enumerated");
  r.average = Rational(r.sur_sum) / Rational(BigInt(r.field_count));
  return r;
}

}  // namespace bbh::ff
