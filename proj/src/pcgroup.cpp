#include "bbh/pcgroup.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bbh {

bool Element::is_identity() const {
  return std::all_of(exps.begin(), exps.end(), [](std::uint8_t e) { return e == 0; });
}

std::size_t Element::depth() const {
  for (std::size_t i = 0; i < exps.size(); ++i)
    if (exps[i]) return i;
  return exps.size();
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto x : e.exps) {
    h ^= x;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

namespace {

std::vector<int> letters_of(const Element& w) {
  std::vector<int> out;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (int r = 0; r < w[i]; ++r) out.push_back(static_cast<int>(i));
  return out;
}

int inverse_mod(int a, int p) {
  for (int x = 1; x < p; ++x)
    if ((a * x) % p == 1) return x;
  throw InvariantError("no inverse mod p");
}

}  // namespace

PcGroup::PcGroup(int p, std::vector<int> weights, int pclass)
    : p_(p), n_(static_cast<int>(weights.size())), c_(pclass), weights_(std::move(weights)) {
  require(p >= 3 && p % 2 == 1 && is_prime(static_cast<std::uint64_t>(p)), "PcGroup: p must be an odd prime");
  require(p < 256, "PcGroup: p must fit in a byte");
  for (int i = 0; i < n_; ++i) {
    require(weights_[i] >= 1, "PcGroup: weights must be positive");
    require(i == 0 || weights_[i] >= weights_[i - 1], "PcGroup: weights must be non-decreasing");
    require(weights_[i] <= std::max(c_, 1), "PcGroup: weight exceeds p-class");
  }
  pow_.assign(n_, Element(n_));
  comm_.assign(static_cast<std::size_t>(n_) * n_, Element(n_));
  refresh_caches();
  infer_definitions();
}

int PcGroup::rank() const {
  return static_cast<int>(std::count(weights_.begin(), weights_.end(), 1));
}

std::uint64_t PcGroup::order() const {
  BigInt o = 1;
  for (int i = 0; i < n_; ++i) o *= p_;
  if (o > BigInt(std::numeric_limits<std::int64_t>::max())) throw CapError("pc_order", "group order overflows 64 bits");
  return static_cast<std::uint64_t>(o);
}

void PcGroup::check_relation_shape(int lhs_min, const Element& rhs, const std::string& what) const {
  validate(rhs);
  for (int k = 0; k < n_; ++k)
    if (rhs[k] && k <= lhs_min)
      throw ArgumentError(what + ": right-hand side uses generator " + std::to_string(k + 1) +
                          " which does not lie deeper than the left-hand side");
}

void PcGroup::set_power_relation(int i, Element rhs) {
  require(i >= 0 && i < n_, "power relation index out of range");
  check_relation_shape(i, rhs, "pow " + std::to_string(i + 1));
  for (int k = 0; k < n_; ++k)
    if (rhs[k] && weights_[k] <= weights_[i])
      throw ArgumentError("pow " + std::to_string(i + 1) + ": right-hand side weight too small");
  pow_[i] = std::move(rhs);
  refresh_caches();
}

void PcGroup::set_commutator_relation(int j, int i, Element rhs) {
  require(i >= 0 && j > i && j < n_, "commutator relation indices must satisfy j > i");
  check_relation_shape(j, rhs, "comm " + std::to_string(j + 1) + " " + std::to_string(i + 1));
  for (int k = 0; k < n_; ++k)
    if (rhs[k] && weights_[k] < weights_[i] + weights_[j])
      throw ArgumentError("comm " + std::to_string(j + 1) + " " + std::to_string(i + 1) +
                          ": right-hand side weight too small");
  comm_[idx(j, i)] = std::move(rhs);
  refresh_caches();
}

void PcGroup::refresh_caches() {
  pow_letters_.assign(n_, {});
  conj_letters_.assign(static_cast<std::size_t>(n_) * n_, {});
  comm_trivial_.assign(static_cast<std::size_t>(n_) * n_, 1);
  for (int i = 0; i < n_; ++i) pow_letters_[i] = letters_of(pow_[i]);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < j; ++i) {
      const Element& c = comm_[idx(j, i)];
      comm_trivial_[idx(j, i)] = c.is_identity() ? 1 : 0;
      auto& l = conj_letters_[idx(j, i)];
      l.push_back(j);
      auto rest = letters_of(c);
      l.insert(l.end(), rest.begin(), rest.end());
    }
}

Element PcGroup::generator(int i, int e) const {
  Element x(n_);
  x[i] = static_cast<std::uint8_t>(((e % p_) + p_) % p_);
  return x;
}

void PcGroup::validate(const Element& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw ArgumentError("element has length " + std::to_string(x.size()) + ", expected " + std::to_string(n_));
  for (auto e : x.exps)
    if (e >= p_) throw ArgumentError("element exponent out of range");
}

// Collection from the left. The stack holds letters still to be multiplied
// on the right of x, top of stack first.
void PcGroup::collect(Element& x, std::vector<int>& stack) const {
  auto& e = x.exps;
  std::vector<int> tail;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();

    int last = n_ - 1;
    while (last > k && e[last] == 0) --last;
    if (last == k) {
      if (++e[k] == p_) {
        e[k] = 0;
        stack.insert(stack.end(), pow_letters_[k].rbegin(), pow_letters_[k].rend());
      }
      continue;
    }

    bool commutes = true;
    for (int j = k + 1; j <= last && commutes; ++j)
      if (e[j] && !comm_trivial_[idx(j, k)]) commutes = false;
    if (commutes && e[k] + 1 < p_) {
      ++e[k];
      continue;
    }

    // x = prefix * tail with tail in generators > k:
    // x g_k = prefix g_k tail^{g_k}
    tail.clear();
    for (int j = last; j > k; --j) {
      for (int r = 0; r < e[j]; ++r) {
        const auto& w = commutes ? std::vector<int>{j} : conj_letters_[idx(j, k)];
        // pushed in reverse so that the tail is processed in ascending order
        tail.insert(tail.end(), w.rbegin(), w.rend());
      }
      e[j] = 0;
    }
    stack.insert(stack.end(), tail.begin(), tail.end());
    if (++e[k] == p_) {
      e[k] = 0;
      stack.insert(stack.end(), pow_letters_[k].rbegin(), pow_letters_[k].rend());
    }
  }
}

Element PcGroup::multiply(const Element& a, const Element& b) const {
  Element x = a;
  std::vector<int> stack;
  for (int i = n_ - 1; i >= 0; --i)
    for (int r = 0; r < b[i]; ++r) stack.push_back(i);
  collect(x, stack);
  return x;
}

Element PcGroup::inverse(const Element& a) const {
  Element t = a;
  Element r(n_);
  std::vector<int> stack;
  for (int k = 0; k < n_; ++k) {
    const int need = (p_ - t[k]) % p_;
    if (!need) continue;
    stack.assign(need, k);
    collect(t, stack);
    r[k] = static_cast<std::uint8_t>(need);
  }
  ensure(t.is_identity(), "inverse: collection did not reach the identity");
  return r;
}

Element PcGroup::power(const Element& a, std::uint64_t k) const {
  Element result(n_);
  Element base = a;
  while (k) {
    if (k & 1) result = multiply(result, base);
    k >>= 1;
    if (k) base = multiply(base, base);
  }
  return result;
}

Element PcGroup::commutator(const Element& a, const Element& b) const {
  return multiply(multiply(inverse(a), inverse(b)), multiply(a, b));
}

Element PcGroup::conjugate(const Element& a, const Element& by) const {
  return multiply(multiply(inverse(by), a), by);
}

std::vector<std::string> PcGroup::consistency_failures() const {
  std::vector<std::string> out;
  for_each_overlap(-1, [&](const Element& l, const Element& r, const std::string& label) {
    if (l != r) out.push_back(label);
  });
  return out;
}

void PcGroup::infer_definitions() {
  defs_.assign(n_, Definition{});
  int free_index = 0;
  for (int k = 0; k < n_; ++k) {
    if (weights_[k] == 1) {
      defs_[k] = {Definition::Kind::Free, free_index++, -1};
      continue;
    }
    auto defines = [&](const Element& rhs, int lhs_max) {
      if (lhs_max >= k || rhs[k] != 1) return false;
      for (int t = k + 1; t < n_; ++t)
        if (rhs[t]) return false;
      return true;
    };
    for (int i = 0; i < n_ && defs_[k].kind == Definition::Kind::None; ++i)
      if (defines(pow_[i], i)) defs_[k] = {Definition::Kind::Power, i, -1};
    for (int j = 0; j < n_ && defs_[k].kind == Definition::Kind::None; ++j)
      for (int i = 0; i < j && defs_[k].kind == Definition::Kind::None; ++i)
        if (defines(comm_[idx(j, i)], j)) defs_[k] = {Definition::Kind::Commutator, j, i};
  }
}

bool PcGroup::fully_defined() const {
  return std::none_of(defs_.begin(), defs_.end(),
                      [](const Definition& d) { return d.kind == Definition::Kind::None; });
}

std::uint64_t PcGroup::index_of(const Element& x) const {
  std::uint64_t r = 0;
  for (int i = 0; i < n_; ++i) r = r * p_ + x[i];
  return r;
}

Element PcGroup::element_at(std::uint64_t index) const {
  Element x(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    x[i] = static_cast<std::uint8_t>(index % p_);
    index /= p_;
  }
  return x;
}

bool PcGroup::operator==(const PcGroup& o) const {
  if (p_ != o.p_ || n_ != o.n_ || c_ != o.c_ || weights_ != o.weights_ || pow_ != o.pow_) return false;
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < j; ++i)
      if (comm_[idx(j, i)] != o.comm_[idx(j, i)]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Free p-class quotients

namespace {

int mobius(int n) {
  int result = 1;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    n /= d;
    if (n % d == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

// dimension of the degree-j component of the free Lie algebra on g generators
std::int64_t witt(int g, int j) {
  std::int64_t s = 0;
  for (int d = 1; d <= j; ++d)
    if (j % d == 0) s += mobius(d) * static_cast<std::int64_t>(ipow(g, j / d));
  return s / j;
}

PcGroup elementary_abelian(int g, int p) { return PcGroup(p, std::vector<int>(g, 1), g > 0 ? 1 : 0); }

PcGroup class_two_free(int g, int p) {
  // a_1..a_g, then [a_j, a_i] for i < j, then a_i^p
  std::vector<int> w(g, 1);
  const int ncomm = g * (g - 1) / 2;
  w.insert(w.end(), ncomm + g, 2);
  PcGroup G(p, w, 2);
  const int n = static_cast<int>(w.size());
  int next = g;
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) {
      Element rhs(n);
      rhs[next++] = 1;
      G.set_commutator_relation(j, i, rhs);
    }
  for (int i = 0; i < g; ++i) {
    Element rhs(n);
    rhs[next++] = 1;
    G.set_power_relation(i, rhs);
  }
  G.infer_definitions();
  return G;
}

}  // namespace

int free_quotient_generator_count(int g, int c) {
  std::int64_t n = 0;
  for (int k = 1; k <= c; ++k)
    for (int j = 1; j <= k; ++j) n += witt(g, j);
  return static_cast<int>(n);
}

PcGroup p_covering_group(const PcGroup& G) {
  require(G.fully_defined(), "p_covering_group: every generator needs a definition");
  const int p = G.prime();
  const int n = G.size();
  const int c = G.pclass() + 1;

  // relations that are not definitions get a tail each
  struct Rel {
    bool power;
    int j, i;
  };
  std::vector<Rel> tailed;
  auto is_definition = [&](bool power, int j, int i) {
    for (const auto& d : G.definitions()) {
      if (power && d.kind == Definition::Kind::Power && d.a == j) return true;
      if (!power && d.kind == Definition::Kind::Commutator && d.a == j && d.b == i) return true;
    }
    return false;
  };
  // a tail of weight c is only admissible where the weight rules allow it
  for (int i = 0; i < n; ++i)
    if (G.weight(i) + 1 <= c && !is_definition(true, i, -1)) tailed.push_back({true, i, -1});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (G.weight(i) + G.weight(j) <= c && !is_definition(false, j, i)) tailed.push_back({false, j, i});
  const int T = static_cast<int>(tailed.size());

  auto extend = [&](const Element& x, int total) {
    Element y(total);
    std::copy(x.exps.begin(), x.exps.end(), y.exps.begin());
    return y;
  };

  std::vector<int> wE = G.weights();
  wE.insert(wE.end(), T, c);
  PcGroup E(p, wE, c);
  const int nE = n + T;
  for (int i = 0; i < n; ++i) {
    Element r = extend(G.power_relation(i), nE);
    E.set_power_relation(i, r);
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) E.set_commutator_relation(j, i, extend(G.commutator_relation(j, i), nE));
  for (int t = 0; t < T; ++t) {
    const auto& rel = tailed[t];
    if (rel.power) {
      Element r = E.power_relation(rel.j);
      r[n + t] = 1;
      E.set_power_relation(rel.j, r);
    } else {
      Element r = E.commutator_relation(rel.j, rel.i);
      r[n + t] = 1;
      E.set_commutator_relation(rel.j, rel.i, r);
    }
  }

  // consistency relations among the tails, as vectors over F_p
  std::vector<std::vector<int>> rows;
  E.for_each_overlap(n, [&](const Element& l, const Element& r, const std::string& label) {
    for (int k = 0; k < n; ++k)
      if (l[k] != r[k]) throw InvariantError("p-cover: base presentation inconsistent at " + label);
    std::vector<int> row(T);
    bool nonzero = false;
    for (int t = 0; t < T; ++t) {
      row[t] = ((l[n + t] - r[n + t]) % p + p) % p;
      nonzero |= row[t] != 0;
    }
    if (nonzero) rows.push_back(std::move(row));
  });

  // reduced echelon form, pivoting on the largest tail index
  std::vector<int> pivot_of_col(T, -1);
  std::vector<std::vector<int>> basis;
  for (auto row : rows) {
    for (std::size_t b = 0; b < basis.size(); ++b) {
      int pc = -1;
      for (int t = T - 1; t >= 0; --t)
        if (pivot_of_col[t] == static_cast<int>(b)) pc = t;
      if (row[pc]) {
        const int f = row[pc];
        for (int t = 0; t < T; ++t) row[t] = ((row[t] - f * basis[b][t]) % p + p) % p;
      }
    }
    int lead = -1;
    for (int t = T - 1; t >= 0; --t)
      if (row[t]) {
        lead = t;
        break;
      }
    if (lead < 0) continue;
    const int inv = inverse_mod(row[lead], p);
    for (auto& v : row) v = (v * inv) % p;
    for (auto& b : basis)
      if (b[lead]) {
        const int f = b[lead];
        for (int t = 0; t < T; ++t) b[t] = ((b[t] - f * row[t]) % p + p) % p;
      }
    pivot_of_col[lead] = static_cast<int>(basis.size());
    basis.push_back(std::move(row));
  }

  std::vector<int> survivor_index(T, -1);
  int S = 0;
  for (int t = 0; t < T; ++t)
    if (pivot_of_col[t] < 0) survivor_index[t] = S++;

  // tail t as a vector in the surviving tails
  auto tail_value = [&](int t) {
    std::vector<int> v(S, 0);
    if (survivor_index[t] >= 0) {
      v[survivor_index[t]] = 1;
    } else {
      const auto& row = basis[pivot_of_col[t]];
      for (int s = 0; s < T; ++s)
        if (s != t && row[s]) v[survivor_index[s]] = (p - row[s]) % p;
    }
    return v;
  };

  std::vector<int> wF = G.weights();
  wF.insert(wF.end(), S, c);
  PcGroup F(p, wF, c);
  const int nF = n + S;
  auto with_tail = [&](const Element& base, int t) {
    Element r = extend(base, nF);
    if (t >= 0) {
      auto v = tail_value(t);
      for (int s = 0; s < S; ++s) r[n + s] = static_cast<std::uint8_t>(v[s]);
    }
    return r;
  };
  auto tail_of = [&](bool power, int j, int i) {
    for (int t = 0; t < T; ++t)
      if (tailed[t].power == power && tailed[t].j == j && (power || tailed[t].i == i)) return t;
    return -1;
  };
  for (int i = 0; i < n; ++i) F.set_power_relation(i, with_tail(G.power_relation(i), tail_of(true, i, -1)));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      F.set_commutator_relation(j, i, with_tail(G.commutator_relation(j, i), tail_of(false, j, i)));
  F.infer_definitions();

  auto failures = F.consistency_failures();
  if (!failures.empty()) throw InvariantError("p-cover: result inconsistent at " + failures.front());
  ensure(F.fully_defined(), "p-cover: surviving tail without a definition");
  return F;
}

PcGroup build_free_pclass_quotient(int g, int c, int p, const Caps& caps) {
  require(g >= 1, "build_free_pclass_quotient: g must be positive");
  require(c >= 1, "build_free_pclass_quotient: c must be positive");
  require(p >= 3 && p % 2 == 1 && is_prime(static_cast<std::uint64_t>(p)),
          "build_free_pclass_quotient: p must be an odd prime");
  const int n = free_quotient_generator_count(g, c);
  BigInt est = 1;
  for (int i = 0; i < n; ++i) est *= p;
  if (est > BigInt(caps.pc_order))
    throw CapError("pc_order", "Q_" + std::to_string(c) + "(F_" + std::to_string(g) + ") has estimated order " +
                                   std::to_string(p) + "^" + std::to_string(n) + " above the cap");
  if (c == 1) return elementary_abelian(g, p);
  PcGroup G = class_two_free(g, p);
  for (int k = 3; k <= c; ++k) G = p_covering_group(G);
  if (BigInt(G.order()) > BigInt(caps.pc_order)) throw CapError("pc_order", "constructed quotient exceeds the cap");
  return G;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string word_string(const Element& w) {
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!w[k]) continue;
    s += ' ';
    s += std::to_string(k + 1) + "^" + std::to_string(w[k]);
  }
  return s;
}

}  // namespace

std::string serialize_presentation(const PcGroup& G) {
  std::ostringstream os;
  const int n = G.size();
  os << G.prime() << ' ' << n << ' ' << G.pclass() << '\n';
  for (int i = 0; i < n; ++i) os << "gen " << i + 1 << " weight " << G.weight(i) << '\n';
  for (int i = 0; i < n; ++i)
    if (!G.power_relation(i).is_identity()) os << "pow " << i + 1 << " =" << word_string(G.power_relation(i)) << '\n';
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (!G.commutator_relation(j, i).is_identity())
        os << "comm " << j + 1 << ' ' << i + 1 << " =" << word_string(G.commutator_relation(j, i)) << '\n';
  return os.str();
}

PcGroup parse_presentation(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError(lineno, "missing header");
  int p = 0, n = 0, c = 0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> p >> n >> c) || (hs >> extra)) throw ParseError(lineno, "header must be `p n c`");
    if (n < 0 || n > 4096) throw ParseError(lineno, "generator count out of range");
  }

  std::vector<int> weights(n, 0);
  struct PendingRel {
    int line;
    bool power;
    int j, i;
    Element rhs;
  };
  std::vector<PendingRel> rels;

  auto parse_word = [&](std::istringstream& ls) {
    Element w(n);
    std::string tok;
    while (ls >> tok) {
      const auto caret = tok.find('^');
      if (caret == std::string::npos) throw ParseError(lineno, "word token `" + tok + "` is not gen^exp");
      int g = 0, e = 0;
      try {
        std::size_t used = 0;
        g = std::stoi(tok.substr(0, caret), &used);
        if (used != caret) throw std::invalid_argument("gen");
        const auto es = tok.substr(caret + 1);
        e = std::stoi(es, &used);
        if (used != es.size()) throw std::invalid_argument("exp");
      } catch (const std::exception&) {
        throw ParseError(lineno, "malformed word token `" + tok + "`");
      }
      if (g < 1 || g > n) throw ParseError(lineno, "generator " + std::to_string(g) + " out of range");
      if (e < 1 || e >= p) throw ParseError(lineno, "exponent " + std::to_string(e) + " out of range");
      if (w[g - 1]) throw ParseError(lineno, "generator repeated in word");
      w[g - 1] = static_cast<std::uint8_t>(e);
    }
    return w;
  };

  while (next_line()) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "gen") {
      int i = 0, w = 0;
      std::string wk;
      if (!(ls >> i >> wk >> w) || wk != "weight") throw ParseError(lineno, "expected `gen i weight w`");
      if (i < 1 || i > n) throw ParseError(lineno, "generator index out of range");
      weights[i - 1] = w;
    } else if (kw == "pow" || kw == "comm") {
      PendingRel r{lineno, kw == "pow", -1, -1, Element(n)};
      std::string eq;
      if (r.power) {
        if (!(ls >> r.j >> eq) || eq != "=") throw ParseError(lineno, "expected `pow i = word`");
      } else {
        if (!(ls >> r.j >> r.i >> eq) || eq != "=") throw ParseError(lineno, "expected `comm j i = word`");
      }
      r.rhs = parse_word(ls);
      --r.j;
      --r.i;
      rels.push_back(std::move(r));
    } else {
      throw ParseError(lineno, "unknown keyword `" + kw + "`");
    }
  }

  for (int i = 0; i < n; ++i)
    if (weights[i] == 0) throw ParseError(lineno, "generator " + std::to_string(i + 1) + " has no weight line");

  PcGroup G;
  try {
    G = PcGroup(p, weights, c);
  } catch (const ArgumentError& e) {
    throw ParseError(1, e.what());
  }
  for (auto& r : rels) {
    try {
      if (r.power)
        G.set_power_relation(r.j, r.rhs);
      else
        G.set_commutator_relation(r.j, r.i, r.rhs);
    } catch (const ArgumentError& e) {
      throw ParseError(r.line, e.what());
    }
  }
  G.infer_definitions();
  auto failures = G.consistency_failures();
  if (!failures.empty()) throw ConsistencyError("presentation is inconsistent: overlap " + failures.front());
  return G;
}

void save_presentation(const PcGroup& G, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << serialize_presentation(G);
}

PcGroup load_presentation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_presentation(ss.str());
}

// ---------------------------------------------------------------------------
// Subgroups

PcSubgroup::PcSubgroup(const PcGroup& G)
    : G_(&G), seq_(static_cast<std::size_t>(G.size())), inv_powers_(static_cast<std::size_t>(G.size())) {}

PcSubgroup PcSubgroup::generated(const PcGroup& G, std::span<const Element> gens) {
  PcSubgroup S(G);
  S.close({gens.begin(), gens.end()}, false);
  return S;
}

PcSubgroup PcSubgroup::normal_closure(const PcGroup& G, std::span<const Element> gens) {
  PcSubgroup S(G);
  S.close({gens.begin(), gens.end()}, true);
  return S;
}

Element PcSubgroup::sift(Element x) const {
  const int n = G_->size();
  for (int d = 0; d < n; ++d) {
    if (!x[d] || !seq_[d]) continue;
    x = G_->multiply(inv_powers_[d][x[d]], x);
  }
  return x;
}

bool PcSubgroup::contains(const Element& x) const {
  G_->validate(x);
  return sift(x).is_identity();
}

void PcSubgroup::close(std::vector<Element> queue, bool normal) {
  const int p = G_->prime();
  std::vector<Element> group_gens;
  if (normal)
    for (int i = 0; i < G_->size(); ++i) group_gens.push_back(G_->generator(i));
  while (!queue.empty()) {
    Element y = sift(std::move(queue.back()));
    queue.pop_back();
    if (y.is_identity()) continue;
    const auto d = y.depth();
    y = G_->power(y, static_cast<std::uint64_t>(inverse_mod(y[d], p)));
    std::vector<Element> inv(p);
    inv[0] = G_->identity();
    const Element yi = G_->inverse(y);
    for (int e = 1; e < p; ++e) inv[e] = G_->multiply(inv[e - 1], yi);
    seq_[d] = y;
    inv_powers_[d] = std::move(inv);
    queue.push_back(G_->power(y, static_cast<std::uint64_t>(p)));
    for (const auto& z : seq_)
      if (z && *z != y) queue.push_back(G_->commutator(y, *z));
    for (const auto& g : group_gens) queue.push_back(G_->commutator(y, g));
  }
}

int PcSubgroup::log_order() const {
  return static_cast<int>(std::count_if(seq_.begin(), seq_.end(), [](const auto& s) { return s.has_value(); }));
}

std::uint64_t PcSubgroup::order() const { return ipow(static_cast<std::uint64_t>(G_->prime()), log_order()); }

std::vector<int> PcSubgroup::leading_depths() const {
  std::vector<int> out;
  for (int d = 0; d < static_cast<int>(seq_.size()); ++d)
    if (seq_[d]) out.push_back(d);
  return out;
}

std::vector<Element> PcSubgroup::canonical_sequence() const {
  const auto depths = leading_depths();
  const int p = G_->prime();
  std::vector<Element> canon(seq_.size());
  for (auto it = depths.rbegin(); it != depths.rend(); ++it) {
    Element x = *seq_[*it];
    for (int d2 : depths) {
      if (d2 <= *it || !x[d2]) continue;
      // x * canon[d2]^{-x[d2]}
      const Element ci = G_->inverse(canon[d2]);
      x = G_->multiply(x, G_->power(ci, x[d2]));
    }
    canon[*it] = std::move(x);
  }
  std::vector<Element> out;
  for (int d : depths) out.push_back(std::move(canon[d]));
  (void)p;
  return out;
}

std::string PcSubgroup::key() const {
  std::string k;
  for (const auto& e : canonical_sequence()) {
    k.append(reinterpret_cast<const char*>(e.exps.data()), e.exps.size());
    k.push_back('|');
  }
  return k;
}

Element PcSubgroup::reduce(const Element& x) const {
  Element r = x;
  for (int d = 0; d < static_cast<int>(seq_.size()); ++d) {
    if (!seq_[d] || !r[d]) continue;
    r = G_->multiply(r, inv_powers_[d][r[d]]);
  }
  return r;
}

bool PcSubgroup::is_normal() const {
  for (const auto& s : seq_) {
    if (!s) continue;
    for (int i = 0; i < G_->size(); ++i)
      if (!contains(G_->conjugate(*s, G_->generator(i)))) return false;
  }
  return true;
}

PcSubgroup pc_frattini(const PcGroup& G) {
  std::vector<Element> gens;
  for (int i = 0; i < G.size(); ++i)
    if (G.weight(i) >= 2) gens.push_back(G.generator(i));
  return PcSubgroup::generated(G, gens);
}

}  // namespace bbh
