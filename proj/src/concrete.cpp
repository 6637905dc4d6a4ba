#include "bbh/concrete.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>

namespace bbh {

ConcreteGroup::ConcreteGroup(int p, std::size_t order, std::vector<std::uint16_t> table, std::vector<int> gens)
    : p_(p), n_(order), mul_(std::move(table)), gens_(std::move(gens)) {
  require(is_prime(static_cast<std::uint64_t>(p)) && p % 2 == 1, "ConcreteGroup: p must be an odd prime");
  require(order >= 1 && order <= 65535, "ConcreteGroup: order out of range");
  require(prime_power(order).first == static_cast<std::uint64_t>(p) || order == 1,
          "ConcreteGroup: order is not a power of p");
  require(mul_.size() == n_ * n_, "ConcreteGroup: table has wrong size");
  inv_.assign(n_, 0);
  std::vector<char> seen(n_);
  for (std::size_t a = 0; a < n_; ++a) {
    require(mul(0, static_cast<int>(a)) == static_cast<int>(a) && mul(static_cast<int>(a), 0) == static_cast<int>(a),
            "ConcreteGroup: element 0 is not the identity");
    std::fill(seen.begin(), seen.end(), 0);
    bool found = false;
    for (std::size_t b = 0; b < n_; ++b) {
      const auto v = mul_[a * n_ + b];
      require(v < n_ && !seen[v], "ConcreteGroup: table row is not a permutation");
      seen[v] = 1;
      if (v == 0) {
        inv_[a] = static_cast<std::uint16_t>(b);
        found = true;
      }
    }
    ensure(found, "ConcreteGroup: missing inverse");
  }
  for (int g : gens_) require(g >= 0 && static_cast<std::size_t>(g) < n_, "ConcreteGroup: generator out of range");
  require(subgroup_closure(*this, gens_).size() == n_, "ConcreteGroup: generators do not generate");
}

ConcreteGroup ConcreteGroup::trivial(int p) { return ConcreteGroup(p, 1, {0}, {}); }

ConcreteGroup ConcreteGroup::from_pc(const PcGroup& G, const Caps& caps) {
  const int n = G.size();
  const int p = G.prime();
  BigInt ord = 1;
  for (int i = 0; i < n; ++i) ord *= p;
  if (ord > BigInt(caps.concrete_order) || ord > 65535)
    throw CapError("concrete_order", "group of order " + ord.str() + " exceeds the concrete-group cap");
  const std::size_t N = static_cast<std::size_t>(ord);

  // right multiplication by each generator
  std::vector<std::uint16_t> right(N * n);
  for (std::size_t a = 0; a < N; ++a) {
    const Element x = G.element_at(a);
    for (int k = 0; k < n; ++k)
      right[a * n + k] = static_cast<std::uint16_t>(G.index_of(G.multiply(x, G.generator(k))));
  }
  std::vector<std::size_t> place(n);
  for (int k = 0; k < n; ++k) place[k] = static_cast<std::size_t>(ipow(p, n - 1 - k));

  std::vector<std::uint16_t> table(N * N);
  for (std::size_t a = 0; a < N; ++a) table[a * N] = static_cast<std::uint16_t>(a);
  for (std::size_t b = 1; b < N; ++b) {
    int m = n - 1;
    while ((b / place[m]) % p == 0) --m;
    const std::size_t prev = b - place[m];
    for (std::size_t a = 0; a < N; ++a) table[a * N + b] = right[static_cast<std::size_t>(table[a * N + prev]) * n + m];
  }
  std::vector<int> gens;
  for (int k = 0; k < n; ++k)
    if (G.weight(k) == 1) gens.push_back(static_cast<int>(place[k]));
  return ConcreteGroup(p, N, std::move(table), std::move(gens));
}

int ConcreteGroup::pow(int a, std::uint64_t k) const {
  int r = 0;
  int b = a;
  while (k) {
    if (k & 1) r = mul(r, b);
    k >>= 1;
    if (k) b = mul(b, b);
  }
  return r;
}

int ConcreteGroup::element_order(int a) const {
  int o = 1;
  int x = a;
  while (x != 0) {
    x = mul(x, a);
    ++o;
  }
  return o;
}

bool ConcreteGroup::verify_associative(std::uint64_t limit, int samples) const {
  const std::uint64_t n = n_;
  if (n * n * n <= limit) {
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) {
        const int ab = mul(static_cast<int>(a), static_cast<int>(b));
        for (std::size_t c = 0; c < n_; ++c)
          if (mul(ab, static_cast<int>(c)) != mul(static_cast<int>(a), mul(static_cast<int>(b), static_cast<int>(c))))
            return false;
      }
    return true;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n_) - 1);
  for (int s = 0; s < samples; ++s) {
    const int a = pick(rng), b = pick(rng), c = pick(rng);
    if (mul(mul(a, b), c) != mul(a, mul(b, c))) return false;
  }
  return true;
}

ConcreteGroup direct_product(const ConcreteGroup& G, const ConcreteGroup& H) {
  const std::size_t m = G.order(), n = H.order();
  require(m * n <= 65535, "direct_product: order too large");
  std::vector<std::uint16_t> table(m * n * m * n);
  for (std::size_t a = 0; a < m * n; ++a)
    for (std::size_t b = 0; b < m * n; ++b) {
      const int g = G.mul(static_cast<int>(a / n), static_cast<int>(b / n));
      const int h = H.mul(static_cast<int>(a % n), static_cast<int>(b % n));
      table[a * m * n + b] = static_cast<std::uint16_t>(g * n + h);
    }
  std::vector<int> gens;
  for (int g : G.generators()) gens.push_back(static_cast<int>(g * n));
  for (int h : H.generators()) gens.push_back(h);
  return ConcreteGroup(G.prime(), m * n, std::move(table), std::move(gens));
}

// ---------------------------------------------------------------------------
// Subgroups

namespace {

ElementSet to_set(const std::vector<char>& member) {
  ElementSet out;
  for (std::size_t i = 0; i < member.size(); ++i)
    if (member[i]) out.push_back(static_cast<int>(i));
  return out;
}

// grows `member`/`list` to the subgroup generated by gens ∪ {x}
void adjoin(const ConcreteGroup& G, std::vector<char>& member, std::vector<int>& list, std::vector<int>& gens, int x) {
  if (member[x]) return;
  gens.push_back(x);
  for (std::size_t i = 0; i < list.size(); ++i)
    for (int g : gens) {
      const int b = G.mul(list[i], g);
      if (!member[b]) {
        member[b] = 1;
        list.push_back(b);
      }
    }
}

struct Closure {
  std::vector<char> member;
  std::vector<int> list;
  std::vector<int> gens;
  explicit Closure(const ConcreteGroup& G) : member(G.order(), 0), list{0} { member[0] = 1; }
};

}  // namespace

ElementSet subgroup_closure(const ConcreteGroup& G, std::span<const int> gens) {
  Closure C(G);
  for (int g : gens) adjoin(G, C.member, C.list, C.gens, g);
  return to_set(C.member);
}

ElementSet normal_closure(const ConcreteGroup& G, std::span<const int> gens) {
  Closure C(G);
  std::deque<int> queue(gens.begin(), gens.end());
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    if (C.member[s]) continue;
    adjoin(G, C.member, C.list, C.gens, s);
    for (int x : G.generators()) queue.push_back(G.conjugate(s, x));
  }
  // conjugates of every subgroup generator are now inside, so the subgroup is normal
  return to_set(C.member);
}

std::vector<int> generating_list(const ConcreteGroup& G, const ElementSet& S) {
  Closure C(G);
  for (int x : S)
    if (!C.member[x]) adjoin(G, C.member, C.list, C.gens, x);
  return C.gens;
}

bool is_normal(const ConcreteGroup& G, const ElementSet& S) {
  std::vector<char> member(G.order(), 0);
  for (int x : S) member[x] = 1;
  for (int x : S)
    for (int g : G.generators())
      if (!member[G.conjugate(x, g)]) return false;
  return true;
}

Quotient quotient(const ConcreteGroup& G, const ElementSet& N) {
  require(!N.empty() && N.front() == 0, "quotient: N must contain the identity");
  const std::size_t n = G.order();
  std::vector<int> proj(n, -1);
  std::vector<int> reps;
  for (std::size_t x = 0; x < n; ++x) {
    if (proj[x] >= 0) continue;
    const int id = static_cast<int>(reps.size());
    reps.push_back(static_cast<int>(x));
    for (int k : N) proj[G.mul(static_cast<int>(x), k)] = id;
  }
  const std::size_t m = reps.size();
  ensure(m * N.size() == n, "quotient: cosets do not partition the group");
  std::vector<std::uint16_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) table[i * m + j] = static_cast<std::uint16_t>(proj[G.mul(reps[i], reps[j])]);
  std::vector<int> gens;
  for (int g : G.generators())
    if (proj[g] != 0 && std::find(gens.begin(), gens.end(), proj[g]) == gens.end()) gens.push_back(proj[g]);
  return {ConcreteGroup(G.prime(), m, std::move(table), std::move(gens)), std::move(proj)};
}

Quotient quotient_by_normal_closure(const ConcreteGroup& G, std::span<const int> relators) {
  return quotient(G, normal_closure(G, relators));
}

Embedded subgroup_as_group(const ConcreteGroup& G, const ElementSet& S) {
  const std::size_t m = S.size();
  std::vector<int> local(G.order(), -1);
  for (std::size_t i = 0; i < m; ++i) local[S[i]] = static_cast<int>(i);
  std::vector<std::uint16_t> table(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const int v = local[G.mul(S[i], S[j])];
      require(v >= 0, "subgroup_as_group: set is not closed");
      table[i * m + j] = static_cast<std::uint16_t>(v);
    }
  std::vector<int> gens;
  for (int x : generating_list(G, S)) gens.push_back(local[x]);
  return {ConcreteGroup(G.prime(), m, std::move(table), std::move(gens)), S};
}

PCentralSeries lower_p_central_series(const ConcreteGroup& G) {
  PCentralSeries out;
  std::vector<int> all(G.order());
  std::iota(all.begin(), all.end(), 0);
  out.terms.push_back(all);
  while (out.terms.back().size() > 1) {
    const auto gens = generating_list(G, out.terms.back());
    std::vector<int> next;
    for (int y : gens) {
      next.push_back(G.pow(y, G.prime()));
      for (int x : G.generators()) next.push_back(G.commutator(x, y));
    }
    out.terms.push_back(normal_closure(G, next));
    ensure(out.terms.back().size() < out.terms[out.terms.size() - 2].size(),
           "lower_p_central_series: series failed to descend");
  }
  out.pclass = static_cast<int>(out.terms.size()) - 1;
  return out;
}

ElementSet frattini(const ConcreteGroup& G) {
  std::vector<int> next;
  for (int x : G.generators()) {
    next.push_back(G.pow(x, G.prime()));
    for (int y : G.generators()) next.push_back(G.commutator(x, y));
  }
  return normal_closure(G, next);
}

ElementSet derived_subgroup(const ConcreteGroup& G) {
  std::vector<int> comms;
  for (int x : G.generators())
    for (int y : G.generators()) comms.push_back(G.commutator(x, y));
  return normal_closure(G, comms);
}

int generator_rank(const ConcreteGroup& G) {
  return static_cast<int>(exact_log(G.order() / frattini(G).size(), G.prime()));
}

int p_class(const ConcreteGroup& G) { return lower_p_central_series(G).pclass; }

std::vector<std::uint64_t> abelian_invariants_from_orders(int p, const std::vector<std::uint64_t>& orders) {
  // c_k = log_p #{x : x^{p^k} = 1} = sum_i min(k, e_i)
  std::vector<unsigned> logs;
  for (auto o : orders) logs.push_back(exact_log(o, p));
  const unsigned top = logs.empty() ? 0 : *std::max_element(logs.begin(), logs.end());
  std::vector<unsigned> c(top + 1, 0);
  for (unsigned k = 0; k <= top; ++k) {
    std::uint64_t cnt = 0;
    for (auto l : logs)
      if (l <= k) ++cnt;
    c[k] = exact_log(cnt, p);
  }
  std::vector<std::uint64_t> inv;
  for (unsigned k = top; k >= 1; --k) {
    const unsigned at_least_k = c[k] - c[k - 1];
    const unsigned at_least_k1 = k < top ? c[k + 1] - c[k] : 0;
    for (unsigned t = at_least_k1; t < at_least_k; ++t) inv.push_back(ipow(p, k));
  }
  std::sort(inv.begin(), inv.end());
  return inv;
}

std::vector<std::uint64_t> abelian_invariants(const ConcreteGroup& G) {
  const auto Q = quotient(G, derived_subgroup(G));
  std::vector<std::uint64_t> orders;
  for (std::size_t x = 0; x < Q.group.order(); ++x) orders.push_back(Q.group.element_order(static_cast<int>(x)));
  return abelian_invariants_from_orders(G.prime(), orders);
}

std::vector<int> burnside_basis(const ConcreteGroup& G, std::span<const int> prefer) {
  const auto Q = quotient(G, frattini(G));
  Closure C(Q.group);
  std::vector<int> basis;
  auto consider = [&](int x) {
    const int q = Q.proj[x];
    if (C.member[q]) return;
    adjoin(Q.group, C.member, C.list, C.gens, q);
    basis.push_back(x);
  };
  for (int x : prefer) consider(x);
  for (std::size_t x = 0; x < G.order() && C.list.size() < Q.group.order(); ++x) consider(static_cast<int>(x));
  return basis;
}

// ---------------------------------------------------------------------------
// Homomorphisms

HomExtender::HomExtender(const ConcreteGroup& G, std::vector<int> gens) : G_(&G), gens_(std::move(gens)) {
  const std::size_t n = G.order();
  parent_.assign(n, {-1, -1});
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  std::vector<int> frontier{0};
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const int a = frontier[i];
    for (int s = 0; s < static_cast<int>(gens_.size()); ++s) {
      const int b = G.mul(a, gens_[s]);
      if (!seen[b]) {
        seen[b] = 1;
        parent_[b] = {a, s};
        frontier.push_back(b);
        order_.push_back(b);
      } else {
        nontree_.push_back({a, s});
      }
    }
  }
  require(frontier.size() == n, "HomExtender: generators do not generate the group");
}

std::optional<std::vector<int>> HomExtender::extend(const ConcreteGroup& H, std::span<const int> images) const {
  require(images.size() == gens_.size(), "HomExtender: wrong number of images");
  std::vector<int> map(G_->order(), 0);
  for (int b : order_) map[b] = H.mul(map[parent_[b].first], images[parent_[b].second]);
  for (auto [a, s] : nontree_)
    if (map[G_->mul(a, gens_[s])] != H.mul(map[a], images[s])) return std::nullopt;
  return map;
}

bool HomExtender::is_hom(const ConcreteGroup& H, std::span<const int> images) const {
  return extend(H, images).has_value();
}

std::optional<std::vector<int>> extend_hom(const ConcreteGroup& G, std::span<const int> gens, const ConcreteGroup& H,
                                           std::span<const int> images) {
  return HomExtender(G, {gens.begin(), gens.end()}).extend(H, images);
}

bool is_injective(const std::vector<int>& map, std::size_t target_order) {
  std::vector<char> hit(target_order, 0);
  for (int v : map) {
    if (hit[v]) return false;
    hit[v] = 1;
  }
  return true;
}

bool is_surjective(const std::vector<int>& map, std::size_t target_order) {
  std::vector<char> hit(target_order, 0);
  std::size_t count = 0;
  for (int v : map)
    if (!hit[v]) {
      hit[v] = 1;
      ++count;
    }
  return count == target_order;
}

std::vector<int> pc_generator_images(const PcGroup& F, const ConcreteGroup& H, std::span<const int> images) {
  require(static_cast<int>(images.size()) == F.rank(), "pc_generator_images: need one image per free generator");
  return images_from_definitions<int>(
      F, images, 0, [&](int a, int b) { return H.mul(a, b); }, [&](int a) { return H.inv(a); });
}

int pc_evaluate(const PcGroup& F, const ConcreteGroup& H, std::span<const int> gen_images, const Element& x) {
  int r = 0;
  for (int k = 0; k < F.size(); ++k)
    for (int e = 0; e < x[k]; ++e) r = H.mul(r, gen_images[k]);
  return r;
}

bool pc_relations_hold(const PcGroup& F, const ConcreteGroup& H, std::span<const int> gen_images) {
  const int n = F.size();
  for (int i = 0; i < n; ++i)
    if (H.pow(gen_images[i], F.prime()) != pc_evaluate(F, H, gen_images, F.power_relation(i))) return false;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (H.commutator(gen_images[j], gen_images[i]) != pc_evaluate(F, H, gen_images, F.commutator_relation(j, i)))
        return false;
  return true;
}

int relator_dimension(const PcGroup& F, const PcSubgroup& R) {
  std::vector<Element> gens;
  for (const auto& s : R.canonical_sequence()) {
    gens.push_back(F.power(s, static_cast<std::uint64_t>(F.prime())));
    for (int i = 0; i < F.size(); ++i)
      if (F.weight(i) == 1) gens.push_back(F.commutator(F.generator(i), s));
  }
  const auto N = PcSubgroup::normal_closure(F, gens);
  return R.log_order() - N.log_order();
}

PcSubgroup pc_kernel(const PcGroup& F, const ConcreteGroup& H, std::span<const int> free_images) {
  const int p = F.prime();
  const auto img = pc_generator_images(F, H, free_images);
  ensure(pc_relations_hold(F, H, img), "pc_kernel: generator images do not define a homomorphism");
  const auto image_set = subgroup_closure(H, free_images);
  const int n = F.size();
  const int target_log = n - static_cast<int>(exact_log(image_set.size(), p));
  PcSubgroup R(F);
  const std::uint64_t total = F.order();
  // images of every element, by mixed-radix recurrence on the last digit
  std::vector<std::uint16_t> image(total);
  std::vector<std::uint64_t> place(n);
  for (int k = 0; k < n; ++k) place[k] = ipow(p, n - 1 - k);
  for (std::uint64_t idx = 1; idx < total && R.log_order() < target_log; ++idx) {
    int m = n - 1;
    while ((idx / place[m]) % p == 0) --m;
    image[idx] = static_cast<std::uint16_t>(H.mul(image[idx - place[m]], img[m]));
    if (image[idx] != 0) continue;
    const Element x = F.element_at(idx);
    if (!R.contains(x)) R.add(x);
  }
  ensure(R.log_order() == target_log, "pc_kernel: kernel has the wrong order");
  return R;
}

int relation_rank(const ConcreteGroup& G, const Caps& caps, std::span<const int> basis) {
  if (G.order() == 1) return 0;
  std::vector<int> b(basis.begin(), basis.end());
  if (b.empty()) b = burnside_basis(G);
  require(static_cast<int>(b.size()) == generator_rank(G), "relation_rank: basis size differs from d(G)");
  require(subgroup_closure(G, b).size() == G.order(), "relation_rank: basis does not generate");
  const PcGroup F = build_free_pclass_quotient(static_cast<int>(b.size()), p_class(G) + 1, G.prime(), caps);
  return relator_dimension(F, pc_kernel(F, G, b));
}

}  // namespace bbh
