#include "bbh/equivariant.hpp"

#include <algorithm>
#include <set>

namespace bbh {

Involution involution_from_generators(const ConcreteGroup& G, std::span<const int> images) {
  auto map = extend_hom(G, G.generators(), G, images);
  if (!map) throw ArgumentError("involution: generator images do not define a homomorphism");
  if (!is_injective(*map, G.order())) throw ArgumentError("involution: map is not bijective");
  Involution s{std::move(*map)};
  if (!is_involution(G, s)) throw ArgumentError("involution: map does not square to the identity");
  return s;
}

Involution identity_involution(const ConcreteGroup& G) {
  Involution s;
  s.map.resize(G.order());
  for (std::size_t x = 0; x < G.order(); ++x) s.map[x] = static_cast<int>(x);
  return s;
}

Involution inversion_involution(const ConcreteGroup& G) {
  std::vector<int> images;
  for (int g : G.generators()) images.push_back(G.inv(g));
  return involution_from_generators(G, images);
}

std::vector<Element> canonical_gi(const PcGroup& F) {
  std::vector<Element> free_images;
  for (int i = 0; i < F.size(); ++i)
    if (F.weight(i) == 1) free_images.push_back(F.inverse(F.generator(i)));
  auto images = images_from_definitions<Element>(
      F, free_images, F.identity(), [&](const Element& a, const Element& b) { return F.multiply(a, b); },
      [&](const Element& a) { return F.inverse(a); });
  for (int i = 0; i < F.size(); ++i) {
    const Element back = apply_pc_map(F, images, images[i]);
    ensure(back == F.generator(i), "canonical_gi: sigma^2 is not the identity on generator " + std::to_string(i + 1));
  }
  return images;
}

Element apply_pc_map(const PcGroup& F, const std::vector<Element>& gen_images, const Element& x) {
  Element r = F.identity();
  for (int k = 0; k < F.size(); ++k)
    for (int e = 0; e < x[k]; ++e) r = F.multiply(r, gen_images[k]);
  return r;
}

Involution canonical_gi_concrete(const PcGroup& F, const ConcreteGroup& G) {
  require(G.order() == F.order(), "canonical_gi_concrete: group mismatch");
  const auto images = canonical_gi(F);
  std::vector<int> gen_idx;
  for (const auto& e : images) gen_idx.push_back(static_cast<int>(F.index_of(e)));
  Involution s;
  s.map.resize(G.order());
  for (std::size_t idx = 0; idx < G.order(); ++idx) {
    const Element x = F.element_at(idx);
    int r = 0;
    for (int k = 0; k < F.size(); ++k)
      for (int e = 0; e < x[k]; ++e) r = G.mul(r, gen_idx[k]);
    s.map[idx] = r;
  }
  ensure(is_involution(G, s), "canonical_gi_concrete: not an involution");
  return s;
}

bool is_involution(const ConcreteGroup& G, const Involution& s) {
  if (s.map.size() != G.order()) return false;
  for (std::size_t x = 0; x < G.order(); ++x)
    if (s(s(static_cast<int>(x))) != static_cast<int>(x)) return false;
  for (int a : G.generators())
    for (std::size_t b = 0; b < G.order(); ++b)
      if (s(G.mul(static_cast<int>(b), a)) != G.mul(s(static_cast<int>(b)), s(a))) return false;
  return true;
}

bool is_gi(const ConcreteGroup& G, const Involution& s) {
  if (!is_involution(G, s)) return false;
  const auto phi = frattini(G);
  std::vector<char> in_phi(G.order(), 0);
  for (int x : phi) in_phi[x] = 1;
  for (int g : G.generators())
    if (!in_phi[G.mul(s(g), g)]) return false;
  return true;
}

ElementSet y_set(const ConcreteGroup& G, const Involution& s) {
  ElementSet out;
  for (std::size_t x = 0; x < G.order(); ++x)
    if (s(static_cast<int>(x)) == G.inv(static_cast<int>(x))) out.push_back(static_cast<int>(x));
  return out;
}

ElementSet z_set(const ConcreteGroup& G, const Involution& s) {
  ElementSet out;
  for (std::size_t x = 0; x < G.order(); ++x)
    if (s(static_cast<int>(x)) == static_cast<int>(x)) out.push_back(static_cast<int>(x));
  return out;
}

bool is_invariant(const Involution& s, const ElementSet& S) {
  for (int x : S)
    if (!std::binary_search(S.begin(), S.end(), s(x))) return false;
  return true;
}

Involution induced_involution(const Quotient& Q, const Involution& s) {
  Involution out;
  out.map.assign(Q.group.order(), -1);
  for (std::size_t x = 0; x < Q.proj.size(); ++x) {
    const int a = Q.proj[x], b = Q.proj[s(static_cast<int>(x))];
    if (out.map[a] < 0)
      out.map[a] = b;
    else if (out.map[a] != b)
      throw ArgumentError("induced_involution: kernel is not sigma-invariant");
  }
  return out;
}

Involution restricted_involution(const Embedded& E, const Involution& s) {
  std::vector<int> local(s.map.size(), -1);
  for (std::size_t i = 0; i < E.embed.size(); ++i) local[E.embed[i]] = static_cast<int>(i);
  Involution out;
  for (int x : E.embed) {
    const int y = local[s(x)];
    if (y < 0) throw ArgumentError("restricted_involution: subgroup is not sigma-invariant");
    out.map.push_back(y);
  }
  return out;
}

Involution switch_involution(const ConcreteGroup& H) {
  const std::size_t n = H.order();
  Involution s;
  s.map.resize(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) s.map[a * n + b] = static_cast<int>(b * n + a);
  return s;
}

// ---------------------------------------------------------------------------

FrattiniCoordinates::FrattiniCoordinates(const ConcreteGroup& H) : p_(H.prime()) {
  const auto Q = quotient(H, frattini(H));
  // express each element of the elementary abelian quotient in the generator basis
  d_ = static_cast<int>(exact_log(Q.group.order(), p_));
  std::vector<int> basis;
  for (int g : burnside_basis(Q.group)) basis.push_back(g);
  std::vector<std::uint32_t> qcode(Q.group.order(), 0);
  std::uint32_t total = 1;
  for (int i = 0; i < d_; ++i) total *= p_;
  for (std::uint32_t c = 0; c < total; ++c) {
    int x = 0;
    std::uint32_t t = c;
    for (int i = 0; i < d_; ++i) {
      x = Q.group.mul(x, Q.group.pow(basis[i], t % p_));
      t /= p_;
    }
    qcode[x] = c;
  }
  code_.resize(H.order());
  for (std::size_t x = 0; x < H.order(); ++x) code_[x] = qcode[Q.proj[x]];
}

bool FrattiniCoordinates::spans(std::span<const int> xs) const {
  if (d_ == 0) return true;
  if (static_cast<int>(xs.size()) < d_) return false;
  std::vector<std::vector<int>> rows;
  for (int x : xs) {
    std::vector<int> v(d_);
    std::uint32_t t = code_[x];
    for (int i = 0; i < d_; ++i) {
      v[i] = static_cast<int>(t % p_);
      t /= p_;
    }
    rows.push_back(std::move(v));
  }
  int rank = 0;
  for (int col = 0; col < d_ && rank < d_; ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (rows[r][col]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[rank], rows[piv]);
    int inv = 1;
    while ((rows[rank][col] * inv) % p_ != 1) ++inv;
    for (auto& v : rows[rank]) v = (v * inv) % p_;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != rank && rows[r][col]) {
        const int f = rows[r][col];
        for (int c = 0; c < d_; ++c) rows[r][c] = ((rows[r][c] - f * rows[rank][c]) % p_ + p_) % p_;
      }
    ++rank;
  }
  return rank == d_;
}

namespace {

void check_search(std::vector<std::size_t> sizes, const Caps& caps) {
  BigInt space = 1;
  for (auto s : sizes) space *= s;
  if (space > BigInt(caps.search_space))
    throw CapError("search_space", "surjection search over " + space.str() + " candidate tuples");
}

// Calls fn(images) for every tuple of candidate images (mixed-radix order).
template <class Fn>
void for_each_tuple(const std::vector<std::vector<int>>& cands, Fn&& fn) {
  const std::size_t d = cands.size();
  for (const auto& c : cands)
    if (c.empty()) return;
  std::vector<std::size_t> pos(d, 0);
  std::vector<int> images(d);
  for (std::size_t i = 0; i < d; ++i) images[i] = cands[i][0];
  while (true) {
    fn(std::span<const int>(images));
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++pos[i] < cands[i].size()) {
        images[i] = cands[i][pos[i]];
        break;
      }
      pos[i] = 0;
      images[i] = cands[i][0];
      if (i == 0) return;
    }
    if (d == 0) return;
  }
}

enum class Want { Hom, Sur };

std::uint64_t count_maps(const ConcreteGroup& G, const Involution* sG, const ConcreteGroup& H, const Involution* sH,
                         Want want, const Caps& caps) {
  require(G.prime() == H.prime(), "surjection count: groups for different primes");
  if (want == Want::Sur && H.order() > G.order()) return 0;
  if (G.order() == 1) return want == Want::Sur ? (H.order() == 1 ? 1 : 0) : 1;

  ElementSet yG, yH;
  if (sG) {
    yG = y_set(G, *sG);
    yH = y_set(H, *sH);
  }
  const auto basis = burnside_basis(G, yG);
  if (want == Want::Sur && generator_rank(H) > static_cast<int>(basis.size())) return 0;

  std::vector<std::vector<int>> cands(basis.size());
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int ob = G.element_order(basis[i]);
    const bool in_y = sG && std::binary_search(yG.begin(), yG.end(), basis[i]);
    auto consider = [&](int y) {
      if (ob % H.element_order(y) == 0) cands[i].push_back(y);
    };
    if (in_y)
      for (int y : yH) consider(y);
    else
      for (std::size_t y = 0; y < H.order(); ++y) consider(static_cast<int>(y));
    sizes.push_back(cands[i].size());
  }
  check_search(sizes, caps);

  const HomExtender ext(G, basis);
  std::optional<FrattiniCoordinates> fc;
  if (want == Want::Sur) fc.emplace(H);
  std::uint64_t count = 0;
  for_each_tuple(cands, [&](std::span<const int> images) {
    if (fc && !fc->spans(images)) return;
    auto map = ext.extend(H, images);
    if (!map) return;
    if (sG)
      for (std::size_t i = 0; i < basis.size(); ++i)
        if ((*map)[(*sG)(basis[i])] != (*sH)(images[i])) return;
    ++count;
  });
  return count;
}

}  // namespace

std::uint64_t count_hom(const ConcreteGroup& G, const ConcreteGroup& H, const Caps& caps) {
  return count_maps(G, nullptr, H, nullptr, Want::Hom, caps);
}

std::uint64_t count_sur(const ConcreteGroup& G, const ConcreteGroup& H, const Caps& caps) {
  return count_maps(G, nullptr, H, nullptr, Want::Sur, caps);
}

std::uint64_t count_hom_sigma(const ConcreteGroup& G, const Involution& sG, const ConcreteGroup& H,
                              const Involution& sH, const Caps& caps) {
  return count_maps(G, &sG, H, &sH, Want::Hom, caps);
}

std::uint64_t count_sur_sigma(const ConcreteGroup& G, const Involution& sG, const ConcreteGroup& H,
                              const Involution& sH, const Caps& caps) {
  return count_maps(G, &sG, H, &sH, Want::Sur, caps);
}

std::uint64_t aut_sigma_order(const ConcreteGroup& G, const Involution& s, const Caps& caps) {
  return count_sur_sigma(G, s, G, s, caps);
}

std::uint64_t count_sur_sigma_free(int d, const ConcreteGroup& H, const Involution& sH, const Caps& caps) {
  require(d >= 0, "count_sur_sigma_free: negative rank");
  const auto Y = y_set(H, sH);
  check_search(std::vector<std::size_t>(d, Y.size()), caps);
  std::vector<std::vector<int>> cands(d, Y);
  if (d == 0) return H.order() == 1 ? 1 : 0;
  std::uint64_t count = 0;
  for_each_tuple(cands, [&](std::span<const int> ys) {
    if (subgroup_closure(H, ys).size() == H.order()) ++count;
  });
  return count;
}

SigmaTarget::SigmaTarget(const ConcreteGroup& group, Involution s)
    : H(&group), sigma(std::move(s)), Y(y_set(group, sigma)), coords(group), pclass(p_class(group)) {}

std::uint64_t count_sur_sigma_pc(const PcGroup& F, std::span<const Element> relators, const SigmaTarget& T,
                                 const Caps& caps) {
  const ConcreteGroup& H = *T.H;
  const int g = F.rank();
  if (g == 0) return H.order() == 1 ? 1 : 0;
  if (T.coords.rank() > g) return 0;
  check_search(std::vector<std::size_t>(g, T.Y.size()), caps);
  const bool need_hom_check = T.pclass > F.pclass();
  std::vector<std::vector<int>> cands(g, T.Y);
  std::uint64_t count = 0;
  for_each_tuple(cands, [&](std::span<const int> ys) {
    if (!T.coords.spans(ys)) return;
    const auto img = pc_generator_images(F, H, ys);
    if (need_hom_check && !pc_relations_hold(F, H, img)) return;
    for (const auto& r : relators)
      if (pc_evaluate(F, H, img, r) != 0) return;
    ++count;
  });
  return count;
}

std::uint64_t count_sur_sigma_pc(const PcGroup& F, std::span<const Element> relators, const ConcreteGroup& H,
                                 const Involution& sH, const Caps& caps) {
  return count_sur_sigma_pc(F, relators, SigmaTarget(H, sH), caps);
}

BigInt sur_sigma_free_closed_form(int d, const ConcreteGroup& H, const Involution& sH) {
  if (!is_gi(H, sH)) throw ArgumentError("sur_sigma_free_closed_form: involution is not GI");
  const int p = H.prime();
  const int r = generator_rank(H);
  if (d < r) return 0;
  const BigInt y = static_cast<std::uint64_t>(y_set(H, sH).size());
  BigInt num = pow(y, d);
  const BigInt pd = pow(BigInt(p), d);
  for (int k = 0; k < r; ++k) num *= pd - pow(BigInt(p), k);
  const BigInt den = pow(BigInt(p), d * r);
  ensure(num % den == 0, "sur_sigma_free_closed_form: non-integral value");
  return num / den;
}

std::vector<SigmaFiber> sigma_fiber_subgroups(const ConcreteGroup& H, const Caps& caps) {
  const std::size_t n = H.order();
  if (n * n > caps.concrete_order) throw CapError("concrete_order", "H x H exceeds the concrete-group cap");
  const ConcreteGroup HH = direct_product(H, H);
  const Involution tau = switch_involution(H);

  std::set<ElementSet> seen;
  std::vector<ElementSet> queue{ElementSet{0}};
  seen.insert(queue.front());
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const ElementSet S = queue[i];
    const auto gens = generating_list(HH, S);
    std::vector<char> member(HH.order(), 0);
    for (int x : S) member[x] = 1;
    for (std::size_t x = 0; x < HH.order(); ++x) {
      if (member[x]) continue;
      auto g2 = gens;
      g2.push_back(static_cast<int>(x));
      g2.push_back(tau(static_cast<int>(x)));
      ElementSet T = subgroup_closure(HH, g2);
      if (seen.insert(T).second) queue.push_back(std::move(T));
    }
  }

  std::vector<SigmaFiber> out;
  for (const auto& S : queue) {
    std::vector<char> first(n, 0);
    std::size_t hit = 0;
    for (int x : S)
      if (!first[x / n]) {
        first[x / n] = 1;
        ++hit;
      }
    if (hit != n) continue;
    Embedded E = subgroup_as_group(HH, S);
    Involution s = restricted_involution(E, tau);
    out.push_back({std::move(E), std::move(s)});
  }
  return out;
}

// ---------------------------------------------------------------------------

bool check_order_split(const ConcreteGroup& G, const Involution& s) {
  return y_set(G, s).size() * z_set(G, s).size() == G.order();
}

bool check_y_equidistribution(const ConcreteGroup& G, const Involution& s) {
  const auto Q = quotient(G, frattini(G));
  std::vector<std::size_t> hits(Q.group.order(), 0);
  const ElementSet Y = y_set(G, s);
  for (int y : Y) ++hits[Q.proj[y]];
  for (auto h : hits)
    if (h * Q.group.order() != Y.size()) return false;
  return true;
}

QuotientLemmas check_quotient_lemmas(const ConcreteGroup& G, const Involution& s, const ElementSet& K) {
  require(is_normal(G, K) && is_invariant(s, K), "check_quotient_lemmas: K must be normal and sigma-invariant");
  const auto Q = quotient(G, K);
  const Involution sQ = induced_involution(Q, s);
  QuotientLemmas r;
  std::vector<char> hit(Q.group.order(), 0);
  for (int z : z_set(G, s)) hit[Q.proj[z]] = 1;
  r.z_surjective = true;
  for (int z : z_set(Q.group, sQ))
    if (!hit[z]) r.z_surjective = false;
  std::size_t yk = 0;
  for (int k : K)
    if (s(k) == G.inv(k)) ++yk;
  r.y_kernel = yk * y_set(Q.group, sQ).size() == y_set(G, s).size();
  return r;
}

}  // namespace bbh
