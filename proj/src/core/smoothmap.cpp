#include "smoothmap.hpp"

#include "rng.hpp"

#include <algorithm>

namespace sj {

namespace {

// ---- multiset helpers for the Leibniz rule --------------------------------

struct Run {
  int id;
  int count;
};

std::vector<Run> runs_of(const MultiIndex& mi) {
  std::vector<Run> r;
  for (int id : mi) {
    if (!r.empty() && r.back().id == id)
      ++r.back().count;
    else
      r.push_back({id, 1});
  }
  return r;
}

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

// Enumerate sub-multisets of mi; fn(sub, rest, multiplicity).
void for_each_split(const MultiIndex& mi,
                    const std::function<void(const MultiIndex&, const MultiIndex&,
                                             double)>& fn) {
  std::vector<Run> runs = runs_of(mi);
  MultiIndex sub, rest;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double coeff) {
    if (i == runs.size()) {
      fn(sub, rest, coeff);
      return;
    }
    for (int take = 0; take <= runs[i].count; ++take) {
      std::size_t s0 = sub.size(), r0 = rest.size();
      for (int t = 0; t < take; ++t) sub.push_back(runs[i].id);
      for (int t = 0; t < runs[i].count - take; ++t) rest.push_back(runs[i].id);
      rec(i + 1, coeff * binom(runs[i].count, take));
      sub.resize(s0);
      rest.resize(r0);
    }
  };
  rec(0, 1.0);
}

bool has_antiholo(const MultiIndex& mi, int H) {
  for (int id : mi)
    if (id >= H) return true;
  return false;
}

// ---- elementary combinator classes ----------------------------------------

class ConstMap : public SmoothMap {
 public:
  explicit ConstMap(cplx v) : v_(v) {}
  cplx partial(const Point&, const MultiIndex& mi) const override {
    return mi.empty() ? v_ : cplx(0.0, 0.0);
  }
  int max_order() const override { return 64; }
  bool holomorphic() const override { return true; }

 private:
  cplx v_;
};

class ScaleMap : public SmoothMap {
 public:
  ScaleMap(cplx s, MapPtr f) : s_(s), f_(std::move(f)) {}
  cplx partial(const Point& x, const MultiIndex& mi) const override {
    return s_ * f_->partial(x, mi);
  }
  int max_order() const override { return f_->max_order(); }
  bool holomorphic() const override { return f_->holomorphic(); }

 private:
  cplx s_;
  MapPtr f_;
};

class SumMap : public SmoothMap {
 public:
  explicit SumMap(std::vector<MapPtr> t) : t_(std::move(t)) {
    ord_ = 64;
    holo_ = true;
    for (auto& f : t_) {
      ord_ = std::min(ord_, f->max_order());
      holo_ = holo_ && f->holomorphic();
    }
  }
  cplx partial(const Point& x, const MultiIndex& mi) const override {
    cplx acc{0.0, 0.0};
    for (auto& f : t_) acc += f->partial(x, mi);
    return acc;
  }
  int max_order() const override { return ord_; }
  bool holomorphic() const override { return holo_; }

 private:
  std::vector<MapPtr> t_;
  int ord_;
  bool holo_;
};

class ProductMap : public SmoothMap {
 public:
  ProductMap(MapPtr a, MapPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  cplx partial(const Point& x, const MultiIndex& mi) const override {
    cplx acc{0.0, 0.0};
    for_each_split(mi, [&](const MultiIndex& sub, const MultiIndex& rest,
                           double w) {
      int H = x.coords().H;
      if (a_->holomorphic() && has_antiholo(sub, H)) return;
      if (b_->holomorphic() && has_antiholo(rest, H)) return;
      cplx av = a_->partial(x, sub);
      if (av == cplx(0.0, 0.0)) return;
      acc += w * av * b_->partial(x, rest);
    });
    return acc;
  }
  int max_order() const override {
    return std::min(a_->max_order(), b_->max_order());
  }
  bool holomorphic() const override {
    return a_->holomorphic() && b_->holomorphic();
  }

 private:
  MapPtr a_, b_;
};

class DerivMap : public SmoothMap {
 public:
  DerivMap(MapPtr f, MultiIndex base) : f_(std::move(f)), base_(mi_sorted(std::move(base))) {}
  cplx partial(const Point& x, const MultiIndex& mi) const override {
    MultiIndex all = base_;
    all.insert(all.end(), mi.begin(), mi.end());
    std::sort(all.begin(), all.end());
    if (f_->holomorphic() && has_antiholo(all, x.coords().H)) return {0.0, 0.0};
    return f_->partial(x, all);
  }
  int max_order() const override {
    return f_->max_order() - static_cast<int>(base_.size());
  }
  bool holomorphic() const override { return f_->holomorphic(); }

 private:
  MapPtr f_;
  MultiIndex base_;
};

class ConjMap : public SmoothMap {
 public:
  explicit ConjMap(MapPtr f) : f_(std::move(f)) {}
  cplx partial(const Point& x, const MultiIndex& mi) const override {
    MultiIndex flipped;
    flipped.reserve(mi.size());
    for (int id : mi) flipped.push_back(x.coords().conj(id));
    std::sort(flipped.begin(), flipped.end());
    return std::conj(f_->partial(x, flipped));
  }
  int max_order() const override { return f_->max_order(); }

 private:
  MapPtr f_;
};

}  // namespace

MapPtr map_const(cplx v) { return std::make_shared<ConstMap>(v); }
MapPtr map_scale(cplx s, MapPtr f) {
  return std::make_shared<ScaleMap>(s, std::move(f));
}
MapPtr map_sum(std::vector<MapPtr> terms) {
  return std::make_shared<SumMap>(std::move(terms));
}
MapPtr map_product(MapPtr a, MapPtr b) {
  return std::make_shared<ProductMap>(std::move(a), std::move(b));
}
MapPtr map_deriv(MapPtr f, int coord) {
  return std::make_shared<DerivMap>(std::move(f), MultiIndex{coord});
}
MapPtr map_deriv(MapPtr f, const MultiIndex& mi) {
  return std::make_shared<DerivMap>(std::move(f), mi);
}
MapPtr map_conj(MapPtr f) { return std::make_shared<ConjMap>(std::move(f)); }

// ---- ExpPolyMap ------------------------------------------------------------

ExpPolyMap::ExpPolyMap(CoordSystem cs, std::map<MultiIndex, cplx> poly,
                       std::vector<cplx> lin)
    : cs_(cs), poly_(std::move(poly)), lin_(std::move(lin)) {
  if (static_cast<int>(lin_.size()) != cs_.total)
    throw invalid_input("ExpPolyMap: linear form size mismatch");
}

bool ExpPolyMap::holomorphic() const {
  for (int c = cs_.H; c < cs_.total; ++c)
    if (lin_[c] != cplx(0.0, 0.0)) return false;
  for (auto& [mon, coeff] : poly_) {
    (void)coeff;
    if (has_antiholo(mon, cs_.H)) return false;
  }
  return true;
}

ExpPolyMap ExpPolyMap::deriv1(int c) const {
  // d/du_c [ P * exp(L.u) ] = (dP/du_c + L_c P) exp(L.u)
  std::map<MultiIndex, cplx> p;
  for (auto& [mon, coeff] : poly_) {
    if (lin_[c] != cplx(0.0, 0.0)) p[mon] += lin_[c] * coeff;
    for (std::size_t i = 0; i < mon.size(); ++i) {
      if (mon[i] != c) continue;
      if (i > 0 && mon[i - 1] == c) continue;  // count each value once
      int mult = 0;
      for (int id : mon)
        if (id == c) ++mult;
      MultiIndex rest;
      bool removed = false;
      for (int id : mon) {
        if (id == c && !removed) {
          removed = true;
          continue;
        }
        rest.push_back(id);
      }
      p[rest] += static_cast<double>(mult) * coeff;
    }
  }
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == cplx(0.0, 0.0))
      it = p.erase(it);
    else
      ++it;
  }
  return ExpPolyMap(cs_, std::move(p), lin_);
}

cplx ExpPolyMap::partial(const Point& x, const MultiIndex& mi) const {
  if (!mi.empty()) {
    ExpPolyMap d = deriv1(mi.back());
    MultiIndex rest(mi.begin(), mi.end() - 1);
    return d.partial(x, rest);
  }
  cplx expo{0.0, 0.0};
  for (int c = 0; c < cs_.total; ++c)
    if (lin_[c] != cplx(0.0, 0.0)) expo += lin_[c] * x.coord(c);
  cplx pv{0.0, 0.0};
  for (auto& [mon, coeff] : poly_) {
    cplx t = coeff;
    for (int id : mon) t *= x.coord(id);
    pv += t;
  }
  return pv * std::exp(expo);
}

std::shared_ptr<const ExpPolyMap> random_exp_poly(const CoordSystem& cs,
                                                  std::uint64_t seed, bool holo) {
  Rng rng(mix_seed(seed, "exppoly"));
  int lim = holo ? cs.H : cs.total;
  std::vector<cplx> lin(cs.total, cplx(0.0, 0.0));
  for (int c = 0; c < lim; ++c)
    lin[c] = cplx(rng.unif(-0.25, 0.25), rng.unif(-0.25, 0.25));
  std::map<MultiIndex, cplx> poly;
  poly[{}] = cplx(rng.unif(0.5, 1.5), rng.unif(-0.5, 0.5));
  int extra = 2 + static_cast<int>(rng.unif_int(0, 2));
  for (int t = 0; t < extra; ++t) {
    int deg = static_cast<int>(rng.unif_int(1, 2));
    MultiIndex mon;
    for (int d = 0; d < deg; ++d)
      mon.push_back(static_cast<int>(rng.unif_int(0, lim - 1)));
    std::sort(mon.begin(), mon.end());
    poly[mon] += cplx(rng.unif(-1.0, 1.0), rng.unif(-1.0, 1.0));
  }
  return std::make_shared<ExpPolyMap>(cs, std::move(poly), std::move(lin));
}

// ---- PointJets -------------------------------------------------------------

namespace {
JetMat const_jetmat(const RMat& M, const JetSpacePtr& sp) {
  JetMat r(static_cast<int>(M.rows()), static_cast<int>(M.cols()), sp);
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) r(i, j) = Jet(sp, M(i, j));
  return r;
}
}  // namespace

std::shared_ptr<const PointJets> PointJets::get(const Point& x, int deg) {
  static std::mutex mu;
  static std::map<std::pair<std::string, int>, std::shared_ptr<const PointJets>>
      cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find({x.key(), deg});
    if (it != cache.end()) return it->second;
  }
  const CoordSystem& cs = x.coords();
  auto pj = std::make_shared<PointJets>();
  pj->big = JetSpace::get(cs.total, deg);
  const JetSpacePtr& sp = pj->big;
  int n = cs.n, m = cs.m;
  pj->Z = JetMat(n, n, sp);
  pj->Zb = JetMat(n, n, sp);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      int c = cs.z_index(i, j);
      Jet zj = Jet::variable(sp, c, x.Z()(i, j));
      Jet zbj = Jet::variable(sp, cs.conj(c), std::conj(x.Z()(i, j)));
      pj->Z(i, j) = zj;
      pj->Z(j, i) = zj;
      pj->Zb(i, j) = zbj;
      pj->Zb(j, i) = zbj;
    }
  pj->W = JetMat(m, n, sp);
  pj->Wb = JetMat(m, n, sp);
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < n; ++s) {
      int c = cs.w_index(r, s);
      pj->W(r, s) = Jet::variable(sp, c, x.W()(r, s));
      pj->Wb(r, s) = Jet::variable(sp, cs.conj(c), std::conj(x.W()(r, s)));
    }
  cplx half_i = cplx(0.0, -0.5);  // 1/(2i)
  pj->Y = (pj->Z - pj->Zb).scale(half_i);
  pj->V = (pj->W - pj->Wb).scale(half_i);
  pj->R = jet_inverse(pj->Y);
  pj->detY = jet_det(pj->Y);
  {
    std::lock_guard<std::mutex> lk(mu);
    if (cache.size() > 512) cache.clear();
    cache.emplace(std::make_pair(x.key(), deg), pj);
  }
  return pj;
}

// ---- JetCoeffMap -----------------------------------------------------------

JetCoeffMap::JetCoeffMap(CoordSystem cs, Recipe r, int order, std::string tag)
    : cs_(cs), recipe_(std::move(r)), order_(order), tag_(std::move(tag)) {}

cplx JetCoeffMap::partial(const Point& x, const MultiIndex& mi) const {
  if (static_cast<int>(mi.size()) > order_)
    throw numeric_guard("JetCoeffMap(" + tag_ + "): order beyond jet degree");
  Jet j;
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(x.key());
    if (it != cache_.end()) j = it->second;
  }
  if (!j.space()) {
    auto pj = PointJets::get(x, order_);
    j = recipe_(x, *pj);
    std::lock_guard<std::mutex> lk(mu_);
    if (cache_.size() > 4096) cache_.clear();
    cache_.emplace(x.key(), j);
  }
  std::vector<std::uint8_t> e(cs_.total, 0);
  for (int id : mi) ++e[id];
  return j.partial(e);
}

MapPtr make_coeff(const CoordSystem& cs, JetCoeffMap::Recipe r, int order,
                  std::string tag) {
  return std::make_shared<JetCoeffMap>(cs, std::move(r), order, std::move(tag));
}

// ---- composition with the group action ------------------------------------

namespace {

class ComposedMap : public SmoothMap {
 public:
  ComposedMap(MapPtr F, GroupElement g, int order)
      : F_(std::move(F)), g_(std::move(g)), order_(order),
        cs_(g_.n(), g_.m()) {}

  cplx partial(const Point& x, const MultiIndex& mi) const override {
    if (static_cast<int>(mi.size()) > order_)
      throw numeric_guard("ComposedMap: order beyond jet degree");
    if (F_->holomorphic() && has_antiholo(mi, cs_.H)) return {0.0, 0.0};
    Jet j;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = cache_.find(x.key());
      if (it != cache_.end()) j = it->second;
    }
    if (!j.space()) {
      j = build(x);
      std::lock_guard<std::mutex> lk(mu_);
      if (cache_.size() > 1024) cache_.clear();
      cache_.emplace(x.key(), j);
    }
    std::vector<std::uint8_t> e(cs_.total, 0);
    for (int id : mi) ++e[id];
    return j.partial(e);
  }
  int max_order() const override { return order_; }
  bool holomorphic() const override { return F_->holomorphic(); }

 private:
  Jet build(const Point& x) const {
    const int H = cs_.H, n = cs_.n, m = cs_.m;
    JetSpacePtr small = JetSpace::get(H, order_);
    JetSpacePtr big = JetSpace::get(2 * H, order_);

    // Holomorphic jets of the action components in the H holomorphic seeds.
    JetMat Zj(n, n, small), Wj(m, n, small);
    for (int i = 0; i < n; ++i)
      for (int j2 = i; j2 < n; ++j2) {
        Jet v = Jet::variable(small, cs_.z_index(i, j2), x.Z()(i, j2));
        Zj(i, j2) = v;
        Zj(j2, i) = v;
      }
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < n; ++s)
        Wj(r, s) = Jet::variable(small, cs_.w_index(r, s), x.W()(r, s));

    JetMat CZD = const_jetmat(g_.C(), small) * Zj + const_jetmat(g_.D(), small);
    JetMat CZDi = jet_inverse(CZD);
    JetMat Zt = (const_jetmat(g_.A(), small) * Zj + const_jetmat(g_.B(), small)) *
                CZDi;
    JetMat Wt =
        (Wj + const_jetmat(g_.lam(), small) * Zj + const_jetmat(g_.mu(), small)) *
        CZDi;

    // Base point from the jet values themselves so the Taylor data and the
    // evaluation point of F agree to the last bit.
    Mat Zv(n, n), Wv(m, n);
    for (int i = 0; i < n; ++i)
      for (int j2 = 0; j2 < n; ++j2) Zv(i, j2) = Zt(i, j2).value();
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < n; ++s) Wv(r, s) = Wt(r, s).value();
    Point xt(Zv, Wv, 1e-9, 1e-12);

    // Centered component jets indexed by tilde coordinate.
    std::vector<Jet> comp(H);
    for (int i = 0; i < n; ++i)
      for (int j2 = i; j2 < n; ++j2) {
        Jet c = Zt(i, j2);
        comp[cs_.z_index(i, j2)] = c - c.value();
      }
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < n; ++s) {
        Jet c = Wt(r, s);
        comp[cs_.w_index(r, s)] = c - c.value();
      }

    // dp[idx] = product over tilde-monomial idx of centered components.
    const JetSpace& S = *small;
    std::vector<Jet> dp(S.size);
    dp[0] = Jet(small, 1.0);
    std::vector<std::uint8_t> e(H);
    for (int idx = 1; idx < S.size; ++idx) {
      int v = 0;
      while (S.mons[idx][v] == 0) ++v;
      e.assign(S.mons[idx].begin(), S.mons[idx].end());
      --e[v];
      int parent = S.index_of(e);
      dp[idx] = dp[parent] * comp[v];
    }

    bool holoF = F_->holomorphic();
    Jet result = Jet::zero(big);
    MultiIndex fmi;
    for (int ih = 0; ih < S.size; ++ih) {
      int dh = S.degree_of(ih);
      for (int ia = 0; ia < S.size; ++ia) {
        if (holoF && ia != 0) break;
        if (dh + S.degree_of(ia) > order_) continue;
        fmi.clear();
        for (int v = 0; v < H; ++v) {
          for (int t = 0; t < S.mons[ih][v]; ++t) fmi.push_back(v);
          for (int t = 0; t < S.mons[ia][v]; ++t) fmi.push_back(H + v);
        }
        std::sort(fmi.begin(), fmi.end());
        cplx fp = F_->partial(xt, fmi);
        if (fp == cplx(0.0, 0.0)) continue;
        cplx w = fp / (S.fact[ih] * S.fact[ia]);
        if (ia == 0) {
          // Fast path: embed dp[ih] (holo vars occupy the first H slots).
          cross_accumulate(dp[ih], dp[0], w, result);
        } else {
          cross_accumulate(dp[ih], dp[ia].conjugate_coeffs(), w, result);
        }
      }
    }
    return result;
  }

  MapPtr F_;
  GroupElement g_;
  int order_;
  CoordSystem cs_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Jet> cache_;
};

class AutomorphyReciprocalMap : public SmoothMap {
 public:
  AutomorphyReciprocalMap(GroupElement g, WeightIndex wi, int order)
      : g_(std::move(g)), wi_(std::move(wi)), order_(order),
        cs_(g_.n(), g_.m()) {}

  cplx partial(const Point& x, const MultiIndex& mi) const override {
    if (static_cast<int>(mi.size()) > order_)
      throw numeric_guard("AutomorphyReciprocalMap: order beyond jet degree");
    if (has_antiholo(mi, cs_.H)) return {0.0, 0.0};
    Jet j;
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = cache_.find(x.key());
      if (it != cache_.end()) j = it->second;
    }
    if (!j.space()) {
      j = build(x);
      std::lock_guard<std::mutex> lk(mu_);
      if (cache_.size() > 1024) cache_.clear();
      cache_.emplace(x.key(), j);
    }
    std::vector<std::uint8_t> e(cs_.H, 0);
    for (int id : mi) ++e[id];
    return j.partial(e);
  }
  int max_order() const override { return order_; }
  bool holomorphic() const override { return true; }

 private:
  Jet build(const Point& x) const {
    const int H = cs_.H, n = cs_.n, m = cs_.m;
    JetSpacePtr small = JetSpace::get(H, order_);
    JetMat Zj(n, n, small), Wj(m, n, small);
    for (int i = 0; i < n; ++i)
      for (int j2 = i; j2 < n; ++j2) {
        Jet v = Jet::variable(small, cs_.z_index(i, j2), x.Z()(i, j2));
        Zj(i, j2) = v;
        Zj(j2, i) = v;
      }
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < n; ++s)
        Wj(r, s) = Jet::variable(small, cs_.w_index(r, s), x.W()(r, s));

    JetMat CZD = const_jetmat(g_.C(), small) * Zj + const_jetmat(g_.D(), small);
    Jet detk = jet_det(CZD).pow_int(wi_.k);
    JetMat lamj = const_jetmat(g_.lam(), small);
    JetMat muj = const_jetmat(g_.mu(), small);
    JetMat Mj = const_jetmat(wi_.M, small);
    // Same exact-cocycle exponent as GroupElement::automorphy.
    JetMat Wf = Wj + lamj * Zj + muj;
    JetMat E = Wf * jet_inverse(CZD) * const_jetmat(g_.C(), small) *
                   Wf.transpose() -
               (lamj * Zj * lamj.transpose() +
                (lamj * Wj.transpose()).scale(cplx(2.0, 0.0)) +
                muj * lamj.transpose() + const_jetmat(g_.kappa(), small));
    Jet tr = (Mj * E).trace();
    Jet J = detk * (tr * (2.0 * kPi * kI)).exp();
    return J.reciprocal();
  }

  GroupElement g_;
  WeightIndex wi_;
  int order_;
  CoordSystem cs_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Jet> cache_;
};

}  // namespace

MapPtr compose_with_action(MapPtr F, GroupElement g, int order) {
  return std::make_shared<ComposedMap>(std::move(F), std::move(g), order);
}

MapPtr automorphy_reciprocal(GroupElement g, WeightIndex wi, int order) {
  return std::make_shared<AutomorphyReciprocalMap>(std::move(g), std::move(wi),
                                                   order);
}

MapPtr slash(MapPtr f, const GroupElement& g, const WeightIndex& wi, int order) {
  return map_product(automorphy_reciprocal(g, wi, order),
                     compose_with_action(std::move(f), g, order));
}

}  // namespace sj
