#pragma once

// Smooth scalar functions on H_{n,m} with queryable mixed Wirtinger partials.
//
// Everything the operator layer manipulates is a SmoothMap: test functions,
// coefficient functions (entries of Y, V, R = Y^{-1}, ...), slashed functions,
// compositions with the group action, and operator outputs.  Partials are
// analytic throughout: closed-form for exponential-polynomial test functions,
// jet-propagated (mechanized chain rule) for coefficients and compositions.
// The finite-difference oracle lives in calculus.* and is used only to
// cross-check, never as the implementation.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "common.hpp"
#include "group.hpp"
#include "jet.hpp"
#include "point.hpp"

namespace sj {

class SmoothMap {
 public:
  virtual ~SmoothMap() = default;
  // Mixed partial d^{|mi|} f / prod du_c over the coordinate ids in mi
  // (sorted, repetitions allowed); mi = {} evaluates f.
  virtual cplx partial(const Point& x, const MultiIndex& mi) const = 0;
  cplx eval(const Point& x) const { return partial(x, {}); }
  // Highest derivative order supported.
  virtual int max_order() const = 0;
  // True if all antiholomorphic partials vanish identically.
  virtual bool holomorphic() const { return false; }
};

using MapPtr = std::shared_ptr<const SmoothMap>;

// --- basic combinators -----------------------------------------------------

MapPtr map_const(cplx v);
MapPtr map_scale(cplx s, MapPtr f);
MapPtr map_sum(std::vector<MapPtr> terms);
inline MapPtr map_add(MapPtr a, MapPtr b) { return map_sum({std::move(a), std::move(b)}); }
inline MapPtr map_sub(MapPtr a, MapPtr b) {
  return map_sum({std::move(a), map_scale(-1.0, std::move(b))});
}
MapPtr map_product(MapPtr a, MapPtr b);
MapPtr map_deriv(MapPtr f, int coord);            // d/du_coord
MapPtr map_deriv(MapPtr f, const MultiIndex& mi); // iterated
MapPtr map_conj(MapPtr f);

// --- exponential-polynomial test functions ---------------------------------
//
// f = (sparse polynomial of degree <= 2 in the coordinates) * exp(linear form).
// Closed under all Wirtinger derivatives with the same polynomial degree, so
// partials of any order are exact.
class ExpPolyMap : public SmoothMap {
 public:
  ExpPolyMap(CoordSystem cs, std::map<MultiIndex, cplx> poly,
             std::vector<cplx> lin);
  cplx partial(const Point& x, const MultiIndex& mi) const override;
  int max_order() const override { return 64; }
  bool holomorphic() const override;
  const CoordSystem& coords() const { return cs_; }

 private:
  ExpPolyMap deriv1(int c) const;
  CoordSystem cs_;
  std::map<MultiIndex, cplx> poly_;  // multi-index -> coefficient
  std::vector<cplx> lin_;            // exponent = sum lin_[c] * u_c
};

// Random instance; holo restricts dependence to holomorphic coordinates.
std::shared_ptr<const ExpPolyMap> random_exp_poly(const CoordSystem& cs,
                                                  std::uint64_t seed,
                                                  bool holo);

// --- jet-backed coefficient functions --------------------------------------

// Shared per-(point, degree) jet seeds and derived matrices: all coefficient
// maps at a point reuse one inversion of Y etc.
struct PointJets {
  JetSpacePtr big;    // 2H variables
  JetMat Z, W, Zb, Wb;  // seeded jets (symmetric Z handled: entry (i,j)=(j,i))
  JetMat Y, V, R;       // Y=(Z-Zb)/2i, V=(W-Wb)/2i, R=Y^{-1}
  Jet detY;
  static std::shared_ptr<const PointJets> get(const Point& x, int deg);
};

// A coefficient function given as a jet-arithmetic recipe; partials up to the
// declared order are read off the per-point jet.
class JetCoeffMap : public SmoothMap {
 public:
  using Recipe = std::function<Jet(const Point&, const PointJets&)>;
  JetCoeffMap(CoordSystem cs, Recipe r, int order, std::string tag);
  cplx partial(const Point& x, const MultiIndex& mi) const override;
  int max_order() const override { return order_; }

 private:
  CoordSystem cs_;
  Recipe recipe_;
  int order_;
  std::string tag_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Jet> cache_;
};

MapPtr make_coeff(const CoordSystem& cs, JetCoeffMap::Recipe r, int order,
                  std::string tag);

// --- composition with the group action -------------------------------------

// F o g as a SmoothMap; supports partials up to `order`.  Built per point by
// combining the Taylor jet of the (holomorphic) action components with the
// partials of F at g.x.
MapPtr compose_with_action(MapPtr F, GroupElement g, int order);

// Reciprocal automorphy factor x -> J_{k,M}(g,x)^{-1} as a holomorphic map.
MapPtr automorphy_reciprocal(GroupElement g, WeightIndex wi, int order);

// Slash action (f |_{k,M} g)(x) = J_{k,M}(g,x)^{-1} f(g.x).
MapPtr slash(MapPtr f, const GroupElement& g, const WeightIndex& wi, int order);

}  // namespace sj
