#pragma once

// The radial blow-up map F_eps of the regularized cloak and the pushforward
// of diffusivity tensors and densities under a change of variables.

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <utility>
#include <stdexcept>

namespace heatcloak {

template <int D>
using Point = Eigen::Matrix<double, D, 1>;

template <int D>
using SymTensor = Eigen::Matrix<double, D, D>;

class DegenerateJacobian : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double jacobian_floor = 1e-14;

/// F_eps: x/eps on B_eps, an affine radial profile on B_2 \ B_eps, identity
/// outside B_2. Sends B_eps onto B_1 and fixes R^d \ B_2.
///
/// On the interfaces |x| = eps and |x| = 2 the outer-side branch is used.
template <int D>
class BlowupMap {
  static_assert(D == 2 || D == 3, "the cloak is built in two or three dimensions");

public:
  static constexpr int dimension = D;

  explicit BlowupMap(double epsilon) : eps_(epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 0.5))
      throw std::invalid_argument("BlowupMap: epsilon must lie in (0, 1/2]");
  }

  double epsilon() const { return eps_; }

  // Radial profile f(r) with F(x) = f(|x|) x/|x|, and its derivative.
  double profile(double r) const {
    if (r >= 2.0) return r;
    if (r >= eps_) return (2.0 - 2.0 * eps_) / (2.0 - eps_) + r / (2.0 - eps_);
    return r / eps_;
  }

  double profile_slope(double r) const {
    if (r >= 2.0) return 1.0;
    if (r >= eps_) return 1.0 / (2.0 - eps_);
    return 1.0 / eps_;
  }

  double inverse_profile(double s) const {
    if (s >= 2.0) return s;
    if (s >= 1.0) return (2.0 - eps_) * s - (2.0 - 2.0 * eps_);
    return s * eps_;
  }

  Point<D> forward(const Point<D>& x) const {
    const double r = x.norm();
    if (r >= 2.0) return x;
    if (r < eps_) return x / eps_;
    return (profile(r) / r) * x;
  }

  Point<D> inverse(const Point<D>& y) const {
    const double s = y.norm();
    if (s >= 2.0) return y;
    if (s < 1.0) return eps_ * y;
    return (inverse_profile(s) / s) * y;
  }

  /// Analytic Jacobian: f'(r) along x/|x|, f(r)/r tangentially.
  SymTensor<D> jacobian(const Point<D>& x) const {
    const double r = x.norm();
    if (r >= 2.0) return SymTensor<D>::Identity();
    if (r < eps_) return SymTensor<D>::Identity() / eps_;
    const Point<D> n = x / r;
    const double radial = profile_slope(r);
    const double tangential = profile(r) / r;
    return tangential * SymTensor<D>::Identity() + (radial - tangential) * n * n.transpose();
  }

private:
  double eps_;
};

/// Linear change of variables x -> B x. Used for scaling maps and tests.
template <int D>
class LinearMap {
public:
  static constexpr int dimension = D;
  explicit LinearMap(const SymTensor<D>& matrix) : matrix_(matrix), inverse_(matrix.inverse()) {}

  static LinearMap scaling(double factor) { return LinearMap(factor * SymTensor<D>::Identity()); }

  Point<D> forward(const Point<D>& x) const { return matrix_ * x; }
  Point<D> inverse(const Point<D>& y) const { return inverse_ * y; }
  SymTensor<D> jacobian(const Point<D>&) const { return matrix_; }

private:
  SymTensor<D> matrix_;
  SymTensor<D> inverse_;
};

/// G after F.
template <class Outer, class Inner>
class ComposedMap {
public:
  static constexpr int dimension = Inner::dimension;
  using P = Point<dimension>;
  using M = SymTensor<dimension>;

  ComposedMap(Outer outer, Inner inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}

  P forward(const P& x) const { return outer_.forward(inner_.forward(x)); }
  P inverse(const P& y) const { return inner_.inverse(outer_.inverse(y)); }
  M jacobian(const P& x) const { return outer_.jacobian(inner_.forward(x)) * inner_.jacobian(x); }

private:
  Outer outer_;
  Inner inner_;
};

template <class Map>
concept ChangeOfVariables = requires(const Map& m, const Point<Map::dimension>& p) {
  { m.forward(p) } -> std::convertible_to<Point<Map::dimension>>;
  { m.inverse(p) } -> std::convertible_to<Point<Map::dimension>>;
  { m.jacobian(p) } -> std::convertible_to<SymTensor<Map::dimension>>;
};

/// F_*A(y) = ∇F A ∇Fᵀ / |det ∇F| evaluated at x = F⁻¹(y).
///
/// `tensor` is a callable x -> SymTensor. The result is symmetrized to
/// remove roundoff asymmetry.
template <ChangeOfVariables Map, class TensorFn>
SymTensor<Map::dimension> push_forward_tensor(const TensorFn& tensor, const Map& map,
                                              const Point<Map::dimension>& y) {
  const auto x = map.inverse(y);
  const auto jac = map.jacobian(x);
  const double det = std::abs(jac.determinant());
  if (det < jacobian_floor) throw DegenerateJacobian("push_forward_tensor: |det DF| below floor");
  SymTensor<Map::dimension> out = jac * tensor(x) * jac.transpose() / det;
  return 0.5 * (out + out.transpose());
}

/// F_*rho(y) = rho(x) / |det ∇F(x)|, x = F⁻¹(y).
template <ChangeOfVariables Map, class DensityFn>
double push_forward_density(const DensityFn& density, const Map& map,
                            const Point<Map::dimension>& y) {
  const auto x = map.inverse(y);
  const double det = std::abs(map.jacobian(x).determinant());
  if (det < jacobian_floor) throw DegenerateJacobian("push_forward_density: |det DF| below floor");
  return density(x) / det;
}

}  // namespace heatcloak
