#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gsi/models.hpp"
#include "gsi/subset.hpp"

namespace gsi {

/// Structural class of a weight matrix. The kind never changes the estimand;
/// it selects the per-sample form the engine may use and records how the
/// matrix was composed for round-trip serialization.
enum class SpecKind {
  General,       // arbitrary sparse matrix
  Square,        // lambda * lambda^T, nonnegative per-sample form
  SumOfSquares,  // sum of square terms
  Bilinear,      // lambda * gamma^T
};

inline std::string to_string(SpecKind k) {
  switch (k) {
    case SpecKind::General: return "general";
    case SpecKind::Square: return "square";
    case SpecKind::SumOfSquares: return "sum_of_squares";
    case SpecKind::Bilinear: return "bilinear";
  }
  throw std::invalid_argument("to_string: unknown SpecKind");
}

inline SpecKind spec_kind_from_string(std::string_view s) {
  if (s == "general") return SpecKind::General;
  if (s == "square") return SpecKind::Square;
  if (s == "sum_of_squares") return SpecKind::SumOfSquares;
  if (s == "bilinear") return SpecKind::Bilinear;
  throw std::invalid_argument("unknown spec kind '" + std::string(s) + "'");
}

/// (row subset u, column subset v) addressing one weight of the matrix.
using WeightKey = std::pair<SubsetMask, SubsetMask>;
using WeightMap = std::map<WeightKey, double>;

/// A generalized sensitivity index: the quantity
///   scale * sum_{u,v} Omega_{uv} * Cov(f(x_u:z_{-u}), f(x_v:z_{-v}))
/// encoded by the sparse matrix Omega. For contrast matrices (weights sum
/// to zero) the covariances can be replaced by plain cross moments.
class GsiSpec {
 public:
  static GsiSpec general(int dim, WeightMap weights, double scale = 1.0) {
    GsiSpec s(dim, scale, SpecKind::General);
    for (auto& [key, w] : weights) s.add_weight(key.first, key.second, w);
    s.finish();
    return s;
  }

  static GsiSpec bilinear(int dim, IndexMap lambda, IndexMap gamma, double scale = 1.0) {
    GsiSpec s(dim, scale, SpecKind::Bilinear);
    drop_zeros(lambda);
    drop_zeros(gamma);
    require_factor(dim, lambda, "lambda");
    require_factor(dim, gamma, "gamma");
    for (const auto& [u, lu] : lambda)
      for (const auto& [v, gv] : gamma) s.add_weight(u, v, lu * gv);
    s.lambda_ = std::move(lambda);
    s.gamma_ = std::move(gamma);
    s.finish();
    return s;
  }

  static GsiSpec square(int dim, IndexMap lambda, double scale = 1.0) {
    return sum_of_squares_impl(dim, {std::move(lambda)}, scale, SpecKind::Square);
  }

  static GsiSpec sum_of_squares(int dim, std::vector<IndexMap> terms, double scale = 1.0) {
    return sum_of_squares_impl(dim, std::move(terms), scale, SpecKind::SumOfSquares);
  }

  /// One-row or one-column matrix: weights lambda_v placed at (v, anchor)
  /// when the anchor is the column, at (anchor, v) otherwise. This is the
  /// bilinear factorization with a unit vector on the anchor side.
  static GsiSpec compose_simple(int dim, const SubsetMask& anchor, IndexMap lambda,
                                bool anchor_is_column = true, double scale = 1.0) {
    IndexMap unit{{anchor, 1.0}};
    return anchor_is_column ? bilinear(dim, std::move(lambda), std::move(unit), scale)
                            : bilinear(dim, std::move(unit), std::move(lambda), scale);
  }

  int dimension() const { return dim_; }
  double scale() const { return scale_; }
  SpecKind kind() const { return kind_; }
  const WeightMap& weights() const { return weights_; }
  const IndexMap& lambda() const { return lambda_; }
  const IndexMap& gamma() const { return gamma_; }
  const std::vector<IndexMap>& square_terms() const { return squares_; }
  std::size_t entry_count() const { return weights_.size(); }

  double coefficient_total() const {
    double acc = 0.0;
    for (const auto& [key, w] : weights_) acc += w;
    return acc;
  }

  /// Contrast matrices estimate a variance quantity without a mean
  /// correction; detection is by total weight, up to rounding in the
  /// composed products.
  bool is_contrast() const {
    double total = 0.0, mass = 0.0;
    for (const auto& [key, w] : weights_) {
      total += w;
      mass += std::abs(w);
    }
    return std::abs(total) <= 1e-12 * std::max(1.0, mass);
  }

  /// Distinct hybrid points needed per sample pair: the union of row and
  /// column supports.
  std::vector<SubsetMask> support() const {
    std::set<SubsetMask> s;
    for (const auto& [key, w] : weights_) {
      s.insert(key.first);
      s.insert(key.second);
    }
    return {s.begin(), s.end()};
  }

  /// Model evaluations per sample pair.
  int cost() const { return static_cast<int>(support().size()); }

  /// Size proxy for sampling variance comparisons between designs with the
  /// same estimand: the squared Frobenius norm of the weights. The scale is
  /// excluded on purpose so rescaled encodings of one design compare equal.
  double proxy_variance() const {
    double acc = 0.0;
    for (const auto& [key, w] : weights_) acc += w * w;
    return acc;
  }

  double cost_times_proxy() const { return cost() * proxy_variance(); }

 private:
  GsiSpec(int dim, double scale, SpecKind kind) : dim_(dim), scale_(scale), kind_(kind) {
    if (dim < 1 || dim > kMaxDimension)
      throw std::invalid_argument("GsiSpec: dimension must be in [1," +
                                  std::to_string(kMaxDimension) + "]");
    if (!std::isfinite(scale))
      throw std::invalid_argument("GsiSpec: scale must be finite");
  }

  static GsiSpec sum_of_squares_impl(int dim, std::vector<IndexMap> terms, double scale,
                                     SpecKind kind) {
    GsiSpec s(dim, scale, kind);
    for (IndexMap& lam : terms) {
      drop_zeros(lam);
      require_factor(dim, lam, "square term");
      for (const auto& [u, lu] : lam)
        for (const auto& [v, lv] : lam) s.add_weight(u, v, lu * lv);
    }
    s.squares_ = std::move(terms);
    s.finish();
    return s;
  }

  static void drop_zeros(IndexMap& m) {
    for (auto it = m.begin(); it != m.end();)
      it = (it->second == 0.0) ? m.erase(it) : std::next(it);
  }

  static void require_factor(int dim, const IndexMap& m, const char* what) {
    if (m.empty())
      throw std::invalid_argument(std::string("GsiSpec: ") + what +
                                  " has no nonzero coefficients");
    for (const auto& [u, w] : m) {
      if (u.dimension() != dim)
        throw dimension_mismatch(std::string("GsiSpec: ") + what + " entry " + u.str() +
                                 " has dimension " + std::to_string(u.dimension()) +
                                 ", spec has " + std::to_string(dim));
      if (!std::isfinite(w))
        throw std::invalid_argument(std::string("GsiSpec: ") + what +
                                    " has a non-finite coefficient");
    }
  }

  void add_weight(const SubsetMask& u, const SubsetMask& v, double w) {
    if (u.dimension() != dim_ || v.dimension() != dim_)
      throw dimension_mismatch("GsiSpec: weight at (" + u.str() + "," + v.str() +
                               ") does not match spec dimension " + std::to_string(dim_));
    if (!std::isfinite(w))
      throw std::invalid_argument("GsiSpec: non-finite weight at (" + u.str() + "," +
                                  v.str() + ")");
    if (w == 0.0) return;
    weights_[{u, v}] += w;
  }

  void finish() {
    for (auto it = weights_.begin(); it != weights_.end();)
      it = (it->second == 0.0) ? weights_.erase(it) : std::next(it);
    if (weights_.empty())
      throw std::invalid_argument("GsiSpec: weight matrix is identically zero");
  }

  int dim_;
  double scale_;
  SpecKind kind_;
  WeightMap weights_;
  IndexMap lambda_, gamma_;
  std::vector<IndexMap> squares_;
};

/// Evaluations per sample pair when several indices are estimated from one
/// set of hybrid points.
inline int batch_cost(std::span<const GsiSpec> specs) {
  std::set<SubsetMask> s;
  for (const GsiSpec& spec : specs)
    for (const SubsetMask& u : spec.support()) s.insert(u);
  return static_cast<int>(s.size());
}

/// Exact value of the index on a model with known moments, through the
/// cross-moment identity E[F_u F_v] = mean^2 + lower(nxor(u, v)). The
/// mean^2 part contributes coefficient_total() * mean^2, which is zero for
/// contrasts and is subtracted off by definition otherwise, so the estimand
/// is the lower-index sum either way.
inline double expected_value(const GsiSpec& spec, const ExactMoments& m) {
  double acc = 0.0;
  for (const auto& [key, w] : spec.weights()) {
    const SubsetMask k = nxor_set(key.first, key.second);
    auto it = m.lower.find(k);
    if (it == m.lower.end())
      throw std::out_of_range("expected_value: moments table lacks subset " + k.str());
    acc += w * it->second;
  }
  return spec.scale() * acc;
}

}  // namespace gsi
