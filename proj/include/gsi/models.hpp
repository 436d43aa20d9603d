#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gsi/subset.hpp"

namespace gsi {

/// Models evaluate a point of [0,1]^d. Everything downstream (estimators,
/// studies, the CLI) is generic over this shape.
template <class M>
concept EvaluableModel = requires(const M& m, std::span<const double> x) {
  { m.dimension() } -> std::convertible_to<int>;
  { m.eval(x) } -> std::convertible_to<double>;
};

namespace detail {

inline void require_point(std::span<const double> x, int d, const char* what) {
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument(std::string(what) + ": point has length " +
                                std::to_string(x.size()) + ", model dimension is " +
                                std::to_string(d));
  for (double c : x)
    if (!(c >= 0.0 && c <= 1.0))
      throw std::out_of_range(std::string(what) + ": coordinate " +
                              std::to_string(c) + " outside [0,1]");
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

}  // namespace detail

/// f(x) = prod_j (mu_j + tau_j * g(x_j)) with g centered (integral 0) and
/// normalized (integral of g^2 is 1). The default base function is
/// g(x) = sqrt(12) (x - 1/2). Every global sensitivity quantity of interest
/// has a closed form, which makes this the main calibration model.
class ProductModel {
 public:
  ProductModel(std::vector<double> mu, std::vector<double> tau)
      : mu_(std::move(mu)), tau_(std::move(tau)) {
    validate_sizes();
  }

  /// A custom base function must satisfy the centering/normalization
  /// conditions; they are checked by quadrature at registration.
  ProductModel(std::vector<double> mu, std::vector<double> tau,
               std::function<double(double)> g)
      : mu_(std::move(mu)), tau_(std::move(tau)), custom_g_(std::move(g)) {
    validate_sizes();
    validate_base(custom_g_);
  }

  int dimension() const { return static_cast<int>(mu_.size()); }

  double eval(std::span<const double> x) const {
    detail::require_point(x, dimension(), "ProductModel::eval");
    double out = 1.0;
    if (custom_g_) {
      for (int j = 0; j < dimension(); ++j)
        out *= mu_[std::size_t(j)] + tau_[std::size_t(j)] * custom_g_(x[std::size_t(j)]);
    } else {
      for (int j = 0; j < dimension(); ++j)
        out *= mu_[std::size_t(j)] + tau_[std::size_t(j)] * kRoot12 * (x[std::size_t(j)] - 0.5);
    }
    return out;
  }

  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& tau() const { return tau_; }

  // Exact quantities. With m2_j = mu_j^2 and t2_j = tau_j^2:
  //   mean            = prod mu_j
  //   sigma2_u        = prod_{j in u} t2_j * prod_{j not in u} m2_j   (u nonempty)
  //   lower lt2_u     = prod_{j not in u} m2_j * prod_{j in u}(m2_j + t2_j) - prod m2_j
  //   upper ut2_u     = total - lt2_{-u}
  //   superset ups2_w = prod_{j in w} t2_j * prod_{j not in w}(m2_j + t2_j)

  double mean() const {
    double out = 1.0;
    for (double m : mu_) out *= m;
    return out;
  }

  double total_variance() const {
    double full = 1.0, m2 = 1.0;
    for (int j = 0; j < dimension(); ++j) {
      full *= sq(mu_[std::size_t(j)]) + sq(tau_[std::size_t(j)]);
      m2 *= sq(mu_[std::size_t(j)]);
    }
    return full - m2;
  }

  double variance_component(const SubsetMask& u) const {
    require_dim(u);
    if (u.empty()) return 0.0;
    double out = 1.0;
    for (int j = 1; j <= dimension(); ++j)
      out *= u.contains(j) ? sq(tau_[std::size_t(j - 1)]) : sq(mu_[std::size_t(j - 1)]);
    return out;
  }

  double lower_index(const SubsetMask& u) const {
    require_dim(u);
    double with = 1.0, m2 = 1.0;
    for (int j = 1; j <= dimension(); ++j) {
      const double mj2 = sq(mu_[std::size_t(j - 1)]);
      with *= u.contains(j) ? mj2 + sq(tau_[std::size_t(j - 1)]) : mj2;
      m2 *= mj2;
    }
    return with - m2;
  }

  double upper_index(const SubsetMask& u) const {
    return total_variance() - lower_index(complement(u));
  }

  double superset_importance(const SubsetMask& w) const {
    require_dim(w);
    double out = 1.0;
    for (int j = 1; j <= dimension(); ++j) {
      const double m2 = sq(mu_[std::size_t(j - 1)]), t2 = sq(tau_[std::size_t(j - 1)]);
      out *= w.contains(j) ? t2 : m2 + t2;
    }
    return out;
  }

  /// sum_u |u| sigma2_u / sigma2 = sum_j ut2_{j} / sigma2.
  double mean_dimension() const {
    const double total = total_variance();
    if (total == 0.0)
      throw std::domain_error("ProductModel::mean_dimension: model is constant");
    double acc = 0.0;
    for (int j = 1; j <= dimension(); ++j)
      acc += total - lower_index(complement(SubsetMask::singleton(j, dimension())));
    return acc / total;
  }

 private:
  static constexpr double kRoot12 = 3.4641016151377543863;  // sqrt(12)

  static double sq(double v) { return v * v; }

  void require_dim(const SubsetMask& u) const {
    if (u.dimension() != dimension())
      throw dimension_mismatch("ProductModel: subset dimension " +
                               std::to_string(u.dimension()) + " != model dimension " +
                               std::to_string(dimension()));
  }

  void validate_sizes() const {
    if (mu_.empty() || mu_.size() != tau_.size())
      throw std::invalid_argument("ProductModel: mu and tau must be nonempty and equal length");
    if (static_cast<int>(mu_.size()) > kMaxDimension)
      throw std::invalid_argument("ProductModel: dimension exceeds " +
                                  std::to_string(kMaxDimension));
  }

  // Midpoint-rule check of the base-function conditions; 1e4 nodes gives
  // far more accuracy than the 1e-3 gate for any smooth g.
  static void validate_base(const std::function<double(double)>& g) {
    if (!g) throw std::invalid_argument("ProductModel: null base function");
    constexpr int n = 10'000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = g((i + 0.5) / n);
      s1 += v;
      s2 += v * v;
      s4 += v * v * v * v;
    }
    s1 /= n; s2 /= n; s4 /= n;
    if (!std::isfinite(s4))
      throw std::invalid_argument("ProductModel: base function has non-finite fourth moment");
    if (std::abs(s1) > 1e-3)
      throw std::invalid_argument("ProductModel: base function integral is " +
                                  std::to_string(s1) + ", expected 0");
    if (std::abs(s2 - 1.0) > 1e-3)
      throw std::invalid_argument("ProductModel: base function second moment is " +
                                  std::to_string(s2) + ", expected 1");
  }

  std::vector<double> mu_, tau_;
  std::function<double(double)> custom_g_;
};

/// f(x) = min_j x_j. Lower indices have the closed form
///   lt2_u = |u| / ((d+1)^2 (2d - |u| + 2)),
/// and everything else follows by subset sums that collapse to binomial
/// sums because lt2 depends on |u| only.
class MinModel {
 public:
  explicit MinModel(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDimension)
      throw std::invalid_argument("MinModel: dimension must be in [1," +
                                  std::to_string(kMaxDimension) + "]");
  }

  int dimension() const { return dim_; }

  double eval(std::span<const double> x) const {
    detail::require_point(x, dim_, "MinModel::eval");
    double out = x[0];
    for (double c : x.subspan(1)) out = std::min(out, c);
    return out;
  }

  double mean() const { return 1.0 / (dim_ + 1); }

  double total_variance() const { return lower_by_card(dim_); }

  double lower_index(const SubsetMask& u) const {
    require_dim(u);
    return lower_by_card(u.cardinality());
  }

  double upper_index(const SubsetMask& u) const {
    require_dim(u);
    return total_variance() - lower_by_card(dim_ - u.cardinality());
  }

  /// sigma2_u depends on |u| only; the alternating subset sum over v in u
  /// groups by cardinality into binomial coefficients.
  double variance_component(const SubsetMask& u) const {
    require_dim(u);
    return sigma_by_card(u.cardinality());
  }

  double superset_importance(const SubsetMask& w) const {
    require_dim(w);
    const int k = w.cardinality();
    double acc = 0.0;
    for (int t = std::max(k, 1); t <= dim_; ++t)
      acc += detail::binomial(dim_ - k, t - k) * sigma_by_card(t);
    return acc;
  }

  double mean_dimension() const {
    const double total = total_variance();
    return dim_ * (total - lower_by_card(dim_ - 1)) / total;
  }

 private:
  double lower_by_card(int k) const {
    const double dp1 = dim_ + 1.0;
    return k / (dp1 * dp1 * (2.0 * dim_ - k + 2.0));
  }

  double sigma_by_card(int k) const {
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) {
      const double term = detail::binomial(k, i) * lower_by_card(i);
      acc += ((k - i) & 1) ? -term : term;
    }
    return acc;
  }

  void require_dim(const SubsetMask& u) const {
    if (u.dimension() != dim_)
      throw dimension_mismatch("MinModel: subset dimension " +
                               std::to_string(u.dimension()) + " != model dimension " +
                               std::to_string(dim_));
  }

  int dim_;
};

/// Piecewise-constant function tabulated on the m^d lattice of equal cells.
/// Coordinate x_j selects cell floor(m * x_j), clamped to m-1 so x_j = 1 is
/// valid. Storage is row major with the last index fastest.
class GridFunction {
 public:
  GridFunction(int dim, int levels, std::vector<double> values)
      : dim_(dim), levels_(levels), values_(std::move(values)) {
    if (dim < 1 || dim > kMaxDimension)
      throw std::invalid_argument("GridFunction: dimension must be in [1," +
                                  std::to_string(kMaxDimension) + "]");
    if (levels < 2)
      throw std::invalid_argument("GridFunction: need at least 2 levels per axis");
    double expect = 1.0;
    for (int j = 0; j < dim; ++j) {
      expect *= levels;
      if (expect > 1e8)
        throw enumeration_limit("GridFunction: m^d table too large");
    }
    if (values_.size() != static_cast<std::size_t>(expect))
      throw std::invalid_argument("GridFunction: expected " +
                                  std::to_string(static_cast<long long>(expect)) +
                                  " values, got " + std::to_string(values_.size()));
  }

  int dimension() const { return dim_; }
  int levels() const { return levels_; }
  const std::vector<double>& values() const { return values_; }
  long long point_count() const { return static_cast<long long>(values_.size()); }

  double eval(std::span<const double> x) const {
    detail::require_point(x, dim_, "GridFunction::eval");
    std::size_t flat = 0;
    for (int j = 0; j < dim_; ++j) {
      int cell = static_cast<int>(x[std::size_t(j)] * levels_);
      if (cell >= levels_) cell = levels_ - 1;  // x_j == 1 lands in the last cell
      flat = flat * static_cast<std::size_t>(levels_) + static_cast<std::size_t>(cell);
    }
    return values_[flat];
  }

  /// Direct lattice lookup by per-axis levels in [0, m).
  double value_at(std::span<const int> level) const {
    if (static_cast<int>(level.size()) != dim_)
      throw std::invalid_argument("GridFunction::value_at: wrong number of levels");
    std::size_t flat = 0;
    for (int j = 0; j < dim_; ++j) {
      if (level[std::size_t(j)] < 0 || level[std::size_t(j)] >= levels_)
        throw std::out_of_range("GridFunction::value_at: level out of range");
      flat = flat * static_cast<std::size_t>(levels_) +
             static_cast<std::size_t>(level[std::size_t(j)]);
    }
    return values_[flat];
  }

 private:
  int dim_, levels_;
  std::vector<double> values_;
};

/// Exact functional decomposition of a GridFunction: mean plus one variance
/// component per subset (the empty subset maps to zero).
struct AnovaResult {
  double mean = 0.0;
  IndexMap sigma;

  double total_variance() const {
    double acc = 0.0;
    for (const auto& [u, s] : sigma) acc += s;
    return acc;
  }
};

/// Independent oracle: runs the recursive decomposition
///   f_u(x_u) = avg over x_{-u} of f  -  sum_{v proper subset of u} f_v
/// literally on the lattice, with integrals replaced by lattice averages.
/// sigma2_u is the lattice average of f_u^2. Cost grows like 2^d * m^d.
inline AnovaResult brute_force_anova(const GridFunction& gf) {
  const int d = gf.dimension(), m = gf.levels();
  if (d > kMaxEnumerationDimension)
    throw enumeration_limit("brute_force_anova: dimension above " +
                            std::to_string(kMaxEnumerationDimension));
  if (gf.point_count() > 1'000'000)
    throw enumeration_limit("brute_force_anova: lattice above 1e6 points");

  const long long n_points = gf.point_count();
  const std::vector<double>& vals = gf.values();

  // stride[j]: distance between consecutive levels of axis j (0-based).
  std::vector<long long> stride(std::size_t(d), 1);
  for (int j = d - 2; j >= 0; --j)
    stride[std::size_t(j)] = stride[std::size_t(j + 1)] * m;

  std::map<std::uint32_t, std::vector<double>> effects;
  AnovaResult out;

  for (const SubsetMask& u : all_subsets(d)) {
    const int k = u.cardinality();
    std::vector<int> coords;  // 0-based axes in u, ascending
    for (int j = 0; j < d; ++j)
      if ((u.bits() >> j) & 1u) coords.push_back(j);

    long long bins = 1;
    for (int i = 0; i < k; ++i) bins *= m;

    std::vector<double> table(std::size_t(bins), 0.0);
    for (long long flat = 0; flat < n_points; ++flat) {
      long long bin = 0;
      for (int j : coords)
        bin = bin * m + (flat / stride[std::size_t(j)]) % m;
      table[std::size_t(bin)] += vals[std::size_t(flat)];
    }
    const double cell_count = double(n_points / bins);
    for (double& t : table) t /= cell_count;

    // Subtract lower-order effects at the projected bins.
    std::vector<int> level(std::size_t(k), 0);
    for (long long bin = 0; bin < bins; ++bin) {
      long long rest = bin;
      for (int i = k - 1; i >= 0; --i) {
        level[std::size_t(i)] = int(rest % m);
        rest /= m;
      }
      double lower_sum = 0.0;
      detail::for_each_submask(u.bits(), [&](std::uint32_t vbits) {
        if (vbits == u.bits()) return;
        long long vbin = 0;
        for (int i = 0; i < k; ++i)
          if ((vbits >> coords[std::size_t(i)]) & 1u) vbin = vbin * m + level[std::size_t(i)];
        lower_sum += effects[vbits][std::size_t(vbin)];
      });
      table[std::size_t(bin)] -= lower_sum;
    }

    if (u.empty()) {
      out.mean = table[0];
      out.sigma.emplace(u, 0.0);
    } else {
      double s = 0.0;
      for (double t : table) s += t * t;
      out.sigma.emplace(u, s / double(bins));
    }
    effects.emplace(u.bits(), std::move(table));
  }
  return out;
}

/// Independent oracle for the cross moment
///   Theta_{uv} = avg over lattice pairs (x, z) of f(x_u : z_{-u}) f(x_v : z_{-v}),
/// where the hybrid point takes x on the given subset and z elsewhere.
/// Enumerates all m^{2d} pairs.
inline double brute_force_theta(const GridFunction& gf, const SubsetMask& u,
                                const SubsetMask& v) {
  const int d = gf.dimension(), m = gf.levels();
  SubsetMask::require_same(u, v);
  if (u.dimension() != d)
    throw dimension_mismatch("brute_force_theta: subset dimension mismatch");
  const long long n_points = gf.point_count();
  if (n_points > 10'000)
    throw enumeration_limit("brute_force_theta: m^{2d} above 1e8 pairs");

  // Decode all lattice points once.
  std::vector<int> levels(std::size_t(n_points) * std::size_t(d));
  {
    std::vector<long long> stride(std::size_t(d), 1);
    for (int j = d - 2; j >= 0; --j) stride[std::size_t(j)] = stride[std::size_t(j + 1)] * m;
    for (long long flat = 0; flat < n_points; ++flat)
      for (int j = 0; j < d; ++j)
        levels[std::size_t(flat) * std::size_t(d) + std::size_t(j)] =
            int((flat / stride[std::size_t(j)]) % m);
  }

  const std::vector<double>& vals = gf.values();
  double acc = 0.0;
  for (long long xf = 0; xf < n_points; ++xf) {
    const int* xl = &levels[std::size_t(xf) * std::size_t(d)];
    for (long long zf = 0; zf < n_points; ++zf) {
      const int* zl = &levels[std::size_t(zf) * std::size_t(d)];
      long long fu = 0, fv = 0;
      for (int j = 0; j < d; ++j) {
        fu = fu * m + (((u.bits() >> j) & 1u) ? xl[j] : zl[j]);
        fv = fv * m + (((v.bits() >> j) & 1u) ? xl[j] : zl[j]);
      }
      acc += vals[std::size_t(fu)] * vals[std::size_t(fv)];
    }
  }
  return acc / (double(n_points) * double(n_points));
}

enum class IndexKind {
  Mean,
  TotalVariance,
  Sigma,
  Lower,
  Upper,
  Superset,
  MeanDimension,
};

inline double exact_index(const ProductModel& f, IndexKind kind, const SubsetMask& set) {
  switch (kind) {
    case IndexKind::Mean: return f.mean();
    case IndexKind::TotalVariance: return f.total_variance();
    case IndexKind::Sigma: return f.variance_component(set);
    case IndexKind::Lower: return f.lower_index(set);
    case IndexKind::Upper: return f.upper_index(set);
    case IndexKind::Superset: return f.superset_importance(set);
    case IndexKind::MeanDimension: return f.mean_dimension();
  }
  throw std::invalid_argument("exact_index: unknown kind");
}

inline double exact_index(const MinModel& f, IndexKind kind, const SubsetMask& set) {
  switch (kind) {
    case IndexKind::Mean: return f.mean();
    case IndexKind::TotalVariance: return f.total_variance();
    case IndexKind::Sigma: return f.variance_component(set);
    case IndexKind::Lower: return f.lower_index(set);
    case IndexKind::Upper: return f.upper_index(set);
    case IndexKind::Superset: return f.superset_importance(set);
    case IndexKind::MeanDimension: return f.mean_dimension();
  }
  throw std::invalid_argument("exact_index: unknown kind");
}

inline double exact_index(const GridFunction&, IndexKind, const SubsetMask&) {
  throw std::invalid_argument(
      "exact_index: grid functions have no closed forms; use brute_force_anova");
}

/// Mean and the full table of lower indices; this is what expected-value
/// computations consume. Building it enumerates 2^d subsets.
struct ExactMoments {
  double mean = 0.0;
  IndexMap lower;
};

inline ExactMoments moments_from_anova(const AnovaResult& a) {
  return {a.mean, lower_from_sigma(a.sigma)};
}

inline ExactMoments exact_moments(const ProductModel& f) {
  const int d = f.dimension();
  ExactMoments out;
  out.mean = f.mean();
  for (const SubsetMask& u : all_subsets(d)) out.lower.emplace(u, f.lower_index(u));
  return out;
}

inline ExactMoments exact_moments(const MinModel& f) {
  const int d = f.dimension();
  ExactMoments out;
  out.mean = f.mean();
  for (const SubsetMask& u : all_subsets(d)) out.lower.emplace(u, f.lower_index(u));
  return out;
}

}  // namespace gsi
