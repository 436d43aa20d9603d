#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gsi {

/// Hard cap on the ambient dimension; masks are stored in 32-bit words.
inline constexpr int kMaxDimension = 20;

/// Operations that enumerate a full power set refuse to go past this.
inline constexpr int kMaxEnumerationDimension = 12;

/// Thrown when operands live in different ambient dimensions.
class dimension_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a power-set enumeration would be too large (2^d blowup).
class enumeration_limit : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A subset of {1,...,d} packed into a bitmask. Index j occupies bit j-1,
/// so the numeric value of the mask orders subsets the way the rest of the
/// library expects (ascending bitmask-integer order).
class SubsetMask {
 public:
  /// Default state is the empty subset of a 1-dimensional universe.
  SubsetMask() = default;

  SubsetMask(std::uint32_t bits, int dim) : dim_(dim), bits_(bits) {
    if (dim < 1 || dim > kMaxDimension)
      throw std::invalid_argument("SubsetMask: dimension must be in [1," +
                                  std::to_string(kMaxDimension) + "], got " +
                                  std::to_string(dim));
    if ((bits & ~mask_for(dim)) != 0)
      throw std::invalid_argument(
          "SubsetMask: bits outside universe of dimension " + std::to_string(dim));
  }

  static SubsetMask empty_set(int dim) { return {0u, dim}; }
  static SubsetMask full_set(int dim) { return {mask_for(dim), dim}; }

  static SubsetMask singleton(int index, int dim) {
    require_index(index, dim);
    return {std::uint32_t{1} << (index - 1), dim};
  }

  static SubsetMask of(std::span<const int> indices, int dim) {
    std::uint32_t b = 0;
    for (int j : indices) {
      require_index(j, dim);
      b |= std::uint32_t{1} << (j - 1);
    }
    return {b, dim};
  }

  static SubsetMask of(std::initializer_list<int> indices, int dim) {
    return of(std::span<const int>(indices.begin(), indices.size()), dim);
  }

  std::uint32_t bits() const { return bits_; }
  int dimension() const { return dim_; }
  int cardinality() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool is_full() const { return bits_ == mask_for(dim_); }

  bool contains(int index) const {
    require_index(index, dim_);
    return (bits_ >> (index - 1)) & 1u;
  }

  bool subset_of(const SubsetMask& other) const {
    require_same(*this, other);
    return (bits_ & ~other.bits_) == 0;
  }

  /// Smallest member (1-based). The subset must be nonempty.
  int min_index() const {
    if (empty()) throw std::out_of_range("SubsetMask: min_index of empty set");
    return std::countr_zero(bits_) + 1;
  }

  /// Largest member (1-based). The subset must be nonempty.
  int max_index() const {
    if (empty()) throw std::out_of_range("SubsetMask: max_index of empty set");
    return std::bit_width(bits_);
  }

  std::vector<int> to_indices() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(cardinality()));
    for (int j = 1; j <= dim_; ++j)
      if ((bits_ >> (j - 1)) & 1u) out.push_back(j);
    return out;
  }

  /// Renders as "[1,3,4]"; the empty set is "[]".
  std::string str() const {
    std::string out = "[";
    bool first = true;
    for (int j : to_indices()) {
      if (!first) out += ',';
      out += std::to_string(j);
      first = false;
    }
    out += ']';
    return out;
  }

  /// Parses the textual form produced by str(). Whitespace around elements
  /// is ignored.
  static SubsetMask parse(std::string_view text, int dim) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
      throw std::invalid_argument("SubsetMask: expected \"[i,j,...]\", got \"" +
                                  std::string(text) + "\"");
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return s;
    };
    std::string_view body = trim(text.substr(1, text.size() - 2));
    std::vector<int> idx;
    while (!body.empty()) {
      std::size_t comma = body.find(',');
      std::string_view tok = trim(body.substr(0, comma));
      if (tok.empty())
        throw std::invalid_argument("SubsetMask: empty element in \"" +
                                    std::string(text) + "\"");
      int value = 0;
      for (char c : tok) {
        if (c < '0' || c > '9')
          throw std::invalid_argument("SubsetMask: bad index \"" + std::string(tok) + "\"");
        value = value * 10 + (c - '0');
      }
      idx.push_back(value);
      body = (comma == std::string_view::npos) ? std::string_view{} : body.substr(comma + 1);
    }
    return of(idx, dim);
  }

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;
  /// Orders by (dimension, bits); within one universe this is ascending
  /// bitmask-integer order, which also refines the subset partial order.
  friend auto operator<=>(const SubsetMask&, const SubsetMask&) = default;

  static void require_same(const SubsetMask& a, const SubsetMask& b) {
    if (a.dim_ != b.dim_)
      throw dimension_mismatch("subset operands have dimensions " +
                               std::to_string(a.dim_) + " and " + std::to_string(b.dim_));
  }

 private:
  static std::uint32_t mask_for(int dim) {
    return (dim >= 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << dim) - 1);
  }

  static void require_index(int index, int dim) {
    if (index < 1 || index > dim)
      throw std::out_of_range("subset index " + std::to_string(index) +
                              " outside [1," + std::to_string(dim) + "]");
  }

  int dim_ = 1;
  std::uint32_t bits_ = 0;
};

namespace detail {

/// Visits every submask of w in ascending numeric order, including 0 and w.
/// The step s -> (s - w) & w walks exactly the submasks of w.
template <class F>
void for_each_submask(std::uint32_t w, F&& fn) {
  std::uint32_t s = 0;
  while (true) {
    fn(s);
    if (s == w) break;
    s = (s - w) & w;
  }
}

}  // namespace detail

/// Symmetric difference u xor v = (u - v) + (v - u).
inline SubsetMask xor_set(const SubsetMask& u, const SubsetMask& v) {
  SubsetMask::require_same(u, v);
  return {u.bits() ^ v.bits(), u.dimension()};
}

inline SubsetMask complement(const SubsetMask& u) {
  return {u.bits() ^ SubsetMask::full_set(u.dimension()).bits(), u.dimension()};
}

/// nxor(u,v) = complement of xor(u,v) = (u & v) + (u^c & v^c).
/// It is the set of coordinates on which u and v agree.
inline SubsetMask nxor_set(const SubsetMask& u, const SubsetMask& v) {
  return complement(xor_set(u, v));
}

inline SubsetMask set_union(const SubsetMask& u, const SubsetMask& v) {
  SubsetMask::require_same(u, v);
  return {u.bits() | v.bits(), u.dimension()};
}

inline SubsetMask set_intersection(const SubsetMask& u, const SubsetMask& v) {
  SubsetMask::require_same(u, v);
  return {u.bits() & v.bits(), u.dimension()};
}

inline SubsetMask set_difference(const SubsetMask& u, const SubsetMask& v) {
  SubsetMask::require_same(u, v);
  return {u.bits() & ~v.bits(), u.dimension()};
}

/// All subsets of w in ascending bitmask-integer order (2^|w| of them).
inline std::vector<SubsetMask> subsets_of(const SubsetMask& w) {
  if (w.cardinality() > kMaxEnumerationDimension)
    throw enumeration_limit("subsets_of: refusing to enumerate 2^" +
                            std::to_string(w.cardinality()) + " subsets");
  std::vector<SubsetMask> out;
  out.reserve(std::size_t{1} << w.cardinality());
  detail::for_each_submask(w.bits(), [&](std::uint32_t s) {
    out.emplace_back(s, w.dimension());
  });
  return out;
}

/// The full power set of {1,...,d} in ascending order (2^d subsets).
inline std::vector<SubsetMask> all_subsets(int dim) {
  if (dim < 1 || dim > kMaxDimension)
    throw std::invalid_argument("all_subsets: bad dimension " + std::to_string(dim));
  if (dim > kMaxEnumerationDimension)
    throw enumeration_limit("all_subsets: refusing to enumerate 2^" +
                            std::to_string(dim) + " subsets");
  std::vector<SubsetMask> out;
  out.reserve(std::size_t{1} << dim);
  for (std::uint32_t b = 0; b < (std::uint32_t{1} << dim); ++b)
    out.emplace_back(b, dim);
  return out;
}

/// Map from subsets to real coefficients (variance components, lower
/// indices, sparse weight vectors, ...). std::map keeps deterministic order.
using IndexMap = std::map<SubsetMask, double>;

namespace detail {

inline double lookup_or_zero_empty(const IndexMap& map, const SubsetMask& key,
                                   const char* what) {
  auto it = map.find(key);
  if (it != map.end()) return it->second;
  if (key.empty()) return 0.0;  // value at the empty set is pinned to zero
  throw std::out_of_range(std::string(what) + ": missing value for subset " + key.str());
}

}  // namespace detail

/// Variance components from lower indices via the alternating subset sum
///   sigma2_u = sum_{v subset u} (-1)^{|u-v|} lt2_v,
/// evaluated for every key of `lower`. Requires lt2 on all subsets of each
/// queried key (the empty set may be omitted; its value is zero).
inline IndexMap sigma_from_lower(const IndexMap& lower) {
  IndexMap out;
  for (const auto& [u, unused] : lower) {
    if (u.cardinality() > kMaxEnumerationDimension)
      throw enumeration_limit("sigma_from_lower: subset too large: " + u.str());
    double acc = 0.0;
    detail::for_each_submask(u.bits(), [&](std::uint32_t s) {
      const SubsetMask v{s, u.dimension()};
      const double value = detail::lookup_or_zero_empty(lower, v, "sigma_from_lower");
      const int diff = u.cardinality() - v.cardinality();
      acc += (diff & 1) ? -value : value;
    });
    out.emplace(u, acc);
  }
  return out;
}

/// Lower indices from variance components: lt2_u = sum_{v subset u} sigma2_v,
/// evaluated for every key of `sigma`. Requires sigma2 on all subsets of each
/// queried key (the empty set may be omitted; its value is zero).
inline IndexMap lower_from_sigma(const IndexMap& sigma) {
  IndexMap out;
  for (const auto& [u, unused] : sigma) {
    if (u.cardinality() > kMaxEnumerationDimension)
      throw enumeration_limit("lower_from_sigma: subset too large: " + u.str());
    double acc = 0.0;
    detail::for_each_submask(u.bits(), [&](std::uint32_t s) {
      acc += detail::lookup_or_zero_empty(sigma, SubsetMask{s, u.dimension()},
                                          "lower_from_sigma");
    });
    out.emplace(u, acc);
  }
  return out;
}

}  // namespace gsi
