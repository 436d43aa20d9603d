#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsi/spec.hpp"
#include "gsi/subset.hpp"

namespace gsi {

/// {1, ..., j}; j = 0 gives the empty set.
inline SubsetMask prefix_mask(int j, int dim) {
  if (j < 0 || j > dim) throw std::out_of_range("prefix_mask: j outside [0,d]");
  return SubsetMask((j == 0) ? 0u : ((1u << j) - 1u), dim);
}

/// {j+1, ..., d}; j = d gives the empty set.
inline SubsetMask suffix_mask(int j, int dim) {
  if (j < 0 || j > dim) throw std::out_of_range("suffix_mask: j outside [0,d]");
  return SubsetMask(SubsetMask::full_set(dim).bits() & ~prefix_mask(j, dim).bits(), dim);
}

namespace detail {

inline double parity_sign(int cardinality) { return (cardinality & 1) ? -1.0 : 1.0; }

inline void require_nonempty(const SubsetMask& w, const char* what) {
  if (w.empty())
    throw std::invalid_argument(std::string(what) + ": subset must be nonempty");
}

/// First floor(|w|/2) indices of w, ascending: the default way to halve a
/// subset so that both exponential cost factors stay balanced.
inline SubsetMask default_split(const SubsetMask& w) {
  const int take = w.cardinality() / 2;
  std::uint32_t bits = 0;
  int got = 0;
  for (int j = 1; j <= w.dimension() && got < take; ++j)
    if (w.contains(j)) {
      bits |= 1u << (j - 1);
      ++got;
    }
  return SubsetMask(bits, w.dimension());
}

inline SubsetMask resolve_split(const SubsetMask& w, const std::optional<SubsetMask>& w1,
                                const char* what) {
  if (!w1) return default_split(w);
  SubsetMask::require_same(w, *w1);
  if (!w1->subset_of(w))
    throw std::invalid_argument(std::string(what) + ": split " + w1->str() +
                                " is not a subset of " + w.str());
  return *w1;
}

}  // namespace detail

// --- single-index designs ------------------------------------------------

/// Targets lower(u) through the single cross moment E[f(x) f(x_u:z_{-u})].
/// Not a contrast; the estimator must remove the squared mean.
inline GsiSpec lower_index(const SubsetMask& u) {
  return GsiSpec::compose_simple(u.dimension(), SubsetMask::full_set(u.dimension()),
                                 IndexMap{{u, 1.0}},
                                 /*anchor_is_column=*/false);
}

/// Targets upper(u) as half the mean square of f(x) - f(x_{-u}:z_u).
inline GsiSpec upper_index(const SubsetMask& u) {
  detail::require_nonempty(u, "upper_index");
  const SubsetMask froze = complement(u);
  return GsiSpec::square(u.dimension(), IndexMap{{SubsetMask::full_set(u.dimension()), 1.0},
                                                 {froze, -1.0}},
                         0.5);
}

/// Contrast form of the lower index: E[f(x) (f(x_u:z_{-u}) - f(z))].
inline GsiSpec mauntz_lower(const SubsetMask& u) {
  detail::require_nonempty(u, "mauntz_lower");
  const int d = u.dimension();
  return GsiSpec::bilinear(d, IndexMap{{SubsetMask::full_set(d), 1.0}},
                           IndexMap{{u, 1.0}, {SubsetMask::empty_set(d), -1.0}});
}

/// Variance component of w by inclusion-exclusion over lower indices: one
/// anchored row of hybrids against f(x). Cost 2^|w| + 1 (one less when
/// w is everything).
inline GsiSpec variance_component_simple(const SubsetMask& w) {
  detail::require_nonempty(w, "variance_component_simple");
  const int k = w.cardinality();
  if (k > kMaxEnumerationDimension)
    throw enumeration_limit("variance_component_simple: 2^|w| support too large");
  IndexMap lambda;
  for (const SubsetMask& v : subsets_of(w))
    lambda.emplace(v, detail::parity_sign(k - v.cardinality()));
  return GsiSpec::compose_simple(w.dimension(), SubsetMask::full_set(w.dimension()),
                                 std::move(lambda));
}

/// Variance component of w with the exponential cost split across the two
/// halves of a partition w = w1 + w2: cost 2^|w1| + 2^|w2|. The rows are
/// complements of subsets of w1 and the columns subsets of w containing w2's
/// complement in w; this orientation leaves the estimand unchanged and makes
/// the per-pair values of every split coincide on product-form models.
inline GsiSpec variance_component_bilinear(const SubsetMask& w,
                                           std::optional<SubsetMask> split = std::nullopt) {
  detail::require_nonempty(w, "variance_component_bilinear");
  const SubsetMask w1 = detail::resolve_split(w, split, "variance_component_bilinear");
  const SubsetMask w2 = set_difference(w, w1);
  if (std::max(w1.cardinality(), w2.cardinality()) > kMaxEnumerationDimension)
    throw enumeration_limit("variance_component_bilinear: split half too large");
  const SubsetMask full = SubsetMask::full_set(w.dimension());
  IndexMap lambda, gamma;
  for (const SubsetMask& u1 : subsets_of(w1))
    lambda.emplace(set_difference(full, u1), detail::parity_sign(u1.cardinality()));
  for (const SubsetMask& u2 : subsets_of(w2))
    gamma.emplace(set_difference(w, u2), detail::parity_sign(u2.cardinality()));
  return GsiSpec::bilinear(w.dimension(), std::move(lambda), std::move(gamma));
}

/// Superset importance of w as the mean square of the w-fold difference,
/// scaled by 2^-|w|. Nonnegative per sample; cost 2^|w|.
inline GsiSpec superset_square(const SubsetMask& w) {
  const int k = w.cardinality();
  if (k > kMaxEnumerationDimension)
    throw enumeration_limit("superset_square: 2^|w| support too large");
  IndexMap lambda;
  for (const SubsetMask& v : subsets_of(w))
    lambda.emplace(v, detail::parity_sign(k - v.cardinality()));
  return GsiSpec::square(w.dimension(), std::move(lambda), std::ldexp(1.0, -k));
}

/// Superset importance with split cost 2^|w1| + 2^|w2| - 1: hybrids fix the
/// complement of w and difference the two halves separately.
inline GsiSpec superset_bilinear(const SubsetMask& w,
                                 std::optional<SubsetMask> split = std::nullopt) {
  const SubsetMask w1 = detail::resolve_split(w, split, "superset_bilinear");
  const SubsetMask w2 = set_difference(w, w1);
  if (std::max(w1.cardinality(), w2.cardinality()) > kMaxEnumerationDimension)
    throw enumeration_limit("superset_bilinear: split half too large");
  const SubsetMask base = complement(w);
  IndexMap lambda, gamma;
  for (const SubsetMask& u1 : subsets_of(w1))
    lambda.emplace(set_union(base, u1), detail::parity_sign(u1.cardinality()));
  for (const SubsetMask& u2 : subsets_of(w2))
    gamma.emplace(set_union(base, u2), detail::parity_sign(u2.cardinality()));
  return GsiSpec::bilinear(w.dimension(), std::move(lambda), std::move(gamma));
}

// --- whole-model summaries (parameterized by dimension only) --------------

/// sum_u |u| sigma2_u: sum over j of the total index of {j}, as a sum of
/// squares on the d+1 points {f(x), f(x_{-j}:z_j)}.
inline GsiSpec mean_dimension(int dim) {
  std::vector<IndexMap> terms;
  const SubsetMask full = SubsetMask::full_set(dim);
  for (int j = 1; j <= dim; ++j)
    terms.push_back(IndexMap{{full, 1.0},
                             {complement(SubsetMask::singleton(j, dim)), -1.0}});
  return GsiSpec::sum_of_squares(dim, std::move(terms), 0.5);
}

/// sum_j lower({j}) from d+2 points per pair: contrast of the singleton
/// hybrids against d copies of f(z), all multiplied by f(x).
inline GsiSpec first_order_total(int dim) {
  IndexMap lambda{{SubsetMask::empty_set(dim), -double(dim)}};
  for (int j = 1; j <= dim; ++j) lambda.emplace(SubsetMask::singleton(j, dim), 1.0);
  return GsiSpec::bilinear(dim, std::move(lambda),
                           IndexMap{{SubsetMask::full_set(dim), 1.0}});
}

/// sum over pairs {j,k} of sigma2_{jk}: bilinear contrast of the singleton
/// side against the co-singleton side, 2d+2 points per pair.
inline GsiSpec second_order_total(int dim) {
  if (dim < 2)
    throw std::invalid_argument("second_order_total: needs dimension >= 2");
  IndexMap lambda{{SubsetMask::empty_set(dim), -double(dim)}};
  for (int j = 1; j <= dim; ++j) lambda.emplace(SubsetMask::singleton(j, dim), 1.0);
  IndexMap gamma{{SubsetMask::full_set(dim), -double(dim - 2)}};
  for (int k = 1; k <= dim; ++k)
    gamma[complement(SubsetMask::singleton(k, dim))] += 1.0;
  return GsiSpec::bilinear(dim, std::move(lambda), std::move(gamma), 0.5);
}

/// sum_u |u|^2 sigma2_u from the d+1 points {f(z), f(x_j:z_{-j})}: pair
/// products give (d-|u|)(d-|u|-1), the f(z) cross terms remove the linear
/// part, and the f(z)^2 weight completes the square.
inline GsiSpec mean_square_dimension(int dim) {
  const SubsetMask zrow = SubsetMask::empty_set(dim);
  WeightMap weights;
  weights[{zrow, zrow}] = double(dim) * double(dim);
  for (int j = 1; j <= dim; ++j) {
    const SubsetMask sj = SubsetMask::singleton(j, dim);
    weights[{zrow, sj}] = -(2.0 * dim - 1.0);
    for (int k = 1; k <= dim; ++k)
      if (k != j) weights[{sj, SubsetMask::singleton(k, dim)}] = 1.0;
  }
  return GsiSpec::general(dim, std::move(weights));
}

namespace detail {

inline GsiSpec prefix_family_contrast(int dim, bool tails, const char* what) {
  if (dim < 2) throw std::invalid_argument(std::string(what) + ": needs dimension >= 2");
  IndexMap lambda{{SubsetMask::empty_set(dim), -double(dim - 1)}};
  for (int j = 1; j <= dim - 1; ++j)
    lambda.emplace(tails ? prefix_mask(j, dim) : suffix_mask(j, dim), 1.0);
  return GsiSpec::bilinear(dim, std::move(lambda),
                           IndexMap{{SubsetMask::full_set(dim), 1.0}});
}

}  // namespace detail

/// sum_u (d - max(u)) sigma2_u: how much variance sits below each truncation
/// point, accumulated over the d-1 proper prefixes {1..j}.
inline GsiSpec trunc_tail_weight(int dim) {
  return detail::prefix_family_contrast(dim, true, "trunc_tail_weight");
}

/// sum_u (min(u) - 1) sigma2_u, accumulated over the proper suffixes {j+1..d}.
inline GsiSpec trunc_head_weight(int dim) {
  return detail::prefix_family_contrast(dim, false, "trunc_head_weight");
}

/// sum_u (max(u) - min(u)) sigma2_u: (d-1) * total variance minus both
/// truncation weights, assembled into one contrast with 2d points per pair.
inline GsiSpec index_spread(int dim) {
  if (dim < 2) throw std::invalid_argument("index_spread: needs dimension >= 2");
  IndexMap lambda{{SubsetMask::full_set(dim), double(dim - 1)},
                  {SubsetMask::empty_set(dim), double(dim - 1)}};
  for (int j = 1; j <= dim - 1; ++j) {
    lambda[prefix_mask(j, dim)] += -1.0;
    lambda[suffix_mask(j, dim)] += -1.0;
  }
  return GsiSpec::bilinear(dim, std::move(lambda),
                           IndexMap{{SubsetMask::full_set(dim), 1.0}});
}

/// sum_u min(u) (d - max(u) + 1) sigma2_u: unit weight on every pair of a
/// prefix row {1..j} and a suffix column {k+1..d} with j < k. Not a
/// contrast (the weights sum to d(d+1)/2), so estimation goes through the
/// mean-corrected route.
inline GsiSpec segment_pairs(int dim) {
  WeightMap weights;
  for (int j = 0; j <= dim; ++j)
    for (int k = j + 1; k <= dim; ++k)
      weights[{prefix_mask(j, dim), suffix_mask(k, dim)}] = 1.0;
  return GsiSpec::general(dim, std::move(weights));
}

// --- batched singleton/pair family ----------------------------------------

struct NamedSpec {
  std::string name;
  GsiSpec spec;
};

/// The classic screening battery sharing one set of hybrid points: lower
/// indices of singletons, upper indices of singletons and of pairs, and
/// (extended) lower indices of pairs. Batch cost d+2, or 2d+2 extended.
inline std::vector<NamedSpec> saltelli_first_second(int dim, bool extended = false) {
  if (dim < 2)
    throw std::invalid_argument("saltelli_first_second: needs dimension >= 2");
  const SubsetMask empty = SubsetMask::empty_set(dim);
  const SubsetMask full = SubsetMask::full_set(dim);
  std::vector<NamedSpec> out;
  for (int j = 1; j <= dim; ++j) {
    const SubsetMask sj = SubsetMask::singleton(j, dim);
    out.push_back({"lower" + sj.str(),
                   GsiSpec::general(dim, WeightMap{{{empty, complement(sj)}, 1.0},
                                                   {{empty, full}, -1.0}})});
  }
  for (int j = 1; j <= dim; ++j) {
    const SubsetMask sj = SubsetMask::singleton(j, dim);
    out.push_back({"upper" + sj.str(),
                   GsiSpec::square(dim, IndexMap{{full, 1.0}, {complement(sj), -1.0}}, 0.5)});
  }
  for (int j = 1; j <= dim; ++j)
    for (int k = j + 1; k <= dim; ++k) {
      const SubsetMask pair = SubsetMask::of({j, k}, dim);
      out.push_back({"upper" + pair.str(),
                     GsiSpec::square(dim,
                                     IndexMap{{complement(SubsetMask::singleton(j, dim)), 1.0},
                                              {complement(SubsetMask::singleton(k, dim)), -1.0}},
                                     0.5)});
    }
  // The extended rows average both hybrid orientations of each pair, so the
  // batch touches every one of the 2d+2 evaluation points.
  if (extended)
    for (int j = 1; j <= dim; ++j)
      for (int k = j + 1; k <= dim; ++k) {
        const SubsetMask pair = SubsetMask::of({j, k}, dim);
        const SubsetMask sj = SubsetMask::singleton(j, dim);
        const SubsetMask sk = SubsetMask::singleton(k, dim);
        out.push_back(
            {"lower" + pair.str(),
             GsiSpec::general(dim, WeightMap{{{sj, complement(sk)}, 0.5},
                                             {{sk, complement(sj)}, 0.5},
                                             {{empty, full}, -1.0}})});
      }
  return out;
}

// --- registry --------------------------------------------------------------

struct CatalogEntryInfo {
  std::string name;          // identifier used by the CLI
  std::string target;        // estimand in index notation
  std::string arguments;     // extra arguments beyond the dimension
  std::string cost_formula;  // evaluations per sample pair
  std::string structure;     // matrix class and contrast status
};

inline const std::vector<CatalogEntryInfo>& catalog_entries() {
  static const std::vector<CatalogEntryInfo> entries = {
      {"lower_index", "lower(u)", "u", "2", "simple, mean-corrected"},
      {"upper_index", "upper(u)", "u", "2", "square, contrast"},
      {"mauntz_lower", "lower(u)", "u", "3", "bilinear, contrast"},
      {"variance_component_simple", "sigma2(u)", "u", "2^|u| + 1 (2^d when u is all)",
       "simple, contrast"},
      {"variance_component_bilinear", "sigma2(u)", "u, optional split w1",
       "2^|w1| + 2^|w2| (one less when u is all)", "bilinear, contrast"},
      {"superset_square", "superset(u)", "u", "2^|u|", "square, contrast"},
      {"superset_bilinear", "superset(u)", "u, optional split w1",
       "2^|w1| + 2^|w2| - 1", "bilinear, contrast"},
      {"mean_dimension", "sum_u |u| sigma2(u)", "", "d + 1", "sum of squares, contrast"},
      {"first_order_total", "sum_j lower({j})", "", "d + 2", "bilinear, contrast"},
      {"second_order_total", "sum_{|u|=2} sigma2(u)", "", "2d + 2", "bilinear, contrast"},
      {"mean_square_dimension", "sum_u |u|^2 sigma2(u)", "", "d + 1", "general, contrast"},
      {"trunc_tail_weight", "sum_u (d - max(u)) sigma2(u)", "", "d + 1",
       "bilinear, contrast"},
      {"trunc_head_weight", "sum_u (min(u) - 1) sigma2(u)", "", "d + 1",
       "bilinear, contrast"},
      {"index_spread", "sum_u (max(u) - min(u)) sigma2(u)", "", "2d", "bilinear, contrast"},
      {"segment_pairs", "sum_u min(u) (d - max(u) + 1) sigma2(u)", "", "2d - 1",
       "general, mean-corrected"},
      {"saltelli_first_second", "lower({j}), upper({j}), upper({j,k}) [, lower({j,k})]",
       "optional extended", "d + 2 (2d + 2 extended)", "batch, mixed"},
  };
  return entries;
}

/// Instantiates catalog entries by name. Entries whose target is a single
/// subset take it through `u`; the two split designs also accept `w1`.
inline std::vector<NamedSpec> make_catalog_specs(const std::string& name, int dim,
                                                 const std::optional<SubsetMask>& u,
                                                 const std::optional<SubsetMask>& w1 =
                                                     std::nullopt,
                                                 bool extended = false) {
  auto need_u = [&]() -> const SubsetMask& {
    if (!u)
      throw std::invalid_argument("estimator '" + name + "' needs a target subset (--u)");
    if (u->dimension() != dim)
      throw dimension_mismatch("target subset " + u->str() + " has dimension " +
                               std::to_string(u->dimension()) + ", model has " +
                               std::to_string(dim));
    return *u;
  };
  auto one = [&](GsiSpec s) {
    std::vector<NamedSpec> v;
    std::string label = name;
    if (u) label += u->str();
    v.push_back({std::move(label), std::move(s)});
    return v;
  };

  if (name == "lower_index") return one(lower_index(need_u()));
  if (name == "upper_index") return one(upper_index(need_u()));
  if (name == "mauntz_lower") return one(mauntz_lower(need_u()));
  if (name == "variance_component_simple") return one(variance_component_simple(need_u()));
  if (name == "variance_component_bilinear")
    return one(variance_component_bilinear(need_u(), w1));
  if (name == "superset_square") return one(superset_square(need_u()));
  if (name == "superset_bilinear") return one(superset_bilinear(need_u(), w1));
  if (name == "mean_dimension") return one(mean_dimension(dim));
  if (name == "first_order_total") return one(first_order_total(dim));
  if (name == "second_order_total") return one(second_order_total(dim));
  if (name == "mean_square_dimension") return one(mean_square_dimension(dim));
  if (name == "trunc_tail_weight") return one(trunc_tail_weight(dim));
  if (name == "trunc_head_weight") return one(trunc_head_weight(dim));
  if (name == "index_spread") return one(index_spread(dim));
  if (name == "segment_pairs") return one(segment_pairs(dim));
  if (name == "saltelli_first_second") return saltelli_first_second(dim, extended);
  throw std::invalid_argument("unknown estimator '" + name +
                              "'; run the list command for the catalog");
}

}  // namespace gsi
