#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gsi/catalog.hpp"
#include "gsi/engine.hpp"
#include "gsi/models.hpp"
#include "gsi/rng.hpp"
#include "gsi/spec.hpp"
#include "gsi/subset.hpp"

namespace gsi {

/// Deterministic tabulated function with pseudo-random values in [lo, hi);
/// the workhorse for oracle cross-checks because its decomposition can be
/// enumerated exactly.
inline GridFunction make_test_grid(int dim, int levels, std::uint64_t seed,
                                   double lo = -1.0, double hi = 1.0) {
  long long count = 1;
  for (int j = 0; j < dim; ++j) count *= levels;
  std::vector<double> values(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i)
    values[std::size_t(i)] = lo + (hi - lo) * rng::uniform01(seed, 0, std::uint64_t(i), 0);
  return GridFunction(dim, levels, std::move(values));
}

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

struct Checker {
  bool ok = true;
  long long checks = 0;
  std::string first_failure;

  void expect(bool condition, const std::string& message) {
    ++checks;
    if (!condition && ok) {
      ok = false;
      first_failure = message;
    }
  }

  void expect_near(double got, double want, double tol, const std::string& where) {
    std::ostringstream os;
    os << where << ": got " << got << ", want " << want << " (tol " << tol << ")";
    expect(std::abs(got - want) <= tol, os.str());
  }

  SuiteResult result(std::string name, const std::string& pass_note) const {
    return {std::move(name), ok,
            ok ? pass_note + " (" + std::to_string(checks) + " checks)" : first_failure};
  }
};

template <class M>
struct CountingModel {
  const M* inner;
  mutable long long evals = 0;

  int dimension() const { return inner->dimension(); }
  double eval(std::span<const double> x) const {
    ++evals;
    return inner->eval(x);
  }
};

inline double superset_sum(const AnovaResult& anova, const SubsetMask& w) {
  double acc = 0.0;
  for (const auto& [v, s] : anova.sigma)
    if (w.subset_of(v)) acc += s;
  return acc;
}

}  // namespace detail

/// Cross moments of hybrid pairs against the closed form mean^2 +
/// lower(nxor(u,v)), on exhaustively enumerable tabulated functions.
inline SuiteResult verify_cross_moments() {
  detail::Checker c;
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 3, m = 2 + i % 3;
    const GridFunction grid = make_test_grid(d, m, 1000 + std::uint64_t(i));
    const ExactMoments moments = moments_from_anova(brute_force_anova(grid));
    const double mean2 = moments.mean * moments.mean;
    for (const SubsetMask& u : all_subsets(d))
      for (const SubsetMask& v : all_subsets(d)) {
        const double theta = brute_force_theta(grid, u, v);
        const double expected = mean2 + moments.lower.at(nxor_set(u, v));
        c.expect_near(theta, expected, 1e-10,
                      "grid " + std::to_string(i) + " theta(" + u.str() + "," + v.str() +
                          ")");
      }
  }
  return c.result("cross_moment_identity", "hybrid cross moments match the closed form");
}

/// Lower-index/variance-component inversion plus the decomposition identity
/// that the components sum to the total variance.
inline SuiteResult verify_moebius_roundtrip() {
  detail::Checker c;
  for (int i = 0; i < 10; ++i) {
    const int d = 1 + i % 3, m = 2 + (i + 1) % 3;
    const GridFunction grid = make_test_grid(d, m, 2000 + std::uint64_t(i));
    const AnovaResult anova = brute_force_anova(grid);
    const IndexMap lower = lower_from_sigma(anova.sigma);
    const IndexMap sigma_back = sigma_from_lower(lower);
    for (const auto& [u, s] : anova.sigma)
      c.expect_near(sigma_back.at(u), s, 1e-12,
                    "grid " + std::to_string(i) + " roundtrip sigma" + u.str());

    double mean = 0.0, mean_sq = 0.0;
    for (double v : grid.values()) {
      mean += v;
      mean_sq += v * v;
    }
    mean /= double(grid.values().size());
    mean_sq /= double(grid.values().size());
    c.expect_near(anova.total_variance(), mean_sq - mean * mean, 1e-10,
                  "grid " + std::to_string(i) + " component sum vs total variance");
    c.expect_near(anova.mean, mean, 1e-12, "grid " + std::to_string(i) + " mean");
  }
  return c.result("moebius_roundtrip", "index inversion and variance split are exact");
}

/// Expected values of every split variance-component and superset design
/// against the enumerated decomposition, for all splits.
inline SuiteResult verify_split_designs() {
  detail::Checker c;
  for (int i = 0; i < 3; ++i) {
    const GridFunction grid = make_test_grid(4, 3, 3000 + std::uint64_t(i));
    const AnovaResult anova = brute_force_anova(grid);
    const ExactMoments moments = moments_from_anova(anova);
    for (const SubsetMask& w : all_subsets(4)) {
      if (w.empty()) continue;
      const double sigma_w = anova.sigma.at(w);
      const double upsilon_w = detail::superset_sum(anova, w);
      const std::string tag = "grid " + std::to_string(i) + " w=" + w.str();
      c.expect_near(expected_value(variance_component_simple(w), moments), sigma_w, 1e-10,
                    tag + " anchored component");
      c.expect_near(expected_value(superset_square(w), moments), upsilon_w, 1e-10,
                    tag + " square superset");
      for (const SubsetMask& w1 : subsets_of(w)) {
        c.expect_near(expected_value(variance_component_bilinear(w, w1), moments), sigma_w,
                      1e-10, tag + " split component w1=" + w1.str());
        c.expect_near(expected_value(superset_bilinear(w, w1), moments), upsilon_w, 1e-10,
                      tag + " split superset w1=" + w1.str());
      }
    }
  }
  return c.result("split_design_targets", "all component/superset splits hit their targets");
}

/// Exact unbiasedness of the corrected estimators: averages over all 256
/// equally likely two-pair outcomes on a 2x2 tabulated function equal the
/// target exactly.
inline SuiteResult verify_exhaustive_unbiasedness() {
  detail::Checker c;
  const GridFunction grid = make_test_grid(2, 2, 4000, 0.5, 1.5);
  const ExactMoments moments = moments_from_anova(brute_force_anova(grid));

  const std::vector<GsiSpec> specs{lower_index(SubsetMask::of({1}, 2)),
                                   lower_index(SubsetMask::of({2}, 2)),
                                   lower_index(SubsetMask::full_set(2)),
                                   segment_pairs(2)};
  for (const GsiSpec& spec : specs) {
    const std::vector<SubsetMask> support = spec.support();
    const double target = expected_value(spec, moments);
    double acc = 0.0;
    std::vector<std::vector<double>> rows(support.size(), std::vector<double>(2));
    for (int o1 = 0; o1 < 16; ++o1)
      for (int o2 = 0; o2 < 16; ++o2) {
        const int outcome[2] = {o1, o2};
        for (int pair = 0; pair < 2; ++pair) {
          const int cells = outcome[pair];
          const int x[2] = {cells & 1, (cells >> 1) & 1};
          const int z[2] = {(cells >> 2) & 1, (cells >> 3) & 1};
          for (std::size_t r = 0; r < support.size(); ++r) {
            const int hybrid[2] = {support[r].contains(1) ? x[0] : z[0],
                                   support[r].contains(2) ? x[1] : z[1]};
            rows[r][std::size_t(pair)] = grid.value_at(hybrid);
          }
        }
        acc += bias_corrected_from_samples(spec, rows);
      }
    c.expect_near(acc / 256.0, target, 1e-12, "exhaustive mean, support size " +
                                                  std::to_string(support.size()));
  }
  return c.result("exhaustive_unbiasedness",
                  "corrected estimators are exactly unbiased over all outcomes");
}

/// Declared per-pair cost of every catalog design equals the number of
/// model evaluations the engine actually performs, including the headline
/// values 9, 6, 16, 7, d+1, d+2, 2d+2.
inline SuiteResult verify_cost_accounting() {
  detail::Checker c;

  auto observed = [&](const GsiSpec& spec, int d) {
    const MinModel inner(d);
    const detail::CountingModel<MinModel> counted{&inner};
    SampleConfig cfg;
    cfg.pairs = 8;
    cfg.seed = 11;
    const EstimateResult r = estimate(spec, counted, cfg);
    c.expect(r.evals_per_pair == spec.cost(),
             "reported evals_per_pair != cost at d=" + std::to_string(d));
    return counted.evals;
  };
  auto check_spec = [&](const GsiSpec& spec, int d, const std::string& tag) {
    c.expect(observed(spec, d) == 8LL * spec.cost(),
             tag + ": engine evaluations != 8 * cost at d=" + std::to_string(d));
  };

  for (int d : {4, 5, 6, 8}) {
    const SubsetMask u = SubsetMask::of({1, 2, 3}, d);
    const SubsetMask w4 = SubsetMask::of({1, 2, 3, 4}, d);
    check_spec(lower_index(u), d, "lower_index");
    check_spec(upper_index(u), d, "upper_index");
    check_spec(mauntz_lower(u), d, "mauntz_lower");
    check_spec(variance_component_simple(u), d, "variance_component_simple");
    check_spec(variance_component_bilinear(u), d, "variance_component_bilinear");
    check_spec(variance_component_bilinear(u, SubsetMask::of({1}, d)), d,
               "variance_component_bilinear split");
    check_spec(superset_square(w4), d, "superset_square");
    check_spec(superset_bilinear(w4), d, "superset_bilinear");
    check_spec(mean_dimension(d), d, "mean_dimension");
    check_spec(first_order_total(d), d, "first_order_total");
    check_spec(second_order_total(d), d, "second_order_total");
    check_spec(mean_square_dimension(d), d, "mean_square_dimension");
    check_spec(trunc_tail_weight(d), d, "trunc_tail_weight");
    check_spec(trunc_head_weight(d), d, "trunc_head_weight");
    check_spec(index_spread(d), d, "index_spread");
    check_spec(segment_pairs(d), d, "segment_pairs");

    c.expect(mean_dimension(d).cost() == d + 1, "mean_dimension cost != d+1");
    c.expect(mean_square_dimension(d).cost() == d + 1, "mean_square_dimension cost != d+1");
    c.expect(trunc_tail_weight(d).cost() == d + 1, "trunc_tail_weight cost != d+1");
    c.expect(first_order_total(d).cost() == d + 2, "first_order_total cost != d+2");
    c.expect(second_order_total(d).cost() == 2 * d + 2, "second_order_total cost != 2d+2");
    c.expect(index_spread(d).cost() == 2 * d, "index_spread cost != 2d");
    c.expect(segment_pairs(d).cost() == 2 * d - 1, "segment_pairs cost != 2d-1");

    // Batched singleton/pair family: shared evaluations at d+2 (2d+2 extended).
    std::vector<GsiSpec> batch;
    for (const NamedSpec& n : saltelli_first_second(d)) batch.push_back(n.spec);
    c.expect(batch_cost(batch) == d + 2, "batch cost != d+2");
    std::vector<GsiSpec> extended;
    for (const NamedSpec& n : saltelli_first_second(d, true)) extended.push_back(n.spec);
    c.expect(batch_cost(extended) == 2 * d + 2, "extended batch cost != 2d+2");

    const MinModel inner(d);
    const detail::CountingModel<MinModel> counted{&inner};
    SampleConfig cfg;
    cfg.pairs = 8;
    cfg.seed = 11;
    const std::vector<EstimateResult> rs = estimate_batch<
        detail::CountingModel<MinModel>>(batch, counted, cfg);
    c.expect(counted.evals == 8LL * (d + 2), "batched engine evaluations != 8 * (d+2)");
    c.expect(!rs.empty() && rs[0].evals_per_pair == d + 2,
             "batched evals_per_pair != d+2");
  }

  c.expect(variance_component_simple(SubsetMask::of({1, 2, 3}, 5)).cost() == 9,
           "anchored component cost != 9 for |w|=3");
  c.expect(variance_component_bilinear(SubsetMask::of({1, 2, 3}, 5),
                                       SubsetMask::of({1}, 5))
                   .cost() == 6,
           "split component cost != 6 for |w|=3");
  c.expect(superset_square(SubsetMask::of({1, 2, 3, 4}, 8)).cost() == 16,
           "square superset cost != 16 for |w|=4");
  c.expect(superset_bilinear(SubsetMask::of({1, 2, 3, 4}, 8)).cost() == 7,
           "split superset cost != 7 for |w|=4");
  return c.result("cost_accounting", "declared costs equal observed evaluation counts");
}

/// On product-form models the anchored and all split variance-component
/// designs produce the same number for every individual sample pair.
inline SuiteResult verify_product_per_sample_identity() {
  detail::Checker c;
  const ProductModel model(std::vector<double>(5, 1.0), {0.5, 0.4, 0.3, 0.2, 0.1});
  const SubsetMask w = SubsetMask::of({1, 2, 3}, 5);
  const GsiSpec anchored = variance_component_simple(w);
  std::vector<GsiSpec> splits;
  for (const SubsetMask& w1 : subsets_of(w)) splits.push_back(variance_component_bilinear(w, w1));

  std::vector<double> x(5), z(5);
  for (int i = 0; i < 64; ++i) {
    rng::fill_pair(5000, 0, std::uint64_t(i), x, z);
    const double reference = per_pair_value(anchored, model, x, z);
    for (std::size_t s = 0; s < splits.size(); ++s)
      c.expect_near(per_pair_value(splits[s], model, x, z), reference, 1e-10,
                    "pair " + std::to_string(i) + " split " + std::to_string(s));
  }
  return c.result("product_per_sample_identity",
                  "anchored and split designs coincide per sample on product models");
}

/// Bit-identical estimates for worker counts 1, 2 and 8 on every
/// estimation path.
inline SuiteResult verify_worker_determinism() {
  detail::Checker c;
  const MinModel model(5);
  const GsiSpec spec = variance_component_bilinear(SubsetMask::of({1, 2, 3}, 5),
                                                   SubsetMask::of({1}, 5));

  auto run_plugin = [&](int workers) {
    SampleConfig cfg;
    cfg.pairs = 20'000;
    cfg.seed = 7;
    cfg.workers = workers;
    return estimate(spec, model, cfg);
  };
  const EstimateResult base = run_plugin(1);
  for (int workers : {2, 8}) {
    const EstimateResult r = run_plugin(workers);
    c.expect(r.estimate == base.estimate && r.std_error == base.std_error,
             "plug-in estimate differs at workers=" + std::to_string(workers));
  }

  auto run_corrected = [&](int workers) {
    SampleConfig cfg;
    cfg.pairs = 4'000;
    cfg.seed = 7;
    cfg.replicates = 8;
    cfg.workers = workers;
    return estimate_bias_corrected(lower_index(SubsetMask::of({1, 2}, 5)), model, cfg);
  };
  const EstimateResult cbase = run_corrected(1);
  for (int workers : {2, 8}) {
    const EstimateResult r = run_corrected(workers);
    c.expect(r.estimate == cbase.estimate && r.std_error == cbase.std_error,
             "bias-corrected estimate differs at workers=" + std::to_string(workers));
  }

  std::vector<GsiSpec> batch;
  for (const NamedSpec& n : saltelli_first_second(5)) batch.push_back(n.spec);
  auto run_batch = [&](int workers) {
    SampleConfig cfg;
    cfg.pairs = 20'000;
    cfg.seed = 7;
    cfg.workers = workers;
    return estimate_batch(batch, model, cfg);
  };
  const std::vector<EstimateResult> bbase = run_batch(1);
  for (int workers : {2, 8}) {
    const std::vector<EstimateResult> rs = run_batch(workers);
    for (std::size_t i = 0; i < rs.size(); ++i)
      c.expect(rs[i].estimate == bbase[i].estimate,
               "batched estimate " + std::to_string(i) + " differs at workers=" +
                   std::to_string(workers));
  }
  return c.result("worker_determinism", "results are bit-identical across worker counts");
}

inline std::vector<SuiteResult> run_verification() {
  return {verify_cross_moments(),        verify_moebius_roundtrip(),
          verify_split_designs(),        verify_exhaustive_unbiasedness(),
          verify_cost_accounting(),      verify_product_per_sample_identity(),
          verify_worker_determinism()};
}

}  // namespace gsi
