#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gsi/models.hpp"
#include "gsi/verify.hpp"

using namespace gsi;

namespace {

const std::vector<double> kOnes6(6, 1.0);
const std::vector<double> kTau6{1.0, 1.0, 0.5, 0.5, 0.25, 0.25};

}  // namespace

TEST_CASE("product model closed forms") {
  const ProductModel f(kOnes6, kTau6);
  CHECK(f.mean() == 1.0);
  CHECK(f.lower_index(SubsetMask::of({1, 2}, 6)) == Catch::Approx(3.0).margin(1e-12));
  CHECK(f.lower_index(SubsetMask::of({3, 4}, 6)) == Catch::Approx(0.5625).margin(1e-12));
  CHECK(f.lower_index(SubsetMask::of({5, 6}, 6)) ==
        Catch::Approx(33.0 / 256.0).margin(1e-12));
  CHECK(f.variance_component(SubsetMask::of({1, 2}, 6)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(f.variance_component(SubsetMask::empty_set(6)) == 0.0);
  CHECK(f.upper_index(SubsetMask::full_set(6)) ==
        Catch::Approx(f.total_variance()).margin(1e-12));

  // Components over all subsets must add up to the total variance.
  double sum = 0.0;
  for (const SubsetMask& u : all_subsets(6)) sum += f.variance_component(u);
  CHECK(sum == Catch::Approx(f.total_variance()).epsilon(1e-12));

  // Superset importance of w counts exactly the components above w.
  const SubsetMask w = SubsetMask::of({1, 5}, 6);
  double ups = 0.0;
  for (const SubsetMask& u : all_subsets(6))
    if (w.subset_of(u)) ups += f.variance_component(u);
  CHECK(f.superset_importance(w) == Catch::Approx(ups).epsilon(1e-12));
}

TEST_CASE("product model mean dimension") {
  const ProductModel f({1.0, 1.0}, {1.0, 1.0});
  // Components 1, 1 and 1, so (1 + 1 + 2) / 3.
  CHECK(f.mean_dimension() == Catch::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(exact_index(f, IndexKind::MeanDimension, SubsetMask::empty_set(2)) ==
        Catch::Approx(4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("product model evaluation") {
  const ProductModel f({2.0, 3.0}, {1.0, 0.5});
  const std::vector<double> mid{0.5, 0.5};
  CHECK(f.eval(mid) == Catch::Approx(6.0).margin(1e-14));
  const std::vector<double> x{1.0, 0.0};
  const double root3 = std::sqrt(3.0);
  CHECK(f.eval(x) == Catch::Approx((2.0 + root3) * (3.0 - 0.5 * root3)).epsilon(1e-14));
  CHECK_THROWS_AS(f.eval(std::vector<double>{0.5}), std::invalid_argument);
  CHECK_THROWS_AS(f.eval(std::vector<double>{0.5, 1.5}), std::out_of_range);
}

TEST_CASE("product model custom base validation") {
  // Valid: the standardized linear base again, handed in explicitly.
  const ProductModel ok({1.0}, {1.0},
                        [](double t) { return std::sqrt(12.0) * (t - 0.5); });
  const std::vector<double> q{0.25};
  CHECK(ok.eval(q) == Catch::Approx(1.0 + std::sqrt(12.0) * -0.25).epsilon(1e-12));

  CHECK_THROWS_AS(ProductModel({1.0}, {1.0}, [](double) { return 1.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(ProductModel({1.0}, {1.0}, [](double t) { return t - 0.5; }),
                  std::invalid_argument);
}

TEST_CASE("min model closed forms") {
  const MinModel f(5);
  CHECK(f.mean() == Catch::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(f.total_variance() == Catch::Approx(5.0 / 252.0).epsilon(1e-14));
  CHECK(f.lower_index(SubsetMask::of({1, 2, 3, 4}, 5)) ==
        Catch::Approx(1.0 / 72.0).epsilon(1e-14));
  CHECK(f.variance_component(SubsetMask::of({1, 2, 3}, 5)) ==
        Catch::Approx(1.0 / 5940.0).epsilon(1e-12));
  CHECK(f.mean_dimension() == Catch::Approx(1.5).epsilon(1e-14));

  double sum = 0.0;
  for (const SubsetMask& u : all_subsets(5)) sum += f.variance_component(u);
  CHECK(sum == Catch::Approx(f.total_variance()).epsilon(1e-12));

  const SubsetMask w = SubsetMask::of({2, 4}, 5);
  double ups = 0.0;
  for (const SubsetMask& u : all_subsets(5))
    if (w.subset_of(u)) ups += f.variance_component(u);
  CHECK(f.superset_importance(w) == Catch::Approx(ups).epsilon(1e-12));

  const std::vector<double> x{0.9, 0.2, 0.7, 0.4, 0.6};
  CHECK(f.eval(x) == 0.2);
}

TEST_CASE("grid function lookup") {
  const GridFunction gf(2, 2, {0.0, 1.0, 2.0, 3.0});
  const std::vector<double> a{0.2, 0.7};
  CHECK(gf.eval(a) == 1.0);
  const std::vector<double> b{1.0, 1.0};  // upper boundary folds into last cell
  CHECK(gf.eval(b) == 3.0);
  const int lv[2] = {1, 0};
  CHECK(gf.value_at(lv) == 2.0);

  CHECK_THROWS_AS(GridFunction(2, 2, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GridFunction(2, 1, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("lattice decomposition of an additive table") {
  // f(i, j) = 2i + j has no interaction: axis effects +-1 and +-0.5.
  const GridFunction gf(2, 2, {0.0, 1.0, 2.0, 3.0});
  const AnovaResult anova = brute_force_anova(gf);
  CHECK(anova.mean == Catch::Approx(1.5).margin(1e-14));
  CHECK(anova.sigma.at(SubsetMask::of({1}, 2)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(anova.sigma.at(SubsetMask::of({2}, 2)) == Catch::Approx(0.25).margin(1e-12));
  CHECK(anova.sigma.at(SubsetMask::full_set(2)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(anova.total_variance() == Catch::Approx(1.25).margin(1e-12));

  const ExactMoments m = moments_from_anova(anova);
  CHECK(m.lower.at(SubsetMask::of({1, 2}, 2)) == Catch::Approx(1.25).margin(1e-12));

  // Cross moment against the closed form, both arguments equal.
  const double theta = brute_force_theta(gf, SubsetMask::of({1}, 2), SubsetMask::of({1}, 2));
  CHECK(theta == Catch::Approx(1.5 * 1.5 + 1.25).margin(1e-12));
}

TEST_CASE("lattice decomposition enforces enumeration limits") {
  CHECK_THROWS_AS(brute_force_theta(GridFunction(4, 11, std::vector<double>(14641, 0.0)),
                                    SubsetMask::of({1}, 4), SubsetMask::of({2}, 4)),
                  enumeration_limit);
}

TEST_CASE("closed-form moment tables match the lattice oracle") {
  // A product model whose factors are two-level steps lives on a grid, so
  // the analytic moments can be checked against brute force enumeration.
  const GridFunction gf = make_test_grid(3, 3, 77);
  const AnovaResult anova = brute_force_anova(gf);
  const ExactMoments m = moments_from_anova(anova);
  double total = 0.0;
  for (const auto& [u, s] : anova.sigma) total += s;
  CHECK(m.lower.at(SubsetMask::full_set(3)) == Catch::Approx(total).margin(1e-12));
  CHECK(m.lower.at(SubsetMask::empty_set(3)) == 0.0);
}

TEST_CASE("exact moments of analytic models") {
  const ProductModel f(kOnes6, kTau6);
  const ExactMoments m = exact_moments(f);
  CHECK(m.mean == 1.0);
  CHECK(m.lower.at(SubsetMask::of({1, 2}, 6)) == Catch::Approx(3.0).margin(1e-12));

  const MinModel g(4);
  const ExactMoments mg = exact_moments(g);
  CHECK(mg.lower.at(SubsetMask::full_set(4)) ==
        Catch::Approx(g.total_variance()).epsilon(1e-14));
  CHECK(exact_index(g, IndexKind::Lower, SubsetMask::of({1}, 4)) ==
        Catch::Approx(1.0 / 225.0).epsilon(1e-14));
}

TEST_CASE("grid functions have no closed forms") {
  const GridFunction gf(2, 2, {0.0, 1.0, 2.0, 3.0});
  CHECK_THROWS_AS(exact_index(gf, IndexKind::Lower, SubsetMask::of({1}, 2)),
                  std::invalid_argument);
}
