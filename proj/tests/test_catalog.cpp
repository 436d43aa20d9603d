#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "gsi/catalog.hpp"
#include "gsi/models.hpp"

using namespace gsi;

namespace {

// Weighted component sums on the min model, computed straight from the
// closed-form components as an independent oracle.
double min_weighted_sum(const MinModel& f, double (*weight)(const SubsetMask&, int)) {
  double acc = 0.0;
  for (const SubsetMask& u : all_subsets(f.dimension())) {
    if (u.empty()) continue;
    acc += weight(u, f.dimension()) * f.variance_component(u);
  }
  return acc;
}

}  // namespace

TEST_CASE("catalog costs") {
  const int d = 5;
  const SubsetMask w = SubsetMask::of({1, 2, 3}, d);
  CHECK(variance_component_simple(w).cost() == 9);
  CHECK(variance_component_simple(SubsetMask::full_set(3)).cost() == 8);
  CHECK(variance_component_bilinear(w, SubsetMask::of({1}, d)).cost() == 6);
  CHECK(variance_component_bilinear(w).cost() == 6);  // default split |w1| = 1
  CHECK(variance_component_bilinear(SubsetMask::full_set(2), SubsetMask::of({1}, 2)).cost() ==
        3);
  CHECK(superset_square(SubsetMask::of({1, 2, 3, 4}, 8)).cost() == 16);
  CHECK(superset_bilinear(SubsetMask::of({1, 2, 3, 4}, 8)).cost() == 7);
  CHECK(mean_dimension(d).cost() == d + 1);
  CHECK(mean_square_dimension(d).cost() == d + 1);
  CHECK(first_order_total(d).cost() == d + 2);
  CHECK(second_order_total(d).cost() == 2 * d + 2);
  CHECK(trunc_tail_weight(d).cost() == d + 1);
  CHECK(trunc_head_weight(d).cost() == d + 1);
  CHECK(index_spread(d).cost() == 2 * d);
  CHECK(segment_pairs(d).cost() == 2 * d - 1);
}

TEST_CASE("catalog targets on the min model") {
  const MinModel f(5);
  const ExactMoments m = exact_moments(f);
  const double total = f.total_variance();

  CHECK(expected_value(mean_dimension(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int) {
          return double(u.cardinality());
        })).epsilon(1e-12));
  CHECK(expected_value(mean_dimension(5), m) / total == Catch::Approx(1.5).epsilon(1e-12));

  CHECK(expected_value(mean_square_dimension(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int) {
          return double(u.cardinality()) * double(u.cardinality());
        })).epsilon(1e-12));

  CHECK(expected_value(first_order_total(5), m) ==
        Catch::Approx(5.0 * f.lower_index(SubsetMask::of({1}, 5))).epsilon(1e-12));

  CHECK(expected_value(second_order_total(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int) {
          return u.cardinality() == 2 ? 1.0 : 0.0;
        })).epsilon(1e-12));

  CHECK(expected_value(trunc_tail_weight(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int d) {
          return double(d - u.max_index());
        })).epsilon(1e-12));

  CHECK(expected_value(trunc_head_weight(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int) {
          return double(u.min_index() - 1);
        })).epsilon(1e-12));

  CHECK(expected_value(index_spread(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int) {
          return double(u.max_index() - u.min_index());
        })).epsilon(1e-12));

  CHECK(expected_value(segment_pairs(5), m) ==
        Catch::Approx(min_weighted_sum(f, [](const SubsetMask& u, int d) {
          return double(u.min_index()) * double(d - u.max_index() + 1);
        })).epsilon(1e-12));
}

TEST_CASE("pairwise interaction total equals the elementary symmetric sum") {
  // On a unit-mean product model the order-two components are the pairwise
  // products of the factor variances.
  const ProductModel f(std::vector<double>(8, 1.0),
                       {1.0, 1.0, 0.75, 0.75, 0.5, 0.5, 0.25, 0.25});
  double e2 = 0.0;
  for (int j = 0; j < 8; ++j)
    for (int k = j + 1; k < 8; ++k) {
      const double tj = f.tau()[std::size_t(j)], tk = f.tau()[std::size_t(k)];
      e2 += tj * tj * tk * tk;
    }
  CHECK(expected_value(second_order_total(8), exact_moments(f)) ==
        Catch::Approx(e2).epsilon(1e-12));
}

TEST_CASE("component designs hit their component on a product model") {
  const ProductModel f({1.0, 1.0, 1.0}, {1.0, 0.8, 0.6});
  const ExactMoments m = exact_moments(f);
  const SubsetMask w = SubsetMask::of({1, 3}, 3);
  const double truth = f.variance_component(w);
  CHECK(expected_value(variance_component_simple(w), m) ==
        Catch::Approx(truth).epsilon(1e-12));
  for (const SubsetMask& w1 : subsets_of(w))
    CHECK(expected_value(variance_component_bilinear(w, w1), m) ==
          Catch::Approx(truth).epsilon(1e-12));

  const double ups = f.superset_importance(w);
  CHECK(expected_value(superset_square(w), m) == Catch::Approx(ups).epsilon(1e-12));
  for (const SubsetMask& w1 : subsets_of(w))
    CHECK(expected_value(superset_bilinear(w, w1), m) == Catch::Approx(ups).epsilon(1e-12));
}

TEST_CASE("split validation") {
  const SubsetMask w = SubsetMask::of({1, 2}, 4);
  CHECK_THROWS_AS(variance_component_bilinear(w, SubsetMask::of({3}, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(variance_component_bilinear(w, SubsetMask::of({1}, 3)),
                  dimension_mismatch);
  CHECK_THROWS_AS(variance_component_simple(SubsetMask::empty_set(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(upper_index(SubsetMask::empty_set(4)), std::invalid_argument);
  CHECK_THROWS_AS(second_order_total(1), std::invalid_argument);
  CHECK_THROWS_AS(index_spread(1), std::invalid_argument);
}

TEST_CASE("batched singleton and pair family") {
  const ProductModel f({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 0.5, 0.5, 0.25, 0.25});
  const ExactMoments m = exact_moments(f);

  const std::vector<NamedSpec> basic = saltelli_first_second(6);
  REQUIRE(basic.size() == 6 + 6 + 15);
  std::vector<GsiSpec> bare;
  for (const NamedSpec& n : basic) bare.push_back(n.spec);
  CHECK(batch_cost(bare) == 8);

  for (const NamedSpec& n : basic) {
    if (n.name == "lower[1]")
      CHECK(expected_value(n.spec, m) ==
            Catch::Approx(f.lower_index(SubsetMask::of({1}, 6))).epsilon(1e-12));
    if (n.name == "upper[3]")
      CHECK(expected_value(n.spec, m) ==
            Catch::Approx(f.upper_index(SubsetMask::of({3}, 6))).epsilon(1e-12));
    if (n.name == "upper[5,6]")
      CHECK(expected_value(n.spec, m) ==
            Catch::Approx(f.upper_index(SubsetMask::of({5, 6}, 6))).epsilon(1e-12));
  }

  const std::vector<NamedSpec> extended = saltelli_first_second(6, true);
  REQUIRE(extended.size() == basic.size() + 15);
  std::vector<GsiSpec> bare_ext;
  for (const NamedSpec& n : extended) bare_ext.push_back(n.spec);
  CHECK(batch_cost(bare_ext) == 14);
  for (const NamedSpec& n : extended)
    if (n.name == "lower[2,4]")
      CHECK(expected_value(n.spec, m) ==
            Catch::Approx(f.lower_index(SubsetMask::of({2, 4}, 6))).epsilon(1e-12));
}

TEST_CASE("catalog registry") {
  const auto& entries = catalog_entries();
  CHECK(entries.size() == 16);
  std::set<std::string> names;
  for (const CatalogEntryInfo& e : entries) names.insert(e.name);
  CHECK(names.size() == entries.size());

  const std::vector<NamedSpec> one =
      make_catalog_specs("lower_index", 5, SubsetMask::of({1, 2}, 5));
  REQUIRE(one.size() == 1);
  CHECK(one[0].name == "lower_index[1,2]");

  CHECK_THROWS_AS(make_catalog_specs("lower_index", 5, std::nullopt),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_catalog_specs("nonsense", 5, std::nullopt), std::invalid_argument);
  CHECK(make_catalog_specs("saltelli_first_second", 4, std::nullopt).size() == 4 + 4 + 6);
}
