#include <catch2/catch_amalgamated.hpp>

#include "gsi/subset.hpp"

using namespace gsi;

TEST_CASE("subset construction and accessors") {
  const SubsetMask u = SubsetMask::of({1, 3, 4}, 5);
  CHECK(u.dimension() == 5);
  CHECK(u.cardinality() == 3);
  CHECK(u.contains(1));
  CHECK_FALSE(u.contains(2));
  CHECK(u.min_index() == 1);
  CHECK(u.max_index() == 4);
  CHECK(u.str() == "[1,3,4]");
  CHECK(u.to_indices() == std::vector<int>{1, 3, 4});

  CHECK(SubsetMask::empty_set(3).empty());
  CHECK(SubsetMask::empty_set(3).str() == "[]");
  CHECK(SubsetMask::full_set(3).is_full());
  CHECK(SubsetMask::singleton(2, 3) == SubsetMask::of({2}, 3));
}

TEST_CASE("subset parsing") {
  CHECK(SubsetMask::parse("[1,3,4]", 5) == SubsetMask::of({1, 3, 4}, 5));
  CHECK(SubsetMask::parse("[]", 5) == SubsetMask::empty_set(5));
  CHECK(SubsetMask::parse("[ 2 , 5 ]", 5) == SubsetMask::of({2, 5}, 5));
  CHECK_THROWS_AS(SubsetMask::parse("[7]", 5), std::out_of_range);
  CHECK_THROWS_AS(SubsetMask::parse("[0]", 5), std::out_of_range);
  CHECK_THROWS_AS(SubsetMask::parse("1,2", 5), std::invalid_argument);
  CHECK_THROWS_AS(SubsetMask::of({7}, 5), std::out_of_range);
  CHECK_THROWS_AS(SubsetMask::of({1}, 21), std::invalid_argument);
}

TEST_CASE("set algebra") {
  const int d = 3;
  const SubsetMask u = SubsetMask::of({1, 2}, d);
  const SubsetMask v = SubsetMask::of({2, 3}, d);
  CHECK(xor_set(u, v) == SubsetMask::of({1, 3}, d));
  CHECK(nxor_set(u, v) == SubsetMask::of({2}, d));
  CHECK(complement(u) == SubsetMask::of({3}, d));
  CHECK(set_union(u, v) == SubsetMask::full_set(d));
  CHECK(set_intersection(u, v) == SubsetMask::of({2}, d));
  CHECK(set_difference(u, v) == SubsetMask::of({1}, d));
  CHECK(u.subset_of(SubsetMask::full_set(d)));
  CHECK_FALSE(u.subset_of(v));

  CHECK(nxor_set(u, u) == SubsetMask::full_set(d));
  CHECK(nxor_set(u, complement(u)) == SubsetMask::empty_set(d));

  CHECK_THROWS_AS(set_union(u, SubsetMask::of({1}, 4)), dimension_mismatch);
}

TEST_CASE("nxor survives complementing both arguments") {
  const int d = 4;
  for (const SubsetMask& u : all_subsets(d))
    for (const SubsetMask& v : all_subsets(d))
      CHECK(nxor_set(u, v) == nxor_set(complement(u), complement(v)));
}

TEST_CASE("hybrid restriction identity") {
  // For u, v inside w: nxor(u, v + w^c) = nxor(u, v) intersect w. This is
  // what lets split designs collapse onto components supported inside w.
  const int d = 4;
  for (const SubsetMask& w : all_subsets(d))
    for (const SubsetMask& u : subsets_of(w))
      for (const SubsetMask& v : subsets_of(w)) {
        const SubsetMask lhs = nxor_set(u, set_union(v, complement(w)));
        const SubsetMask rhs = set_intersection(nxor_set(u, v), w);
        CHECK(lhs == rhs);
      }
}

TEST_CASE("subset enumeration") {
  const SubsetMask w = SubsetMask::of({1, 3}, 4);
  const std::vector<SubsetMask> subs = subsets_of(w);
  REQUIRE(subs.size() == 4);
  CHECK(subs[0] == SubsetMask::empty_set(4));
  CHECK(subs[3] == w);
  for (const SubsetMask& v : subs) CHECK(v.subset_of(w));

  CHECK(all_subsets(3).size() == 8);
  CHECK_THROWS_AS(all_subsets(13), enumeration_limit);
}

TEST_CASE("component/lower-index transforms invert each other") {
  // Both transforms need the full sublattice under each queried key; sparse
  // maps with genuinely absent subsets are rejected, zeros must be explicit.
  IndexMap sparse;
  sparse.emplace(SubsetMask::of({1}, 3), 0.5);
  sparse.emplace(SubsetMask::full_set(3), 0.125);
  CHECK_THROWS_AS(lower_from_sigma(sparse), std::out_of_range);

  IndexMap sigma;
  for (const SubsetMask& u : all_subsets(3))
    if (!u.empty()) sigma.emplace(u, 0.0);
  sigma[SubsetMask::of({1}, 3)] = 0.5;
  sigma[SubsetMask::of({2}, 3)] = 0.25;
  sigma[SubsetMask::of({1, 3}, 3)] = 1.5;
  sigma[SubsetMask::full_set(3)] = 0.125;

  const IndexMap lower = lower_from_sigma(sigma);
  CHECK(lower.at(SubsetMask::of({1}, 3)) == 0.5);
  CHECK(lower.at(SubsetMask::of({1, 2}, 3)) == 0.75);
  CHECK(lower.at(SubsetMask::full_set(3)) == Catch::Approx(2.375).epsilon(1e-14));

  const IndexMap back = sigma_from_lower(lower);
  for (const auto& [u, s] : sigma)
    CHECK(back.at(u) == Catch::Approx(s).margin(1e-14));
  CHECK(back.at(SubsetMask::of({3}, 3)) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("subset ordering is by dimension then mask") {
  const SubsetMask a = SubsetMask::of({1}, 3);
  const SubsetMask b = SubsetMask::of({2}, 3);
  CHECK(a < b);
  CHECK(a == SubsetMask::of({1}, 3));
  CHECK(SubsetMask::of({1}, 2) < a);
}
