// Acceptance gate: one line per check, nonzero exit if anything fails.
// Checks run at fixed seeds, so reruns are deterministic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "gsi/gsi.hpp"

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  if (!ok) ++failures;
}

void report_suite(const gsi::SuiteResult& r, const std::string& what, double elapsed,
                  double limit) {
  const bool in_time = elapsed <= limit;
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2fs, limit %.0fs)", elapsed, limit);
  report(r.passed && in_time, what, r.detail + buf);
}

int worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw > 8 ? 8 : hw);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_cross_moments() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_cross_moments();
  report_suite(r, "hybrid cross moments equal mean^2 + lower(nxor) on random tables",
               seconds_since(start), 10.0);
}

void check_moebius() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_moebius_roundtrip();
  report_suite(r, "component/lower-index inversion and variance split are exact",
               seconds_since(start), 10.0);
}

void check_split_designs() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_split_designs();
  report_suite(r, "all split component and superset designs hit brute-force targets",
               seconds_since(start), 30.0);
}

void check_exhaustive_unbiasedness() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_exhaustive_unbiasedness();
  report_suite(r, "corrected estimators average to the target over all 256 outcomes",
               seconds_since(start), 1.0);
}

void check_cost_accounting() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_cost_accounting();
  report_suite(r, "declared per-pair costs equal observed evaluation counts",
               seconds_since(start), 30.0);
}

void check_component_budget_study() {
  const auto start = std::chrono::steady_clock::now();
  const double truth = 1.0 / 5940.0;
  const int workers = worker_count();

  bool ok = true;
  std::string note;
  for (long long budget : {1'000'000LL, 100'000LL}) {
    const gsi::Table1 t = gsi::run_table1(budget, 0, workers);
    if (t.rows.size() != 4) ok = false;
    for (const gsi::Table1Row& r : t.rows)
      if (std::abs(r.estimate - truth) > 3.0 * r.std_error) {
        ok = false;
        note += " off-target " + r.name + " at budget " + std::to_string(budget);
      }
    for (std::size_t i = 1; i < t.rows.size(); ++i)
      if (t.rows[i].se_ratio < 0.40 || t.rows[i].se_ratio > 0.70) {
        ok = false;
        note += " ratio " + fmt(t.rows[i].se_ratio) + " outside [0.40,0.70]";
      }
    if (budget == 100'000)
      note = " desk-scale ratios " + fmt(t.rows[1].se_ratio) + ", " +
             fmt(t.rows[2].se_ratio) + ", " + fmt(t.rows[3].se_ratio) + note;
  }
  const double elapsed = seconds_since(start);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2fs, limit 60s)", elapsed);
  report(ok && elapsed <= 60.0,
         "all four component estimators agree with 1/5940 on the min benchmark",
         "budgets 1e6 and 1e5" + note + buf);
}

void check_pair_index_study() {
  const auto start = std::chrono::steady_clock::now();
  const double truths[3] = {3.0, 0.5625, 33.0 / 256.0};
  const double eff_target[3] = {0.53, 1.04, 2.54};

  const gsi::Table2 t = gsi::run_table2(10'000, 400, 0, worker_count());
  bool ok = t.sets.size() == 3;
  std::string note;
  for (std::size_t i = 0; ok && i < 3; ++i) {
    const gsi::Table2Set& s = t.sets[i];
    if (std::abs(s.truth - truths[i]) > 1e-12) {
      ok = false;
      note += " truth mismatch on " + s.set;
    }
    for (const gsi::EstimatorSummary* e : {&s.simple, &s.contrast})
      if (std::abs(e->mean - e->truth) > 4.0 * e->se) {
        ok = false;
        note += " biased " + e->name + " on " + s.set;
      }
    if (s.efficiency < 0.7 * eff_target[i] || s.efficiency > 1.3 * eff_target[i]) {
      ok = false;
      note += " efficiency " + fmt(s.efficiency) + " on " + s.set;
    }
  }
  if (ok) {
    note = " efficiencies " + fmt(t.sets[0].efficiency) + ", " +
           fmt(t.sets[1].efficiency) + ", " + fmt(t.sets[2].efficiency);
    const double neg = t.sets[2].simple.neg_fraction;
    note += "; negative fraction " + fmt(neg);
    if (neg < 0.01 || neg > 0.07) ok = false;
  }
  const double elapsed = seconds_since(start);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2fs, limit 300s)", elapsed);
  report(ok && elapsed <= 300.0,
         "pair lower-index study reproduces truths, efficiencies and sign failures",
         note.empty() ? std::string("ran") + buf : note + buf);
}

void check_superset_study() {
  const auto start = std::chrono::steady_clock::now();
  const double truths[2] = {585225.0 / 1048576.0, 625.0 / 262144.0};

  const gsi::Table3 t = gsi::run_table3(100'000, 50, 0, worker_count());
  bool ok = t.sets.size() == 2;
  std::string note;
  if (ok) {
    for (std::size_t i = 0; i < 2; ++i)
      if (std::abs(t.sets[i].truth - truths[i]) > 1e-10) {
        ok = false;
        note += " truth mismatch on " + t.sets[i].set;
      }
    note += " efficiencies " + fmt(t.sets[0].efficiency) + ", " +
            fmt(t.sets[1].efficiency);
    if (!(t.sets[0].efficiency > 5.0)) ok = false;
    if (!(t.sets[1].efficiency > 100.0)) ok = false;
  }
  const double elapsed = seconds_since(start);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2fs, limit 300s)", elapsed);
  report(ok && elapsed <= 300.0,
         "square superset designs beat the split form by the expected margins",
         note + buf);
}

void check_dimension_designs() {
  const auto start = std::chrono::steady_clock::now();
  const int workers = worker_count();
  bool ok = true;
  std::string note;

  {
    const gsi::MinModel model(5);
    gsi::SampleConfig cfg;
    cfg.pairs = 100'000;
    cfg.seed = 0;
    cfg.workers = workers;
    const gsi::EstimateResult r = gsi::estimate(gsi::mean_dimension(5), model, cfg);
    const double total = model.total_variance();
    const double nu = r.estimate / total, se = r.std_error / total;
    note += "mean dimension " + fmt(nu) + " +- " + fmt(se);
    if (std::abs(nu - 1.5) > 3.0 * se) ok = false;
  }
  {
    const gsi::GridFunction grid = gsi::make_test_grid(4, 3, 271);
    const gsi::AnovaResult anova = gsi::brute_force_anova(grid);
    double truth = 0.0;
    for (const auto& [u, s] : anova.sigma)
      truth += double(u.cardinality()) * double(u.cardinality()) * s;
    gsi::SampleConfig cfg;
    cfg.pairs = 100'000;
    cfg.seed = 0;
    cfg.workers = workers;
    const gsi::EstimateResult r =
        gsi::estimate(gsi::mean_square_dimension(4), grid, cfg);
    note += "; squared-dimension total " + fmt(r.estimate) + " vs oracle " + fmt(truth);
    if (std::abs(r.estimate - truth) > 3.0 * r.std_error) ok = false;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, " (%.2fs)", seconds_since(start));
  report(ok, "dimension-weighted designs match their closed-form and oracle targets",
         note + buf);
}

void check_per_sample_identity() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_product_per_sample_identity();
  report_suite(r, "anchored and split component estimators coincide sample by sample",
               seconds_since(start), 30.0);
}

void check_worker_determinism() {
  const auto start = std::chrono::steady_clock::now();
  const gsi::SuiteResult r = gsi::verify_worker_determinism();
  report_suite(r, "estimates are bit-identical for 1, 2 and 8 workers",
               seconds_since(start), 60.0);
}

}  // namespace

int main() {
  check_cross_moments();
  check_moebius();
  check_split_designs();
  check_exhaustive_unbiasedness();
  check_cost_accounting();
  check_component_budget_study();
  check_pair_index_study();
  check_superset_study();
  check_dimension_designs();
  check_per_sample_identity();
  check_worker_determinism();

  if (failures == 0)
    std::printf("all 11 checks passed\n");
  else
    std::printf("%d of 11 checks failed\n", failures);
  return failures == 0 ? 0 : 1;
}
