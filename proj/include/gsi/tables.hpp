#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "gsi/catalog.hpp"
#include "gsi/engine.hpp"
#include "gsi/models.hpp"
#include "gsi/serialize.hpp"

namespace gsi {

/// Benchmark 1: one variance component of the min function (d=5, w={1,2,3})
/// estimated four ways under a shared evaluation budget. The anchored
/// inclusion-exclusion design needs 9 evaluations per pair, the three split
/// designs 6, so the splits get more pairs for the same budget and a
/// smaller standard error.
struct Table1Row {
  std::string name;
  int cost = 0;
  long long pairs = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double se_ratio = 1.0;  // vs the first (anchored) row
};

struct Table1 {
  long long eval_budget = 0;
  std::uint64_t seed = 0;
  double truth = 0.0;
  std::vector<Table1Row> rows;
};

inline Table1 run_table1(long long eval_budget = 1'000'000, std::uint64_t seed = 0,
                         int workers = 1) {
  const MinModel model(5);
  const SubsetMask w = SubsetMask::of({1, 2, 3}, 5);

  std::vector<NamedSpec> designs;
  designs.push_back({"simple", variance_component_simple(w)});
  for (int j = 1; j <= 3; ++j) {
    const SubsetMask split = SubsetMask::singleton(j, 5);
    designs.push_back({"bilinear w1=" + split.str(),
                       variance_component_bilinear(w, split)});
  }

  Table1 out;
  out.eval_budget = eval_budget;
  out.seed = seed;
  out.truth = model.variance_component(w);
  for (const NamedSpec& d : designs) {
    const int cost = d.spec.cost();
    const long long pairs = eval_budget / cost;
    if (pairs < 2)
      throw std::invalid_argument("run_table1: budget of " + std::to_string(eval_budget) +
                                  " evaluations is too small");
    SampleConfig cfg;
    cfg.pairs = pairs;
    cfg.seed = seed;
    cfg.workers = workers;
    const EstimateResult r = estimate(d.spec, model, cfg);
    out.rows.push_back({d.name, cost, pairs, r.estimate, r.std_error, 1.0});
  }
  for (Table1Row& row : out.rows) row.se_ratio = row.std_error / out.rows[0].std_error;
  return out;
}

/// Benchmark 2: lower indices of three pairs of inputs of a product model
/// (d=6, unit means, tau = 1, 1, 1/2, 1/2, 1/4, 1/4), comparing the
/// two-evaluation mean-corrected design against the three-evaluation
/// contrast over replicated runs. The contrast can go negative but wins on
/// cost-adjusted variance once the index is small against the mean.
struct Table2Set {
  std::string set;
  double truth = 0.0;
  EstimatorSummary simple;    // lower_index(u), bias-corrected
  EstimatorSummary contrast;  // mauntz_lower(u), plain average
  double efficiency = 0.0;    // contrast vs simple, cost-adjusted
};

struct Table2 {
  long long pairs = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::vector<Table2Set> sets;
};

inline Table2 run_table2(long long pairs = 10'000, int replicates = 10'000,
                         std::uint64_t seed = 0, int workers = 1) {
  const ProductModel model(std::vector<double>(6, 1.0), {1.0, 1.0, 0.5, 0.5, 0.25, 0.25});

  Table2 out;
  out.pairs = pairs;
  out.replicates = replicates;
  out.seed = seed;
  for (int first = 1; first <= 5; first += 2) {
    const SubsetMask u = SubsetMask::of({first, first + 1}, 6);
    const std::vector<NamedSpec> designs{{"simple", lower_index(u)},
                                         {"contrast", mauntz_lower(u)}};
    const double truth = model.lower_index(u);
    const std::vector<double> truths{truth, truth};
    SampleConfig cfg;
    cfg.pairs = pairs;
    cfg.seed = seed;
    cfg.replicates = replicates;
    cfg.workers = workers;
    const StudyReport study = replicate_study(model, designs, truths, cfg, 0);
    Table2Set set;
    set.set = u.str();
    set.truth = truth;
    set.simple = study.estimators[0];
    set.contrast = study.estimators[1];
    set.efficiency = study.estimators[1].efficiency;
    out.sets.push_back(std::move(set));
  }
  return out;
}

/// Benchmark 3: superset importance of the two halves of a product model
/// (d=8, unit means, tau = 1, 1, 3/4, 3/4, 1/2, 1/2, 1/4, 1/4), comparing
/// the split bilinear design (7 evaluations) against the nonnegative square
/// design (16 evaluations). The square form wins by orders of magnitude
/// when the target is far below the total variance.
struct Table3Set {
  std::string set;
  double truth = 0.0;
  EstimatorSummary bilinear;  // superset_bilinear(w), default split
  EstimatorSummary square;    // superset_square(w)
  double efficiency = 0.0;    // square vs bilinear, cost-adjusted
};

struct Table3 {
  long long pairs = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::vector<Table3Set> sets;
};

inline Table3 run_table3(long long pairs = 1'000'000, int replicates = 50,
                         std::uint64_t seed = 0, int workers = 1) {
  const ProductModel model(std::vector<double>(8, 1.0),
                           {1.0, 1.0, 0.75, 0.75, 0.5, 0.5, 0.25, 0.25});

  Table3 out;
  out.pairs = pairs;
  out.replicates = replicates;
  out.seed = seed;
  for (int first = 1; first <= 5; first += 4) {
    const SubsetMask w = SubsetMask::of({first, first + 1, first + 2, first + 3}, 8);
    const std::vector<NamedSpec> designs{{"bilinear", superset_bilinear(w)},
                                         {"square", superset_square(w)}};
    const double truth = model.superset_importance(w);
    const std::vector<double> truths{truth, truth};
    SampleConfig cfg;
    cfg.pairs = pairs;
    cfg.seed = seed;
    cfg.replicates = replicates;
    cfg.workers = workers;
    const StudyReport study = replicate_study(model, designs, truths, cfg, 0);
    Table3Set set;
    set.set = w.str();
    set.truth = truth;
    set.bilinear = study.estimators[0];
    set.square = study.estimators[1];
    set.efficiency = study.estimators[1].efficiency;
    out.sets.push_back(std::move(set));
  }
  return out;
}

// --- rendering ---------------------------------------------------------------

namespace detail {

inline std::string sci(double v, int prec = 4) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(prec) << v;
  return os.str();
}

inline std::string fix(double v, int prec = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

inline std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

inline std::string to_text(const Table1& t) {
  std::ostringstream os;
  os << "variance component sigma2[1,2,3] of the min function, d=5\n"
     << "evaluation budget " << t.eval_budget << ", seed " << t.seed << ", truth "
     << detail::sci(t.truth) << "\n\n";
  os << detail::pad("estimator", 18) << detail::pad("cost", 6) << detail::pad("pairs", 9)
     << detail::pad("estimate", 13) << detail::pad("std_error", 13) << "se_ratio\n";
  for (const Table1Row& r : t.rows)
    os << detail::pad(r.name, 18) << detail::pad(std::to_string(r.cost), 6)
       << detail::pad(std::to_string(r.pairs), 9) << detail::pad(detail::sci(r.estimate), 13)
       << detail::pad(detail::sci(r.std_error), 13) << detail::fix(r.se_ratio) << "\n";
  return os.str();
}

inline std::string to_csv(const Table1& t) {
  std::ostringstream os;
  os << "name,cost,pairs,estimate,std_error,se_ratio,truth,eval_budget,seed\n";
  for (const Table1Row& r : t.rows)
    os << detail::csv_quote(r.name) << ',' << r.cost << ',' << r.pairs << ','
       << detail::fmt_double(r.estimate) << ',' << detail::fmt_double(r.std_error) << ','
       << detail::fmt_double(r.se_ratio) << ',' << detail::fmt_double(t.truth) << ','
       << t.eval_budget << ',' << t.seed << '\n';
  return os.str();
}

inline nlohmann::json to_json(const Table1& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Table1Row& r : t.rows)
    rows.push_back({{"name", r.name},
                    {"cost", r.cost},
                    {"pairs", r.pairs},
                    {"estimate", r.estimate},
                    {"std_error", r.std_error},
                    {"se_ratio", r.se_ratio}});
  return {{"table", 1},
          {"model", "min:d=5"},
          {"target", "sigma2[1,2,3]"},
          {"eval_budget", t.eval_budget},
          {"seed", t.seed},
          {"truth", t.truth},
          {"rows", std::move(rows)}};
}

namespace detail {

inline void study_text_row(std::ostringstream& os, const std::string& set,
                           const EstimatorSummary& s, double efficiency, bool with_neg) {
  os << pad(set, 12) << pad(s.name, 11) << pad(std::to_string(s.cost), 6)
     << pad(sci(s.truth), 13) << pad(sci(s.mean), 13) << pad(sci(s.bias, 2), 11)
     << pad(sci(s.sd), 13);
  if (with_neg) os << pad(fix(s.neg_fraction, 4), 8);
  os << fix(efficiency) << "\n";
}

inline nlohmann::json summary_json(const EstimatorSummary& s) {
  return {{"name", s.name},         {"cost", s.cost},
          {"kind", to_string(s.kind)}, {"truth", s.truth},
          {"mean", s.mean},         {"bias", s.bias},
          {"sd", s.sd},             {"se", s.se},
          {"neg_fraction", s.neg_fraction}, {"efficiency", s.efficiency}};
}

}  // namespace detail

inline std::string to_text(const Table2& t) {
  std::ostringstream os;
  os << "lower indices of input pairs, product model d=6 (mu all 1, tau "
        "1,1,0.5,0.5,0.25,0.25)\n"
     << "pairs " << t.pairs << ", replicates " << t.replicates << ", seed " << t.seed
     << "\n\n";
  os << detail::pad("set", 12) << detail::pad("estimator", 11) << detail::pad("cost", 6)
     << detail::pad("true", 13) << detail::pad("avg", 13) << detail::pad("bias", 11)
     << detail::pad("sd", 13) << detail::pad("neg", 8) << "eff\n";
  for (const Table2Set& s : t.sets) {
    detail::study_text_row(os, s.set, s.simple, 1.0, true);
    detail::study_text_row(os, s.set, s.contrast, s.efficiency, true);
  }
  return os.str();
}

inline std::string to_csv(const Table2& t) {
  std::ostringstream os;
  os << "set,estimator,cost,truth,mean,bias,sd,se,neg_fraction,efficiency\n";
  for (const Table2Set& s : t.sets)
    for (const EstimatorSummary* e : {&s.simple, &s.contrast})
      os << detail::csv_quote(s.set) << ',' << detail::csv_quote(e->name) << ','
         << e->cost << ',' << detail::fmt_double(e->truth) << ','
         << detail::fmt_double(e->mean) << ',' << detail::fmt_double(e->bias) << ','
         << detail::fmt_double(e->sd) << ',' << detail::fmt_double(e->se) << ','
         << detail::fmt_double(e->neg_fraction) << ','
         << detail::fmt_double(e->efficiency) << '\n';
  return os.str();
}

inline nlohmann::json to_json(const Table2& t) {
  nlohmann::json sets = nlohmann::json::array();
  for (const Table2Set& s : t.sets)
    sets.push_back({{"set", s.set},
                    {"truth", s.truth},
                    {"simple", detail::summary_json(s.simple)},
                    {"contrast", detail::summary_json(s.contrast)},
                    {"efficiency", s.efficiency}});
  return {{"table", 2},
          {"model", "product:mu=1,1,1,1,1,1;tau=1,1,0.5,0.5,0.25,0.25"},
          {"target", "lower(u)"},
          {"pairs", t.pairs},
          {"replicates", t.replicates},
          {"seed", t.seed},
          {"sets", std::move(sets)}};
}

inline std::string to_text(const Table3& t) {
  std::ostringstream os;
  os << "superset importance of the two input halves, product model d=8 (mu all 1, tau "
        "1,1,0.75,0.75,0.5,0.5,0.25,0.25)\n"
     << "pairs " << t.pairs << ", replicates " << t.replicates << ", seed " << t.seed
     << "\n\n";
  os << detail::pad("set", 12) << detail::pad("estimator", 11) << detail::pad("cost", 6)
     << detail::pad("true", 13) << detail::pad("avg", 13) << detail::pad("bias", 11)
     << detail::pad("sd", 13) << "eff\n";
  for (const Table3Set& s : t.sets) {
    detail::study_text_row(os, s.set, s.bilinear, 1.0, false);
    detail::study_text_row(os, s.set, s.square, s.efficiency, false);
  }
  return os.str();
}

inline std::string to_csv(const Table3& t) {
  std::ostringstream os;
  os << "set,estimator,cost,truth,mean,bias,sd,se,efficiency\n";
  for (const Table3Set& s : t.sets)
    for (const EstimatorSummary* e : {&s.bilinear, &s.square})
      os << detail::csv_quote(s.set) << ',' << detail::csv_quote(e->name) << ','
         << e->cost << ',' << detail::fmt_double(e->truth) << ','
         << detail::fmt_double(e->mean) << ',' << detail::fmt_double(e->bias) << ','
         << detail::fmt_double(e->sd) << ',' << detail::fmt_double(e->se) << ','
         << detail::fmt_double(e->efficiency) << '\n';
  return os.str();
}

inline nlohmann::json to_json(const Table3& t) {
  nlohmann::json sets = nlohmann::json::array();
  for (const Table3Set& s : t.sets)
    sets.push_back({{"set", s.set},
                    {"truth", s.truth},
                    {"bilinear", detail::summary_json(s.bilinear)},
                    {"square", detail::summary_json(s.square)},
                    {"efficiency", s.efficiency}});
  return {{"table", 3},
          {"model", "product:mu=1,1,1,1,1,1,1,1;tau=1,1,0.75,0.75,0.5,0.5,0.25,0.25"},
          {"target", "superset(w)"},
          {"pairs", t.pairs},
          {"replicates", t.replicates},
          {"seed", t.seed},
          {"sets", std::move(sets)}};
}

}  // namespace gsi
