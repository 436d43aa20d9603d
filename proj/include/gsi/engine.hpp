#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gsi/catalog.hpp"
#include "gsi/models.hpp"
#include "gsi/rng.hpp"
#include "gsi/spec.hpp"
#include "gsi/subset.hpp"

namespace gsi {

struct SampleConfig {
  long long pairs = 10'000;  // pick-and-freeze pairs per replicate
  std::uint64_t seed = 0;
  int replicates = 1;  // independent repetitions on the bias-corrected path
  int workers = 1;     // worker threads; never changes the result bits
};

enum class EstimatorKind {
  PlugIn,         // average of per-pair statistics, mean-corrected if needed
  SquareForm,     // per-pair statistic itself a (sum of) squares
  BiasCorrected,  // exactly unbiased mean/variance corrected form
};

inline std::string to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::PlugIn: return "plug_in";
    case EstimatorKind::SquareForm: return "square_form";
    case EstimatorKind::BiasCorrected: return "bias_corrected";
  }
  throw std::invalid_argument("to_string: unknown EstimatorKind");
}

struct EstimateResult {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  long long pairs = 0;
  int replicates = 1;
  int evals_per_pair = 0;
  long long total_evals = 0;
  EstimatorKind kind = EstimatorKind::PlugIn;
};

namespace detail {

/// Pairs per accumulation chunk. Chunks are merged in index order whatever
/// the thread count, which pins the floating-point result.
inline constexpr long long kChunkPairs = 4096;

struct MeanVar {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / double(n);
    m2 += d * (v - mean);
  }

  void merge(const MeanVar& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const long long total = n + o.n;
    mean += d * double(o.n) / double(total);
    m2 += o.m2 + d * d * double(n) * double(o.n) / double(total);
    n = total;
  }

  double sample_variance() const { return n >= 2 ? m2 / double(n - 1) : 0.0; }
};

struct PlanEntry {
  std::size_t a, b;
  double w;
};

/// A spec resolved against a concrete support ordering: per-pair statistic
/// plus the entry list the corrected estimators need.
struct SpecPlan {
  enum class Route { EntrySum, Factored, Squares };

  double scale = 1.0;
  bool contrast = true;
  Route route = Route::EntrySum;
  std::vector<PlanEntry> entries;
  std::vector<std::pair<std::size_t, double>> lambda, gamma;
  std::vector<std::vector<std::pair<std::size_t, double>>> squares;

  double per_pair(const double* f) const {
    double t = 0.0;
    switch (route) {
      case Route::Factored: {
        double a = 0.0, b = 0.0;
        for (const auto& [i, w] : lambda) a += w * f[i];
        for (const auto& [i, w] : gamma) b += w * f[i];
        t = a * b;
        break;
      }
      case Route::Squares:
        for (const auto& term : squares) {
          double a = 0.0;
          for (const auto& [i, w] : term) a += w * f[i];
          t += a * a;
        }
        break;
      case Route::EntrySum:
        for (const PlanEntry& e : entries) t += e.w * f[e.a] * f[e.b];
        break;
    }
    return scale * t;
  }
};

inline std::size_t support_index(const std::vector<SubsetMask>& support,
                                 const SubsetMask& u) {
  const auto it = std::lower_bound(support.begin(), support.end(), u);
  if (it == support.end() || *it != u)
    throw std::logic_error("support_index: subset " + u.str() + " not in support");
  return static_cast<std::size_t>(it - support.begin());
}

inline SpecPlan build_plan(const GsiSpec& spec, const std::vector<SubsetMask>& support) {
  SpecPlan p;
  p.scale = spec.scale();
  p.contrast = spec.is_contrast();
  p.entries.reserve(spec.entry_count());
  for (const auto& [key, w] : spec.weights())
    p.entries.push_back({support_index(support, key.first),
                         support_index(support, key.second), w});
  switch (spec.kind()) {
    case SpecKind::Bilinear:
      p.route = SpecPlan::Route::Factored;
      for (const auto& [u, w] : spec.lambda()) p.lambda.emplace_back(support_index(support, u), w);
      for (const auto& [u, w] : spec.gamma()) p.gamma.emplace_back(support_index(support, u), w);
      break;
    case SpecKind::Square:
    case SpecKind::SumOfSquares:
      p.route = SpecPlan::Route::Squares;
      for (const IndexMap& term : spec.square_terms()) {
        std::vector<std::pair<std::size_t, double>> resolved;
        resolved.reserve(term.size());
        for (const auto& [u, w] : term) resolved.emplace_back(support_index(support, u), w);
        p.squares.push_back(std::move(resolved));
      }
      break;
    case SpecKind::General:
      p.route = SpecPlan::Route::EntrySum;
      break;
  }
  return p;
}

struct RunOutput {
  long long pairs = 0;
  std::vector<MeanVar> t_stats;                 // per spec
  std::vector<double> row_sum, row_sum2;        // per support row
  std::vector<std::vector<double>> entry_prod;  // per spec, if requested
};

/// Runs fn(0..count-1); slots are claimed atomically so worker count only
/// changes who computes a slot, never what is computed.
inline void parallel_slots(long long count, int workers,
                           const std::function<void(long long)>& fn) {
  const long long use = std::min<long long>(std::max(workers, 1), count);
  if (use <= 1) {
    for (long long c = 0; c < count; ++c) fn(c);
    return;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      const long long c = next.fetch_add(1);
      if (c >= count) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(use));
  for (long long t = 0; t < use; ++t) pool.emplace_back(body);
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <EvaluableModel M>
RunOutput run_design(const M& model, const std::vector<SubsetMask>& support,
                     const std::vector<SpecPlan>& plans, long long pairs,
                     std::uint64_t seed, std::uint64_t rep, int workers,
                     bool with_entry_products) {
  const int d = model.dimension();
  const std::size_t rows = support.size(), specs = plans.size();
  const long long chunks = (pairs + kChunkPairs - 1) / kChunkPairs;

  // Per-row pick pattern: 1 takes the coordinate from x, 0 from z.
  std::vector<std::uint8_t> pick(rows * std::size_t(d));
  for (std::size_t r = 0; r < rows; ++r)
    for (int j = 0; j < d; ++j)
      pick[r * std::size_t(d) + std::size_t(j)] =
          std::uint8_t((support[r].bits() >> j) & 1u);

  struct ChunkOut {
    std::vector<MeanVar> t;
    std::vector<double> s1, s2;
    std::vector<std::vector<double>> p;
  };
  std::vector<ChunkOut> chunk(static_cast<std::size_t>(chunks));

  auto work = [&](long long c) {
    ChunkOut& o = chunk[std::size_t(c)];
    o.t.assign(specs, MeanVar{});
    o.s1.assign(rows, 0.0);
    o.s2.assign(rows, 0.0);
    if (with_entry_products) {
      o.p.resize(specs);
      for (std::size_t s = 0; s < specs; ++s) o.p[s].assign(plans[s].entries.size(), 0.0);
    }
    const std::size_t dim = static_cast<std::size_t>(d);
    std::vector<double> x(dim), z(dim), point(dim), f(rows);
    const long long lo = c * kChunkPairs, hi = std::min(pairs, lo + kChunkPairs);
    for (long long i = lo; i < hi; ++i) {
      rng::fill_pair(seed, rep, std::uint64_t(i), x, z);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::uint8_t* take = &pick[r * std::size_t(d)];
        for (int j = 0; j < d; ++j)
          point[std::size_t(j)] = take[j] ? x[std::size_t(j)] : z[std::size_t(j)];
        const double v = model.eval(point);
        f[r] = v;
        o.s1[r] += v;
        o.s2[r] += v * v;
      }
      for (std::size_t s = 0; s < specs; ++s) {
        o.t[s].add(plans[s].per_pair(f.data()));
        if (with_entry_products) {
          const std::vector<PlanEntry>& es = plans[s].entries;
          for (std::size_t e = 0; e < es.size(); ++e)
            o.p[s][e] += f[es[e].a] * f[es[e].b];
        }
      }
    }
  };
  parallel_slots(chunks, workers, work);

  RunOutput out;
  out.pairs = pairs;
  out.t_stats.assign(specs, MeanVar{});
  out.row_sum.assign(rows, 0.0);
  out.row_sum2.assign(rows, 0.0);
  if (with_entry_products) {
    out.entry_prod.resize(specs);
    for (std::size_t s = 0; s < specs; ++s)
      out.entry_prod[s].assign(plans[s].entries.size(), 0.0);
  }
  for (long long c = 0; c < chunks; ++c) {
    const ChunkOut& o = chunk[std::size_t(c)];
    for (std::size_t s = 0; s < specs; ++s) out.t_stats[s].merge(o.t[s]);
    for (std::size_t r = 0; r < rows; ++r) {
      out.row_sum[r] += o.s1[r];
      out.row_sum2[r] += o.s2[r];
    }
    if (with_entry_products)
      for (std::size_t s = 0; s < specs; ++s)
        for (std::size_t e = 0; e < o.p[s].size(); ++e) out.entry_prod[s][e] += o.p[s][e];
  }
  return out;
}

struct PlugInValue {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Average of per-pair statistics; non-contrasts subtract the plug-in
/// squared-mean term per entry. The error bar is the per-pair deviation of
/// the statistic and ignores the (lower order) mean-correction noise.
inline PlugInValue plugin_value(const SpecPlan& plan, const MeanVar& t,
                                const RunOutput& run) {
  double est = t.mean;
  if (!plan.contrast) {
    const double n = double(run.pairs);
    double corr = 0.0;
    for (const PlanEntry& e : plan.entries) {
      const double mu = 0.5 * (run.row_sum[e.a] + run.row_sum[e.b]) / n;
      corr += e.w * mu * mu;
    }
    est -= plan.scale * corr;
  }
  const double sd = std::sqrt(t.sample_variance());
  return {est, t.n >= 1 ? sd / std::sqrt(double(t.n)) : 0.0};
}

/// Exactly unbiased form: per entry, the cross-moment average minus the
/// squared half-sum of the two row means plus a variance make-up term, the
/// whole sum scaled by 2n/(2n-1). Needs at least two pairs.
inline double bias_corrected_value(const SpecPlan& plan,
                                   const std::vector<double>& entry_prod,
                                   const RunOutput& run) {
  const double n = double(run.pairs);
  double acc = 0.0;
  for (std::size_t e = 0; e < plan.entries.size(); ++e) {
    const PlanEntry& pe = plan.entries[e];
    const double mu_a = run.row_sum[pe.a] / n, mu_b = run.row_sum[pe.b] / n;
    const double s2a =
        (run.row_sum2[pe.a] - run.row_sum[pe.a] * run.row_sum[pe.a] / n) / (n - 1.0);
    const double s2b =
        (run.row_sum2[pe.b] - run.row_sum[pe.b] * run.row_sum[pe.b] / n) / (n - 1.0);
    const double half_mean = 0.5 * (mu_a + mu_b);
    acc += pe.w * (entry_prod[e] / n - half_mean * half_mean + (s2a + s2b) / (4.0 * n));
  }
  return plan.scale * (2.0 * n / (2.0 * n - 1.0)) * acc;
}

inline void require_config(const SampleConfig& cfg, long long min_pairs) {
  if (cfg.pairs < min_pairs)
    throw std::invalid_argument("SampleConfig: needs at least " +
                                std::to_string(min_pairs) + " sample pairs");
  if (cfg.replicates < 1)
    throw std::invalid_argument("SampleConfig: replicates must be >= 1");
  if (cfg.workers < 1)
    throw std::invalid_argument("SampleConfig: workers must be >= 1");
}

template <EvaluableModel M>
void require_model_dim(const GsiSpec& spec, const M& model) {
  if (spec.dimension() != model.dimension())
    throw dimension_mismatch("estimate: spec dimension " +
                             std::to_string(spec.dimension()) + " != model dimension " +
                             std::to_string(model.dimension()));
}

inline EstimatorKind kind_for(const GsiSpec& spec) {
  return (spec.kind() == SpecKind::Square || spec.kind() == SpecKind::SumOfSquares)
             ? EstimatorKind::SquareForm
             : EstimatorKind::PlugIn;
}

}  // namespace detail

/// One sampling run of one design. Replicate index selects an independent
/// stream with the same seed.
template <EvaluableModel M>
EstimateResult estimate(const GsiSpec& spec, const M& model, const SampleConfig& cfg,
                        std::uint64_t replicate = 0) {
  detail::require_config(cfg, 1);
  detail::require_model_dim(spec, model);
  const std::vector<SubsetMask> support = spec.support();
  const std::vector<detail::SpecPlan> plans{detail::build_plan(spec, support)};
  const detail::RunOutput run = detail::run_design(model, support, plans, cfg.pairs,
                                                   cfg.seed, replicate, cfg.workers, false);
  const detail::PlugInValue v = detail::plugin_value(plans[0], run.t_stats[0], run);
  EstimateResult r;
  r.estimate = v.estimate;
  r.std_error = v.std_error;
  r.pairs = cfg.pairs;
  r.evals_per_pair = static_cast<int>(support.size());
  r.total_evals = cfg.pairs * static_cast<long long>(support.size());
  r.kind = detail::kind_for(spec);
  return r;
}

/// Several designs sharing one set of hybrid evaluations. Every returned
/// estimate is bit-identical to the corresponding single-design run; only
/// the evaluation accounting reflects the shared support.
template <EvaluableModel M>
std::vector<EstimateResult> estimate_batch(std::span<const GsiSpec> specs, const M& model,
                                           const SampleConfig& cfg,
                                           std::uint64_t replicate = 0) {
  detail::require_config(cfg, 1);
  if (specs.empty()) return {};
  std::set<SubsetMask> union_support;
  std::vector<detail::SpecPlan> plans;
  for (const GsiSpec& s : specs) {
    detail::require_model_dim(s, model);
    for (const SubsetMask& u : s.support()) union_support.insert(u);
  }
  const std::vector<SubsetMask> support(union_support.begin(), union_support.end());
  plans.reserve(specs.size());
  for (const GsiSpec& s : specs) plans.push_back(detail::build_plan(s, support));
  const detail::RunOutput run = detail::run_design(model, support, plans, cfg.pairs,
                                                   cfg.seed, replicate, cfg.workers, false);
  std::vector<EstimateResult> out(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const detail::PlugInValue v = detail::plugin_value(plans[s], run.t_stats[s], run);
    out[s].estimate = v.estimate;
    out[s].std_error = v.std_error;
    out[s].pairs = cfg.pairs;
    out[s].evals_per_pair = static_cast<int>(support.size());
    out[s].total_evals = cfg.pairs * static_cast<long long>(support.size());
    out[s].kind = detail::kind_for(specs[s]);
  }
  return out;
}

/// Unbiased estimation. Contrasts are already unbiased under the plain
/// per-pair average and keep it; anything else gets the mean/variance
/// corrected form. With several replicates the result is their average and
/// the error bar comes from their spread (zero spread information when
/// replicates == 1).
template <EvaluableModel M>
EstimateResult estimate_bias_corrected(const GsiSpec& spec, const M& model,
                                       const SampleConfig& cfg) {
  detail::require_config(cfg, 2);
  detail::require_model_dim(spec, model);
  const std::vector<SubsetMask> support = spec.support();
  const std::vector<detail::SpecPlan> plans{detail::build_plan(spec, support)};
  const bool contrast = plans[0].contrast;
  const int reps = cfg.replicates;

  EstimateResult r;
  r.pairs = cfg.pairs;
  r.replicates = reps;
  r.evals_per_pair = static_cast<int>(support.size());
  r.total_evals = cfg.pairs * static_cast<long long>(support.size()) * reps;
  r.kind = contrast ? detail::kind_for(spec) : EstimatorKind::BiasCorrected;

  if (reps == 1) {
    const detail::RunOutput run = detail::run_design(model, support, plans, cfg.pairs,
                                                     cfg.seed, 0, cfg.workers, !contrast);
    if (contrast) {
      const detail::PlugInValue v = detail::plugin_value(plans[0], run.t_stats[0], run);
      r.estimate = v.estimate;
      r.std_error = v.std_error;
    } else {
      r.estimate = detail::bias_corrected_value(plans[0], run.entry_prod[0], run);
      r.std_error = 0.0;
    }
    return r;
  }

  std::vector<double> draws(std::size_t(reps), 0.0);
  detail::parallel_slots(reps, cfg.workers, [&](long long rep) {
    const detail::RunOutput run = detail::run_design(model, support, plans, cfg.pairs,
                                                     cfg.seed, std::uint64_t(rep), 1,
                                                     !contrast);
    draws[std::size_t(rep)] =
        contrast ? detail::plugin_value(plans[0], run.t_stats[0], run).estimate
                 : detail::bias_corrected_value(plans[0], run.entry_prod[0], run);
  });
  detail::MeanVar mv;
  for (double v : draws) mv.add(v);
  r.estimate = mv.mean;
  r.std_error = std::sqrt(mv.sample_variance() / double(reps));
  return r;
}

/// Unbiased lower index; with the whole index set this reduces exactly to
/// the sample variance of the pick points.
template <EvaluableModel M>
EstimateResult lower_index_unbiased(const SubsetMask& u, const M& model,
                                    const SampleConfig& cfg) {
  return estimate_bias_corrected(lower_index(u), model, cfg);
}

/// Per-pair statistic of a design at one explicit pair of points, exactly
/// as the sampling loop computes it. Intended for design identity checks.
template <EvaluableModel M>
double per_pair_value(const GsiSpec& spec, const M& model, std::span<const double> x,
                      std::span<const double> z) {
  detail::require_model_dim(spec, model);
  const int d = model.dimension();
  if (static_cast<int>(x.size()) != d || static_cast<int>(z.size()) != d)
    throw std::invalid_argument("per_pair_value: point length mismatch");
  const std::vector<SubsetMask> support = spec.support();
  const detail::SpecPlan plan = detail::build_plan(spec, support);
  std::vector<double> point(static_cast<std::size_t>(d)), f(support.size());
  for (std::size_t r = 0; r < support.size(); ++r) {
    for (int j = 0; j < d; ++j)
      point[std::size_t(j)] =
          support[r].contains(j + 1) ? x[std::size_t(j)] : z[std::size_t(j)];
    f[r] = model.eval(point);
  }
  return plan.per_pair(f.data());
}

namespace detail {

inline RunOutput accumulate_samples(const SpecPlan& plan,
                                    const std::vector<std::vector<double>>& rows,
                                    bool with_entry_products) {
  if (rows.empty()) throw std::invalid_argument("sample table has no rows");
  const std::size_t n = rows[0].size();
  for (const std::vector<double>& r : rows)
    if (r.size() != n)
      throw std::invalid_argument("sample table rows have unequal lengths");
  RunOutput out;
  out.pairs = static_cast<long long>(n);
  out.t_stats.assign(1, MeanVar{});
  out.row_sum.assign(rows.size(), 0.0);
  out.row_sum2.assign(rows.size(), 0.0);
  if (with_entry_products) out.entry_prod.assign(1, std::vector<double>(plan.entries.size(), 0.0));
  std::vector<double> f(rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double v = rows[r][i];
      f[r] = v;
      out.row_sum[r] += v;
      out.row_sum2[r] += v * v;
    }
    out.t_stats[0].add(plan.per_pair(f.data()));
    if (with_entry_products)
      for (std::size_t e = 0; e < plan.entries.size(); ++e)
        out.entry_prod[0][e] += f[plan.entries[e].a] * f[plan.entries[e].b];
  }
  return out;
}

}  // namespace detail

/// Deterministic core of `estimate` on a precomputed sample table whose rows
/// follow spec.support() order. Used to check estimator algebra exhaustively.
inline double plugin_from_samples(const GsiSpec& spec,
                                  const std::vector<std::vector<double>>& rows) {
  const std::vector<SubsetMask> support = spec.support();
  if (rows.size() != support.size())
    throw std::invalid_argument("plugin_from_samples: need one row per support point");
  const detail::SpecPlan plan = detail::build_plan(spec, support);
  const detail::RunOutput run = detail::accumulate_samples(plan, rows, false);
  return detail::plugin_value(plan, run.t_stats[0], run).estimate;
}

/// Deterministic core of the bias-corrected path on a precomputed table
/// (two pairs minimum). Contrasts fall back to the plain average.
inline double bias_corrected_from_samples(const GsiSpec& spec,
                                          const std::vector<std::vector<double>>& rows) {
  const std::vector<SubsetMask> support = spec.support();
  if (rows.size() != support.size())
    throw std::invalid_argument(
        "bias_corrected_from_samples: need one row per support point");
  const detail::SpecPlan plan = detail::build_plan(spec, support);
  if (plan.contrast) return plugin_from_samples(spec, rows);
  const detail::RunOutput run = detail::accumulate_samples(plan, rows, true);
  if (run.pairs < 2)
    throw std::invalid_argument("bias_corrected_from_samples: needs at least 2 pairs");
  return detail::bias_corrected_value(plan, run.entry_prod[0], run);
}

// --- replicated comparison studies ----------------------------------------

struct EstimatorSummary {
  std::string name;
  int cost = 0;
  EstimatorKind kind = EstimatorKind::PlugIn;
  double truth = std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double bias = std::numeric_limits<double>::quiet_NaN();
  double neg_fraction = 0.0;
  double efficiency = std::numeric_limits<double>::quiet_NaN();
};

struct StudyReport {
  long long pairs = 0;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::size_t baseline = 0;
  std::vector<EstimatorSummary> estimators;
};

/// Replicated head-to-head comparison of designs on one model, with common
/// sample streams across designs within each replicate. Efficiency of a
/// design against the baseline is (cost_b * var_b) / (cost_e * var_e), so
/// values above one mean the design buys more accuracy per evaluation.
template <EvaluableModel M>
StudyReport replicate_study(const M& model, std::span<const NamedSpec> designs,
                            std::span<const double> truths, const SampleConfig& cfg,
                            std::size_t baseline = 0) {
  detail::require_config(cfg, 2);
  if (designs.empty()) throw std::invalid_argument("replicate_study: no designs");
  if (!truths.empty() && truths.size() != designs.size())
    throw std::invalid_argument("replicate_study: one truth per design required");
  if (baseline >= designs.size())
    throw std::invalid_argument("replicate_study: baseline index out of range");

  const std::size_t count = designs.size();
  std::vector<std::vector<SubsetMask>> supports(count);
  std::vector<std::vector<detail::SpecPlan>> plans(count);
  for (std::size_t e = 0; e < count; ++e) {
    detail::require_model_dim(designs[e].spec, model);
    supports[e] = designs[e].spec.support();
    plans[e] = {detail::build_plan(designs[e].spec, supports[e])};
  }

  const int reps = cfg.replicates;
  std::vector<std::vector<double>> draws(count, std::vector<double>(std::size_t(reps)));
  detail::parallel_slots(reps, cfg.workers, [&](long long rep) {
    for (std::size_t e = 0; e < count; ++e) {
      const bool contrast = plans[e][0].contrast;
      const detail::RunOutput run =
          detail::run_design(model, supports[e], plans[e], cfg.pairs, cfg.seed,
                             std::uint64_t(rep), 1, !contrast);
      draws[e][std::size_t(rep)] =
          contrast ? detail::plugin_value(plans[e][0], run.t_stats[0], run).estimate
                   : detail::bias_corrected_value(plans[e][0], run.entry_prod[0], run);
    }
  });

  StudyReport report;
  report.pairs = cfg.pairs;
  report.replicates = reps;
  report.seed = cfg.seed;
  report.baseline = baseline;
  report.estimators.resize(count);
  for (std::size_t e = 0; e < count; ++e) {
    EstimatorSummary& s = report.estimators[e];
    s.name = designs[e].name;
    s.cost = static_cast<int>(supports[e].size());
    s.kind = plans[e][0].contrast ? detail::kind_for(designs[e].spec)
                                  : EstimatorKind::BiasCorrected;
    detail::MeanVar mv;
    long long neg = 0;
    for (double v : draws[e]) {
      mv.add(v);
      if (v < 0.0) ++neg;
    }
    s.mean = mv.mean;
    s.sd = std::sqrt(mv.sample_variance());
    s.se = s.sd / std::sqrt(double(reps));
    s.neg_fraction = double(neg) / double(reps);
    if (!truths.empty()) {
      s.truth = truths[e];
      s.bias = s.mean - s.truth;
    }
  }
  const EstimatorSummary& base = report.estimators[baseline];
  for (std::size_t e = 0; e < count; ++e) {
    EstimatorSummary& s = report.estimators[e];
    const double denom = double(s.cost) * s.sd * s.sd;
    s.efficiency = denom > 0.0 ? double(base.cost) * base.sd * base.sd / denom
                               : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace gsi
