#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gsi/engine.hpp"
#include "gsi/models.hpp"
#include "gsi/spec.hpp"
#include "gsi/subset.hpp"

namespace gsi {

// --- subsets ---------------------------------------------------------------

inline nlohmann::json subset_to_json(const SubsetMask& u) {
  nlohmann::json a = nlohmann::json::array();
  for (int j : u.to_indices()) a.push_back(j);
  return a;
}

inline SubsetMask subset_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_array())
    throw std::invalid_argument("subset must be a JSON array of 1-based indices");
  std::vector<int> indices;
  for (const nlohmann::json& e : j) {
    if (!e.is_number_integer())
      throw std::invalid_argument("subset indices must be integers");
    indices.push_back(e.get<int>());
  }
  return SubsetMask::of(indices, dim);
}

// --- specs -----------------------------------------------------------------

namespace detail {

inline nlohmann::json index_map_to_json(const IndexMap& m) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [u, w] : m) a.push_back({{"u", subset_to_json(u)}, {"w", w}});
  return a;
}

inline IndexMap index_map_from_json(const nlohmann::json& j, int dim, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + " must be an array of {u, w} records");
  IndexMap out;
  for (const nlohmann::json& e : j) {
    if (!e.is_object() || !e.contains("u") || !e.contains("w") ||
        !e.at("w").is_number())
      throw std::invalid_argument(std::string(what) +
                                  " entries must be objects with 'u' and numeric 'w'");
    out[subset_from_json(e.at("u"), dim)] += e.at("w").get<double>();
  }
  return out;
}

inline void verify_declared_terms(const GsiSpec& spec, const WeightMap& declared) {
  const WeightMap& built = spec.weights();
  auto mismatch = [](const WeightKey& key, double a, double b) {
    return std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (const auto& [key, w] : declared) {
    const auto it = built.find(key);
    const double have = (it == built.end()) ? 0.0 : it->second;
    if (mismatch(key, w, have))
      throw std::invalid_argument("spec terms disagree with factors at (" +
                                  key.first.str() + "," + key.second.str() + ")");
  }
  for (const auto& [key, w] : built)
    if (!declared.count(key) && mismatch(key, 0.0, w))
      throw std::invalid_argument("spec factors imply a term missing from 'terms' at (" +
                                  key.first.str() + "," + key.second.str() + ")");
}

}  // namespace detail

inline nlohmann::json spec_to_json(const GsiSpec& spec) {
  nlohmann::json j;
  j["d"] = spec.dimension();
  j["scale"] = spec.scale();
  j["kind"] = to_string(spec.kind());
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, w] : spec.weights())
    terms.push_back({{"u", subset_to_json(key.first)},
                     {"v", subset_to_json(key.second)},
                     {"w", w}});
  j["terms"] = std::move(terms);
  if (spec.kind() == SpecKind::Bilinear) {
    j["lambda"] = detail::index_map_to_json(spec.lambda());
    j["gamma"] = detail::index_map_to_json(spec.gamma());
  }
  if (spec.kind() == SpecKind::Square || spec.kind() == SpecKind::SumOfSquares) {
    nlohmann::json squares = nlohmann::json::array();
    for (const IndexMap& term : spec.square_terms())
      squares.push_back(detail::index_map_to_json(term));
    j["squares"] = std::move(squares);
  }
  return j;
}

/// Accepts {"d", "scale"?, "kind"?, "terms"?, "lambda"/"gamma"?, "squares"?}.
/// Square kinds must carry their factors; a bilinear declaration without
/// factors is accepted through its terms and handled as a general matrix.
inline GsiSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec must be a JSON object");
  if (!j.contains("d") || !j.at("d").is_number_integer())
    throw std::invalid_argument("spec needs an integer dimension field 'd'");
  const int dim = j.at("d").get<int>();
  double scale = 1.0;
  if (j.contains("scale")) {
    if (!j.at("scale").is_number())
      throw std::invalid_argument("spec 'scale' must be a number");
    scale = j.at("scale").get<double>();
  }
  SpecKind kind = SpecKind::General;
  if (j.contains("kind")) {
    if (!j.at("kind").is_string())
      throw std::invalid_argument("spec 'kind' must be a string");
    kind = spec_kind_from_string(j.at("kind").get<std::string>());
  }

  WeightMap declared;
  bool have_terms = false;
  if (j.contains("terms")) {
    if (!j.at("terms").is_array())
      throw std::invalid_argument("spec 'terms' must be an array");
    have_terms = true;
    for (const nlohmann::json& e : j.at("terms")) {
      if (!e.is_object() || !e.contains("u") || !e.contains("v") || !e.contains("w") ||
          !e.at("w").is_number())
        throw std::invalid_argument(
            "spec terms must be objects with 'u', 'v' and numeric 'w'");
      declared[{subset_from_json(e.at("u"), dim), subset_from_json(e.at("v"), dim)}] +=
          e.at("w").get<double>();
    }
  }

  if (kind == SpecKind::Square || kind == SpecKind::SumOfSquares) {
    if (!j.contains("squares"))
      throw std::invalid_argument("spec kind '" + to_string(kind) +
                                  "' needs a 'squares' array of coefficient vectors");
    const nlohmann::json& sq = j.at("squares");
    if (!sq.is_array() || sq.empty())
      throw std::invalid_argument("spec 'squares' must be a nonempty array");
    if (kind == SpecKind::Square && sq.size() != 1)
      throw std::invalid_argument(
          "spec kind 'square' takes exactly one coefficient vector; use "
          "'sum_of_squares' for several");
    std::vector<IndexMap> terms;
    for (const nlohmann::json& t : sq)
      terms.push_back(detail::index_map_from_json(t, dim, "squares entry"));
    GsiSpec spec = (kind == SpecKind::Square)
                       ? GsiSpec::square(dim, std::move(terms[0]), scale)
                       : GsiSpec::sum_of_squares(dim, std::move(terms), scale);
    if (have_terms) detail::verify_declared_terms(spec, declared);
    return spec;
  }

  if (kind == SpecKind::Bilinear && j.contains("lambda") && j.contains("gamma")) {
    GsiSpec spec = GsiSpec::bilinear(
        dim, detail::index_map_from_json(j.at("lambda"), dim, "lambda"),
        detail::index_map_from_json(j.at("gamma"), dim, "gamma"), scale);
    if (have_terms) detail::verify_declared_terms(spec, declared);
    return spec;
  }

  if (!have_terms || declared.empty())
    throw std::invalid_argument("spec needs nonempty 'terms' (or factor payloads)");
  return GsiSpec::general(dim, std::move(declared), scale);
}

inline GsiSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

// --- models ----------------------------------------------------------------

using AnyModel = std::variant<ProductModel, MinModel, GridFunction>;

inline int model_dimension(const AnyModel& m) {
  return std::visit([](const auto& inner) { return inner.dimension(); }, m);
}

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const nlohmann::json& e : j) {
    if (!e.is_number())
      throw std::invalid_argument(std::string(what) + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline int int_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw std::invalid_argument(std::string("model needs integer field '") + key + "'");
  return j.at(key).get<int>();
}

}  // namespace detail

inline AnyModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw std::invalid_argument("model config must be an object with string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "product") {
    if (!j.contains("mu") || !j.contains("tau"))
      throw std::invalid_argument("product model needs 'mu' and 'tau' arrays");
    return ProductModel(detail::number_array(j.at("mu"), "mu"),
                        detail::number_array(j.at("tau"), "tau"));
  }
  if (kind == "min") return MinModel(detail::int_field(j, "d"));
  if (kind == "grid") {
    if (!j.contains("values"))
      throw std::invalid_argument("grid model needs a 'values' array");
    return GridFunction(detail::int_field(j, "d"), detail::int_field(j, "m"),
                        detail::number_array(j.at("values"), "values"));
  }
  throw std::invalid_argument("unknown model kind '" + kind +
                              "'; expected product, min or grid");
}

/// CSV layout: optional comment lines (#...), then the two integers d and m,
/// then m^d values in row-major order with the last index fastest. Tokens
/// may be separated by commas, whitespace or newlines.
inline GridFunction grid_from_csv(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::string token;
    for (char c : line) {
      if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
        if (!token.empty()) tokens.push_back(std::exchange(token, {}));
      } else {
        token.push_back(c);
      }
    }
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  if (tokens.size() < 2)
    throw std::invalid_argument("grid CSV needs a 'd,m' header before the values");
  auto to_int = [](const std::string& s, const char* what) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (...) {
      throw std::invalid_argument(std::string("grid CSV: bad ") + what + " '" + s + "'");
    }
  };
  const int d = to_int(tokens[0], "dimension");
  const int m = to_int(tokens[1], "level count");
  std::vector<double> values;
  values.reserve(tokens.size() - 2);
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tokens[i], &used));
      if (used != tokens[i].size()) throw std::invalid_argument(tokens[i]);
    } catch (...) {
      throw std::invalid_argument("grid CSV: bad value '" + tokens[i] + "'");
    }
  }
  return GridFunction(d, m, std::move(values));
}

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::string token;
  std::stringstream ss(s);
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (...) {
      throw std::invalid_argument(std::string("bad number '") + token + "' in " + what);
    }
  }
  if (out.empty())
    throw std::invalid_argument(std::string(what) + " must list at least one number");
  return out;
}

/// Splits "k1=v1;k2=v2" (a ',' directly before a known key also separates,
/// so mu=1,2,tau=3,4 parses as intended) into a key/value map.
inline std::map<std::string, std::string> parse_kv_list(
    const std::string& s, const std::vector<std::string>& keys) {
  std::vector<std::pair<std::size_t, std::string>> hits;
  for (const std::string& key : keys) {
    const std::string needle = key + "=";
    std::size_t pos = s.find(needle);
    while (pos != std::string::npos) {
      if (pos == 0 || s[pos - 1] == ',' || s[pos - 1] == ';')
        hits.emplace_back(pos, key);
      pos = s.find(needle, pos + 1);
    }
  }
  std::sort(hits.begin(), hits.end());
  if (hits.empty() || hits.front().first != 0)
    throw std::invalid_argument("model shorthand must start with a key=value pair");
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto& [pos, key] = hits[i];
    const std::size_t vbegin = pos + key.size() + 1;
    std::size_t vend = (i + 1 < hits.size()) ? hits[i + 1].first : s.size();
    if (vend > vbegin && (s[vend - 1] == ',' || s[vend - 1] == ';')) --vend;
    if (out.count(key))
      throw std::invalid_argument("model shorthand repeats key '" + key + "'");
    out[key] = s.substr(vbegin, vend - vbegin);
  }
  return out;
}

}  // namespace detail

/// Model arguments come in three forms: inline JSON ({"kind":...}), a
/// shorthand (min:d=5 or product:mu=1,1;tau=0.5,0.5), or a path to a JSON
/// config (.json) or grid table (.csv).
inline AnyModel parse_model(const std::string& arg) {
  if (arg.empty()) throw std::invalid_argument("empty model argument");
  if (arg[0] == '{') {
    try {
      return model_from_json(nlohmann::json::parse(arg));
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("inline model JSON is invalid: ") + e.what());
    }
  }
  const std::size_t colon = arg.find(':');
  const std::string head = (colon == std::string::npos) ? "" : arg.substr(0, colon);
  if (head == "min") {
    const auto kv = detail::parse_kv_list(arg.substr(colon + 1), {"d"});
    nlohmann::json j{{"kind", "min"}};
    try {
      j["d"] = std::stoi(kv.at("d"));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("min model shorthand needs d=<dimension>");
    } catch (...) {
      throw std::invalid_argument("bad dimension in min model shorthand");
    }
    return model_from_json(j);
  }
  if (head == "product") {
    const auto kv = detail::parse_kv_list(arg.substr(colon + 1), {"mu", "tau"});
    if (!kv.count("mu") || !kv.count("tau"))
      throw std::invalid_argument("product model shorthand needs mu=... and tau=...");
    return ProductModel(detail::parse_double_list(kv.at("mu"), "mu"),
                        detail::parse_double_list(kv.at("tau"), "tau"));
  }

  const bool is_csv = arg.size() > 4 && arg.substr(arg.size() - 4) == ".csv";
  std::ifstream in(arg);
  if (!in) throw std::invalid_argument("cannot open model file '" + arg + "'");
  if (is_csv) return grid_from_csv(in);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("model file '" + arg + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

// --- result records ----------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline nlohmann::json result_to_json(const EstimateResult& r, std::uint64_t seed) {
  return nlohmann::json{{"name", r.name},
                        {"estimate", r.estimate},
                        {"std_error", r.std_error},
                        {"pairs", r.pairs},
                        {"replicates", r.replicates},
                        {"evals_per_pair", r.evals_per_pair},
                        {"total_evals", r.total_evals},
                        {"kind", to_string(r.kind)},
                        {"seed", seed}};
}

inline std::string results_csv_header() {
  return "name,estimate,std_error,pairs,replicates,evals_per_pair,total_evals,kind,seed";
}

inline std::string result_to_csv(const EstimateResult& r, std::uint64_t seed) {
  std::ostringstream os;
  os << detail::csv_quote(r.name) << ',' << detail::fmt_double(r.estimate) << ','
     << detail::fmt_double(r.std_error) << ',' << r.pairs << ',' << r.replicates << ','
     << r.evals_per_pair << ',' << r.total_evals << ',' << to_string(r.kind) << ','
     << seed;
  return os.str();
}

inline nlohmann::json study_to_json(const StudyReport& report) {
  nlohmann::json estimators = nlohmann::json::array();
  for (const EstimatorSummary& s : report.estimators)
    estimators.push_back({{"name", s.name},
                          {"cost", s.cost},
                          {"kind", to_string(s.kind)},
                          {"truth", s.truth},
                          {"mean", s.mean},
                          {"bias", s.bias},
                          {"sd", s.sd},
                          {"se", s.se},
                          {"neg_fraction", s.neg_fraction},
                          {"efficiency", s.efficiency}});
  return nlohmann::json{{"pairs", report.pairs},
                        {"replicates", report.replicates},
                        {"seed", report.seed},
                        {"baseline", report.estimators.at(report.baseline).name},
                        {"estimators", std::move(estimators)}};
}

inline std::string study_csv_header() {
  return "name,cost,kind,truth,mean,bias,sd,se,neg_fraction,efficiency";
}

inline std::string study_to_csv(const StudyReport& report) {
  std::ostringstream os;
  os << study_csv_header() << '\n';
  for (const EstimatorSummary& s : report.estimators)
    os << detail::csv_quote(s.name) << ',' << s.cost << ',' << to_string(s.kind) << ','
       << detail::fmt_double(s.truth) << ',' << detail::fmt_double(s.mean) << ','
       << detail::fmt_double(s.bias) << ',' << detail::fmt_double(s.sd) << ','
       << detail::fmt_double(s.se) << ',' << detail::fmt_double(s.neg_fraction) << ','
       << detail::fmt_double(s.efficiency) << '\n';
  return os.str();
}

}  // namespace gsi
