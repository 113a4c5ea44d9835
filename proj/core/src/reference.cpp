#include "eotbench/reference.hpp"

#include "eotbench/drift.hpp"
#include "eotbench/pair_io.hpp"
#include "eotbench/plan.hpp"
#include "eotbench/potential.hpp"
#include "json_emit.hpp"

#include <cmath>

namespace eotbench {

namespace {

using OrderedJson = nlohmann::ordered_json;
using Json = nlohmann::json;

OrderedJson vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  OrderedJson out = OrderedJson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

OrderedJson plan_entry(const BenchmarkPair& pair, const Point& x) {
  const auto plan = conditional_plan(pair, x);
  OrderedJson gamma = OrderedJson::array();
  OrderedJson log_gamma = OrderedJson::array();
  OrderedJson means = OrderedJson::array();
  for (std::size_t n = 0; n < plan.size(); ++n) {
    gamma.push_back(plan.gamma(n));
    log_gamma.push_back(plan.log_gamma()[n]);
    means.push_back(vec(plan.mean(n)));
  }
  return {{"x", vec(x)}, {"gamma", gamma}, {"log_gamma", log_gamma}, {"means", means}};
}

OrderedJson drift_entry(const BenchmarkPair& pair, const Point& x, double t) {
  return {{"x", vec(x)}, {"t", t}, {"drift", vec(optimal_drift(pair, x, t))}};
}

OrderedJson density_entry(const BenchmarkPair& pair, const Point& x, const Point& y) {
  const auto plan = conditional_plan(pair, x);
  return {{"x", vec(x)},
          {"y", vec(y)},
          {"potential", potential_value(pair.potential(), y)},
          {"log_forward_unnormalized", log_forward_density_unnormalized(pair, x, y)},
          {"log_conditional_density", plan.log_density(y)},
          {"log_reverse_unnormalized", log_reverse_density_unnormalized(pair, y, x).value}};
}

Point to_point(const Json& v) {
  Point p(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Index>(i)] = v[i].get<double>();
  return p;
}

// Walks two JSON trees of identical shape and compares every number.
void compare(const Json& expected, const OrderedJson& actual, double tol, const std::string& path,
             VerifyResult& result) {
  if (expected.is_number()) {
    const double a = expected.get<double>();
    const double b = actual.get<double>();
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    const double err = std::abs(a - b) / scale;
    ++result.values_checked;
    result.max_error = std::max(result.max_error, err);
    if (!(err <= tol)) {
      if (result.mismatches == 0) {
        result.first_mismatch = path + ": expected " + format_real(a) + ", got " + format_real(b);
      }
      ++result.mismatches;
    }
    return;
  }
  if (expected.is_array()) {
    if (!actual.is_array() || actual.size() != expected.size()) {
      throw Error(ErrorCode::kFormat, path + ": reference shape differs from recomputation");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      compare(expected[i], actual[i], tol, path + "[" + std::to_string(i) + "]", result);
    }
    return;
  }
  if (expected.is_object()) {
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      if (!actual.contains(it.key())) {
        throw Error(ErrorCode::kFormat, path + "." + it.key() + ": unknown reference field");
      }
      compare(it.value(), actual[it.key()], tol, path + "." + it.key(), result);
    }
  }
}

}  // namespace

std::string export_reference_vectors(const std::string& pair_text, const ReferenceOptions& options) {
  const BenchmarkPair pair = parse_pair(pair_text);
  const Seed root{options.probe_seed, 0};

  OrderedJson plans = OrderedJson::array();
  const Seed plan_seed = root.substream(1);
  for (std::size_t i = 0; i < options.plan_probes; ++i) {
    CounterRng rng(plan_seed, i);
    plans.push_back(plan_entry(pair, pair.source().sample(rng)));
  }
  OrderedJson drifts = OrderedJson::array();
  const Seed drift_seed = root.substream(2);
  for (std::size_t i = 0; i < options.drift_probes; ++i) {
    CounterRng rng(drift_seed, i);
    const Point x = pair.source().sample(rng);
    // Times spread over [0, 0.99) so probes cover the whole bridge.
    drifts.push_back(drift_entry(pair, x, 0.99 * rng.uniform()));
  }
  OrderedJson densities = OrderedJson::array();
  const Seed density_seed = root.substream(3);
  for (std::size_t i = 0; i < options.density_probes; ++i) {
    CounterRng rng(density_seed, i);
    const SamplePair s = draw_joint(pair, rng);
    densities.push_back(density_entry(pair, s.x, s.y));
  }

  OrderedJson doc;
  doc["format_version"] = 1;
  doc["pair_digest"] = pair_text_digest(pair_text);
  doc["probe_seed"] = options.probe_seed;
  doc["tolerance"] = options.tolerance;
  doc["comparison"] = "abs(a - b) <= tolerance * max(1, abs(a), abs(b))";
  doc["plan_probes"] = std::move(plans);
  doc["drift_probes"] = std::move(drifts);
  doc["density_probes"] = std::move(densities);
  return detail::emit(doc, 2);
}

VerifyResult verify_reference_vectors(const std::string& pair_text, const std::string& reference_text) {
  Json ref;
  try {
    ref = Json::parse(reference_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("reference file is not valid JSON: ") + e.what());
  }
  require(ref.contains("pair_digest") && ref["pair_digest"].is_string(), ErrorCode::kFormat,
          "reference file lacks pair_digest");
  const std::string digest = pair_text_digest(pair_text);
  if (ref["pair_digest"].get<std::string>() != digest) {
    throw Error(ErrorCode::kDigestMismatch, "pair digest " + digest +
                                                " does not match the reference file's " +
                                                ref["pair_digest"].get<std::string>());
  }
  const BenchmarkPair pair = parse_pair(pair_text);
  const double tol = ref.value("tolerance", 1e-9);

  VerifyResult result;
  for (std::size_t i = 0; i < ref.at("plan_probes").size(); ++i) {
    const Json& e = ref["plan_probes"][i];
    compare(e, plan_entry(pair, to_point(e.at("x"))), tol, "plan_probes[" + std::to_string(i) + "]",
            result);
  }
  for (std::size_t i = 0; i < ref.at("drift_probes").size(); ++i) {
    const Json& e = ref["drift_probes"][i];
    compare(e, drift_entry(pair, to_point(e.at("x")), e.at("t").get<double>()), tol,
            "drift_probes[" + std::to_string(i) + "]", result);
  }
  for (std::size_t i = 0; i < ref.at("density_probes").size(); ++i) {
    const Json& e = ref["density_probes"][i];
    compare(e, density_entry(pair, to_point(e.at("x")), to_point(e.at("y"))), tol,
            "density_probes[" + std::to_string(i) + "]", result);
  }
  return result;
}

}  // namespace eotbench
