#include "eotbench/pair_io.hpp"

#include "eotbench/tensor_io.hpp"
#include "json_emit.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace eotbench {

using OrderedJson = nlohmann::ordered_json;
using Json = nlohmann::json;

std::string format_real(double value) {
  require(std::isfinite(value), ErrorCode::kNonFinite, "cannot serialize a non-finite real");
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

namespace {

OrderedJson real(double v) { return OrderedJson(v); }

OrderedJson vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  OrderedJson out = OrderedJson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(real(v[i]));
  return out;
}

OrderedJson matrix_json(const SymMatrix& m) {
  if (m.is_scalar()) return real(m.scalar_value());
  const Eigen::MatrixXd dense = m.to_dense();
  OrderedJson rows = OrderedJson::array();
  for (Index i = 0; i < dense.rows(); ++i) rows.push_back(vector_json(dense.row(i).transpose()));
  return rows;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kFormat, field + ": " + what);
}

const Json& member(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) bad(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

double read_real(const Json& v, const std::string& field) {
  if (!v.is_number()) bad(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(field, "expected a finite number");
  return d;
}

Point read_vector(const Json& v, Index dim, const std::string& field) {
  if (!v.is_array()) bad(field, "expected a list of numbers");
  if (static_cast<Index>(v.size()) != dim) {
    bad(field, "expected " + std::to_string(dim) + " entries, found " + std::to_string(v.size()));
  }
  Point out(dim);
  for (Index i = 0; i < dim; ++i) {
    out[i] = read_real(v[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

SymMatrix read_matrix(const Json& v, Index dim, const std::string& field) {
  if (v.is_number()) return SymMatrix::scalar_identity(dim, read_real(v, field));
  if (!v.is_array()) bad(field, "expected a number or a list of rows");
  Eigen::MatrixXd m(dim, dim);
  if (v.size() == static_cast<std::size_t>(dim * dim) && (dim == 1 || v[0].is_number())) {
    // Flat row-major list.
    for (Index i = 0; i < dim * dim; ++i) {
      m(i / dim, i % dim) = read_real(v[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
    }
  } else {
    if (static_cast<Index>(v.size()) != dim) bad(field, "expected " + std::to_string(dim) + " rows");
    for (Index i = 0; i < dim; ++i) {
      m.row(i) = read_vector(v[static_cast<std::size_t>(i)], dim, field + "[" + std::to_string(i) + "]").transpose();
    }
  }
  try {
    return SymMatrix::dense(std::move(m));
  } catch (const Error& e) {
    bad(field, e.what());
  }
}

OrderedJson source_json(const SourceDistribution& source) {
  OrderedJson out;
  if (source.is_gaussian()) {
    const auto& c = source.components().front();
    out["type"] = "gaussian";
    out["mean"] = vector_json(c.mean);
    out["covariance"] = matrix_json(c.covariance);
  } else {
    out["type"] = "gaussian_mixture";
    OrderedJson comps = OrderedJson::array();
    for (const auto& c : source.components()) {
      OrderedJson j;
      j["weight"] = real(c.weight);
      j["mean"] = vector_json(c.mean);
      j["covariance"] = matrix_json(c.covariance);
      comps.push_back(std::move(j));
    }
    out["components"] = std::move(comps);
  }
  return out;
}

SourceDistribution read_source(const Json& v, Index dim) {
  const std::string type = [&] {
    const Json& t = member(v, "type", "source");
    if (!t.is_string()) bad("source.type", "expected a string");
    return t.get<std::string>();
  }();
  try {
    if (type == "gaussian") {
      return SourceDistribution::gaussian(read_vector(member(v, "mean", "source"), dim, "source.mean"),
                                          read_matrix(member(v, "covariance", "source"), dim,
                                                      "source.covariance"));
    }
    if (type == "gaussian_mixture") {
      const Json& comps = member(v, "components", "source");
      if (!comps.is_array() || comps.empty()) bad("source.components", "expected a non-empty list");
      std::vector<GaussianComponent> out;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string f = "source.components[" + std::to_string(i) + "]";
        out.push_back({read_real(member(comps[i], "weight", f), f + ".weight"),
                       read_vector(member(comps[i], "mean", f), dim, f + ".mean"),
                       read_matrix(member(comps[i], "covariance", f), dim, f + ".covariance")});
      }
      return SourceDistribution::mixture(std::move(out));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw;
    bad("source", e.what());
  }
  bad("source.type", "unknown source type '" + type + "'");
}

}  // namespace

std::string serialize_pair(const BenchmarkPair& pair) {
  const auto& pot = pair.potential();
  const auto& meta = pair.metadata();
  OrderedJson doc;
  doc["format_version"] = kPairFormatVersion;
  doc["name"] = meta.name;
  doc["dim"] = pair.dim();
  doc["epsilon"] = real(pair.epsilon());
  doc["source"] = source_json(pair.source());
  OrderedJson weights = OrderedJson::array();
  OrderedJson centers = OrderedJson::array();
  OrderedJson matrices = OrderedJson::array();
  for (const auto& c : pot.components()) {
    weights.push_back(real(std::exp(c.log_weight)));
    centers.push_back(vector_json(c.center));
    matrices.push_back(matrix_json(c.matrix));
  }
  doc["potential"] = {{"weights", weights}, {"centers", centers}, {"matrices", matrices}};
  doc["seed"] = meta.seed;
  OrderedJson params = OrderedJson::object();
  // Sorted, so that a parsed pair re-serializes to the same text.
  auto sorted = meta.parameters;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [k, v] : sorted) params[k] = real(v);
  doc["metadata"] = {{"builder", meta.builder}, {"published_preset", meta.published_preset}, {"parameters", params}};
  return detail::emit(doc, 2);
}

BenchmarkPair parse_pair(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("pair file is not valid JSON: ") + e.what());
  }
  const Json& version = member(doc, "format_version", "");
  if (!version.is_number_integer() || version.get<long long>() != kPairFormatVersion) {
    bad("format_version", "unsupported version (this reader understands " +
                              std::to_string(kPairFormatVersion) + ")");
  }
  const Json& dim_json = member(doc, "dim", "");
  if (!dim_json.is_number_integer() || dim_json.get<long long>() < 1) bad("dim", "expected a positive integer");
  const auto dim = static_cast<Index>(dim_json.get<long long>());
  const double eps = read_real(member(doc, "epsilon", ""), "epsilon");
  if (!(eps > 0.0)) bad("epsilon", "must be positive");

  const Json& pot = member(doc, "potential", "");
  const Json& weights = member(pot, "weights", "potential");
  const Json& centers = member(pot, "centers", "potential");
  const Json& matrices = member(pot, "matrices", "potential");
  if (!weights.is_array() || weights.empty()) bad("potential.weights", "expected a non-empty list");
  if (!centers.is_array() || centers.size() != weights.size()) {
    bad("potential.centers", "expected one center per weight");
  }
  if (!matrices.is_array() || matrices.size() != weights.size()) {
    bad("potential.matrices", "expected one matrix per weight");
  }
  std::vector<LseComponent> comps;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const std::string idx = "[" + std::to_string(n) + "]";
    const double w = read_real(weights[n], "potential.weights" + idx);
    if (w < 0.0) bad("potential.weights" + idx, "weights must be non-negative");
    comps.push_back({w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity(),
                     read_vector(centers[n], dim, "potential.centers" + idx),
                     read_matrix(matrices[n], dim, "potential.matrices" + idx)});
  }

  PairMetadata meta;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) bad("name", "expected a string");
    meta.name = it->get<std::string>();
  }
  if (const auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      bad("seed", "expected a non-negative integer");
    }
    meta.seed = it->get<std::uint64_t>();
  }
  if (const auto it = doc.find("metadata"); it != doc.end() && it->is_object()) {
    if (const auto b = it->find("builder"); b != it->end() && b->is_string()) meta.builder = b->get<std::string>();
    if (const auto p = it->find("published_preset"); p != it->end() && p->is_boolean()) meta.published_preset = p->get<bool>();
    if (const auto p = it->find("parameters"); p != it->end() && p->is_object()) {
      for (auto e = p->begin(); e != p->end(); ++e) {
        meta.parameters.emplace_back(e.key(), read_real(e.value(), "metadata.parameters." + e.key()));
      }
    }
  }

  SourceDistribution source = read_source(member(doc, "source", ""), dim);
  try {
    return BenchmarkPair(std::move(source), LsePotential(eps, std::move(comps)), std::move(meta));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotAppropriate) throw;
    bad("potential", e.what());
  }
}

BenchmarkPair load_pair(const std::string& path) { return parse_pair(read_file(path)); }

void save_pair(const std::string& path, const BenchmarkPair& pair) {
  write_file_atomic(path, serialize_pair(pair));
}

std::string canonical_pair_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("pair file is not valid JSON: ") + e.what());
  }
  return detail::emit(doc, 0);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  require(ctx != nullptr && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) == 1 &&
              EVP_DigestFinal_ex(ctx.get(), digest, &len) == 1,
          ErrorCode::kIo, "SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string pair_text_digest(const std::string& text) { return sha256_hex(canonical_pair_text(text)); }

std::string pair_digest(const BenchmarkPair& pair) { return pair_text_digest(serialize_pair(pair)); }

}  // namespace eotbench
