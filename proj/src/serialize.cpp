#include "gradednet/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gradednet/rng.hpp"
#include "gradednet/version.hpp"

namespace gradednet {

namespace {

GradeVariant variant_from_tag(const std::string& tag) {
  if (tag == "integer") return GradeVariant::Integer;
  if (tag == "rational") return GradeVariant::Rational;
  if (tag == "pair") return GradeVariant::Pair;
  if (tag == "parity") return GradeVariant::Parity;
  throw std::invalid_argument("unknown grade variant '" + tag + "'");
}

Json block_to_rows(const Block& b) {
  Json rows = Json::array();
  for (int r = 0; r < b.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < b.cols; ++c) row.push_back(b.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Block block_from_rows(const Json& rows) {
  if (!rows.is_array() || rows.empty())
    throw std::invalid_argument("map block must be a non-empty array of rows");
  Block b;
  b.rows = static_cast<int>(rows.size());
  b.cols = static_cast<int>(rows.at(0).size());
  b.a.reserve(static_cast<std::size_t>(b.rows) * b.cols);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != b.cols)
      throw std::invalid_argument("map block rows have uneven lengths");
    for (const auto& x : row) b.a.push_back(x.get<double>());
  }
  return b;
}

}  // namespace

Json grade_to_json(const Grade& g) {
  switch (g.variant()) {
    case GradeVariant::Integer:
      return Json(g.first());
    case GradeVariant::Rational:
      return Json::array({g.numerator(), g.denominator()});
    case GradeVariant::Pair:
      return Json::array({g.first(), g.second()});
    case GradeVariant::Parity:
      return Json(g.first() == 0 ? "even" : "odd");
  }
  throw std::logic_error("unreachable");
}

Grade grade_from_json(const Json& j, GradeVariant variant) {
  switch (variant) {
    case GradeVariant::Integer:
      return Grade::integer(j.get<std::int64_t>());
    case GradeVariant::Rational:
      if (j.is_array() && j.size() == 2)
        return Grade::rational(j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>());
      return Grade::rational(j.get<std::int64_t>(), 1);
    case GradeVariant::Pair:
      if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("pair grade must be a two-element array");
      return Grade::pair(j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>());
    case GradeVariant::Parity:
      return Grade::parse(j.get<std::string>(), GradeVariant::Parity);
  }
  throw std::logic_error("unreachable");
}

Json sig_to_json(const GradingSignature& sig) {
  Json grades = Json::array();
  for (const auto& e : sig.entries())
    grades.push_back(Json::array({grade_to_json(e.grade), e.dim}));
  GradeVariant v = sig.empty() ? GradeVariant::Integer : sig.variant();
  return Json{{"grades", std::move(grades)}, {"variant", to_string(v)}};
}

GradingSignature sig_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("grades") || !j.contains("variant"))
    throw std::invalid_argument("signature must have 'grades' and 'variant'");
  GradeVariant variant = variant_from_tag(j.at("variant").get<std::string>());
  std::vector<GradeDim> entries;
  for (const auto& item : j.at("grades")) {
    if (!item.is_array() || item.size() != 2)
      throw std::invalid_argument("signature grades entries must be [grade, dim] pairs");
    entries.push_back({grade_from_json(item.at(0), variant), item.at(1).get<int>()});
  }
  return GradingSignature(std::move(entries));
}

Json vector_to_json(const GradedVector& v) {
  Json blocks = Json::object();
  for (std::size_t i = 0; i < v.sig().grade_count(); ++i) {
    Json arr = Json::array();
    for (double x : v.block(i)) arr.push_back(x);
    blocks[v.sig().grade_at(i).str()] = std::move(arr);
  }
  return Json{{"sig", sig_to_json(v.sig())}, {"blocks", std::move(blocks)}};
}

GradedVector vector_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("sig") || !j.contains("blocks"))
    throw std::invalid_argument("vector must have 'sig' and 'blocks'");
  GradingSignature sig = sig_from_json(j.at("sig"));
  GradedVector v(sig);
  const Json& blocks = j.at("blocks");
  for (const auto& [key, arr] : blocks.items()) {
    GradeVariant var = sig.empty() ? GradeVariant::Integer : sig.variant();
    Grade g = Grade::parse(key, var);
    auto idx = sig.index_of(g);
    if (!idx) throw std::invalid_argument("vector block grade " + key + " not in signature");
    auto dst = v.block(*idx);
    if (arr.size() != dst.size())
      throw std::invalid_argument("vector block " + key + " has wrong length");
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = arr.at(k).get<double>();
  }
  return v;
}

Json map_to_json(const GradedLinearMap& f) {
  Json blocks = Json::object();
  for (const auto& [q, blk] : f.blocks()) blocks[q.str()] = block_to_rows(blk);
  Json degree = f.degree() ? grade_to_json(*f.degree()) : Json(nullptr);
  return Json{{"domain", sig_to_json(f.domain())},
              {"codomain", sig_to_json(f.codomain())},
              {"degree", std::move(degree)},
              {"blocks", std::move(blocks)}};
}

GradedLinearMap map_from_json(const Json& j) {
  for (const char* key : {"domain", "codomain", "degree", "blocks"})
    if (!j.is_object() || !j.contains(key))
      throw std::invalid_argument(std::string("map is missing '") + key + "'");
  GradingSignature domain = sig_from_json(j.at("domain"));
  GradingSignature codomain = sig_from_json(j.at("codomain"));
  GradeVariant var = domain.empty() ? GradeVariant::Integer : domain.variant();

  std::map<Grade, Block> blocks;
  for (const auto& [key, rows] : j.at("blocks").items())
    blocks.emplace(Grade::parse(key, var), block_from_rows(rows));

  if (j.at("degree").is_null())
    return GradedLinearMap::collapse(std::move(domain), std::move(codomain),
                                     std::move(blocks));
  Grade degree = grade_from_json(j.at("degree"), var);
  return GradedLinearMap::graded(std::move(domain), std::move(codomain), degree,
                                 std::move(blocks));
}

Json weights_to_json(const LossWeights& w) {
  Json out = Json::object();
  for (const auto& [g, wi] : w.w) out[g.str()] = wi;
  return out;
}

LossWeights weights_from_json(const Json& j, GradeVariant variant) {
  LossWeights w;
  for (const auto& [key, val] : j.items())
    w.w.emplace(Grade::parse(key, variant), val.get<double>());
  return w;
}

Json layer_to_json(const GradedLayer& layer) {
  return Json{{"map", map_to_json(layer.map)},
              {"bias", vector_to_json(layer.bias)},
              {"activation", to_string(layer.activation)}};
}

GradedLayer layer_from_json(const Json& j) {
  for (const char* key : {"map", "bias", "activation"})
    if (!j.is_object() || !j.contains(key))
      throw std::invalid_argument(std::string("layer is missing '") + key + "'");
  return GradedLayer(map_from_json(j.at("map")), vector_from_json(j.at("bias")),
                     parse_activation(j.at("activation").get<std::string>()));
}

Json network_to_json(const GradedNetwork& net) {
  Json layers = Json::array();
  for (const auto& layer : net.layers()) layers.push_back(layer_to_json(layer));
  return Json{{"layers", std::move(layers)}};
}

GradedNetwork network_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("layers"))
    throw std::invalid_argument("network is missing 'layers'");
  std::vector<GradedLayer> layers;
  for (const auto& lj : j.at("layers")) layers.push_back(layer_from_json(lj));
  return GradedNetwork(std::move(layers));
}

Json report_to_json(const EquivarianceReport& rep) {
  return Json{{"verdict", rep.equivariant ? "equivariant" : "violated"},
              {"max_violation", rep.max_violation},
              {"witness", Json{{"lambda", rep.witness.lambda},
                               {"v", vector_to_json(rep.witness.v)}}}};
}

Json metrics_to_json(const MetricsRecord& rec) {
  return Json{{"experiment", rec.experiment},
              {"model", rec.model},
              {"seeds", rec.seeds},
              {"val_mse", rec.val_mse},
              {"epochs_to_improve", rec.epochs_to_improve},
              {"mean_mse", rec.mean_mse},
              {"std_mse", rec.std_mse},
              {"params", rec.params}};
}

std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const auto& s : data) {
    Json line{{"x", vector_to_json(s.x)}, {"y", vector_to_json(s.y)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
  Dataset data;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw std::invalid_argument("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("x") || !j.contains("y"))
      throw std::invalid_argument("dataset line " + std::to_string(lineno) +
                                  ": rows need 'x' and 'y'");
    data.push_back({vector_from_json(j.at("x")), vector_from_json(j.at("y"))});
  }
  return data;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::string config_hash(const Json& config) {
  std::uint64_t h = fnv1a(canonical_dump(config));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

Json provenance_json(const std::string& cfg_hash, std::uint64_t seed) {
  return Json{{"config_hash", cfg_hash}, {"seed", seed}, {"tool_version", kToolVersion}};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string content_checksum(const std::string& content) {
  std::uint64_t h = fnv1a(content);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace gradednet
