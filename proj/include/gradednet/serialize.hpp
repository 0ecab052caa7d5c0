#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gradednet/equivariance.hpp"
#include "gradednet/experiments.hpp"

namespace gradednet {

using Json = nlohmann::json;

/// Grades encode per variant: integer -> number, rational -> [p, q],
/// pair -> [m, n], parity -> "even" | "odd". String keys (vector and map
/// blocks) use Grade::str().
Json grade_to_json(const Grade& g);
Grade grade_from_json(const Json& j, GradeVariant variant);

/// {"grades": [[<grade>, dim], ...], "variant": "integer|rational|pair|parity"}
Json sig_to_json(const GradingSignature& sig);
GradingSignature sig_from_json(const Json& j);

/// {"sig": <sig>, "blocks": {"<grade>": [floats]}}; zero blocks are kept so
/// the file round-trips exactly.
Json vector_to_json(const GradedVector& v);
GradedVector vector_from_json(const Json& j);

/// {"domain": <sig>, "codomain": <sig>, "degree": <grade>|null,
///  "blocks": {"<grade>": [[row], ...]}}. A null degree marks a collapse map
/// onto the single codomain grade.
Json map_to_json(const GradedLinearMap& f);
GradedLinearMap map_from_json(const Json& j);

/// {"<grade>": weight}, keyed by Grade::str() under the given variant.
Json weights_to_json(const LossWeights& w);
LossWeights weights_from_json(const Json& j, GradeVariant variant);

/// {"map": ..., "bias": ..., "activation": "<tag>"}
Json layer_to_json(const GradedLayer& layer);
GradedLayer layer_from_json(const Json& j);

/// {"layers": [<layer>, ...]}; extra top-level fields (provenance) ignored
/// on load.
Json network_to_json(const GradedNetwork& net);
GradedNetwork network_from_json(const Json& j);

/// {"verdict": "equivariant"|"violated", "max_violation": x,
///  "witness": {"lambda": l, "v": <vector>}}
Json report_to_json(const EquivarianceReport& rep);

Json metrics_to_json(const MetricsRecord& rec);

/// One dataset row per line: {"x": <vector>, "y": <vector>}.
std::string dataset_to_jsonl(const Dataset& data);
Dataset dataset_from_jsonl(const std::string& text);

/// Canonical text form used for hashing: nlohmann dump with sorted keys
/// (object keys are stored sorted) and no incidental whitespace.
std::string canonical_dump(const Json& j);

/// FNV-1a hash of the canonical dump, as fixed-width lowercase hex.
std::string config_hash(const Json& config);

/// {"config_hash": ..., "seed": ..., "tool_version": ...}
Json provenance_json(const std::string& cfg_hash, std::uint64_t seed);

/// Write via a temp file in the same directory plus rename, so readers never
/// observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// FNV-1a content checksum as hex, printed by gen-data.
std::string content_checksum(const std::string& content);

}  // namespace gradednet
