// Python bindings for the graded network core: signatures, vectors, maps,
// layers, networks, norms, training, and equivariance checks. Grades cross
// the boundary as their canonical strings; blocks as dicts of row-major
// nested lists.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradednet/equivariance.hpp"
#include "gradednet/experiments.hpp"
#include "gradednet/network.hpp"
#include "gradednet/norms.hpp"
#include "gradednet/version.hpp"

namespace py = pybind11;
using namespace gradednet;

namespace {

LossWeights weights_from_dict(const std::map<std::string, double>& d, GradeVariant variant) {
  LossWeights w;
  for (const auto& [key, value] : d) w.w.emplace(Grade::parse(key, variant), value);
  return w;
}

std::map<Grade, Block> blocks_from_dict(
    const std::map<std::string, std::vector<std::vector<double>>>& d, GradeVariant variant) {
  std::map<Grade, Block> blocks;
  for (const auto& [key, rows] : d) {
    if (rows.empty()) throw std::invalid_argument("block " + key + ": needs at least one row");
    Block b = Block::zeros(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size())
        throw std::invalid_argument("block " + key + ": rows have uneven lengths");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        b.a[r * rows[0].size() + c] = rows[r][c];
    }
    blocks.emplace(Grade::parse(key, variant), std::move(b));
  }
  return blocks;
}

py::dict report_to_dict(const EquivarianceReport& rep) {
  py::dict d;
  d["equivariant"] = rep.equivariant;
  d["max_violation"] = rep.max_violation;
  d["witness_lambda"] = rep.witness.lambda;
  return d;
}

std::string variant_name(GradeVariant v) {
  switch (v) {
    case GradeVariant::Integer: return "integer";
    case GradeVariant::Rational: return "rational";
    case GradeVariant::Pair: return "pair";
    case GradeVariant::Parity: return "parity";
  }
  return "?";
}

GradeVariant variant_from_name(const std::string& name) {
  if (name == "integer") return GradeVariant::Integer;
  if (name == "rational") return GradeVariant::Rational;
  if (name == "pair") return GradeVariant::Pair;
  if (name == "parity") return GradeVariant::Parity;
  throw std::invalid_argument("unknown grade variant '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(gradednet_py, m) {
  m.doc() = "graded vector spaces, graded linear layers, and equivariance checks";
  m.attr("__version__") = kToolVersion;

  py::class_<GradingSignature>(m, "Signature")
      .def_static("weights", [](const std::vector<std::int64_t>& w) {
        return GradingSignature::weights(w);
      })
      .def_static("parity_pair", &GradingSignature::parity_pair)
      .def_static(
          "of",
          [](const std::vector<std::pair<std::string, int>>& entries,
             const std::string& variant) {
            GradeVariant v = variant_from_name(variant);
            std::vector<GradeDim> e;
            e.reserve(entries.size());
            for (const auto& [key, dim] : entries) e.push_back({Grade::parse(key, v), dim});
            return GradingSignature(std::move(e));
          },
          py::arg("entries"), py::arg("variant") = "integer",
          "signature from (grade, dim) pairs, e.g. of([(\"2\", 3), (\"3\", 4)])")
      .def("total_dim", &GradingSignature::total_dim)
      .def("grade_count", &GradingSignature::grade_count)
      .def("variant", [](const GradingSignature& s) { return variant_name(s.variant()); })
      .def("grades",
           [](const GradingSignature& s) {
             std::vector<std::string> out;
             for (const auto& e : s.entries()) out.push_back(e.grade.str());
             return out;
           })
      .def("dims",
           [](const GradingSignature& s) {
             std::vector<int> out;
             for (const auto& e : s.entries()) out.push_back(e.dim);
             return out;
           })
      .def(py::self == py::self)
      .def("__repr__", [](const GradingSignature& s) {
        std::string r = "Signature(";
        for (std::size_t i = 0; i < s.grade_count(); ++i) {
          if (i) r += ", ";
          r += s.grade_at(i).str() + ":" + std::to_string(s.dim_at(i));
        }
        return r + ")";
      });

  py::class_<GradedVector>(m, "Vector")
      .def(py::init<GradingSignature>())
      .def(py::init<GradingSignature, std::vector<double>>())
      .def("sig", &GradedVector::sig)
      .def("flat", [](const GradedVector& v) { return v.flat(); })
      .def("block",
           [](const GradedVector& v, const std::string& grade) {
             auto b = v.block_of(Grade::parse(grade, v.sig().variant()));
             return std::vector<double>(b.begin(), b.end());
           })
      .def(py::self == py::self)
      .def("__repr__", [](const GradedVector& v) {
        std::string r = "Vector([";
        for (int i = 0; i < v.size(); ++i) {
          if (i) r += ", ";
          r += std::to_string(v.flat()[static_cast<std::size_t>(i)]);
        }
        return r + "])";
      });

  m.def("scalar_action", &scalar_action, py::arg("lam"), py::arg("v"),
        "scale the block at grade q by lam**q");
  m.def("inner_product", &inner_product);
  m.def("tensor_component_dims", [](const GradingSignature& a, const GradingSignature& b) {
    std::map<std::string, std::int64_t> out;
    for (const auto& [g, d] : tensor_component_dims(a, b)) out.emplace(g.str(), d);
    return out;
  });

  m.def("euclidean_norm", &euclidean_norm);
  m.def("homogeneous_norm", &homogeneous_norm);
  m.def("weighted_norm", [](const GradedVector& v, const std::map<std::string, double>& w) {
    return weighted_norm(v, weights_from_dict(w, v.sig().variant()));
  });
  m.def("graded_loss",
        [](const GradedVector& pred, const GradedVector& truth,
           const std::map<std::string, double>& w) {
          return graded_loss(pred, truth, weights_from_dict(w, pred.sig().variant()));
        });

  py::class_<GradedLinearMap>(m, "Map")
      .def_static(
          "graded",
          [](const GradingSignature& dom, const GradingSignature& cod,
             const std::string& degree,
             const std::map<std::string, std::vector<std::vector<double>>>& blocks) {
            return GradedLinearMap::graded(dom, cod, Grade::parse(degree, dom.variant()),
                                           blocks_from_dict(blocks, dom.variant()));
          },
          py::arg("domain"), py::arg("codomain"), py::arg("degree"), py::arg("blocks"))
      .def_static(
          "collapse",
          [](const GradingSignature& dom, const GradingSignature& cod,
             const std::map<std::string, std::vector<std::vector<double>>>& blocks) {
            return GradedLinearMap::collapse(dom, cod, blocks_from_dict(blocks, dom.variant()));
          },
          py::arg("domain"), py::arg("codomain"), py::arg("blocks"))
      .def("apply", &GradedLinearMap::apply)
      .def("domain", &GradedLinearMap::domain)
      .def("codomain", &GradedLinearMap::codomain)
      .def("degree",
           [](const GradedLinearMap& f) -> std::optional<std::string> {
             if (!f.degree()) return std::nullopt;
             return f.degree()->str();
           })
      .def("parameter_count", &GradedLinearMap::parameter_count);

  py::class_<GradedLayer>(m, "Layer")
      .def(py::init([](const GradedLinearMap& map, const GradedVector& bias,
                       const std::string& activation) {
             return GradedLayer(map, bias, parse_activation(activation));
           }),
           py::arg("map"), py::arg("bias"), py::arg("activation"))
      .def("apply", &GradedLayer::apply)
      .def("parameter_count", &GradedLayer::parameter_count);

  py::class_<GradedNetwork>(m, "Network")
      .def(py::init<std::vector<GradedLayer>>())
      .def("forward", &GradedNetwork::forward)
      .def("input_sig", &GradedNetwork::input_sig)
      .def("output_sig", &GradedNetwork::output_sig)
      .def("parameter_count", &GradedNetwork::parameter_count);

  m.def(
      "initialize_parameters",
      [](GradedNetwork& net, std::uint64_t seed) { initialize_parameters(net, seed); },
      py::arg("net"), py::arg("seed"), "fill all blocks and biases from the seed, in place");

  m.def(
      "train",
      [](const GradedNetwork& net,
         const std::vector<std::pair<GradedVector, GradedVector>>& data,
         const std::optional<std::map<std::string, double>>& loss_weights, double eta,
         int epochs, std::uint64_t seed) {
        Dataset ds;
        ds.reserve(data.size());
        for (const auto& [x, y] : data) ds.push_back({x, y});
        const GradingSignature& out = net.output_sig();
        LossWeights w = loss_weights ? weights_from_dict(*loss_weights, out.variant())
                                     : LossWeights::uniform(out);
        GradedNetwork copy = net;
        TrainResult result = train(copy, ds, w, eta, epochs, seed);
        return py::make_tuple(result.net, result.history);
      },
      py::arg("net"), py::arg("data"), py::arg("loss_weights") = std::nullopt,
      py::arg("eta") = 0.01, py::arg("epochs") = 100, py::arg("seed") = 0,
      "per-sample SGD; returns (trained network, per-epoch loss history)");

  m.def(
      "check_map_equivariance",
      [](const GradedLinearMap& f) {
        auto rep = check_map_equivariance(
            [&f](const GradedVector& v) { return f.apply(v); }, f.domain());
        return report_to_dict(rep);
      },
      py::arg("map"));
  m.def(
      "check_network_equivariance",
      [](const GradedNetwork& net) {
        auto rep = check_map_equivariance(
            [&net](const GradedVector& v) { return net.forward(v); }, net.input_sig());
        return report_to_dict(rep);
      },
      py::arg("net"));
}
