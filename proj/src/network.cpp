#include "gradednet/network.hpp"

#include <cmath>
#include <stdexcept>

#include "gradednet/rng.hpp"

namespace gradednet {

namespace {

double act_scalar(double z, double inv_q, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::GradedRelu:
      return std::pow(std::abs(z), inv_q);
    case ActivationKind::PositivePartGradedRelu:
      return z > 0.0 ? std::pow(z, inv_q) : 0.0;
    case ActivationKind::StandardRelu:
      return z > 0.0 ? z : 0.0;
    case ActivationKind::Identity:
      return z;
  }
  throw std::logic_error("unreachable");
}

double act_deriv_scalar(double z, double inv_q, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::GradedRelu: {
      if (z == 0.0) return 0.0;
      double mag = std::max(std::abs(z), kActivationEps);
      double sign = z > 0.0 ? 1.0 : -1.0;
      return inv_q * std::pow(mag, inv_q - 1.0) * sign;
    }
    case ActivationKind::PositivePartGradedRelu: {
      if (z <= 0.0) return 0.0;
      double mag = std::max(z, kActivationEps);
      return inv_q * std::pow(mag, inv_q - 1.0);
    }
    case ActivationKind::StandardRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case ActivationKind::Identity:
      return 1.0;
  }
  throw std::logic_error("unreachable");
}

bool is_graded_kind(ActivationKind kind) {
  return kind == ActivationKind::GradedRelu ||
         kind == ActivationKind::PositivePartGradedRelu;
}

// 1/q per grade block, or 1.0 placeholders for the ungraded kinds.
std::vector<double> block_inv_exponents(const GradingSignature& sig, ActivationKind kind) {
  std::vector<double> inv(sig.grade_count(), 1.0);
  if (!is_graded_kind(kind)) return inv;
  for (std::size_t i = 0; i < sig.grade_count(); ++i) {
    double q = sig.grade_at(i).as_exponent();  // throws for pair/parity
    if (!(q > 0.0))
      throw std::domain_error("graded activation requires positive grades, got " +
                              sig.grade_at(i).str());
    inv[i] = 1.0 / q;
  }
  return inv;
}

}  // namespace

std::string to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::GradedRelu: return "graded_relu";
    case ActivationKind::PositivePartGradedRelu: return "positive_part_graded_relu";
    case ActivationKind::StandardRelu: return "standard_relu";
    case ActivationKind::Identity: return "identity";
  }
  return "?";
}

ActivationKind parse_activation(const std::string& tag) {
  if (tag == "graded_relu") return ActivationKind::GradedRelu;
  if (tag == "positive_part_graded_relu") return ActivationKind::PositivePartGradedRelu;
  if (tag == "standard_relu") return ActivationKind::StandardRelu;
  if (tag == "identity") return ActivationKind::Identity;
  throw std::invalid_argument("unknown activation '" + tag + "'");
}

GradedVector graded_relu(const GradedVector& z, ActivationKind kind) {
  auto inv = block_inv_exponents(z.sig(), kind);
  GradedVector out(z.sig());
  for (std::size_t i = 0; i < z.sig().grade_count(); ++i) {
    auto zi = z.block(i);
    auto oi = out.block(i);
    for (std::size_t j = 0; j < zi.size(); ++j) oi[j] = act_scalar(zi[j], inv[i], kind);
  }
  return out;
}

GradedVector relu_derivative(const GradedVector& z, ActivationKind kind) {
  auto inv = block_inv_exponents(z.sig(), kind);
  GradedVector out(z.sig());
  for (std::size_t i = 0; i < z.sig().grade_count(); ++i) {
    auto zi = z.block(i);
    auto oi = out.block(i);
    for (std::size_t j = 0; j < zi.size(); ++j) oi[j] = act_deriv_scalar(zi[j], inv[i], kind);
  }
  return out;
}

GradedLayer::GradedLayer(GradedLinearMap m, GradedVector b, ActivationKind act)
    : map(std::move(m)), bias(std::move(b)), activation(act) {
  if (bias.sig() != map.codomain())
    throw std::invalid_argument("layer bias signature does not match map codomain");
}

GradedVector GradedLayer::apply(const GradedVector& x) const {
  return graded_relu(map.apply(x) + bias, activation);
}

std::int64_t GradedLayer::parameter_count() const {
  return map.parameter_count() + bias.size();
}

GradedNetwork::GradedNetwork(std::vector<GradedLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 1; l < layers_.size(); ++l)
    if (layers_[l].map.domain() != layers_[l - 1].map.codomain())
      throw std::invalid_argument("layer " + std::to_string(l) +
                                  " domain does not chain with previous codomain");
}

const GradingSignature& GradedNetwork::input_sig() const {
  if (layers_.empty()) throw std::logic_error("empty network has no input signature");
  return layers_.front().map.domain();
}

const GradingSignature& GradedNetwork::output_sig() const {
  if (layers_.empty()) throw std::logic_error("empty network has no output signature");
  return layers_.back().map.codomain();
}

GradedVector GradedNetwork::forward(const GradedVector& x) const {
  if (layers_.empty()) return x;
  if (x.sig() != input_sig())
    throw std::invalid_argument("forward: input signature does not match network");
  GradedVector a = x;
  for (const auto& layer : layers_) a = layer.apply(a);
  return a;
}

ForwardTrace GradedNetwork::forward_trace(const GradedVector& x) const {
  if (!layers_.empty() && x.sig() != input_sig())
    throw std::invalid_argument("forward: input signature does not match network");
  ForwardTrace tr;
  tr.input = x;
  tr.layers.reserve(layers_.size());
  GradedVector a = x;
  for (const auto& layer : layers_) {
    LayerTrace lt;
    lt.z = layer.map.apply(a) + layer.bias;
    lt.a = graded_relu(lt.z, layer.activation);
    a = lt.a;
    tr.layers.push_back(std::move(lt));
  }
  return tr;
}

std::int64_t GradedNetwork::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& layer : layers_) n += layer.parameter_count();
  return n;
}

std::vector<LayerGrads> backward(const GradedNetwork& net, const ForwardTrace& trace,
                                 const GradedVector& loss_grad) {
  const auto& layers = net.layers();
  if (trace.layers.size() != layers.size())
    throw std::invalid_argument("backward: trace does not match network depth");
  if (!layers.empty() && loss_grad.sig() != net.output_sig())
    throw std::invalid_argument("backward: loss gradient signature mismatch");

  std::vector<LayerGrads> grads(layers.size());
  GradedVector delta = loss_grad;  // d(loss)/d(a_l)

  for (std::size_t li = layers.size(); li-- > 0;) {
    const GradedLayer& layer = layers[li];
    const GradedVector& z = trace.layers[li].z;
    const GradedVector& a_prev = li == 0 ? trace.input : trace.layers[li - 1].a;

    // delta_tilde = delta (Hadamard) g'(z), i.e. d(loss)/d(z_l).
    GradedVector dtilde = relu_derivative(z, layer.activation);
    {
      auto& dt = dtilde.flat();
      const auto& dl = delta.flat();
      for (std::size_t k = 0; k < dt.size(); ++k) dt[k] *= dl[k];
    }

    LayerGrads& g = grads[li];
    g.db = dtilde;
    GradedVector next_delta(layer.map.domain());

    for (const auto& [q, blk] : layer.map.blocks()) {
      Grade target = layer.map.degree() ? grade_add(q, *layer.map.degree())
                                        : layer.map.codomain().grade_at(0);
      auto dt = dtilde.block_of(target);
      auto ap = a_prev.block_of(q);
      auto nd = next_delta.block_of(q);

      // dW block = dtilde[target] . a_prev[q]^T (outer product).
      Block db = Block::zeros(blk.rows, blk.cols);
      for (int r = 0; r < blk.rows; ++r)
        for (int c = 0; c < blk.cols; ++c)
          db.at(r, c) = dt[static_cast<std::size_t>(r)] * ap[static_cast<std::size_t>(c)];
      g.dW.emplace(q, std::move(db));

      // delta_{l-1}[q] += B^T dtilde[target]; collapse maps accumulate from
      // the one shared target block into every domain grade.
      for (int c = 0; c < blk.cols; ++c) {
        double acc = 0.0;
        for (int r = 0; r < blk.rows; ++r) acc += blk.at(r, c) * dt[static_cast<std::size_t>(r)];
        nd[static_cast<std::size_t>(c)] += acc;
      }
    }
    delta = std::move(next_delta);
  }
  return grads;
}

void initialize_parameters(GradedNetwork& net, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : net.layers()) {
    for (auto& [q, blk] : layer.map.blocks())
      for (double& x : blk.a) x = rng.normal(0.0, 0.1);
    for (double& x : layer.bias.flat()) x = rng.normal(0.0, 0.1);
  }
}

TrainResult train(const GradedNetwork& net, const Dataset& data, const LossWeights& w,
                  double eta, int epochs, std::uint64_t seed) {
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("train: learning rate must be >= 0");
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  w.validate_for(net.output_sig());

  TrainResult res;
  res.net = net;
  initialize_parameters(res.net, seed);
  res.history.reserve(static_cast<std::size_t>(epochs));

  for (int epoch = 1; epoch <= epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t si = 0; si < data.size(); ++si) {
      const Sample& s = data[si];
      ForwardTrace tr = res.net.forward_trace(s.x);
      const GradedVector& pred = tr.layers.back().a;
      double loss = graded_loss(pred, s.y, w);
      if (!std::isfinite(loss))
        throw std::runtime_error("training aborted: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", sample " + std::to_string(si));
      loss_sum += loss;

      auto grads = backward(res.net, tr, graded_loss_gradient(pred, s.y, w));
      for (std::size_t li = 0; li < grads.size(); ++li) {
        GradedLayer& layer = res.net.layers()[li];
        for (auto& [q, dblk] : grads[li].dW) {
          Block& blk = layer.map.blocks().at(q);
          for (std::size_t k = 0; k < blk.a.size(); ++k) blk.a[k] -= eta * dblk.a[k];
        }
        auto& b = layer.bias.flat();
        const auto& db = grads[li].db.flat();
        for (std::size_t k = 0; k < b.size(); ++k) b[k] -= eta * db[k];
      }
    }
    res.history.push_back(loss_sum / static_cast<double>(data.size()));
  }
  return res;
}

DenseBaseline::DenseBaseline(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (auto& layer : layers_) {
    if (static_cast<int>(layer.b.size()) != layer.w.rows)
      throw std::invalid_argument("dense layer bias length does not match matrix rows");
    if (static_cast<int>(layer.w.a.size()) != layer.w.rows * layer.w.cols)
      throw std::invalid_argument("dense layer matrix has wrong entry count");
  }
  for (std::size_t l = 1; l < layers_.size(); ++l)
    if (layers_[l].w.cols != layers_[l - 1].w.rows)
      throw std::invalid_argument("dense layer " + std::to_string(l) + " does not chain");
}

int DenseBaseline::input_dim() const {
  return layers_.empty() ? 0 : layers_.front().w.cols;
}

int DenseBaseline::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().w.rows;
}

std::vector<double> DenseBaseline::forward(const std::vector<double>& x) const {
  std::vector<double> a = x;
  for (const auto& layer : layers_) {
    if (static_cast<int>(a.size()) != layer.w.cols)
      throw std::invalid_argument("dense forward: input length mismatch");
    std::vector<double> z(static_cast<std::size_t>(layer.w.rows));
    for (int r = 0; r < layer.w.rows; ++r) {
      double acc = layer.b[static_cast<std::size_t>(r)];
      const double* row = layer.w.a.data() + static_cast<std::size_t>(r) * layer.w.cols;
      for (int c = 0; c < layer.w.cols; ++c) acc += row[c] * a[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = acc;
    }
    for (double& v : z) v = act_scalar(v, 1.0, layer.activation);
    a = std::move(z);
  }
  return a;
}

std::int64_t DenseBaseline::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& layer : layers_)
    n += static_cast<std::int64_t>(layer.w.a.size()) +
         static_cast<std::int64_t>(layer.b.size());
  return n;
}

void initialize_parameters(DenseBaseline& net, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : net.layers()) {
    for (double& x : layer.w.a) x = rng.normal(0.0, 0.1);
    for (double& x : layer.b) x = rng.normal(0.0, 0.1);
  }
}

DenseTrainResult train_dense(const DenseBaseline& net,
                             const std::vector<std::vector<double>>& xs,
                             const std::vector<std::vector<double>>& ys,
                             const std::vector<double>& coord_weights, double eta,
                             int epochs, std::uint64_t seed) {
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("train: learning rate must be >= 0");
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("train: dataset is empty or misaligned");

  DenseTrainResult res;
  res.net = net;
  initialize_parameters(res.net, seed);
  res.history.reserve(static_cast<std::size_t>(epochs));

  const std::size_t depth = res.net.layers().size();
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    double loss_sum = 0.0;
    for (std::size_t si = 0; si < xs.size(); ++si) {
      // Forward with retained traces.
      std::vector<std::vector<double>> zs(depth), as(depth);
      const std::vector<double>* a = &xs[si];
      for (std::size_t li = 0; li < depth; ++li) {
        const DenseLayer& layer = res.net.layers()[li];
        auto& z = zs[li];
        z.assign(static_cast<std::size_t>(layer.w.rows), 0.0);
        for (int r = 0; r < layer.w.rows; ++r) {
          double acc = layer.b[static_cast<std::size_t>(r)];
          const double* row = layer.w.a.data() + static_cast<std::size_t>(r) * layer.w.cols;
          for (int c = 0; c < layer.w.cols; ++c)
            acc += row[c] * (*a)[static_cast<std::size_t>(c)];
          z[static_cast<std::size_t>(r)] = acc;
        }
        as[li].resize(z.size());
        for (std::size_t k = 0; k < z.size(); ++k)
          as[li][k] = act_scalar(z[k], 1.0, layer.activation);
        a = &as[li];
      }

      const auto& pred = as.back();
      const auto& y = ys[si];
      double loss = 0.0;
      std::vector<double> delta(pred.size());
      for (std::size_t k = 0; k < pred.size(); ++k) {
        double d = pred[k] - y[k];
        loss += coord_weights[k] * d * d;
        delta[k] = 2.0 * coord_weights[k] * d;
      }
      if (!std::isfinite(loss))
        throw std::runtime_error("training aborted: non-finite loss at epoch " +
                                 std::to_string(epoch) + ", sample " + std::to_string(si));
      loss_sum += loss;

      for (std::size_t li = depth; li-- > 0;) {
        DenseLayer& layer = res.net.layers()[li];
        const auto& z = zs[li];
        const std::vector<double>& a_prev = li == 0 ? xs[si] : as[li - 1];
        for (std::size_t k = 0; k < delta.size(); ++k)
          delta[k] *= act_deriv_scalar(z[k], 1.0, layer.activation);

        std::vector<double> next_delta(static_cast<std::size_t>(layer.w.cols), 0.0);
        for (int r = 0; r < layer.w.rows; ++r) {
          double* row = layer.w.a.data() + static_cast<std::size_t>(r) * layer.w.cols;
          double dr = delta[static_cast<std::size_t>(r)];
          for (int c = 0; c < layer.w.cols; ++c) {
            next_delta[static_cast<std::size_t>(c)] += row[c] * dr;
            row[c] -= eta * dr * a_prev[static_cast<std::size_t>(c)];
          }
          layer.b[static_cast<std::size_t>(r)] -= eta * dr;
        }
        delta = std::move(next_delta);
      }
    }
    res.history.push_back(loss_sum / static_cast<double>(xs.size()));
  }
  return res;
}

}  // namespace gradednet
