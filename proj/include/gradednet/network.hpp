#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradednet/gmap.hpp"
#include "gradednet/norms.hpp"

namespace gradednet {

/// Pointwise activation choices.
///
/// GradedRelu is the literal per-grade form max{0, |z|^{1/q}}, which equals
/// |z|^{1/q} for every real z (the absolute value is never negative, so the
/// max with 0 never binds). PositivePartGradedRelu is the alternative reading
/// max{0, z}^{1/q} that actually kills negative inputs. Both are provided;
/// GradedRelu is the default.
enum class ActivationKind { GradedRelu, PositivePartGradedRelu, StandardRelu, Identity };

std::string to_string(ActivationKind k);
ActivationKind parse_activation(const std::string& tag);

/// Derivative clamp for the graded kinds: |z| is clamped to at least this
/// before forming |z|^{1/q - 1}, which diverges at 0 for q > 1.
inline constexpr double kActivationEps = 1e-10;

/// Apply the activation component-wise. Graded kinds exponentiate each block
/// by 1/q where q is the block's grade as a real number; they require integer
/// or rational grades, all positive. StandardRelu and Identity work on any
/// variant. Output signature equals input signature.
GradedVector graded_relu(const GradedVector& z, ActivationKind kind);

/// Component-wise derivative of graded_relu at z, with the subgradient at
/// z = 0 fixed to 0 for every kind with a kink there.
GradedVector relu_derivative(const GradedVector& z, ActivationKind kind);

/// One graded layer: x -> activation(map(x) + bias).
struct GradedLayer {
  GradedLinearMap map;
  GradedVector bias;
  ActivationKind activation = ActivationKind::GradedRelu;

  GradedLayer() = default;
  GradedLayer(GradedLinearMap m, GradedVector b, ActivationKind act);

  GradedVector apply(const GradedVector& x) const;
  std::int64_t parameter_count() const;
};

/// Per-layer forward quantities retained for backpropagation.
struct LayerTrace {
  GradedVector z;  ///< pre-activation map(x) + bias
  GradedVector a;  ///< post-activation
};

struct ForwardTrace {
  GradedVector input;
  std::vector<LayerTrace> layers;
};

/// Gradients for one layer, shaped like the layer's stored parameters.
struct LayerGrads {
  std::map<Grade, Block> dW;
  GradedVector db;
};

/// A feed-forward stack of graded layers with chained signatures.
class GradedNetwork {
 public:
  GradedNetwork() = default;
  explicit GradedNetwork(std::vector<GradedLayer> layers);

  const std::vector<GradedLayer>& layers() const { return layers_; }
  std::vector<GradedLayer>& layers() { return layers_; }
  bool empty() const { return layers_.empty(); }

  const GradingSignature& input_sig() const;
  const GradingSignature& output_sig() const;

  GradedVector forward(const GradedVector& x) const;
  ForwardTrace forward_trace(const GradedVector& x) const;

  std::int64_t parameter_count() const;

 private:
  std::vector<GradedLayer> layers_;
};

/// Backpropagate d(loss)/d(prediction) through the traced forward pass.
/// Returns one LayerGrads per layer, in layer order. Gradients exist only for
/// stored blocks; absent blocks are structural zeros, not parameters.
std::vector<LayerGrads> backward(const GradedNetwork& net, const ForwardTrace& trace,
                                 const GradedVector& loss_grad);

struct Sample {
  GradedVector x;
  GradedVector y;
};

using Dataset = std::vector<Sample>;

struct TrainResult {
  GradedNetwork net;
  std::vector<double> history;  ///< per-epoch mean of pre-update sample losses
};

/// Draw every stored weight and bias entry from N(0, 0.1) (variance 0.1),
/// in deterministic order: layers in order, blocks by ascending grade,
/// entries row-major, then bias coordinates.
void initialize_parameters(GradedNetwork& net, std::uint64_t seed);

/// Per-sample SGD in fixed dataset order: parameters are first re-initialized
/// from the seed, then for each epoch every sample contributes one update
/// W <- W - eta * dW. No shuffling, no batching, no momentum. A non-finite
/// sample loss aborts with the epoch and sample index in the message.
TrainResult train(const GradedNetwork& net, const Dataset& data, const LossWeights& w,
                  double eta, int epochs, std::uint64_t seed);

/// One dense layer over flattened coordinates.
struct DenseLayer {
  Block w;
  std::vector<double> b;
  ActivationKind activation = ActivationKind::StandardRelu;
};

/// The comparison arm: a standard network of dense matrices on the flattened
/// coordinate vector, ignoring the grading.
class DenseBaseline {
 public:
  DenseBaseline() = default;
  explicit DenseBaseline(std::vector<DenseLayer> layers);

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  int input_dim() const;
  int output_dim() const;

  std::vector<double> forward(const std::vector<double>& x) const;
  std::int64_t parameter_count() const;

 private:
  std::vector<DenseLayer> layers_;
};

struct DenseTrainResult {
  DenseBaseline net;
  std::vector<double> history;
};

void initialize_parameters(DenseBaseline& net, std::uint64_t seed);

/// Same protocol as the graded train(): re-init from seed, per-sample SGD in
/// order. The loss is sum_j cw_j (pred_j - y_j)^2 with per-output-coordinate
/// weights cw, so both arms of an experiment can share one objective.
DenseTrainResult train_dense(const DenseBaseline& net,
                             const std::vector<std::vector<double>>& xs,
                             const std::vector<std::vector<double>>& ys,
                             const std::vector<double>& coord_weights, double eta,
                             int epochs, std::uint64_t seed);

}  // namespace gradednet
