#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sketch/layers.hpp"
#include "sketch/parsing.hpp"
#include "sketch/tensor.hpp"

namespace sketch {

enum class LayerKind : std::uint8_t { conv, relu, maxpool, maxpool_same, lrn };

struct LayerSpec {
  LayerKind kind = LayerKind::conv;
  std::size_t kernel = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t pad = 0;
};

enum class Architecture : std::uint8_t { bfcn, pnet };

/// Layer lists of one of the two fixed architectures. For the branched
/// network `trunk` is the shared part and `structural` / `textural` the two
/// sibling branches; the parsing network only uses `trunk`.
struct NetworkSpec {
  Architecture arch = Architecture::bfcn;
  std::size_t in_channels = 0;
  std::vector<LayerSpec> trunk;
  std::vector<LayerSpec> structural;
  std::vector<LayerSpec> textural;
  LrnParams lrn;

  std::string describe() const;
  std::uint64_t hash() const;
  std::size_t conv_count() const;
};

struct BfcnWidths {
  std::array<std::size_t, 3> trunk{32, 32, 32};
  std::array<std::size_t, 2> branch{32, 16};
};

struct PnetWidths {
  std::array<std::size_t, 7> hidden{16, 16, 32, 32, 32, 64, 64};
  std::array<std::size_t, 8> kernels{5, 5, 5, 3, 3, 3, 3, 1};
};

/// Shared 5x5, 5x5, 1x1 trunk; each branch 1x1, 3x3, 3x3 ending in one
/// linear output channel. No padding anywhere, so each spatial dim shrinks by 12.
NetworkSpec bfcn_spec(std::size_t in_channels, const BfcnWidths& widths = {});

/// Eight same-padded convolutions; the first three are followed by ReLU, a 2x2
/// max-pool and LRN. Only the first pool halves the resolution. The last
/// convolution emits three logits.
NetworkSpec pnet_spec(std::size_t in_channels, const PnetWidths& widths = {},
                      const LrnParams& lrn = {});

inline constexpr std::size_t kBfcnShrink = 12;

struct NetworkWeights {
  /// Convolutions of trunk, structural branch and textural branch, in order.
  std::vector<ConvParams> layers;
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::uint32_t epoch = 0;

  std::size_t parameter_count() const;
  bool same_parameters(const NetworkWeights& other) const { return layers == other.layers; }
};

/// Zero-valued parameters shaped for `spec`.
NetworkWeights zero_weights(const NetworkSpec& spec);

/// Kernels drawn from N(0, stddev^2) with a seeded generator, biases zero.
/// Values are rounded to single precision so they survive a weight-file round trip.
NetworkWeights init_weights(const NetworkSpec& spec, std::uint64_t seed, double stddev = 0.01);

/// Throws ShapeError unless every layer of `weights` matches `spec`.
void check_weights(const NetworkSpec& spec, const NetworkWeights& weights);

/// Inputs to every layer of one sequence, kept for the backward pass.
struct SequenceTrace {
  std::vector<Tensor> inputs;
};

Tensor run_sequence(const Tensor& input, std::span<const LayerSpec> layers,
                    std::span<const ConvParams> params, const LrnParams& lrn,
                    SequenceTrace* trace = nullptr);

/// Backpropagates `grad_out` through a traced sequence, adding parameter
/// gradients into `param_grads`. Returns the gradient w.r.t. the sequence input.
Tensor backward_sequence(std::span<const LayerSpec> layers, std::span<const ConvParams> params,
                         const LrnParams& lrn, const SequenceTrace& trace, Tensor grad_out,
                         std::span<ConvParams> param_grads);

enum class Branch : std::uint8_t { structural, textural };

struct BfcnOutput {
  Tensor structural;
  Tensor textural;
};

/// Runs the shared trunk once and both branches on its features.
BfcnOutput bfcn_forward(const Tensor& input, const NetworkSpec& spec,
                        const NetworkWeights& weights);

/// Same outputs computed as two isolated networks, each with its own copy of
/// the trunk.
BfcnOutput bfcn_forward_unshared(const Tensor& input, const NetworkSpec& spec,
                                 const NetworkWeights& weights);

struct BranchTrace {
  SequenceTrace trunk;
  SequenceTrace branch;
};

Tensor bfcn_forward_branch(const Tensor& input, const NetworkSpec& spec,
                           const NetworkWeights& weights, Branch branch, BranchTrace* trace);

/// Adds the gradients of one branch pass into `grads`; returns the input gradient.
Tensor bfcn_backward_branch(const NetworkSpec& spec, const NetworkWeights& weights, Branch branch,
                            const BranchTrace& trace, const Tensor& grad_out,
                            NetworkWeights& grads);

Tensor pnet_logits(const Tensor& input, const NetworkSpec& spec, const NetworkWeights& weights,
                   SequenceTrace* trace = nullptr);
Tensor pnet_backward(const NetworkSpec& spec, const NetworkWeights& weights,
                     const SequenceTrace& trace, const Tensor& grad_logits,
                     NetworkWeights& grads);

/// Softmax over the parsing logits.
ParsingMap pnet_forward(const Tensor& input, const NetworkSpec& spec,
                        const NetworkWeights& weights);

}  // namespace sketch
