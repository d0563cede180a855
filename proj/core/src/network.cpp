#include "sketch/network.hpp"

#include <random>
#include <sstream>

#include "sketch/losses.hpp"

namespace sketch {

namespace {

LayerSpec conv(std::size_t k, std::size_t in, std::size_t out, std::size_t pad = 0) {
  return {LayerKind::conv, k, in, out, pad};
}
LayerSpec relu_layer() { return {LayerKind::relu}; }

std::size_t count_convs(const std::vector<LayerSpec>& layers) {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.kind == LayerKind::conv;
  return n;
}

const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv: return "conv";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::maxpool_same: return "maxpool_same";
    case LayerKind::lrn: return "lrn";
  }
  return "?";
}

void describe_layers(std::ostringstream& os, const char* name,
                     const std::vector<LayerSpec>& layers) {
  os << name << ":";
  for (const auto& l : layers) {
    os << kind_name(l.kind);
    if (l.kind == LayerKind::conv)
      os << l.kernel << "x" << l.kernel << ":" << l.in_channels << "->" << l.out_channels
         << ":p" << l.pad;
    os << ",";
  }
  os << "|";
}

struct Segment {
  std::span<const LayerSpec> layers;
  std::size_t first_param = 0;
  std::size_t param_count = 0;
};

Segment trunk_segment(const NetworkSpec& spec) {
  return {spec.trunk, 0, count_convs(spec.trunk)};
}

Segment branch_segment(const NetworkSpec& spec, Branch b) {
  const std::size_t trunk = count_convs(spec.trunk);
  if (b == Branch::structural) return {spec.structural, trunk, count_convs(spec.structural)};
  return {spec.textural, trunk + count_convs(spec.structural), count_convs(spec.textural)};
}

std::span<const ConvParams> params_of(const NetworkWeights& w, const Segment& s) {
  return std::span<const ConvParams>(w.layers).subspan(s.first_param, s.param_count);
}
std::span<ConvParams> params_of(NetworkWeights& w, const Segment& s) {
  return std::span<ConvParams>(w.layers).subspan(s.first_param, s.param_count);
}

void check_bfcn_input(const Tensor& input, const NetworkSpec& spec) {
  if (spec.arch != Architecture::bfcn) throw std::invalid_argument("expected a BFCN spec");
  if (input.channels() != spec.in_channels || input.height() <= kBfcnShrink ||
      input.width() <= kBfcnShrink) {
    throw ShapeError("bfcn_forward: input " + input.shape().str() + " needs " +
                     std::to_string(spec.in_channels) + " channels and spatial dims >= " +
                     std::to_string(kBfcnShrink + 1));
  }
}

void check_pnet_input(const Tensor& input, const NetworkSpec& spec) {
  if (spec.arch != Architecture::pnet) throw std::invalid_argument("expected a P-Net spec");
  if (input.channels() != spec.in_channels || input.height() % 2 != 0 ||
      input.width() % 2 != 0 || input.height() == 0 || input.width() == 0) {
    throw ShapeError("pnet_forward: input " + input.shape().str() + " needs " +
                     std::to_string(spec.in_channels) + " channels and even spatial dims");
  }
}

}  // namespace

std::string NetworkSpec::describe() const {
  std::ostringstream os;
  os << (arch == Architecture::bfcn ? "bfcn" : "pnet") << "|in=" << in_channels << "|";
  describe_layers(os, "trunk", trunk);
  describe_layers(os, "structural", structural);
  describe_layers(os, "textural", textural);
  os << "lrn=" << lrn.k << "," << lrn.n << "," << lrn.alpha << "," << lrn.beta;
  return os.str();
}

std::uint64_t NetworkSpec::hash() const {
  // FNV-1a over the canonical description.
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : describe()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::size_t NetworkSpec::conv_count() const {
  return count_convs(trunk) + count_convs(structural) + count_convs(textural);
}

NetworkSpec bfcn_spec(std::size_t in_channels, const BfcnWidths& w) {
  NetworkSpec spec;
  spec.arch = Architecture::bfcn;
  spec.in_channels = in_channels;
  spec.trunk = {conv(5, in_channels, w.trunk[0]), relu_layer(),
                conv(5, w.trunk[0], w.trunk[1]), relu_layer(),
                conv(1, w.trunk[1], w.trunk[2]), relu_layer()};
  const std::vector<LayerSpec> branch = {conv(1, w.trunk[2], w.branch[0]), relu_layer(),
                                         conv(3, w.branch[0], w.branch[1]), relu_layer(),
                                         conv(3, w.branch[1], 1)};
  spec.structural = branch;
  spec.textural = branch;
  return spec;
}

NetworkSpec pnet_spec(std::size_t in_channels, const PnetWidths& w, const LrnParams& lrn) {
  NetworkSpec spec;
  spec.arch = Architecture::pnet;
  spec.in_channels = in_channels;
  spec.lrn = lrn;
  std::size_t in = in_channels;
  for (std::size_t i = 0; i < 8; ++i) {
    const std::size_t out = i < 7 ? w.hidden[i] : 3;
    const std::size_t k = w.kernels[i];
    spec.trunk.push_back(conv(k, in, out, k / 2));
    if (i < 7) spec.trunk.push_back(relu_layer());
    if (i < 3) {
      spec.trunk.push_back({i == 0 ? LayerKind::maxpool : LayerKind::maxpool_same});
      spec.trunk.push_back({LayerKind::lrn});
    }
    in = out;
  }
  return spec;
}

std::size_t NetworkWeights::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.parameter_count();
  return n;
}

NetworkWeights zero_weights(const NetworkSpec& spec) {
  NetworkWeights w;
  w.spec_hash = spec.hash();
  for (const auto* seq : {&spec.trunk, &spec.structural, &spec.textural}) {
    for (const auto& l : *seq) {
      if (l.kind == LayerKind::conv)
        w.layers.emplace_back(l.out_channels, l.in_channels, l.kernel, l.kernel);
    }
  }
  return w;
}

NetworkWeights init_weights(const NetworkSpec& spec, std::uint64_t seed, double stddev) {
  NetworkWeights w = zero_weights(spec);
  w.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& layer : w.layers) {
    for (double& k : layer.kernel) k = static_cast<double>(static_cast<float>(dist(rng)));
  }
  return w;
}

void check_weights(const NetworkSpec& spec, const NetworkWeights& weights) {
  const NetworkWeights ref = zero_weights(spec);
  if (ref.layers.size() != weights.layers.size()) {
    throw ShapeError("weights have " + std::to_string(weights.layers.size()) +
                     " layers, spec expects " + std::to_string(ref.layers.size()));
  }
  for (std::size_t i = 0; i < ref.layers.size(); ++i) {
    const auto& a = ref.layers[i];
    const auto& b = weights.layers[i];
    if (a.out_channels != b.out_channels || a.in_channels != b.in_channels || a.kh != b.kh ||
        a.kw != b.kw || !b.consistent()) {
      throw ShapeError("layer " + std::to_string(i) + ": weights " +
                       std::to_string(b.out_channels) + "x" + std::to_string(b.in_channels) +
                       "x" + std::to_string(b.kh) + "x" + std::to_string(b.kw) +
                       " vs spec " + std::to_string(a.out_channels) + "x" +
                       std::to_string(a.in_channels) + "x" + std::to_string(a.kh) + "x" +
                       std::to_string(a.kw));
    }
  }
}

Tensor run_sequence(const Tensor& input, std::span<const LayerSpec> layers,
                    std::span<const ConvParams> params, const LrnParams& lrn_params,
                    SequenceTrace* trace) {
  if (trace) trace->inputs.clear();
  Tensor x = input;
  std::size_t p = 0;
  for (const auto& layer : layers) {
    if (trace) trace->inputs.push_back(x);
    switch (layer.kind) {
      case LayerKind::conv: x = conv2d(x, params[p++], layer.pad); break;
      case LayerKind::relu: x = relu(x); break;
      case LayerKind::maxpool: x = maxpool2x2(x); break;
      case LayerKind::maxpool_same: x = maxpool2x2_same(x); break;
      case LayerKind::lrn: x = lrn(x, lrn_params); break;
    }
  }
  return x;
}

Tensor backward_sequence(std::span<const LayerSpec> layers, std::span<const ConvParams> params,
                         const LrnParams& lrn_params, const SequenceTrace& trace,
                         Tensor grad, std::span<ConvParams> param_grads) {
  if (trace.inputs.size() != layers.size()) {
    throw std::logic_error("backward_sequence: trace does not match layer list");
  }
  std::size_t p = params.size();
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Tensor& in = trace.inputs[i];
    switch (layers[i].kind) {
      case LayerKind::conv: {
        --p;
        ConvGrads g = conv2d_backward(in, params[p], grad, layers[i].pad);
        auto& acc = param_grads[p];
        for (std::size_t j = 0; j < acc.kernel.size(); ++j) acc.kernel[j] += g.params.kernel[j];
        for (std::size_t j = 0; j < acc.bias.size(); ++j) acc.bias[j] += g.params.bias[j];
        grad = std::move(g.input);
        break;
      }
      case LayerKind::relu: grad = relu_backward(in, grad); break;
      case LayerKind::maxpool: grad = maxpool2x2_backward(in, grad); break;
      case LayerKind::maxpool_same: grad = maxpool2x2_same_backward(in, grad); break;
      case LayerKind::lrn: grad = lrn_backward(in, grad, lrn_params); break;
    }
  }
  return grad;
}

BfcnOutput bfcn_forward(const Tensor& input, const NetworkSpec& spec,
                        const NetworkWeights& weights) {
  check_bfcn_input(input, spec);
  check_weights(spec, weights);
  const Segment trunk = trunk_segment(spec);
  const Segment s = branch_segment(spec, Branch::structural);
  const Segment t = branch_segment(spec, Branch::textural);
  const Tensor features = run_sequence(input, trunk.layers, params_of(weights, trunk), spec.lrn);
  return {run_sequence(features, s.layers, params_of(weights, s), spec.lrn),
          run_sequence(features, t.layers, params_of(weights, t), spec.lrn)};
}

BfcnOutput bfcn_forward_unshared(const Tensor& input, const NetworkSpec& spec,
                                 const NetworkWeights& weights) {
  check_bfcn_input(input, spec);
  check_weights(spec, weights);
  const Segment trunk = trunk_segment(spec);
  BfcnOutput out;
  for (Branch b : {Branch::structural, Branch::textural}) {
    const Segment seg = branch_segment(spec, b);
    // Trunk recomputed per branch, as two isolated networks would.
    const Tensor features =
        run_sequence(input, trunk.layers, params_of(weights, trunk), spec.lrn);
    Tensor y = run_sequence(features, seg.layers, params_of(weights, seg), spec.lrn);
    (b == Branch::structural ? out.structural : out.textural) = std::move(y);
  }
  return out;
}

Tensor bfcn_forward_branch(const Tensor& input, const NetworkSpec& spec,
                           const NetworkWeights& weights, Branch branch, BranchTrace* trace) {
  check_bfcn_input(input, spec);
  const Segment trunk = trunk_segment(spec);
  const Segment seg = branch_segment(spec, branch);
  const Tensor features = run_sequence(input, trunk.layers, params_of(weights, trunk), spec.lrn,
                                       trace ? &trace->trunk : nullptr);
  return run_sequence(features, seg.layers, params_of(weights, seg), spec.lrn,
                      trace ? &trace->branch : nullptr);
}

Tensor bfcn_backward_branch(const NetworkSpec& spec, const NetworkWeights& weights, Branch branch,
                            const BranchTrace& trace, const Tensor& grad_out,
                            NetworkWeights& grads) {
  const Segment trunk = trunk_segment(spec);
  const Segment seg = branch_segment(spec, branch);
  Tensor g = backward_sequence(seg.layers, params_of(weights, seg), spec.lrn, trace.branch,
                               grad_out, params_of(grads, seg));
  return backward_sequence(trunk.layers, params_of(weights, trunk), spec.lrn, trace.trunk,
                           std::move(g), params_of(grads, trunk));
}

Tensor pnet_logits(const Tensor& input, const NetworkSpec& spec, const NetworkWeights& weights,
                   SequenceTrace* trace) {
  check_pnet_input(input, spec);
  check_weights(spec, weights);
  return run_sequence(input, spec.trunk, weights.layers, spec.lrn, trace);
}

Tensor pnet_backward(const NetworkSpec& spec, const NetworkWeights& weights,
                     const SequenceTrace& trace, const Tensor& grad_logits,
                     NetworkWeights& grads) {
  return backward_sequence(spec.trunk, weights.layers, spec.lrn, trace, grad_logits,
                           grads.layers);
}

ParsingMap pnet_forward(const Tensor& input, const NetworkSpec& spec,
                        const NetworkWeights& weights) {
  return ParsingMap(softmax_channels(pnet_logits(input, spec, weights)));
}

}  // namespace sketch
