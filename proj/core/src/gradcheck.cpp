#include "sketch/gradcheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "sketch/layers.hpp"
#include "sketch/losses.hpp"

namespace sketch {

GradCheckReport gradient_check(const ScalarFunction& f, std::span<const double> x,
                               std::span<const double> analytic, double epsilon,
                               const std::function<bool(std::size_t)>& skip) {
  if (x.size() != analytic.size()) {
    throw std::invalid_argument("gradient_check: " + std::to_string(x.size()) +
                                " coordinates but " + std::to_string(analytic.size()) +
                                " analytic derivatives");
  }
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw std::invalid_argument("gradient_check: epsilon must lie in [1e-7, 1e-3]");
  }
  GradCheckReport report;
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (skip && skip(i)) continue;
    probe[i] = x[i] + epsilon;
    const double up = f(probe);
    probe[i] = x[i] - epsilon;
    const double down = f(probe);
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * epsilon);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), kGradCheckFloor});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    ++report.checked;
    if (rel > report.max_rel_error || report.checked == 1) {
      report.max_rel_error = rel;
      report.worst_index = i;
      report.analytic_at_worst = analytic[i];
      report.numeric_at_worst = numeric;
    }
  }
  return report;
}

std::vector<double> flatten(const NetworkWeights& weights) {
  std::vector<double> out;
  out.reserve(weights.parameter_count());
  for (const auto& l : weights.layers) {
    out.insert(out.end(), l.kernel.begin(), l.kernel.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void unflatten(std::span<const double> values, NetworkWeights& weights) {
  if (values.size() != weights.parameter_count()) {
    throw std::invalid_argument("unflatten: " + std::to_string(values.size()) +
                                " values for " + std::to_string(weights.parameter_count()) +
                                " parameters");
  }
  std::size_t p = 0;
  for (auto& l : weights.layers) {
    for (double& v : l.kernel) v = values[p++];
    for (double& v : l.bias) v = values[p++];
  }
}

namespace {

constexpr std::array<std::string_view, 9> kTargets{
    "mse", "smmse", "softmax", "conv", "relu", "maxpool", "lrn", "bfcn-tiny", "pnet-tiny"};

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(shape);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

// Values on a grid spaced 1/n apart, shuffled and jittered by < 1/(4n):
// no two entries come close enough for a small probe to swap their order.
Tensor distinct_tensor(Shape shape, std::mt19937_64& rng) {
  const std::size_t n = shape.size();
  std::vector<double> v(n);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = (static_cast<double>(i) + jitter(rng)) / static_cast<double>(n);
  std::shuffle(v.begin(), v.end(), rng);
  return Tensor(shape, std::move(v));
}

double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Checks d/dx sum(upstream * op(x)) against backward(x, upstream).
template <typename Forward, typename Backward>
GradCheckReport check_unary(const Tensor& x, const Tensor& upstream, Forward forward,
                            Backward backward, double eps,
                            const std::function<bool(std::size_t)>& skip = {}) {
  const Tensor analytic = backward(x, upstream);
  auto f = [&](std::span<const double> v) {
    return dot(forward(Tensor(x.shape(), std::vector<double>(v.begin(), v.end()))), upstream);
  };
  return gradient_check(f, x.data(), analytic.data(), eps, skip);
}

GradCheckReport check_loss(const Tensor& pred, const Tensor& target,
                           LossValue (*loss)(const Tensor&, const Tensor&), double eps) {
  const LossValue analytic = loss(pred, target);
  auto f = [&](std::span<const double> v) {
    return loss(Tensor(pred.shape(), std::vector<double>(v.begin(), v.end())), target).value;
  };
  return gradient_check(f, pred.data(), analytic.grad.data(), eps);
}

GradCheckReport check_conv(std::mt19937_64& rng, double eps) {
  const Tensor x = random_tensor({2, 5, 5}, rng);
  ConvParams p(3, 2, 3, 3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : p.kernel) v = dist(rng);
  for (double& v : p.bias) v = dist(rng);
  const Tensor out = conv2d(x, p);
  const Tensor upstream = random_tensor(out.shape(), rng);
  const ConvGrads g = conv2d_backward(x, p, upstream);

  // Coordinates: input values, then kernel, then bias.
  std::vector<double> point(x.data().begin(), x.data().end());
  point.insert(point.end(), p.kernel.begin(), p.kernel.end());
  point.insert(point.end(), p.bias.begin(), p.bias.end());
  std::vector<double> analytic(g.input.data().begin(), g.input.data().end());
  analytic.insert(analytic.end(), g.params.kernel.begin(), g.params.kernel.end());
  analytic.insert(analytic.end(), g.params.bias.begin(), g.params.bias.end());
  auto f = [&](std::span<const double> v) {
    Tensor xi(x.shape(), std::vector<double>(v.begin(), v.begin() + x.size()));
    ConvParams pi = p;
    std::copy(v.begin() + x.size(), v.begin() + x.size() + p.kernel.size(), pi.kernel.begin());
    std::copy(v.begin() + x.size() + p.kernel.size(), v.end(), pi.bias.begin());
    return dot(conv2d(xi, pi), upstream);
  };
  return gradient_check(f, point, analytic, eps);
}

GradCheckReport check_softmax(std::mt19937_64& rng, double eps) {
  const Tensor logits = random_tensor({3, 4, 5}, rng, -2.0, 2.0);
  LabelMap labels(4, 5);
  std::uniform_int_distribution<int> cls(1, 3);
  for (auto& l : labels.labels) l = static_cast<std::uint8_t>(cls(rng));
  const LossValue analytic = softmax_parsing_loss(logits, labels);
  auto f = [&](std::span<const double> v) {
    return softmax_parsing_loss(Tensor(logits.shape(), std::vector<double>(v.begin(), v.end())),
                                labels)
        .value;
  };
  return gradient_check(f, logits.data(), analytic.grad.data(), eps);
}

// Parameters and input of a network, flattened as [params..., input...].
struct NetworkProblem {
  NetworkSpec spec;
  NetworkWeights weights;
  Tensor input;
};

GradCheckReport check_network(const NetworkProblem& prob,
                              const std::function<double(const NetworkWeights&, const Tensor&,
                                                         NetworkWeights*, Tensor*)>& loss,
                              double eps) {
  NetworkWeights grads = zero_weights(prob.spec);
  Tensor grad_input;
  loss(prob.weights, prob.input, &grads, &grad_input);
  std::vector<double> point = flatten(prob.weights);
  const std::size_t n_params = point.size();
  point.insert(point.end(), prob.input.data().begin(), prob.input.data().end());
  std::vector<double> analytic = flatten(grads);
  analytic.insert(analytic.end(), grad_input.data().begin(), grad_input.data().end());
  auto f = [&](std::span<const double> v) {
    NetworkWeights w = prob.weights;
    unflatten(v.first(n_params), w);
    Tensor in(prob.input.shape(), std::vector<double>(v.begin() + n_params, v.end()));
    return loss(w, in, nullptr, nullptr);
  };
  return gradient_check(f, point, analytic, eps);
}

GradCheckReport check_bfcn_tiny(std::mt19937_64& rng, double eps) {
  BfcnWidths widths;
  widths.trunk = {2, 2, 2};
  widths.branch = {2, 2};
  NetworkProblem prob{bfcn_spec(2, widths), {}, random_tensor({2, 16, 16}, rng, 0.0, 1.0)};
  prob.weights = init_weights(prob.spec, rng(), 0.3);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (auto& l : prob.weights.layers)
    for (double& b : l.bias) b = dist(rng);
  const Tensor target_s = random_tensor({1, 4, 4}, rng, 0.0, 1.0);
  const Tensor target_t = random_tensor({1, 4, 4}, rng, 0.0, 1.0);
  auto loss = [&](const NetworkWeights& w, const Tensor& in, NetworkWeights* gw, Tensor* gi) {
    BranchTrace ts, tt;
    const Tensor s = bfcn_forward_branch(in, prob.spec, w, Branch::structural, gw ? &ts : nullptr);
    const Tensor t = bfcn_forward_branch(in, prob.spec, w, Branch::textural, gw ? &tt : nullptr);
    const LossValue ls = mse(s, target_s);
    const LossValue lt = textural_loss(t, target_t, 10.0);
    const CombinedLoss total = combined_bfcn_loss(ls, lt, 1.0);
    if (gw) {
      Tensor a = bfcn_backward_branch(prob.spec, w, Branch::structural, ts, total.structural_grad, *gw);
      Tensor b = bfcn_backward_branch(prob.spec, w, Branch::textural, tt, total.textural_grad, *gw);
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
      *gi = std::move(a);
    }
    return total.value;
  };
  return check_network(prob, loss, eps);
}

GradCheckReport check_pnet_tiny(std::mt19937_64& rng, double eps) {
  PnetWidths widths;
  widths.hidden = {2, 2, 2, 2, 2, 2, 2};
  NetworkProblem prob{pnet_spec(4, widths), {}, random_tensor({4, 8, 8}, rng, 0.0, 1.0)};
  prob.weights = init_weights(prob.spec, rng(), 0.3);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (auto& l : prob.weights.layers)
    for (double& b : l.bias) b = dist(rng);
  LabelMap labels(4, 4);
  std::uniform_int_distribution<int> cls(1, 3);
  for (auto& l : labels.labels) l = static_cast<std::uint8_t>(cls(rng));
  auto loss = [&](const NetworkWeights& w, const Tensor& in, NetworkWeights* gw, Tensor* gi) {
    SequenceTrace trace;
    const Tensor logits = pnet_logits(in, prob.spec, w, gw ? &trace : nullptr);
    const LossValue l = softmax_parsing_loss(logits, labels);
    if (gw) *gi = pnet_backward(prob.spec, w, trace, l.grad, *gw);
    return l.value;
  };
  return check_network(prob, loss, eps);
}

}  // namespace

std::span<const std::string_view> gradcheck_targets() { return kTargets; }

GradCheckReport run_gradcheck_target(std::string_view target, std::uint64_t seed, double eps) {
  std::mt19937_64 rng(seed);
  GradCheckReport report;
  if (target == "mse") {
    const Tensor pred = random_tensor({1, 4, 4}, rng);
    report = check_loss(pred, random_tensor({1, 4, 4}, rng), &mse, eps);
  } else if (target == "smmse") {
    const Tensor pred = distinct_tensor({1, 4, 4}, rng);
    report = check_loss(pred, random_tensor({1, 4, 4}, rng), &sm_mse, eps);
  } else if (target == "softmax") {
    report = check_softmax(rng, eps);
  } else if (target == "conv") {
    report = check_conv(rng, eps);
  } else if (target == "relu") {
    Tensor x = random_tensor({2, 4, 4}, rng);
    const Tensor up = random_tensor(x.shape(), rng);
    report = check_unary(x, up, [](const Tensor& t) { return relu(t); },
                         [](const Tensor& t, const Tensor& g) { return relu_backward(t, g); }, eps,
                         [&](std::size_t i) { return std::abs(x[i]) < 1e-3; });
  } else if (target == "maxpool") {
    const Tensor x = distinct_tensor({2, 6, 6}, rng);
    const Tensor up = random_tensor({2, 3, 3}, rng);
    report = check_unary(x, up, [](const Tensor& t) { return maxpool2x2(t); },
                         [](const Tensor& t, const Tensor& g) { return maxpool2x2_backward(t, g); },
                         eps);
  } else if (target == "lrn") {
    const LrnParams params{2.0, 3, 0.5, 0.75};
    const Tensor x = random_tensor({4, 3, 3}, rng);
    const Tensor up = random_tensor(x.shape(), rng);
    report = check_unary(
        x, up, [&](const Tensor& t) { return lrn(t, params); },
        [&](const Tensor& t, const Tensor& g) { return lrn_backward(t, g, params); }, eps);
  } else if (target == "bfcn-tiny") {
    report = check_bfcn_tiny(rng, eps);
  } else if (target == "pnet-tiny") {
    report = check_pnet_tiny(rng, eps);
  } else {
    throw std::invalid_argument("unknown gradient-check target '" + std::string(target) + "'");
  }
  report.target = std::string(target);
  return report;
}

}  // namespace sketch
