#include "sketch/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "parallel.hpp"

namespace sketch {

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid training config: ") + what);
  };
  require(alpha >= 0.0, "alpha must be >= 0");
  require(beta >= 0.0, "beta must be >= 0");
  require(structural_weight >= 0.0, "structural_weight must be >= 0");
  require(lr_bfcn > 0.0, "lr_bfcn must be > 0");
  require(lr_pnet > 0.0, "lr_pnet must be > 0");
  require(momentum >= 0.0 && momentum < 1.0, "momentum must be in [0, 1)");
  require(epochs_bfcn > 0 && epochs_pnet > 0, "epoch counts must be > 0");
  require(batch_size > 0, "batch_size must be > 0");
  require(patch_size > kBfcnShrink, "patch_size must exceed the network shrinkage of 12");
  require(stride > 0, "stride must be > 0");
  require(augment_low > 0.0 && augment_high < 2.0 && augment_low <= augment_high,
          "augment range must lie within (0, 2)");
  require(init_std > 0.0, "init_std must be > 0");
}

void TrainReport::write_csv(const std::filesystem::path& path, bool include_timing) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "epoch,loss_s,loss_t,loss_g,loss_p,seconds\n";
  char line[256];
  for (const auto& e : epochs) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.6f\n", e.epoch, e.loss_s,
                  e.loss_t, e.loss_g, e.loss_p, include_timing ? e.seconds : 0.0);
    out << line;
  }
}

namespace {

void check_same_layout(const NetworkWeights& a, const NetworkWeights& b) {
  if (a.layers.size() != b.layers.size())
    throw ShapeError("sgd_step: weights and gradients have different layer counts");
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    if (a.layers[i].kernel.size() != b.layers[i].kernel.size() ||
        a.layers[i].bias.size() != b.layers[i].bias.size()) {
      throw ShapeError("sgd_step: layer " + std::to_string(i) + " shape mismatch");
    }
  }
}

void add_scaled(NetworkWeights& acc, const NetworkWeights& g, double scale) {
  for (std::size_t l = 0; l < acc.layers.size(); ++l) {
    auto& a = acc.layers[l];
    const auto& b = g.layers[l];
    for (std::size_t i = 0; i < a.kernel.size(); ++i) a.kernel[i] += scale * b.kernel[i];
    for (std::size_t i = 0; i < a.bias.size(); ++i) a.bias[i] += scale * b.bias[i];
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void sgd_step(NetworkWeights& weights, const NetworkWeights& grads, double lr) {
  check_same_layout(weights, grads);
  add_scaled(weights, grads, -lr);
}

void SgdOptimizer::step(NetworkWeights& weights, const NetworkWeights& grads) {
  if (momentum_ == 0.0) {
    sgd_step(weights, grads, lr_);
    return;
  }
  check_same_layout(weights, grads);
  if (velocity_.empty()) {
    velocity_ = grads.layers;
    for (auto& v : velocity_) {
      std::fill(v.kernel.begin(), v.kernel.end(), 0.0);
      std::fill(v.bias.begin(), v.bias.end(), 0.0);
    }
  }
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    auto& w = weights.layers[l];
    auto& v = velocity_[l];
    const auto& g = grads.layers[l];
    for (std::size_t i = 0; i < w.kernel.size(); ++i) {
      v.kernel[i] = momentum_ * v.kernel[i] + g.kernel[i];
      w.kernel[i] -= lr_ * v.kernel[i];
    }
    for (std::size_t i = 0; i < w.bias.size(); ++i) {
      v.bias[i] = momentum_ * v.bias[i] + g.bias[i];
      w.bias[i] -= lr_ * v.bias[i];
    }
  }
}

Tensor bfcn_input(const Tensor& photo, const Tensor& prior) {
  const Tensor parts[] = {photo, prior};
  return concat_channels(parts);
}

Tensor pnet_input(const Tensor& photo, const ParsingMap& prior) {
  const Tensor parts[] = {photo, prior.probs};
  return concat_channels(parts);
}

namespace {

struct SampleResult {
  double mse = 0.0;
  double textural = 0.0;
  NetworkWeights grads;
};

struct BfcnSample {
  const PatchPair* pair = nullptr;
  double augment_factor = 1.0;
};

}  // namespace

BfcnResult train_bfcn(std::span<const PatchPair> pairs, const Tensor& prior,
                      const NetworkSpec& spec, const TrainConfig& config,
                      const NetworkWeights* initial) {
  config.validate();
  std::vector<const PatchPair*> face, hair;
  for (const auto& p : pairs) (p.region == Region::hair ? hair : face).push_back(&p);
  if (face.empty()) throw std::invalid_argument("train_bfcn: no face pairs for the structural branch");
  if (hair.empty()) throw std::invalid_argument("train_bfcn: no hair pairs for the textural branch");
  if (prior.channels() != 1) throw ShapeError("train_bfcn: prior must have 1 channel");
  for (const auto& p : pairs) {
    if (p.photo.channels() + 1 != spec.in_channels) {
      throw ShapeError("train_bfcn: photo patch " + p.photo.shape().str() + " plus prior does not give " +
                       std::to_string(spec.in_channels) + " input channels");
    }
    if (p.y + p.photo.height() > prior.height() || p.x + p.photo.width() > prior.width()) {
      throw ShapeError("train_bfcn: patch at (" + std::to_string(p.y) + ", " +
                       std::to_string(p.x) + ") lies outside prior " + prior.shape().str());
    }
  }

  BfcnResult result{initial ? *initial : init_weights(spec, config.seed, config.init_std), {}};
  check_weights(spec, result.weights);
  NetworkWeights& weights = result.weights;
  SgdOptimizer optimizer(config.lr_bfcn, config.momentum);
  std::mt19937_64 rng(config.seed);

  const std::size_t half = std::max<std::size_t>(1, config.batch_size / 2);
  const std::size_t face_per_batch = std::min(half, face.size());
  const std::size_t hair_per_batch = std::min(half, hair.size());
  const std::size_t steps = (std::max(face.size(), hair.size()) + half - 1) / half;

  auto run_sample = [&](const BfcnSample& s, Branch branch, double grad_scale) {
    const PatchPair& pair = *s.pair;
    const Tensor photo =
        s.augment_factor == 1.0 ? pair.photo : hsv_value_augment(pair.photo, s.augment_factor);
    const Tensor prior_patch = config.no_prior
                                   ? Tensor(1, pair.photo.height(), pair.photo.width())
                                   : prior.crop(pair.y, pair.x, pair.photo.height(),
                                                pair.photo.width());
    BranchTrace trace;
    const Tensor out = bfcn_forward_branch(bfcn_input(photo, prior_patch), spec, weights, branch,
                                           grad_scale != 0.0 ? &trace : nullptr);
    const Tensor target = pair.sketch.center_crop(out.height(), out.width());
    SampleResult r;
    LossValue loss = mse(out, target);
    r.mse = loss.value;
    if (branch == Branch::textural) {
      loss = textural_loss(out, target, config.beta);
      r.textural = loss.value;
    }
    if (grad_scale != 0.0) {
      r.grads = zero_weights(spec);
      for (double& g : loss.grad.data()) g *= grad_scale;
      bfcn_backward_branch(spec, weights, branch, trace, loss.grad, r.grads);
    }
    return r;
  };

  for (std::size_t epoch = 0; epoch < config.epochs_bfcn; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(face.begin(), face.end(), rng);
    std::shuffle(hair.begin(), hair.end(), rng);
    EpochRecord record{epoch + 1};
    for (std::size_t step = 0; step < steps; ++step) {
      std::vector<BfcnSample> batch;
      for (std::size_t i = 0; i < face_per_batch; ++i)
        batch.push_back({face[(step * half + i) % face.size()]});
      for (std::size_t i = 0; i < hair_per_batch; ++i)
        batch.push_back({hair[(step * half + i) % hair.size()]});
      if (config.augment) {
        std::uniform_real_distribution<double> factor(config.augment_low, config.augment_high);
        for (auto& s : batch) s.augment_factor = factor(rng);
      }

      const double face_scale =
          config.structural_weight / static_cast<double>(face_per_batch);
      const double hair_scale = config.alpha / static_cast<double>(hair_per_batch);
      std::vector<SampleResult> results(batch.size());
      detail::parallel_for(batch.size(), config.threads, [&](std::size_t i) {
        const bool is_face = i < face_per_batch;
        results[i] = run_sample(batch[i], is_face ? Branch::structural : Branch::textural,
                                is_face ? face_scale : hair_scale);
      });

      NetworkWeights total = zero_weights(spec);
      double loss_s = 0.0, loss_t = 0.0;
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (i < face_per_batch) {
          loss_s += results[i].mse;
        } else {
          loss_t += results[i].textural;
        }
        if (!results[i].grads.layers.empty()) add_scaled(total, results[i].grads, 1.0);
      }
      loss_s /= static_cast<double>(face_per_batch);
      loss_t /= static_cast<double>(hair_per_batch);
      optimizer.step(weights, total);

      record.loss_s += loss_s;
      record.loss_t += loss_t;
      record.loss_g += config.structural_weight * loss_s + config.alpha * loss_t;
    }
    const double n = static_cast<double>(steps);
    record.loss_s /= n;
    record.loss_t /= n;
    record.loss_g /= n;
    record.seconds = seconds_since(start);
    result.report.epochs.push_back(record);
  }
  weights.epoch = static_cast<std::uint32_t>(config.epochs_bfcn);
  weights.seed = config.seed;
  return result;
}

namespace {

void check_parsing_samples(std::span<const ParsingSample> samples, const ParsingMap& prior,
                           const NetworkSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("train_pnet: no training images");
  for (const auto& s : samples) {
    if (s.photo.channels() + 3 != spec.in_channels) {
      throw ShapeError("train_pnet: photo " + s.photo.shape().str() +
                       " plus 3 prior maps does not give " + std::to_string(spec.in_channels) +
                       " input channels");
    }
    if (prior.height() != s.photo.height() || prior.width() != s.photo.width()) {
      throw ShapeError("train_pnet: prior " + prior.probs.shape().str() + " vs photo " +
                       s.photo.shape().str());
    }
    if (s.labels.height * 2 != s.photo.height() || s.labels.width * 2 != s.photo.width()) {
      throw ShapeError("train_pnet: labels " + std::to_string(s.labels.height) + "x" +
                       std::to_string(s.labels.width) + " do not match network output for " +
                       s.photo.shape().str());
    }
  }
}

ParsingMap prior_or_zero(const ParsingMap& prior, bool no_prior) {
  if (!no_prior) return prior;
  ParsingMap zero;
  zero.probs = Tensor(prior.probs.shape());
  return zero;
}

}  // namespace

PnetResult train_pnet(std::span<const ParsingSample> samples, const ParsingMap& prior,
                      const NetworkSpec& spec, const TrainConfig& config,
                      const NetworkWeights* initial) {
  config.validate();
  check_parsing_samples(samples, prior, spec);
  PnetResult result{initial ? *initial : init_weights(spec, config.seed, config.init_std), {}};
  check_weights(spec, result.weights);
  NetworkWeights& weights = result.weights;
  const ParsingMap input_prior = prior_or_zero(prior, config.no_prior);
  SgdOptimizer optimizer(config.lr_pnet, config.momentum);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  struct PnetSampleResult {
    double loss = 0.0;
    NetworkWeights grads;
  };

  for (std::size_t epoch = 0; epoch < config.epochs_pnet; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord record{epoch + 1};
    std::size_t steps = 0;
    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - first);
      std::vector<double> factors(count, 1.0);
      if (config.augment) {
        std::uniform_real_distribution<double> factor(config.augment_low, config.augment_high);
        for (double& f : factors) f = factor(rng);
      }
      std::vector<PnetSampleResult> results(count);
      detail::parallel_for(count, config.threads, [&](std::size_t i) {
        const ParsingSample& s = samples[order[first + i]];
        const Tensor photo = factors[i] == 1.0 ? s.photo : hsv_value_augment(s.photo, factors[i]);
        SequenceTrace trace;
        const Tensor logits = pnet_logits(pnet_input(photo, input_prior), spec, weights, &trace);
        LossValue loss = softmax_parsing_loss(logits, s.labels);
        for (double& g : loss.grad.data()) g /= static_cast<double>(count);
        results[i].loss = loss.value;
        results[i].grads = zero_weights(spec);
        pnet_backward(spec, weights, trace, loss.grad, results[i].grads);
      });
      NetworkWeights total = zero_weights(spec);
      double loss = 0.0;
      for (const auto& r : results) {
        loss += r.loss;
        add_scaled(total, r.grads, 1.0);
      }
      optimizer.step(weights, total);
      record.loss_p += loss / static_cast<double>(count);
      ++steps;
    }
    record.loss_p /= static_cast<double>(steps);
    record.seconds = seconds_since(start);
    result.report.epochs.push_back(record);
  }
  weights.epoch = static_cast<std::uint32_t>(config.epochs_pnet);
  weights.seed = config.seed;
  return result;
}

double pnet_pixel_accuracy(std::span<const ParsingSample> samples, const ParsingMap& prior,
                           const NetworkSpec& spec, const NetworkWeights& weights) {
  check_parsing_samples(samples, prior, spec);
  std::size_t correct = 0, total = 0;
  for (const auto& s : samples) {
    const ParsingMap map = pnet_forward(pnet_input(s.photo, prior), spec, weights);
    for (std::size_t y = 0; y < map.height(); ++y) {
      for (std::size_t x = 0; x < map.width(); ++x) {
        correct += static_cast<std::uint8_t>(map.argmax(y, x)) == s.labels.at(y, x);
        ++total;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace sketch
