#include "sketch/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sketch {

Tensor sobel_edges(const Tensor& image) {
  if (image.channels() != 1) throw ShapeError("sobel_edges: need 1 channel, got " + image.shape().str());
  if (image.height() < 3 || image.width() < 3) {
    throw ShapeError("sobel_edges: image " + image.shape().str() + " smaller than 3x3");
  }
  const auto h = static_cast<long>(image.height());
  const auto w = static_cast<long>(image.width());
  auto px = [&](long y, long x) {
    y = std::clamp(y, 0L, h - 1);
    x = std::clamp(x, 0L, w - 1);
    return image.at(0, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
  };
  Tensor out(image.shape());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const double gx = (px(y - 1, x + 1) + 2.0 * px(y, x + 1) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2.0 * px(y, x - 1) + px(y + 1, x - 1));
      const double gy = (px(y + 1, x - 1) + 2.0 * px(y + 1, x) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2.0 * px(y - 1, x) + px(y - 1, x + 1));
      out.at(0, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
          std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

double ssim(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "ssim");
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double var_a = 0.0, var_b = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= n;
  var_b /= n;
  cov /= n;
  return ((2.0 * mean_a * mean_b + kSsimC1) * (2.0 * cov + kSsimC2)) /
         ((mean_a * mean_a + mean_b * mean_b + kSsimC1) * (var_a + var_b + kSsimC2));
}

Tensor to_luminance(const Tensor& image) {
  if (image.channels() == 1) return image;
  if (image.channels() != 3) throw ShapeError("expected 1 or 3 channels, got " + image.shape().str());
  Tensor out(1, image.height(), image.width());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * image.channel(0)[i] + 0.587 * image.channel(1)[i] +
             0.114 * image.channel(2)[i];
  }
  return out;
}

namespace {

Tensor normalized_edges(const Tensor& image) {
  static const double kMaxMagnitude = 4.0 * std::sqrt(2.0);
  Tensor e = sobel_edges(image);
  for (double& v : e.data()) v /= kMaxMagnitude;
  return e;
}

}  // namespace

double edge_ssim(const Tensor& photo, const Tensor& sketch) {
  const Tensor p = to_luminance(photo);
  if (p.height() != sketch.height() || p.width() != sketch.width()) {
    throw ShapeError("edge_ssim: photo " + photo.shape().str() + " vs sketch " +
                     sketch.shape().str());
  }
  return ssim(normalized_edges(p), normalized_edges(sketch));
}

bool alignment_filter(PatchPair& pair, double threshold) {
  pair.alignment_score = edge_ssim(pair.photo, pair.sketch);
  return pair.alignment_score > threshold;
}

ExtractResult extract_patches(const Tensor& photo, const Tensor& sketch,
                              const ParsingMap& parsing, const ExtractOptions& options,
                              std::uint32_t image_index) {
  if (options.size == 0 || options.stride == 0) {
    throw std::invalid_argument("extract_patches: size and stride must be positive");
  }
  if (sketch.channels() != 1 || photo.height() != sketch.height() ||
      photo.width() != sketch.width() || parsing.height() != photo.height() ||
      parsing.width() != photo.width()) {
    throw ShapeError("extract_patches: photo " + photo.shape().str() + ", sketch " +
                     sketch.shape().str() + " and parsing " + parsing.probs.shape().str() +
                     " must share spatial size");
  }
  if (options.size > photo.height() || options.size > photo.width()) {
    throw ShapeError("extract_patches: patch size " + std::to_string(options.size) +
                     " exceeds image " + photo.shape().str());
  }
  ExtractResult result;
  const std::size_t n = options.size;
  for (std::size_t y = 0; y + n <= photo.height(); y += options.stride) {
    for (std::size_t x = 0; x + n <= photo.width(); x += options.stride) {
      std::array<std::size_t, 3> votes{};
      for (std::size_t yy = y; yy < y + n; ++yy)
        for (std::size_t xx = x; xx < x + n; ++xx)
          ++votes[static_cast<std::size_t>(parsing.argmax(yy, xx)) - 1];
      Region region = Region::face;
      if (votes[1] > votes[0] && votes[1] >= votes[2]) region = Region::hair;
      if (votes[2] > votes[0] && votes[2] > votes[1]) region = Region::background;
      if (region == Region::background) {
        ++result.background;
        continue;
      }
      PatchPair pair{photo.crop(y, x, n, n), sketch.crop(y, x, n, n), region, 1.0, y, x,
                     image_index};
      if (region == Region::hair) {
        pair.alignment_score = edge_ssim(pair.photo, pair.sketch);
        result.kept.push_back(std::move(pair));
      } else if (alignment_filter(pair, options.ssim_threshold)) {
        result.kept.push_back(std::move(pair));
      } else {
        result.discarded.push_back(std::move(pair));
      }
    }
  }
  return result;
}

Tensor build_prior(std::span<const Tensor> images) {
  if (images.empty()) throw std::invalid_argument("build_prior: no images");
  Tensor sum(images.front().shape());
  for (const auto& img : images) {
    require_same_shape(sum, img, "build_prior");
    for (std::size_t i = 0; i < img.size(); ++i) sum[i] += img[i];
  }
  const double n = static_cast<double>(images.size());
  for (double& v : sum.data()) v /= n;
  return sum;
}

ParsingMap build_parsing_prior(std::span<const LabelMap> labels) {
  if (labels.empty()) throw std::invalid_argument("build_parsing_prior: no label maps");
  std::vector<Tensor> one_hot;
  one_hot.reserve(labels.size());
  for (const auto& l : labels) one_hot.push_back(ParsingMap::from_labels(l).probs);
  return ParsingMap(build_prior(one_hot));
}

Tensor rgb_to_hsv(const Tensor& rgb) {
  if (rgb.channels() != 3) throw ShapeError("rgb_to_hsv: need 3 channels, got " + rgb.shape().str());
  Tensor hsv(rgb.shape());
  const std::size_t plane = rgb.shape().plane();
  for (std::size_t i = 0; i < plane; ++i) {
    const double r = rgb[i], g = rgb[plane + i], b = rgb[2 * plane + i];
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
      if (mx == r) {
        h = std::fmod((g - b) / delta, 6.0);
        if (h < 0.0) h += 6.0;
      } else if (mx == g) {
        h = (b - r) / delta + 2.0;
      } else {
        h = (r - g) / delta + 4.0;
      }
    }
    hsv[i] = h / 6.0;
    hsv[plane + i] = mx > 0.0 ? delta / mx : 0.0;
    hsv[2 * plane + i] = mx;
  }
  return hsv;
}

Tensor hsv_to_rgb(const Tensor& hsv) {
  if (hsv.channels() != 3) throw ShapeError("hsv_to_rgb: need 3 channels, got " + hsv.shape().str());
  Tensor rgb(hsv.shape());
  const std::size_t plane = hsv.shape().plane();
  for (std::size_t i = 0; i < plane; ++i) {
    const double h6 = hsv[i] * 6.0;
    const double s = hsv[plane + i];
    const double v = hsv[2 * plane + i];
    const double c = v * s;
    const double sector = std::floor(h6);
    const double f = h6 - sector;
    const double p = v - c;
    const double q = v - c * f;
    const double t = v - c * (1.0 - f);
    double r, g, b;
    switch (static_cast<int>(sector) % 6) {
      case 0: r = v; g = t; b = p; break;
      case 1: r = q; g = v; b = p; break;
      case 2: r = p; g = v; b = t; break;
      case 3: r = p; g = q; b = v; break;
      case 4: r = t; g = p; b = v; break;
      default: r = v; g = p; b = q; break;
    }
    rgb[i] = r;
    rgb[plane + i] = g;
    rgb[2 * plane + i] = b;
  }
  return rgb;
}

Tensor hsv_value_augment(const Tensor& photo, double factor) {
  if (!(factor >= 0.0)) throw std::invalid_argument("hsv_value_augment: factor must be >= 0");
  if (photo.channels() == 1) {
    Tensor out(photo.shape());
    for (std::size_t i = 0; i < photo.size(); ++i) out[i] = std::clamp(photo[i] * factor, 0.0, 1.0);
    return out;
  }
  Tensor hsv = rgb_to_hsv(photo);
  for (double& v : hsv.channel(2)) v = std::clamp(v * factor, 0.0, 1.0);
  return hsv_to_rgb(hsv);
}

Tensor hsv_value_augment(const Tensor& photo, std::mt19937_64& rng, double low, double high) {
  if (!(low > 0.0 && low <= high)) throw std::invalid_argument("hsv_value_augment: bad range");
  std::uniform_real_distribution<double> dist(low, high);
  return hsv_value_augment(photo, dist(rng));
}

}  // namespace sketch
