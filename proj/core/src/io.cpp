#include "sketch/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "binary.hpp"

namespace sketch {

using detail::get;
using detail::put;

namespace {

constexpr std::array<char, 4> kMagic{'S', 'K', 'W', 'T'};
constexpr std::uint32_t kMaxDim = 1u << 16;

}  // namespace

void write_weights(const NetworkWeights& weights, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kWeightFormatVersion);
  put<std::uint64_t>(out, weights.spec_hash);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(weights.layers.size()));
  for (const auto& l : weights.layers) {
    for (std::size_t d : {l.out_channels, l.in_channels, l.kh, l.kw})
      put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : l.kernel) put<float>(out, static_cast<float>(v));
    for (double v : l.bias) put<float>(out, static_cast<float>(v));
  }
}

void save_weights(const NetworkWeights& weights, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_weights(weights, out);
  if (!out) throw FormatError("failed writing " + path.string());
}

NetworkWeights read_weights(std::istream& in, const NetworkSpec& spec) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("not a weight file: bad magic bytes");
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kWeightFormatVersion) {
    throw FormatError("unsupported weight format version " + std::to_string(version));
  }
  NetworkWeights w;
  w.spec_hash = get<std::uint64_t>(in, "spec hash");
  if (w.spec_hash != spec.hash()) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "file spec hash %016llx, expected %016llx",
                  static_cast<unsigned long long>(w.spec_hash),
                  static_cast<unsigned long long>(spec.hash()));
    throw IncompatibleWeights(std::string("incompatible weights: ") + buf);
  }
  const NetworkWeights ref = zero_weights(spec);
  const auto count = get<std::uint32_t>(in, "layer count");
  if (count != ref.layers.size()) {
    throw FormatError("weight file has " + std::to_string(count) + " layers, spec expects " +
                      std::to_string(ref.layers.size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    std::array<std::uint32_t, 4> dims{};
    for (auto& d : dims) {
      d = get<std::uint32_t>(in, "layer dims");
      if (d == 0 || d > kMaxDim) throw FormatError("layer " + std::to_string(i) + ": bad dims");
    }
    const auto& expect = ref.layers[i];
    if (dims[0] != expect.out_channels || dims[1] != expect.in_channels || dims[2] != expect.kh ||
        dims[3] != expect.kw) {
      throw FormatError("layer " + std::to_string(i) + ": file shape " + std::to_string(dims[0]) +
                        "x" + std::to_string(dims[1]) + "x" + std::to_string(dims[2]) + "x" +
                        std::to_string(dims[3]) + " disagrees with spec");
    }
    ConvParams p(dims[0], dims[1], dims[2], dims[3]);
    for (double& v : p.kernel) v = get<float>(in, "kernel");
    for (double& v : p.bias) v = get<float>(in, "bias");
    w.layers.push_back(std::move(p));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after last weight record");
  }
  return w;
}

NetworkWeights load_weights(const std::filesystem::path& path, const NetworkSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open weight file " + path.string());
  try {
    return read_weights(in, spec);
  } catch (const IncompatibleWeights& e) {
    throw IncompatibleWeights(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in, const std::string& name) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  if (tok.empty()) throw FormatError(name + ": truncated header");
  return tok;
}

std::size_t header_number(std::istream& in, const std::string& name) {
  const std::string tok = header_token(in, name);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit) || tok.size() > 9) {
    throw FormatError(name + ": bad header field '" + tok + "'");
  }
  return std::stoul(tok);
}

struct RawImage {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t maxval = 0;
  std::vector<unsigned char> bytes;  // interleaved samples, 8-bit
};

RawImage read_raw_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image " + path.string());
  const std::string name = path.string();
  const std::string magic = header_token(in, name);
  RawImage img;
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    throw FormatError(name + ": unsupported image type '" + magic + "' (need P5 or P6)");
  }
  img.width = header_number(in, name);
  img.height = header_number(in, name);
  img.maxval = header_number(in, name);
  if (img.width == 0 || img.height == 0) throw FormatError(name + ": empty image");
  if (img.maxval == 0 || img.maxval > 255) {
    throw FormatError(name + ": maxval " + std::to_string(img.maxval) + " unsupported");
  }
  img.bytes.resize(img.channels * img.height * img.width);
  if (!in.read(reinterpret_cast<char*>(img.bytes.data()),
               static_cast<std::streamsize>(img.bytes.size()))) {
    throw FormatError(name + ": truncated pixel data");
  }
  return img;
}

unsigned char quantize(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void check_channels(const Tensor& image, const char* what) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw ShapeError(std::string(what) + ": need 1 or 3 channels, got " + image.shape().str());
  }
}

}  // namespace

Tensor read_pnm(const std::filesystem::path& path) {
  const RawImage raw = read_raw_pnm(path);
  Tensor t(raw.channels, raw.height, raw.width);
  const double scale = 1.0 / static_cast<double>(raw.maxval);
  for (std::size_t y = 0; y < raw.height; ++y)
    for (std::size_t x = 0; x < raw.width; ++x)
      for (std::size_t c = 0; c < raw.channels; ++c)
        t.at(c, y, x) = raw.bytes[(y * raw.width + x) * raw.channels + c] * scale;
  return t;
}

void write_pnm(const Tensor& image, const std::filesystem::path& path) {
  check_channels(image, "write_pnm");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << (image.channels() == 1 ? "P5" : "P6") << "\n"
      << image.width() << " " << image.height() << "\n255\n";
  std::vector<unsigned char> bytes(image.size());
  for (std::size_t y = 0; y < image.height(); ++y)
    for (std::size_t x = 0; x < image.width(); ++x)
      for (std::size_t c = 0; c < image.channels(); ++c)
        bytes[(y * image.width() + x) * image.channels() + c] = quantize(image.at(c, y, x));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

void write_png(const Tensor& image, const std::filesystem::path& path) {
  check_channels(image, "write_png");
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw FormatError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("libpng initialisation failed");
  }
  std::vector<unsigned char> row(image.width() * image.channels());
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8,
               image.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x)
      for (std::size_t c = 0; c < image.channels(); ++c)
        row[x * image.channels() + c] = quantize(image.at(c, y, x));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

LabelMap read_label_map(const std::filesystem::path& path) {
  const RawImage raw = read_raw_pnm(path);
  if (raw.channels != 1) throw FormatError(path.string() + ": label map must be a P5 image");
  LabelMap labels(raw.height, raw.width);
  for (std::size_t i = 0; i < raw.bytes.size(); ++i) {
    const unsigned char v = raw.bytes[i];
    if (v < 1 || v > 3) {
      throw FormatError(path.string() + ": label value " + std::to_string(v) + " at pixel " +
                        std::to_string(i) + " outside {1,2,3}");
    }
    labels.labels[i] = v;
  }
  return labels;
}

void write_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "P5\n" << labels.width << " " << labels.height << "\n3\n";
  out.write(reinterpret_cast<const char*>(labels.labels.data()),
            static_cast<std::streamsize>(labels.labels.size()));
}

}  // namespace sketch
