#include "sketch/archive.hpp"

#include <fstream>

#include "binary.hpp"

namespace sketch {

using detail::get;
using detail::put;

namespace {

constexpr std::uint32_t kArchiveVersion = 1;
constexpr std::uint32_t kMaxCount = 1u << 26;
constexpr std::uint32_t kMaxSide = 1u << 14;

void write_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }

void expect_magic(std::istream& in, const char (&magic)[5], const std::string& name) {
  char buf[4] = {};
  if (!in.read(buf, 4) || !std::equal(buf, buf + 4, magic)) {
    throw FormatError(name + ": bad magic bytes, expected " + magic);
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kArchiveVersion) {
    throw FormatError(name + ": unsupported version " + std::to_string(version));
  }
}

std::uint32_t bounded(std::istream& in, const char* what, std::uint32_t max, bool allow_zero) {
  const auto v = get<std::uint32_t>(in, what);
  if (v > max || (!allow_zero && v == 0)) {
    throw FormatError(std::string(what) + " out of range: " + std::to_string(v));
  }
  return v;
}

void put_tensor(std::ostream& out, const Tensor& t) {
  for (double v : t.data()) put<double>(out, v);
}

Tensor get_tensor(std::istream& in, Shape shape) {
  Tensor t(shape);
  for (double& v : t.data()) v = get<double>(in, "tensor data");
  return t;
}

void require_end(std::istream& in, const std::string& name) {
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError(name + ": trailing bytes");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

}  // namespace

void save_pair_archive(const PairArchive& archive, const std::filesystem::path& path) {
  const std::size_t c = archive.photo_channels;
  const std::size_t s = archive.patch_size;
  auto out = open_out(path);
  write_magic(out, "SKPA");
  put<std::uint32_t>(out, kArchiveVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(archive.kept.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(archive.discarded.size()));
  for (const auto* list : {&archive.kept, &archive.discarded}) {
    for (const auto& p : *list) {
      if (p.photo.shape() != Shape{c, s, s} || p.sketch.shape() != Shape{1, s, s}) {
        throw ShapeError("save_pair_archive: pair " + p.photo.shape().str() + " / " +
                         p.sketch.shape().str() + " does not match archive " +
                         Shape{c, s, s}.str());
      }
      put<std::uint8_t>(out, static_cast<std::uint8_t>(p.region));
      put<std::uint32_t>(out, p.image);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(p.y));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(p.x));
      put<double>(out, p.alignment_score);
      put_tensor(out, p.photo);
      put_tensor(out, p.sketch);
    }
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

PairArchive load_pair_archive(const std::filesystem::path& path) {
  const std::string name = path.string();
  auto in = open_in(path);
  try {
    expect_magic(in, "SKPA", name);
    PairArchive a;
    a.photo_channels = bounded(in, "photo channels", 3, false);
    a.patch_size = bounded(in, "patch size", kMaxSide, false);
    const auto kept = bounded(in, "kept count", kMaxCount, true);
    const auto discarded = bounded(in, "discarded count", kMaxCount, true);
    const std::size_t s = a.patch_size;
    for (std::uint32_t i = 0; i < kept + discarded; ++i) {
      PatchPair p;
      const auto region = get<std::uint8_t>(in, "region");
      if (region != 1 && region != 2) {
        throw FormatError("pair " + std::to_string(i) + ": bad region " + std::to_string(region));
      }
      p.region = static_cast<Region>(region);
      p.image = get<std::uint32_t>(in, "image index");
      p.y = get<std::uint32_t>(in, "y");
      p.x = get<std::uint32_t>(in, "x");
      p.alignment_score = get<double>(in, "score");
      p.photo = get_tensor(in, Shape{a.photo_channels, s, s});
      p.sketch = get_tensor(in, Shape{1, s, s});
      (i < kept ? a.kept : a.discarded).push_back(std::move(p));
    }
    require_end(in, name);
    return a;
  } catch (const FormatError& e) {
    if (std::string(e.what()).starts_with(name)) throw;
    throw FormatError(name + ": " + e.what());
  }
}

void save_parsing_samples(const std::vector<ParsingSample>& samples,
                          const std::filesystem::path& path) {
  if (samples.empty()) throw std::invalid_argument("save_parsing_samples: no samples");
  const Shape shape = samples.front().photo.shape();
  const std::size_t lh = samples.front().labels.height;
  const std::size_t lw = samples.front().labels.width;
  auto out = open_out(path);
  write_magic(out, "SKPS");
  put<std::uint32_t>(out, kArchiveVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(samples.size()));
  for (std::size_t d : {shape.channels, shape.height, shape.width, lh, lw})
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (const auto& s : samples) {
    if (s.photo.shape() != shape || s.labels.height != lh || s.labels.width != lw) {
      throw ShapeError("save_parsing_samples: samples differ in size");
    }
    put_tensor(out, s.photo);
    out.write(reinterpret_cast<const char*>(s.labels.labels.data()),
              static_cast<std::streamsize>(s.labels.labels.size()));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<ParsingSample> load_parsing_samples(const std::filesystem::path& path) {
  const std::string name = path.string();
  auto in = open_in(path);
  try {
    expect_magic(in, "SKPS", name);
    const auto count = bounded(in, "sample count", kMaxCount, false);
    const auto c = bounded(in, "photo channels", 3, false);
    const auto h = bounded(in, "height", kMaxSide, false);
    const auto w = bounded(in, "width", kMaxSide, false);
    const auto lh = bounded(in, "label height", kMaxSide, false);
    const auto lw = bounded(in, "label width", kMaxSide, false);
    std::vector<ParsingSample> samples;
    for (std::uint32_t i = 0; i < count; ++i) {
      ParsingSample s;
      s.photo = get_tensor(in, Shape{c, h, w});
      s.labels = LabelMap(lh, lw);
      if (!in.read(reinterpret_cast<char*>(s.labels.labels.data()),
                   static_cast<std::streamsize>(s.labels.labels.size()))) {
        throw FormatError("file truncated while reading labels");
      }
      for (auto v : s.labels.labels) {
        if (v < 1 || v > 3) throw FormatError("label value " + std::to_string(v) + " outside {1,2,3}");
      }
      samples.push_back(std::move(s));
    }
    require_end(in, name);
    return samples;
  } catch (const FormatError& e) {
    if (std::string(e.what()).starts_with(name)) throw;
    throw FormatError(name + ": " + e.what());
  }
}

}  // namespace sketch
