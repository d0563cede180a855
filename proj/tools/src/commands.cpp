#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "sketch/archive.hpp"
#include "sketch/data.hpp"
#include "sketch/eval.hpp"
#include "sketch/fusion.hpp"
#include "sketch/gradcheck.hpp"
#include "sketch/io.hpp"
#include "sketch/parsing.hpp"
#include "sketch/trainer.hpp"

namespace sketch::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPairsFile = "pairs.bin";
constexpr const char* kParsingFile = "parsing.bin";
constexpr const char* kPriorFile = "prior.pgm";
constexpr const char* kParsingPriorFile = "parsing_prior.ppm";

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

Tensor resize_to(const Tensor& t, std::size_t h, std::size_t w) {
  return t.height() == h && t.width() == w ? t : bilinear_resize(t, h, w);
}

LabelMap crop_labels(const LabelMap& l, std::size_t y0, std::size_t x0, std::size_t h,
                     std::size_t w) {
  LabelMap out(h, w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) out.at(y, x) = l.at(y0 + y, x0 + x);
  return out;
}

struct ManifestEntry {
  fs::path photo;
  fs::path sketch;
  std::optional<fs::path> labels;
};

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  std::vector<ManifestEntry> entries;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected photo<TAB>sketch[<TAB>labels]");
    }
    ManifestEntry e{resolve(fields[0]), resolve(fields[1]), std::nullopt};
    if (fields.size() == 3 && !fields[2].empty()) e.labels = resolve(fields[2]);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw FormatError(path.string() + ": manifest lists no images");
  return entries;
}

void write_image(const Tensor& image, const fs::path& path, bool png) {
  write_pnm(image, path);
  if (png) write_png(image, fs::path(path).replace_extension(".png"));
}

NetworkSpec sketch_spec(bool rgb) { return bfcn_spec(rgb ? 4 : 2); }
NetworkSpec parsing_spec(bool rgb) { return pnet_spec(rgb ? 6 : 4); }

ParsingMap read_parsing_prior(const fs::path& path) {
  Tensor t = read_pnm(path);
  if (t.channels() != 3) throw FormatError(path.string() + ": parsing prior must be a P6 image");
  ParsingMap m;
  m.probs = std::move(t);
  return m;
}

// ---------------------------------------------------------------- prepare

struct PrepareOptions {
  fs::path manifest;
  fs::path out;
  std::size_t stride = 16;
  std::size_t patch_size = 32;
  double ssim_threshold = kDefaultSsimThreshold;
  bool rgb = false;
};

int cmd_prepare(const PrepareOptions& o) {
  const auto entries = read_manifest(o.manifest);
  fs::create_directories(o.out);
  const std::size_t y0 = (kSketchHeight - kFrameHeight) / 2;
  const std::size_t x0 = (kSketchWidth - kFrameWidth) / 2;
  ExtractOptions ex{o.patch_size, o.stride, o.ssim_threshold};

  PairArchive archive{o.rgb ? 3u : 1u, o.patch_size, {}, {}};
  std::vector<Tensor> sketches;
  std::vector<LabelMap> parse_labels;
  std::vector<ParsingSample> samples;
  std::size_t background = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const Tensor photo = load_photo(e.photo, o.rgb, kSketchHeight, kSketchWidth);
    const Tensor sketch =
        resize_to(to_luminance(read_pnm(e.sketch)), kSketchHeight, kSketchWidth);
    LabelMap labels;
    if (e.labels) {
      labels = resize_labels(read_label_map(*e.labels), kSketchHeight, kSketchWidth);
    } else {
      warn(e.photo.string() + ": no label map, treating the whole image as face");
      labels = LabelMap(kSketchHeight, kSketchWidth, Region::face);
    }
    sketches.push_back(sketch);

    const ParsingMap parsing =
        ParsingMap::from_labels(crop_labels(labels, y0, x0, kFrameHeight, kFrameWidth));
    ExtractResult r = extract_patches(photo.crop(y0, x0, kFrameHeight, kFrameWidth),
                                      sketch.crop(y0, x0, kFrameHeight, kFrameWidth), parsing,
                                      ex, static_cast<std::uint32_t>(i));
    for (auto* list : {&r.kept, &r.discarded}) {
      for (auto& p : *list) {
        p.y += y0;
        p.x += x0;
      }
    }
    archive.kept.insert(archive.kept.end(), r.kept.begin(), r.kept.end());
    archive.discarded.insert(archive.discarded.end(), r.discarded.begin(), r.discarded.end());
    background += r.background;

    parse_labels.push_back(resize_labels(labels, kParseHeight, kParseWidth));
    samples.push_back({resize_to(photo, kParseHeight, kParseWidth),
                       resize_labels(labels, kParseHeight / 2, kParseWidth / 2)});
  }

  const auto face = static_cast<std::size_t>(
      std::count_if(archive.kept.begin(), archive.kept.end(),
                    [](const PatchPair& p) { return p.region == Region::face; }));
  const std::size_t hair = archive.kept.size() - face;
  std::cout << "images " << entries.size() << "\n"
            << "kept " << archive.kept.size() << " (face " << face << ", hair " << hair << ")\n"
            << "discarded " << archive.discarded.size() << "\n"
            << "background " << background << "\n";
  if (archive.kept.empty()) {
    std::cerr << "error: no patch pairs survived extraction and filtering\n";
    return kExitData;
  }
  if (face == 0) {
    warn("zero structural pairs kept; the alignment threshold " +
         std::to_string(o.ssim_threshold) + " rejected every face patch");
  }
  if (hair == 0) warn("zero textural pairs kept; no hair region found");

  save_pair_archive(archive, o.out / kPairsFile);
  save_parsing_samples(samples, o.out / kParsingFile);
  write_pnm(build_prior(sketches), o.out / kPriorFile);
  write_pnm(build_parsing_prior(parse_labels).probs, o.out / kParsingPriorFile);
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string network;
  fs::path data;
  fs::path out;
  fs::path report;
  TrainConfig config;
  std::size_t epochs = 0;
  double lr = 0.0;
  bool no_drl = false;
  bool timing = false;
};

int cmd_train(TrainOptions o) {
  TrainConfig& c = o.config;
  if (o.report.empty()) o.report = fs::path(o.out.string() + ".csv");
  if (!fs::is_directory(o.data)) {
    throw FormatError("dataset directory " + o.data.string() + " not found; run prepare first");
  }
  TrainReport report;
  if (o.network == "bfcn") {
    if (o.epochs) c.epochs_bfcn = o.epochs;
    if (o.lr > 0.0) c.lr_bfcn = o.lr;
    PairArchive archive = load_pair_archive(o.data / kPairsFile);
    if (o.no_drl) {
      // Without decompositional learning: unfiltered pairs, no sorted-matching term.
      archive.kept.insert(archive.kept.end(), archive.discarded.begin(), archive.discarded.end());
      c.beta = 0.0;
    }
    const Tensor prior = read_pnm(o.data / kPriorFile);
    const NetworkSpec spec = sketch_spec(archive.photo_channels == 3);
    BfcnResult r = train_bfcn(archive.kept, prior, spec, c);
    save_weights(r.weights, o.out);
    report = std::move(r.report);
  } else {
    if (o.epochs) c.epochs_pnet = o.epochs;
    if (o.lr > 0.0) c.lr_pnet = o.lr;
    const auto samples = load_parsing_samples(o.data / kParsingFile);
    const ParsingMap prior = read_parsing_prior(o.data / kParsingPriorFile);
    const NetworkSpec spec = parsing_spec(samples.front().photo.channels() == 3);
    PnetResult r = train_pnet(samples, prior, spec, c);
    save_weights(r.weights, o.out);
    report = std::move(r.report);
    std::printf("pixel accuracy %.4f\n", pnet_pixel_accuracy(samples, prior, spec, r.weights));
  }
  report.weights_path = o.out.string();
  report.write_csv(o.report, o.timing);
  const auto& last = report.epochs.back();
  std::printf("epochs %zu  loss_s %.6g  loss_t %.6g  loss_g %.6g  loss_p %.6g\n",
              report.epochs.size(), last.loss_s, last.loss_t, last.loss_g, last.loss_p);
  return kExitOk;
}

// ---------------------------------------------------------------- infer

struct InferOptions {
  fs::path photo;
  fs::path bfcn;
  fs::path pnet;
  fs::path prior;
  fs::path out;
  bool hard = false;
  bool png = false;
  bool rgb = false;
};

int cmd_infer(const InferOptions& o) {
  const Tensor photo = load_photo(o.photo, o.rgb, kSketchHeight, kSketchWidth);
  const Tensor prior = read_pnm(o.prior / kPriorFile);
  if (prior.shape() != Shape{1, kSketchHeight, kSketchWidth}) {
    throw ShapeError("sketch prior " + prior.shape().str() + ", expected " +
                     Shape{1, kSketchHeight, kSketchWidth}.str());
  }
  const ParsingMap parsing_prior = read_parsing_prior(o.prior / kParsingPriorFile);
  const NetworkSpec bspec = sketch_spec(o.rgb);
  const NetworkSpec pspec = parsing_spec(o.rgb);
  const NetworkWeights bw = load_weights(o.bfcn, bspec);
  const NetworkWeights pw = load_weights(o.pnet, pspec);

  BfcnOutput sketch = bfcn_forward(bfcn_input(photo, prior), bspec, bw);
  const std::size_t h = sketch.structural.height();
  const std::size_t w = sketch.structural.width();
  const ParsingMap parsing = pnet_forward(
      pnet_input(resize_to(photo, kParseHeight, kParseWidth), parsing_prior), pspec, pw);
  FusionInput in{std::move(sketch.structural), std::move(sketch.textural),
                 resize_parsing(parsing, h, w)};
  const Tensor fused = clamp_unit(o.hard ? hard_fuse(in) : soft_fuse(in));

  fs::create_directories(o.out);
  write_image(in.structural, o.out / "structural.pgm", o.png);
  write_image(in.textural, o.out / "textural.pgm", o.png);
  write_image(in.parsing.probs, o.out / "parsing.ppm", o.png);
  write_image(fused, o.out / "fused.pgm", o.png);
  std::printf("fused %zux%zu (width x height) -> %s\n", w, h, (o.out / "fused.pgm").c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- bench-trunk

struct BenchOptions {
  fs::path weights;
  fs::path photo;
  fs::path prior;
  std::size_t repetitions = 10;
  bool rgb = false;
};

int cmd_bench_trunk(const BenchOptions& o) {
  const NetworkSpec spec = sketch_spec(o.rgb);
  const NetworkWeights weights = load_weights(o.weights, spec);
  const Tensor photo = load_photo(o.photo, o.rgb, kSketchHeight, kSketchWidth);
  const Tensor prior = o.prior.empty() ? Tensor(1, kSketchHeight, kSketchWidth)
                                       : read_pnm(o.prior / kPriorFile);
  const auto rows = bench_trunk(bfcn_input(photo, prior), spec, weights, o.repetitions);
  std::printf("%-6s %12s %12s %10s\n", "run", "shared_ms", "unshared_ms", "identical");
  double shared = 0.0, unshared = 0.0;
  bool identical = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("%-6zu %12.3f %12.3f %10s\n", i + 1, rows[i].shared_ms, rows[i].unshared_ms,
                rows[i].identical ? "yes" : "no");
    shared += rows[i].shared_ms;
    unshared += rows[i].unshared_ms;
    identical = identical && rows[i].identical;
  }
  const double n = static_cast<double>(rows.size());
  std::printf("%-6s %12.3f %12.3f\n", "mean", shared / n, unshared / n);
  if (!identical) {
    std::cerr << "error: shared and unshared outputs differ\n";
    return kExitData;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

int cmd_gradcheck(const std::string& target, std::uint64_t seed, double epsilon) {
  const GradCheckReport r = run_gradcheck_target(target, seed, epsilon);
  std::printf("target %s  checked %zu  max_rel_error %.3e at %zu (analytic %.6e, numeric %.6e)  %s\n",
              r.target.c_str(), r.checked, r.max_rel_error, r.worst_index, r.analytic_at_worst,
              r.numeric_at_worst, r.passed() ? "PASS" : "FAIL");
  return r.passed() ? kExitOk : kExitData;
}

// ---------------------------------------------------------------- eval-cms

struct EvalOptions {
  fs::path sketches;
  fs::path gallery;
  fs::path out;
  std::size_t k = 100;
  std::size_t max_rank = 0;
};

std::map<std::string, fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError(dir.string() + " is not a directory");
  std::map<std::string, fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) {
      images.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return images;
}

Vector flatten_image(const fs::path& path, Shape expect) {
  const Tensor t = to_luminance(read_pnm(path));
  if (expect.size() != 0 && t.shape() != expect) {
    throw ShapeError(path.string() + ": size " + t.shape().str() + " differs from " + expect.str());
  }
  return t.values();
}

int cmd_eval_cms(const EvalOptions& o) {
  const auto queries = list_images(o.sketches);
  const auto gallery = list_images(o.gallery);
  std::vector<std::string> missing;
  for (const auto& [id, _] : queries)
    if (!gallery.contains(id)) missing.push_back("query '" + id + "' has no gallery image");
  for (const auto& [id, _] : gallery)
    if (!queries.contains(id)) missing.push_back("gallery '" + id + "' has no query image");
  if (!missing.empty()) {
    for (const auto& m : missing) std::cerr << "error: " << m << "\n";
    return kExitData;
  }
  if (gallery.size() < 2) throw FormatError("eval-cms needs at least two identities");

  std::vector<Vector> gvec, qvec;
  std::vector<std::size_t> truth;
  Shape shape = to_luminance(read_pnm(gallery.begin()->second)).shape();
  for (const auto& [id, path] : gallery) gvec.push_back(flatten_image(path, shape));
  for (const auto& [id, path] : queries) {
    qvec.push_back(flatten_image(path, shape));
    truth.push_back(static_cast<std::size_t>(std::distance(gallery.begin(), gallery.find(id))));
  }

  std::size_t k = o.k;
  const std::size_t limit = std::min(gvec.size() - 1, shape.size());
  if (k > limit) {
    warn("k=" + std::to_string(k) + " exceeds min(identities - 1, pixels); using k=" +
         std::to_string(limit));
    k = limit;
  }
  const PcaModel pca = pca_fit(gvec, k);
  for (auto& v : gvec) v = pca.project(v);
  for (auto& v : qvec) v = pca.project(v);
  const std::size_t max_rank = o.max_rank ? std::min(o.max_rank, gvec.size()) : gvec.size();
  const CmsCurve curve = cms(qvec, gvec, truth, max_rank);
  if (!o.out.empty()) curve.write_csv(o.out);
  std::printf("identities %zu  k %zu\n", gvec.size(), k);
  std::printf("Rank-1 %.4f\n", curve.at_rank(1));
  std::printf("Rank-10 %.4f\n", curve.at_rank(std::min<std::size_t>(10, max_rank)));
  return kExitOk;
}

void add_train_config(CLI::App* cmd, TrainOptions& o) {
  TrainConfig& c = o.config;
  cmd->add_option("--epochs", o.epochs, "Epochs (default 150 for bfcn, 100 for pnet)");
  cmd->add_option("--alpha", c.alpha, "Weight of the textural term")->capture_default_str();
  cmd->add_option("--beta", c.beta, "Weight of the sorted-matching term")->capture_default_str();
  cmd->add_option("--lr", o.lr, "Learning rate (default 1e-10*255^2 for bfcn, 1e-3 for pnet)");
  cmd->add_option("--momentum", c.momentum, "SGD momentum")->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "Patches (bfcn) or images (pnet) per step")
      ->capture_default_str();
  cmd->add_option("--init-std", c.init_std, "Standard deviation of initial kernels")
      ->capture_default_str();
  cmd->add_option("--threads", c.threads, "Worker threads, 0 for all cores")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_flag("--augment", c.augment, "Random HSV value scaling in [0.625, 1.125]");
  cmd->add_flag("--no-prior", c.no_prior, "Feed zeros instead of the prior channels");
  cmd->add_flag("--no-drl", o.no_drl,
                "Train on unfiltered pairs with beta = 0 (bfcn only)");
  cmd->add_flag("--timing", o.timing, "Write measured seconds to the report");
}

}  // namespace

Tensor load_photo(const fs::path& path, bool rgb, std::size_t height, std::size_t width) {
  Tensor img = read_pnm(path);
  if (!rgb) {
    img = to_luminance(img);
  } else if (img.channels() == 1) {
    const Tensor parts[] = {img, img, img};
    img = concat_channels(parts);
  }
  return resize_to(img, height, width);
}

std::vector<TrunkTiming> bench_trunk(const Tensor& input, const NetworkSpec& spec,
                                     const NetworkWeights& weights, std::size_t repetitions) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  std::vector<TrunkTiming> rows;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    const BfcnOutput shared = bfcn_forward(input, spec, weights);
    const auto t1 = clock::now();
    const BfcnOutput unshared = bfcn_forward_unshared(input, spec, weights);
    const auto t2 = clock::now();
    rows.push_back({ms(t0, t1), ms(t1, t2),
                    shared.structural == unshared.structural &&
                        shared.textural == unshared.textural});
  }
  return rows;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Decompositional sketch-portrait generation", "sketchgen"};
  app.set_config("--config", "", "INI or TOML file with option defaults; flags override it");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  PrepareOptions prep;
  auto* prepare = app.add_subcommand("prepare", "Extract, filter and label patch pairs");
  prepare->add_option("--manifest", prep.manifest, "photo<TAB>sketch[<TAB>labels] per line")
      ->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", prep.out, "Output dataset directory")->required();
  prepare->add_option("--stride", prep.stride, "Patch grid stride")->capture_default_str()
      ->check(CLI::PositiveNumber);
  prepare->add_option("--patch-size", prep.patch_size, "Patch side")->capture_default_str()
      ->check(CLI::Range(std::size_t{13}, std::size_t{156}));
  prepare->add_option("--ssim-threshold", prep.ssim_threshold,
                      "Keep face pairs whose edge SSIM exceeds this")->capture_default_str();
  prepare->add_flag("--rgb", prep.rgb, "Keep photo colour instead of luminance");

  TrainOptions train;
  auto* tr = app.add_subcommand("train", "Train the sketch (bfcn) or parsing (pnet) network");
  tr->add_option("network", train.network, "bfcn or pnet")->required()
      ->check(CLI::IsMember({"bfcn", "pnet"}));
  tr->add_option("--data", train.data, "Prepared dataset directory")->required();
  tr->add_option("--out", train.out, "Weight file to write")->required();
  tr->add_option("--report", train.report, "Loss CSV (default: <out>.csv)");
  add_train_config(tr, train);

  InferOptions inf;
  auto* infer = app.add_subcommand("infer", "Sketch a 200x250 photo and fuse the branches");
  infer->add_option("--photo", inf.photo, "Input photo (PGM/PPM)")->required()
      ->check(CLI::ExistingFile);
  infer->add_option("--bfcn", inf.bfcn, "Sketch network weights")->required();
  infer->add_option("--pnet", inf.pnet, "Parsing network weights")->required();
  infer->add_option("--prior", inf.prior, "Prepared dataset directory holding the priors")
      ->required();
  infer->add_option("--out", inf.out, "Output directory")->required();
  infer->add_flag("--hard-fusion", inf.hard, "Binary hair-mask fusion instead of soft fusion");
  infer->add_flag("--png", inf.png, "Also write PNG copies");
  infer->add_flag("--rgb", inf.rgb, "Networks were trained on RGB photos");

  BenchOptions bench;
  auto* bt = app.add_subcommand("bench-trunk", "Time shared against duplicated trunk forwards");
  bt->add_option("--weights", bench.weights, "Sketch network weights")->required();
  bt->add_option("--photo", bench.photo, "Input photo")->required()->check(CLI::ExistingFile);
  bt->add_option("--prior", bench.prior, "Prepared dataset directory (default: zero prior)");
  bt->add_option("--repetitions", bench.repetitions, "Timed runs")->capture_default_str()
      ->check(CLI::PositiveNumber);
  bt->add_flag("--rgb", bench.rgb, "Network was trained on RGB photos");

  std::string target;
  std::uint64_t gc_seed = 1;
  double epsilon = 1e-5;
  std::vector<std::string> targets(gradcheck_targets().begin(), gradcheck_targets().end());
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of analytic gradients");
  gc->add_option("target", target, "Operation or network to check")->required()
      ->check(CLI::IsMember(targets));
  gc->add_option("--seed", gc_seed, "Random seed")->capture_default_str();
  gc->add_option("--epsilon", epsilon, "Central-difference step")->capture_default_str()
      ->check(CLI::Range(1e-7, 1e-3));

  EvalOptions ev;
  auto* evc = app.add_subcommand("eval-cms", "PCA + cosine recognition, cumulative match score");
  evc->add_option("--sketches", ev.sketches, "Directory of query sketches")->required();
  evc->add_option("--gallery", ev.gallery, "Directory of gallery sketches, same file names")
      ->required();
  evc->add_option("--k", ev.k, "PCA dimension")->capture_default_str()->check(CLI::PositiveNumber);
  evc->add_option("--max-rank", ev.max_rank, "Last rank of the curve (default: gallery size)");
  evc->add_option("--out", ev.out, "CSV file for the curve");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    std::cerr << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (*prepare) return cmd_prepare(prep);
    if (*tr) return cmd_train(train);
    if (*infer) return cmd_infer(inf);
    if (*bt) return cmd_bench_trunk(bench);
    if (*gc) return cmd_gradcheck(target, gc_seed, epsilon);
    if (*evc) return cmd_eval_cms(ev);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"sketchgen"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sketch::cli
