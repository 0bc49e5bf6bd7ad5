#include "graspforge/dataset.hpp"
#include "graspforge/grasp.hpp"
#include "graspforge/hand.hpp"
#include "graspforge/motion.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

namespace gf = graspforge;
namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kInputError = 2, kOptimizationFailure = 3, kPartialFailure = 4 };

void log(const std::string& msg) { std::cerr << "graspforge: " << msg << '\n'; }

int exit_code_for(const gf::Error& e) {
  switch (e.code()) {
    case gf::ErrorCode::NonFinite:
    case gf::ErrorCode::NoCollisionFreeStandoff: return kOptimizationFailure;
    default: return kInputError;
  }
}

gf::Vec3 parse_vec3(const std::string& text, const std::string& what) {
  std::stringstream ss(text);
  std::string item;
  std::vector<double> v;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(x))
      throw gf::Error(gf::ErrorCode::InvalidArgument, what + " must be three comma-separated numbers, got '" + text + "'");
    v.push_back(x);
  }
  if (v.size() != 3) throw gf::Error(gf::ErrorCode::InvalidArgument, what + " must be three comma-separated numbers, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

nlohmann::json vec_json(const gf::Vec3& v) { return {v.x(), v.y(), v.z()}; }

// Settings shared by every subcommand; resolved as defaults < config file < flags.
struct Settings {
  gf::grasp::OptimizerConfig optimizer;
  gf::motion::HandoverTiming timing;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::string hand = "test";
  gf::Vec3 target_offset{0.0, 0.0, 0.2};
  int workers = 1;
  bool allow_partial = false;

  nlohmann::json to_json() const {
    nlohmann::json t = timing;
    return {{"optimizer", optimizer},
            {"timing", t},
            {"grasp", {{"scale", scale}, {"seed", seed}, {"hand", hand}, {"target", vec_json(target_offset)}}},
            {"dataset", {{"workers", workers}, {"allow_partial", allow_partial}}}};
  }

  void apply(const nlohmann::json& j) {
    for (const auto& [key, value] : j.items())
      if (key != "optimizer" && key != "timing" && key != "grasp" && key != "dataset")
        throw gf::Error(gf::ErrorCode::InvalidArgument, "config: unknown section '" + key + "'");
    if (j.contains("optimizer")) gf::grasp::apply_overrides(optimizer, j.at("optimizer"));
    if (j.contains("timing")) {
      const auto& t = j.at("timing");
      timing.approach = t.value("approach", timing.approach);
      timing.close = t.value("close", timing.close);
      timing.transport = t.value("transport", timing.transport);
      timing.frame_rate = t.value("frame_rate", timing.frame_rate);
    }
    if (j.contains("grasp")) {
      const auto& g = j.at("grasp");
      scale = g.value("scale", scale);
      seed = g.value("seed", seed);
      hand = g.value("hand", hand);
      if (g.contains("target")) {
        const auto a = g.at("target").get<std::array<double, 3>>();
        target_offset = {a[0], a[1], a[2]};
      }
    }
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      workers = d.value("workers", workers);
      allow_partial = d.value("allow_partial", allow_partial);
    }
  }
};

// Flags left unset keep the value from the config file or the defaults.
struct Flags {
  std::optional<std::string> config;
  std::optional<double> scale;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> hand;
  std::optional<int> steps;
  std::optional<double> learning_rate;
  std::optional<int> samples;
  std::optional<double> clearance;
  std::optional<std::string> target;
  std::optional<double> frame_rate;
  std::optional<int> workers;
  bool allow_partial = false;
};

Settings resolve(const Flags& flags) {
  Settings s;
  std::optional<std::string> file = flags.config;
  if (!file) {
    if (const char* env = std::getenv("GRASPFORGE_CONFIG"); env && *env) file = env;
  }
  if (file) {
    std::ifstream in(*file);
    if (!in) throw gf::Error(gf::ErrorCode::IoError, "cannot open config file '" + *file + "'");
    try {
      s.apply(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw gf::Error(gf::ErrorCode::ParseError, *file + ": " + e.what());
    }
    log("config file " + *file);
  }
  if (flags.scale) s.scale = *flags.scale;
  if (flags.seed) s.seed = *flags.seed;
  if (flags.hand) s.hand = *flags.hand;
  if (flags.steps) s.optimizer.steps = *flags.steps;
  if (flags.learning_rate) s.optimizer.learning_rate = *flags.learning_rate;
  if (flags.samples) s.optimizer.sample_count = *flags.samples;
  if (flags.clearance) s.optimizer.clearance = *flags.clearance;
  if (flags.target) s.target_offset = parse_vec3(*flags.target, "--target");
  if (flags.frame_rate) s.timing.frame_rate = *flags.frame_rate;
  if (flags.workers) s.workers = *flags.workers;
  if (flags.allow_partial) s.allow_partial = true;
  s.optimizer.validate();
  log("resolved config " + s.to_json().dump());
  return s;
}

std::string quality_line(const gf::grasp::QualityReport& q) {
  std::ostringstream ss;
  ss << "penetration " << q.max_penetration * 1000.0 << " mm, contacts " << q.contact_count << ", deviation "
     << q.direction_deviation << " deg";
  return ss.str();
}

struct GraspArgs {
  std::string mesh, dir, out;
  std::optional<std::string> sequence, binary;
};

int cmd_grasp(const Settings& s, const GraspArgs& a) {
  const gf::Vec3 dir = parse_vec3(a.dir, "--dir");
  if (!(dir.norm() > 0.0)) throw gf::Error(gf::ErrorCode::InvalidArgument, "zero grasp direction");
  auto asset = std::make_shared<const gf::hand::HandAsset>(gf::grasp::load_hand(s.hand));
  auto object = std::make_shared<const gf::grasp::GraspObject>(
      gf::grasp::load_object(a.mesh, s.scale, static_cast<std::size_t>(s.optimizer.sample_count), s.seed));
  auto k = gf::grasp::optimize_grasp(gf::grasp::make_request(asset, object, dir.normalized(), s.optimizer));
  k.provenance.mesh = a.mesh;
  k.provenance.scale = s.scale;
  k.provenance.seed = s.seed;
  k.provenance.hand = s.hand;
  gf::grasp::save_keyframes(k, a.out);
  log("grasp written to " + a.out + ": " + quality_line(k.quality) + ", loss " + std::to_string(k.final_loss.total));
  if (a.sequence || a.binary) {
    const gf::Rigid initial;
    const gf::Rigid target{gf::Mat3::Identity(), s.target_offset};
    const auto seq = gf::motion::synthesize_handover(k, initial, target, s.timing, *asset, object->index, s.seed);
    if (a.sequence) gf::motion::save_jsonl(seq, *a.sequence);
    if (a.binary) gf::motion::save_binary(seq, *a.binary);
    log("handover sequence of " + std::to_string(seq.frames.size()) + " frames written");
  }
  return kOk;
}

int cmd_dataset(const Settings& s, const std::string& manifest_path, const std::optional<std::string>& out) {
  gf::dataset::DatasetManifest manifest;
  try {
    manifest = gf::dataset::load_manifest(manifest_path);
  } catch (const gf::Error& e) {
    log(e.what());
    return kInputError;
  }
  gf::dataset::GenerateOptions options;
  options.workers = s.workers;
  options.out_dir = out.value_or(manifest.output);
  options.log = [](const std::string& m) { log(m); };
  log("manifest " + gf::dataset::to_json(manifest).dump());
  const auto bundle = gf::dataset::generate_dataset(manifest, options);
  log("stats " + bundle.stats.dump());
  log("wall-clock " + std::to_string(bundle.wall_seconds) + " s with " + std::to_string(s.workers) + " worker(s)");
  const auto errored = bundle.stats["records"]["errored"].get<std::size_t>();
  if (errored > 0 && !s.allow_partial) {
    log(std::to_string(errored) + " record(s) errored; rerun with --allow-partial to accept a partial bundle");
    return kPartialFailure;
  }
  return kOk;
}

bool is_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gf::Error(gf::ErrorCode::IoError, "cannot open " + path);
  std::string first;
  std::getline(in, first);
  try {
    const auto j = nlohmann::json::parse(first);
    return j.is_object() && j.value("record", "") == "header";
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

int cmd_mirror(const std::string& in, const std::string& out) {
  if (is_sequence_file(in)) {
    const auto seq = gf::motion::load_jsonl(in);
    gf::motion::save_jsonl(gf::motion::mirror_sequence(seq), out);
    log("mirrored " + std::to_string(seq.frames.size()) + "-frame " + gf::hand::to_string(seq.chirality) + " sequence to " + out);
  } else {
    const auto k = gf::grasp::load_keyframes(in);
    gf::grasp::save_keyframes(gf::motion::mirror_keyframes(k), out);
    log("mirrored " + std::string(gf::hand::to_string(k.chirality)) + " keyframes to " + out);
  }
  return kOk;
}

// Rebuilds objects and hands from keyframe provenance, sharing them across entries.
class EvalContext {
 public:
  nlohmann::json evaluate(const gf::grasp::GraspKeyframes& k, const std::string& label) {
    const bool left = k.chirality == gf::hand::Chirality::Left;
    const auto& asset = hand(k.provenance.hand, left);
    const auto& object = this->object(k.provenance, left);
    const auto q = gf::grasp::evaluate_quality(asset, object, k.direction, k.grasp, k.config.contact_threshold);
    const double diff = std::max(std::abs(q.max_penetration - k.quality.max_penetration),
                                 std::abs(q.direction_deviation - k.quality.direction_deviation));
    const bool match = diff <= 1e-9 && q.contact_count == k.quality.contact_count;
    all_match_ = all_match_ && match;
    return {{"keyframes", label}, {"stored", k.quality}, {"recomputed", q}, {"max_abs_difference", diff}, {"match", match}};
  }
  bool all_match() const { return all_match_; }

 private:
  const gf::hand::HandAsset& hand(const std::string& spec, bool left) {
    const std::string key = spec + (left ? "#left" : "");
    auto it = hands_.find(key);
    if (it == hands_.end()) {
      auto a = gf::grasp::load_hand(spec);
      it = hands_.emplace(key, left ? gf::hand::mirror(a) : std::move(a)).first;
    }
    return it->second;
  }
  const gf::grasp::GraspObject& object(const gf::grasp::GraspProvenance& p, bool left) {
    const std::string key = nlohmann::json(p).dump() + (left ? "#left" : "");
    auto it = objects_.find(key);
    if (it == objects_.end()) {
      auto o = gf::grasp::load_object(p);
      it = objects_.emplace(key, left ? gf::grasp::mirror_object(o) : std::move(o)).first;
    }
    return it->second;
  }
  std::map<std::string, gf::hand::HandAsset> hands_;
  std::map<std::string, gf::grasp::GraspObject> objects_;
  bool all_match_ = true;
};

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw gf::Error(gf::ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw gf::Error(gf::ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

int cmd_eval(const std::string& in, const std::string& report_path) {
  EvalContext ctx;
  nlohmann::json entries = nlohmann::json::array();
  if (fs::is_directory(in)) {
    const fs::path root(in);
    const auto index = read_json_file(root / "index.json");
    try {
      for (const auto& o : index.at("objects"))
        for (const auto& rec_path : o.at("records")) {
          const auto rec = read_json_file(root / rec_path.get<std::string>());
          if (rec.at("keyframes").is_null()) continue;
          const auto kpath = rec.at("keyframes").get<std::string>();
          entries.push_back(ctx.evaluate(gf::grasp::load_keyframes((root / kpath).string()), kpath));
        }
    } catch (const nlohmann::json::exception& e) {
      throw gf::Error(gf::ErrorCode::ParseError, in + ": malformed bundle index: " + e.what());
    }
  } else {
    entries.push_back(ctx.evaluate(gf::grasp::load_keyframes(in), in));
  }
  const nlohmann::json report = {{"version", "eval-v1"}, {"count", entries.size()}, {"all_match", ctx.all_match()}, {"entries", entries}};
  std::ofstream out(report_path);
  if (!out) throw gf::Error(gf::ErrorCode::IoError, "cannot write " + report_path);
  out << report.dump(1) << '\n';
  log("evaluated " + std::to_string(entries.size()) + " keyframe set(s); " +
      (ctx.all_match() ? "all match stored quality" : "MISMATCH against stored quality"));
  return ctx.all_match() ? kOk : kOptimizationFailure;
}

int cmd_build_hand(const std::string& out, bool left) {
  auto a = gf::hand::build_test_asset();
  if (left) a = gf::hand::mirror(a);
  gf::hand::save_hand_asset(a, out);
  log(std::string("test hand asset (") + gf::hand::to_string(a.chirality) + ", " + std::to_string(a.vertex_count()) +
      " vertices) written to " + out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direction-controlled grasp and handover motion synthesis"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "JSON config file (default: $GRASPFORGE_CONFIG)");

  auto add_optimizer_flags = [&](CLI::App* sub) {
    sub->add_option("--hand", flags.hand, "hand asset JSON path, or 'test' for the built-in asset");
    sub->add_option("--steps", flags.steps, "refinement steps");
    sub->add_option("--learning-rate", flags.learning_rate, "initial refinement learning rate");
    sub->add_option("--samples", flags.samples, "object surface samples");
    sub->add_option("--clearance", flags.clearance, "pre-grasp standoff clearance (m)");
  };

  GraspArgs grasp_args;
  auto* grasp = app.add_subcommand("grasp", "optimize one grasp and write its keyframes");
  grasp->add_option("--mesh", grasp_args.mesh, "mesh path (.obj/.off) or primitive, e.g. icosphere:0.04")->required();
  grasp->add_option("--dir", grasp_args.dir, "grasp direction x,y,z (wrist toward object centre)")->required();
  grasp->add_option("--out", grasp_args.out, "keyframes JSON output")->required();
  grasp->add_option("--scale", flags.scale, "uniform mesh scale");
  grasp->add_option("--seed", flags.seed, "surface sampling seed");
  grasp->add_option("--sequence", grasp_args.sequence, "also write a handover sequence (JSON lines)");
  grasp->add_option("--binary", grasp_args.binary, "also write the sequence as HOSEQ001 binary");
  grasp->add_option("--target", flags.target, "handover target offset x,y,z (m)");
  grasp->add_option("--frame-rate", flags.frame_rate, "sequence frame rate (Hz)");
  add_optimizer_flags(grasp);

  std::string manifest;
  std::optional<std::string> bundle_out;
  auto* dataset = app.add_subcommand("dataset", "generate a dataset bundle from a manifest");
  dataset->add_option("--manifest", manifest, "manifest-v1 JSON")->required();
  dataset->add_option("--workers", flags.workers, "worker threads (0 = all cores); never changes the output");
  dataset->add_flag("--allow-partial", flags.allow_partial, "exit 0 even if some records errored");
  dataset->add_option("--out", bundle_out, "bundle directory (default: manifest output)");

  std::string mirror_in, mirror_out;
  auto* mirror = app.add_subcommand("mirror", "mirror a sequence or keyframes to the other hand");
  mirror->add_option("--in", mirror_in, "sequence (.jsonl) or keyframes (.json)")->required();
  mirror->add_option("--out", mirror_out, "output path")->required();

  std::string eval_in, eval_report;
  auto* eval = app.add_subcommand("eval", "recompute quality metrics of keyframes or a bundle");
  eval->add_option("--in", eval_in, "keyframes JSON or bundle directory")->required();
  eval->add_option("--report", eval_report, "JSON report output")->required();

  std::string hand_out;
  bool hand_left = false;
  auto* hand = app.add_subcommand("hand", "hand asset utilities");
  hand->require_subcommand(1);
  auto* build = hand->add_subcommand("build-test-asset", "write the procedural test hand as JSON");
  build->add_option("--out", hand_out, "asset JSON output")->required();
  build->add_flag("--left", hand_left, "write the mirrored left hand");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    const Settings settings = resolve(flags);
    if (grasp->parsed()) return cmd_grasp(settings, grasp_args);
    if (dataset->parsed()) return cmd_dataset(settings, manifest, bundle_out);
    if (mirror->parsed()) return cmd_mirror(mirror_in, mirror_out);
    if (eval->parsed()) return cmd_eval(eval_in, eval_report);
    if (build->parsed()) return cmd_build_hand(hand_out, hand_left);
  } catch (const gf::Error& e) {
    log(e.what());
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    log(std::string("ParseError: ") + e.what());
    return kInputError;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return kInputError;
  }
  return kInputError;
}
