#pragma once

#include "graspforge/dataset/pool.hpp"
#include "graspforge/dataset/sampling.hpp"
#include "graspforge/dataset/verdict.hpp"
#include "graspforge/motion/io.hpp"

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>

namespace graspforge::dataset {

inline constexpr const char* kRecordVersion = "record-v1";
inline constexpr const char* kBundleVersion = "bundle-v1";

enum class RecordStatus { Accepted, Rejected, Error };

inline const char* to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::Accepted: return "accepted";
    case RecordStatus::Rejected: return "rejected";
    case RecordStatus::Error: return "error";
  }
  return "unknown";
}

struct SequenceRecord {
  std::string object;
  int direction_index = 0;
  hand::Chirality hand = hand::Chirality::Right;
  std::string parent;  // right-handed record this one mirrors; empty for originals
  Vec3 direction = Vec3::UnitX();
  Rigid initial;
  Rigid target;
  WidthResult width;
  RecordStatus status = RecordStatus::Rejected;
  Verdict verdict;
  std::string keyframes;  // bundle-relative paths; empty when not produced
  std::string sequence;
  std::string error;

  std::string path() const;
};

inline std::string record_stem(const std::string& object, int index, hand::Chirality c) {
  return "records/" + object + "/" + std::to_string(index) + (c == hand::Chirality::Left ? "-left" : "");
}

inline std::string SequenceRecord::path() const { return record_stem(object, direction_index, hand) + ".json"; }

inline nlohmann::json to_json(const SequenceRecord& r) {
  auto opt = [](const std::string& s) { return s.empty() ? nlohmann::json() : nlohmann::json(s); };
  return {{"version", kRecordVersion},
          {"object", r.object},
          {"direction_index", r.direction_index},
          {"hand", hand::to_string(r.hand)},
          {"parent", opt(r.parent)},
          {"direction", {r.direction.x(), r.direction.y(), r.direction.z()}},
          {"initial", motion::rigid_to_array(r.initial)},
          {"target", motion::rigid_to_array(r.target)},
          {"width", {{"value", r.width.width}, {"fallback", r.width.used_fallback}}},
          {"status", to_string(r.status)},
          {"verdict", r.verdict},
          {"keyframes", opt(r.keyframes)},
          {"sequence", opt(r.sequence)},
          {"error", opt(r.error)}};
}

struct ObjectSummary {
  std::string id;
  std::string source;
  std::string status = "kept";  // kept | filtered | error
  std::string error;
  std::vector<Vec3> directions;
  FilterResult filter;
};

struct DatasetBundle {
  std::vector<ObjectSummary> objects;
  std::vector<SequenceRecord> records;  // each original followed by its mirror, if any
  nlohmann::json stats;
  nlohmann::json index;
  double wall_seconds = 0.0;  // reported to the caller only; never written into the bundle
};

struct GenerateOptions {
  int workers = 1;
  std::string out_dir;  // empty: the manifest's output directory
  std::function<void(const std::string&)> log;
};

namespace detail {

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

inline std::uint64_t object_stream(const DatasetManifest& m, const std::string& id) {
  return rng::key(m.seed, rng::hash_string(id));
}

struct LoadedObject {
  std::shared_ptr<const grasp::GraspObject> object;
  std::uint64_t sample_seed = 0;
};

inline nlohmann::json statistics(const DatasetManifest& m, const DatasetBundle& b) {
  std::size_t kept = 0, filtered = 0, errored_objects = 0;
  for (const auto& o : b.objects) {
    if (o.status == "kept") ++kept;
    else if (o.status == "filtered") ++filtered;
    else ++errored_objects;
  }
  std::size_t attempted = 0, accepted = 0, rejected = 0, errored = 0, mirrored = 0;
  nlohmann::json primary = nlohmann::json::object(), occurrences = nlohmann::json::object();
  for (Reason r : kAllReasons) primary[to_string(r)] = 0, occurrences[to_string(r)] = 0;
  for (const auto& r : b.records) {
    if (!r.parent.empty()) {
      ++mirrored;
      continue;
    }
    ++attempted;
    if (r.status == RecordStatus::Accepted) ++accepted;
    if (r.status == RecordStatus::Error) ++errored;
    if (r.status != RecordStatus::Rejected) continue;
    ++rejected;
    primary[to_string(r.verdict.reasons.front())] = primary[to_string(r.verdict.reasons.front())].get<int>() + 1;
    for (Reason reason : r.verdict.reasons) occurrences[to_string(reason)] = occurrences[to_string(reason)].get<int>() + 1;
  }
  return {{"version", "stats-v1"},
          {"objects", {{"total", b.objects.size()}, {"kept", kept}, {"filtered", filtered}, {"errored", errored_objects}}},
          {"records",
           {{"attempted", attempted}, {"accepted", accepted}, {"rejected", rejected}, {"errored", errored}, {"mirrored", mirrored}}},
          {"rejections_by_primary_reason", primary},
          {"reason_occurrences", occurrences},
          {"thresholds", m.thresholds},
          {"max_width", m.max_width}};
}

inline nlohmann::json index_json(const DatasetBundle& b) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : b.objects) {
    nlohmann::json widths = nlohmann::json::array(), records = nlohmann::json::array();
    for (std::size_t i = 0; i < o.filter.widths.size(); ++i)
      widths.push_back({{"width", o.filter.widths[i].width}, {"fallback", o.filter.widths[i].used_fallback},
                        {"passes", static_cast<bool>(o.filter.passes[i])}});
    for (const auto& r : b.records)
      if (r.object == o.id) records.push_back(r.path());
    objects.push_back({{"id", o.id}, {"mesh", o.source}, {"status", o.status}, {"error", o.error.empty() ? nlohmann::json() : nlohmann::json(o.error)},
                       {"filter", widths}, {"records", records}});
  }
  return {{"version", kBundleVersion}, {"objects", objects}};
}

}  // namespace detail

/// Filters, optimizes, synthesizes, judges and mirrors every (object, direction) pair
/// of the manifest. Output depends only on the manifest, never on the worker count.
inline DatasetBundle generate_dataset(const DatasetManifest& manifest, const GenerateOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  manifest.validate();
  const std::filesystem::path root = options.out_dir.empty() ? manifest.output : options.out_dir;
  std::mutex log_mutex;
  auto log = [&](const std::string& msg) {
    if (!options.log) return;
    std::lock_guard<std::mutex> lock(log_mutex);
    options.log(msg);
  };

  std::shared_ptr<const hand::HandAsset> asset;
  try {
    asset = std::make_shared<const hand::HandAsset>(grasp::load_hand(manifest.hand));
    if (asset->chirality != hand::Chirality::Right) throw Error(ErrorCode::InvalidArgument, "dataset hand must be right-handed");
  } catch (const Error& e) {
    throw Error(ErrorCode::ManifestError, "hand asset '" + manifest.hand + "': " + e.what());
  }
  try {
    std::filesystem::create_directories(root / "records");
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(ErrorCode::IoError, e.what());
  }

  DatasetBundle bundle;
  const std::size_t n_objects = manifest.objects.size();
  const auto n_dirs = static_cast<std::size_t>(manifest.directions_per_object);
  bundle.objects.resize(n_objects);
  std::vector<detail::LoadedObject> loaded(n_objects);

  parallel_for(n_objects, options.workers, [&](std::size_t o) {
    const auto& entry = manifest.objects[o];
    auto& summary = bundle.objects[o];
    summary.id = entry.id;
    summary.source = entry.source;
    const std::uint64_t stream = detail::object_stream(manifest, entry.id);
    summary.directions = sample_grasp_directions(manifest.robot_bearing, manifest.directions_per_object,
                                                 manifest.cone_half_angle_deg, stream);
    try {
      loaded[o].sample_seed = rng::key(stream, ~0ULL);
      loaded[o].object = std::make_shared<const grasp::GraspObject>(grasp::load_object(
          entry.source, entry.scale, static_cast<std::size_t>(manifest.optimizer.sample_count), loaded[o].sample_seed));
      summary.filter = filter_object(loaded[o].object->samples.points, summary.directions, manifest.max_width);
      summary.status = summary.filter.keep || n_dirs == 0 ? "kept" : "filtered";
    } catch (const std::exception& e) {
      summary.status = "error";
      summary.error = e.what();
      loaded[o].object.reset();
    }
    std::filesystem::create_directories(root / "records" / entry.id);
    log(entry.id + ": " + summary.status + (summary.error.empty() ? "" : " (" + summary.error + ")"));
  });

  // Slot 2k holds the original of job k, slot 2k+1 its mirror (dropped if absent).
  std::vector<std::optional<SequenceRecord>> slots(2 * n_objects * n_dirs);
  parallel_for(n_objects * n_dirs, options.workers, [&](std::size_t job) {
    const std::size_t o = job / n_dirs;
    const int i = static_cast<int>(job % n_dirs);
    const auto& entry = manifest.objects[o];
    const auto& summary = bundle.objects[o];
    const std::uint64_t stream = rng::key(detail::object_stream(manifest, entry.id), static_cast<std::uint64_t>(i));

    SequenceRecord r;
    r.object = entry.id;
    r.direction_index = i;
    r.direction = summary.directions[static_cast<std::size_t>(i)];
    r.target = sample_target_pose(r.initial, manifest.workspace, rng::key(stream, 1), manifest.target_yaw_deg);
    const std::string stem = record_stem(entry.id, i, hand::Chirality::Right);

    auto finish = [&](SequenceRecord& rec, std::size_t slot) {
      detail::write_json(root / rec.path(), to_json(rec));
      slots[slot] = std::move(rec);
    };

    if (!loaded[o].object) {
      r.status = RecordStatus::Error;
      r.error = "object '" + entry.id + "': " + summary.error;
      finish(r, 2 * job);
      return;
    }
    r.width = summary.filter.widths[static_cast<std::size_t>(i)];
    if (!summary.filter.passes[static_cast<std::size_t>(i)]) {
      r.verdict = Verdict::rejected(Reason::WidthExceeded);
      finish(r, 2 * job);
      return;
    }

    try {
      grasp::GraspKeyframes k;
      try {
        k = grasp::optimize_grasp(grasp::make_request(asset, loaded[o].object, r.direction, manifest.optimizer));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NoCollisionFreeStandoff) r.verdict = Verdict::rejected(Reason::StandoffFailure);
        else if (e.code() == ErrorCode::NonFinite) r.verdict = Verdict::rejected(Reason::NonFinite);
        else throw;
        r.error = e.what();
        finish(r, 2 * job);
        return;
      }
      k.provenance.mesh = entry.source;
      k.provenance.scale = entry.scale;
      k.provenance.seed = loaded[o].sample_seed;
      k.provenance.hand = manifest.hand;
      const auto seq = motion::synthesize_handover(k, r.initial, r.target, manifest.timing, *asset, loaded[o].object->index, stream);
      r.verdict = accept_sequence(k, &seq, manifest.thresholds);
      r.status = r.verdict.accepted ? RecordStatus::Accepted : RecordStatus::Rejected;
      r.keyframes = stem + ".keyframes.json";
      r.sequence = stem + ".jsonl";
      grasp::save_keyframes(k, (root / r.keyframes).string());
      motion::save_jsonl(seq, (root / r.sequence).string());

      if (r.verdict.accepted && manifest.mirror) {
        SequenceRecord m = r;
        m.hand = hand::Chirality::Left;
        m.parent = r.path();
        m.direction = hand::mirror_point(r.direction);
        m.initial = hand::mirror(r.initial);
        m.target = hand::mirror(r.target);
        const std::string left = record_stem(entry.id, i, hand::Chirality::Left);
        m.keyframes = left + ".keyframes.json";
        m.sequence = left + ".jsonl";
        grasp::save_keyframes(motion::mirror_keyframes(k), (root / m.keyframes).string());
        motion::save_jsonl(motion::mirror_sequence(seq), (root / m.sequence).string());
        finish(m, 2 * job + 1);
      }
    } catch (const std::exception& e) {
      r.status = RecordStatus::Error;
      r.verdict = {};
      r.keyframes.clear();
      r.sequence.clear();
      r.error = e.what();
    }
    log(stem + ": " + to_string(r.status));
    finish(r, 2 * job);
  });

  for (auto& s : slots)
    if (s) bundle.records.push_back(std::move(*s));
  bundle.stats = detail::statistics(manifest, bundle);
  bundle.index = detail::index_json(bundle);
  detail::write_json(root / "manifest.json", to_json(manifest));
  detail::write_json(root / "stats.json", bundle.stats);
  detail::write_json(root / "index.json", bundle.index);
  bundle.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return bundle;
}

}  // namespace graspforge::dataset
