#pragma once

#include "graspforge/grasp/io.hpp"
#include "graspforge/motion/handover.hpp"

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

// JSON lines: a header record, then one record per frame with the time, 21 pose
// values, the object pose as translation + unit axis + angle (7 values) and the
// features. Binary companion: "HOSEQ001", uint32 frame count, uint32 values per
// frame, then little-endian float64 rows in the same column order.

namespace graspforge::motion {

inline constexpr const char* kSequenceVersion = "hoseq-jsonl-v1";
inline constexpr char kBinaryMagic[8] = {'H', 'O', 'S', 'E', 'Q', '0', '0', '1'};

/// Translation, unit axis, angle; identity uses the x axis.
inline std::array<double, 7> rigid_to_array(const Rigid& T) {
  const Vec3 rv = so3::log(T.R);
  const double angle = rv.norm();
  const Vec3 axis = angle > 0.0 ? Vec3(rv / angle) : Vec3::UnitX();
  return {T.t.x(), T.t.y(), T.t.z(), axis.x(), axis.y(), axis.z(), angle};
}

inline Rigid rigid_from_array(const std::array<double, 7>& a) {
  const Vec3 axis(a[3], a[4], a[5]);
  if (!(std::abs(axis.norm() - 1.0) < 1e-9)) throw Error(ErrorCode::ParseError, "object pose axis is not unit length");
  return {so3::exp(axis * a[6]), Vec3(a[0], a[1], a[2])};
}

namespace detail {

inline nlohmann::json range_json(const PhaseRange& r) { return {r.begin, r.end}; }

inline PhaseRange range_from(const nlohmann::json& j) {
  const auto a = j.get<std::array<int, 2>>();
  return {a[0], a[1]};
}

inline Phase phase_from_string(const std::string& s) {
  if (s == "approach") return Phase::Approach;
  if (s == "close") return Phase::Close;
  if (s == "transport") return Phase::Transport;
  throw Error(ErrorCode::ParseError, "unknown phase '" + s + "'");
}

inline void check_sequence(const HandoverSequence& seq) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ParseError, "sequence: " + what); };
  const int n = static_cast<int>(seq.frames.size());
  if (seq.approach.begin != 0 || seq.approach.end != seq.close.begin || seq.close.end != seq.transport.begin ||
      seq.transport.end != n || seq.approach.size() < 0 || seq.close.size() < 0 || seq.transport.size() < 0)
    fail("phase ranges do not partition the frames");
  for (int i = 1; i < n; ++i)
    if (!(seq.frames[static_cast<std::size_t>(i)].time > seq.frames[static_cast<std::size_t>(i - 1)].time))
      fail("timestamps are not strictly increasing");
}

}  // namespace detail

inline nlohmann::json header_json(const HandoverSequence& seq) {
  nlohmann::json h;
  h["record"] = "header";
  h["version"] = kSequenceVersion;
  h["frame_rate"] = seq.frame_rate;
  h["frame_count"] = seq.frames.size();
  h["feature_count"] = seq.frames.empty() ? 0 : seq.frames.front().features.size();
  h["chirality"] = hand::to_string(seq.chirality);
  h["phases"] = {{"approach", detail::range_json(seq.approach)},
                 {"close", detail::range_json(seq.close)},
                 {"transport", detail::range_json(seq.transport)}};
  h["provenance"] = {{"request_hash", seq.provenance.request_hash},
                     {"initial", rigid_to_array(seq.provenance.initial)},
                     {"target", rigid_to_array(seq.provenance.target)},
                     {"seed", seq.provenance.seed},
                     {"object", seq.provenance.object}};
  return h;
}

inline nlohmann::json frame_json(const Frame& f) {
  return {{"t", f.time},
          {"phase", to_string(f.phase)},
          {"pose", grasp::pose_to_json(f.hand)},
          {"object", rigid_to_array(f.object)},
          {"features", f.features}};
}

inline void write_jsonl(const HandoverSequence& seq, std::ostream& out) {
  out << header_json(seq).dump() << '\n';
  for (const auto& f : seq.frames) out << frame_json(f).dump() << '\n';
}

inline HandoverSequence read_jsonl(std::istream& in, const std::string& name = "sequence") {
  HandoverSequence seq;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t expected = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      if (!have_header) {
        if (j.value("record", "") != "header" || j.value("version", "") != kSequenceVersion)
          throw Error(ErrorCode::ParseError, name + ": first record must be a " + kSequenceVersion + " header");
        seq.frame_rate = j.at("frame_rate").get<double>();
        expected = j.at("frame_count").get<std::size_t>();
        seq.chirality = hand::chirality_from_string(j.at("chirality").get<std::string>());
        const auto& ph = j.at("phases");
        seq.approach = detail::range_from(ph.at("approach"));
        seq.close = detail::range_from(ph.at("close"));
        seq.transport = detail::range_from(ph.at("transport"));
        const auto& pv = j.at("provenance");
        seq.provenance.request_hash = pv.at("request_hash").get<std::string>();
        seq.provenance.initial = rigid_from_array(pv.at("initial").get<std::array<double, 7>>());
        seq.provenance.target = rigid_from_array(pv.at("target").get<std::array<double, 7>>());
        seq.provenance.seed = pv.at("seed").get<std::uint64_t>();
        seq.provenance.object = pv.at("object").get<grasp::GraspProvenance>();
        have_header = true;
        continue;
      }
      Frame f;
      f.time = j.at("t").get<double>();
      f.phase = detail::phase_from_string(j.at("phase").get<std::string>());
      f.hand = grasp::pose_from_json(j.at("pose"));
      f.object = rigid_from_array(j.at("object").get<std::array<double, 7>>());
      f.features = j.at("features").get<std::vector<double>>();
      seq.frames.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, name + ":" + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw Error(ErrorCode::ParseError, name + ": empty sequence file");
  if (seq.frames.size() != expected)
    throw Error(ErrorCode::ParseError, name + ": header announces " + std::to_string(expected) + " frames, found " +
                                           std::to_string(seq.frames.size()));
  detail::check_sequence(seq);
  return seq;
}

inline void save_jsonl(const HandoverSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_jsonl(seq, out);
}

inline HandoverSequence load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_jsonl(in, path);
}

/// Frame rows only; the JSON-lines header carries the metadata.
inline void write_binary(const HandoverSequence& seq, std::ostream& out) {
  const std::size_t features = seq.frames.empty() ? 0 : seq.frames.front().features.size();
  const auto stride = static_cast<std::uint32_t>(1 + hand::kPoseParams + 7 + features);
  const auto count = static_cast<std::uint32_t>(seq.frames.size());
  out.write(kBinaryMagic, 8);
  out.write(reinterpret_cast<const char*>(&count), 4);
  out.write(reinterpret_cast<const char*>(&stride), 4);
  std::vector<double> row;
  for (const auto& f : seq.frames) {
    if (f.features.size() != features) throw Error(ErrorCode::InvalidArgument, "frames disagree on feature count");
    row.clear();
    row.push_back(f.time);
    const auto p = f.hand.to_vector();
    row.insert(row.end(), p.data(), p.data() + p.size());
    const auto o = rigid_to_array(f.object);
    row.insert(row.end(), o.begin(), o.end());
    row.insert(row.end(), f.features.begin(), f.features.end());
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
}

/// Returns the raw rows (time, pose, object, features) of a binary companion file.
inline std::vector<std::vector<double>> read_binary(std::istream& in) {
  char magic[8];
  std::uint32_t count = 0, stride = 0;
  if (!in.read(magic, 8) || std::memcmp(magic, kBinaryMagic, 8) != 0)
    throw Error(ErrorCode::ParseError, "not a HOSEQ001 file");
  if (!in.read(reinterpret_cast<char*>(&count), 4) || !in.read(reinterpret_cast<char*>(&stride), 4))
    throw Error(ErrorCode::ParseError, "truncated HOSEQ001 header");
  if (stride < 1 + hand::kPoseParams + 7) throw Error(ErrorCode::ParseError, "HOSEQ001 stride too small");
  std::vector<std::vector<double>> rows(count, std::vector<double>(stride));
  for (auto& r : rows)
    if (!in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(stride * sizeof(double))))
      throw Error(ErrorCode::ParseError, "truncated HOSEQ001 body");
  return rows;
}

inline void save_binary(const HandoverSequence& seq, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_binary(seq, out);
}

}  // namespace graspforge::motion
