#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace graspforge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Points3 = std::vector<Vec3, Eigen::aligned_allocator<Vec3>>;
using Points2 = std::vector<Vec2, Eigen::aligned_allocator<Vec2>>;

enum class ErrorCode {
  ParseError,
  EmptyMesh,
  EmptySamples,
  DegenerateSet,
  AxisUndefined,
  NoCollisionFreeStandoff,
  NonFinite,
  InvalidTiming,
  InvalidArgument,
  ManifestError,
  IoError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::DegenerateSet: return "DegenerateSet";
    case ErrorCode::AxisUndefined: return "AxisUndefined";
    case ErrorCode::NoCollisionFreeStandoff: return "NoCollisionFreeStandoff";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidTiming: return "InvalidTiming";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based key: the value depends only on its inputs, never on call order.
inline std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x85157af5ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of a counter-based hash.
inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return static_cast<double>(key(seed, a, b, c) >> 11) * 0x1.0p-53;
}

/// FNV-1a, used to turn string identifiers into RNG streams.
inline std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rng

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) { return m.allFinite(); }

}  // namespace graspforge
