#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bklab {

enum class NoiseFamily { StandardNormal, Rademacher, Uniform, StudentT, SymmetricPareto };

/// Law of the innovation theta. All supported families are symmetric about 0.
///
///   StandardNormal            N(0, 1)
///   Rademacher                +-1 with probability 1/2 each
///   Uniform(c)                uniform on (-c, c), c > 0
///   StudentT(nu)              Student t with nu > 0 degrees of freedom
///   SymmetricPareto(alpha, m) density ~ |x|^{-alpha-1} on |x| >= m, random sign
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::StandardNormal;
  double param1 = 0.0;
  double param2 = 0.0;

  static NoiseSpec standard_normal() { return {NoiseFamily::StandardNormal, 0.0, 0.0}; }
  static NoiseSpec rademacher() { return {NoiseFamily::Rademacher, 0.0, 0.0}; }
  static NoiseSpec uniform(double half_width) { return {NoiseFamily::Uniform, half_width, 0.0}; }
  static NoiseSpec student_t(double dof) { return {NoiseFamily::StudentT, dof, 0.0}; }
  static NoiseSpec symmetric_pareto(double alpha, double x_min) {
    return {NoiseFamily::SymmetricPareto, alpha, x_min};
  }

  /// Throws InvalidNoise if the parameters are outside the family's domain.
  void validate() const;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

std::string_view family_name(NoiseFamily family);
NoiseFamily parse_family(std::string_view name);
std::string describe(const NoiseSpec& spec);

/// E|theta|^r, or the infinite marker when the integral diverges.
struct MomentValue {
  double value = 0.0;
  bool infinite = false;

  bool finite() const noexcept { return !infinite; }
  static MomentValue of(double v) { return {v, false}; }
  static MomentValue diverges() { return {0.0, true}; }
};

/// Closed-form absolute moment. Throws InvalidOrder when r <= 0.
MomentValue absolute_moment(const NoiseSpec& spec, double r);

enum class StreamPurpose : std::uint32_t {
  TailProbability = 1,
  MomentGrowth = 2,
  ProbePath = 3,
  SamplePath = 4,
  SelfCheck = 5,
  Test = 99,
};

/// Identifies one independent random stream. Results never depend on which
/// worker consumes which stream.
struct StreamKey {
  std::uint64_t master_seed = 0;
  StreamPurpose purpose = StreamPurpose::Test;
  std::uint64_t n = 0;
  std::uint64_t block = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Seed for the stream's engine. Each field is folded in with the splitmix64
/// finalizer:
///   h = mix(master_seed ^ K0); h = mix(h ^ purpose ^ K1);
///   h = mix(h ^ n ^ K2);       h = mix(h ^ block ^ K3)
/// with K0..K3 the constants in noise.cpp.
std::uint64_t derive_seed(const StreamKey& key) noexcept;

/// Draws innovations from one stream. Uniforms are taken from mt19937_64 as
/// (k + 0.5) / 2^53, so they lie strictly inside (0, 1). Normals use the
/// Box-Muller transform, Student t uses Bailey's polar method, Pareto and
/// Uniform use inverse transforms.
class NoiseSampler {
public:
  NoiseSampler(const NoiseSpec& spec, const StreamKey& key);

  double next();
  void fill(std::span<double> out);

private:
  double next_open_unit();

  NoiseSpec spec_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::vector<double> sample_block(const NoiseSpec& spec, std::size_t count, const StreamKey& key);

}  // namespace bklab
