#include "bklab/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "bklab/error.hpp"

namespace bklab {

namespace {

constexpr std::uint64_t kSeedSalt = 0x243f6a8885a308d3ULL;
constexpr std::uint64_t kPurposeSalt = 0x13198a2e03707344ULL;
constexpr std::uint64_t kIndexSalt = 0xa4093822299f31d0ULL;
constexpr std::uint64_t kBlockSalt = 0x082efa98ec4e6c89ULL;

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

void NoiseSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorCode::InvalidNoise, describe(*this) + ": " + why);
  };
  if (!std::isfinite(param1) || !std::isfinite(param2)) fail("parameters must be finite");
  switch (family) {
    case NoiseFamily::StandardNormal:
    case NoiseFamily::Rademacher:
      break;
    case NoiseFamily::Uniform:
      if (!(param1 > 0.0)) fail("half-width c must be > 0");
      break;
    case NoiseFamily::StudentT:
      if (!(param1 > 0.0)) fail("degrees of freedom nu must be > 0");
      break;
    case NoiseFamily::SymmetricPareto:
      if (!(param1 > 0.0)) fail("tail index alpha must be > 0");
      if (!(param2 > 0.0)) fail("scale x_min must be > 0");
      break;
  }
}

std::string_view family_name(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::StandardNormal: return "normal";
    case NoiseFamily::Rademacher: return "rademacher";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::StudentT: return "student_t";
    case NoiseFamily::SymmetricPareto: return "pareto";
  }
  return "unknown";
}

NoiseFamily parse_family(std::string_view name) {
  for (auto f : {NoiseFamily::StandardNormal, NoiseFamily::Rademacher, NoiseFamily::Uniform,
                 NoiseFamily::StudentT, NoiseFamily::SymmetricPareto}) {
    if (family_name(f) == name) return f;
  }
  throw Error(ErrorCode::InvalidNoise,
              "unknown noise family '" + std::string(name) +
                  "' (expected normal, rademacher, uniform, student_t or pareto)");
}

std::string describe(const NoiseSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << family_name(spec.family);
  switch (spec.family) {
    case NoiseFamily::Uniform: os << "(c=" << spec.param1 << ")"; break;
    case NoiseFamily::StudentT: os << "(nu=" << spec.param1 << ")"; break;
    case NoiseFamily::SymmetricPareto:
      os << "(alpha=" << spec.param1 << ", x_min=" << spec.param2 << ")";
      break;
    default: break;
  }
  return os.str();
}

MomentValue absolute_moment(const NoiseSpec& spec, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidOrder, "moment order r must be a finite value > 0");
  }
  spec.validate();
  switch (spec.family) {
    case NoiseFamily::StandardNormal:
      return MomentValue::of(std::exp(0.5 * r * std::numbers::ln2 + std::lgamma(0.5 * (r + 1.0))) /
                             std::sqrt(std::numbers::pi));
    case NoiseFamily::Rademacher:
      return MomentValue::of(1.0);
    case NoiseFamily::Uniform:
      return MomentValue::of(std::pow(spec.param1, r) / (r + 1.0));
    case NoiseFamily::StudentT: {
      const double nu = spec.param1;
      if (r >= nu) return MomentValue::diverges();
      // nu^{r/2} B((r+1)/2, (nu-r)/2) / B(1/2, nu/2)
      const double log_value = 0.5 * r * std::log(nu) + std::lgamma(0.5 * (r + 1.0)) +
                               std::lgamma(0.5 * (nu - r)) - std::lgamma(0.5 * nu) -
                               0.5 * std::log(std::numbers::pi);
      return MomentValue::of(std::exp(log_value));
    }
    case NoiseFamily::SymmetricPareto: {
      const double alpha = spec.param1;
      if (r >= alpha) return MomentValue::diverges();
      return MomentValue::of(alpha * std::pow(spec.param2, r) / (alpha - r));
    }
  }
  throw Error(ErrorCode::InvalidNoise, "unhandled noise family");
}

std::uint64_t derive_seed(const StreamKey& key) noexcept {
  std::uint64_t h = splitmix_finalize(key.master_seed ^ kSeedSalt);
  h = splitmix_finalize(h ^ static_cast<std::uint64_t>(key.purpose) ^ kPurposeSalt);
  h = splitmix_finalize(h ^ key.n ^ kIndexSalt);
  h = splitmix_finalize(h ^ key.block ^ kBlockSalt);
  return h;
}

NoiseSampler::NoiseSampler(const NoiseSpec& spec, const StreamKey& key)
    : spec_(spec), engine_(derive_seed(key)) {
  spec_.validate();
}

double NoiseSampler::next_open_unit() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * kTwoPow53Inv;
}

double NoiseSampler::next() {
  switch (spec_.family) {
    case NoiseFamily::StandardNormal: {
      if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
      }
      const double u1 = next_open_unit();
      const double u2 = next_open_unit();
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      cached_normal_ = radius * std::sin(angle);
      has_cached_ = true;
      return radius * std::cos(angle);
    }
    case NoiseFamily::Rademacher:
      return (engine_() >> 63) ? 1.0 : -1.0;
    case NoiseFamily::Uniform:
      return spec_.param1 * (2.0 * next_open_unit() - 1.0);
    case NoiseFamily::StudentT: {
      const double nu = spec_.param1;
      for (;;) {
        const double x = 2.0 * next_open_unit() - 1.0;
        const double y = 2.0 * next_open_unit() - 1.0;
        const double w = x * x + y * y;
        if (w >= 1.0) continue;
        return x * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
      }
    }
    case NoiseFamily::SymmetricPareto: {
      const std::uint64_t bits = engine_();
      const double u = (static_cast<double>(bits & ((1ULL << 53) - 1)) + 0.5) * kTwoPow53Inv;
      const double magnitude = spec_.param2 * std::pow(u, -1.0 / spec_.param1);
      return (bits >> 63) ? magnitude : -magnitude;
    }
  }
  return 0.0;
}

void NoiseSampler::fill(std::span<double> out) {
  for (double& x : out) x = next();
}

std::vector<double> sample_block(const NoiseSpec& spec, std::size_t count, const StreamKey& key) {
  NoiseSampler sampler(spec, key);
  std::vector<double> out(count);
  sampler.fill(out);
  return out;
}

}  // namespace bklab
