#pragma once

// Seeded randomness contract: per-trial stream derivation, i.i.d. design
// draws, Gaussian noise and dataset assembly. Every draw is a pure function
// of (master_seed, trial_index, purpose), so trials replay bit-identically
// within one build and may run concurrently without coordination.

#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

namespace invlearn {

struct ForwardOperator;
struct DesignMeasure;
struct ProblemSpec;
struct GroundTruth;

struct SeedPlan {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Stated stream derivation: master_seed and trial_index are folded through
/// the splitmix64 finalizer with golden-ratio increments, then a purpose tag
/// separates the design draw stream from the noise stream.
std::uint64_t derive_stream_seed(const SeedPlan& plan, std::uint64_t purpose);

inline constexpr std::uint64_t kDesignStream = 1;
inline constexpr std::uint64_t kNoiseStream = 2;

/// Deterministic uniform/gaussian source: mt19937_64 for the bit stream, a
/// fixed 53-bit mantissa mapping for uniforms and the polar method for
/// gaussians. No library distribution objects, so the numeric stream is
/// fully pinned by this code.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// n i.i.d. draws from the design measure. Polynomial densities are sampled
/// by inverse CDF with a fixed-depth bisection (width < 1e-12).
std::vector<double> draw_design(const DesignMeasure& design, long n, const SeedPlan& seed);

struct Dataset {
  std::vector<double> points;        // in [0, 1]
  std::vector<double> observations;  // empirical norm convention downstream
  double noise_delta = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
  bool synthetic = false;  // noise stream replayable from the seed fields

  long n() const { return static_cast<long>(points.size()); }
};

/// y_n = eval_row(x_n) . f + delta * eps_n with standard normal eps.
Dataset synthesize(const ProblemSpec& spec, const GroundTruth& f_true, long n,
                   const SeedPlan& seed);

/// Replays the noise stream recorded in a synthetic dataset.
std::vector<double> regenerate_noise(const Dataset& data);

/// CSV export: header "x,y", one row per observation, 17 significant digits.
void write_csv(const Dataset& data, std::ostream& out);

}
