#include "invlearn/sampling.hpp"

#include <stdexcept>

#include "invlearn/io_util.hpp"
#include "invlearn/problem.hpp"

namespace invlearn {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;
constexpr int kBisectionSteps = 48;  // [0,1] halved 48 times: width < 4e-15
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(const SeedPlan& plan, std::uint64_t purpose) {
  std::uint64_t z = plan.master_seed;
  z = mix64(z + kGoldenGamma * (plan.trial_index + 1));
  z = mix64(z + kGoldenGamma * (purpose + 1));
  return z;
}

std::vector<double> draw_design(const DesignMeasure& design, long n, const SeedPlan& seed) {
  if (n < 1) throw std::invalid_argument("draw_design: n must be >= 1");
  RandomStream rs(derive_stream_seed(seed, kDesignStream));
  std::vector<double> points(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    const double u = rs.uniform01();
    if (design.kind == DesignKind::uniform01) {
      points[i] = u;
    } else {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        (design.cdf(mid) < u ? lo : hi) = mid;
      }
      points[i] = 0.5 * (lo + hi);
    }
  }
  return points;
}

Dataset synthesize(const ProblemSpec& spec, const GroundTruth& f_true, long n,
                   const SeedPlan& seed) {
  if (n < 1) throw std::invalid_argument("synthesize: n must be >= 1");
  if (f_true.coeffs.size() != spec.ambient_dim)
    throw std::invalid_argument("synthesize: ground truth dimension mismatch");

  Dataset data;
  data.points = draw_design(spec.design, n, seed);
  data.observations.resize(static_cast<std::size_t>(n));
  data.noise_delta = spec.noise_delta;
  data.master_seed = seed.master_seed;
  data.trial_index = seed.trial_index;
  data.synthetic = true;

  RandomStream noise(derive_stream_seed(seed, kNoiseStream));
  for (long i = 0; i < n; ++i) {
    const double clean = eval_row(spec, data.points[i]).dot(f_true.coeffs);
    data.observations[i] = clean + spec.noise_delta * noise.gaussian();
  }
  return data;
}

std::vector<double> regenerate_noise(const Dataset& data) {
  if (!data.synthetic)
    throw std::invalid_argument("regenerate_noise: dataset was not produced by synthesize");
  RandomStream noise(
      derive_stream_seed({data.master_seed, data.trial_index}, kNoiseStream));
  std::vector<double> eps(data.points.size());
  for (double& e : eps) e = noise.gaussian();
  return eps;
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << "x,y\n";
  for (std::size_t i = 0; i < data.points.size(); ++i)
    out << format_double(data.points[i]) << ',' << format_double(data.observations[i])
        << '\n';
}

}
