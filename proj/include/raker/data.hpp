#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "raker/kernel.hpp"

namespace raker {

enum class TaskKind { Regression, BinaryClassification };

struct StreamRecord {
  std::uint64_t t = 0;  // 1-based slot
  std::vector<double> x;
  double y = 0.0;
  TaskKind task = TaskKind::Regression;
};

using Stream = std::vector<StreamRecord>;

std::size_t stream_dim(const Stream& stream);

// Piecewise-constant Gaussian bandwidth over [1, T].
struct Segment {
  std::uint64_t start = 1;
  std::uint64_t end = 1;
  double sigma_sq = 1.0;
};

struct SwitchingSchedule {
  std::vector<Segment> segments;

  // Throws std::invalid_argument unless segments are contiguous, start at 1,
  // have positive bandwidths and cover at least [1, horizon].
  void validate(std::uint64_t horizon) const;
  std::uint64_t horizon() const;
  double sigma_sq_at(std::uint64_t t) const;
  // First slot of every segment after the first.
  std::vector<std::uint64_t> switch_points() const;
  // Switch points scaled by horizon / this->horizon(), rounded.
  SwitchingSchedule rescaled(std::uint64_t horizon) const;
};

// sigma^2 = 1 on [1, 8000] and [18001, 26000], 10 on [8001, 18000] and [26001, 36000].
SwitchingSchedule dataset1_schedule();
// Ten segments over [1, 6500].
SwitchingSchedule dataset2_schedule();
// Two segments: sigma_sq_a on [1, switch_at - 1], sigma_sq_b on [switch_at, horizon].
SwitchingSchedule two_segment_schedule(std::uint64_t horizon, std::uint64_t switch_at,
                                       double sigma_sq_a, double sigma_sq_b);

/// Kernel-superposition stream with a switching kernel:
///   x_t ~ N(0, I_d),  alpha_t = 1 + N(0, sigma_alpha^2),
///   y_t = sum_{tau <= t} alpha_tau * kappa_tau(x_t, x_tau)
/// where kappa_tau is the Gaussian kernel of the segment containing tau.
/// Targets come from the raw inputs; x columns and y are then min-max
/// normalized to [0, 1] when normalize is set. O(T^2 d).
Stream gen_switching_stream(const SwitchingSchedule& schedule, std::size_t d, std::uint64_t horizon,
                            double sigma_alpha, std::uint64_t seed, bool normalize = true);

// Fixed random RKHS element sum_j c_j kappa(x, u_j), affinely rescaled.
struct StationaryTarget {
  KernelSpec spec;
  std::vector<double> centers;  // row-major m x d
  std::vector<double> coefficients;
  double offset = 0.0;
  double scale = 1.0;

  double raw(std::span<const double> x) const;
  double operator()(std::span<const double> x) const { return (raw(x) - offset) * scale; }
};

struct StationaryStream {
  Stream records;
  StationaryTarget target;
};

inline constexpr std::size_t kStationaryCenters = 20;

// x_t ~ U[0, 1]^d; y_t = f(x_t) + N(0, noise_std^2) with f rescaled so its
// values on the drawn inputs span [0, 1].
StationaryStream gen_stationary_stream(const KernelSpec& spec, std::size_t d, std::uint64_t horizon,
                                       double noise_std, std::uint64_t seed);

struct MinMaxBounds {
  std::vector<double> lo;  // per feature column
  std::vector<double> hi;
  double y_lo = 0.0;
  double y_hi = 1.0;
  bool scale_y = true;
};

MinMaxBounds fit_minmax(const Stream& stream);
// (v - lo) / (hi - lo); columns with hi == lo map to 0.
void apply_minmax(Stream& stream, const MinMaxBounds& bounds);
void normalize_minmax(Stream& stream);

struct CsvOptions {
  std::string label_column;
  // Empty: every column except the label and a leading "t" column.
  std::vector<std::string> feature_columns;
  bool normalize = true;
  TaskKind task = TaskKind::Regression;
};

// Header row required. Errors name the 1-based data row and the column.
Stream read_csv(std::istream& in, const CsvOptions& options);
Stream load_csv(const std::filesystem::path& path, const CsvOptions& options);

// Header t,x_1..x_d,y; shortest round-trip number formatting.
void write_csv(std::ostream& out, const Stream& stream);
void save_csv(const std::filesystem::path& path, const Stream& stream);

// Shortest decimal string that parses back to v.
std::string format_double(double v);

}  // namespace raker
