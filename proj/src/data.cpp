#include "raker/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "raker/errors.hpp"
#include "raker/rng.hpp"

namespace raker {

std::size_t stream_dim(const Stream& stream) {
  return stream.empty() ? 0 : stream.front().x.size();
}

// ---- schedules ------------------------------------------------------------

void SwitchingSchedule::validate(std::uint64_t horizon_needed) const {
  if (segments.empty()) throw std::invalid_argument("schedule has no segments");
  std::uint64_t expected = 1;
  for (const auto& s : segments) {
    if (s.start != expected) {
      throw std::invalid_argument("schedule segment starting at " + std::to_string(s.start) +
                                  (s.start > expected ? " leaves a gap" : " overlaps") +
                                  " (expected start " + std::to_string(expected) + ")");
    }
    if (s.end < s.start) throw std::invalid_argument("schedule segment ends before it starts");
    if (!(s.sigma_sq > 0.0)) throw std::invalid_argument("schedule bandwidth must be positive");
    expected = s.end + 1;
  }
  if (horizon() < horizon_needed) {
    throw std::invalid_argument("schedule covers [1, " + std::to_string(horizon()) +
                                "] but the stream needs [1, " + std::to_string(horizon_needed) +
                                "]");
  }
}

std::uint64_t SwitchingSchedule::horizon() const {
  return segments.empty() ? 0 : segments.back().end;
}

double SwitchingSchedule::sigma_sq_at(std::uint64_t t) const {
  for (const auto& s : segments) {
    if (s.start <= t && t <= s.end) return s.sigma_sq;
  }
  throw std::out_of_range("schedule does not cover slot " + std::to_string(t));
}

std::vector<std::uint64_t> SwitchingSchedule::switch_points() const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 1; i < segments.size(); ++i) out.push_back(segments[i].start);
  return out;
}

SwitchingSchedule SwitchingSchedule::rescaled(std::uint64_t new_horizon) const {
  const double ratio = static_cast<double>(new_horizon) / static_cast<double>(horizon());
  SwitchingSchedule out;
  std::uint64_t start = 1;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::uint64_t end =
        (i + 1 == segments.size())
            ? new_horizon
            : static_cast<std::uint64_t>(std::llround(static_cast<double>(segments[i].end) * ratio));
    if (end < start) throw std::invalid_argument("rescaled schedule collapses a segment");
    out.segments.push_back(Segment{start, end, segments[i].sigma_sq});
    start = end + 1;
  }
  return out;
}

SwitchingSchedule dataset1_schedule() {
  return SwitchingSchedule{{{1, 8000, 1.0}, {8001, 18000, 10.0}, {18001, 26000, 1.0},
                            {26001, 36000, 10.0}}};
}

SwitchingSchedule dataset2_schedule() {
  return SwitchingSchedule{{{1, 200, 0.01},
                            {201, 1000, 1.0},
                            {1001, 2000, 10.0},
                            {2001, 2300, 0.01},
                            {2301, 3000, 1.0},
                            {3001, 3500, 10.0},
                            {3501, 4300, 0.01},
                            {4301, 5100, 1.0},
                            {5101, 5900, 0.01},
                            {5901, 6500, 0.1}}};
}

SwitchingSchedule two_segment_schedule(std::uint64_t horizon, std::uint64_t switch_at,
                                       double sigma_sq_a, double sigma_sq_b) {
  if (switch_at < 2 || switch_at > horizon) {
    throw std::invalid_argument("two_segment_schedule: switch must lie in [2, horizon]");
  }
  return SwitchingSchedule{{{1, switch_at - 1, sigma_sq_a}, {switch_at, horizon, sigma_sq_b}}};
}

// ---- generators -----------------------------------------------------------

Stream gen_switching_stream(const SwitchingSchedule& schedule, std::size_t d, std::uint64_t horizon,
                            double sigma_alpha, std::uint64_t seed, bool normalize) {
  if (horizon < 1) throw std::invalid_argument("gen_switching_stream: T must be >= 1");
  if (d < 1) throw std::invalid_argument("gen_switching_stream: d must be >= 1");
  if (!(sigma_alpha >= 0.0)) throw std::invalid_argument("sigma_alpha must be >= 0");
  schedule.validate(horizon);

  std::mt19937_64 x_rng = make_engine(seed, streams::kInputs);
  std::mt19937_64 a_rng = make_engine(seed, streams::kCoefficients);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = static_cast<std::size_t>(horizon);
  std::vector<double> xs(n * d);
  std::vector<double> alphas(n);
  std::vector<double> sigma_sq(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < d; ++k) xs[t * d + k] = normal(x_rng);
    alphas[t] = 1.0 + sigma_alpha * normal(a_rng);
    sigma_sq[t] = schedule.sigma_sq_at(t + 1);
  }

  Stream out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double* xt = xs.data() + t * d;
    double y = 0.0;
    for (std::size_t tau = 0; tau <= t; ++tau) {
      const double* xtau = xs.data() + tau * d;
      double sq = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = xt[k] - xtau[k];
        sq += diff * diff;
      }
      y += alphas[tau] * std::exp(-sq / (2.0 * sigma_sq[tau]));
    }
    out[t].t = t + 1;
    out[t].x.assign(xt, xt + d);
    out[t].y = y;
  }
  if (normalize) normalize_minmax(out);
  return out;
}

double StationaryTarget::raw(std::span<const double> x) const {
  const std::size_t d = spec.input_dim;
  require_same_length(x.size(), d, "StationaryTarget");
  double acc = 0.0;
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    acc += coefficients[j] * exact_eval_unchecked(spec, centers.data() + j * d, x.data());
  }
  return acc;
}

StationaryStream gen_stationary_stream(const KernelSpec& spec, std::size_t d, std::uint64_t horizon,
                                       double noise_std, std::uint64_t seed) {
  spec.validate();
  if (spec.input_dim != d) throw DimensionError("gen_stationary_stream: kernel dimension != d");
  if (horizon < 1) throw std::invalid_argument("gen_stationary_stream: T must be >= 1");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise_std must be >= 0");

  StationaryStream out;
  StationaryTarget& f = out.target;
  f.spec = spec;
  std::mt19937_64 c_rng = make_engine(seed, streams::kCenters);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  f.centers.resize(kStationaryCenters * d);
  for (double& c : f.centers) c = unit(c_rng);
  f.coefficients.resize(kStationaryCenters);
  for (double& c : f.coefficients) c = sym(c_rng);

  std::mt19937_64 x_rng = make_engine(seed, streams::kInputs);
  std::mt19937_64 e_rng = make_engine(seed, streams::kNoise);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = static_cast<std::size_t>(horizon);
  out.records.resize(n);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t t = 0; t < n; ++t) {
    auto& rec = out.records[t];
    rec.t = t + 1;
    rec.x.resize(d);
    for (double& v : rec.x) v = unit(x_rng);
    rec.y = f.raw(rec.x);
    lo = std::min(lo, rec.y);
    hi = std::max(hi, rec.y);
  }
  f.offset = lo;
  f.scale = hi > lo ? 1.0 / (hi - lo) : 1.0;
  for (auto& rec : out.records) {
    rec.y = (rec.y - f.offset) * f.scale + noise_std * normal(e_rng);
  }
  return out;
}

// ---- normalization --------------------------------------------------------

MinMaxBounds fit_minmax(const Stream& stream) {
  MinMaxBounds b;
  if (stream.empty()) return b;
  const std::size_t d = stream_dim(stream);
  b.lo.assign(d, std::numeric_limits<double>::infinity());
  b.hi.assign(d, -std::numeric_limits<double>::infinity());
  b.y_lo = std::numeric_limits<double>::infinity();
  b.y_hi = -b.y_lo;
  b.scale_y = stream.front().task == TaskKind::Regression;
  for (const auto& r : stream) {
    for (std::size_t k = 0; k < d; ++k) {
      b.lo[k] = std::min(b.lo[k], r.x[k]);
      b.hi[k] = std::max(b.hi[k], r.x[k]);
    }
    b.y_lo = std::min(b.y_lo, r.y);
    b.y_hi = std::max(b.y_hi, r.y);
  }
  return b;
}

namespace {

double scale_into_unit(double v, double lo, double hi) {
  return hi > lo ? (v - lo) / (hi - lo) : 0.0;
}

}  // namespace

void apply_minmax(Stream& stream, const MinMaxBounds& bounds) {
  for (auto& r : stream) {
    require_same_length(r.x.size(), bounds.lo.size(), "apply_minmax");
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      r.x[k] = scale_into_unit(r.x[k], bounds.lo[k], bounds.hi[k]);
    }
    if (bounds.scale_y) r.y = scale_into_unit(r.y, bounds.y_lo, bounds.y_hi);
  }
}

void normalize_minmax(Stream& stream) { apply_minmax(stream, fit_minmax(stream)); }

// ---- CSV ------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Stream read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw DataError("CSV input is empty (header row required)");
  }
  const std::string header_line = line;
  const std::vector<std::string_view> header = split_fields(header_line);

  auto find_column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw DataError("CSV column '" + name + "' not found in header", 0, name);
  };

  if (options.label_column.empty()) throw DataError("no label column given");
  const std::size_t label_idx = find_column(options.label_column);
  std::vector<std::size_t> feature_idx;
  std::vector<std::string> feature_names;
  if (options.feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i == label_idx || (i == 0 && header[i] == "t")) continue;
      feature_idx.push_back(i);
      feature_names.emplace_back(header[i]);
    }
  } else {
    for (const auto& name : options.feature_columns) {
      feature_idx.push_back(find_column(name));
      feature_names.push_back(name);
    }
  }
  if (feature_idx.empty()) throw DataError("CSV has no feature columns");

  Stream out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError("CSV row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                          " fields, header has " + std::to_string(header.size()),
                      row);
    }
    StreamRecord rec;
    rec.t = row;
    rec.task = options.task;
    rec.x.resize(feature_idx.size());
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      if (!parse_number(fields[feature_idx[k]], rec.x[k])) {
        throw DataError("CSV row " + std::to_string(row) + ", column '" + feature_names[k] +
                            "': not a number: '" + std::string(fields[feature_idx[k]]) + "'",
                        row, feature_names[k]);
      }
    }
    if (!parse_number(fields[label_idx], rec.y)) {
      throw DataError("CSV row " + std::to_string(row) + ", column '" + options.label_column +
                          "': not a number: '" + std::string(fields[label_idx]) + "'",
                      row, options.label_column);
    }
    if (options.task == TaskKind::BinaryClassification && rec.y != 1.0 && rec.y != -1.0) {
      throw DataError("CSV row " + std::to_string(row) + ", column '" + options.label_column +
                          "': classification labels must be -1 or +1",
                      row, options.label_column);
    }
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw DataError("CSV input has a header but no data rows");
  if (options.normalize) normalize_minmax(out);
  return out;
}

Stream load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");
  return read_csv(in, options);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Stream& stream) {
  const std::size_t d = stream_dim(stream);
  out << "t";
  for (std::size_t k = 0; k < d; ++k) out << ",x_" << (k + 1);
  out << ",y\n";
  for (const auto& r : stream) {
    out << r.t;
    for (double v : r.x) out << ',' << format_double(v);
    out << ',' << format_double(r.y) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Stream& stream) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CSV file '" + path.string() + "'");
  write_csv(out, stream);
}

}  // namespace raker
