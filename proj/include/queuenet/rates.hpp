#pragma once
// Piecewise-constant arrival intensities and per-mode stream splitting.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace queuenet {

enum class Mode { Taxi = 0, Bus = 1, Subway = 2 };

inline constexpr std::array<Mode, 3> kModes{Mode::Taxi, Mode::Bus, Mode::Subway};

const char* mode_name(Mode m);

// Mode shares (alpha, beta, gamma) on the probability simplex.
struct ShareVector {
  double alpha = 1.0 / 3.0;
  double beta = 1.0 / 3.0;
  double gamma = 1.0 / 3.0;

  double operator[](Mode m) const;
  double& operator[](Mode m);

  // Throws ValidationError unless every share is >= 0 and they sum to 1
  // within `tol`.
  void validate(double tol = 1e-12) const;

  friend bool operator==(const ShareVector&, const ShareVector&) = default;
};

// Intensity (per minute) that is constant on each interval
// [breakpoints[k], breakpoints[k+1]). The horizon is half-open.
class RateProfile {
 public:
  RateProfile() = default;
  RateProfile(std::vector<double> breakpoints, std::vector<double> values);

  static RateProfile constant(double value, double t_start, double t_end);

  double t_start() const { return breakpoints_.front(); }
  double t_end() const { return breakpoints_.back(); }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  // Value of the interval containing t. Throws OutOfRangeError outside
  // [t_start, t_end).
  double at(double t) const;

  // Like at(), but for t >= t_end the last interval's value is held.
  double hold(double t) const;

  // Integral over [a, b], holding the last value beyond t_end.
  double integral(double a, double b) const;
  double average(double a, double b) const;
  double peak(double a, double b) const;

  RateProfile scaled(double factor) const;

  friend bool operator==(const RateProfile&, const RateProfile&) = default;

 private:
  std::size_t interval_of(double t) const;

  std::vector<double> breakpoints_{0.0, 1.0};
  std::vector<double> values_{0.0};
};

struct ModeStreams {
  RateProfile taxi;
  RateProfile bus;
  RateProfile subway;
  ShareVector shares;

  const RateProfile& operator[](Mode m) const;
};

ModeStreams split_streams(const RateProfile& total, const ShareVector& shares);

struct Flight {
  double time = 0.0;        // minutes
  double passengers = 0.0;
};

// Spreads each flight's passengers uniformly over
// [time, time + spread_window] and accumulates the intensity into bins of
// bin_width aligned to multiples of bin_width. `cover`, when given, is
// included in the binned range. No flights and no cover gives a single
// zero bin starting at 0.
RateProfile timetable_to_profile(std::span<const Flight> flights, double spread_window,
                                 double bin_width,
                                 std::optional<std::pair<double, double>> cover = std::nullopt);

// CSV with header `time_min,passengers`.
std::vector<Flight> read_timetable_csv(std::istream& in);
std::vector<Flight> read_timetable_csv_file(const std::string& path);

// CSV with header `t_start,t_end,rate`; intervals must be contiguous.
RateProfile read_profile_csv(std::istream& in);
RateProfile read_profile_csv_file(const std::string& path);
void write_profile_csv(std::ostream& out, const RateProfile& profile);

}  // namespace queuenet
