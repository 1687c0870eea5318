#include "queuenet/rates.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "csv_util.hpp"
#include "queuenet/error.hpp"

namespace queuenet {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Taxi: return "taxi";
    case Mode::Bus: return "bus";
    case Mode::Subway: return "subway";
  }
  return "?";
}

double ShareVector::operator[](Mode m) const {
  return m == Mode::Taxi ? alpha : (m == Mode::Bus ? beta : gamma);
}

double& ShareVector::operator[](Mode m) {
  return m == Mode::Taxi ? alpha : (m == Mode::Bus ? beta : gamma);
}

void ShareVector::validate(double tol) const {
  for (Mode m : kModes) {
    double v = (*this)[m];
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(std::string("share for ") + mode_name(m) + " must be a finite value >= 0");
    }
  }
  if (std::abs(alpha + beta + gamma - 1.0) > tol) {
    throw ValidationError("shares must sum to 1");
  }
}

RateProfile::RateProfile(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty() || breakpoints_.size() != values_.size() + 1) {
    throw ValidationError("rate profile needs one value per interval");
  }
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    if (!std::isfinite(breakpoints_[k]) || !(breakpoints_[k] < breakpoints_[k + 1])) {
      throw ValidationError("rate profile breakpoints must be finite and strictly ascending");
    }
  }
  if (!std::isfinite(breakpoints_.back())) throw ValidationError("rate profile horizon must be finite");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("rate profile values must be finite and >= 0");
  }
}

RateProfile RateProfile::constant(double value, double t_start, double t_end) {
  return RateProfile({t_start, t_end}, {value});
}

std::size_t RateProfile::interval_of(double t) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double RateProfile::at(double t) const {
  if (!(t >= t_start() && t < t_end())) {
    throw OutOfRangeError("time " + std::to_string(t) + " outside rate profile horizon [" +
                          std::to_string(t_start()) + ", " + std::to_string(t_end()) + ")");
  }
  return values_[interval_of(t)];
}

double RateProfile::hold(double t) const {
  if (t >= t_end()) return values_.back();
  return at(t);
}

double RateProfile::integral(double a, double b) const {
  if (b < a) throw ValidationError("integral bounds reversed");
  if (a < t_start()) throw OutOfRangeError("integral starts before rate profile horizon");
  double total = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    double lo = std::max(a, breakpoints_[k]);
    double hi = std::min(b, breakpoints_[k + 1]);
    if (hi > lo) total += values_[k] * (hi - lo);
  }
  if (b > t_end()) total += values_.back() * (b - std::max(a, t_end()));
  return total;
}

double RateProfile::average(double a, double b) const {
  if (b <= a) return hold(a);
  return integral(a, b) / (b - a);
}

double RateProfile::peak(double a, double b) const {
  double best = hold(a);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (breakpoints_[k + 1] > a && breakpoints_[k] < b) best = std::max(best, values_[k]);
  }
  return best;
}

RateProfile RateProfile::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return RateProfile(breakpoints_, std::move(v));
}

const RateProfile& ModeStreams::operator[](Mode m) const {
  return m == Mode::Taxi ? taxi : (m == Mode::Bus ? bus : subway);
}

ModeStreams split_streams(const RateProfile& total, const ShareVector& shares) {
  shares.validate();
  return ModeStreams{total.scaled(shares.alpha), total.scaled(shares.beta),
                     total.scaled(shares.gamma), shares};
}

RateProfile timetable_to_profile(std::span<const Flight> flights, double spread_window,
                                 double bin_width, std::optional<std::pair<double, double>> cover) {
  if (!(spread_window > 0.0)) throw ValidationError("spread_window must be > 0");
  if (!(bin_width > 0.0)) throw ValidationError("bin_width must be > 0");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Flight& f : flights) {
    if (!std::isfinite(f.time)) throw ValidationError("flight time must be finite");
    if (!std::isfinite(f.passengers) || f.passengers < 0.0) {
      throw ValidationError("flight passenger count must be >= 0");
    }
    lo = std::min(lo, f.time);
    hi = std::max(hi, f.time + spread_window);
  }
  if (cover) {
    lo = std::min(lo, cover->first);
    hi = std::max(hi, cover->second);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = bin_width;
  }

  const long first = static_cast<long>(std::floor(lo / bin_width));
  long last = static_cast<long>(std::ceil(hi / bin_width));
  if (last <= first) last = first + 1;
  const std::size_t n = static_cast<std::size_t>(last - first);

  std::vector<double> breaks(n + 1);
  for (std::size_t k = 0; k <= n; ++k) breaks[k] = static_cast<double>(first + static_cast<long>(k)) * bin_width;
  std::vector<double> mass(n, 0.0);

  for (const Flight& f : flights) {
    if (f.passengers == 0.0) continue;
    const double density = f.passengers / spread_window;
    const double a = f.time;
    const double b = f.time + spread_window;
    auto k0 = static_cast<std::size_t>(std::max(0L, static_cast<long>(std::floor(a / bin_width)) - first));
    for (std::size_t k = k0; k < n && breaks[k] < b; ++k) {
      double overlap = std::min(b, breaks[k + 1]) - std::max(a, breaks[k]);
      if (overlap > 0.0) mass[k] += density * overlap;
    }
  }

  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = mass[k] / (breaks[k + 1] - breaks[k]);
  return RateProfile(std::move(breaks), std::move(values));
}

std::vector<Flight> read_timetable_csv(std::istream& in) {
  std::vector<std::string> storage;
  auto rows = detail::read_rows(in, "time_min,passengers", storage);
  std::vector<Flight> flights;
  flights.reserve(rows.size());
  for (const auto& [line, fields] : rows) {
    if (fields.size() != 2) throw ParseError("expected 2 fields", line);
    Flight f{detail::parse_double(fields[0], line, "time_min"),
             detail::parse_double(fields[1], line, "passengers")};
    if (f.passengers < 0.0) throw ParseError("field 'passengers': must be >= 0", line);
    flights.push_back(f);
  }
  return flights;
}

std::vector<Flight> read_timetable_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open timetable '" + path + "'");
  return read_timetable_csv(in);
}

RateProfile read_profile_csv(std::istream& in) {
  std::vector<std::string> storage;
  auto rows = detail::read_rows(in, "t_start,t_end,rate", storage);
  if (rows.empty()) throw ParseError("rate profile has no rows", 0);
  std::vector<double> breaks;
  std::vector<double> values;
  for (const auto& [line, fields] : rows) {
    if (fields.size() != 3) throw ParseError("expected 3 fields", line);
    double a = detail::parse_double(fields[0], line, "t_start");
    double b = detail::parse_double(fields[1], line, "t_end");
    double r = detail::parse_double(fields[2], line, "rate");
    if (breaks.empty()) {
      breaks.push_back(a);
    } else if (a != breaks.back()) {
      throw ParseError("intervals must be contiguous", line);
    }
    breaks.push_back(b);
    values.push_back(r);
  }
  return RateProfile(std::move(breaks), std::move(values));
}

RateProfile read_profile_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rate profile '" + path + "'");
  return read_profile_csv(in);
}

void write_profile_csv(std::ostream& out, const RateProfile& profile) {
  out << "t_start,t_end,rate\n";
  auto b = profile.breakpoints();
  auto v = profile.values();
  out << std::setprecision(17);
  for (std::size_t k = 0; k < v.size(); ++k) out << b[k] << ',' << b[k + 1] << ',' << v[k] << '\n';
}

}  // namespace queuenet
