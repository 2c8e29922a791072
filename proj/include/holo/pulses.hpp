#pragma once

// Gaussian pulse schedules in scaled time s = t/T: amplitude
// peak * exp(-((s - center)/tau)^2), i.e. center offset a and width tau give
// real-time separation 2aT between the pair and standard deviation tau T/sqrt(2).

#include "holo/core.hpp"

namespace holo {

struct GaussianPulse {
  double peak = 0;    // >= 0
  double center = 0;  // scaled time
  double tau = 0.15;  // scaled width, > 0

  double at_scaled(double s) const {
    const double x = (s - center) / tau;
    return peak * std::exp(-x * x);
  }
};

struct PulseSchedule {
  double total_time = 0;  // T; evaluation truncated to t in [0, T]
  std::vector<std::pair<int, GaussianPulse>> pulses;  // (coupling id, pulse)

  void validate() const {
    if (total_time <= 0) throw std::invalid_argument("PulseSchedule: T must be > 0");
    for (const auto& [id, p] : pulses) {
      (void)id;
      if (p.peak < 0) throw std::invalid_argument("PulseSchedule: peak < 0");
      if (p.tau <= 0) throw std::invalid_argument("PulseSchedule: width <= 0");
    }
  }

  double amplitude(int coupling_id, double t) const {
    double v = 0;
    for (const auto& [id, p] : pulses)
      if (id == coupling_id) v += p.at_scaled(t / total_time);
    return v;
  }
};

// Counterintuitive pair: the pulse addressing the receiving coupling comes
// first (center 0.5 - a), the sending one second (0.5 + a). Flip a to get the
// intuitive ordering.
inline PulseSchedule counterintuitive_pair(double total_time, double peak, double a, double tau,
                                           int receiver_id, int sender_id) {
  PulseSchedule s;
  s.total_time = total_time;
  s.pulses = {{receiver_id, {peak, 0.5 - a, tau}}, {sender_id, {peak, 0.5 + a, tau}}};
  s.validate();
  return s;
}

// time averages over [0, T] used by the transfer-time windows
inline double schedule_average(const PulseSchedule& s,
                               const std::function<double(double, double)>& fn_of_two) {
  // fn_of_two(omega1, omega2) averaged uniformly in time; coupling ids 1, 2
  return integrate_adaptive(
             [&](double t) { return fn_of_two(s.amplitude(1, t), s.amplitude(2, t)); }, 0.0,
             s.total_time, 1e-10) /
         s.total_time;
}

}  // namespace holo
