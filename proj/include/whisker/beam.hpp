#pragma once

// Equivalent-cantilever model of the coil-spring whisker under sinusoidal
// base excitation y_b = h_b sin(w_b t).
//
// The response is a five-mode sum. Each mode contributes -A*B*C/D where
//   A  forcing amplitude with the modal decay envelope exp(-s_i t),
//   B  mode shape at the evaluation point,
//   C  mix of the transient oscillation and the steady term, carrying
//      exp(+s_i t) on its steady part,
//   D  modal normalization,
// and s_i = D_i^2 zeta sqrt(EI / (a rho)) / l^2 is the modal decay rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "whisker/errors.hpp"
#include "whisker/fft.hpp"

namespace whisker {

inline constexpr std::size_t kModeCount = 5;

/// Roots of the clamped-free characteristic equation for the first five modes.
inline constexpr std::array<double, kModeCount> kCantileverModeConstants = {
    1.8751, 4.6941, 7.8548, 10.9955, 14.137};

inline constexpr double kDefaultModalDamping = 0.04;

/// Physical coil spring. Defaults are the whisker spring: 60 mm free length,
/// 1 mm wire, 10/8 mm outer/inner diameter, 13 coils, stainless wire.
struct SpringSpec {
  double free_length = 60e-3;     // m
  double wire_radius = 0.5e-3;    // m
  double outer_diameter = 10e-3;  // m
  double inner_diameter = 8e-3;   // m
  int coil_count = 13;
  double wire_density = 8050.0;   // kg/m^3
  double shear_modulus = 70e9;    // Pa

  void validate() const {
    if (!(free_length > 0.0) || !(wire_radius > 0.0) || !(outer_diameter > 0.0) ||
        !(inner_diameter > 0.0) || !(wire_density > 0.0) || !(shear_modulus > 0.0)) {
      throw PhysicsError("SpringSpec: lengths, density and modulus must be positive");
    }
    if (!(inner_diameter < outer_diameter)) {
      throw PhysicsError("SpringSpec: inner_diameter must be smaller than outer_diameter");
    }
    if (coil_count < 1) throw PhysicsError("SpringSpec: coil_count must be >= 1");
  }

  double pitch() const { return free_length / coil_count; }
  double mean_coil_radius() const { return (outer_diameter + inner_diameter) / 4.0; }
  double wire_length() const {
    const double circumference = 2.0 * std::numbers::pi * mean_coil_radius();
    const double p = pitch();
    return coil_count * std::sqrt(circumference * circumference + p * p);
  }
  /// l_w / (n p): how much longer the wire is than the spring's axis.
  double coil_correction() const { return wire_length() / (coil_count * pitch()); }
};

struct BeamSpec {
  double length = 0.0;             // l, m
  double area = 0.0;               // a, m^2
  double density = 0.0;            // rho, kg/m^3 (coil-corrected)
  double bending_modulus = 0.0;    // EI, N m^2
  double modal_damping = kDefaultModalDamping;
  std::array<double, kModeCount> mode_constants = kCantileverModeConstants;

  void validate() const {
    if (!(length > 0.0) || !(area > 0.0) || !(density > 0.0) || !(bending_modulus > 0.0)) {
      throw PhysicsError("BeamSpec: length, area, density and EI must be positive");
    }
    if (!(modal_damping > 0.0)) throw PhysicsError("BeamSpec: modal damping must be > 0");
    if (!(modal_damping < 1.0)) {
      throw PhysicsError("BeamSpec: modal damping must be < 1 (underdamped modes only)");
    }
  }

  /// sqrt(EI / (a rho)), m^2/s.
  double wave_coefficient() const { return std::sqrt(bending_modulus / (area * density)); }

  double decay_rate(std::size_t mode) const {
    const double d = mode_constants[mode];
    return d * d * modal_damping * wave_coefficient() / (length * length);
  }

  double damped_frequency(std::size_t mode) const {
    const double d = mode_constants[mode];
    return d * d * std::sqrt(1.0 - modal_damping * modal_damping) * wave_coefficient() /
           (length * length);
  }

  /// Slowest modal time constant, 1 / decay_rate(0).
  double slowest_time_constant() const { return 1.0 / decay_rate(0); }
};

inline BeamSpec spring_to_beam(const SpringSpec& spring) {
  spring.validate();
  BeamSpec beam;
  beam.length = spring.free_length;
  beam.area = std::numbers::pi * spring.wire_radius * spring.wire_radius;
  beam.density = spring.coil_correction() * spring.wire_density;
  const double r2 = spring.wire_radius * spring.wire_radius;
  beam.bending_modulus = spring.shear_modulus * std::numbers::pi * r2 * r2 / 4.0;
  return beam;
}

struct Excitation {
  double amplitude = 0.0;  // h_b, m
  double frequency = 0.0;  // f_b, Hz

  double angular_frequency() const { return 2.0 * std::numbers::pi * frequency; }

  void validate() const {
    if (!(amplitude >= 0.0)) throw PhysicsError("Excitation: amplitude must be >= 0");
    if (!(frequency > 0.0)) throw PhysicsError("Excitation: frequency must be > 0");
  }
};

struct TimeSeries {
  std::vector<double> samples;
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s

  double time_at(std::size_t i) const { return start_time + static_cast<double>(i) / sample_rate; }
};

// Individual factors of one modal term, as grouped in the closed-form
// response. Exposed so each can be checked against a scalar reference.
namespace modal {

inline double factor_a(const BeamSpec& beam, const Excitation& exc, std::size_t mode, double t) {
  const double d = beam.mode_constants[mode];
  const double wb = exc.angular_frequency();
  const double l2 = beam.length * beam.length;
  return 2.0 * beam.area * exc.amplitude * l2 * l2 * wb * wb * beam.density *
         std::exp(-beam.decay_rate(mode) * t) * std::sin(wb * t) * (std::cos(d) - 1.0) *
         (std::cosh(d) - 1.0) * (std::cos(d) + std::cosh(d));
}

// Mode shape written so that no term exceeds e^(u - d); used when cosh(d)
// would otherwise produce magnitudes large enough to lose the cancellation
// between sinh(u) and cosh(u) R.
inline double mode_shape_stable(double u, double d) {
  const double e_md = std::exp(-d);
  const double denom = std::cos(d) + std::cosh(d);
  // 1 - R and 1 + R with R = (sin d + sinh d) / (cos d + cosh d)
  const double one_minus_r = (std::cos(d) - std::sin(d) + e_md) / denom;
  const double one_plus_r = (std::cos(d) + std::sin(d) + 2.0 * std::cosh(d) - e_md) / denom;
  const double r = 1.0 - one_minus_r;
  const double hyperbolic = 0.5 * (std::exp(u) * one_minus_r - std::exp(-u) * one_plus_r);
  return hyperbolic - std::sin(u) + r * std::cos(u);
}

inline double mode_shape(double u, double d) {
  if (std::cosh(d) > 1e12) return mode_shape_stable(u, d);
  const double r = (std::sin(d) + std::sinh(d)) / (std::cos(d) + std::cosh(d));
  return std::sinh(u) - std::sin(u) + (std::cos(u) - std::cosh(u)) * r;
}

inline double factor_b(const BeamSpec& beam, std::size_t mode, double x) {
  const double d = beam.mode_constants[mode];
  return mode_shape(d * x / beam.length, d);
}

// Printed form. The steady part carries exp(+s t), which overflows once
// s_5 t exceeds ~709 (t > ~1.08 s for the default beam); displacement()
// therefore evaluates A*C with the two exponentials cancelled.
inline double factor_c(const BeamSpec& beam, std::size_t mode, double t) {
  const double z = beam.modal_damping;
  const double root = std::sqrt(1.0 - z * z);
  const double wd = beam.damped_frequency(mode);
  return z * std::sin(wd * t) - std::exp(beam.decay_rate(mode) * t) * root +
         std::cos(wd * t) * root;
}

inline double factor_d(const BeamSpec& beam, std::size_t mode) {
  const double d = beam.mode_constants[mode];
  const double z = beam.modal_damping;
  const double c = std::cos(d), s = std::sin(d), ch = std::cosh(d), sh = std::sinh(d);
  const double bracket = 3.0 * sh * c * c * ch - d * c * c - 3.0 * s * c * ch * ch + 3.0 * sh * c +
                         d * ch * ch - 3.0 * s * ch + 2.0 * d * s * sh;
  return d * d * d * d * beam.bending_modulus * std::sqrt(1.0 - z * z) * bracket;
}

}  // namespace modal

/// Evaluates the five-mode response for one beam/excitation pair. Holds the
/// time-independent per-mode constants so series evaluation does not redo
/// them; displacement() and displacement_series() share this path.
class ModalResponse {
 public:
  ModalResponse(const BeamSpec& beam, const Excitation& exc) : beam_(beam), exc_(exc) {
    beam_.validate();
    exc_.validate();
    const double l2 = beam_.length * beam_.length;
    const double wb = exc_.angular_frequency();
    root_ = std::sqrt(1.0 - beam_.modal_damping * beam_.modal_damping);
    for (std::size_t i = 0; i < kModeCount; ++i) {
      const double d = beam_.mode_constants[i];
      // A without its exp(-s t) sin(w_b t) factors.
      amplitude_[i] = 2.0 * beam_.area * exc_.amplitude * l2 * l2 * wb * wb * beam_.density *
                      (std::cos(d) - 1.0) * (std::cosh(d) - 1.0) * (std::cos(d) + std::cosh(d));
      normalization_[i] = modal::factor_d(beam_, i);
      decay_[i] = beam_.decay_rate(i);
      damped_[i] = beam_.damped_frequency(i);
    }
  }

  const BeamSpec& beam() const { return beam_; }
  const Excitation& excitation() const { return exc_; }

  /// Contribution of a single mode at (x, t).
  double mode_term(std::size_t mode, double x, double t) const {
    check_domain(x, t);
    return term(mode, modal::factor_b(beam_, mode, x), t);
  }

  double operator()(double x, double t) const {
    check_domain(x, t);
    double y = 0.0;
    for (std::size_t i = 0; i < kModeCount; ++i) y += term(i, modal::factor_b(beam_, i, x), t);
    return y;
  }

  /// Evaluates at each time for a fixed position (mode shapes computed once).
  std::vector<double> at_times(double x, std::span<const double> times) const {
    check_domain(x, 0.0);
    std::array<double, kModeCount> shape{};
    for (std::size_t i = 0; i < kModeCount; ++i) shape[i] = modal::factor_b(beam_, i, x);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
      if (!(t >= 0.0)) throw PhysicsError("displacement: t must be >= 0");
      double y = 0.0;
      for (std::size_t i = 0; i < kModeCount; ++i) y += term(i, shape[i], t);
      out.push_back(y);
    }
    return out;
  }

 private:
  void check_domain(double x, double t) const {
    if (!(x >= 0.0 && x <= beam_.length)) {
      std::ostringstream msg;
      msg << "displacement: x = " << x << " outside [0, " << beam_.length << "]";
      throw PhysicsError(msg.str());
    }
    if (!(t >= 0.0)) throw PhysicsError("displacement: t must be >= 0");
  }

  // -A*B*C/D with A = amp exp(-s t) sin(w_b t) and
  // C = zeta sin(w_d t) - exp(s t) root + cos(w_d t) root, so that
  // A*C = amp sin(w_b t) [exp(-s t)(zeta sin(w_d t) + root cos(w_d t)) - root].
  double term(std::size_t i, double shape, double t) const {
    const double z = beam_.modal_damping;
    const double transient =
        std::exp(-decay_[i] * t) * (z * std::sin(damped_[i] * t) + root_ * std::cos(damped_[i] * t));
    const double ac = amplitude_[i] * std::sin(exc_.angular_frequency() * t) * (transient - root_);
    return -(ac * shape) / normalization_[i];
  }

  BeamSpec beam_;
  Excitation exc_;
  double root_ = 1.0;
  std::array<double, kModeCount> amplitude_{};
  std::array<double, kModeCount> normalization_{};
  std::array<double, kModeCount> decay_{};
  std::array<double, kModeCount> damped_{};
};

inline double displacement(const BeamSpec& beam, const Excitation& exc, double x, double t) {
  return ModalResponse(beam, exc)(x, t);
}

/// Start time after which every modal transient has decayed by
/// exp(-time_constants) or more.
inline double steady_state_start(const BeamSpec& beam, double time_constants = 20.0) {
  return time_constants * beam.slowest_time_constant();
}

inline std::size_t sample_count(double sample_rate, double duration) {
  return static_cast<std::size_t>(std::llround(sample_rate * duration));
}

inline TimeSeries displacement_series(const BeamSpec& beam, const Excitation& exc, double x_s,
                                      double sample_rate, double duration, double t0 = 0.0) {
  if (!(duration > 0.0)) throw PhysicsError("displacement_series: duration must be > 0");
  if (!(sample_rate > 0.0)) throw PhysicsError("displacement_series: sample_rate must be > 0");
  if (!(t0 >= 0.0)) throw PhysicsError("displacement_series: t0 must be >= 0");
  if (!(sample_rate > 2.0 * exc.frequency)) {
    std::ostringstream msg;
    msg << "displacement_series: sample rate " << sample_rate << " Hz does not exceed twice f_b = "
        << exc.frequency << " Hz";
    throw PhysicsError(msg.str());
  }
  const std::size_t n = sample_count(sample_rate, duration);
  if (n == 0) throw PhysicsError("displacement_series: duration shorter than one sample");

  TimeSeries series;
  series.sample_rate = sample_rate;
  series.start_time = t0;
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = series.time_at(i);
  series.samples = ModalResponse(beam, exc).at_times(x_s, times);
  return series;
}

/// Peak displacement and dominant frequency over an (f_b, h_b) grid.
/// Matrices are indexed [f_b index][h_b index].
struct SweepSurface {
  std::vector<double> frequencies;  // Hz
  std::vector<double> amplitudes;   // m
  std::vector<std::vector<double>> y_max;
  std::vector<std::vector<double>> f_dominant;
  double bin_width = 0.0;  // Hz, resolution of f_dominant
};

inline SweepSurface modal_sweep(const BeamSpec& beam, const std::vector<double>& f_b_grid,
                                const std::vector<double>& h_b_grid, double x_s,
                                double sample_rate, double duration,
                                double t0 = -1.0) {
  if (f_b_grid.empty() || h_b_grid.empty()) throw ConfigError("modal_sweep: empty grid");
  if (t0 < 0.0) t0 = steady_state_start(beam);

  SweepSurface surface;
  surface.frequencies = f_b_grid;
  surface.amplitudes = h_b_grid;
  surface.y_max.assign(f_b_grid.size(), std::vector<double>(h_b_grid.size()));
  surface.f_dominant.assign(f_b_grid.size(), std::vector<double>(h_b_grid.size()));
  for (std::size_t fi = 0; fi < f_b_grid.size(); ++fi) {
    for (std::size_t hi = 0; hi < h_b_grid.size(); ++hi) {
      const Excitation exc{h_b_grid[hi], f_b_grid[fi]};
      const TimeSeries ys = displacement_series(beam, exc, x_s, sample_rate, duration, t0);
      double peak = 0.0;
      for (double v : ys.samples) peak = std::max(peak, std::abs(v));
      surface.y_max[fi][hi] = peak;
      const Spectrum spec = fft_magnitude(ys.samples, sample_rate);
      surface.f_dominant[fi][hi] = dominant_frequency(spec);
      surface.bin_width = spec.bin_width;
    }
  }
  return surface;
}

/// CSV with header f_b_hz,h_b_m,y_max_m,f_dom_hz, row-major over f_b.
inline void write_sweep_csv(std::ostream& os, const SweepSurface& surface) {
  os << "f_b_hz,h_b_m,y_max_m,f_dom_hz\n";
  os.precision(17);
  for (std::size_t fi = 0; fi < surface.frequencies.size(); ++fi) {
    for (std::size_t hi = 0; hi < surface.amplitudes.size(); ++hi) {
      os << surface.frequencies[fi] << ',' << surface.amplitudes[hi] << ','
         << surface.y_max[fi][hi] << ',' << surface.f_dominant[fi][hi] << '\n';
    }
  }
}

}  // namespace whisker
