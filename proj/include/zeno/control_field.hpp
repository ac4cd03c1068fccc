#pragma once

// The two control-field families: a Gaussian-windowed sum of resonant
// cosines, and a rectangular resonant pulse.

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

namespace zeno {

struct FieldComponent {
  double amplitude = 0.0;  // >= 0
  double frequency = 0.0;  // rad/fs
  double phase = 0.0;      // rad, kept in [0, 2pi)
};

/// E(t) = s(t) sum_l A_l cos(w_l t + theta_l),  s(t) = exp(-(t - T/2)^2 / 2 sigma^2)
class ShapedField {
 public:
  ShapedField(std::vector<FieldComponent> components, double final_time, double sigma);

  const std::vector<FieldComponent>& components() const { return components_; }
  double final_time() const { return final_time_; }
  double sigma() const { return sigma_; }
  double envelope(double t) const;

 private:
  std::vector<FieldComponent> components_;
  double final_time_;
  double sigma_;
};

/// E(t) = A cos(carrier t) on [0, T], zero elsewhere.
struct RectangularField {
  double amplitude = 0.0;
  double carrier = 1.0;
  double final_time = 0.0;
};

struct ZeroField {};

using Field = std::variant<ZeroField, ShapedField, RectangularField>;

double wrap_phase(double theta);

double evaluate(const Field& field, double t);

/// Sum of squared amplitudes.
double fluence(const Field& field);

/// Upper bound on |E(t)|.
double amplitude_sum(const Field& field);

bool is_zero(const Field& field);

/// False if any parameter is NaN or infinite.
bool is_finite(const Field& field);

/// Writes E at t0 + m h for m = 0 .. count-1 into out[m * stride]; h may be
/// negative. Uses phasor recurrences resynchronised every few hundred
/// samples, which agrees with evaluate() to ~1e-13 relative while avoiding
/// per-sample cos/exp.
void sample_uniform(const Field& field, double t0, double h, std::size_t count, double* out,
                    std::size_t stride = 1);

struct SpectralLine {
  double frequency;
  double power;  // A_l^2
};

std::vector<SpectralLine> power_spectrum(const Field& field);

/// CSV with header "t,E".
void write_field_csv(std::ostream& os, const Field& field, double t0, double t1, double dt);

}  // namespace zeno
