#include "zeno/control_field.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace zeno {

namespace {

constexpr std::size_t kResyncInterval = 256;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void sample_shaped(const ShapedField& f, double t0, double h, std::size_t count, double* out,
                   std::size_t stride) {
  const auto& comps = f.components();
  const double center = 0.5 * f.final_time();
  const double inv_two_var = 1.0 / (2.0 * f.sigma() * f.sigma());
  const double q = std::exp(-2.0 * h * h * inv_two_var);

  // Phasors as separate (re, im) arrays; std::complex products carry NaN
  // recovery branches that dominate this loop.
  const std::size_t nc = comps.size();
  std::vector<double> pr(nc), pi(nc), rr(nc), ri(nc);
  for (std::size_t l = 0; l < nc; ++l) {
    rr[l] = std::cos(comps[l].frequency * h);
    ri[l] = std::sin(comps[l].frequency * h);
  }

  double env = 0.0;
  double ratio = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    if (m % kResyncInterval == 0) {
      const double t = t0 + static_cast<double>(m) * h;
      const double d = t - center;
      env = std::exp(-d * d * inv_two_var);
      ratio = std::exp(-(2.0 * d * h + h * h) * inv_two_var);
      for (std::size_t l = 0; l < nc; ++l) {
        const double arg = comps[l].frequency * t + comps[l].phase;
        pr[l] = comps[l].amplitude * std::cos(arg);
        pi[l] = comps[l].amplitude * std::sin(arg);
      }
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < nc; ++l) {
      sum += pr[l];
      const double re = pr[l] * rr[l] - pi[l] * ri[l];
      pi[l] = pr[l] * ri[l] + pi[l] * rr[l];
      pr[l] = re;
    }
    out[m * stride] = env * sum;
    env *= ratio;
    ratio *= q;
  }
}

void sample_rect(const RectangularField& f, double t0, double h, std::size_t count, double* out,
                 std::size_t stride) {
  const double rr = std::cos(f.carrier * h);
  const double ri = std::sin(f.carrier * h);
  double pr = 0.0;
  double pi = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    const double t = t0 + static_cast<double>(m) * h;
    if (m % kResyncInterval == 0) {
      pr = f.amplitude * std::cos(f.carrier * t);
      pi = f.amplitude * std::sin(f.carrier * t);
    }
    out[m * stride] = (t >= 0.0 && t <= f.final_time) ? pr : 0.0;
    const double re = pr * rr - pi * ri;
    pi = pr * ri + pi * rr;
    pr = re;
  }
}

}  // namespace

ShapedField::ShapedField(std::vector<FieldComponent> components, double final_time, double sigma)
    : components_(std::move(components)), final_time_(final_time), sigma_(sigma) {
  if (!(sigma_ > 0.0)) throw std::invalid_argument("ShapedField: sigma must be positive");
  for (auto& c : components_) {
    if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude)) {
      throw std::invalid_argument("ShapedField: amplitudes must be finite and non-negative");
    }
    c.phase = wrap_phase(c.phase);
  }
}

double ShapedField::envelope(double t) const {
  const double d = t - 0.5 * final_time_;
  return std::exp(-d * d / (2.0 * sigma_ * sigma_));
}

double wrap_phase(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

double evaluate(const Field& field, double t) {
  return std::visit(
      overloaded{
          [](const ZeroField&) { return 0.0; },
          [t](const ShapedField& f) {
            double sum = 0.0;
            for (const auto& c : f.components()) {
              sum += c.amplitude * std::cos(c.frequency * t + c.phase);
            }
            return f.envelope(t) * sum;
          },
          [t](const RectangularField& f) {
            return (t >= 0.0 && t <= f.final_time) ? f.amplitude * std::cos(f.carrier * t) : 0.0;
          },
      },
      field);
}

double fluence(const Field& field) {
  return std::visit(overloaded{
                        [](const ZeroField&) { return 0.0; },
                        [](const ShapedField& f) {
                          double s = 0.0;
                          for (const auto& c : f.components()) s += c.amplitude * c.amplitude;
                          return s;
                        },
                        [](const RectangularField& f) { return f.amplitude * f.amplitude; },
                    },
                    field);
}

double amplitude_sum(const Field& field) {
  return std::visit(overloaded{
                        [](const ZeroField&) { return 0.0; },
                        [](const ShapedField& f) {
                          double s = 0.0;
                          for (const auto& c : f.components()) s += c.amplitude;
                          return s;
                        },
                        [](const RectangularField& f) { return std::abs(f.amplitude); },
                    },
                    field);
}

bool is_zero(const Field& field) {
  return amplitude_sum(field) == 0.0;
}

bool is_finite(const Field& field) {
  return std::visit(overloaded{
                        [](const ZeroField&) { return true; },
                        [](const ShapedField& f) {
                          for (const auto& c : f.components()) {
                            if (!std::isfinite(c.amplitude) || !std::isfinite(c.frequency) ||
                                !std::isfinite(c.phase)) {
                              return false;
                            }
                          }
                          return std::isfinite(f.final_time()) && std::isfinite(f.sigma());
                        },
                        [](const RectangularField& f) {
                          return std::isfinite(f.amplitude) && std::isfinite(f.carrier) &&
                                 std::isfinite(f.final_time);
                        },
                    },
                    field);
}

void sample_uniform(const Field& field, double t0, double h, std::size_t count, double* out,
                    std::size_t stride) {
  std::visit(overloaded{
                 [&](const ZeroField&) {
                   for (std::size_t m = 0; m < count; ++m) out[m * stride] = 0.0;
                 },
                 [&](const ShapedField& f) { sample_shaped(f, t0, h, count, out, stride); },
                 [&](const RectangularField& f) { sample_rect(f, t0, h, count, out, stride); },
             },
             field);
}

std::vector<SpectralLine> power_spectrum(const Field& field) {
  std::vector<SpectralLine> lines;
  std::visit(overloaded{
                 [](const ZeroField&) {},
                 [&](const ShapedField& f) {
                   for (const auto& c : f.components()) {
                     lines.push_back({c.frequency, c.amplitude * c.amplitude});
                   }
                 },
                 [&](const RectangularField& f) {
                   lines.push_back({f.carrier, f.amplitude * f.amplitude});
                 },
             },
             field);
  return lines;
}

void write_field_csv(std::ostream& os, const Field& field, double t0, double t1, double dt) {
  if (!(dt > 0.0) || t1 < t0) throw std::invalid_argument("write_field_csv: bad time grid");
  os << "t,E\n";
  const auto count = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 0.5)) + 1;
  std::vector<double> samples(count);
  sample_uniform(field, t0, dt, count, samples.data());
  os.precision(10);
  for (std::size_t m = 0; m < count; ++m) {
    os << t0 + static_cast<double>(m) * dt << ',' << samples[m] << '\n';
  }
}

}  // namespace zeno
