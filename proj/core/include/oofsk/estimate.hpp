#ifndef OOFSK_ESTIMATE_HPP
#define OOFSK_ESTIMATE_HPP

#include <string_view>

namespace oofsk {

enum class Method { kMc, kQuadrature, kClosedForm };

constexpr std::string_view to_string(Method m) {
  switch (m) {
    case Method::kMc: return "mc";
    case Method::kQuadrature: return "quadrature";
    case Method::kClosedForm: return "closed-form";
  }
  return "?";
}

/// A numeric result with its statistical uncertainty. std_error is zero
/// for deterministic methods (quadrature, closed form).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::kClosedForm;

  static Estimate closed_form(double v) { return {v, 0.0, Method::kClosedForm}; }
  static Estimate quadrature(double v) { return {v, 0.0, Method::kQuadrature}; }
  static Estimate mc(double v, double se) { return {v, se, Method::kMc}; }
};

}  // namespace oofsk

#endif  // OOFSK_ESTIMATE_HPP
