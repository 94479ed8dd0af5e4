#pragma once

// Function names accepted by `qspec apply --fn`:
//
//   id          p
//   const:c     the real constant c
//   re          Re p
//   immag       the imaginary part i v of p = u + i v
//   sq          p^2
//   sqrt        principal square root (undefined on the negative real axis)
//   exp_re      exp(Re p)
//   exp         exp(p)
//   norm2       |p|^2
//   inv         1/p (infinite at 0)
//   chi:k       indicator of the k-th atom of the spectral measure (0-based)

#include <cstddef>
#include <optional>
#include <string>

#include "qspec/errors.hpp"
#include "qspec/functional_calculus.hpp"

namespace qspec {

struct NamedFunction {
  std::optional<SliceFunction> function;  ///< set for everything except chi:k
  std::optional<std::size_t> indicator_atom;
};

inline NamedFunction parse_named_function(const std::string& name) {
  const auto number_after = [&](std::size_t prefix) -> std::string {
    const std::string rest = name.substr(prefix);
    if (rest.empty()) throw ParseError("function '" + name + "' needs an argument");
    return rest;
  };
  if (name == "id") return {slice::identity(), {}};
  if (name == "re") return {slice::real_part(), {}};
  if (name == "immag") return {slice::imag_part(), {}};
  if (name == "sq") return {slice::square(), {}};
  if (name == "sqrt") return {slice::sqrt(), {}};
  if (name == "exp_re") return {slice::exp_re(), {}};
  if (name == "exp") return {slice::exp(), {}};
  if (name == "norm2") return {slice::norm2(), {}};
  if (name == "inv") return {slice::inv(), {}};
  try {
    if (name.rfind("const:", 0) == 0) {
      const std::string arg = number_after(6);
      std::size_t used = 0;
      const double c = std::stod(arg, &used);
      if (used != arg.size()) throw ParseError("bad constant in '" + name + "'");
      return {slice::constant(c), {}};
    }
    if (name.rfind("chi:", 0) == 0) {
      const std::string arg = number_after(4);
      std::size_t used = 0;
      const unsigned long k = std::stoul(arg, &used);
      if (used != arg.size() || arg.front() == '-') throw ParseError("bad atom index in '" + name + "'");
      return {{}, static_cast<std::size_t>(k)};
    }
  } catch (const std::logic_error&) {
    throw ParseError("bad argument in function '" + name + "'");
  }
  throw ParseError("unknown function '" + name + "'");
}

/// f(T) through the spectral measure. DomainError when f is not finite at an atom or the
/// indicator index is out of range.
inline QMatrix apply_named(const SpectralMeasure& e, const NamedFunction& f) {
  if (f.indicator_atom) return calc_simple(e, SimpleFunction::indicator(*f.indicator_atom));
  return calc_continuous(e, *f.function);
}

}  // namespace qspec
