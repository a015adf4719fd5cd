#pragma once

#include <stdexcept>
#include <string>

namespace breather {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A medium fails its exact rationality condition.
class NotAdmissible : public Error { public: using Error::Error; };

/// A mode index lies outside the admissible index lattice of the medium.
class BadIndex : public Error { public: using Error::Error; };

/// |tr A| <= 2: zero is not in a spectral gap for this harmonic.
class NoSpectralGap : public Error { public: using Error::Error; };

/// No slope of the requested sign exists on the supported index range.
class SignConditionFailed : public Error { public: using Error::Error; };

/// Seed harmonic has slope0/gamma >= 0, so the scalar seed problem has no
/// negative minimum.
class WrongSign : public Error { public: using Error::Error; };

/// Sequence support escapes the truncation or symmetry lattice of a spec.
class SupportViolation : public Error { public: using Error::Error; };

/// Field assembly requested a harmonic with no mode profile.
class MissingProfile : public Error { public: using Error::Error; };

/// A mode profile violates its certified exponential envelope.
class DecayViolation : public Error { public: using Error::Error; };

/// Field tail is numerically zero; no decay rate can be fitted.
class TailUnderflow : public Error { public: using Error::Error; };

/// Panel refinement failed to stabilize an integral to 3 significant digits.
class QuadratureNonConvergence : public Error { public: using Error::Error; };

/// Invalid run configuration (bad file, bad key, violated precondition).
class ConfigError : public Error { public: using Error::Error; };

} // namespace breather
