#pragma once

#include <stdexcept>
#include <string>

namespace cylbem {

/** \brief Base class for all library errors. */
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Model construction
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& m) : Error("ConfigError: " + m) {}
};
class ZeroPotential : public Error {
public:
  explicit ZeroPotential(const std::string& m) : Error("ZeroPotential: " + m) {}
};
class NegativePotential : public Error {
public:
  explicit NegativePotential(const std::string& m) : Error("NegativePotential: " + m) {}
};
class CurveIntersection : public Error {
public:
  explicit CurveIntersection(const std::string& m) : Error("CurveIntersection: " + m) {}
};

// Cross-section spectrum
class NonPositiveGroundState : public Error {
public:
  explicit NonPositiveGroundState(const std::string& m) : Error("NonPositiveGroundState: " + m) {}
};

// tau-family
class SolveFailure : public Error {
public:
  explicit SolveFailure(const std::string& m) : Error("SolveFailure: " + m) {}
};
class SingularFamily : public Error {
public:
  explicit SingularFamily(const std::string& m) : Error("SingularFamily: " + m) {}
};

// Green kernel
class CoincidentPoints : public Error {
public:
  explicit CoincidentPoints(const std::string& m) : Error("CoincidentPoints: " + m) {}
};

// Boundary handling
class TruncationTooShort : public Error {
public:
  explicit TruncationTooShort(const std::string& m) : Error("TruncationTooShort: " + m) {}
};
class IrregularCurve : public Error {
public:
  explicit IrregularCurve(const std::string& m) : Error("IrregularCurve: " + m) {}
};
class OffsetTooLarge : public Error {
public:
  explicit OffsetTooLarge(const std::string& m) : Error("OffsetTooLarge: " + m) {}
};

// Layer operators
class ExtrapolationUnstable : public Error {
public:
  explicit ExtrapolationUnstable(const std::string& m) : Error("ExtrapolationUnstable: " + m) {}
};
class TooCloseToBoundary : public Error {
public:
  explicit TooCloseToBoundary(const std::string& m) : Error("TooCloseToBoundary: " + m) {}
};

// Dirichlet solvers
class IllConditioned : public Error {
public:
  explicit IllConditioned(const std::string& m) : Error("IllConditioned: " + m) {}
};
class SourceTooClose : public Error {
public:
  explicit SourceTooClose(const std::string& m) : Error("SourceTooClose: " + m) {}
};

} // namespace cylbem
