#ifndef KSCAT_ERRORS_HPP
#define KSCAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kscat {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- linear-algebra / spectral-parameter failures -------------------------

class SingularResolvent : public Error {
public:
    explicit SingularResolvent(const std::string& what) : Error("SingularResolvent: " + what) {}
};

class SingularM : public Error {
public:
    explicit SingularM(const std::string& what) : Error("SingularM: " + what) {}
};

class SingularM_B1 : public Error {
public:
    explicit SingularM_B1(const std::string& what) : Error("SingularM_B1: " + what) {}
};

class SingularM_B0B2 : public Error {
public:
    explicit SingularM_B0B2(const std::string& what) : Error("SingularM_B0B2: " + what) {}
};

class SingularSigma : public Error {
public:
    explicit SingularSigma(const std::string& what) : Error("SingularSigma: " + what) {}
};

class SingularB0 : public Error {
public:
    explicit SingularB0(const std::string& what) : Error("SingularB0: " + what) {}
};

/// Lippmann-Schwinger factor (1 - R_z v) not invertible at the working tolerance.
class SingularLS : public Error {
public:
    explicit SingularLS(const std::string& what) : Error("SingularLS: " + what) {}
};

/// Interface operator of a continuum model not invertible; names the factor.
class SingularInterfaceOperator : public Error {
public:
    explicit SingularInterfaceOperator(const std::string& factor, const std::string& what)
        : Error("SingularInterfaceOperator[" + factor + "]: " + what), factor_(factor) {}
    const std::string& factor() const { return factor_; }

private:
    std::string factor_;
};

// --- geometry / evaluation -------------------------------------------------

class CoincidentPoints : public Error {
public:
    CoincidentPoints() : Error("CoincidentPoints: kernel evaluated at x == y") {}
};

class PointTooClose : public Error {
public:
    explicit PointTooClose(const std::string& what) : Error("PointTooClose: " + what) {}
};

class InvalidMesh : public Error {
public:
    explicit InvalidMesh(const std::string& what) : Error("InvalidMesh: " + what) {}
};

class InvalidSpectralParam : public Error {
public:
    explicit InvalidSpectralParam(const std::string& what) : Error("InvalidSpectralParam: " + what) {}
};

class InvalidSystem : public Error {
public:
    explicit InvalidSystem(const std::string& what) : Error("InvalidSystem: " + what) {}
};

// --- scattering post-processing ---------------------------------------------

class NotRadial : public Error {
public:
    explicit NotRadial(const std::string& what) : Error("NotRadial: " + what) {}
};

class StiffIntegration : public Error {
public:
    explicit StiffIntegration(const std::string& what) : Error("StiffIntegration: " + what) {}
};

// --- configuration ----------------------------------------------------------

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& field, const std::string& what)
        : Error("ConfigError[" + field + "]: " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& what) : Error("NumericalFailure: " + what) {}
};

} // namespace kscat

#endif
