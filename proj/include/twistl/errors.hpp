#pragma once

#include <stdexcept>
#include <string>

namespace twistl {

struct NonUnimodular : std::runtime_error {
    explicit NonUnimodular(const std::string& w) : std::runtime_error(w) {}
};
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& w) : std::runtime_error(w) {}
};
struct OrderTooHigh : std::runtime_error {
    explicit OrderTooHigh(const std::string& w) : std::runtime_error(w) {}
};
struct InsufficientCoefficients : std::runtime_error {
    explicit InsufficientCoefficients(const std::string& w) : std::runtime_error(w) {}
};
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& w) : std::runtime_error(w) {}
};
struct MissingSpectralParameter : std::runtime_error {
    explicit MissingSpectralParameter(const std::string& w) : std::runtime_error(w) {}
};
struct InvalidLabel : std::runtime_error {
    explicit InvalidLabel(const std::string& w) : std::runtime_error(w) {}
};
struct InvalidSplit : std::runtime_error {
    explicit InvalidSplit(const std::string& w) : std::runtime_error(w) {}
};
struct NonFactorable : std::runtime_error {
    explicit NonFactorable(const std::string& w) : std::runtime_error(w) {}
};
struct NonInvertibleResidue : std::runtime_error {
    explicit NonInvertibleResidue(const std::string& w) : std::runtime_error(w) {}
};
struct InvalidIndex : std::runtime_error {
    explicit InvalidIndex(const std::string& w) : std::runtime_error(w) {}
};
struct TooFar : std::runtime_error {
    explicit TooFar(const std::string& w) : std::runtime_error(w) {}
};
struct MissingOrder : std::runtime_error {
    explicit MissingOrder(const std::string& w) : std::runtime_error(w) {}
};
struct NonPrimitiveCharacter : std::runtime_error {
    explicit NonPrimitiveCharacter(const std::string& w) : std::runtime_error(w) {}
};
struct GammaPole : std::runtime_error {
    explicit GammaPole(const std::string& w) : std::runtime_error(w) {}
};
struct TooLarge : std::runtime_error {
    explicit TooLarge(const std::string& w) : std::runtime_error(w) {}
};
struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& w) : std::runtime_error(w) {}
};
struct ToleranceExceeded : std::runtime_error {
    explicit ToleranceExceeded(const std::string& w) : std::runtime_error(w) {}
};

}  // namespace twistl
