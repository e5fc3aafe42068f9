#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qso {

enum class Errc {
    EmptyComponent,
    DuplicateLabel,
    InvalidGenotype,
    ZeroMassOffspringSet,
    AsymmetricMeasure,
    MissingPair,
    DistributionOutsideHyperSimplex,
    NotOneToOne,
    ChildAsymmetry,
    DimensionMismatch,
    GenderAsymmetric,
    NoConvergence,
    AlphaOutOfRange,
    InvalidCoefficients,
    NonPositiveAlpha,
    BadSum,
    MissingParentPair,
    ZeroTotal,
    ParseError,
    SchemaError,
    InvariantViolation,
    InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace qso
