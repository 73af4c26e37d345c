#pragma once

#include <stdexcept>
#include <string>

namespace bcc {

enum class Errc {
    MixedDimension,
    UnsupportedDimension,
    EmptyOperand,
    WeightMismatch,
    TooFewPoints,
    EmptyPolytope,
    DuplicateBroadcast,
    NotReady,
    NoPendingDeliveries,
    DeadlockDetected,
    ConfigInvalid,
    IncompleteTrace,
    NotStochastic,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace bcc
