#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slab {

enum class ErrorKind {
    NonPhysical,
    ZeroDamping,
    NonUniformGrid,
    EmptyInput,
    SourceOutsideRoom,
    NoOnset,
    LengthMismatch,
    InsufficientSamples,
    BadPair,
    DegenerateGrid,
    EmptyMap,
    NonPositiveDistance,
    SourceOnSensor,
    InvalidArgument,
    Config,
    Io,
};

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonPhysical: return "NonPhysical";
        case ErrorKind::ZeroDamping: return "ZeroDamping";
        case ErrorKind::NonUniformGrid: return "NonUniformGrid";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::SourceOutsideRoom: return "SourceOutsideRoom";
        case ErrorKind::NoOnset: return "NoOnset";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::InsufficientSamples: return "InsufficientSamples";
        case ErrorKind::BadPair: return "BadPair";
        case ErrorKind::DegenerateGrid: return "DegenerateGrid";
        case ErrorKind::EmptyMap: return "EmptyMap";
        case ErrorKind::NonPositiveDistance: return "NonPositiveDistance";
        case ErrorKind::SourceOnSensor: return "SourceOnSensor";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Non-fatal conditions (model validity limits). Callers that care pass a sink.
enum class WarningKind { LossFactorTooLarge, ShortDistance };

struct Warning {
    WarningKind kind;
    std::string message;
};

struct Diagnostics {
    std::vector<Warning> warnings;

    // Repeated identical warnings (one per image source, say) are kept once.
    void warn(WarningKind kind, std::string message) {
        for (const auto& w : warnings)
            if (w.kind == kind && w.message == message) return;
        warnings.push_back({kind, std::move(message)});
    }
    bool has(WarningKind kind) const {
        for (const auto& w : warnings)
            if (w.kind == kind) return true;
        return false;
    }
};

inline void warn(Diagnostics* diag, WarningKind kind, std::string message) {
    if (diag) diag->warn(kind, std::move(message));
}

}  // namespace slab
