#pragma once

#include <stdexcept>
#include <string>

namespace freeprod {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FREEPROD_ERROR(Name)                         \
    struct Name : Error {                            \
        explicit Name(const std::string& msg)        \
            : Error(std::string(#Name ": ") + msg) {} \
    }

FREEPROD_ERROR(NotDensityMatrix);
FREEPROD_ERROR(NotFaithful);
FREEPROD_ERROR(DimensionMismatch);
FREEPROD_ERROR(TruncationTooSmall);
FREEPROD_ERROR(FamilyMismatch);
FREEPROD_ERROR(NotStatePreserving);
FREEPROD_ERROR(BadParameter);
FREEPROD_ERROR(NotHomogeneous);
FREEPROD_ERROR(DegreeOutOfRange);
FREEPROD_ERROR(NotUnimodular);
FREEPROD_ERROR(CapacityExceeded);
FREEPROD_ERROR(NoConvergence);
FREEPROD_ERROR(ConfigError);
FREEPROD_ERROR(PreconditionViolated);
FREEPROD_ERROR(AssertionFailed);
FREEPROD_ERROR(BadSpec);

#undef FREEPROD_ERROR

}  // namespace freeprod
