#pragma once

#include <stdexcept>
#include <string>

namespace ergodic {

// Error taxonomy shared by the tower, map and estimator layers.  Each
// condition gets its own type so callers (and the CLI exit-code mapping)
// can react without string matching.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define ERGODIC_DEFINE_ERROR(Name)                                    \
    struct Name : Error {                                             \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

ERGODIC_DEFINE_ERROR(OverlappingBranches);
ERGODIC_DEFINE_ERROR(NonSurjectiveBranch);
ERGODIC_DEFINE_ERROR(MassLeak);
ERGODIC_DEFINE_ERROR(GridMismatch);
ERGODIC_DEFINE_ERROR(NoConvergence);
ERGODIC_DEFINE_ERROR(BoundViolation);
ERGODIC_DEFINE_ERROR(NonpositiveJacobian);
ERGODIC_DEFINE_ERROR(PointOutsideStructure);
ERGODIC_DEFINE_ERROR(OrbitEscapesStructure);
ERGODIC_DEFINE_ERROR(OrbitDiverged);
ERGODIC_DEFINE_ERROR(CriticalPoint);
ERGODIC_DEFINE_ERROR(NoRealFixedPoint);
ERGODIC_DEFINE_ERROR(DegenerateTangent);
ERGODIC_DEFINE_ERROR(TowerMapMismatch);
ERGODIC_DEFINE_ERROR(NonMarkovBase);
ERGODIC_DEFINE_ERROR(IncompatibleSupports);
ERGODIC_DEFINE_ERROR(BaseMismatch);
ERGODIC_DEFINE_ERROR(UnknownKey);
ERGODIC_DEFINE_ERROR(OutOfRange);
ERGODIC_DEFINE_ERROR(MissingFile);

#undef ERGODIC_DEFINE_ERROR

} // namespace ergodic
