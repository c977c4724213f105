#pragma once

#include <stdexcept>
#include <string>

namespace dst {

// Base for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DSTLAB_ERROR_TYPE(Name)                                        \
    struct Name : Error {                                              \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

DSTLAB_ERROR_TYPE(DegenerateLattice);
DSTLAB_ERROR_TYPE(GridMismatch);
DSTLAB_ERROR_TYPE(DomainError);
DSTLAB_ERROR_TYPE(NotConformal);
DSTLAB_ERROR_TYPE(GaussMapSingular);
DSTLAB_ERROR_TYPE(WindingObstruction);
DSTLAB_ERROR_TYPE(InadmissibleGauge);
DSTLAB_ERROR_TYPE(NonPeriodicProduct);
DSTLAB_ERROR_TYPE(NotClosed);
DSTLAB_ERROR_TYPE(DegenerateMetric);
DSTLAB_ERROR_TYPE(MnvRequiresReal);
DSTLAB_ERROR_TYPE(NumericalBlowup);
DSTLAB_ERROR_TYPE(CutoffTooLarge);
DSTLAB_ERROR_TYPE(NotOnCurve);
DSTLAB_ERROR_TYPE(ParseError);
DSTLAB_ERROR_TYPE(ValidationError);
DSTLAB_ERROR_TYPE(UnsupportedProjection);

#undef DSTLAB_ERROR_TYPE

} // namespace dst
