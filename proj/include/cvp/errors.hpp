#pragma once

#include <stdexcept>
#include <string>

namespace cvp {

// Base for all library errors. User-input style failures derive from
// invalid_argument semantics but we keep a single hierarchy so callers
// can catch cvp::error at the CLI boundary.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CVP_DEFINE_ERROR(Name)                                          \
    class Name : public error {                                         \
    public:                                                             \
        explicit Name(const std::string& msg = #Name) : error(msg) {}   \
    }

CVP_DEFINE_ERROR(NotCollinear);
CVP_DEFINE_ERROR(DegenerateConfiguration);
CVP_DEFINE_ERROR(EigenFailure);
CVP_DEFINE_ERROR(NotProximal);
CVP_DEFINE_ERROR(InKernel);
CVP_DEFINE_ERROR(ZeroComposite);
CVP_DEFINE_ERROR(NoConvergence);
CVP_DEFINE_ERROR(NotConverged);
CVP_DEFINE_ERROR(RankTooHigh);
CVP_DEFINE_ERROR(NotTransverse);
CVP_DEFINE_ERROR(ChartOverflow);
CVP_DEFINE_ERROR(NotInterior);
CVP_DEFINE_ERROR(NotBoundary);
CVP_DEFINE_ERROR(CoincidentPoints);
CVP_DEFINE_ERROR(NotAutomorphism);
CVP_DEFINE_ERROR(NotVertexFixing);
CVP_DEFINE_ERROR(HypothesisViolated);
CVP_DEFINE_ERROR(EmptyCatalog);
CVP_DEFINE_ERROR(InvalidDomain);

#undef CVP_DEFINE_ERROR

} // namespace cvp
