#pragma once

#include <stdexcept>
#include <string>

namespace evlnoise {

// Base for every library failure; callers that only care about "something
// went wrong in the model" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EVLNOISE_DEFINE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  };

EVLNOISE_DEFINE_ERROR(DomainViolation)
EVLNOISE_DEFINE_ERROR(NonConvergent)
EVLNOISE_DEFINE_ERROR(InfiniteObservable)
EVLNOISE_DEFINE_ERROR(EmptyBlocks)
EVLNOISE_DEFINE_ERROR(DegenerateSample)
EVLNOISE_DEFINE_ERROR(FitDiverged)
EVLNOISE_DEFINE_ERROR(ZeroMeasure)
EVLNOISE_DEFINE_ERROR(InsufficientPoints)
EVLNOISE_DEFINE_ERROR(NoSignal)
EVLNOISE_DEFINE_ERROR(ConfigError)
EVLNOISE_DEFINE_ERROR(PreconditionError)

#undef EVLNOISE_DEFINE_ERROR

}  // namespace evlnoise
