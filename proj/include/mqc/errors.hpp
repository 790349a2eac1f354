#pragma once

#include <stdexcept>
#include <string>

namespace mqc {

// Base for every error raised by the library. Each subclass maps to one
// failure category of the public operations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MQC_DEFINE_ERROR(Name)             \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

MQC_DEFINE_ERROR(SizeError);          // spin count out of the supported range
MQC_DEFINE_ERROR(LabelError);         // (m, n, h) triple not in the basis
MQC_DEFINE_ERROR(IncompatibleError);  // operands live on different bases
MQC_DEFINE_ERROR(ParameterError);     // scalar parameter out of range
MQC_DEFINE_ERROR(SpecError);          // invalid cluster specification
MQC_DEFINE_ERROR(GridError);          // phase grid malformed
MQC_DEFINE_ERROR(ResolutionError);    // too few samples for requested order
MQC_DEFINE_ERROR(RangeError);         // index range beyond available data
MQC_DEFINE_ERROR(FitError);           // degenerate least-squares problem
MQC_DEFINE_ERROR(InputError);         // non-Hermitian / non-positive input
MQC_DEFINE_ERROR(NoSensitivityError); // flat response, no threshold exists
MQC_DEFINE_ERROR(ConfigError);        // run configuration failed validation

#undef MQC_DEFINE_ERROR

}  // namespace mqc
