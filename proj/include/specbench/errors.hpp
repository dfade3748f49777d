#pragma once

#include <stdexcept>
#include <string>

namespace specbench {

/// Base for every error raised by the library. Each failure mode named in the
/// public contracts gets its own subtype so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPECBENCH_DEFINE_ERROR(Name)          \
  class Name : public Error {                 \
   public:                                    \
    explicit Name(const std::string& what)    \
        : Error(#Name ": " + what) {}         \
  }

SPECBENCH_DEFINE_ERROR(UnreadableFile);
SPECBENCH_DEFINE_ERROR(UnsupportedEncoding);
SPECBENCH_DEFINE_ERROR(EmptyAudio);
SPECBENCH_DEFINE_ERROR(NoMatches);
SPECBENCH_DEFINE_ERROR(OutOfRangeAnnotation);
SPECBENCH_DEFINE_ERROR(InvalidParams);
SPECBENCH_DEFINE_ERROR(ClipTooShort);
SPECBENCH_DEFINE_ERROR(NonPositiveFrequency);
SPECBENCH_DEFINE_ERROR(UnknownSelection);
SPECBENCH_DEFINE_ERROR(KTooLarge);
SPECBENCH_DEFINE_ERROR(RenderFailure);
SPECBENCH_DEFINE_ERROR(ParseError);

#undef SPECBENCH_DEFINE_ERROR

}  // namespace specbench
