#pragma once

#include <stdexcept>
#include <string>

namespace mexp {

// Base of every error raised by the toolkit. The subclasses mirror the error
// categories callers are expected to branch on.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define MEXP_DEFINE_ERROR(Name)                   \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

MEXP_DEFINE_ERROR(ShapeError);     // dimension mismatch, empty or too small inputs
MEXP_DEFINE_ERROR(InputError);     // non-finite or out-of-range values
MEXP_DEFINE_ERROR(FormatError);    // malformed binary file
MEXP_DEFINE_ERROR(ParseError);     // malformed text file (manifest, config)
MEXP_DEFINE_ERROR(IoError);        // missing files, unreadable images
MEXP_DEFINE_ERROR(ConfigError);    // invalid parameter combination
MEXP_DEFINE_ERROR(DomainError);    // argument outside the mathematical domain
MEXP_DEFINE_ERROR(TrainingError);  // classifier cannot be trained on the data
MEXP_DEFINE_ERROR(ProtocolError);  // cross-validation protocol not applicable
MEXP_DEFINE_ERROR(DataError);      // dataset annotation missing for the request

#undef MEXP_DEFINE_ERROR

}  // namespace mexp
