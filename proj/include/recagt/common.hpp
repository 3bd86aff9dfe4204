#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace recagt {

using Bytes = std::vector<std::uint8_t>;

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// field
struct ZeroInverse : Error { using Error::Error; };
struct LengthOverflow : Error { using Error::Error; };

// codes
struct DuplicateScalar : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// identity
struct CommitteeTooLarge : Error { using Error::Error; };
struct MalformedKey : Error { using Error::Error; };
struct WireError : Error { using Error::Error; };

// group testing / simulation / experiments
struct InvalidConfig : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct StageAFailed : Error { using Error::Error; };
struct OracleInconsistent : Error { using Error::Error; };
struct JoinFailed : Error { using Error::Error; };

}  // namespace recagt
