#pragma once

#include <stdexcept>
#include <string>

namespace aefuse {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// image / file I/O
struct IoFailure final : Error { using Error::Error; };
struct MalformedHeader final : Error { using Error::Error; };
struct UnsupportedMaxval final : Error { using Error::Error; };
struct TruncatedData final : Error { using Error::Error; };
struct BadMagic final : Error { using Error::Error; };
struct WrongLength final : Error { using Error::Error; };

// filtering
struct EvenKernel final : Error { using Error::Error; };
struct InvalidSigma final : Error { using Error::Error; };
struct DimensionMismatch final : Error { using Error::Error; };

// metrics
struct TooSmall final : Error { using Error::Error; };
struct ImageTooSmall final : Error { using Error::Error; };
struct InsufficientPatches final : Error { using Error::Error; };
struct SingularCovariance final : Error { using Error::Error; };

// fusion
struct WeightOutOfRange final : Error { using Error::Error; };
struct TooManyLevels final : Error { using Error::Error; };
struct NoApplicableMethod final : Error { using Error::Error; };
struct DuplicateMethodName final : Error { using Error::Error; };

// oracle
struct EmptyCandidates final : Error { using Error::Error; };
struct UnknownPair final : Error { using Error::Error; };
struct DuplicateMethodForPair final : Error { using Error::Error; };
struct CorruptIndex final : Error { using Error::Error; };
struct MissingReference final : Error { using Error::Error; };

// learner
struct MissingOracle final : Error { using Error::Error; };
struct EmptyDataset final : Error { using Error::Error; };

// config / manifest
struct UnknownKey final : Error { using Error::Error; };
struct TypeError final : Error { using Error::Error; };
struct RangeError final : Error { using Error::Error; };
struct ManifestError final : Error { using Error::Error; };

}  // namespace aefuse
