#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace turtle {

enum class ErrorCode {
    EmptyId,
    DuplicateComponent,
    UnknownComponent,
    MissingComponent,
    NegativeScore,
    NonFiniteScore,
    InvalidTimestamp,
    SchemaMismatch,
    InvalidOrder,
    InvalidArgument,
    EmptyCorpus,
    AllAbsentComponent,
    AllZeroWeights,
    InvalidDistance,
    UnknownCandidateId,
    DuplicateId,
    SingleClassCorpus,
    UnlabeledProfile,
    NoModelTrained,
    StorageUnavailable,
    CorruptLine,
    ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. `subject()` names the offending field,
// component, candidate id or line, depending on the code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string subject, std::string detail = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string subject_;
    std::string detail_;
};

}  // namespace turtle
