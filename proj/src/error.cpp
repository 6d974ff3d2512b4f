#include "turtle/error.hpp"

namespace turtle {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyId: return "EmptyId";
        case ErrorCode::DuplicateComponent: return "DuplicateComponent";
        case ErrorCode::UnknownComponent: return "UnknownComponent";
        case ErrorCode::MissingComponent: return "MissingComponent";
        case ErrorCode::NegativeScore: return "NegativeScore";
        case ErrorCode::NonFiniteScore: return "NonFiniteScore";
        case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::AllAbsentComponent: return "AllAbsentComponent";
        case ErrorCode::AllZeroWeights: return "AllZeroWeights";
        case ErrorCode::InvalidDistance: return "InvalidDistance";
        case ErrorCode::UnknownCandidateId: return "UnknownCandidateId";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::SingleClassCorpus: return "SingleClassCorpus";
        case ErrorCode::UnlabeledProfile: return "UnlabeledProfile";
        case ErrorCode::NoModelTrained: return "NoModelTrained";
        case ErrorCode::StorageUnavailable: return "StorageUnavailable";
        case ErrorCode::CorruptLine: return "CorruptLine";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& subject, const std::string& detail) {
    std::string msg(to_string(code));
    if (!subject.empty()) msg += "(" + subject + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, std::string detail)
    : std::runtime_error(compose(code, subject, detail)),
      code_(code),
      subject_(std::move(subject)),
      detail_(std::move(detail)) {}

}  // namespace turtle
