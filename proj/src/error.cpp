#include "traceent/error.hpp"

namespace traceent {

    std::string_view errc_name(errc code) noexcept {
        switch (code) {
            case errc::malformed_line:
                return "MalformedLine";
            case errc::unbalanced_exit:
                return "UnbalancedExit";
            case errc::empty_trace:
                return "EmptyTrace";
            case errc::trace_too_short:
                return "TraceTooShort";
            case errc::invalid_config:
                return "InvalidConfig";
            case errc::non_finite:
                return "NonFinite";
            case errc::grid_mismatch:
                return "GridMismatch";
            case errc::unsorted_input:
                return "UnsortedInput";
            case errc::empty_corpus:
                return "EmptyCorpus";
            case errc::duplicate_trace_id:
                return "DuplicateTraceId";
            case errc::format_version_mismatch:
                return "FormatVersionMismatch";
            case errc::corrupt_index:
                return "CorruptIndex";
            case errc::raw_traces_unavailable:
                return "RawTracesUnavailable";
            case errc::too_few_traces:
                return "TooFewTraces";
            case errc::class_missing_from_training:
                return "ClassMissingFromTraining";
            case errc::io_error:
                return "IoError";
        }
        return "Unknown";
    }

    error::error(errc code, const std::string& detail)
            : std::runtime_error(std::string{errc_name(code)} + ": " + detail), code_(code) {}

}  // namespace traceent
