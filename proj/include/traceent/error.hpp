#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace traceent {

    enum class errc {
        malformed_line,
        unbalanced_exit,
        empty_trace,
        trace_too_short,
        invalid_config,
        non_finite,
        grid_mismatch,
        unsorted_input,
        empty_corpus,
        duplicate_trace_id,
        format_version_mismatch,
        corrupt_index,
        raw_traces_unavailable,
        too_few_traces,
        class_missing_from_training,
        io_error,
    };

    /// CamelCase name used in diagnostics, e.g. "TraceTooShort".
    std::string_view errc_name(errc code) noexcept;

    class error : public std::runtime_error {
      public:
        error(errc code, const std::string& detail);

        errc code() const noexcept { return code_; }
        std::string_view name() const noexcept { return errc_name(code_); }

      private:
        errc code_;
    };

}  // namespace traceent
