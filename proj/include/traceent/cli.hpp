#pragma once

#include <iosfwd>

namespace traceent::cli {

    /// Environment variable naming the index used when --index is omitted.
    inline constexpr const char* index_env_var = "TRACEENT_INDEX";
    inline constexpr const char* default_index_path = "traceent.idx";

    /// Entry point of the `traceent` tool. Returns 0 on success, 2 on usage
    /// errors and 1 when a library operation fails.
    int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace traceent::cli
