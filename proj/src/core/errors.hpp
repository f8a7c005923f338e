#pragma once

#include <stdexcept>
#include <string>

namespace segbed {

// Error categories. Mirrored one-to-one by the segbed_status codes of the
// public C API, so keep the two lists in sync.
enum class ErrorCode {
    io_failure = 1,
    unsupported_format,
    empty_audio,
    invalid_argument,
    out_of_range,
    shape_mismatch,
    corrupt_manifest,
    checksum_mismatch,
    arch_mismatch,
    parse_error,
    overlapping_segments,
    gap_between_segments,
    empty_dataset,
    non_finite_loss,
    empty_negative_region,
    too_few_beats,
    unknown_config_key,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace segbed
