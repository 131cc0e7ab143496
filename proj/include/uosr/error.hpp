#pragma once

#include <stdexcept>
#include <string>

namespace uosr {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// io_failure -> 1, everything else here -> 2, unexpected exceptions -> 3.
enum class errc {
    io_failure,
    malformed_header,
    shape_mismatch,
    non_finite_value,
    row_count_mismatch,
    dim_mismatch,
    label_out_of_range,
    missing_component,
    empty_ind,
    zero_vector,
    k_out_of_range,
    length_mismatch,
    empty_input,
    empty_class,
    out_of_range,
    empty_pool,
    shots_exceed_class_size,
    bad_spec,
    internal,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

inline const char* errc_name(errc code) {
    switch (code) {
        case errc::io_failure: return "IoFailure";
        case errc::malformed_header: return "MalformedHeader";
        case errc::shape_mismatch: return "ShapeMismatch";
        case errc::non_finite_value: return "NonFiniteValue";
        case errc::row_count_mismatch: return "RowCountMismatch";
        case errc::dim_mismatch: return "DimMismatch";
        case errc::label_out_of_range: return "LabelOutOfRange";
        case errc::missing_component: return "MissingComponent";
        case errc::empty_ind: return "EmptyInD";
        case errc::zero_vector: return "ZeroVector";
        case errc::k_out_of_range: return "KOutOfRange";
        case errc::length_mismatch: return "LengthMismatch";
        case errc::empty_input: return "EmptyInput";
        case errc::empty_class: return "EmptyClass";
        case errc::out_of_range: return "OutOfRange";
        case errc::empty_pool: return "EmptyPool";
        case errc::shots_exceed_class_size: return "ShotsExceedClassSize";
        case errc::bad_spec: return "BadSpec";
        case errc::internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace uosr
