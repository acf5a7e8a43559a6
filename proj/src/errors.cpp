#include "mnl/errors.hpp"

namespace mnl {

const char* to_string(DataErrorKind kind) noexcept {
    switch (kind) {
        case DataErrorKind::missing_file: return "missing file";
        case DataErrorKind::bad_header: return "bad header";
        case DataErrorKind::malformed_row: return "malformed row";
        case DataErrorKind::duplicate_date: return "duplicate date";
        case DataErrorKind::empty_series: return "empty series";
        case DataErrorKind::insufficient_data: return "insufficient data";
        case DataErrorKind::bad_format: return "bad format";
    }
    return "data error";
}

DataError::DataError(DataErrorKind kind, const std::string& what, std::size_t line)
    : Error(std::string(to_string(kind)) + ": " + what), kind_(kind), line_(line) {}

}  // namespace mnl
