#pragma once

namespace pfrmt {

inline constexpr const char* library_version = "0.1.0";
inline constexpr const char* result_schema_version = "1.0";

} // namespace pfrmt
