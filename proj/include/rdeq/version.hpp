#pragma once

namespace rdeq {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rdeq
