#pragma once

namespace ugraph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ugraph
