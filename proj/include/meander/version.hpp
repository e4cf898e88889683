// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace meander {
inline constexpr const char* kVersion = "0.2.0";
}
