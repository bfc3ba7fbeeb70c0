// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace anisolab {

inline const char* version_string() { return "anisolab 0.1.0"; }

}  // namespace anisolab
