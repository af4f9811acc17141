// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

namespace failgen {

// Insertion-ordered so serialized records keep a fixed key order.
using Json = nlohmann::ordered_json;

}  // namespace failgen
