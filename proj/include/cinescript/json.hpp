#pragma once

#include <json.hpp>

namespace cine {

// Key order is part of several wire and file contracts, so the ordered
// variant is used everywhere.  Note: operator== on ordered_json is
// order-sensitive; serialization helpers emit canonical key order.
using Json = nlohmann::ordered_json;

}  // namespace cine
