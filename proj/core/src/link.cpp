#include "nli4d/link.hpp"

#include <string>

namespace nli4d {

const char* to_string(Amplification a) {
    return a == Amplification::Lumped ? "lumped" : "ideal_distributed";
}

Amplification amplification_from_string(std::string_view s) {
    if (s == "lumped") return Amplification::Lumped;
    if (s == "ideal_distributed") return Amplification::IdealDistributed;
    throw ConfigError("unknown amplification scheme: '" + std::string(s) +
                      "' (expected \"lumped\" or \"ideal_distributed\")");
}

}  // namespace nli4d
