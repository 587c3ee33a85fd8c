#pragma once

#include <optional>
#include <string>

#include "qadd/channel.hpp"

namespace qadd {

enum class Verdict { Degradable, AntiDegradable, Both, Neither, Indeterminate };

const char* verdict_name(Verdict v);

/// Outcome of a degradability decision. When a verdict carries a map, the map
/// composed with the channel (or its complement, for the anti direction)
/// reproduces the other member of the pair up to `residual` on matrix units.
struct Certificate {
    Verdict verdict = Verdict::Indeterminate;
    std::optional<Channel> degrading_map;       // D with D o N = N^c
    std::optional<Channel> antidegrading_map;   // D with D o N^c = N
    std::string witness;                        // human-readable obstruction
    double residual = 0.0;
};

}  // namespace qadd
