#pragma once

// Fixed reflexes layered over any policy. Each rule claims a set of action
// channels; when several triggered rules claim the same channel the higher
// priority wins.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cradle/observation.hpp"

namespace cradle {

struct PartialAction {
    std::optional<double> head_turn;
    std::optional<double> arm_turn;
    std::optional<double> arm_extend;
    std::optional<double> grasp;
    std::optional<double> suck;
    std::optional<Vocal> vocal;

    bool empty() const noexcept {
        return !head_turn && !arm_turn && !arm_extend && !grasp && !suck && !vocal;
    }
    bool operator==(const PartialAction&) const = default;
};

struct ReflexRule {
    std::string id;
    int priority = 0;
    std::function<bool(const ObservationFrame&)> trigger;
    std::function<PartialAction(const ObservationFrame&)> response;
};

struct ReflexConfig {
    bool server_side = false;  // wrap actions received over the wire
    bool suck = true;
    bool cry = true;
    bool orient = true;
    double cry_threshold = 0.6;
};

struct ReflexSet {
    std::vector<ReflexRule> rules;  // evaluated in this order

    // R-suck (3): mouth contact -> suck=1, vocal silenced.
    // R-cry (2): thirst > threshold -> cry with loudness min(1, thirst).
    // R-orient (1): sound onset -> head turn toward its bearing.
    static ReflexSet defaults(const ReflexConfig& config = {});
};

PartialAction evaluate(const ReflexSet& reflexes, const ObservationFrame& obs);

// Overwrites the claimed channels of `inner`. Speech replaced by an override
// is reported through a `speech_dropped` event.
ActionCommand overlay(const ActionCommand& inner, const PartialAction& overrides,
                      std::vector<Event>* events = nullptr);

using Policy = std::function<ActionCommand(const ObservationFrame&)>;

// The returned policy runs `inner`, then applies triggered reflexes.
Policy wrap(Policy inner, ReflexSet reflexes, std::vector<Event>* events = nullptr);

}  // namespace cradle
