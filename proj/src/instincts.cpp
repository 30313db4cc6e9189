#include "cradle/instincts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cradle {

ReflexSet ReflexSet::defaults(const ReflexConfig& config) {
    ReflexSet set;
    if (config.suck) {
        set.rules.push_back({"R-suck", 3, [](const ObservationFrame& o) { return o.touch.mouth > 0.0; },
                             [](const ObservationFrame&) {
                                 PartialAction p;
                                 p.suck = 1.0;
                                 p.vocal = Vocal::none();
                                 return p;
                             }});
    }
    if (config.cry) {
        const double threshold = config.cry_threshold;
        set.rules.push_back({"R-cry", 2, [threshold](const ObservationFrame& o) { return o.intero.thirst > threshold; },
                             [](const ObservationFrame& o) {
                                 PartialAction p;
                                 p.vocal = Vocal::cry(std::min(1.0, o.intero.thirst));
                                 return p;
                             }});
    }
    if (config.orient) {
        set.rules.push_back({"R-orient", 1,
                             [](const ObservationFrame& o) { return o.audio.onset && o.audio.intensity > 0.0; },
                             [](const ObservationFrame& o) {
                                 PartialAction p;
                                 p.head_turn = std::clamp(o.audio.bearing / body_constants::kTurnRate, -1.0, 1.0);
                                 return p;
                             }});
    }
    return set;
}

PartialAction evaluate(const ReflexSet& reflexes, const ObservationFrame& obs) {
    PartialAction merged;
    std::array<int, 6> owner;
    owner.fill(std::numeric_limits<int>::min());
    auto claim = [&](auto& slot, const auto& value, std::size_t channel, int priority) {
        if (value && priority > owner[channel]) {
            slot = value;
            owner[channel] = priority;
        }
    };
    for (const auto& rule : reflexes.rules) {
        if (!rule.trigger(obs)) continue;
        const PartialAction p = rule.response(obs);
        claim(merged.head_turn, p.head_turn, 0, rule.priority);
        claim(merged.arm_turn, p.arm_turn, 1, rule.priority);
        claim(merged.arm_extend, p.arm_extend, 2, rule.priority);
        claim(merged.grasp, p.grasp, 3, rule.priority);
        claim(merged.suck, p.suck, 4, rule.priority);
        claim(merged.vocal, p.vocal, 5, rule.priority);
    }
    return merged;
}

ActionCommand overlay(const ActionCommand& inner, const PartialAction& o, std::vector<Event>* events) {
    ActionCommand out = inner;
    if (o.head_turn) out.muscles.head_turn = *o.head_turn;
    if (o.arm_turn) out.muscles.arm_turn = *o.arm_turn;
    if (o.arm_extend) out.muscles.arm_extend = *o.arm_extend;
    if (o.grasp) out.muscles.grasp = *o.grasp;
    if (o.suck) out.muscles.suck = *o.suck;
    if (o.vocal) {
        if (events && inner.vocal.kind == VocalKind::Speech && o.vocal->kind != VocalKind::Speech)
            events->push_back({"speech_dropped", "reflex"});
        out.vocal = *o.vocal;
    }
    return out;
}

Policy wrap(Policy inner, ReflexSet reflexes, std::vector<Event>* events) {
    return [inner = std::move(inner), reflexes = std::move(reflexes), events](const ObservationFrame& obs) {
        return overlay(inner(obs), evaluate(reflexes, obs), events);
    };
}

}  // namespace cradle
