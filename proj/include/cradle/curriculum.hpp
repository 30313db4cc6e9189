#pragma once

// Developmental stages from fetus to twelve months. The per-stage gating
// table is the only place that decides which senses, actions, entities and
// caregiver behaviours are available.

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cradle/observation.hpp"
#include "cradle/world.hpp"

namespace cradle {

constexpr int kStageCount = 5;

enum class Vision : int { Off = 0, Blur4x4 = 1, Full = 2 };

namespace channel {
constexpr std::uint32_t kHead = 1u << 0;
constexpr std::uint32_t kArmTurn = 1u << 1;
constexpr std::uint32_t kArmExtend = 1u << 2;
constexpr std::uint32_t kGrasp = 1u << 3;
constexpr std::uint32_t kSuck = 1u << 4;
constexpr std::uint32_t kCry = 1u << 5;
constexpr std::uint32_t kSpeech = 1u << 6;
}  // namespace channel

namespace capability {
constexpr std::uint32_t kFeed = 1u << 0;
constexpr std::uint32_t kNarrate = 1u << 1;
constexpr std::uint32_t kPlayIntro = 1u << 2;
constexpr std::uint32_t kWordService = 1u << 3;
}  // namespace capability

constexpr std::uint32_t kind_bit(EntityKind k) { return 1u << static_cast<int>(k); }

struct GatingMask {
    Vision vision = Vision::Full;
    int audio_extra_flips = 0;
    std::uint32_t actions_enabled = 0;
    std::uint32_t entity_kinds_present = 0;
    int toy_count = 0;
    std::uint32_t caregiver_repertoire = 0;

    bool allows(std::uint32_t channel_bit) const noexcept { return (actions_enabled & channel_bit) != 0; }
    bool can(std::uint32_t capability_bit) const noexcept { return (caregiver_repertoire & capability_bit) != 0; }
    bool shows(EntityKind k) const noexcept { return (entity_kinds_present & kind_bit(k)) != 0; }
    bool operator==(const GatingMask&) const = default;
};

struct Stage {
    int index = 0;
    std::string_view name;
    std::int64_t start_step = 0;
};

std::string_view stage_name(int index) noexcept;

struct StageSchedule {
    std::array<std::int64_t, kStageCount> durations{2000, 5000, 5000, 5000, 5000};
    std::array<GatingMask, kStageCount> masks = default_masks();

    static std::array<GatingMask, kStageCount> default_masks();

    std::int64_t start_step(int index) const noexcept;
    // Throws InvalidParameter unless every duration is positive.
    void validate() const;
};

// The final stage extends indefinitely; a boundary step belongs to the later stage.
Stage stage_at(const StageSchedule& schedule, std::int64_t step);

// Zeroes disabled channels and reports each with an `action_gated` event.
std::vector<Event> gate_action(const GatingMask& mask, ActionCommand& action);

// Vision off -> zero retina; blur4x4 -> 4x4 blocks of modal kind and mean
// depth; audio gets the stage's extra flips. No-op on an already gated frame.
void gate_observation(const GatingMask& mask, ObservationFrame& obs, Rng& rng, int dimension);

struct GatedPair {
    ObservationFrame observation;
    ActionCommand action;
    std::vector<Event> events;
};

GatedPair apply_gating(const GatingMask& mask, ObservationFrame observation, ActionCommand action,
                       Rng& rng, int dimension);

}  // namespace cradle
