#include "cradle/curriculum.hpp"

#include <algorithm>
#include <map>

#include "cradle/error.hpp"

namespace cradle {

std::string_view stage_name(int index) noexcept {
    static constexpr std::array<std::string_view, kStageCount> names{"Fetus", "M0_3", "M3_6", "M6_9", "M9_12"};
    return (index >= 0 && index < kStageCount) ? names[static_cast<std::size_t>(index)] : "unknown";
}

std::array<GatingMask, kStageCount> StageSchedule::default_masks() {
    using namespace channel;
    using namespace capability;
    const std::uint32_t base_kinds = kind_bit(EntityKind::Agent) | kind_bit(EntityKind::Caregiver) |
                                     kind_bit(EntityKind::Crib) | kind_bit(EntityKind::Wall) |
                                     kind_bit(EntityKind::BottleWater) | kind_bit(EntityKind::BottleMilk);
    const std::uint32_t with_toys = base_kinds | kind_bit(EntityKind::Toy);
    const std::uint32_t body = kHead | kArmTurn | kArmExtend | kSuck | kCry;

    std::array<GatingMask, kStageCount> m;
    m[0] = {Vision::Off, 2, body, base_kinds, 0, kFeed | kNarrate};
    m[1] = {Vision::Blur4x4, 1, body, base_kinds, 0, kFeed | kNarrate};
    m[2] = {Vision::Full, 0, body, with_toys, 2, kFeed | kNarrate | kPlayIntro};
    m[3] = {Vision::Full, 0, body | kGrasp, with_toys, 4, kFeed | kNarrate | kPlayIntro};
    m[4] = {Vision::Full, 0, body | kGrasp | kSpeech, with_toys, 4, kFeed | kNarrate | kPlayIntro | kWordService};
    return m;
}

std::int64_t StageSchedule::start_step(int index) const noexcept {
    std::int64_t start = 0;
    for (int i = 0; i < index && i < kStageCount; ++i) start += durations[static_cast<std::size_t>(i)];
    return start;
}

void StageSchedule::validate() const {
    for (std::size_t i = 0; i < durations.size(); ++i)
        if (durations[i] <= 0)
            throw InvalidParameter("stage " + std::to_string(i) + " duration must be positive");
}

Stage stage_at(const StageSchedule& schedule, std::int64_t step) {
    int index = 0;
    while (index + 1 < kStageCount && step >= schedule.start_step(index + 1)) ++index;
    return {index, stage_name(index), schedule.start_step(index)};
}

std::vector<Event> gate_action(const GatingMask& mask, ActionCommand& a) {
    std::vector<Event> events;
    auto gate = [&](double& value, std::uint32_t bit, const char* name) {
        if (!mask.allows(bit) && value != 0.0) {
            value = 0.0;
            events.push_back({"action_gated", name});
        }
    };
    gate(a.muscles.head_turn, channel::kHead, "head_turn");
    gate(a.muscles.arm_turn, channel::kArmTurn, "arm_turn");
    gate(a.muscles.arm_extend, channel::kArmExtend, "arm_extend");
    gate(a.muscles.grasp, channel::kGrasp, "grasp");
    gate(a.muscles.suck, channel::kSuck, "suck");
    if (a.vocal.kind == VocalKind::Cry && !mask.allows(channel::kCry)) {
        a.vocal = Vocal::none();
        events.push_back({"action_gated", "cry"});
    }
    if (a.vocal.kind == VocalKind::Speech && !mask.allows(channel::kSpeech)) {
        a.vocal = Vocal::none();
        events.push_back({"action_gated", "speech"});
    }
    return events;
}

namespace {

// Pairwise sum keeps the mean of identical values exact, so blurring an
// already blurred retina leaves it unchanged.
double pairwise_mean16(std::array<double, 16> v) {
    for (std::size_t width = 16; width > 1; width /= 2)
        for (std::size_t i = 0; i < width / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    return v[0] / 16.0;
}

void blur4x4(Retina& retina) {
    for (int br = 0; br < Retina::kSize; br += 4) {
        for (int bc = 0; bc < Retina::kSize; bc += 4) {
            std::array<double, 16> depths{};
            std::array<int, kEntityKindCount> counts{};
            std::size_t n = 0;
            for (int r = br; r < br + 4; ++r)
                for (int c = bc; c < bc + 4; ++c) {
                    const RetinaCell& cell = retina.at(r, c);
                    depths[n++] = cell.depth;
                    counts[static_cast<std::size_t>(std::clamp(cell.kind, 0, kEntityKindCount - 1))]++;
                }
            const int mode = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
            const RetinaCell blurred{mode, pairwise_mean16(depths)};
            for (int r = br; r < br + 4; ++r)
                for (int c = bc; c < bc + 4; ++c) retina.at(r, c) = blurred;
        }
    }
}

}  // namespace

void gate_observation(const GatingMask& mask, ObservationFrame& obs, Rng& rng, int dimension) {
    if (obs.gated) return;
    switch (mask.vision) {
        case Vision::Off: obs.retina.cells.fill(RetinaCell{0, 0.0}); break;
        case Vision::Blur4x4: blur4x4(obs.retina); break;
        case Vision::Full: break;
    }
    if (!obs.audio.frame.empty() && mask.audio_extra_flips > 0)
        obs.audio.frame = apply_noise(obs.audio.frame, mask.audio_extra_flips, dimension, rng);
    obs.gated = true;
}

GatedPair apply_gating(const GatingMask& mask, ObservationFrame observation, ActionCommand action, Rng& rng,
                       int dimension) {
    GatedPair out;
    out.events = gate_action(mask, action);
    gate_observation(mask, observation, rng, dimension);
    out.observation = std::move(observation);
    out.action = std::move(action);
    return out;
}

}  // namespace cradle
