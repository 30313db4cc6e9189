#pragma once

// Scripted caregiver. One mode at a time plus an independent narration
// track, so she can keep talking while she feeds.
//
//   Idle      --cry >= threshold-->            Approach(water|milk, alternating)
//   Idle      --heard WATER/MILK (S4)-->       Approach(that substance)
//   Idle      --play interval elapsed (S2+)--> PlayIntro
//   Approach  --within 0.5 m-->                Deliver
//   Deliver   --bottle at mouth, narrate-->    Feeding
//   Feeding   --no cry for 100 steps | timeout--> Return
//   Return    --at idle post-->                Idle
//   PlayIntro --fetch, present, dwell, restore--> Return
//
// Cries and word requests interrupt PlayIntro and Return.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cradle/curriculum.hpp"
#include "cradle/drives.hpp"
#include "cradle/observation.hpp"
#include "cradle/sdr.hpp"
#include "cradle/world.hpp"

namespace cradle {

enum class CaregiverMode { Idle, Approach, Deliver, Feeding, PlayIntro, Return };
enum class PlayPhase { Fetch, Present, Dwell, Restore };

std::string_view mode_name(CaregiverMode mode) noexcept;

struct CaregiverParams {
    double walk_speed = 0.1;
    double cry_intensity_threshold = 0.2;
    int narration_repeats = 2;
    std::int64_t feeding_timeout = 300;
    double word_overlap_threshold = 6.0;
    std::int64_t cry_absent_steps = 100;
    std::int64_t play_dwell = 200;
    std::int64_t play_interval = 1000;
    double deliver_distance = 0.5;
    double present_distance = 1.4;
};

struct Narration {
    std::string utterance;
    int remaining_repeats = 0;
    std::vector<SdrFrame> frames;
    std::size_t cursor = 0;
    bool started = false;
};

struct CaregiverState {
    CaregiverMode mode = CaregiverMode::Idle;
    std::optional<Substance> substance;  // Approach / Deliver / Feeding
    std::optional<Substance> last_delivery;
    std::int64_t mode_since = 0;
    std::int64_t cry_absent = 0;

    int play_object = -1;
    PlayPhase play_phase = PlayPhase::Fetch;
    std::int64_t phase_since = 0;
    std::int64_t last_intro_end = 0;
    int next_toy = 0;

    std::optional<Narration> narration;
    std::vector<SdrFrame> speech_buffer;
};

// What reached the caregiver this step.
struct Heard {
    double cry_intensity = 0.0;       // loudest cry, 0 when none
    std::optional<SdrFrame> speech;   // agent speech frame, if any
};

struct CaregiverContext {
    const SdrCodebook& codebook;
    const CodecParams& codec;
    const CaregiverParams& params;
    const GatingMask& mask;
    std::int64_t step = 0;
};

struct CaregiverOutput {
    std::vector<WorldCommand> commands;
    std::vector<SoundEvent> sounds;
    std::vector<Event> events;
    std::optional<Substance> service_request;
};

// Buffers agent speech; at the first silent step after speech, decodes the
// buffer and returns a substance when the word names one and the mean
// overlap reaches the threshold.
std::optional<Substance> hear_agent_speech(CaregiverState& state, const std::optional<SdrFrame>& frame,
                                           const SdrCodebook& codebook, const CodecParams& codec,
                                           const CaregiverParams& params);

CaregiverOutput caregiver_step(const WorldState& world, CaregiverState& state, const Heard& heard,
                               const CaregiverContext& ctx);

// Substance the caregiver brings for a cry: water unless water was the last delivery.
Substance cry_substance(const CaregiverState& state) noexcept;

int bottle_for(Substance s) noexcept;

// `word` spoken `repeats` times with gap frames in between.
Narration make_narration(const SdrCodebook& codebook, const CodecParams& codec, const std::string& word, int repeats);

}  // namespace cradle
