#pragma once

// Reference policies. The environment never hands out a reward; whatever
// signal an agent learns from it computes here, from its own observations.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cradle/instincts.hpp"
#include "cradle/observation.hpp"
#include "cradle/rng.hpp"
#include "cradle/sdr.hpp"
#include "cradle/session.hpp"

namespace cradle {

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string name() const = 0;
    // Learning hook, called with every observation before act().
    virtual void observe(const ObservationFrame&) {}
    virtual ActionCommand act(const ObservationFrame& obs) = 0;
    // Forget per-episode state, keep what was learned.
    virtual void begin_episode() {}
    // Replaces any internal randomness; deterministic agents ignore it.
    virtual void reseed(std::uint64_t) {}
    virtual std::unique_ptr<Agent> clone() const = 0;
};

// -(change in thirst) - (change in hunger): positive while a drive is relieved.
struct IntrinsicSignal {
    std::optional<DriveState> previous;
    double value = 0.0;

    double update(const DriveState& now);
};

class ReflexAgent : public Agent {
public:
    explicit ReflexAgent(ReflexConfig config = {}) : reflexes_(ReflexSet::defaults(config)), config_(config) {}
    std::string name() const override { return "reflex"; }
    ActionCommand act(const ObservationFrame& obs) override;
    std::unique_ptr<Agent> clone() const override { return std::make_unique<ReflexAgent>(*this); }

private:
    ReflexSet reflexes_;
    ReflexConfig config_;
};

// No muscles, no voice, no reflexes.
class MuteAgent : public Agent {
public:
    std::string name() const override { return "mute"; }
    ActionCommand act(const ObservationFrame&) override { return {}; }
    std::unique_ptr<Agent> clone() const override { return std::make_unique<MuteAgent>(*this); }
};

// Random head and arm motion and random sparse speech frames, under reflexes.
class BabblerAgent : public Agent {
public:
    BabblerAgent(std::uint64_t seed, CodecParams codec, ReflexConfig reflexes = {});
    std::string name() const override { return "babbler"; }
    void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
    ActionCommand act(const ObservationFrame& obs) override;
    std::unique_ptr<Agent> clone() const override { return std::make_unique<BabblerAgent>(*this); }

private:
    Rng rng_;
    CodecParams codec_;
    ReflexSet reflexes_;
};

// Picks a gaze target uniformly within +-60 degrees of its first gaze every
// `period` steps and turns toward it.
class RandomGazeAgent : public Agent {
public:
    explicit RandomGazeAgent(std::uint64_t seed, int period = 10) : rng_(seed), period_(period) {}
    std::string name() const override { return "random_gaze"; }
    void begin_episode() override;
    void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
    ActionCommand act(const ObservationFrame& obs) override;
    std::unique_ptr<Agent> clone() const override { return std::make_unique<RandomGazeAgent>(*this); }

private:
    Rng rng_;
    int period_;
    std::optional<double> origin_;
    double target_ = 0.0;
    std::int64_t steps_ = 0;
};

// Hebbian counts. relief[slot][bit] is keyed by the letter slot within a heard
// utterance (frame index / frames_per_symbol inside a run of non-silent frames).
struct AssociationStore {
    std::vector<std::map<std::uint32_t, std::uint64_t>> relief;
    std::map<std::uint32_t, std::uint64_t> thirst_high;
    std::array<std::map<std::uint32_t, std::uint64_t>, kEntityKindCount> fovea;
    std::uint64_t relief_events = 0;

    std::uint64_t relief_count(std::size_t slot, std::uint32_t bit) const;
    // Highest counts first, ties to the smaller bit; at most `n` entries.
    std::vector<std::pair<std::uint32_t, std::uint64_t>> top_relief(std::size_t slot, std::size_t n) const;

    nlohmann::json to_json() const;
    static AssociationStore from_json(const nlohmann::json& j);
    bool operator==(const AssociationStore&) const = default;
};

struct AssociatorParams {
    int window = 20;
    std::uint64_t min_count = 5;
    double relief_drop = 0.02;
    std::size_t top_bits = 10;
    int patience = 200;
    int look_steps = 100;
    double cry_threshold = 0.6;
};

class AssociatorAgent : public Agent {
public:
    AssociatorAgent(CodecParams codec, AssociatorParams params = {}, ReflexConfig reflexes = {});

    std::string name() const override { return "associator"; }
    void observe(const ObservationFrame& obs) override;
    ActionCommand act(const ObservationFrame& obs) override;
    void begin_episode() override;
    std::unique_ptr<Agent> clone() const override { return std::make_unique<AssociatorAgent>(*this); }

    const AssociationStore& store() const noexcept { return store_; }
    void set_store(AssociationStore store) { store_ = std::move(store); }
    const IntrinsicSignal& intrinsic() const noexcept { return intrinsic_; }

    // Frames of the word it would say: one top-bit frame per trained slot.
    // Empty while untrained.
    std::vector<SdrFrame> production() const;
    std::size_t words_spoken() const noexcept { return words_spoken_; }

private:
    struct Heard {
        std::int64_t t;
        std::size_t slot;
        std::vector<std::uint32_t> bits;
    };

    void credit(const Heard& h, std::uint64_t strength);
    std::optional<ActionCommand> speak(const ObservationFrame& obs);
    std::optional<double> look(const ObservationFrame& obs);

    CodecParams codec_;
    AssociatorParams params_;
    ReflexSet reflexes_;
    AssociationStore store_;
    IntrinsicSignal intrinsic_;

    // episode state
    std::vector<Heard> pending_;
    std::vector<std::pair<std::int64_t, std::uint64_t>> onsets_;
    bool relieving_ = false;
    std::size_t run_length_ = 0;
    int silent_run_ = 0;
    std::vector<SdrFrame> utterance_;
    std::size_t utterance_pos_ = 0;
    std::int64_t quiet_until_ = -1;
    int gated_stage_ = -1;
    std::map<std::uint32_t, std::uint64_t> heard_bits_;
    std::optional<EntityKind> look_kind_;
    std::int64_t look_until_ = -1;
    std::size_t words_spoken_ = 0;
};

// reflex | babbler | associator | random_gaze | mute; nullptr when unknown.
std::unique_ptr<Agent> make_agent(const std::string& name, std::uint64_t seed, const SessionConfig& config);

struct EpisodeSummary {
    std::int64_t steps = 0;
    std::map<std::string, int> deliveries;  // by substance
    int narrations = 0;
    int cries = 0;
    int words_serviced = 0;
    DriveState final_drives;
};

using StepHook = std::function<void(const ActionCommand&, const ObservationFrame&)>;

// Resets `session`, then runs `agent` for `steps` steps.
EpisodeSummary run_episode(Session& session, Agent& agent, std::int64_t steps, const StepHook& hook = {});

// Same, continuing from an observation the caller already holds.
EpisodeSummary continue_episode(Session& session, Agent& agent, ObservationFrame obs, std::int64_t steps,
                                const StepHook& hook = {});

}  // namespace cradle
