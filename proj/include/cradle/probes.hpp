#pragma once

// Developmental-psychology style measurements. Every trial runs a clone of
// the agent in its own session, so probes never change the caller's agent.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cradle/agents.hpp"
#include "cradle/config.hpp"

namespace cradle {

struct TrialResult {
    std::uint64_t seed = 0;
    double score = 0.0;
    nlohmann::json metrics = nlohmann::json::object();
};

struct ProbeReport {
    std::string probe;
    std::vector<TrialResult> trials;  // sorted by seed
    std::optional<double> aggregate;  // mean trial score; empty without trials
    nlohmann::json extra = nlohmann::json::object();
    std::string config_fingerprint;

    nlohmann::json to_json() const;
    // Plain-text summary table.
    std::string table() const;
};

std::string config_fingerprint(const SessionConfig& config);

struct LookingSpec {
    std::string word = "WATER";
    EntityKind target = EntityKind::BottleWater;
    EntityKind distractor = EntityKind::Toy;
    int trials = 50;
    std::uint64_t first_seed = 1;
    int steps = 100;
    double half_angle = 0.2617993877991494;  // 15 degrees
};

// Target and distractor at +-30 degrees, 2 m from the agent; the caregiver
// 3 m ahead says `word` twice. Every trial uses the world of `base.seed` (and
// so its codebook); the trial seed draws the side and reseeds the agent. Trial score = target
// looking / (target + distractor looking) over `steps` steps, 0.5 without looks.
// ProbeConfigError for kinds other than toy / bottle_water / bottle_milk,
// equal kinds, or a word outside A-Z.
ProbeReport preferential_looking(const Agent& agent, const SessionConfig& base, const LookingSpec& spec);

struct LatencySpec {
    std::string word = "WATER";
    std::vector<std::uint64_t> seeds{1};
    std::int64_t timeout = 2000;
    double thirst = 0.65;
    // Substance the caregiver delivered last; defaults to the word's own, so a
    // cry is first answered with the other substance.
    std::optional<std::optional<Substance>> last_delivery;
};

// Stage S4 with the given thirst; per seed, steps until the caregiver
// delivers the word's substance. Metrics: latency (null on timeout), cried
// (any cry before that delivery), words_serviced. Trial score = 1 when the
// delivery came without a cry.
ProbeReport service_word_latency(const Agent& agent, const SessionConfig& base, const LatencySpec& spec);

struct MilestoneSpec {
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::string> words;  // taught words for preferential looking
    int looking_trials = 20;
};

ProbeReport milestone_report(const Agent& agent, const SessionConfig& base, const MilestoneSpec& spec);

struct TrainingResult {
    std::int64_t steps = 0;
    int exposures = 0;  // caregiver deliveries
    int final_stage = 0;
};

// Default curriculum from S0 until stage S4 begins or `max_exposures`
// deliveries have happened.
TrainingResult train(Agent& agent, SessionConfig config, int max_exposures = 50);

}  // namespace cradle
