#include "cradle/probes.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "cradle/error.hpp"

namespace cradle {

using nlohmann::json;

std::string config_fingerprint(const SessionConfig& config) {
    json j = config_to_json(config);
    j.erase("record_path");
    return hash_hex(fnv1a64(j.dump()));
}

json ProbeReport::to_json() const {
    json trials_json = json::array();
    for (const auto& t : trials) trials_json.push_back({{"seed", t.seed}, {"score", t.score}, {"metrics", t.metrics}});
    return {{"probe", probe},
            {"trials", trials_json},
            {"aggregate", aggregate ? json(*aggregate) : json(nullptr)},
            {"extra", extra},
            {"config_fingerprint", config_fingerprint}};
}

std::string ProbeReport::table() const {
    std::ostringstream out;
    out << "probe " << probe << " (config " << config_fingerprint << ")\n";
    out << std::left << std::setw(10) << "seed" << std::setw(10) << "score" << "metrics\n";
    for (const auto& t : trials)
        out << std::left << std::setw(10) << t.seed << std::setw(10) << std::fixed << std::setprecision(4) << t.score
            << t.metrics.dump() << '\n';
    out << "aggregate ";
    if (aggregate)
        out << std::fixed << std::setprecision(4) << *aggregate;
    else
        out << "-";
    out << '\n';
    if (!extra.empty()) out << "extra " << extra.dump() << '\n';
    return out.str();
}

namespace {

void finish(ProbeReport& report) {
    std::sort(report.trials.begin(), report.trials.end(),
              [](const TrialResult& a, const TrialResult& b) { return a.seed < b.seed; });
    if (report.trials.empty()) return;
    double sum = 0.0;
    for (const auto& t : report.trials) sum += t.score;
    report.aggregate = sum / static_cast<double>(report.trials.size());
}

int object_entity(EntityKind k) {
    switch (k) {
        case EntityKind::Toy: return layout::kFirstToyId;
        case EntityKind::BottleWater: return layout::kWaterBottleId;
        case EntityKind::BottleMilk: return layout::kMilkBottleId;
        default: throw ProbeConfigError("kind " + std::string(kind_name(k)) +
                                        " is not a probe object (toy, bottle_water, bottle_milk)");
    }
}

void check_word(const std::string& word) {
    if (word.empty() || !std::all_of(word.begin(), word.end(), [](char c) { return c >= 'A' && c <= 'Z'; }))
        throw ProbeConfigError("word must be non-empty and use only A-Z: \"" + word + "\"");
}

Substance word_substance(const std::string& word) {
    if (word == "WATER") return Substance::Water;
    if (word == "MILK") return Substance::Milk;
    throw ProbeConfigError("service words are WATER and MILK, got \"" + word + "\"");
}

}  // namespace

ProbeReport preferential_looking(const Agent& agent, const SessionConfig& base, const LookingSpec& spec) {
    const int target_id = object_entity(spec.target);
    const int distractor_id = object_entity(spec.distractor);
    if (spec.target == spec.distractor) throw ProbeConfigError("target and distractor kinds must differ");
    check_word(spec.word);
    if (spec.trials < 0 || spec.steps <= 0) throw ProbeConfigError("trials must be >= 0 and steps > 0");

    ProbeReport report;
    report.probe = "preferential_looking";
    report.config_fingerprint = config_fingerprint(base);
    report.extra = {{"word", spec.word},
                    {"target", std::string(kind_name(spec.target))},
                    {"distractor", std::string(kind_name(spec.distractor))}};

    for (int i = 0; i < spec.trials; ++i) {
        const std::uint64_t seed = spec.first_seed + static_cast<std::uint64_t>(i);
        SessionConfig config = base;
        config.start_stage = kStageCount - 1;
        config.initial = {};
        config.record_path.reset();
        Session session(config);
        session.reset();

        Rng side_rng(seed ^ 0x5851f42d4c957f2dULL);
        const double side = side_rng.below(2) == 0 ? 1.0 : -1.0;
        const double angle = std::numbers::pi / 6.0;
        const AgentBody& body = session.body();
        WorldState& w = session.world_mut();
        for (auto& e : w.entities)
            if (e.kind == EntityKind::Toy || is_bottle(e.kind)) e.present = false;
        auto place = [&](int id, double rel) {
            Entity& e = w.at(id);
            e.present = true;
            e.held_by.reset();
            e.pose.position = body.position + Vec2::polar(body.gaze + rel, 2.0);
        };
        place(target_id, side * angle);
        place(distractor_id, -side * angle);
        Entity& cg = w.at(layout::kCaregiverId);
        cg.pose.position = body.position + Vec2::polar(body.gaze, 3.0);
        cg.pose.facing = bearing(cg.pose.position, body.position);
        const Vec2 target_pos = w.at(target_id).pose.position;
        const Vec2 distractor_pos = w.at(distractor_id).pose.position;

        auto subject = agent.clone();
        subject->reseed(seed);
        subject->begin_episode();
        // One quiet step so the first observation shows the arranged scene.
        ObservationFrame obs = session.step(ActionCommand{});
        session.caregiver_mut().narration =
            make_narration(session.codebook(), config.codec, spec.word, config.caregiver.narration_repeats);

        int on_target = 0;
        int on_distractor = 0;
        continue_episode(session, *subject, obs, spec.steps, [&](const ActionCommand&, const ObservationFrame& o) {
            const Vec2 eye = session.body().position;
            if (std::abs(wrap_angle(o.proprio.gaze - bearing(eye, target_pos))) <= spec.half_angle) ++on_target;
            if (std::abs(wrap_angle(o.proprio.gaze - bearing(eye, distractor_pos))) <= spec.half_angle)
                ++on_distractor;
        });
        TrialResult trial;
        trial.seed = seed;
        const int looks = on_target + on_distractor;
        trial.score = looks ? static_cast<double>(on_target) / looks : 0.5;
        trial.metrics = {{"target_steps", on_target},
                         {"distractor_steps", on_distractor},
                         {"target_side", side > 0 ? "left" : "right"}};
        report.trials.push_back(std::move(trial));
    }
    finish(report);
    return report;
}

ProbeReport service_word_latency(const Agent& agent, const SessionConfig& base, const LatencySpec& spec) {
    const Substance wanted = word_substance(spec.word);
    ProbeReport report;
    report.probe = "service_word_latency";
    report.config_fingerprint = config_fingerprint(base);
    report.extra = {{"word", spec.word}, {"timeout", spec.timeout}};

    for (std::uint64_t seed : spec.seeds) {
        SessionConfig config = base;
        config.seed = seed;
        config.start_stage = kStageCount - 1;
        config.initial = {spec.thirst, 0.0};
        config.initial_last_delivery = spec.last_delivery ? *spec.last_delivery : std::optional<Substance>(wanted);
        config.record_path.reset();
        Session session(config);
        auto subject = agent.clone();
        subject->begin_episode();
        ObservationFrame obs = session.reset();

        std::optional<std::int64_t> latency;
        bool cried = false;
        json words = json::array();
        for (std::int64_t i = 0; i < spec.timeout && !latency; ++i) {
            subject->observe(obs);
            const ActionCommand action = subject->act(obs);
            if (action.vocal.kind == VocalKind::Cry && action.vocal.loudness > 0.0) cried = true;
            obs = session.step(action);
            for (const auto& e : obs.events) {
                if (e.tag == "word_service") words.push_back(e.detail);
                if (e.tag == "delivery" && e.detail == substance_name(wanted)) latency = obs.t;
            }
        }
        TrialResult trial;
        trial.seed = seed;
        trial.score = latency && !cried ? 1.0 : 0.0;
        trial.metrics = {{"latency", latency ? json(*latency) : json(nullptr)},
                         {"cried", cried},
                         {"words_serviced", words}};
        report.trials.push_back(std::move(trial));
    }
    finish(report);
    return report;
}

ProbeReport milestone_report(const Agent& agent, const SessionConfig& base, const MilestoneSpec& spec) {
    ProbeReport report;
    report.probe = "milestone";
    report.config_fingerprint = config_fingerprint(base);

    bool first_word = false;
    std::set<std::string> produced;
    if (!spec.seeds.empty()) {
        LatencySpec ls;
        ls.seeds = spec.seeds;
        const ProbeReport lat = service_word_latency(agent, base, ls);
        for (const auto& t : lat.trials) {
            for (const auto& w : t.metrics["words_serviced"]) produced.insert(w.get<std::string>());
            report.trials.push_back(t);
        }
        first_word = !produced.empty();
    }
    json looking = json::object();
    for (const auto& word : spec.words) {
        LookingSpec ls;
        ls.word = word;
        ls.trials = spec.looking_trials;
        if (word == "WATER") {
            ls.target = EntityKind::BottleWater;
        } else if (word == "MILK") {
            ls.target = EntityKind::BottleMilk;
        } else {
            ls.target = EntityKind::Toy;
            ls.distractor = EntityKind::BottleWater;
        }
        const ProbeReport pl = preferential_looking(agent, base, ls);
        looking[word] = pl.aggregate ? json(*pl.aggregate) : json(nullptr);
    }
    finish(report);
    report.extra = {{"first_word_produced", first_word},
                    {"produced_words", json(std::vector<std::string>(produced.begin(), produced.end()))},
                    {"preferential_looking", looking}};
    return report;
}

TrainingResult train(Agent& agent, SessionConfig config, int max_exposures) {
    config.start_stage = 0;
    config.record_path.reset();
    Session session(config);
    agent.begin_episode();
    ObservationFrame obs = session.reset();
    TrainingResult result;
    const std::int64_t limit = config.schedule.start_step(kStageCount - 1);
    while (obs.stage < kStageCount - 1 && result.exposures < max_exposures && result.steps < limit) {
        agent.observe(obs);
        obs = session.step(agent.act(obs));
        ++result.steps;
        for (const auto& e : obs.events)
            if (e.tag == "delivery") ++result.exposures;
    }
    // The last observation is learned from too.
    agent.observe(obs);
    result.final_stage = obs.stage;
    return result;
}

}  // namespace cradle
