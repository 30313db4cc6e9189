#include "cradle/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cradle/error.hpp"

namespace cradle {

using nlohmann::json;

double IntrinsicSignal::update(const DriveState& now) {
    value = previous ? -(now.thirst - previous->thirst) - (now.hunger - previous->hunger) : 0.0;
    previous = now;
    return value;
}

ActionCommand ReflexAgent::act(const ObservationFrame& obs) {
    return overlay(ActionCommand{}, evaluate(reflexes_, obs));
}

BabblerAgent::BabblerAgent(std::uint64_t seed, CodecParams codec, ReflexConfig reflexes)
    : rng_(seed), codec_(codec), reflexes_(ReflexSet::defaults(reflexes)) {}

ActionCommand BabblerAgent::act(const ObservationFrame& obs) {
    ActionCommand a;
    a.muscles.head_turn = rng_.uniform(-1.0, 1.0);
    a.muscles.arm_turn = rng_.uniform(-1.0, 1.0);
    a.muscles.arm_extend = rng_.uniform(-1.0, 1.0);
    a.muscles.grasp = rng_.uniform();
    if (rng_.uniform() < 0.1) {
        std::vector<std::uint32_t> bits;
        while (bits.size() < static_cast<std::size_t>(codec_.cardinality)) {
            const auto b = static_cast<std::uint32_t>(rng_.below(static_cast<std::uint64_t>(codec_.dimension)));
            if (std::find(bits.begin(), bits.end(), b) == bits.end()) bits.push_back(b);
        }
        std::sort(bits.begin(), bits.end());
        a.vocal = Vocal::speech(SdrFrame{std::move(bits)});
    }
    return overlay(a, evaluate(reflexes_, obs));
}

void RandomGazeAgent::begin_episode() {
    origin_.reset();
    steps_ = 0;
}

ActionCommand RandomGazeAgent::act(const ObservationFrame& obs) {
    if (!origin_) origin_ = obs.proprio.gaze;
    if (steps_++ % period_ == 0) target_ = *origin_ + rng_.uniform(-Retina::kFieldOfView / 2, Retina::kFieldOfView / 2);
    ActionCommand a;
    a.muscles.head_turn = std::clamp(wrap_angle(target_ - obs.proprio.gaze) / body_constants::kTurnRate, -1.0, 1.0);
    return a;
}

std::uint64_t AssociationStore::relief_count(std::size_t slot, std::uint32_t bit) const {
    if (slot >= relief.size()) return 0;
    const auto it = relief[slot].find(bit);
    return it == relief[slot].end() ? 0 : it->second;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> AssociationStore::top_relief(std::size_t slot,
                                                                                  std::size_t n) const {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> all;
    if (slot < relief.size()) all.assign(relief[slot].begin(), relief[slot].end());
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (all.size() > n) all.resize(n);
    return all;
}

namespace {

json counts_to_json(const std::map<std::uint32_t, std::uint64_t>& m) {
    json out = json::object();
    for (const auto& [bit, count] : m) out[std::to_string(bit)] = count;
    return out;
}

std::map<std::uint32_t, std::uint64_t> counts_from_json(const json& j) {
    if (!j.is_object()) throw InvalidParameter("count table must be an object");
    std::map<std::uint32_t, std::uint64_t> m;
    for (auto it = j.begin(); it != j.end(); ++it)
        m[static_cast<std::uint32_t>(std::stoul(it.key()))] = it.value().get<std::uint64_t>();
    return m;
}

}  // namespace

json AssociationStore::to_json() const {
    json r = json::array();
    for (const auto& slot : relief) r.push_back(counts_to_json(slot));
    json f = json::object();
    for (int k = 0; k < kEntityKindCount; ++k)
        if (!fovea[static_cast<std::size_t>(k)].empty())
            f[std::string(kind_name(static_cast<EntityKind>(k)))] = counts_to_json(fovea[static_cast<std::size_t>(k)]);
    return {{"relief", r}, {"thirst_high", counts_to_json(thirst_high)}, {"fovea", f}, {"relief_events", relief_events}};
}

AssociationStore AssociationStore::from_json(const json& j) {
    AssociationStore s;
    for (const auto& slot : j.at("relief")) s.relief.push_back(counts_from_json(slot));
    s.thirst_high = counts_from_json(j.at("thirst_high"));
    for (auto it = j.at("fovea").begin(); it != j.at("fovea").end(); ++it) {
        const auto kind = kind_from_name(it.key());
        if (!kind) throw InvalidParameter("unknown kind " + it.key());
        s.fovea[static_cast<std::size_t>(*kind)] = counts_from_json(it.value());
    }
    s.relief_events = j.value("relief_events", std::uint64_t{0});
    return s;
}

AssociatorAgent::AssociatorAgent(CodecParams codec, AssociatorParams params, ReflexConfig reflexes)
    : codec_(codec), params_(params), reflexes_(ReflexSet::defaults(reflexes)) {}

void AssociatorAgent::begin_episode() {
    intrinsic_ = {};
    pending_.clear();
    onsets_.clear();
    relieving_ = false;
    run_length_ = 0;
    silent_run_ = 0;
    utterance_.clear();
    utterance_pos_ = 0;
    quiet_until_ = -1;
    gated_stage_ = -1;
    heard_bits_.clear();
    look_kind_.reset();
    look_until_ = -1;
}

void AssociatorAgent::credit(const Heard& h, std::uint64_t strength) {
    if (store_.relief.size() <= h.slot) store_.relief.resize(h.slot + 1);
    for (auto bit : h.bits) store_.relief[h.slot][bit] += strength;
}

void AssociatorAgent::observe(const ObservationFrame& obs) {
    const std::optional<DriveState> before = intrinsic_.previous;
    intrinsic_.update(obs.intero);
    const std::int64_t t = obs.t;
    const std::int64_t w = params_.window;

    // A relief event is a one-step thirst drop of at least relief_drop; its
    // onset credits every heard frame within the window once, weighted by
    // how many multiples of the threshold the first drop spans.
    const double drop = before ? before->thirst - obs.intero.thirst : 0.0;
    if (drop >= params_.relief_drop - 1e-12) {
        if (!relieving_) {
            const auto strength = static_cast<std::uint64_t>(std::floor(drop / params_.relief_drop + 1e-9));
            ++store_.relief_events;
            onsets_.emplace_back(t, strength);
            for (const auto& h : pending_)
                if (t - h.t <= w) credit(h, strength);
            pending_.clear();
        }
        relieving_ = true;
    } else {
        relieving_ = false;
    }

    if (obs.has_event("action_gated", "speech")) {
        gated_stage_ = obs.stage;
        utterance_.clear();
        utterance_pos_ = 0;
    }

    const auto& bits = obs.audio.frame.active;
    if (bits.empty()) {
        run_length_ = 0;
        if (++silent_run_ > codec_.gap_frames) heard_bits_.clear();
    } else {
        silent_run_ = 0;
        Heard h{t, run_length_ / static_cast<std::size_t>(codec_.frames_per_symbol), bits};
        ++run_length_;
        const auto onset = std::find_if(onsets_.begin(), onsets_.end(),
                                        [&](const auto& o) { return t - o.first <= w; });
        if (onset != onsets_.end())
            credit(h, onset->second);
        else
            pending_.push_back(std::move(h));

        if (obs.intero.thirst > params_.cry_threshold)
            for (auto b : bits) ++store_.thirst_high[b];
        const EntityKind k = fovea_kind(obs.retina);
        if (k != EntityKind::None)
            for (auto b : bits) ++store_.fovea[static_cast<std::size_t>(k)][b];
        for (auto b : bits) ++heard_bits_[b];
    }

    std::erase_if(pending_, [&](const Heard& h) { return t - h.t > w; });
    std::erase_if(onsets_, [&](const auto& o) { return t - o.first > w; });
}

std::vector<SdrFrame> AssociatorAgent::production() const {
    std::vector<SdrFrame> word;
    for (std::size_t slot = 0; slot < store_.relief.size(); ++slot) {
        const auto top = store_.top_relief(slot, params_.top_bits);
        if (top.size() < params_.top_bits || top.back().second < params_.min_count) break;
        std::vector<std::uint32_t> bits;
        for (const auto& [bit, count] : top) bits.push_back(bit);
        std::sort(bits.begin(), bits.end());
        word.push_back(SdrFrame{std::move(bits)});
    }
    return word;
}

std::optional<ActionCommand> AssociatorAgent::speak(const ObservationFrame& obs) {
    ActionCommand a;
    if (utterance_pos_ < utterance_.size()) {
        a.vocal = Vocal::speech(utterance_[utterance_pos_++]);
        if (utterance_pos_ == utterance_.size()) quiet_until_ = obs.t + params_.patience;
        return a;
    }
    if (obs.t < quiet_until_) return a;
    if (gated_stage_ == obs.stage || obs.intero.thirst <= params_.cry_threshold) return std::nullopt;
    const auto word = production();
    if (word.empty()) return std::nullopt;
    utterance_.clear();
    for (const auto& f : word)
        for (int i = 0; i < codec_.frames_per_symbol; ++i) utterance_.push_back(f);
    utterance_pos_ = 0;
    ++words_spoken_;
    return speak(obs);
}

std::optional<double> AssociatorAgent::look(const ObservationFrame& obs) {
    static constexpr EntityKind kObjects[] = {EntityKind::Toy, EntityKind::BottleWater, EntityKind::BottleMilk};
    auto columns_of = [&](EntityKind k) {
        std::vector<int> cols;
        for (int c = 0; c < Retina::kSize; ++c)
            for (int r = 7; r <= 8; ++r)
                if (obs.retina.at(r, c).kind == static_cast<int>(k)) {
                    cols.push_back(c);
                    break;
                }
        return cols;
    };

    if (!look_kind_ || obs.t >= look_until_) {
        look_kind_.reset();
        if (heard_bits_.empty() || obs.audio.frame.empty()) return std::nullopt;
        std::uint64_t best = 0;
        for (EntityKind k : kObjects) {
            if (columns_of(k).empty()) continue;
            std::uint64_t score = 0;
            const auto& table = store_.fovea[static_cast<std::size_t>(k)];
            for (const auto& [bit, n] : heard_bits_) {
                const auto it = table.find(bit);
                if (it != table.end()) score += it->second * n;
            }
            if (score >= params_.min_count && score > best) {
                best = score;
                look_kind_ = k;
            }
        }
        if (!look_kind_) return std::nullopt;
        look_until_ = obs.t + params_.look_steps;
    }
    const auto cols = columns_of(*look_kind_);
    if (cols.empty()) return std::nullopt;
    double offset = 0.0;
    for (int c : cols) offset += Retina::column_offset(c);
    offset /= static_cast<double>(cols.size());
    return std::clamp(offset / body_constants::kTurnRate, -1.0, 1.0);
}

ActionCommand AssociatorAgent::act(const ObservationFrame& obs) {
    ActionCommand a;
    PartialAction reflex = evaluate(reflexes_, obs);
    if (auto spoken = speak(obs)) {
        a = *spoken;
        // Speaking or waiting to be understood: no crying over it.
        if (reflex.vocal && reflex.vocal->kind == VocalKind::Cry) reflex.vocal.reset();
    }
    if (auto turn = look(obs)) {
        a.muscles.head_turn = *turn;
        reflex.head_turn.reset();
    }
    return overlay(a, reflex);
}

std::unique_ptr<Agent> make_agent(const std::string& name, std::uint64_t seed, const SessionConfig& config) {
    ReflexConfig reflexes = config.reflexes;
    if (name == "reflex") return std::make_unique<ReflexAgent>(reflexes);
    if (name == "babbler") return std::make_unique<BabblerAgent>(seed, config.codec, reflexes);
    if (name == "associator") {
        AssociatorParams p;
        p.cry_threshold = reflexes.cry_threshold;
        return std::make_unique<AssociatorAgent>(config.codec, p, reflexes);
    }
    if (name == "random_gaze") return std::make_unique<RandomGazeAgent>(seed);
    if (name == "mute") return std::make_unique<MuteAgent>();
    return nullptr;
}

EpisodeSummary continue_episode(Session& session, Agent& agent, ObservationFrame obs, std::int64_t steps,
                                const StepHook& hook) {
    EpisodeSummary summary;
    for (std::int64_t i = 0; i < steps; ++i) {
        agent.observe(obs);
        const ActionCommand action = agent.act(obs);
        if (action.vocal.kind == VocalKind::Cry) ++summary.cries;
        obs = session.step(action);
        for (const auto& e : obs.events) {
            if (e.tag == "delivery") ++summary.deliveries[e.detail];
            else if (e.tag == "narration_started") ++summary.narrations;
            else if (e.tag == "word_service") ++summary.words_serviced;
        }
        if (hook) hook(action, obs);
        ++summary.steps;
    }
    summary.final_drives = obs.intero;
    return summary;
}

EpisodeSummary run_episode(Session& session, Agent& agent, std::int64_t steps, const StepHook& hook) {
    agent.begin_episode();
    return continue_episode(session, agent, session.reset(), steps, hook);
}

}  // namespace cradle
