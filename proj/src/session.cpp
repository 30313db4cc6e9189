#include "cradle/session.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "cradle/error.hpp"

namespace cradle {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

ObservationFrame Session::reset(SessionConfig config) {
    config_ = std::move(config);
    return reset();
}

ObservationFrame Session::reset() {
    config_.validate();
    Rng rng(config_.seed);
    codebook_ = SdrCodebook::build(rng, config_.codec.dimension, config_.codec.cardinality);
    world_ = make_world(rng, config_.codec.dimension);
    body_ = AgentBody{};
    body_.position = world_.at(layout::kAgentId).pose.position;
    body_.gaze = world_.at(layout::kAgentId).pose.facing;
    world_.agent_hand = body_.hand();
    drives_ = config_.initial;
    caregiver_ = CaregiverState{};
    caregiver_.last_delivery = config_.initial_last_delivery;
    reflexes_ = ReflexSet::defaults(config_.reflexes);
    stage_offset_ = config_.schedule.start_step(config_.start_stage);
    heard_last_step_ = false;
    live_ = true;

    if (config_.record_path && !record_file_) {
        record_file_ = std::make_shared<std::ofstream>(*config_.record_path, std::ios::trunc);
        if (!*record_file_) throw ConfigError("record_path", "cannot open " + *config_.record_path);
        record_ = record_file_.get();
    }

    std::vector<Event> events;
    stage_ = -1;
    sync_stage(events, false);
    last_obs_ = observe({}, AudioSense{});
    write_header();
    write_entry(nullptr, last_obs_);
    return last_obs_;
}

void Session::sync_stage(std::vector<Event>& events, bool announce) {
    const int now = stage_at(config_.schedule, stage_offset_ + world_.step).index;
    if (now == stage_) return;
    stage_ = now;
    const GatingMask& m = mask();
    int toys = 0;
    for (auto& e : world_.entities) {
        switch (e.kind) {
            case EntityKind::Toy: e.present = m.shows(EntityKind::Toy) && toys++ < m.toy_count; break;
            case EntityKind::BottleWater:
            case EntityKind::BottleMilk:
                e.present = m.shows(e.kind);
                break;
            default: break;
        }
    }
    if (announce) events.push_back({"stage", std::string(stage_name(now))});
}

ObservationFrame Session::observe(std::vector<Event> events, const AudioSense& audio) {
    ObservationFrame obs;
    obs.t = world_.step;
    obs.stage = stage_;
    obs.retina = render_retina(world_, body_);
    obs.audio = audio;
    obs.touch = sample_touch(world_, body_, caregiver_.mode == CaregiverMode::Feeding);
    obs.proprio = {body_.gaze, body_.arm_extension, body_.arm_angle, body_.grasp, body_.suck};
    obs.intero = drives_;
    obs.events = std::move(events);
    gate_observation(mask(), obs, world_.rng, config_.codec.dimension);
    return obs;
}

ObservationFrame Session::step(ActionCommand action) {
    if (!live_) throw NoSession();
    const ActionCommand received = action;
    std::vector<Event> events;

    if (action.muscles.clamp()) events.push_back({"action_clamped", "muscles"});
    if (action.vocal.kind == VocalKind::Cry) action.vocal.loudness = std::clamp(action.vocal.loudness, 0.0, 1.0);
    for (auto& e : gate_action(mask(), action)) events.push_back(std::move(e));
    if (config_.reflexes.server_side) action = overlay(action, evaluate(reflexes_, last_obs_), &events);

    body_ = apply_muscles(body_, action.muscles);

    const Listener listeners[] = {{layout::kAgentId, body_.position},
                                  {layout::kCaregiverId, world_.at(layout::kCaregiverId).pose.position}};
    const DeliveryReport delivered = deliver_pending(world_, listeners);

    AudioSense audio;
    Heard heard;
    for (const auto& d : delivered.deliveries) {
        const Reception& r = d.reception;
        if (d.listener_id == layout::kAgentId) {
            if (r.intensity > audio.intensity || audio.frame.empty()) {
                audio.frame = r.frame;
                audio.intensity = r.intensity;
                audio.bearing = wrap_angle(r.bearing - body_.gaze);
            }
        } else if (r.kind == SoundKind::Cry) {
            heard.cry_intensity = std::max(heard.cry_intensity, r.intensity);
        } else if (r.kind == SoundKind::Speech) {
            heard.speech = r.frame;
        }
    }
    const bool hearing = audio.intensity > 0.0 || !audio.frame.empty();
    audio.onset = hearing && !heard_last_step_;
    heard_last_step_ = hearing;

    const CaregiverContext ctx{codebook_, config_.codec, config_.caregiver, mask(), world_.step};
    CaregiverOutput cg = caregiver_step(world_, caregiver_, heard, ctx);

    AgentEffects effects;
    effects.gaze = body_.gaze;
    effects.hand = body_.hand();
    effects.grasp = body_.grasp;
    effects.sounds = std::move(cg.sounds);
    const Vec2 mouth = body_.position + Vec2::polar(body_.gaze, layout::kMouthOffset);
    if (action.vocal.kind == VocalKind::Cry && action.vocal.loudness > 0.0) {
        SoundEvent s;
        s.source_id = layout::kAgentId;
        s.source = mouth;
        s.kind = SoundKind::Cry;
        s.loudness = action.vocal.loudness;
        effects.sounds.push_back(std::move(s));
    } else if (action.vocal.kind == VocalKind::Speech && !action.vocal.frame.empty()) {
        SoundEvent s;
        s.source_id = layout::kAgentId;
        s.source = mouth;
        s.kind = SoundKind::Speech;
        s.loudness = 1.0;
        s.frame = action.vocal.frame;
        effects.sounds.push_back(std::move(s));
    }
    const StepReport report = step_world(world_, cg.commands, effects);
    for (const auto& p : report.pickups) events.push_back({"grasped", p});
    for (auto& e : cg.events) events.push_back(std::move(e));

    body_.mouth_contact.reset();
    for (const auto& e : world_.entities)
        if (is_bottle(e.kind) && e.held_by == layout::kAgentId) body_.mouth_contact = e.id;

    drives_ = tick(drives_, config_.drives);
    if (auto in = ingest_if_sucking(world_, body_, body_.suck)) {
        drives_ = ingest(drives_, in->substance, in->amount);
        events.push_back({"ingest", std::string(substance_name(in->substance))});
    }

    sync_stage(events, true);
    last_obs_ = observe(std::move(events), audio);
    write_entry(&received, last_obs_);
    return last_obs_;
}

json Session::step_json(const json& action) {
    if (!live_) throw NoSession();
    return observation_to_json(step(action_from_json(action, config_.codec.dimension)));
}

void Session::write_header() {
    if (!record_) return;
    json cfg = config_to_json(config_);
    cfg.erase("record_path");
    *record_ << json{{"type", "header"}, {"version", 1}, {"config", cfg}}.dump() << '\n';
}

void Session::write_entry(const ActionCommand* action, const ObservationFrame& obs) {
    if (!record_) return;
    json line{{"t", obs.t},
              {"action", action ? action_to_json(*action) : json(nullptr)},
              {"obs", observation_to_json(obs)},
              {"world_hash", hash_hex(hash())}};
    *record_ << line.dump() << '\n';
    record_->flush();
}

ReplayReport replay(std::istream& in) {
    ReplayReport report;
    std::string text;
    std::size_t line_no = 0;

    auto parse = [&](const std::string& s) {
        try {
            return json::parse(s);
        } catch (const json::parse_error& e) {
            throw LogParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
    };

    if (!std::getline(in, text)) throw LogParseError(1, "empty log");
    ++line_no;
    const json header = parse(text);
    if (!header.is_object() || header.value("type", "") != "header" || !header.contains("config"))
        throw LogParseError(line_no, "missing header");
    if (header.value("version", 0) != 1) throw LogParseError(line_no, "unsupported log version");
    SessionConfig config;
    try {
        config = config_from_json(header.at("config"));
    } catch (const ConfigError& e) {
        throw LogParseError(line_no, e.what());
    }
    config.record_path.reset();

    Session session(config);
    std::int64_t expected_t = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.empty()) throw LogParseError(line_no, "blank line");
        // The observation subtree is only tokenized here; it is compared
        // through the regenerated line below.
        bool has_obs = false;
        json entry;
        try {
            entry = json::parse(text, [&](int depth, json::parse_event_t event, json& value) {
                if (depth == 1 && event == json::parse_event_t::key && value == "obs") {
                    has_obs = true;
                    return false;
                }
                return true;
            });
        } catch (const json::parse_error& e) {
            throw LogParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!entry.is_object() || !entry.contains("t") || !entry.contains("action") || !has_obs ||
            !entry.contains("world_hash"))
            throw LogParseError(line_no, "entry needs t, action, obs and world_hash");
        if (!entry["t"].is_number_integer() || entry["t"].get<std::int64_t>() != expected_t)
            throw LogParseError(line_no, "expected t=" + std::to_string(expected_t));
        if (!entry["world_hash"].is_string()) throw LogParseError(line_no, "world_hash must be a hex string");

        ObservationFrame obs;
        if (expected_t == 0) {
            if (!entry["action"].is_null()) throw LogParseError(line_no, "first entry must carry a null action");
            obs = session.reset();
        } else {
            ActionCommand action;
            try {
                action = action_from_json(entry["action"], config.codec.dimension);
            } catch (const Error& e) {
                throw LogParseError(line_no, e.what());
            }
            obs = session.step(action);
        }
        ++report.entries;
        if (!report.first_divergence) {
            const std::string hash = hash_hex(session.hash());
            json fresh = observation_to_json(obs);
            const std::string expected =
                json{{"t", expected_t}, {"action", entry["action"]}, {"obs", fresh}, {"world_hash", hash}}.dump();
            if (expected != text) {
                const json full = parse(text);
                if (full["world_hash"] != hash) {
                    report.first_divergence = expected_t;
                    report.reason = "world_hash";
                } else if (full["obs"] != fresh) {
                    report.first_divergence = expected_t;
                    report.reason = "obs";
                }
            }
        }
        ++expected_t;
    }
    if (report.entries == 0) throw LogParseError(line_no + 1, "log has no entries");
    return report;
}

}  // namespace cradle
