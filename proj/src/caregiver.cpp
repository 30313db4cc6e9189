#include "cradle/caregiver.hpp"

#include <algorithm>

namespace cradle {

namespace {

constexpr double kArrive = 1e-9;
constexpr double kPickupDistance = 0.3;

}  // namespace

std::string_view mode_name(CaregiverMode mode) noexcept {
    switch (mode) {
        case CaregiverMode::Idle: return "Idle";
        case CaregiverMode::Approach: return "Approach";
        case CaregiverMode::Deliver: return "Deliver";
        case CaregiverMode::Feeding: return "Feeding";
        case CaregiverMode::PlayIntro: return "PlayIntro";
        case CaregiverMode::Return: return "Return";
    }
    return "Idle";
}

Substance cry_substance(const CaregiverState& state) noexcept {
    return state.last_delivery == Substance::Water ? Substance::Milk : Substance::Water;
}

int bottle_for(Substance s) noexcept {
    return s == Substance::Water ? layout::kWaterBottleId : layout::kMilkBottleId;
}

std::optional<Substance> hear_agent_speech(CaregiverState& state, const std::optional<SdrFrame>& frame,
                                           const SdrCodebook& codebook, const CodecParams& codec,
                                           const CaregiverParams& params) {
    if (frame && !frame->empty()) {
        state.speech_buffer.push_back(*frame);
        return std::nullopt;
    }
    if (state.speech_buffer.empty()) return std::nullopt;
    const StreamDecode decoded =
        decode_stream_detailed(codebook, state.speech_buffer, codec.frames_per_symbol, codec.theta_min);
    state.speech_buffer.clear();
    if (decoded.mean_overlap < params.word_overlap_threshold) return std::nullopt;
    if (decoded.text == "WATER") return Substance::Water;
    if (decoded.text == "MILK") return Substance::Milk;
    return std::nullopt;
}

Narration make_narration(const SdrCodebook& codebook, const CodecParams& codec, const std::string& word,
                         int repeats) {
    Narration n;
    n.utterance = word;
    n.remaining_repeats = repeats;
    std::string text;
    for (int r = 0; r < repeats; ++r) {
        if (r) text += ' ';
        text += word;
    }
    n.frames = encode_utterance(codebook, text, codec.frames_per_symbol, codec.gap_frames).frames;
    return n;
}

namespace {

class Step {
public:
    Step(const WorldState& world, CaregiverState& state, const Heard& heard, const CaregiverContext& ctx)
        : world_(world), s_(state), heard_(heard), ctx_(ctx), self_(world.at(layout::kCaregiverId)),
          agent_(world.at(layout::kAgentId)) {}

    CaregiverOutput run() {
        if (ctx_.mask.can(capability::kWordService)) {
            out_.service_request = hear_agent_speech(s_, heard_.speech, ctx_.codebook, ctx_.codec, ctx_.params);
            if (out_.service_request)
                out_.events.push_back({"word_heard", std::string(substance_name(*out_.service_request))});
        } else {
            s_.speech_buffer.clear();
        }

        switch (s_.mode) {
            case CaregiverMode::Idle: idle(); break;
            case CaregiverMode::Approach: approach(); break;
            case CaregiverMode::Deliver: deliver(); break;
            case CaregiverMode::Feeding: feeding(); break;
            case CaregiverMode::PlayIntro: play_intro(); break;
            case CaregiverMode::Return: go_back(); break;
        }
        narrate();
        return std::move(out_);
    }

private:
    bool cry_call() const {
        return ctx_.mask.can(capability::kFeed) && heard_.cry_intensity >= ctx_.params.cry_intensity_threshold;
    }

    void set_mode(CaregiverMode m) {
        s_.mode = m;
        s_.mode_since = ctx_.step;
        out_.events.push_back({"caregiver_mode", std::string(mode_name(m))});
    }

    std::optional<int> carried_item() const {
        for (const auto& e : world_.entities)
            if (e.held_by == layout::kCaregiverId) return e.id;
        return std::nullopt;
    }

    // Leaves whatever she carries (toys where she stands, bottles on their
    // shelf) and picks up the requested bottle.
    void start_approach(Substance s, const char* reason) {
        if (auto item = carried_item()) {
            const Entity& e = world_.at(*item);
            if (e.kind == EntityKind::Toy)
                out_.commands.push_back(Release{*item, e.pose.position});
            else if (*item != bottle_for(s))
                out_.commands.push_back(ReturnHome{*item});
        }
        if (s_.mode == CaregiverMode::PlayIntro) finish_intro(false);
        s_.substance = s;
        s_.cry_absent = 0;
        out_.commands.push_back(Attach{bottle_for(s), layout::kCaregiverId});
        out_.events.push_back({"investigate", reason});
        set_mode(CaregiverMode::Approach);
    }

    bool interrupt() {
        if (cry_call()) {
            start_approach(cry_substance(s_), "cry");
            return true;
        }
        if (out_.service_request) {
            const Substance s = *out_.service_request;
            out_.events.push_back({"word_service", s == Substance::Water ? "WATER" : "MILK"});
            start_approach(s, "word");
            return true;
        }
        return false;
    }

    bool walk_to(Vec2 target) {
        const double d = distance(self_.pose.position, target);
        if (d <= kArrive) return true;
        out_.commands.push_back(MoveToward{layout::kCaregiverId, target, ctx_.params.walk_speed});
        return false;
    }

    void idle() {
        if (interrupt()) return;
        if (ctx_.mask.can(capability::kPlayIntro) && ctx_.step - s_.last_intro_end >= ctx_.params.play_interval) {
            const int toy = pick_toy();
            if (toy >= 0) {
                s_.play_object = toy;
                s_.play_phase = PlayPhase::Fetch;
                s_.phase_since = ctx_.step;
                out_.events.push_back({"intro_started", world_.at(toy).name});
                set_mode(CaregiverMode::PlayIntro);
            }
        }
    }

    int pick_toy() {
        std::vector<int> toys;
        for (const auto& e : world_.entities)
            if (e.kind == EntityKind::Toy && e.present && !e.held_by) toys.push_back(e.id);
        if (toys.empty()) return -1;
        const int id = toys[static_cast<std::size_t>(s_.next_toy) % toys.size()];
        ++s_.next_toy;
        return id;
    }

    void approach() {
        const Vec2 me = self_.pose.position;
        const Vec2 baby = agent_.pose.position;
        const double d = distance(me, baby);
        if (d <= ctx_.params.deliver_distance + kArrive) {
            set_mode(CaregiverMode::Deliver);
            return;
        }
        const Vec2 stop = baby + (me - baby) * (ctx_.params.deliver_distance / d);
        out_.commands.push_back(MoveToward{layout::kCaregiverId, stop, ctx_.params.walk_speed});
    }

    void deliver() {
        const Substance s = s_.substance.value_or(Substance::Water);
        const int bottle = bottle_for(s);
        out_.commands.push_back(FaceToward{layout::kCaregiverId, agent_.pose.position});
        out_.commands.push_back(Attach{bottle, layout::kAgentId});
        s_.last_delivery = s;
        s_.cry_absent = 0;
        out_.events.push_back({"delivery", std::string(substance_name(s))});
        start_narration(world_.at(bottle).name);
        set_mode(CaregiverMode::Feeding);
    }

    void feeding() {
        s_.cry_absent = heard_.cry_intensity > 0.0 ? 0 : s_.cry_absent + 1;
        const bool settled = s_.cry_absent >= ctx_.params.cry_absent_steps;
        const bool timed_out = ctx_.step - s_.mode_since >= ctx_.params.feeding_timeout;
        if (settled || timed_out) {
            out_.commands.push_back(Attach{bottle_for(s_.substance.value_or(Substance::Water)), layout::kCaregiverId});
            out_.events.push_back({"feeding_ended", settled ? "settled" : "timeout"});
            s_.substance.reset();
            set_mode(CaregiverMode::Return);
        }
    }

    void go_back() {
        if (interrupt()) return;
        if (walk_to(layout::kIdlePost)) {
            if (auto item = carried_item()) out_.commands.push_back(ReturnHome{*item});
            out_.commands.push_back(FaceToward{layout::kCaregiverId, agent_.pose.position});
            set_mode(CaregiverMode::Idle);
        }
    }

    void finish_intro(bool completed) {
        s_.last_intro_end = ctx_.step;
        if (!completed) out_.events.push_back({"intro_aborted", world_.at(s_.play_object).name});
        s_.play_object = -1;
    }

    void abort_intro() {
        if (auto item = carried_item()) out_.commands.push_back(Release{*item, world_.at(*item).pose.position});
        finish_intro(false);
        set_mode(CaregiverMode::Return);
    }

    void play_intro() {
        if (interrupt()) return;
        const Entity* toy = world_.find(s_.play_object);
        if (!toy || !toy->present || (toy->held_by && *toy->held_by != layout::kCaregiverId)) {
            abort_intro();
            return;
        }
        switch (s_.play_phase) {
            case PlayPhase::Fetch: {
                if (distance(self_.pose.position, toy->pose.position) <= kPickupDistance + kArrive) {
                    out_.commands.push_back(Attach{toy->id, layout::kCaregiverId});
                    s_.play_phase = PlayPhase::Present;
                    s_.phase_since = ctx_.step;
                } else {
                    const Vec2 d = self_.pose.position - toy->pose.position;
                    const Vec2 stop = toy->pose.position + d * (kPickupDistance / d.length());
                    out_.commands.push_back(MoveToward{layout::kCaregiverId, stop, ctx_.params.walk_speed});
                }
                break;
            }
            case PlayPhase::Present: {
                const Vec2 point = world_.clamp_to_room(
                    agent_.pose.position + Vec2::polar(agent_.pose.facing, ctx_.params.present_distance));
                if (walk_to(point)) {
                    out_.commands.push_back(FaceToward{layout::kCaregiverId, agent_.pose.position});
                    start_narration(toy->name);
                    s_.play_phase = PlayPhase::Dwell;
                    s_.phase_since = ctx_.step;
                }
                break;
            }
            case PlayPhase::Dwell:
                out_.commands.push_back(FaceToward{layout::kCaregiverId, agent_.pose.position});
                if (ctx_.step - s_.phase_since >= ctx_.params.play_dwell) {
                    s_.play_phase = PlayPhase::Restore;
                    s_.phase_since = ctx_.step;
                }
                break;
            case PlayPhase::Restore: {
                const Vec2 home = toy->home;
                const Vec2 d = self_.pose.position - home;
                if (d.length() <= kPickupDistance + kArrive) {
                    out_.commands.push_back(ReturnHome{toy->id});
                    finish_intro(true);
                    set_mode(CaregiverMode::Return);
                } else {
                    const Vec2 stop = home + d * (kPickupDistance / d.length());
                    out_.commands.push_back(MoveToward{layout::kCaregiverId, stop, ctx_.params.walk_speed});
                }
                break;
            }
        }
    }

    void start_narration(const std::string& word) {
        if (!ctx_.mask.can(capability::kNarrate)) return;
        s_.narration = make_narration(ctx_.codebook, ctx_.codec, word, ctx_.params.narration_repeats);
    }

    // One frame per step; silent frames emit nothing.
    void narrate() {
        if (!s_.narration) return;
        Narration& n = *s_.narration;
        if (!n.started) {
            out_.events.push_back({"narration_started", n.utterance});
            n.started = true;
        }
        if (n.cursor < n.frames.size()) {
            const SdrFrame& f = n.frames[n.cursor++];
            if (!f.empty()) {
                SoundEvent e;
                e.source_id = layout::kCaregiverId;
                e.source = self_.pose.position;
                e.kind = SoundKind::Speech;
                e.loudness = 1.0;
                e.frame = f;
                out_.sounds.push_back(std::move(e));
            }
        }
        const std::size_t per_word =
            n.utterance.size() * static_cast<std::size_t>(ctx_.codec.frames_per_symbol) +
            static_cast<std::size_t>(ctx_.codec.gap_frames);
        n.remaining_repeats = static_cast<int>((n.frames.size() - n.cursor + per_word - 1) / per_word);
        if (n.cursor >= n.frames.size()) s_.narration.reset();
    }

    const WorldState& world_;
    CaregiverState& s_;
    const Heard& heard_;
    const CaregiverContext& ctx_;
    const Entity& self_;
    const Entity& agent_;
    CaregiverOutput out_;
};

}  // namespace

CaregiverOutput caregiver_step(const WorldState& world, CaregiverState& state, const Heard& heard,
                               const CaregiverContext& ctx) {
    return Step(world, state, heard, ctx).run();
}

}  // namespace cradle
