#include "cradle/world.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace cradle {

double wrap_angle(double a) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

std::string_view kind_name(EntityKind kind) noexcept {
    switch (kind) {
        case EntityKind::None: return "none";
        case EntityKind::Agent: return "agent";
        case EntityKind::Caregiver: return "caregiver";
        case EntityKind::Crib: return "crib";
        case EntityKind::Wall: return "wall";
        case EntityKind::Toy: return "toy";
        case EntityKind::BottleWater: return "bottle_water";
        case EntityKind::BottleMilk: return "bottle_milk";
    }
    return "none";
}

std::optional<EntityKind> kind_from_name(std::string_view name) noexcept {
    for (int k = 0; k < kEntityKindCount; ++k) {
        const auto kind = static_cast<EntityKind>(k);
        if (kind_name(kind) == name) return kind;
    }
    return std::nullopt;
}

double kind_radius(EntityKind kind) noexcept {
    switch (kind) {
        case EntityKind::Agent: return 0.3;
        case EntityKind::Caregiver: return 0.3;
        case EntityKind::Crib: return 0.6;
        case EntityKind::Toy: return 0.2;
        case EntityKind::BottleWater:
        case EntityKind::BottleMilk: return 0.15;
        default: return 0.0;
    }
}

Entity* WorldState::find(int id) noexcept {
    auto it = std::lower_bound(entities.begin(), entities.end(), id,
                               [](const Entity& e, int v) { return e.id < v; });
    return (it != entities.end() && it->id == id) ? &*it : nullptr;
}

const Entity* WorldState::find(int id) const noexcept {
    return const_cast<WorldState*>(this)->find(id);
}

Entity& WorldState::at(int id) {
    if (auto* e = find(id)) return *e;
    throw std::out_of_range("no entity with id " + std::to_string(id));
}

const Entity& WorldState::at(int id) const {
    return const_cast<WorldState*>(this)->at(id);
}

Vec2 WorldState::clamp_to_room(Vec2 p) const noexcept {
    return {std::clamp(p.x, 0.0, room_size), std::clamp(p.y, 0.0, room_size)};
}

WorldState make_world(Rng rng, int sdr_dimension) {
    using namespace layout;
    WorldState w;
    w.sdr_dimension = sdr_dimension;
    auto add = [&](int id, EntityKind kind, std::string name, Vec2 at, double facing, int color) {
        Entity e;
        e.id = id;
        e.kind = kind;
        e.name = std::move(name);
        e.pose = {at, facing};
        e.color_code = color;
        e.home = at;
        w.entities.push_back(std::move(e));
    };
    add(kAgentId, EntityKind::Agent, "BABY", kCrib, 0.0, 1);
    add(kCaregiverId, EntityKind::Caregiver, "MOTHER", kIdlePost, bearing(kIdlePost, kCrib), 2);
    add(kCribId, EntityKind::Crib, "CRIB", kCrib, 0.0, 3);
    const double half = kRoomSize / 2.0;
    add(kFirstWallId + 0, EntityKind::Wall, "WALL", {half, 0.0}, 0.0, 4);
    add(kFirstWallId + 1, EntityKind::Wall, "WALL", {kRoomSize, half}, std::numbers::pi / 2, 4);
    add(kFirstWallId + 2, EntityKind::Wall, "WALL", {half, kRoomSize}, 0.0, 4);
    add(kFirstWallId + 3, EntityKind::Wall, "WALL", {0.0, half}, std::numbers::pi / 2, 4);
    add(kWaterBottleId, EntityKind::BottleWater, "WATER", kWaterShelf, 0.0, 5);
    add(kMilkBottleId, EntityKind::BottleMilk, "MILK", kMilkShelf, 0.0, 6);

    static constexpr std::array<const char*, kToyCount> toy_names{"BALL", "DUCK", "BEAR", "BLOCK"};
    std::vector<Vec2> taken{kCrib, kIdlePost, kWaterShelf, kMilkShelf};
    for (int i = 0; i < kToyCount; ++i) {
        Vec2 p;
        for (;;) {
            p = {rng.uniform(2.0, kRoomSize - 2.0), rng.uniform(2.0, kRoomSize - 2.0)};
            const bool clear = std::all_of(taken.begin(), taken.end(),
                                           [&](Vec2 q) { return distance(p, q) >= 1.5; });
            if (clear) break;
        }
        taken.push_back(p);
        add(kFirstToyId + i, EntityKind::Toy, toy_names[static_cast<std::size_t>(i)], p, 0.0, 7 + i);
    }
    w.agent_hand = kCrib + Vec2{0.1, 0.0};
    w.rng = rng;
    return w;
}

namespace {

struct CommandApplier {
    WorldState& world;
    StepReport& report;

    Entity* need(int id, const char* what) {
        Entity* e = world.find(id);
        if (!e) report.log.push_back(std::string("stale_command: ") + what + " references missing entity " +
                                     std::to_string(id));
        return e;
    }

    void operator()(const MoveToward& m) {
        Entity* e = need(m.entity_id, "move");
        if (!e) return;
        const Vec2 delta = m.target - e->pose.position;
        const double dist = delta.length();
        if (dist <= 0.0) return;
        const double step = std::min(m.max_step, dist);
        e->pose.facing = std::atan2(delta.y, delta.x);
        e->pose.position = world.clamp_to_room(e->pose.position + delta * (step / dist));
        if (step == dist) e->pose.position = world.clamp_to_room(m.target);
    }
    void operator()(const Attach& a) {
        Entity* item = need(a.item_id, "attach");
        Entity* holder = need(a.holder_id, "attach");
        if (!item || !holder) return;
        item->held_by = a.holder_id;
    }
    void operator()(const Release& r) {
        Entity* item = need(r.item_id, "release");
        if (!item) return;
        item->held_by.reset();
        item->pose.position = world.clamp_to_room(r.where);
    }
    void operator()(const ReturnHome& r) {
        Entity* item = need(r.item_id, "return_home");
        if (!item) return;
        item->held_by.reset();
        item->pose.position = item->home;
    }
    void operator()(const FaceToward& f) {
        Entity* e = need(f.entity_id, "face");
        if (!e) return;
        if (f.target != e->pose.position) e->pose.facing = bearing(e->pose.position, f.target);
    }
};

std::optional<int> toy_in_hand(const WorldState& w) {
    for (const auto& e : w.entities)
        if (e.kind == EntityKind::Toy && e.held_by == layout::kAgentId) return e.id;
    return std::nullopt;
}

}  // namespace

StepReport step_world(WorldState& world, std::span<const WorldCommand> commands,
                      const AgentEffects& effects) {
    StepReport report;
    CommandApplier apply{world, report};
    for (const auto& cmd : commands) std::visit(apply, cmd);

    Entity& agent = world.at(layout::kAgentId);
    if (effects.gaze) agent.pose.facing = wrap_angle(*effects.gaze);
    if (effects.hand) world.agent_hand = world.clamp_to_room(*effects.hand);

    // Grasp: close on the nearest free toy within reach, open to release.
    const auto held = toy_in_hand(world);
    if (!effects.grasp) {
    } else if (*effects.grasp > 0.5 && !held) {
        Entity* best = nullptr;
        double best_d = 0.0;
        for (auto& e : world.entities) {
            if (e.kind != EntityKind::Toy || !e.present || e.held_by) continue;
            const double d = distance(e.pose.position, world.agent_hand);
            if (d <= kind_radius(EntityKind::Toy) + layout::kGraspReach && (!best || d < best_d)) {
                best = &e;
                best_d = d;
            }
        }
        if (best) {
            best->held_by = layout::kAgentId;
            report.pickups.push_back(best->name);
        }
    } else if (*effects.grasp <= 0.5 && held) {
        world.at(*held).held_by.reset();
    }

    // Held items follow their holder: bottles at the mouth, toys in the hand,
    // anything the caregiver carries in front of her.
    for (auto& e : world.entities) {
        if (!e.held_by) continue;
        const Entity* holder = world.find(*e.held_by);
        if (!holder) {
            e.held_by.reset();
            continue;
        }
        if (holder->id == layout::kAgentId) {
            e.pose.position = is_bottle(e.kind)
                                  ? holder->pose.position + Vec2::polar(holder->pose.facing, layout::kMouthOffset)
                                  : world.agent_hand;
        } else {
            e.pose.position = world.clamp_to_room(holder->pose.position +
                                                  Vec2::polar(holder->pose.facing, layout::kCarryOffset));
        }
        e.pose.facing = holder->pose.facing;
    }

    for (auto s : effects.sounds) {
        s.emitted_step = world.step;
        world.pending_sounds.push_back(std::move(s));
    }
    ++world.step;
    return report;
}

std::optional<Reception> audible(const SoundEvent& event, Vec2 listener, int dimension, Rng& rng) {
    const double d = distance(event.source, listener);
    Reception r;
    r.source_id = event.source_id;
    r.kind = event.kind;
    r.distance = d;
    r.bearing = bearing(listener, event.source);
    switch (event.kind) {
        case SoundKind::Speech: {
            if (d > layout::kSpeechRange) return std::nullopt;
            const int flips = static_cast<int>(std::floor(d / layout::kSpeechFlipDistance));
            r.frame = apply_noise(event.frame, flips, dimension, rng);
            r.intensity = event.loudness * std::max(0.0, 1.0 - d / layout::kCryRange);
            return r;
        }
        case SoundKind::Cry:
        case SoundKind::Ambient: {
            r.intensity = event.loudness * std::max(0.0, 1.0 - d / layout::kCryRange);
            if (r.intensity < layout::kAudibleFloor) return std::nullopt;
            return r;
        }
    }
    return std::nullopt;
}

DeliveryReport deliver_pending(WorldState& world, std::span<const Listener> listeners) {
    DeliveryReport report;
    for (const auto& listener : listeners) {
        for (const auto& sound : world.pending_sounds) {
            if (sound.source_id == listener.id) continue;
            if (auto r = audible(sound, listener.position, world.sdr_dimension, world.rng))
                report.deliveries.push_back({listener.id, std::move(*r)});
            else
                ++report.dropped;
        }
    }
    report.sounds_processed = world.pending_sounds.size();
    world.pending_sounds.clear();
    return report;
}

RayHit raycast(const WorldState& world, Vec2 origin, double angle, double max_range) {
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    double best = std::numeric_limits<double>::infinity();
    RayHit hit;
    for (const auto& e : world.entities) {
        if (!e.present) continue;
        const double r = kind_radius(e.kind);
        if (r <= 0.0) continue;
        const Vec2 f = origin - e.pose.position;
        const double c = f.x * f.x + f.y * f.y - r * r;
        if (c <= 0.0) continue;  // origin inside the circle
        const double b = f.x * dir.x + f.y * dir.y;
        const double disc = b * b - c;
        if (disc < 0.0) continue;
        const double t = -b - std::sqrt(disc);
        if (t >= 0.0 && t < best) {
            best = t;
            hit.kind = e.kind;
            hit.entity_id = e.id;
        }
    }
    // Room walls: ids in order bottom (y=0), right, top, left.
    const double size = world.room_size;
    auto wall = [&](double t, int id) {
        if (t >= 0.0 && t < best) {
            best = t;
            hit.kind = EntityKind::Wall;
            hit.entity_id = id;
        }
    };
    if (dir.x > 0) wall((size - origin.x) / dir.x, layout::kFirstWallId + 1);
    if (dir.x < 0) wall(-origin.x / dir.x, layout::kFirstWallId + 3);
    if (dir.y > 0) wall((size - origin.y) / dir.y, layout::kFirstWallId + 2);
    if (dir.y < 0) wall(-origin.y / dir.y, layout::kFirstWallId + 0);

    if (best > max_range) return RayHit{EntityKind::None, 1.0, layout::kViewRange, -1};
    hit.distance = best;
    hit.depth = std::min(1.0, best / layout::kViewRange);
    return hit;
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string_view sound_kind_name(SoundKind k) {
    switch (k) {
        case SoundKind::Cry: return "cry";
        case SoundKind::Speech: return "speech";
        case SoundKind::Ambient: return "ambient";
    }
    return "ambient";
}

}  // namespace

std::string canonical_serialization(const WorldState& world) {
    std::vector<const Entity*> sorted;
    for (const auto& e : world.entities) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

    std::string out;
    out += "step=" + std::to_string(world.step) + "\n";
    out += "room=" + fixed6(world.room_size) + "\n";
    for (const auto* e : sorted) {
        out += "entity id=" + std::to_string(e->id);
        out += " kind=" + std::string(kind_name(e->kind));
        out += " name=" + e->name;
        out += " x=" + fixed6(e->pose.position.x);
        out += " y=" + fixed6(e->pose.position.y);
        out += " facing=" + fixed6(e->pose.facing);
        out += " color=" + std::to_string(e->color_code);
        out += " held_by=" + (e->held_by ? std::to_string(*e->held_by) : std::string("-"));
        out += " present=" + std::string(e->present ? "1" : "0");
        out += "\n";
    }
    for (const auto& s : world.pending_sounds) {
        out += "sound source=" + std::to_string(s.source_id);
        out += " kind=" + std::string(sound_kind_name(s.kind));
        out += " x=" + fixed6(s.source.x) + " y=" + fixed6(s.source.y);
        out += " loudness=" + fixed6(s.loudness);
        out += " frame=";
        for (std::size_t i = 0; i < s.frame.active.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(s.frame.active[i]);
        }
        out += " emitted=" + std::to_string(s.emitted_step) + "\n";
    }
    out += "hand x=" + fixed6(world.agent_hand.x) + " y=" + fixed6(world.agent_hand.y) + "\n";
    out += "rng=" + world.rng.state_hex() + "\n";
    return out;
}

std::uint64_t world_hash(const WorldState& world) {
    return fnv1a64(canonical_serialization(world));
}

}  // namespace cradle
