#pragma once

// Room, entities, sound propagation and the deterministic world step.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cradle/rng.hpp"
#include "cradle/sdr.hpp"

namespace cradle {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const noexcept { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const noexcept { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    double length() const noexcept { return std::hypot(x, y); }
    bool operator==(const Vec2&) const = default;

    static Vec2 polar(double angle, double radius) noexcept {
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }
};

inline double distance(Vec2 a, Vec2 b) noexcept { return (b - a).length(); }
inline double bearing(Vec2 from, Vec2 to) noexcept { return std::atan2(to.y - from.y, to.x - from.x); }

// Wraps to (-pi, pi].
double wrap_angle(double a) noexcept;

enum class EntityKind : int {
    None = 0,
    Agent = 1,
    Caregiver = 2,
    Crib = 3,
    Wall = 4,
    Toy = 5,
    BottleWater = 6,
    BottleMilk = 7,
};

constexpr int kEntityKindCount = 8;

std::string_view kind_name(EntityKind kind) noexcept;
std::optional<EntityKind> kind_from_name(std::string_view name) noexcept;
double kind_radius(EntityKind kind) noexcept;
inline bool is_bottle(EntityKind k) noexcept {
    return k == EntityKind::BottleWater || k == EntityKind::BottleMilk;
}

struct Pose {
    Vec2 position;
    double facing = 0.0;
    bool operator==(const Pose&) const = default;
};

struct Entity {
    int id = 0;
    EntityKind kind = EntityKind::None;
    std::string name;
    Pose pose;
    int color_code = 0;
    std::optional<int> held_by;
    bool present = true;
    Vec2 home;

    bool operator==(const Entity&) const = default;
};

enum class SoundKind { Cry, Speech, Ambient };

struct SoundEvent {
    int source_id = -1;
    Vec2 source;
    SoundKind kind = SoundKind::Ambient;
    double loudness = 1.0;
    SdrFrame frame;
    std::int64_t emitted_step = 0;

    bool operator==(const SoundEvent&) const = default;
};

struct Reception {
    int source_id = -1;
    SoundKind kind = SoundKind::Ambient;
    double intensity = 0.0;
    double distance = 0.0;
    double bearing = 0.0;  // world-frame angle from listener to source
    SdrFrame frame;
};

namespace layout {
constexpr double kRoomSize = 20.0;
constexpr Vec2 kCrib{4.0, 4.0};
constexpr Vec2 kIdlePost{10.0, 4.0};
constexpr Vec2 kWaterShelf{10.5, 3.0};
constexpr Vec2 kMilkShelf{10.5, 5.0};
constexpr double kCryRange = 12.0;
constexpr double kSpeechRange = 8.0;
constexpr double kSpeechFlipDistance = 4.0;
constexpr double kAudibleFloor = 0.01;
constexpr double kViewRange = 10.0;
constexpr double kMouthOffset = 0.2;
constexpr double kCarryOffset = 0.4;
constexpr double kGraspReach = 0.15;

constexpr int kAgentId = 0;
constexpr int kCaregiverId = 1;
constexpr int kCribId = 2;
constexpr int kFirstWallId = 3;
constexpr int kWaterBottleId = 7;
constexpr int kMilkBottleId = 8;
constexpr int kFirstToyId = 9;
constexpr int kToyCount = 4;
}  // namespace layout

struct WorldState {
    std::int64_t step = 0;
    double room_size = layout::kRoomSize;
    int sdr_dimension = 512;
    std::vector<Entity> entities;  // sorted by id
    std::vector<SoundEvent> pending_sounds;
    Vec2 agent_hand;
    Rng rng;

    Entity* find(int id) noexcept;
    const Entity* find(int id) const noexcept;
    Entity& at(int id);
    const Entity& at(int id) const;
    Vec2 clamp_to_room(Vec2 p) const noexcept;
    bool operator==(const WorldState&) const = default;
};

// Builds the room and places entities; toy positions are drawn from `rng`.
WorldState make_world(Rng rng, int sdr_dimension);

// Commands applied by step_world, normally issued by the caregiver.
struct MoveToward {
    int entity_id;
    Vec2 target;
    double max_step;
};
struct Attach {
    int item_id;
    int holder_id;
};
struct Release {
    int item_id;
    Vec2 where;
};
struct ReturnHome {
    int item_id;
};
struct FaceToward {
    int entity_id;
    Vec2 target;
};
using WorldCommand = std::variant<MoveToward, Attach, Release, ReturnHome, FaceToward>;

// What the infant body contributes to the step.
// Unset fields leave the world untouched.
struct AgentEffects {
    std::optional<double> gaze;
    std::optional<Vec2> hand;
    std::optional<double> grasp;
    std::vector<SoundEvent> sounds;
};

struct StepReport {
    std::vector<std::string> log;  // stale-command notices
    std::vector<std::string> pickups;
};

// Applies commands (clamped to the room), grasp pick/place and held-item
// tracking, queues this step's sounds and increments the step counter.
// Sounds pending at entry must have been delivered with deliver_pending().
StepReport step_world(WorldState& world, std::span<const WorldCommand> commands,
                      const AgentEffects& effects);

// Cry: intensity = loudness * max(0, 1 - d / R_cry), inaudible below 0.01.
// Speech: delivered iff d <= R_speech, with floor(d / 4) extra flips.
std::optional<Reception> audible(const SoundEvent& event, Vec2 listener, int dimension, Rng& rng);

struct Listener {
    int id;
    Vec2 position;
};

struct Delivery {
    int listener_id;
    Reception reception;
};

struct DeliveryReport {
    std::vector<Delivery> deliveries;
    std::size_t sounds_processed = 0;
    std::size_t dropped = 0;  // listener/sound pairs out of range
};

// Delivers every pending sound to every listener other than its source,
// then discards them. Listener order, then emission order, fixes the draws.
DeliveryReport deliver_pending(WorldState& world, std::span<const Listener> listeners);

struct RayHit {
    EntityKind kind = EntityKind::None;
    double depth = 1.0;     // distance / view range, clamped to 1
    double distance = 0.0;  // metres; view range when nothing hit
    int entity_id = -1;
};

// Nearest hit among present entity circles and the room walls. Circles that
// contain the origin are skipped.
RayHit raycast(const WorldState& world, Vec2 origin, double angle,
               double max_range = layout::kViewRange);

// Fixed-format text: step, entities by id, pending sounds, rng state. Floats
// are rendered with 6 decimals.
std::string canonical_serialization(const WorldState& world);
std::uint64_t world_hash(const WorldState& world);

}  // namespace cradle
