#pragma once

// The infant body: muscle channels in, retina / touch / ingestion out.

#include <array>
#include <optional>

#include "cradle/drives.hpp"
#include "cradle/world.hpp"

namespace cradle {

struct MuscleCommand {
    double head_turn = 0.0;   // [-1, 1]
    double arm_turn = 0.0;    // [-1, 1]
    double arm_extend = 0.0;  // [-1, 1]
    double grasp = 0.0;       // [0, 1]
    double suck = 0.0;        // [0, 1]

    // Clamps every channel; returns true when any value was out of range.
    bool clamp() noexcept;
    bool operator==(const MuscleCommand&) const = default;
};

namespace body_constants {
constexpr double kTurnRate = 0.2;      // rad per unit command per step
constexpr double kExtendRate = 0.1;    // extension per unit command per step
constexpr double kArmBase = 0.1;       // hand distance at zero extension (m)
constexpr double kArmReach = 0.5;      // extra hand distance at full extension (m)
constexpr double kSuckThreshold = 0.5;
constexpr double kIngestPerStep = 0.05;
}  // namespace body_constants

struct AgentBody {
    Vec2 position = layout::kCrib;
    double gaze = 0.0;           // (-pi, pi]
    double arm_extension = 0.0;  // [0, 1]
    double arm_angle = 0.0;      // world frame, (-pi, pi]
    double grasp = 0.0;
    double suck = 0.0;
    std::optional<int> mouth_contact;

    Vec2 hand() const noexcept;
    bool operator==(const AgentBody&) const = default;
};

AgentBody apply_muscles(AgentBody body, MuscleCommand cmd);

struct RetinaCell {
    int kind = 0;
    double depth = 0.0;
    bool operator==(const RetinaCell&) const = default;
};

struct Retina {
    static constexpr int kSize = 16;
    static constexpr double kFieldOfView = 2.0943951023931953;  // 120 degrees

    std::array<RetinaCell, kSize * kSize> cells{};  // row-major

    RetinaCell& at(int row, int col) { return cells[static_cast<std::size_t>(row * kSize + col)]; }
    const RetinaCell& at(int row, int col) const {
        return cells[static_cast<std::size_t>(row * kSize + col)];
    }
    bool operator==(const Retina&) const = default;

    // Column 0 is the leftmost (counter-clockwise) bearing.
    static double column_offset(int col) noexcept;
    // Fraction of the view range visible in a row; the two horizon rows see 1.0.
    static double row_range(int row) noexcept;
};

Retina render_retina(const WorldState& world, const AgentBody& body);

// Kind at the centre of the retina (rows 7-8, columns 7-8, nearest wins).
EntityKind fovea_kind(const Retina& retina) noexcept;

struct TouchGrid {
    std::array<double, 64> torso{};  // 8x8, row-major
    double mouth = 0.0;
    double hand = 0.0;
    double crib = 0.0;
    bool operator==(const TouchGrid&) const = default;
};

TouchGrid sample_touch(const WorldState& world, const AgentBody& body, bool caregiver_feeding);

struct Ingestion {
    Substance substance;
    double amount;
};

std::optional<Ingestion> ingest_if_sucking(const WorldState& world, const AgentBody& body,
                                           double suck_level);

}  // namespace cradle
