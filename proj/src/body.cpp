#include "cradle/body.hpp"

#include <algorithm>
#include <cmath>

namespace cradle {

using namespace body_constants;

namespace {

bool clamp_channel(double& v, double lo, double hi) {
    if (std::isnan(v)) {
        v = 0.0;
        return true;
    }
    const double c = std::clamp(v, lo, hi);
    const bool changed = c != v;
    v = c;
    return changed;
}

}  // namespace

bool MuscleCommand::clamp() noexcept {
    bool flagged = false;
    flagged |= clamp_channel(head_turn, -1.0, 1.0);
    flagged |= clamp_channel(arm_turn, -1.0, 1.0);
    flagged |= clamp_channel(arm_extend, -1.0, 1.0);
    flagged |= clamp_channel(grasp, 0.0, 1.0);
    flagged |= clamp_channel(suck, 0.0, 1.0);
    return flagged;
}

Vec2 AgentBody::hand() const noexcept {
    return position + Vec2::polar(arm_angle, kArmBase + kArmReach * arm_extension);
}

AgentBody apply_muscles(AgentBody body, MuscleCommand cmd) {
    cmd.clamp();
    body.gaze = wrap_angle(body.gaze + cmd.head_turn * kTurnRate);
    body.arm_angle = wrap_angle(body.arm_angle + cmd.arm_turn * kTurnRate);
    body.arm_extension = std::clamp(body.arm_extension + cmd.arm_extend * kExtendRate, 0.0, 1.0);
    body.grasp = cmd.grasp;
    body.suck = cmd.suck;
    return body;
}

double Retina::column_offset(int col) noexcept {
    const double step = kFieldOfView / kSize;
    return kFieldOfView / 2.0 - (col + 0.5) * step;
}

double Retina::row_range(int row) noexcept {
    const double from_horizon = std::abs(row - (kSize - 1) / 2.0) - 0.5;
    return 1.0 - from_horizon / (kSize / 2.0);
}

Retina render_retina(const WorldState& world, const AgentBody& body) {
    Retina retina;
    for (int col = 0; col < Retina::kSize; ++col) {
        const RayHit hit = raycast(world, body.position, body.gaze + Retina::column_offset(col));
        for (int row = 0; row < Retina::kSize; ++row) {
            const double reach = layout::kViewRange * Retina::row_range(row);
            RetinaCell& cell = retina.at(row, col);
            if (hit.kind != EntityKind::None && hit.distance <= reach)
                cell = {static_cast<int>(hit.kind), hit.depth};
            else
                cell = {static_cast<int>(EntityKind::None), 1.0};
        }
    }
    return retina;
}

EntityKind fovea_kind(const Retina& retina) noexcept {
    const RetinaCell* best = nullptr;
    for (int row = 7; row <= 8; ++row)
        for (int col = 7; col <= 8; ++col) {
            const RetinaCell& c = retina.at(row, col);
            if (c.kind == 0) continue;
            if (!best || c.depth < best->depth) best = &c;
        }
    return best ? static_cast<EntityKind>(best->kind) : EntityKind::None;
}

TouchGrid sample_touch(const WorldState& world, const AgentBody& body, bool caregiver_feeding) {
    TouchGrid touch;
    if (body.mouth_contact) {
        const Entity* e = world.find(*body.mouth_contact);
        if (e && is_bottle(e->kind) && e->held_by == layout::kAgentId) touch.mouth = 1.0;
    }
    for (const auto& e : world.entities)
        if (e.kind == EntityKind::Toy && e.held_by == layout::kAgentId) touch.hand = body.grasp;

    const double crib_radius = kind_radius(EntityKind::Crib);
    if (distance(body.hand(), body.position) >= crib_radius - 0.05) touch.crib = 1.0;

    if (caregiver_feeding) {
        const Entity& cg = world.at(layout::kCaregiverId);
        if (distance(cg.pose.position, body.position) <= 1.0) {
            const double rel = wrap_angle(bearing(body.position, cg.pose.position) - body.gaze);
            const int col0 = rel >= 0.0 ? 0 : 4;
            for (int r = 2; r <= 5; ++r)
                for (int c = col0; c < col0 + 4; ++c) touch.torso[static_cast<std::size_t>(r * 8 + c)] = 1.0;
        }
    }
    return touch;
}

std::optional<Ingestion> ingest_if_sucking(const WorldState& world, const AgentBody& body,
                                           double suck_level) {
    if (suck_level <= kSuckThreshold || !body.mouth_contact) return std::nullopt;
    const Entity* bottle = world.find(*body.mouth_contact);
    if (!bottle || !is_bottle(bottle->kind)) return std::nullopt;
    const Substance s = bottle->kind == EntityKind::BottleWater ? Substance::Water : Substance::Milk;
    return Ingestion{s, kIngestPerStep * suck_level};
}

}  // namespace cradle
