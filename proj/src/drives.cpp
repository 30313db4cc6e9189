#include "cradle/drives.hpp"

#include <algorithm>

#include "cradle/error.hpp"

namespace cradle {

namespace {
double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

std::string_view substance_name(Substance s) noexcept {
    return s == Substance::Water ? "water" : "milk";
}

Substance substance_from_name(std::string_view name) {
    if (name == "water") return Substance::Water;
    if (name == "milk") return Substance::Milk;
    throw InvalidSubstance("unknown substance '" + std::string(name) + "'");
}

void DriveParams::validate() const {
    if (thirst_rate < 0.0 || hunger_rate < 0.0) throw InvalidParameter("drive rates must be non-negative");
    if (!(cry_threshold > 0.0 && cry_threshold < 1.0))
        throw InvalidParameter("cry_threshold must lie in (0, 1)");
}

DriveState tick(DriveState drives, const DriveParams& params) {
    return {clamp01(drives.thirst + params.thirst_rate), clamp01(drives.hunger + params.hunger_rate)};
}

DriveState ingest(DriveState drives, Substance substance, double amount) {
    if (amount < 0.0) throw InvalidParameter("ingested amount must be non-negative");
    switch (substance) {
        case Substance::Water:
            drives.thirst -= amount;
            break;
        case Substance::Milk:
            drives.thirst -= 0.5 * amount;
            drives.hunger -= amount;
            break;
    }
    return {clamp01(drives.thirst), clamp01(drives.hunger)};
}

}  // namespace cradle
