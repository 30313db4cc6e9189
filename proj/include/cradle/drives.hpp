#pragma once

// Homeostatic interoception. Levels only: nothing here is a reward.

#include <string>
#include <string_view>

namespace cradle {

enum class Substance { Water, Milk };

std::string_view substance_name(Substance s) noexcept;
// Throws InvalidSubstance for anything but "water" / "milk".
Substance substance_from_name(std::string_view name);

struct DriveState {
    double thirst = 0.0;
    double hunger = 0.0;
    bool operator==(const DriveState&) const = default;
};

struct DriveParams {
    double thirst_rate = 0.001;
    double hunger_rate = 0.0005;
    double cry_threshold = 0.6;

    // Throws InvalidParameter on negative rates or a threshold outside (0, 1).
    void validate() const;
};

DriveState tick(DriveState drives, const DriveParams& params);

// Water lowers thirst by `amount`; milk lowers thirst by half of it and hunger by all of it.
DriveState ingest(DriveState drives, Substance substance, double amount);

}  // namespace cradle
