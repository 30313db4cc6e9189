#pragma once

// Speech as sparse distributed representations: every letter A-Z owns a
// fixed random set of `cardinality` active bits out of `dimension`, an
// utterance is a sequence of such frames, and noise toggles random bits.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cradle/rng.hpp"

namespace cradle {

// Sorted, duplicate-free set of active bit indices. Empty means silence.
struct SdrFrame {
    std::vector<std::uint32_t> active;

    std::size_t size() const noexcept { return active.size(); }
    bool empty() const noexcept { return active.empty(); }
    bool contains(std::uint32_t bit) const noexcept;
    bool operator==(const SdrFrame&) const = default;

    // Throws InvalidParameter unless indices are strictly increasing and < dimension.
    static SdrFrame from_indices(std::vector<std::uint32_t> indices, int dimension);
};

struct CodecParams {
    int dimension = 512;
    int cardinality = 10;
    int frames_per_symbol = 3;
    int gap_frames = 2;
    int theta_min = 4;
};

class SdrCodebook {
public:
    static constexpr std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";

    // Draws from a fresh Rng(seed); identical to build(rng, ...) on that stream.
    static SdrCodebook build(std::uint64_t seed, int dimension = 512, int cardinality = 10);
    // Consumes draws from `rng` in alphabet order (the session draw order).
    static SdrCodebook build(Rng& rng, int dimension, int cardinality);

    int dimension() const noexcept { return dimension_; }
    int cardinality() const noexcept { return cardinality_; }

    const SdrFrame& symbol(char c) const;
    const std::array<SdrFrame, 26>& table() const noexcept { return table_; }

    bool operator==(const SdrCodebook&) const = default;

private:
    int dimension_ = 0;
    int cardinality_ = 0;
    std::array<SdrFrame, 26> table_{};
};

struct SdrStream {
    std::vector<SdrFrame> frames;
    int frames_per_symbol = 3;
    int gap_frames = 2;
};

// Letters become frames_per_symbol copies of their code, spaces become
// gap_frames silent frames.
SdrStream encode_utterance(const SdrCodebook& codebook, std::string_view text,
                           int frames_per_symbol = 3, int gap_frames = 2);

// Toggles `flips` distinct uniformly chosen positions of [0, dimension).
SdrFrame apply_noise(const SdrFrame& frame, int flips, int dimension, Rng& rng);

int overlap(const SdrFrame& a, const SdrFrame& b) noexcept;

struct FrameDecode {
    std::optional<char> symbol;  // nullopt is silence
    int score = 0;               // best overlap
    bool ambiguous = false;      // exact tie, resolved to the alphabetically first symbol

    bool silent() const noexcept { return !symbol.has_value(); }
};

FrameDecode decode_frame(const SdrCodebook& codebook, const SdrFrame& frame, int theta_min = 4);

struct StreamDecode {
    struct Segment {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::optional<char> symbol;  // nullopt: no majority, dropped
        double mean_overlap = 0.0;   // mean per-frame best overlap
    };

    std::string text;
    std::vector<Segment> segments;
    std::size_t dropped = 0;
    double mean_overlap = 0.0;  // mean over decoded segments
};

StreamDecode decode_stream_detailed(const SdrCodebook& codebook, std::span<const SdrFrame> frames,
                                    int frames_per_symbol = 3, int theta_min = 4);

inline std::string decode_stream(const SdrCodebook& codebook, const SdrStream& stream,
                                 int theta_min = 4) {
    return decode_stream_detailed(codebook, stream.frames, stream.frames_per_symbol, theta_min).text;
}

// Wire form: frame = [i0, i1, ...]; stream = [[...], [...], ...].
nlohmann::json frame_to_json(const SdrFrame& frame);
SdrFrame frame_from_json(const nlohmann::json& j, int dimension);
nlohmann::json stream_to_json(const SdrStream& stream);
SdrStream stream_from_json(const nlohmann::json& j, int dimension, int frames_per_symbol = 3,
                           int gap_frames = 2);

}  // namespace cradle
