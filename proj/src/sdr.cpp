#include "cradle/sdr.hpp"

#include <algorithm>
#include <set>

#include "cradle/error.hpp"

namespace cradle {

bool SdrFrame::contains(std::uint32_t bit) const noexcept {
    return std::binary_search(active.begin(), active.end(), bit);
}

SdrFrame SdrFrame::from_indices(std::vector<std::uint32_t> indices, int dimension) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= static_cast<std::uint32_t>(dimension))
            throw InvalidParameter("frame index " + std::to_string(indices[i]) +
                                   " out of range for dimension " + std::to_string(dimension));
        if (i > 0 && indices[i] <= indices[i - 1])
            throw InvalidParameter("frame indices must be strictly increasing");
    }
    return SdrFrame{std::move(indices)};
}

namespace {

// Floyd's algorithm: exactly `count` draws, distinct, uniform over [0, n).
std::vector<std::uint32_t> sample_distinct(int count, int n, Rng& rng) {
    std::vector<std::uint32_t> chosen;
    chosen.reserve(static_cast<std::size_t>(count));
    for (int j = n - count; j < n; ++j) {
        const auto t = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(j) + 1));
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
            chosen.push_back(t);
        else
            chosen.push_back(static_cast<std::uint32_t>(j));
    }
    return chosen;
}

std::size_t letter_index(char c) {
    return static_cast<std::size_t>(c - 'A');
}

bool is_letter(char c) {
    return c >= 'A' && c <= 'Z';
}

}  // namespace

SdrCodebook SdrCodebook::build(std::uint64_t seed, int dimension, int cardinality) {
    Rng rng(seed);
    return build(rng, dimension, cardinality);
}

SdrCodebook SdrCodebook::build(Rng& rng, int dimension, int cardinality) {
    if (dimension <= 0 || cardinality <= 0 || cardinality > dimension)
        throw InvalidParameter("codebook requires 0 < cardinality <= dimension (got k=" +
                               std::to_string(cardinality) + ", dimension=" +
                               std::to_string(dimension) + ")");
    SdrCodebook book;
    book.dimension_ = dimension;
    book.cardinality_ = cardinality;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        auto bits = sample_distinct(cardinality, dimension, rng);
        std::sort(bits.begin(), bits.end());
        book.table_[i] = SdrFrame{std::move(bits)};
    }
    std::set<std::vector<std::uint32_t>> seen;
    for (std::size_t i = 0; i < alphabet.size(); ++i) {
        if (!seen.insert(book.table_[i].active).second)
            throw CodebookCollision(std::string("symbol ") + alphabet[i] +
                                    " duplicates the index set of an earlier symbol");
    }
    return book;
}

const SdrFrame& SdrCodebook::symbol(char c) const {
    if (!is_letter(c)) throw InvalidSymbol(c, 0);
    return table_[letter_index(c)];
}

SdrStream encode_utterance(const SdrCodebook& codebook, std::string_view text,
                           int frames_per_symbol, int gap_frames) {
    if (frames_per_symbol <= 0 || gap_frames < 0)
        throw InvalidParameter("frames_per_symbol must be positive and gap_frames non-negative");
    SdrStream stream;
    stream.frames_per_symbol = frames_per_symbol;
    stream.gap_frames = gap_frames;
    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c == ' ') {
            stream.frames.insert(stream.frames.end(), static_cast<std::size_t>(gap_frames), SdrFrame{});
        } else if (is_letter(c)) {
            const SdrFrame& code = codebook.table()[letter_index(c)];
            stream.frames.insert(stream.frames.end(), static_cast<std::size_t>(frames_per_symbol), code);
        } else {
            throw InvalidSymbol(c, pos);
        }
    }
    return stream;
}

SdrFrame apply_noise(const SdrFrame& frame, int flips, int dimension, Rng& rng) {
    if (flips < 0 || flips > dimension)
        throw InvalidParameter("flips must lie in [0, dimension]");
    if (flips == 0) return frame;
    auto positions = sample_distinct(flips, dimension, rng);
    std::sort(positions.begin(), positions.end());
    SdrFrame out;
    std::set_symmetric_difference(frame.active.begin(), frame.active.end(), positions.begin(),
                                  positions.end(), std::back_inserter(out.active));
    return out;
}

int overlap(const SdrFrame& a, const SdrFrame& b) noexcept {
    int count = 0;
    auto i = a.active.begin();
    auto j = b.active.begin();
    while (i != a.active.end() && j != b.active.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

FrameDecode decode_frame(const SdrCodebook& codebook, const SdrFrame& frame, int theta_min) {
    FrameDecode result;
    if (frame.empty()) return result;
    int best = -1;
    std::size_t best_index = 0;
    bool tie = false;
    for (std::size_t i = 0; i < codebook.table().size(); ++i) {
        const int score = overlap(frame, codebook.table()[i]);
        if (score > best) {
            best = score;
            best_index = i;
            tie = false;
        } else if (score == best) {
            tie = true;
        }
    }
    result.score = best;
    if (best < theta_min) return result;
    result.symbol = SdrCodebook::alphabet[best_index];
    result.ambiguous = tie;
    return result;
}

StreamDecode decode_stream_detailed(const SdrCodebook& codebook, std::span<const SdrFrame> frames,
                                    int frames_per_symbol, int theta_min) {
    if (frames_per_symbol <= 0) throw InvalidParameter("frames_per_symbol must be positive");
    std::vector<FrameDecode> decoded;
    decoded.reserve(frames.size());
    for (const auto& f : frames) decoded.push_back(decode_frame(codebook, f, theta_min));

    StreamDecode out;
    double overlap_sum = 0.0;
    std::size_t emitted = 0;
    bool pending_space = false;
    std::size_t i = 0;
    while (i < decoded.size()) {
        if (decoded[i].silent()) {
            pending_space = !out.text.empty();
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < decoded.size() && !decoded[run_end].silent()) ++run_end;

        // Letters are not separated by silence: split the run into the number
        // of symbols it most plausibly holds and vote inside each chunk.
        const std::size_t length = run_end - i;
        const std::size_t fps = static_cast<std::size_t>(frames_per_symbol);
        const std::size_t chunks = std::max<std::size_t>(1, (length + fps / 2) / fps);
        for (std::size_t c = 0; c < chunks; ++c) {
            StreamDecode::Segment seg;
            seg.begin = i + length * c / chunks;
            seg.end = i + length * (c + 1) / chunks;
            std::array<int, 26> votes{};
            double score_sum = 0.0;
            for (std::size_t k = seg.begin; k < seg.end; ++k) {
                votes[letter_index(*decoded[k].symbol)]++;
                score_sum += decoded[k].score;
            }
            const auto best = std::max_element(votes.begin(), votes.end());
            const std::size_t span_len = seg.end - seg.begin;
            seg.mean_overlap = score_sum / static_cast<double>(span_len);
            if (static_cast<std::size_t>(*best) * 2 > span_len) {
                seg.symbol = SdrCodebook::alphabet[static_cast<std::size_t>(best - votes.begin())];
                if (pending_space) out.text.push_back(' ');
                pending_space = false;
                out.text.push_back(*seg.symbol);
                overlap_sum += seg.mean_overlap;
                ++emitted;
            } else {
                ++out.dropped;
            }
            out.segments.push_back(seg);
        }
        i = run_end;
    }
    out.mean_overlap = emitted ? overlap_sum / static_cast<double>(emitted) : 0.0;
    return out;
}

nlohmann::json frame_to_json(const SdrFrame& frame) {
    return nlohmann::json(frame.active);
}

SdrFrame frame_from_json(const nlohmann::json& j, int dimension) {
    if (!j.is_array()) throw InvalidParameter("frame must be an array of indices");
    std::vector<std::uint32_t> indices;
    indices.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw InvalidParameter("frame indices must be non-negative integers");
        indices.push_back(v.get<std::uint32_t>());
    }
    return SdrFrame::from_indices(std::move(indices), dimension);
}

nlohmann::json stream_to_json(const SdrStream& stream) {
    auto out = nlohmann::json::array();
    for (const auto& f : stream.frames) out.push_back(frame_to_json(f));
    return out;
}

SdrStream stream_from_json(const nlohmann::json& j, int dimension, int frames_per_symbol,
                           int gap_frames) {
    if (!j.is_array()) throw InvalidParameter("stream must be an array of frames");
    SdrStream stream;
    stream.frames_per_symbol = frames_per_symbol;
    stream.gap_frames = gap_frames;
    for (const auto& f : j) stream.frames.push_back(frame_from_json(f, dimension));
    return stream;
}

}  // namespace cradle
