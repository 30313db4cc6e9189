#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "cradle/error.hpp"
#include "cradle/rng.hpp"
#include "cradle/sdr.hpp"

using namespace cradle;

namespace {

std::string table_text(const SdrCodebook& cb) {
    std::string s;
    for (std::size_t i = 0; i < 26; ++i) {
        if (i) s += ';';
        s += static_cast<char>('A' + i);
        s += ':';
        const auto& bits = cb.table()[i].active;
        for (std::size_t j = 0; j < bits.size(); ++j) {
            if (j) s += ',';
            s += std::to_string(bits[j]);
        }
    }
    return s;
}

std::string random_text(Rng& rng) {
    std::string s;
    const int words = 1 + static_cast<int>(rng.below(3));
    for (int w = 0; w < words; ++w) {
        if (w) s += ' ';
        const int len = 1 + static_cast<int>(rng.below(6));
        for (int i = 0; i < len; ++i) s += static_cast<char>('A' + rng.below(26));
    }
    return s;
}

}  // namespace

TEST_CASE("codebook shape") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    CHECK(cb.dimension() == 512);
    CHECK(cb.cardinality() == 10);
    for (const auto& f : cb.table()) {
        REQUIRE(f.size() == 10);
        CHECK(std::is_sorted(f.active.begin(), f.active.end()));
        CHECK(std::adjacent_find(f.active.begin(), f.active.end()) == f.active.end());
        CHECK(f.active.back() < 512u);
    }
}

TEST_CASE("codebook matches the independent oracle") {
    const auto seven = SdrCodebook::build(std::uint64_t{7});
    CHECK(seven.symbol('A').active == std::vector<std::uint32_t>{49, 80, 184, 206, 333, 355, 383, 397, 482, 496});
    CHECK(seven.symbol('Z').active == std::vector<std::uint32_t>{5, 15, 131, 205, 361, 402, 413, 469, 491, 494});
    CHECK(fnv1a64(table_text(seven)) == 0x5b1a3cfe173f224aULL);

    const auto one = SdrCodebook::build(std::uint64_t{1});
    CHECK(one.symbol('A').active == std::vector<std::uint32_t>{43, 62, 107, 108, 206, 270, 328, 370, 399, 464});
    CHECK(fnv1a64(table_text(one)) == 0x431e111db4239679ULL);
}

TEST_CASE("codebook determinism and seed sensitivity") {
    CHECK(SdrCodebook::build(std::uint64_t{7}) == SdrCodebook::build(std::uint64_t{7}));
    CHECK_FALSE(SdrCodebook::build(std::uint64_t{7}) == SdrCodebook::build(std::uint64_t{8}));
    Rng rng(7);
    CHECK(SdrCodebook::build(rng, 512, 10) == SdrCodebook::build(std::uint64_t{7}));
}

TEST_CASE("codebook parameter errors") {
    CHECK_THROWS_AS(SdrCodebook::build(std::uint64_t{1}, 8, 9), InvalidParameter);
    CHECK_THROWS_AS(SdrCodebook::build(std::uint64_t{1}, 8, 0), InvalidParameter);
    // 26 symbols cannot have distinct 1-of-4 codes.
    CHECK_THROWS_AS(SdrCodebook::build(std::uint64_t{1}, 4, 1), CodebookCollision);
}

TEST_CASE("encode_utterance layout") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    const auto a = encode_utterance(cb, "A");
    REQUIRE(a.frames.size() == 3);
    for (const auto& f : a.frames) CHECK(f == cb.symbol('A'));
    CHECK(encode_utterance(cb, "").frames.empty());

    const auto ab = encode_utterance(cb, "A B");
    REQUIRE(ab.frames.size() == 8);
    CHECK(ab.frames[2] == cb.symbol('A'));
    CHECK(ab.frames[3].empty());
    CHECK(ab.frames[4].empty());
    CHECK(ab.frames[5] == cb.symbol('B'));

    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const std::string text = random_text(rng);
        const auto spaces = static_cast<std::size_t>(std::count(text.begin(), text.end(), ' '));
        CHECK(encode_utterance(cb, text, 4, 3).frames.size() == (text.size() - spaces) * 4 + spaces * 3);
    }
}

TEST_CASE("encode rejects symbols outside the alphabet with their position") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    try {
        encode_utterance(cb, "WAt");
        FAIL("expected InvalidSymbol");
    } catch (const InvalidSymbol& e) {
        CHECK(e.symbol == 't');
        CHECK(e.position == 2);
    }
}

TEST_CASE("apply_noise") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    const SdrFrame& a = cb.symbol('A');
    Rng rng(1);
    CHECK(apply_noise(a, 0, 512, rng) == a);
    for (int i = 0; i < 200; ++i) {
        const auto one = apply_noise(a, 1, 512, rng);
        CHECK((one.size() == 9 || one.size() == 11));
    }
    CHECK(a.size() == 10);
    CHECK_THROWS_AS(apply_noise(a, 513, 512, rng), InvalidParameter);
    CHECK(apply_noise(SdrFrame{}, 512, 512, rng).size() == 512);
}

TEST_CASE("noise cardinality bound property") {
    const auto cb = SdrCodebook::build(std::uint64_t{3});
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const SdrFrame& f = cb.table()[rng.below(26)];
        const int n = static_cast<int>(rng.below(30));
        const auto g = apply_noise(f, n, 512, rng);
        const int size = static_cast<int>(g.size());
        CHECK(size >= std::max(0, 10 - n));
        CHECK(size <= std::min(512, 10 + n));
        CHECK(std::is_sorted(g.active.begin(), g.active.end()));
        // Toggling exactly n distinct positions changes n memberships.
        std::vector<std::uint32_t> diff;
        std::set_symmetric_difference(f.active.begin(), f.active.end(), g.active.begin(), g.active.end(),
                                      std::back_inserter(diff));
        CHECK(static_cast<int>(diff.size()) == n);
    }
}

TEST_CASE("mean overlap after two flips matches the closed form") {
    // Hypergeometric expectation: 10 - 2 * 10 / 512 = 9.9609375.
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    Rng rng(2024);
    long total = 0;
    int at_least_8 = 0;
    for (int i = 0; i < 10000; ++i) {
        const int o = overlap(cb.symbol('A'), apply_noise(cb.symbol('A'), 2, 512, rng));
        total += o;
        at_least_8 += o >= 8;
    }
    CHECK(static_cast<double>(total) / 10000.0 == doctest::Approx(9.9609375).epsilon(0.001));
    CHECK(at_least_8 == 10000);
}

TEST_CASE("overlap basics") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    for (const auto& f : cb.table()) CHECK(overlap(f, f) == 10);
    const SdrFrame x{{1, 2, 3}};
    const SdrFrame y{{4, 5}};
    CHECK(overlap(x, y) == 0);
    const SdrFrame z{{2, 3, 9}};
    CHECK(overlap(x, z) == 2);
    CHECK(overlap(z, x) == 2);
}

TEST_CASE("decode_frame") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    for (char c : SdrCodebook::alphabet) {
        const auto d = decode_frame(cb, cb.symbol(c));
        REQUIRE(d.symbol);
        CHECK(*d.symbol == c);
        CHECK(d.score == 10);
        CHECK_FALSE(d.ambiguous);
    }
    CHECK(decode_frame(cb, SdrFrame{}).silent());

    // Three bits of A is below theta.
    SdrFrame weak{{cb.symbol('A').active.begin(), cb.symbol('A').active.begin() + 3}};
    CHECK(decode_frame(cb, weak).silent());
    CHECK(decode_frame(cb, weak, 3).symbol == 'A');
}

TEST_CASE("decode_frame tie resolves to the first symbol and is flagged") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    const auto& a = cb.symbol('A').active;
    const auto& c = cb.symbol('C').active;
    std::set<std::uint32_t> bits(a.begin(), a.begin() + 5);
    for (auto b : c) {
        if (bits.size() == 10) break;
        bits.insert(b);
    }
    SdrFrame f{{bits.begin(), bits.end()}};
    const int oa = overlap(f, cb.symbol('A'));
    const int oc = overlap(f, cb.symbol('C'));
    REQUIRE(oa == oc);
    const auto d = decode_frame(cb, f);
    CHECK(d.symbol == 'A');
    CHECK(d.ambiguous);
}

TEST_CASE("decode dominance matches brute force over random frames") {
    const auto cb = SdrCodebook::build(std::uint64_t{9});
    Rng rng(4);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto f = apply_noise(cb.table()[rng.below(26)], static_cast<int>(rng.below(14)), 512, rng);
        // Brute force over bitsets.
        std::array<int, 26> score{};
        for (std::size_t s = 0; s < 26; ++s) {
            std::vector<bool> on(512, false);
            for (auto b : cb.table()[s].active) on[b] = true;
            for (auto b : f.active) score[s] += on[b];
        }
        const int best = *std::max_element(score.begin(), score.end());
        const auto d = decode_frame(cb, f);
        CHECK(d.score == (f.empty() ? 0 : best));
        if (f.empty() || best < 4) {
            CHECK(d.silent());
        } else {
            const auto first = static_cast<std::size_t>(std::find(score.begin(), score.end(), best) - score.begin());
            CHECK(*d.symbol == SdrCodebook::alphabet[first]);
            CHECK(d.ambiguous == (std::count(score.begin(), score.end(), best) > 1));
        }
    }
}

TEST_CASE("round trip property at zero noise") {
    Rng rng(31);
    for (std::uint64_t seed : {1u, 2u, 7u}) {
        const auto cb = SdrCodebook::build(seed);
        CHECK(decode_stream(cb, encode_utterance(cb, "WATER")) == "WATER");
        for (int i = 0; i < 200; ++i) {
            const std::string text = random_text(rng);
            CHECK(decode_stream(cb, encode_utterance(cb, text)) == text);
        }
    }
}

TEST_CASE("decode_stream edge cases") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    SdrStream silent;
    silent.frames.assign(9, SdrFrame{});
    CHECK(decode_stream(cb, silent).empty());
    CHECK(decode_stream(cb, SdrStream{}).empty());

    // Three frames that each decode differently have no majority.
    std::vector<SdrFrame> frames{cb.symbol('A'), cb.symbol('B'), cb.symbol('C')};
    const auto d = decode_stream_detailed(cb, frames, 3);
    CHECK(d.text.empty());
    CHECK(d.dropped == 1);
    REQUIRE(d.segments.size() == 1);
    CHECK_FALSE(d.segments[0].symbol);

    // Majority wins within a chunk.
    std::vector<SdrFrame> vote{cb.symbol('W'), cb.symbol('Q'), cb.symbol('W')};
    CHECK(decode_stream_detailed(cb, vote, 3).text == "W");
    CHECK(decode_stream_detailed(cb, encode_utterance(cb, "WATER").frames, 3).mean_overlap == 10.0);
}

TEST_CASE("codec accuracy at two flips is exact") {
    // Letter codes of seed 1 share at most 2 bits (oracle), so after two
    // toggles the true symbol keeps >= 8 and any other reaches <= 4.
    const auto cb = SdrCodebook::build(std::uint64_t{1});
    int max_shared = 0;
    for (std::size_t i = 0; i < 26; ++i)
        for (std::size_t j = i + 1; j < 26; ++j) max_shared = std::max(max_shared, overlap(cb.table()[i], cb.table()[j]));
    CHECK(max_shared == 2);

    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        for (char c : SdrCodebook::alphabet) {
            SdrStream s = encode_utterance(cb, std::string(1, c));
            for (auto& f : s.frames) f = apply_noise(f, 2, 512, rng);
            CHECK(decode_stream(cb, s) == std::string(1, c));
        }
    }
    int word_ok = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        SdrStream s = encode_utterance(cb, "WATER");
        for (auto& f : s.frames) f = apply_noise(f, 1, 512, rng);
        word_ok += decode_stream(cb, s) == "WATER";
    }
    CHECK(word_ok == 1000);
}

TEST_CASE("frame and stream json") {
    const auto cb = SdrCodebook::build(std::uint64_t{7});
    const auto s = encode_utterance(cb, "HI THERE");
    const auto j = stream_to_json(s);
    CHECK(j.size() == s.frames.size());
    CHECK(stream_from_json(j, 512).frames == s.frames);
    CHECK(frame_to_json(SdrFrame{}).dump() == "[]");
    CHECK_THROWS_AS(frame_from_json(nlohmann::json::parse("[3,2]"), 512), InvalidParameter);
    CHECK_THROWS_AS(frame_from_json(nlohmann::json::parse("[512]"), 512), InvalidParameter);
    CHECK_THROWS_AS(frame_from_json(nlohmann::json::parse("[-1]"), 512), InvalidParameter);
    CHECK_THROWS_AS(frame_from_json(nlohmann::json::parse("{}"), 512), InvalidParameter);
    CHECK_THROWS_AS(stream_from_json(nlohmann::json::parse("[1]"), 512), InvalidParameter);
}
