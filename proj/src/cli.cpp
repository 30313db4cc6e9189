#include "cradle/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cradle/agents.hpp"
#include "cradle/error.hpp"
#include "cradle/probes.hpp"
#include "cradle/server.hpp"
#include "cradle/session.hpp"

namespace cradle {

namespace {

struct RunOptions {
    std::string config_path;
    std::string agent = "reflex";
    std::int64_t steps = 1000;
    std::optional<std::uint64_t> seed;
    std::string out_path;
};

SessionConfig load(const RunOptions& o) {
    SessionConfig c = o.config_path.empty() ? SessionConfig{} : load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    c.record_path.reset();
    return c;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int do_run(const RunOptions& o, bool recording, std::ostream& out, std::ostream& err) {
    SessionConfig config;
    try {
        config = load(o);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    }
    auto agent = make_agent(o.agent, config.seed, config);
    if (!agent) {
        err << "error: unknown agent \"" << o.agent << "\" (reflex, babbler, associator, random_gaze, mute)\n";
        return exit_code::kUsage;
    }
    if (o.steps < 0) {
        err << "error: --steps must be non-negative\n";
        return exit_code::kUsage;
    }
    std::ofstream log;
    Session session(config);
    if (recording) {
        log.open(o.out_path, std::ios::trunc);
        if (!log) {
            err << "error: cannot write " << o.out_path << '\n';
            return exit_code::kUsage;
        }
        session.record_to(&log);
    }
    EpisodeSummary s;
    try {
        s = run_episode(session, *agent, o.steps);
    } catch (const std::exception& e) {
        err << "error: agent " << agent->name() << " failed: " << e.what() << '\n';
        return exit_code::kAgentFailure;
    }
    out << "agent " << agent->name() << '\n';
    out << "seed " << config.seed << '\n';
    out << "t " << session.t() << '\n';
    out << "stage " << stage_name(session.stage()) << '\n';
    out << "deliveries water=" << s.deliveries["water"] << " milk=" << s.deliveries["milk"] << '\n';
    out << "narrations " << s.narrations << '\n';
    out << "cries " << s.cries << '\n';
    out << "words_serviced " << s.words_serviced << '\n';
    out << "thirst " << fixed6(session.drives().thirst) << '\n';
    out << "hunger " << fixed6(session.drives().hunger) << '\n';
    out << "world_hash " << hash_hex(session.hash()) << '\n';
    if (recording) out << "log " << o.out_path << '\n';
    return exit_code::kOk;
}

int do_replay(const std::string& path, std::ostream& out, std::ostream& err) {
    std::ifstream in(path);
    if (!in) {
        err << "error: cannot read " << path << '\n';
        return exit_code::kUsage;
    }
    try {
        const ReplayReport r = replay(in);
        if (!r.ok()) {
            out << "divergence t=" << *r.first_divergence << " field=" << r.reason << '\n';
            return exit_code::kVerificationFailure;
        }
        out << "replay ok entries=" << r.entries << '\n';
        return exit_code::kOk;
    } catch (const LogParseError& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return exit_code::kUsage;
    } catch (const Error& e) {
        err << "error: " << path << ": " << e.what() << '\n';
        return exit_code::kUsage;
    }
}

struct ProbeOptions {
    RunOptions run;
    std::string probe = "looking";
    int trials = 50;
    std::string word = "WATER";
    bool train_first = false;
    bool json = false;
};

int do_probe(const ProbeOptions& o, std::ostream& out, std::ostream& err) {
    SessionConfig config;
    try {
        config = load(o.run);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    }
    auto agent = make_agent(o.run.agent, config.seed, config);
    if (!agent) {
        err << "error: unknown agent \"" << o.run.agent << "\"\n";
        return exit_code::kUsage;
    }
    try {
        if (o.train_first) {
            const TrainingResult t = train(*agent, config);
            out << "trained steps=" << t.steps << " exposures=" << t.exposures << '\n';
        }
        ProbeReport report;
        const std::uint64_t first = o.run.seed.value_or(1);
        if (o.probe == "looking") {
            LookingSpec spec;
            spec.word = o.word;
            spec.trials = o.trials;
            spec.first_seed = first;
            report = preferential_looking(*agent, config, spec);
        } else if (o.probe == "latency") {
            LatencySpec spec;
            spec.word = o.word;
            spec.seeds.clear();
            for (int i = 0; i < o.trials; ++i) spec.seeds.push_back(first + static_cast<std::uint64_t>(i));
            report = service_word_latency(*agent, config, spec);
        } else {
            MilestoneSpec spec;
            for (int i = 0; i < o.trials; ++i) spec.seeds.push_back(first + static_cast<std::uint64_t>(i));
            spec.words = {o.word};
            report = milestone_report(*agent, config, spec);
        }
        if (o.json)
            out << report.to_json().dump() << '\n';
        else
            out << report.table();
    } catch (const ProbeConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    } catch (const std::exception& e) {
        err << "error: agent " << agent->name() << " failed: " << e.what() << '\n';
        return exit_code::kAgentFailure;
    }
    return exit_code::kOk;
}

struct CodecOptions {
    std::uint64_t seed = 0;
    CodecParams params;
    std::string text;
    std::string stream_path;
    int trials = 1000;
    int max_flips = 6;
};

SdrCodebook codebook_for(const CodecOptions& o) {
    return SdrCodebook::build(o.seed, o.params.dimension, o.params.cardinality);
}

int codec_build(const CodecOptions& o, std::ostream& out) {
    const SdrCodebook cb = codebook_for(o);
    for (std::size_t i = 0; i < cb.table().size(); ++i) {
        out << SdrCodebook::alphabet[i];
        const auto& bits = cb.table()[i].active;
        for (std::size_t b = 0; b < bits.size(); ++b) out << (b ? ',' : ' ') << bits[b];
        out << '\n';
    }
    return exit_code::kOk;
}

int codec_decode(const CodecOptions& o, std::ostream& out, std::ostream& err) {
    std::stringstream buffer;
    if (o.stream_path.empty() || o.stream_path == "-") {
        buffer << std::cin.rdbuf();
    } else {
        std::ifstream in(o.stream_path);
        if (!in) {
            err << "error: cannot read " << o.stream_path << '\n';
            return exit_code::kUsage;
        }
        buffer << in.rdbuf();
    }
    try {
        const SdrCodebook cb = codebook_for(o);
        const auto stream = stream_from_json(nlohmann::json::parse(buffer.str()), o.params.dimension,
                                             o.params.frames_per_symbol, o.params.gap_frames);
        out << decode_stream(cb, stream, o.params.theta_min) << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    }
    return exit_code::kOk;
}

int codec_sweep(const CodecOptions& o, std::ostream& out) {
    const SdrCodebook cb = codebook_for(o);
    Rng rng(o.seed ^ 0xd1b54a32d192ed03ULL);
    out << "flips accuracy\n";
    for (int flips = 0; flips <= o.max_flips; ++flips) {
        long correct = 0;
        long total = 0;
        for (int trial = 0; trial < o.trials; ++trial) {
            for (char c : SdrCodebook::alphabet) {
                SdrStream s = encode_utterance(cb, std::string(1, c), o.params.frames_per_symbol, o.params.gap_frames);
                for (auto& f : s.frames) f = apply_noise(f, flips, o.params.dimension, rng);
                correct += decode_stream(cb, s, o.params.theta_min) == std::string(1, c);
                ++total;
            }
        }
        out << flips << ' ' << fixed6(static_cast<double>(correct) / static_cast<double>(total)) << '\n';
    }
    return exit_code::kOk;
}

int do_serve(bool stdio, const std::string& listen, std::ostream& out, std::ostream& err) {
    install_signal_handlers();
    if (stdio) {
        if (!listen.empty()) {
            err << "error: --stdio and --listen are exclusive\n";
            return exit_code::kUsage;
        }
        std::cout.flush();
        serve_fd(0, 1);
        return exit_code::kOk;
    }
    std::string address = listen;
    if (address.empty()) {
        const char* env = std::getenv(kEndpointEnv);
        address = env && *env ? env : kDefaultEndpoint;
    }
    const auto ep = parse_endpoint(address);
    if (!ep) {
        err << "error: bad endpoint \"" << address << "\" (expected HOST:PORT)\n";
        return exit_code::kUsage;
    }
    return serve_tcp(*ep, out, err);
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config_path, "session config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--agent", o.agent, "reflex | babbler | associator | random_gaze | mute");
    cmd->add_option("--steps", o.steps, "number of steps");
    cmd->add_option("--seed", o.seed, "overrides the config seed");
}

void add_codec_flags(CLI::App* cmd, CodecOptions& o) {
    cmd->add_option("--seed", o.seed, "codebook seed");
    cmd->add_option("--dimension", o.params.dimension, "SDR dimension");
    cmd->add_option("--k", o.params.cardinality, "active bits per symbol");
    cmd->add_option("--frames-per-symbol", o.params.frames_per_symbol);
    cmd->add_option("--gap-frames", o.params.gap_frames);
    cmd->add_option("--theta", o.params.theta_min, "minimum overlap for a symbol");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"cradle: infant development environment"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run an in-process episode and print a summary");
    add_run_flags(run, run_opts);

    RunOptions rec_opts;
    auto* rec = app.add_subcommand("record", "run an episode and write its log");
    add_run_flags(rec, rec_opts);
    rec->add_option("--out", rec_opts.out_path, "episode log path")->required();

    std::string log_path;
    auto* rep = app.add_subcommand("replay", "re-run a log and verify every hash and observation");
    rep->add_option("--log", log_path, "episode log")->required();

    ProbeOptions probe_opts;
    auto* probe = app.add_subcommand("probe", "run an evaluation probe");
    add_run_flags(probe, probe_opts.run);
    probe_opts.run.agent = "random_gaze";
    probe->add_option("--probe", probe_opts.probe, "looking | latency | milestone")
        ->check(CLI::IsMember({"looking", "latency", "milestone"}));
    probe->add_option("--trials", probe_opts.trials, "trials (looking) or seeds (latency, milestone)")
        ->check(CLI::NonNegativeNumber);
    probe->add_option("--word", probe_opts.word, "probe word");
    probe->add_flag("--train", probe_opts.train_first, "train under the default curriculum first");
    probe->add_flag("--json", probe_opts.json, "print the report as JSON");

    CodecOptions codec_opts;
    auto* codec = app.add_subcommand("codec", "SDR codebook utilities");
    codec->require_subcommand(1);
    auto* build = codec->add_subcommand("build", "print the codebook");
    add_codec_flags(build, codec_opts);
    auto* encode = codec->add_subcommand("encode", "encode text as a JSON frame stream");
    add_codec_flags(encode, codec_opts);
    encode->add_option("--text", codec_opts.text, "A-Z and spaces")->required();
    auto* decode = codec->add_subcommand("decode", "decode a JSON frame stream");
    add_codec_flags(decode, codec_opts);
    decode->add_option("--stream", codec_opts.stream_path, "stream file, - for stdin");
    auto* sweep = codec->add_subcommand("noise-sweep", "single-symbol accuracy per flip count");
    add_codec_flags(sweep, codec_opts);
    sweep->add_option("--trials", codec_opts.trials)->check(CLI::PositiveNumber);
    sweep->add_option("--max-flips", codec_opts.max_flips)->check(CLI::NonNegativeNumber);

    bool stdio = false;
    std::string listen;
    auto* serve = app.add_subcommand("serve", "serve the wire protocol");
    serve->add_flag("--stdio", stdio, "one session over stdin/stdout");
    serve->add_option("--listen", listen, "HOST:PORT (default $CRADLE_ENDPOINT or 127.0.0.1:7878)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::kOk : exit_code::kUsage;
    }

    if (*run) return do_run(run_opts, false, out, err);
    if (*rec) return do_run(rec_opts, true, out, err);
    if (*rep) return do_replay(log_path, out, err);
    if (*probe) return do_probe(probe_opts, out, err);
    if (*serve) return do_serve(stdio, listen, out, err);
    try {
        if (*build) return codec_build(codec_opts, out);
        if (*encode) {
            const SdrStream s = encode_utterance(codebook_for(codec_opts), codec_opts.text,
                                                 codec_opts.params.frames_per_symbol, codec_opts.params.gap_frames);
            out << stream_to_json(s).dump() << '\n';
            return exit_code::kOk;
        }
        if (*decode) return codec_decode(codec_opts, out, err);
        if (*sweep) return codec_sweep(codec_opts, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kUsage;
    }
    return exit_code::kUsage;
}

}  // namespace cradle
