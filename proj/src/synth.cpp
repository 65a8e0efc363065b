#include "fakecatcher/synth.hpp"

#include <fstream>
#include <numbers>
#include <random>

#include "fakecatcher/geometry.hpp"

#include "json.hpp"

namespace fc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// pulsatile color coupling: strongest on G, weaker on R and B
constexpr double kPulseR = 0.5;
constexpr double kPulseG = 1.0;
constexpr double kPulseB = 0.3;

constexpr double kBaseR = 160.0;
constexpr double kBaseG = 120.0;
constexpr double kBaseB = 100.0;

}  // namespace

SynthVideo synth_video(const SynthParams& params, std::uint64_t video_seed, bool fake) {
    std::mt19937_64 rng(video_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const std::size_t n =
        params.omega * static_cast<std::size_t>(params.segments_per_video);
    const double f_video = params.f_lo + (params.f_hi - params.f_lo) * unit(rng);
    const double shared_phase = kTwoPi * unit(rng);

    SynthVideo video;
    video.fake = fake;
    video.fps = params.fps;

    const std::array<Region, 3> regions = {Region::left_cheek, Region::mid_region,
                                           Region::right_cheek};
    for (Region region : regions) {
        const double amp =
            params.amp * (1.0 + params.amp_jitter * (2.0 * unit(rng) - 1.0));
        double phase, freq;
        if (fake) {
            phase = kTwoPi * unit(rng);
            freq = f_video + params.freq_detune * (2.0 * unit(rng) - 1.0);
        } else {
            phase = shared_phase + kTwoPi * params.phase_jitter * (unit(rng) - 0.5);
            freq = f_video;
        }

        RegionTrace trace;
        trace.region = region;
        trace.fps = params.fps;
        trace.mean_r.resize(n);
        trace.mean_g.resize(n);
        trace.mean_b.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double t = static_cast<double>(i) / params.fps;
            double flicker = 0.0;
            if (fake) {
                t += params.time_jitter * gauss(rng) / params.fps;
                flicker = params.value_jitter * gauss(rng);
            }
            const double pulse = amp * std::sin(kTwoPi * freq * t + phase) + flicker;
            trace.mean_r[i] =
                std::clamp(kBaseR + kPulseR * pulse + params.noise_sigma * gauss(rng), 0.0, 255.0);
            trace.mean_g[i] =
                std::clamp(kBaseG + kPulseG * pulse + params.noise_sigma * gauss(rng), 0.0, 255.0);
            trace.mean_b[i] =
                std::clamp(kBaseB + kPulseB * pulse + params.noise_sigma * gauss(rng), 0.0, 255.0);
        }
        video.traces.push_back(std::move(trace));
    }
    return video;
}

std::filesystem::path gen_synthetic_corpus(const std::filesystem::path& outdir,
                                           const SynthParams& params) {
    std::filesystem::create_directories(outdir);
    nlohmann::json entries = nlohmann::json::array();
    for (int p = 0; p < params.n_pairs; ++p) {
        for (const bool fake : {false, true}) {
            const std::uint64_t video_seed =
                params.seed + 2ULL * static_cast<std::uint64_t>(p) + (fake ? 1ULL : 0ULL);
            SynthVideo video = synth_video(params, video_seed, fake);
            char name[64];
            std::snprintf(name, sizeof(name), "pair%03d_%s.csv", p, fake ? "fake" : "real");
            write_traces_csv(outdir / name, video.traces);
            entries.push_back({{"path", name},
                               {"label", fake ? "fake" : "authentic"},
                               {"source", "synth"},
                               {"pair", p},
                               {"fps", params.fps}});
        }
    }
    nlohmann::json manifest{{"format", "fakecatcher-manifest"},
                            {"version", 1},
                            {"fps", params.fps},
                            {"omega", params.omega},
                            {"seed", params.seed},
                            {"entries", entries}};
    const auto path = outdir / "manifest.json";
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << manifest.dump(2) << "\n";
    return path;
}

LandmarkFrame template_face(int width, int height) {
    // unit-face coordinates, y growing downward, face roughly in [-1,1]x[0,1]
    std::vector<Point2> pts;
    pts.reserve(68);
    // 0-16 jaw
    for (int i = 0; i <= 16; ++i) {
        const double a = std::numbers::pi * (1.0 - static_cast<double>(i) / 16.0);
        pts.push_back({std::cos(a), 0.55 + 0.45 * std::sin(a)});
    }
    // 17-26 brows
    for (int i = 0; i < 5; ++i) {
        const double x = -0.65 + 0.125 * i;
        pts.push_back({x, 0.28 - 0.03 * std::sin(std::numbers::pi * i / 4.0)});
    }
    for (int i = 0; i < 5; ++i) {
        const double x = 0.15 + 0.125 * i;
        pts.push_back({x, 0.28 - 0.03 * std::sin(std::numbers::pi * i / 4.0)});
    }
    // 27-30 nose bridge, 31-35 nose base
    pts.push_back({0.0, 0.38});
    pts.push_back({0.0, 0.46});
    pts.push_back({0.0, 0.54});
    pts.push_back({0.0, 0.62});
    pts.push_back({-0.12, 0.66});
    pts.push_back({-0.06, 0.69});
    pts.push_back({0.0, 0.70});
    pts.push_back({0.06, 0.69});
    pts.push_back({0.12, 0.66});
    // 36-41 left eye, 42-47 right eye
    pts.push_back({-0.52, 0.40});
    pts.push_back({-0.46, 0.37});
    pts.push_back({-0.36, 0.37});
    pts.push_back({-0.28, 0.40});
    pts.push_back({-0.36, 0.44});
    pts.push_back({-0.46, 0.44});
    pts.push_back({0.28, 0.40});
    pts.push_back({0.36, 0.37});
    pts.push_back({0.46, 0.37});
    pts.push_back({0.52, 0.40});
    pts.push_back({0.46, 0.44});
    pts.push_back({0.36, 0.44});
    // 48-59 outer mouth
    pts.push_back({-0.30, 0.80});
    pts.push_back({-0.18, 0.76});
    pts.push_back({-0.07, 0.74});
    pts.push_back({0.0, 0.75});
    pts.push_back({0.07, 0.74});
    pts.push_back({0.18, 0.76});
    pts.push_back({0.30, 0.80});
    pts.push_back({0.18, 0.85});
    pts.push_back({0.07, 0.87});
    pts.push_back({0.0, 0.87});
    pts.push_back({-0.07, 0.87});
    pts.push_back({-0.18, 0.85});
    // 60-67 inner mouth
    pts.push_back({-0.25, 0.80});
    pts.push_back({-0.07, 0.78});
    pts.push_back({0.0, 0.79});
    pts.push_back({0.07, 0.78});
    pts.push_back({0.25, 0.80});
    pts.push_back({0.07, 0.82});
    pts.push_back({0.0, 0.83});
    pts.push_back({-0.07, 0.82});

    LandmarkFrame frame;
    frame.confidence = 1.0;
    const double scale = 0.42 * std::min(width, height);
    const double cx = 0.5 * width;
    const double cy = 0.5 * height;
    for (const Point2& p : pts) {
        frame.points.push_back({cx + scale * p.x, cy + scale * (p.y - 0.5)});
    }
    return frame;
}

FrameSequence render_synth_frames(const SynthVideo& video, LandmarkSet& lm_out, int width,
                                  int height) {
    if (video.traces.size() != 3) throw ParamError("renderer expects three region traces");
    const std::size_t n = video.traces.front().size();
    const LandmarkFrame face = template_face(width, height);

    std::array<Polygon, 3> polys;
    const std::array<Region, 3> regions = {Region::left_cheek, Region::mid_region,
                                           Region::right_cheek};
    for (std::size_t r = 0; r < 3; ++r) {
        polys[r] = roi_polygon(face, RoiSpec{regions[r], RoiScale::default_size});
    }

    // static per-pixel texture, deterministic in pixel coordinates
    auto texture = [](int x, int y) {
        std::uint32_t h = static_cast<std::uint32_t>(x) * 0x9E3779B9u ^
                          static_cast<std::uint32_t>(y) * 0x85EBCA6Bu;
        h ^= h >> 13;
        h *= 0xC2B2AE35u;
        h ^= h >> 16;
        return (static_cast<double>(h & 0xFFu) / 255.0 - 0.5) * 12.0;
    };

    FrameSequence seq;
    seq.fps = video.fps;
    seq.source_id = video.id.empty() ? "synth" : video.id;
    seq.frames.reserve(n);
    lm_out.fps = video.fps;
    lm_out.frames.assign(n, face);

    ImageU8 base(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double t = texture(x, y);
            base.at(x, y, 0) = static_cast<std::uint8_t>(std::clamp(70.0 + t, 0.0, 255.0));
            base.at(x, y, 1) = static_cast<std::uint8_t>(std::clamp(75.0 + t, 0.0, 255.0));
            base.at(x, y, 2) = static_cast<std::uint8_t>(std::clamp(80.0 + t, 0.0, 255.0));
        }
    }

    // precompute region membership per pixel (polygons are static)
    std::vector<std::int8_t> member(static_cast<std::size_t>(width) * height, -1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (std::size_t r = 0; r < 3; ++r) {
                if (point_in_polygon(polys[r], x + 0.5, y + 0.5)) {
                    member[static_cast<std::size_t>(y) * width + x] = static_cast<std::int8_t>(r);
                    break;
                }
            }
        }
    }

    for (std::size_t f = 0; f < n; ++f) {
        ImageU8 img = base;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const std::int8_t r = member[static_cast<std::size_t>(y) * width + x];
                if (r < 0) continue;
                const RegionTrace& tr = video.traces[static_cast<std::size_t>(r)];
                const double t = texture(x, y);
                img.at(x, y, 0) =
                    static_cast<std::uint8_t>(std::clamp(tr.mean_r[f] + t, 0.0, 255.0));
                img.at(x, y, 1) =
                    static_cast<std::uint8_t>(std::clamp(tr.mean_g[f] + t, 0.0, 255.0));
                img.at(x, y, 2) =
                    static_cast<std::uint8_t>(std::clamp(tr.mean_b[f] + t, 0.0, 255.0));
            }
        }
        seq.frames.push_back(std::move(img));
    }
    return seq;
}

}  // namespace fc
