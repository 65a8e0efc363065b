#pragma once

#include <cstdint>
#include <filesystem>

#include "fakecatcher/ingest.hpp"

namespace fc {

// Desk-scale oracle corpus: coherent ("authentic") versus decorrelated
// ("fake") three-region trace pairs with matched generation parameters.
struct SynthParams {
    int n_pairs = 100;
    std::uint64_t seed = 20200704;
    double fps = 30.0;
    std::size_t omega = 128;
    int segments_per_video = 4;

    double f_lo = 0.9;  // cardiac frequency range, Hz
    double f_hi = 1.6;
    double amp = 2.0;           // pulsatile amplitude on G, gray levels
    double amp_jitter = 0.10;   // per-region amplitude spread
    double phase_jitter = 0.10; // per-region phase spread, fraction of a cycle
    double noise_sigma = 0.10;  // additive channel noise, gray levels

    // decorrelation artifacts of the fake member
    double freq_detune = 0.15;  // Hz, independent per region
    double time_jitter = 0.5;   // frames, per-frame sampling jitter
    double value_jitter = 0.9;  // gray levels, per-frame additive flicker
};

struct SynthVideo {
    std::vector<RegionTrace> traces;  // left, mid, right
    bool fake = false;
    std::string id;
    double fps = 30.0;
};

SynthVideo synth_video(const SynthParams& params, std::uint64_t video_seed, bool fake);

// Writes n_pairs (authentic, fake) trace CSVs plus manifest.json into outdir;
// byte-identical for a fixed seed. Returns the manifest path.
std::filesystem::path gen_synthetic_corpus(const std::filesystem::path& outdir,
                                           const SynthParams& params);

// A canonical 68-point face, scaled into a width x height raster.
LandmarkFrame template_face(int width, int height);

// Paints the three region traces onto raster frames around the template
// face: region interiors carry the trace color plus a static per-pixel
// texture; the background stays fixed. Landmarks for every frame land in
// lm_out.
FrameSequence render_synth_frames(const SynthVideo& video, LandmarkSet& lm_out, int width = 96,
                                  int height = 96);

}  // namespace fc
