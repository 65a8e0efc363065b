#pragma once

#include "json.hpp"

#include "fakecatcher/aggregate.hpp"
#include "fakecatcher/cnn.hpp"
#include "fakecatcher/features.hpp"
#include "fakecatcher/svm.hpp"
#include "fakecatcher/synth.hpp"

namespace fc {

struct ManifestEntry {
    std::string path;       // trace CSV or frame directory, manifest-relative
    std::string landmarks;  // landmark JSON for frame input; empty for traces
    int label = 0;          // 1 fake, 0 authentic
    std::string source;
    std::string split;  // "train" / "test" / "validation" / ""
    int pair = -1;      // pair id for the pairwise task, -1 when unpaired
    double fps = 30.0;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    double fps = 30.0;
    std::size_t omega = 128;
    std::filesystem::path base_dir;  // resolved against entry paths

    void validate() const;  // unique paths, one split per path
    static DatasetManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

// Stratified train/test assignment, deterministic for the seed; leaves the
// remaining fraction as "test".
DatasetManifest split_dataset(const DatasetManifest& manifest, double train_ratio,
                              std::uint64_t seed, bool stratify = true);

struct Confusion {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    double accuracy() const {
        return total() == 0 ? 0.0
                            : static_cast<double>(tp + tn) / static_cast<double>(total());
    }
};

struct EvalReport {
    Confusion segment;
    Confusion video;
    double real_video_accuracy = 0.0;  // authentic class
    double fake_video_accuracy = 0.0;
    nlohmann::json config_snapshot;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Per-segment predictions and labels grouped into videos by id; video labels
// come from strict-majority voting of the segment predictions.
EvalReport evaluate(const std::vector<int>& segment_pred, const std::vector<int>& segment_label,
                    const std::vector<std::string>& video_ids);

struct PcaResult {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // k x d, orthonormal rows
    std::vector<double> eigenvalues;              // descending, length k
    double explained_ratio = 0.0;

    FeatureMatrix project(const FeatureMatrix& x) const;
    FeatureMatrix reconstruct(const FeatureMatrix& projected) const;
};

PcaResult pca_fit(const FeatureMatrix& x, int k);

// Per-feature class separability (mu1-mu2)^2 / (s1^2+s2^2); zero-variance
// features flag as degenerate and report 0.
std::vector<double> fisher_ratio(const FeatureMatrix& x, const std::vector<int>& y,
                                 std::vector<std::uint8_t>* degenerate = nullptr);

// --- end-to-end -------------------------------------------------------------

struct CatchConfig {
    PpgConfig ppg;
    SegmentConfig seg;
    enum class Engine { svm, cnn } engine = Engine::svm;
    bool spectral_maps = true;  // cnn input kind
    NormMethod signal_norm = NormMethod::none;
};

// Segment bundles from three-region traces (left, mid, right order enforced
// by region tags).
std::vector<SignalBundle> bundles_from_traces(const std::vector<RegionTrace>& traces,
                                              const CatchConfig& cfg);

FeatureMatrix features_from_traces(const std::vector<RegionTrace>& traces,
                                   const CatchConfig& cfg);

SignalBundle normalize_bundle(const SignalBundle& bundle, NormMethod method);

VideoVerdict catch_traces(const std::vector<RegionTrace>& traces, const SvmModel& model,
                          const CatchConfig& cfg);
VideoVerdict catch_frames(const FrameSequence& frames, const LandmarkSet& landmarks,
                          const SvmModel& model, const CatchConfig& cfg);
VideoVerdict catch_frames_cnn(const FrameSequence& frames, const LandmarkSet& landmarks,
                              const CnnModel& model, const CatchConfig& cfg);

// PPG maps of every usable segment of the rectified mid region.
std::vector<PpgMap> maps_from_frames(const FrameSequence& frames, const LandmarkSet& landmarks,
                                     const CatchConfig& cfg);

nlohmann::json verdict_to_json(const VideoVerdict& verdict, const std::string& video_id);
std::string verdict_to_text(const VideoVerdict& verdict, const std::string& video_id);

}  // namespace fc
