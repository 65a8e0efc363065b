#pragma once

#include <filesystem>
#include <optional>

#include "fakecatcher/geometry.hpp"
#include "fakecatcher/image.hpp"
#include "fakecatcher/trace.hpp"

namespace fc {

// A facial region cannot be produced for a frame (missing/degenerate
// landmarks, empty polygon interior).
struct RegionError : Error {
    using Error::Error;
};

struct FrameSequence {
    std::vector<ImageU8> frames;
    double fps = 30.0;
    std::string source_id;

    std::size_t size() const { return frames.size(); }
    double duration_s() const { return static_cast<double>(frames.size()) / fps; }
};

// Per-frame facial landmarks (68-point annotation convention).
struct LandmarkFrame {
    std::vector<Point2> points;
    double confidence = 1.0;
    bool missing() const { return points.empty(); }
};

struct LandmarkSet {
    std::vector<LandmarkFrame> frames;
    double fps = 30.0;
};

enum class RoiScale { smallest, small, default_size, big, face };

std::string_view roi_scale_name(RoiScale s);
RoiScale roi_scale_from_name(std::string_view name);

struct RoiSpec {
    Region region = Region::mid_region;
    RoiScale scale = RoiScale::default_size;
};

struct SegmentConfig {
    std::size_t omega = 128;  // frames per segment
    std::size_t stride = 0;   // 0 = non-overlapping (stride = omega)
    double min_face_conf = 0.0;

    void validate() const;
};

// --- frame / landmark / trace IO ---------------------------------------

// Loads every PNG/PPM/PGM in `dir`, ordered by natural sort of filenames.
FrameSequence load_frames(const std::filesystem::path& dir, double fps);

// One JSON document per video: {fps, frames:[{idx, conf, points:[[x,y],...]}]}
LandmarkSet load_landmarks(const std::filesystem::path& path);
void save_landmarks(const std::filesystem::path& path, const LandmarkSet& lm);

// CSV with header frame,region,mean_r,mean_g,mean_b; one file per video.
void write_traces_csv(const std::filesystem::path& path,
                      const std::vector<RegionTrace>& traces);
// Returns traces in file order of first appearance of each region.
std::vector<RegionTrace> read_traces_csv(const std::filesystem::path& path, double fps);

// --- regions -------------------------------------------------------------

// Region polygon from one frame's landmarks. Areas are monotone in scale:
// smallest < small < default < big <= face.
Polygon roi_polygon(const LandmarkFrame& lm, const RoiSpec& spec);

// Mean RGB over polygon-interior pixels, one polygon per frame.
RegionTrace region_trace(const FrameSequence& frames, const std::vector<Polygon>& polygons,
                         Region region);

// Piecewise-affine rectification of a polygonal region onto a grid_h x grid_w
// cell grid: interior pixels map through the barycentric coordinates of their
// Delaunay triangle; each cell trace is the per-frame mean RGB of the pixels
// landing in it. Cells are indexed row-major.
std::vector<RegionTrace> rectify_roi(const FrameSequence& frames,
                                     const std::vector<Polygon>& polygons, int grid_w = 8,
                                     int grid_h = 4);

// --- distortions -----------------------------------------------------------

// Normalized 1-D Gaussian taps for an odd kernel size.
std::vector<double> gaussian_kernel(int k, double sigma);
// Separable Gaussian convolution, clamp-to-edge. k must be odd.
ImageU8 gaussian_blur(const ImageU8& img, int k, double sigma);
// Order-statistic filter over a k x k clamp-to-edge window.
ImageU8 median_filter(const ImageU8& img, int k);

// --- segmentation ----------------------------------------------------------

struct SegmentSpan {
    std::size_t begin = 0;
    std::size_t length = 0;
};

struct Segmentation {
    std::vector<SegmentSpan> segments;
    std::size_t dropped_frames = 0;    // trailing remainder
    std::size_t dropped_segments = 0;  // below-confidence windows
};

// Cuts n_frames into omega-length windows. confidences may be empty (no
// confidence gating). Windows containing any frame below min_face_conf are
// dropped and counted.
Segmentation segmentize(std::size_t n_frames, const std::vector<double>& confidences,
                        const SegmentConfig& cfg);

}  // namespace fc
