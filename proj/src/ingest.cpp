#include "fakecatcher/ingest.hpp"

#include <cctype>
#include <fstream>
#include <map>

#include "json.hpp"

namespace fc {

namespace fs = std::filesystem;

std::string_view roi_scale_name(RoiScale s) {
    switch (s) {
        case RoiScale::smallest: return "smallest";
        case RoiScale::small: return "small";
        case RoiScale::default_size: return "default";
        case RoiScale::big: return "big";
        case RoiScale::face: return "face";
    }
    return "?";
}

RoiScale roi_scale_from_name(std::string_view name) {
    if (name == "smallest") return RoiScale::smallest;
    if (name == "small") return RoiScale::small;
    if (name == "default") return RoiScale::default_size;
    if (name == "big") return RoiScale::big;
    if (name == "face") return RoiScale::face;
    throw ParamError("unknown ROI scale: " + std::string(name));
}

void SegmentConfig::validate() const {
    if (omega < 16) throw ParamError("omega must be >= 16");
    if (stride != 0 && stride < 1) throw ParamError("stride must be >= 1");
}

// --- frame loading ----------------------------------------------------------

namespace {

// natural order: digit runs compare numerically, text runs lexically
bool natural_less(const std::string& a, const std::string& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (std::isdigit(static_cast<unsigned char>(a[i])) &&
            std::isdigit(static_cast<unsigned char>(b[j]))) {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            const std::string na = a.substr(i, i2 - i), nb = b.substr(j, j2 - j);
            const unsigned long long va = std::stoull(na), vb = std::stoull(nb);
            if (va != vb) return va < vb;
            i = i2;
            j = j2;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

}  // namespace

FrameSequence load_frames(const fs::path& dir, double fps) {
    if (fps <= 0.0) throw ParamError("fps must be positive");
    if (!fs::is_directory(dir)) throw IngestError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    if (files.empty()) throw IngestError("no frames in " + dir.string());
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return natural_less(a.filename().string(), b.filename().string());
    });

    FrameSequence seq;
    seq.fps = fps;
    seq.source_id = dir.filename().string();
    seq.frames.reserve(files.size());
    for (const auto& f : files) {
        ImageU8 img = load_image(f);
        if (!seq.frames.empty() && !img.same_dims(seq.frames.front()))
            throw IngestError("frame dimension mismatch at " + f.string());
        seq.frames.push_back(std::move(img));
    }
    return seq;
}

// --- landmark IO -------------------------------------------------------------

LandmarkSet load_landmarks(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open landmarks " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("malformed landmarks JSON in " + path.string() + ": " + e.what());
    }
    LandmarkSet lm;
    lm.fps = j.at("fps").get<double>();
    std::size_t expected_points = 0;
    for (const auto& jf : j.at("frames")) {
        LandmarkFrame frame;
        frame.confidence = jf.value("conf", 1.0);
        for (const auto& jp : jf.at("points")) {
            frame.points.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
        }
        if (!frame.points.empty()) {
            if (expected_points == 0) expected_points = frame.points.size();
            if (frame.points.size() != expected_points)
                throw IngestError("landmark count varies across frames in " + path.string());
        }
        lm.frames.push_back(std::move(frame));
    }
    return lm;
}

void save_landmarks(const fs::path& path, const LandmarkSet& lm) {
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < lm.frames.size(); ++i) {
        nlohmann::json pts = nlohmann::json::array();
        for (const Point2& p : lm.frames[i].points) pts.push_back({p.x, p.y});
        frames.push_back({{"idx", i}, {"conf", lm.frames[i].confidence}, {"points", pts}});
    }
    nlohmann::json j{{"fps", lm.fps}, {"frames", frames}};
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << j.dump() << "\n";
}

// --- trace CSV ----------------------------------------------------------------

void write_traces_csv(const fs::path& path, const std::vector<RegionTrace>& traces) {
    if (traces.empty()) throw ParamError("no traces to write");
    const std::size_t n = traces.front().size();
    for (const RegionTrace& t : traces) {
        if (t.size() != n) throw ParamError("traces have unequal lengths");
    }
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << "frame,region,mean_r,mean_g,mean_b\n";
    char buf[128];
    for (std::size_t f = 0; f < n; ++f) {
        for (const RegionTrace& t : traces) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.6f,%.6f,%.6f\n", f,
                          std::string(region_name(t.region)).c_str(), t.mean_r[f], t.mean_g[f],
                          t.mean_b[f]);
            out << buf;
        }
    }
}

std::vector<RegionTrace> read_traces_csv(const fs::path& path, double fps) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open traces " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty trace file " + path.string());
    if (line.rfind("frame,region,mean_r,mean_g,mean_b", 0) != 0)
        throw IngestError("unexpected trace CSV header in " + path.string());

    std::vector<Region> order;
    std::map<Region, RegionTrace> by_region;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<std::string, 5> cols;
        std::size_t start = 0;
        for (int c = 0; c < 5; ++c) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos && c < 4)
                throw IngestError("malformed trace row " + std::to_string(lineno) + " in " +
                                  path.string());
            cols[static_cast<std::size_t>(c)] =
                line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma + 1;
        }
        const Region region = region_from_name(cols[1]);
        auto [it, inserted] = by_region.try_emplace(region);
        if (inserted) {
            it->second.region = region;
            it->second.fps = fps;
            order.push_back(region);
        }
        it->second.mean_r.push_back(std::stod(cols[2]));
        it->second.mean_g.push_back(std::stod(cols[3]));
        it->second.mean_b.push_back(std::stod(cols[4]));
    }
    std::vector<RegionTrace> out;
    for (Region r : order) out.push_back(std::move(by_region[r]));
    if (out.empty()) throw IngestError("no trace rows in " + path.string());
    const std::size_t n = out.front().size();
    for (const RegionTrace& t : out) {
        if (t.size() != n) throw IngestError("regions have unequal lengths in " + path.string());
        t.validate();
    }
    return out;
}

// --- ROI polygons ---------------------------------------------------------------

namespace {

// 68-point annotation: 0-16 jaw, 17-26 brows, 27-35 nose, 36-47 eyes,
// 48-67 mouth. Index paths chosen to trace simple polygons.
constexpr std::array<int, 7> kLeftCheekIdx = {1, 2, 3, 4, 48, 31, 41};
constexpr std::array<int, 7> kRightCheekIdx = {15, 14, 13, 12, 54, 35, 46};
constexpr std::array<int, 8> kMidRegionIdx = {41, 39, 27, 42, 46, 54, 51, 48};

// Linear scale factors derived from the area ratios of the five ROI presets
// (smallest : small : default : big ~ 356 : 2508 : 7213 : 10871 px).
double scale_factor(RoiScale s) {
    switch (s) {
        case RoiScale::smallest: return 0.2221;
        case RoiScale::small: return 0.5897;
        case RoiScale::default_size: return 1.0;
        case RoiScale::big: return 1.2276;
        case RoiScale::face: return 1.0;
    }
    return 1.0;
}

Polygon face_hull(const LandmarkFrame& lm) {
    Polygon poly;
    for (int i = 0; i <= 16; ++i) poly.push_back(lm.points[static_cast<std::size_t>(i)]);
    for (int i = 26; i >= 17; --i) poly.push_back(lm.points[static_cast<std::size_t>(i)]);
    return poly;
}

template <std::size_t N>
Polygon from_indices(const LandmarkFrame& lm, const std::array<int, N>& idx) {
    Polygon poly;
    poly.reserve(N);
    for (int i : idx) poly.push_back(lm.points[static_cast<std::size_t>(i)]);
    return poly;
}

}  // namespace

Polygon roi_polygon(const LandmarkFrame& lm, const RoiSpec& spec) {
    if (lm.missing()) throw RegionError("landmarks missing for frame");
    if (lm.points.size() < 68) throw RegionError("landmark frame has fewer than 68 points");

    Polygon poly;
    if (spec.scale == RoiScale::face || spec.region == Region::whole_face) {
        poly = face_hull(lm);
        if (spec.region == Region::whole_face && spec.scale != RoiScale::face)
            poly = polygon_scaled(poly, scale_factor(spec.scale));
    } else {
        switch (spec.region) {
            case Region::left_cheek: poly = from_indices(lm, kLeftCheekIdx); break;
            case Region::right_cheek: poly = from_indices(lm, kRightCheekIdx); break;
            case Region::mid_region: poly = from_indices(lm, kMidRegionIdx); break;
            case Region::whole_face: break;  // handled above
        }
        const double f = scale_factor(spec.scale);
        if (f != 1.0) poly = polygon_scaled(poly, f);
    }
    if (polygon_area(poly) < 1e-9) throw RegionError("degenerate region polygon");
    if (!polygon_is_simple(poly)) throw RegionError("region polygon is self-intersecting");
    return poly;
}

// --- traces from rasters ----------------------------------------------------------

RegionTrace region_trace(const FrameSequence& frames, const std::vector<Polygon>& polygons,
                         Region region) {
    if (frames.size() != polygons.size())
        throw ParamError("one polygon per frame required");
    if (frames.size() == 0) throw ParamError("empty frame sequence");
    RegionTrace trace;
    trace.region = region;
    trace.fps = frames.fps;
    trace.mean_r.reserve(frames.size());
    trace.mean_g.reserve(frames.size());
    trace.mean_b.reserve(frames.size());

    for (std::size_t f = 0; f < frames.size(); ++f) {
        const ImageU8& img = frames.frames[f];
        const Polygon& poly = polygons[f];
        double minx = poly[0].x, maxx = poly[0].x, miny = poly[0].y, maxy = poly[0].y;
        for (const Point2& p : poly) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
        const int x0 = std::max(0, static_cast<int>(std::floor(minx)));
        const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(maxx)));
        const int y0 = std::max(0, static_cast<int>(std::floor(miny)));
        const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(maxy)));

        double sr = 0.0, sg = 0.0, sb = 0.0;
        std::size_t count = 0;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (!point_in_polygon(poly, x + 0.5, y + 0.5)) continue;
                sr += img.at(x, y, 0);
                sg += img.at(x, y, 1);
                sb += img.at(x, y, 2);
                ++count;
            }
        }
        if (count == 0)
            throw RegionError("region has no interior pixels at frame " + std::to_string(f));
        const double inv = 1.0 / static_cast<double>(count);
        trace.mean_r.push_back(sr * inv);
        trace.mean_g.push_back(sg * inv);
        trace.mean_b.push_back(sb * inv);
    }
    return trace;
}

std::vector<RegionTrace> rectify_roi(const FrameSequence& frames,
                                     const std::vector<Polygon>& polygons, int grid_w,
                                     int grid_h) {
    if (grid_w < 1 || grid_h < 1) throw ParamError("grid dimensions must be positive");
    if (frames.size() != polygons.size()) throw ParamError("one polygon per frame required");
    if (frames.size() == 0) throw ParamError("empty frame sequence");
    const int cells = grid_w * grid_h;

    std::vector<RegionTrace> out(static_cast<std::size_t>(cells));
    for (auto& t : out) {
        t.region = Region::mid_region;
        t.fps = frames.fps;
    }

    for (std::size_t f = 0; f < frames.size(); ++f) {
        const ImageU8& img = frames.frames[f];
        const Polygon& poly = polygons[f];
        std::vector<Point2> pts = poly;
        pts.push_back(polygon_centroid(poly));
        const auto tris = delaunay(pts);

        double minx = poly[0].x, maxx = poly[0].x, miny = poly[0].y, maxy = poly[0].y;
        for (const Point2& p : poly) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
        const double spanx = std::max(maxx - minx, 1e-9);
        const double spany = std::max(maxy - miny, 1e-9);
        // normalized target position of every triangulation vertex
        std::vector<Point2> uv(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            uv[i] = {(pts[i].x - minx) / spanx, (pts[i].y - miny) / spany};
        }

        std::vector<double> acc(static_cast<std::size_t>(cells) * 3, 0.0);
        std::vector<std::size_t> cnt(static_cast<std::size_t>(cells), 0);
        double tot_r = 0.0, tot_g = 0.0, tot_b = 0.0;
        std::size_t tot_n = 0;

        const int x0 = std::max(0, static_cast<int>(std::floor(minx)));
        const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(maxx)));
        const int y0 = std::max(0, static_cast<int>(std::floor(miny)));
        const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(maxy)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Point2 p{x + 0.5, y + 0.5};
                if (!point_in_polygon(poly, p.x, p.y)) continue;
                // locate the Delaunay triangle and map through its barycentrics
                double u = -1.0, v = -1.0;
                for (const Triangle& t : tris) {
                    const auto l = barycentric(pts[t.v[0]], pts[t.v[1]], pts[t.v[2]], p);
                    if (l[0] >= -1e-9 && l[1] >= -1e-9 && l[2] >= -1e-9) {
                        u = l[0] * uv[t.v[0]].x + l[1] * uv[t.v[1]].x + l[2] * uv[t.v[2]].x;
                        v = l[0] * uv[t.v[0]].y + l[1] * uv[t.v[1]].y + l[2] * uv[t.v[2]].y;
                        break;
                    }
                }
                if (u < 0.0) continue;  // numerically outside every triangle
                const int col = std::min(grid_w - 1, static_cast<int>(u * grid_w));
                const int row = std::min(grid_h - 1, static_cast<int>(v * grid_h));
                const std::size_t cell = static_cast<std::size_t>(row * grid_w + col);
                acc[cell * 3 + 0] += img.at(x, y, 0);
                acc[cell * 3 + 1] += img.at(x, y, 1);
                acc[cell * 3 + 2] += img.at(x, y, 2);
                ++cnt[cell];
                tot_r += img.at(x, y, 0);
                tot_g += img.at(x, y, 1);
                tot_b += img.at(x, y, 2);
                ++tot_n;
            }
        }
        if (tot_n == 0)
            throw RegionError("region has no interior pixels at frame " + std::to_string(f));
        const double fr = tot_r / static_cast<double>(tot_n);
        const double fg = tot_g / static_cast<double>(tot_n);
        const double fb = tot_b / static_cast<double>(tot_n);
        for (int c = 0; c < cells; ++c) {
            const std::size_t ci = static_cast<std::size_t>(c);
            if (cnt[ci] == 0) {
                // empty cell: fall back to the whole-region mean
                out[ci].mean_r.push_back(fr);
                out[ci].mean_g.push_back(fg);
                out[ci].mean_b.push_back(fb);
            } else {
                const double inv = 1.0 / static_cast<double>(cnt[ci]);
                out[ci].mean_r.push_back(acc[ci * 3 + 0] * inv);
                out[ci].mean_g.push_back(acc[ci * 3 + 1] * inv);
                out[ci].mean_b.push_back(acc[ci * 3 + 2] * inv);
            }
        }
    }
    return out;
}

// --- distortions --------------------------------------------------------------------

std::vector<double> gaussian_kernel(int k, double sigma) {
    if (k < 1 || k % 2 == 0) throw ParamError("kernel size must be odd and positive");
    if (sigma <= 0.0) throw ParamError("sigma must be positive");
    std::vector<double> taps(static_cast<std::size_t>(k));
    const int c = k / 2;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = static_cast<double>(i - c);
        taps[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d / (sigma * sigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

ImageU8 gaussian_blur(const ImageU8& img, int k, double sigma) {
    const auto taps = gaussian_kernel(k, sigma);
    const int c = k / 2;
    const int w = img.width, h = img.height;
    std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);
    // horizontal pass, clamp-to-edge
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                for (int i = 0; i < k; ++i) {
                    const int xi = std::clamp(x + i - c, 0, w - 1);
                    acc += taps[static_cast<std::size_t>(i)] * img.at(xi, y, ch);
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * 3 + static_cast<std::size_t>(ch)] = acc;
            }
        }
    }
    ImageU8 out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                for (int i = 0; i < k; ++i) {
                    const int yi = std::clamp(y + i - c, 0, h - 1);
                    acc += taps[static_cast<std::size_t>(i)] *
                           tmp[(static_cast<std::size_t>(yi) * w + x) * 3 +
                               static_cast<std::size_t>(ch)];
                }
                out.at(x, y, ch) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
            }
        }
    }
    return out;
}

ImageU8 median_filter(const ImageU8& img, int k) {
    if (k < 1 || k % 2 == 0) throw ParamError("kernel size must be odd and positive");
    const int c = k / 2;
    const int w = img.width, h = img.height;
    ImageU8 out(w, h);
    std::vector<std::uint8_t> window(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                std::size_t idx = 0;
                for (int dy = -c; dy <= c; ++dy) {
                    const int yi = std::clamp(y + dy, 0, h - 1);
                    for (int dx = -c; dx <= c; ++dx) {
                        const int xi = std::clamp(x + dx, 0, w - 1);
                        window[idx++] = img.at(xi, yi, ch);
                    }
                }
                auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
                std::nth_element(window.begin(), mid, window.end());
                out.at(x, y, ch) = *mid;
            }
        }
    }
    return out;
}

// --- segmentation ----------------------------------------------------------------------

Segmentation segmentize(std::size_t n_frames, const std::vector<double>& confidences,
                        const SegmentConfig& cfg) {
    cfg.validate();
    const std::size_t omega = cfg.omega;
    if (n_frames < omega)
        throw ParamError("sequence too short: need " + std::to_string(omega) + " frames, have " +
                         std::to_string(n_frames));
    if (!confidences.empty() && confidences.size() != n_frames)
        throw ParamError("confidence count does not match frame count");
    const std::size_t stride = cfg.stride == 0 ? omega : cfg.stride;

    Segmentation seg;
    std::size_t covered_end = 0;
    for (std::size_t start = 0; start + omega <= n_frames; start += stride) {
        bool ok = true;
        if (!confidences.empty() && cfg.min_face_conf > 0.0) {
            for (std::size_t i = start; i < start + omega; ++i) {
                if (confidences[i] < cfg.min_face_conf) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            seg.segments.push_back({start, omega});
        } else {
            ++seg.dropped_segments;
        }
        covered_end = start + omega;
    }
    seg.dropped_frames = n_frames - covered_end;
    return seg;
}

}  // namespace fc
