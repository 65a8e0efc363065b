#include "fakecatcher/pipeline.hpp"

#include <fstream>
#include <map>
#include <random>

namespace fc {

// --- manifest ---------------------------------------------------------------

void DatasetManifest::validate() const {
    std::map<std::string, std::string> split_of;
    for (const auto& e : entries) {
        if (e.label != 0 && e.label != 1) throw ParamError("manifest label must be 0 or 1");
        auto [it, inserted] = split_of.try_emplace(e.path, e.split);
        if (!inserted && it->second != e.split)
            throw ParamError("path assigned to two splits: " + e.path);
    }
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("malformed manifest JSON: " + std::string(e.what()));
    }
    if (j.value("format", "") != "fakecatcher-manifest")
        throw IngestError("not a manifest file: " + path.string());
    DatasetManifest m;
    m.fps = j.value("fps", 30.0);
    m.omega = j.value("omega", static_cast<std::size_t>(128));
    m.base_dir = path.parent_path();
    for (const auto& je : j.at("entries")) {
        ManifestEntry e;
        e.path = je.at("path").get<std::string>();
        e.landmarks = je.value("landmarks", "");
        const std::string label = je.at("label").get<std::string>();
        if (label != "fake" && label != "authentic")
            throw IngestError("manifest label must be 'fake' or 'authentic'");
        e.label = label == "fake" ? 1 : 0;
        e.source = je.value("source", "");
        e.split = je.value("split", "");
        e.pair = je.value("pair", -1);
        e.fps = je.value("fps", m.fps);
        m.entries.push_back(std::move(e));
    }
    m.validate();
    return m;
}

void DatasetManifest::save(const std::filesystem::path& path) const {
    validate();
    nlohmann::json entries_json = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je{{"path", e.path},
                          {"label", e.label == 1 ? "fake" : "authentic"},
                          {"fps", e.fps}};
        if (!e.landmarks.empty()) je["landmarks"] = e.landmarks;
        if (!e.source.empty()) je["source"] = e.source;
        if (!e.split.empty()) je["split"] = e.split;
        if (e.pair >= 0) je["pair"] = e.pair;
        entries_json.push_back(std::move(je));
    }
    nlohmann::json j{{"format", "fakecatcher-manifest"},
                     {"version", 1},
                     {"fps", fps},
                     {"omega", omega},
                     {"entries", entries_json}};
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

DatasetManifest split_dataset(const DatasetManifest& manifest, double train_ratio,
                              std::uint64_t seed, bool stratify) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0))
        throw ParamError("train_ratio must be in (0,1)");
    DatasetManifest out = manifest;
    std::vector<std::size_t> fake_idx, real_idx;
    for (std::size_t i = 0; i < out.entries.size(); ++i)
        (out.entries[i].label == 1 ? fake_idx : real_idx).push_back(i);
    std::mt19937_64 rng(seed);
    auto assign = [&](std::vector<std::size_t>& idx) {
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n_train =
            static_cast<std::size_t>(std::lround(train_ratio * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < idx.size(); ++i)
            out.entries[idx[i]].split = i < n_train ? "train" : "test";
    };
    if (stratify) {
        assign(real_idx);
        assign(fake_idx);
    } else {
        std::vector<std::size_t> all = real_idx;
        all.insert(all.end(), fake_idx.begin(), fake_idx.end());
        std::sort(all.begin(), all.end());
        assign(all);
    }
    out.validate();
    return out;
}

// --- evaluation ---------------------------------------------------------------

EvalReport evaluate(const std::vector<int>& segment_pred, const std::vector<int>& segment_label,
                    const std::vector<std::string>& video_ids) {
    if (segment_pred.size() != segment_label.size() || segment_pred.size() != video_ids.size())
        throw ParamError("evaluation inputs must be parallel");
    if (segment_pred.empty()) throw ParamError("nothing to evaluate");

    EvalReport report;
    struct VideoAcc {
        std::vector<int> preds;
        int label = -1;
    };
    std::map<std::string, VideoAcc> videos;
    for (std::size_t i = 0; i < segment_pred.size(); ++i) {
        const int p = segment_pred[i], t = segment_label[i];
        if ((p != 0 && p != 1) || (t != 0 && t != 1))
            throw ParamError("labels and predictions must be 0/1");
        if (p == 1 && t == 1) ++report.segment.tp;
        if (p == 0 && t == 0) ++report.segment.tn;
        if (p == 1 && t == 0) ++report.segment.fp;
        if (p == 0 && t == 1) ++report.segment.fn;
        auto& v = videos[video_ids[i]];
        v.preds.push_back(p);
        if (v.label == -1) {
            v.label = t;
        } else if (v.label != t) {
            throw ParamError("inconsistent labels within video " + video_ids[i]);
        }
    }
    std::size_t real_ok = 0, real_n = 0, fake_ok = 0, fake_n = 0;
    for (const auto& [id, v] : videos) {
        const int pred = vote_majority(v.preds);
        if (pred == 1 && v.label == 1) ++report.video.tp;
        if (pred == 0 && v.label == 0) ++report.video.tn;
        if (pred == 1 && v.label == 0) ++report.video.fp;
        if (pred == 0 && v.label == 1) ++report.video.fn;
        if (v.label == 0) {
            ++real_n;
            if (pred == 0) ++real_ok;
        } else {
            ++fake_n;
            if (pred == 1) ++fake_ok;
        }
    }
    report.real_video_accuracy =
        real_n == 0 ? 0.0 : static_cast<double>(real_ok) / static_cast<double>(real_n);
    report.fake_video_accuracy =
        fake_n == 0 ? 0.0 : static_cast<double>(fake_ok) / static_cast<double>(fake_n);
    return report;
}

namespace {

nlohmann::json confusion_json(const Confusion& c) {
    return {{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}, {"accuracy", c.accuracy()}};
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
    return {{"segment", confusion_json(segment)},
            {"video", confusion_json(video)},
            {"per_class",
             {{"authentic", real_video_accuracy}, {"fake", fake_video_accuracy}}},
            {"config", config_snapshot}};
}

std::string EvalReport::to_text() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "segment accuracy %.4f (tp=%zu tn=%zu fp=%zu fn=%zu)\n"
                  "video accuracy   %.4f (tp=%zu tn=%zu fp=%zu fn=%zu)\n"
                  "class accuracy   authentic=%.4f fake=%.4f\n",
                  segment.accuracy(), segment.tp, segment.tn, segment.fp, segment.fn,
                  video.accuracy(), video.tp, video.tn, video.fp, video.fn, real_video_accuracy,
                  fake_video_accuracy);
    return buf;
}

// --- PCA / Fisher ---------------------------------------------------------------

namespace {

// cyclic Jacobi eigendecomposition of a symmetric matrix
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigvals,
                  std::vector<std::vector<double>>& eigvecs) {
    const std::size_t n = a.size();
    eigvecs.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) eigvecs[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        }
        if (off < 1e-20) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = eigvecs[k][p], vkq = eigvecs[k][q];
                    eigvecs[k][p] = c * vkp - s * vkq;
                    eigvecs[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    eigvals.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigvals[i] = a[i][i];
}

}  // namespace

PcaResult pca_fit(const FeatureMatrix& x, int k) {
    if (x.empty()) throw ParamError("empty feature matrix");
    const std::size_t n = x.size();
    const std::size_t d = x.front().size();
    if (k < 1 || static_cast<std::size_t>(k) > d) throw ParamError("invalid component count");

    PcaResult res;
    res.mean.assign(d, 0.0);
    for (const auto& row : x) {
        if (row.size() != d) throw ParamError("ragged feature matrix");
        for (std::size_t j = 0; j < d; ++j) res.mean[j] += row[j];
    }
    for (double& v : res.mean) v /= static_cast<double>(n);

    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& row : x) {
        for (std::size_t i = 0; i < d; ++i) {
            const double ci = row[i] - res.mean[i];
            for (std::size_t j = i; j < d; ++j) cov[i][j] += ci * (row[j] - res.mean[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n);
            cov[j][i] = cov[i][j];
        }
    }

    std::vector<double> eigvals;
    std::vector<std::vector<double>> eigvecs;  // columns are eigenvectors
    jacobi_eigen(cov, eigvals, eigvecs);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0UL);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return eigvals[a] > eigvals[b]; });

    double total = 0.0;
    for (double v : eigvals) total += std::max(v, 0.0);
    double kept = 0.0;
    for (int c = 0; c < k; ++c) {
        const std::size_t idx = order[static_cast<std::size_t>(c)];
        std::vector<double> comp(d);
        for (std::size_t j = 0; j < d; ++j) comp[j] = eigvecs[j][idx];
        // deterministic sign: largest-magnitude entry positive
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j) {
            if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
        }
        if (comp[arg] < 0.0) {
            for (double& v : comp) v = -v;
        }
        res.components.push_back(std::move(comp));
        res.eigenvalues.push_back(eigvals[idx]);
        kept += std::max(eigvals[idx], 0.0);
    }
    res.explained_ratio = total > 0.0 ? kept / total : 0.0;
    return res;
}

FeatureMatrix PcaResult::project(const FeatureMatrix& x) const {
    FeatureMatrix out(x.size(), std::vector<double>(components.size(), 0.0));
    for (std::size_t r = 0; r < x.size(); ++r) {
        for (std::size_t c = 0; c < components.size(); ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < mean.size(); ++j)
                acc += (x[r][j] - mean[j]) * components[c][j];
            out[r][c] = acc;
        }
    }
    return out;
}

FeatureMatrix PcaResult::reconstruct(const FeatureMatrix& projected) const {
    FeatureMatrix out(projected.size(), std::vector<double>(mean.size()));
    for (std::size_t r = 0; r < projected.size(); ++r) {
        out[r] = mean;
        for (std::size_t c = 0; c < components.size(); ++c) {
            for (std::size_t j = 0; j < mean.size(); ++j)
                out[r][j] += projected[r][c] * components[c][j];
        }
    }
    return out;
}

std::vector<double> fisher_ratio(const FeatureMatrix& x, const std::vector<int>& y,
                                 std::vector<std::uint8_t>* degenerate) {
    if (x.size() != y.size()) throw ParamError("labels do not match rows");
    if (x.empty()) throw ParamError("empty feature matrix");
    const std::size_t d = x.front().size();
    std::array<std::vector<double>, 2> mean{std::vector<double>(d, 0.0),
                                            std::vector<double>(d, 0.0)};
    std::array<std::vector<double>, 2> var{std::vector<double>(d, 0.0),
                                           std::vector<double>(d, 0.0)};
    std::array<std::size_t, 2> count{0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t cls = y[i] == 1 ? 1 : 0;
        ++count[cls];
        for (std::size_t j = 0; j < d; ++j) mean[cls][j] += x[i][j];
    }
    if (count[0] == 0 || count[1] == 0) throw ParamError("need samples from both classes");
    for (int cls = 0; cls < 2; ++cls) {
        for (std::size_t j = 0; j < d; ++j)
            mean[static_cast<std::size_t>(cls)][j] /= static_cast<double>(count[static_cast<std::size_t>(cls)]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t cls = y[i] == 1 ? 1 : 0;
        for (std::size_t j = 0; j < d; ++j) {
            const double c = x[i][j] - mean[cls][j];
            var[cls][j] += c * c;
        }
    }
    std::vector<double> ratio(d, 0.0);
    if (degenerate) degenerate->assign(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
        const double v0 = var[0][j] / static_cast<double>(count[0]);
        const double v1 = var[1][j] / static_cast<double>(count[1]);
        const double gap = mean[1][j] - mean[0][j];
        if (v0 + v1 < 1e-24) {
            if (degenerate) (*degenerate)[j] = 1;
            ratio[j] = 0.0;
        } else {
            ratio[j] = gap * gap / (v0 + v1);
        }
    }
    return ratio;
}

// --- end-to-end -----------------------------------------------------------------

SignalBundle normalize_bundle(const SignalBundle& bundle, NormMethod method) {
    if (method == NormMethod::none) return bundle;
    SignalBundle out = bundle;
    for (Signal* sig : {&out.g_left, &out.g_right, &out.g_mid, &out.c_left, &out.c_right,
                        &out.c_mid})
        *sig = normalize(*sig, method);
    return out;
}

std::vector<SignalBundle> bundles_from_traces(const std::vector<RegionTrace>& traces,
                                              const CatchConfig& cfg) {
    const RegionTrace* left = nullptr;
    const RegionTrace* mid = nullptr;
    const RegionTrace* right = nullptr;
    for (const RegionTrace& t : traces) {
        if (t.region == Region::left_cheek) left = &t;
        if (t.region == Region::mid_region) mid = &t;
        if (t.region == Region::right_cheek) right = &t;
    }
    if (!left || !mid || !right)
        throw ParamError("traces must cover the left, mid and right regions");

    const auto seg = segmentize(mid->size(), {}, cfg.seg);
    std::vector<SignalBundle> bundles;
    for (const SegmentSpan& span : seg.segments) {
        SignalBundle b = build_bundle(left->slice(span.begin, span.length),
                                      mid->slice(span.begin, span.length),
                                      right->slice(span.begin, span.length), cfg.ppg);
        bundles.push_back(normalize_bundle(b, cfg.signal_norm));
    }
    return bundles;
}

FeatureMatrix features_from_traces(const std::vector<RegionTrace>& traces,
                                   const CatchConfig& cfg) {
    FeatureMatrix rows;
    for (const SignalBundle& b : bundles_from_traces(traces, cfg))
        rows.push_back(assemble_126(b, cfg.ppg).values);
    return rows;
}

VideoVerdict catch_traces(const std::vector<RegionTrace>& traces, const SvmModel& model,
                          const CatchConfig& cfg) {
    const FeatureMatrix rows = features_from_traces(traces, cfg);
    std::vector<double> probs;
    for (const auto& row : rows) probs.push_back(predict_probability(model, row));
    return vote_weighted(probs, model.prob_threshold);
}

namespace {

std::vector<RegionTrace> traces_from_frames(const FrameSequence& frames,
                                            const LandmarkSet& landmarks) {
    if (landmarks.frames.size() != frames.size())
        throw ParamError("landmark frames do not match the sequence");
    std::vector<RegionTrace> traces;
    for (const Region region :
         {Region::left_cheek, Region::mid_region, Region::right_cheek}) {
        std::vector<Polygon> polys;
        polys.reserve(frames.size());
        for (const LandmarkFrame& lm : landmarks.frames)
            polys.push_back(roi_polygon(lm, RoiSpec{region, RoiScale::default_size}));
        traces.push_back(region_trace(frames, polys, region));
    }
    return traces;
}

}  // namespace

VideoVerdict catch_frames(const FrameSequence& frames, const LandmarkSet& landmarks,
                          const SvmModel& model, const CatchConfig& cfg) {
    return catch_traces(traces_from_frames(frames, landmarks), model, cfg);
}

std::vector<PpgMap> maps_from_frames(const FrameSequence& frames, const LandmarkSet& landmarks,
                                     const CatchConfig& cfg) {
    if (landmarks.frames.size() != frames.size())
        throw ParamError("landmark frames do not match the sequence");
    std::vector<Polygon> polys;
    polys.reserve(frames.size());
    for (const LandmarkFrame& lm : landmarks.frames)
        polys.push_back(roi_polygon(lm, RoiSpec{Region::mid_region, RoiScale::default_size}));
    const auto cells = rectify_roi(frames, polys, 8, 4);

    std::vector<double> conf;
    conf.reserve(landmarks.frames.size());
    for (const LandmarkFrame& lm : landmarks.frames) conf.push_back(lm.confidence);
    const auto seg = segmentize(frames.size(), conf, cfg.seg);

    std::vector<PpgMap> maps;
    for (const SegmentSpan& span : seg.segments) {
        std::vector<Signal> cell_signals;
        cell_signals.reserve(cells.size());
        for (const RegionTrace& cell : cells) {
            cell_signals.push_back(chrom_ppg(cell.slice(span.begin, span.length), cfg.ppg));
        }
        maps.push_back(cfg.spectral_maps
                           ? build_spectral_map(cell_signals, frames.fps)
                           : build_ppg_map(cell_signals));
    }
    return maps;
}

VideoVerdict catch_frames_cnn(const FrameSequence& frames, const LandmarkSet& landmarks,
                              const CnnModel& model, const CatchConfig& cfg) {
    const auto maps = maps_from_frames(frames, landmarks, cfg);
    if (maps.empty()) throw ParamError("no usable segments");
    std::vector<double> probs;
    for (const PpgMap& map : maps) probs.push_back(cnn_forward(model, map));
    return vote_weighted(probs, 0.5);
}

nlohmann::json verdict_to_json(const VideoVerdict& verdict, const std::string& video_id) {
    nlohmann::json per_segment = nlohmann::json::array();
    for (const auto& s : verdict.per_segment)
        per_segment.push_back({{"segment", s.segment_index}, {"p_fake", s.p_fake}});
    return {{"video", video_id},
            {"label", verdict.fake ? "fake" : "authentic"},
            {"confidence", verdict.confidence},
            {"n_segments", verdict.n_segments},
            {"per_segment", per_segment}};
}

std::string verdict_to_text(const VideoVerdict& verdict, const std::string& video_id) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s: %s (confidence %.3f, %d segments)\n", video_id.c_str(),
                  verdict.fake ? "FAKE" : "AUTHENTIC", verdict.confidence, verdict.n_segments);
    return buf;
}

}  // namespace fc
