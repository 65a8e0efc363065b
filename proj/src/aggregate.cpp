#include "fakecatcher/aggregate.hpp"

namespace fc {

int vote_majority(const std::vector<int>& labels, double tau) {
    if (labels.empty()) throw ParamError("majority vote over no labels");
    std::size_t ones = 0;
    for (int v : labels) {
        if (v != 0 && v != 1) throw ParamError("majority vote expects 0/1 labels");
        ones += static_cast<std::size_t>(v);
    }
    const std::size_t zeros = labels.size() - ones;
    if (ones > zeros) return 1;
    if (zeros > ones) return 0;
    // tie: weigh toward the expectation threshold
    const double mean = static_cast<double>(ones) / static_cast<double>(labels.size());
    return mean >= tau ? 1 : 0;
}

VideoVerdict vote_weighted(const std::vector<double>& p_fake, double tau) {
    if (p_fake.empty()) throw ParamError("weighted vote over no probabilities");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ParamError("tau must be in [0,1]");
    VideoVerdict verdict;
    verdict.n_segments = static_cast<int>(p_fake.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < p_fake.size(); ++i) {
        const double p = std::clamp(p_fake[i], 0.0, 1.0);
        verdict.per_segment.push_back({p, static_cast<int>(i)});
        mean += p;
    }
    mean /= static_cast<double>(p_fake.size());
    verdict.fake = mean >= tau;
    const double denom = verdict.fake ? std::max(1.0 - tau, 1e-9) : std::max(tau, 1e-9);
    verdict.confidence = std::clamp(std::abs(mean - tau) / denom, 0.0, 1.0);
    return verdict;
}

}  // namespace fc
