#pragma once

#include <vector>

#include "fakecatcher/common.hpp"

namespace fc {

struct SegmentProbability {
    double p_fake = 0.0;  // clamped to [0,1]
    int segment_index = 0;
};

struct VideoVerdict {
    bool fake = false;
    double confidence = 0.0;  // |mean - tau| rescaled to [0,1]
    int n_segments = 0;
    std::vector<SegmentProbability> per_segment;
};

// Strict majority of 0/1 labels; a tie falls back to the expectation rule
// against tau (ties land on the fake side at tau = 0.5).
int vote_majority(const std::vector<int>& labels, double tau = 0.5);

// Weighted vote: fake iff mean(p) >= tau.
VideoVerdict vote_weighted(const std::vector<double>& p_fake, double tau = 0.5);

}  // namespace fc
