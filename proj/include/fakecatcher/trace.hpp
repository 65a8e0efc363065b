#pragma once

#include <string_view>

#include "fakecatcher/common.hpp"

namespace fc {

enum class Region { left_cheek, mid_region, right_cheek, whole_face };

std::string_view region_name(Region r);
Region region_from_name(std::string_view name);

// Per-frame mean RGB of one facial region over a segment. Values are color
// means in [0,255]; all three channels have equal length.
struct RegionTrace {
    Signal mean_r;
    Signal mean_g;
    Signal mean_b;
    Region region = Region::mid_region;
    double fps = 30.0;

    std::size_t size() const { return mean_g.size(); }
    void validate() const;
    RegionTrace slice(std::size_t begin, std::size_t len) const;
};

}  // namespace fc
