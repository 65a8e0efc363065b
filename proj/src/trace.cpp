#include "fakecatcher/trace.hpp"

namespace fc {

std::string_view region_name(Region r) {
    switch (r) {
        case Region::left_cheek: return "left";
        case Region::mid_region: return "mid";
        case Region::right_cheek: return "right";
        case Region::whole_face: return "face";
    }
    return "?";
}

Region region_from_name(std::string_view name) {
    if (name == "left" || name == "left_cheek") return Region::left_cheek;
    if (name == "mid" || name == "mid_region") return Region::mid_region;
    if (name == "right" || name == "right_cheek") return Region::right_cheek;
    if (name == "face" || name == "whole_face") return Region::whole_face;
    throw ParamError("unknown region name: " + std::string(name));
}

void RegionTrace::validate() const {
    if (mean_r.size() != mean_g.size() || mean_g.size() != mean_b.size())
        throw ParamError("region trace channels have unequal lengths");
    if (fps <= 0.0) throw ParamError("region trace fps must be positive");
    for (const Signal* ch : {&mean_r, &mean_g, &mean_b}) {
        for (double v : *ch) {
            if (!std::isfinite(v) || v < 0.0 || v > 255.0)
                throw ParamError("region trace value outside [0,255]");
        }
    }
}

RegionTrace RegionTrace::slice(std::size_t begin, std::size_t len) const {
    if (begin + len > size()) throw ParamError("trace slice out of range");
    RegionTrace out;
    out.region = region;
    out.fps = fps;
    out.mean_r.assign(mean_r.begin() + begin, mean_r.begin() + begin + len);
    out.mean_g.assign(mean_g.begin() + begin, mean_g.begin() + begin + len);
    out.mean_b.assign(mean_b.begin() + begin, mean_b.begin() + begin + len);
    return out;
}

}  // namespace fc
