#pragma once

#include <cstdint>

#include "seqtran/volume.hpp"

namespace seqtran {

struct Confusion {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
};

// Voxelwise counts; both volumes must be binary and share a shape.
Confusion confusion(const LabelVolume& pred, const LabelVolume& gt);

double dice(const Confusion& c); // 2TP / (2TP + FP + FN)
double iou(const Confusion& c);  // TP / (TP + FP + FN)

} // namespace seqtran
