#pragma once

#include "seqtran/dataset.hpp"
#include "seqtran/volume.hpp"

namespace seqtran {

struct SsimParams {
    int window = 7;            // odd, >= 3, box window, stride 1, valid mode
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0; // labels are binary

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
    void validate() const;
};

// Mean structural similarity over all valid sliding windows of two binary
// volumes. The parallel version uses summed-area tables and accumulates
// per-slice partials in index order; the serial version recomputes every
// window directly and is kept as the reference the tests compare against.
double ssim_volume(const LabelVolume& a, const LabelVolume& b, const SsimParams& params);
double ssim_volume_serial(const LabelVolume& a, const LabelVolume& b, const SsimParams& params);

// Mean pairwise SSIM between the label volumes of two tasks (sorted-order
// accumulation, hence exactly symmetric). Tasks must share a grid.
double label_similarity_r(const TaskDataset& task_a, const TaskDataset& task_b,
                          const SsimParams& params);

} // namespace seqtran
