#pragma once

#include <utility>
#include <vector>

#include "seqtran/dataset.hpp"
#include "seqtran/ot.hpp"

namespace seqtran {

struct PcaModel {
    std::vector<double> mean;                    // length F
    std::vector<std::vector<double>> components; // d orthonormal rows of length F
    std::vector<double> explained_variance;      // d values, non-increasing

    int dim() const { return static_cast<int>(components.size()); }
    std::vector<double> project(const std::vector<double>& point) const;
};

// Top-d principal components of the sample covariance. Eigendecomposition runs
// on the F x F covariance or the Gram matrix, whichever is smaller; component
// signs are fixed by making the largest-magnitude entry positive.
PcaModel fit_pca(const std::vector<std::vector<double>>& points, int d);

struct ReductionConfig {
    int dim = 16;       // clamped to the available rank
    int slice_axis = 2; // 0=x, 1=y, 2=z (axial)
};

// Fits one PCA on the pooled slice features of both tasks, then turns every
// image into an empirical distribution over its projected slices (uniform
// weights). Tasks must already share a grid.
std::pair<std::vector<DiscreteDistribution>, std::vector<DiscreteDistribution>>
reduce_pair(const TaskDataset& task_a, const TaskDataset& task_b, const ReductionConfig& config);

// One flattened slice of the image along the configured axis.
std::vector<std::vector<double>> slice_features(const ImageVolume& image, int slice_axis);

} // namespace seqtran
