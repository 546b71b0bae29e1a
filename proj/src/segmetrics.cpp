#include "seqtran/segmetrics.hpp"

#include "seqtran/error.hpp"

namespace seqtran {

Confusion confusion(const LabelVolume& pred, const LabelVolume& gt) {
    if (pred.shape != gt.shape) {
        throw Error("shape mismatch: prediction and ground truth differ");
    }
    Confusion c;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const std::uint8_t p = pred.data[i];
        const std::uint8_t g = gt.data[i];
        if (p > 1 || g > 1) {
            throw Error("non-binary input: confusion counts need {0,1} volumes");
        }
        if (p && g) {
            ++c.tp;
        } else if (p && !g) {
            ++c.fp;
        } else if (!p && g) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

double dice(const Confusion& c) {
    const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) {
        throw Error("empty union: dice undefined when 2TP+FP+FN = 0");
    }
    return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double iou(const Confusion& c) {
    const std::uint64_t denom = c.tp + c.fp + c.fn;
    if (denom == 0) {
        throw Error("empty union: iou undefined when TP+FP+FN = 0");
    }
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

} // namespace seqtran
