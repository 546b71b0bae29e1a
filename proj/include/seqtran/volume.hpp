#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace seqtran {

struct Shape {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    std::size_t voxels() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }
    bool valid() const { return nx > 0 && ny > 0 && nz > 0; }
    bool operator==(const Shape& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
    bool operator!=(const Shape& o) const { return !(*this == o); }
};

// Dense 3-D array, C-contiguous with x fastest: index = x + nx*(y + ny*z).
template <typename T>
struct Volume {
    Shape shape;
    std::vector<T> data;

    Volume() = default;
    explicit Volume(Shape s, T fill = T{}) : shape(s), data(s.voxels(), fill) {}

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(shape.nx) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(shape.ny) * static_cast<std::size_t>(z));
    }
    T& at(int x, int y, int z) { return data[index(x, y, z)]; }
    const T& at(int x, int y, int z) const { return data[index(x, y, z)]; }

    bool operator==(const Volume& o) const { return shape == o.shape && data == o.data; }
};

using ImageVolume = Volume<float>;
using LabelVolume = Volume<std::uint8_t>;

} // namespace seqtran
