#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "slab/error.hpp"

namespace slab {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle [0, lx] x [0, ly].
struct RoomGeometry {
    double lx = 0.0;
    double ly = 0.0;

    friend bool operator==(const RoomGeometry&, const RoomGeometry&) = default;

    void validate() const {
        if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
            throw Error(ErrorKind::InvalidArgument, "room dimensions must be positive");
    }
    bool contains(Point2 p) const { return p.x >= 0.0 && p.x <= lx && p.y >= 0.0 && p.y <= ly; }
    bool strictly_contains(Point2 p) const { return p.x > 0.0 && p.x < lx && p.y > 0.0 && p.y < ly; }
};

/// Number of unordered sensor pairs, i.e. the codeword length.
constexpr std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

/// Known sensor positions g_1..g_N. Index 0 here is sensor 1 in 1-based pair notation.
class SensorArray {
public:
    SensorArray() = default;
    explicit SensorArray(std::vector<Point2> positions) : positions_(std::move(positions)) {
        if (positions_.size() < 2)
            throw Error(ErrorKind::InvalidArgument, "sensor array needs at least 2 sensors");
        for (std::size_t j = 0; j < positions_.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (positions_[i] == positions_[j])
                    throw Error(ErrorKind::InvalidArgument, "sensor positions must be pairwise distinct");
    }

    std::size_t size() const { return positions_.size(); }
    std::size_t pairs() const { return pair_count(positions_.size()); }
    const Point2& operator[](std::size_t i) const { return positions_[i]; }
    const std::vector<Point2>& positions() const { return positions_; }

    friend bool operator==(const SensorArray&, const SensorArray&) = default;

    void require_inside(const RoomGeometry& room) const {
        for (const auto& p : positions_)
            if (!room.contains(p)) throw Error(ErrorKind::InvalidArgument, "sensor outside room");
    }

private:
    std::vector<Point2> positions_;
};

/// Visits sensor pairs (i, j), i < j, 0-based, in canonical order
/// (0,1), (0,2), (1,2), (0,3), ... so the l-th call is codeword slot l.
template <typename F>
void for_each_pair(std::size_t n, F&& f) {
    std::size_t l = 0;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) f(l++, i, j);
}

/// Cell-centre points of a regular nx x ny grid over the room, row-major from the origin.
inline std::vector<Point2> cell_centers(const RoomGeometry& room, std::size_t nx, std::size_t ny) {
    std::vector<Point2> pts;
    pts.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            pts.push_back({(static_cast<double>(ix) + 0.5) * room.lx / static_cast<double>(nx),
                           (static_cast<double>(iy) + 0.5) * room.ly / static_cast<double>(ny)});
    return pts;
}

}  // namespace slab
