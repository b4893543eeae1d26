#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "swmc/geometry.hpp"

namespace swmc {

/// Ordered grid cells covering a support. Two layouts are supported: a 1-D
/// list of uniform runs (possibly non-contiguous, possibly on a circle) and
/// a 2-D tensor grid over a box. Cells are disjoint with positive widths.
class GridSpec {
public:
    struct Segment {
        double lo = 0.0;
        double width = 0.0;
        std::size_t count = 0;
        std::size_t offset = 0;  // index of first cell
    };

    static GridSpec uniform_1d(double lo, double hi, std::size_t n,
                               Topology topo = Topology::flat()) {
        if (!(hi > lo) || n == 0)
            throw std::invalid_argument("GridSpec::uniform_1d: bad interval or cell count");
        GridSpec g;
        g.dim_ = 1;
        g.topo_ = topo;
        g.append_segment(lo, hi, n);
        return g;
    }

    static GridSpec circle_1d(double perimeter, std::size_t n) {
        GridSpec g = uniform_1d(-0.5 * perimeter, 0.5 * perimeter, n,
                                Topology::circle(perimeter));
        return g;
    }

    static GridSpec from_segments_1d(const std::vector<std::pair<double, double>>& intervals,
                                     const std::vector<std::size_t>& counts,
                                     Topology topo = Topology::flat()) {
        if (intervals.empty() || intervals.size() != counts.size())
            throw std::invalid_argument("GridSpec::from_segments_1d: bad segment lists");
        GridSpec g;
        g.dim_ = 1;
        g.topo_ = topo;
        for (std::size_t s = 0; s < intervals.size(); ++s) {
            if (s > 0 && intervals[s].first < intervals[s - 1].second - 1e-12)
                throw std::invalid_argument("GridSpec::from_segments_1d: segments overlap");
            g.append_segment(intervals[s].first, intervals[s].second, counts[s]);
        }
        return g;
    }

    static GridSpec tensor_2d(double xlo, double xhi, std::size_t nx,
                              double ylo, double yhi, std::size_t ny) {
        if (!(xhi > xlo) || !(yhi > ylo) || nx == 0 || ny == 0)
            throw std::invalid_argument("GridSpec::tensor_2d: bad box or cell counts");
        GridSpec g;
        g.dim_ = 2;
        const double wx = (xhi - xlo) / static_cast<double>(nx);
        const double wy = (yhi - ylo) / static_cast<double>(ny);
        g.xedges_.resize(nx + 1);
        g.yedges_.resize(ny + 1);
        for (std::size_t i = 0; i <= nx; ++i) g.xedges_[i] = xlo + wx * static_cast<double>(i);
        for (std::size_t j = 0; j <= ny; ++j) g.yedges_[j] = ylo + wy * static_cast<double>(j);
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                g.centers_.push_back(point2(xlo + wx * (i + 0.5), ylo + wy * (j + 0.5)));
                g.widths_.push_back(point2(wx, wy));
                g.measures_.push_back(wx * wy);
            }
        return g;
    }

    /// m unit-width placeholder cells; used for component chains and for
    /// matrices supplied directly rather than built from a target.
    static GridSpec synthetic(std::size_t m) {
        return uniform_1d(0.0, static_cast<double>(m), m);
    }

    GridSpec subset(const std::vector<std::size_t>& cells) const {
        GridSpec g;
        g.dim_ = dim_;
        g.topo_ = topo_;
        g.is_subset_ = true;
        for (std::size_t c : cells) {
            if (c >= size()) throw std::out_of_range("GridSpec::subset: cell index");
            g.centers_.push_back(centers_[c]);
            g.widths_.push_back(widths_[c]);
            g.measures_.push_back(measures_[c]);
        }
        return g;
    }

    std::size_t size() const { return centers_.size(); }
    int dimension() const { return dim_; }
    const Topology& topology() const { return topo_; }
    const Point& center(std::size_t i) const { return centers_[i]; }
    double width(std::size_t i, int axis = 0) const { return widths_[i][axis]; }
    double measure(std::size_t i) const { return measures_[i]; }

    std::pair<double, double> cell_interval(std::size_t i) const {
        if (dim_ != 1) throw std::logic_error("GridSpec::cell_interval: grid is not 1-D");
        const double c = centers_[i][0], w = widths_[i][0];
        return {c - 0.5 * w, c + 0.5 * w};
    }

    std::pair<Point, Point> cell_box(std::size_t i) const {
        Point lo = centers_[i], hi = centers_[i];
        for (std::size_t k = 0; k < lo.size(); ++k) {
            lo[k] -= 0.5 * widths_[i][k];
            hi[k] += 0.5 * widths_[i][k];
        }
        return {lo, hi};
    }

    /// Index of the cell containing p, or -1. The upper boundary of each
    /// segment belongs to its last cell.
    std::ptrdiff_t locate(const Point& p) const {
        if (static_cast<int>(p.size()) != dim_) return -1;
        if (is_subset_) {
            for (std::size_t i = 0; i < size(); ++i) {
                bool in = true;
                for (std::size_t k = 0; k < p.size(); ++k) {
                    const double d = dim_ == 1 && k == 0
                                         ? topo_.dist1(p[k], centers_[i][k])
                                         : std::abs(p[k] - centers_[i][k]);
                    if (d > 0.5 * widths_[i][k] + 1e-12) in = false;
                }
                if (in) return static_cast<std::ptrdiff_t>(i);
            }
            return -1;
        }
        if (dim_ == 1) {
            const double x = topo_.is_circle() ? topo_.wrap(p[0]) : p[0];
            for (const Segment& s : segments_) {
                const double hi = s.lo + s.width * static_cast<double>(s.count);
                if (x < s.lo || x > hi) continue;
                auto i = static_cast<std::ptrdiff_t>((x - s.lo) / s.width);
                i = std::min<std::ptrdiff_t>(i, static_cast<std::ptrdiff_t>(s.count) - 1);
                return static_cast<std::ptrdiff_t>(s.offset) + i;
            }
            return -1;
        }
        const auto axis_index = [](const std::vector<double>& edges, double v) -> std::ptrdiff_t {
            if (v < edges.front() || v > edges.back()) return -1;
            auto it = std::upper_bound(edges.begin(), edges.end(), v);
            std::ptrdiff_t i = std::distance(edges.begin(), it) - 1;
            return std::min<std::ptrdiff_t>(i, static_cast<std::ptrdiff_t>(edges.size()) - 2);
        };
        const std::ptrdiff_t ix = axis_index(xedges_, p[0]);
        const std::ptrdiff_t iy = axis_index(yedges_, p[1]);
        if (ix < 0 || iy < 0) return -1;
        return iy * static_cast<std::ptrdiff_t>(xedges_.size() - 1) + ix;
    }

    double max_width() const {
        double w = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            for (double v : widths_[i]) w = std::max(w, v);
        return w;
    }

private:
    void append_segment(double lo, double hi, std::size_t n) {
        Segment s;
        s.lo = lo;
        s.width = (hi - lo) / static_cast<double>(n);
        s.count = n;
        s.offset = centers_.size();
        segments_.push_back(s);
        for (std::size_t i = 0; i < n; ++i) {
            centers_.push_back(point1(lo + s.width * (static_cast<double>(i) + 0.5)));
            widths_.push_back(point1(s.width));
            measures_.push_back(s.width);
        }
    }

    int dim_ = 1;
    Topology topo_ = Topology::flat();
    std::vector<Point> centers_;
    std::vector<Point> widths_;
    std::vector<double> measures_;
    std::vector<Segment> segments_;        // 1-D locate
    std::vector<double> xedges_, yedges_;  // 2-D locate
    bool is_subset_ = false;
};

}  // namespace swmc
