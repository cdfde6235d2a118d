#include "sphsp/clustering.hpp"

#include <algorithm>
#include <numeric>

namespace sphsp {

Components connected_components(const Segmentation& labels) {
    const GridShape& shape = labels.shape();
    const int h = shape.height();
    const int w = shape.width();
    Components comps;
    comps.ids.assign(labels.size(), -1);
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < labels.size(); ++start) {
        if (comps.ids[start] >= 0) {
            continue;
        }
        const int id = comps.count++;
        const auto label = labels[start];
        comps.ids[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const int row = static_cast<int>(p / static_cast<std::size_t>(w));
            const int col = static_cast<int>(p % static_cast<std::size_t>(w));
            const std::size_t nbrs[4] = {
                shape.index(shape.wrap_col(col - 1), row),
                shape.index(shape.wrap_col(col + 1), row),
                row > 0 ? shape.index(col, row - 1) : p,
                row + 1 < h ? shape.index(col, row + 1) : p,
            };
            for (std::size_t q : nbrs) {
                if (comps.ids[q] < 0 && labels[q] == label) {
                    comps.ids[q] = id;
                    stack.push_back(q);
                }
            }
        }
    }
    return comps;
}

namespace {

struct Region {
    Segmentation::Label label = 0;
    std::size_t size = 0;
    SpherePoint sum{0.0, 0.0, 0.0};
    std::vector<int> adjacent;
};

int find_root(std::vector<int>& parent, int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
    }
    return x;
}

SpherePoint direction(const SpherePoint& sum) {
    return sum.norm() > 0.0 ? sum.normalized() : sum;
}

}  // namespace

Segmentation enforce_connectivity(const Segmentation& labels, int min_size) {
    const GridShape& shape = labels.shape();
    const int w = shape.width();
    const int h = shape.height();
    const Components comps = connected_components(labels);
    const SphereGrid grid(shape);

    std::vector<Region> regions(static_cast<std::size_t>(comps.count));
    for (std::size_t p = 0; p < labels.size(); ++p) {
        Region& r = regions[static_cast<std::size_t>(comps.ids[p])];
        r.label = labels[p];
        ++r.size;
        r.sum.x += grid[p].x;
        r.sum.y += grid[p].y;
        r.sum.z += grid[p].z;
    }
    // Adjacency from right and down neighbours (plus the seam through wrap_col).
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const int a = comps.ids[shape.index(col, row)];
            const int right = comps.ids[shape.index(shape.wrap_col(col + 1), row)];
            if (right != a) {
                regions[static_cast<std::size_t>(a)].adjacent.push_back(right);
                regions[static_cast<std::size_t>(right)].adjacent.push_back(a);
            }
            if (row + 1 < h) {
                const int down = comps.ids[shape.index(col, row + 1)];
                if (down != a) {
                    regions[static_cast<std::size_t>(a)].adjacent.push_back(down);
                    regions[static_cast<std::size_t>(down)].adjacent.push_back(a);
                }
            }
        }
    }

    for (auto& r : regions) {
        std::sort(r.adjacent.begin(), r.adjacent.end());
        r.adjacent.erase(std::unique(r.adjacent.begin(), r.adjacent.end()), r.adjacent.end());
    }

    // The largest fragment of each label survives if it is big enough.
    const int label_bound = labels.label_bound();
    std::vector<int> largest(static_cast<std::size_t>(std::max(0, label_bound)), -1);
    for (int id = 0; id < comps.count; ++id) {
        const auto& r = regions[static_cast<std::size_t>(id)];
        if (r.label < 0) {
            continue;
        }
        int& best = largest[static_cast<std::size_t>(r.label)];
        if (best < 0 || r.size > regions[static_cast<std::size_t>(best)].size) {
            best = id;
        }
    }
    std::vector<int> doomed;
    for (int id = 0; id < comps.count; ++id) {
        const auto& r = regions[static_cast<std::size_t>(id)];
        const bool keep = r.label >= 0 && largest[static_cast<std::size_t>(r.label)] == id &&
                          r.size >= static_cast<std::size_t>(std::max(min_size, 0));
        if (!keep) {
            doomed.push_back(id);
        }
    }
    std::stable_sort(doomed.begin(), doomed.end(), [&](int a, int b) {
        return regions[static_cast<std::size_t>(a)].size < regions[static_cast<std::size_t>(b)].size;
    });

    std::vector<int> parent(static_cast<std::size_t>(comps.count));
    std::iota(parent.begin(), parent.end(), 0);
    for (int id : doomed) {
        Region& r = regions[static_cast<std::size_t>(id)];
        const SpherePoint here = direction(r.sum);
        int target = -1;
        double best = 0.0;
        for (int n : r.adjacent) {
            const int root = find_root(parent, n);
            if (root == id) {
                continue;
            }
            const double d = squared_chord_distance(here, direction(regions[static_cast<std::size_t>(root)].sum));
            if (target < 0 || d < best || (d == best && root < target)) {
                target = root;
                best = d;
            }
        }
        if (target < 0) {
            continue;  // covers the whole grid
        }
        parent[static_cast<std::size_t>(id)] = target;
        Region& t = regions[static_cast<std::size_t>(target)];
        t.size += r.size;
        t.sum.x += r.sum.x;
        t.sum.y += r.sum.y;
        t.sum.z += r.sum.z;
        t.adjacent.insert(t.adjacent.end(), r.adjacent.begin(), r.adjacent.end());
        r.adjacent.clear();
        r.adjacent.shrink_to_fit();
    }

    Segmentation out(shape);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const int root = find_root(parent, comps.ids[p]);
        out[p] = regions[static_cast<std::size_t>(root)].label;
    }
    return out;
}

}  // namespace sphsp
