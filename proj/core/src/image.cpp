#include "sphsp/image.hpp"

#include <algorithm>
#include <unordered_set>

namespace sphsp {

int Segmentation::label_bound() const {
    if (labels_.empty()) {
        return 0;
    }
    return *std::max_element(labels_.begin(), labels_.end()) + 1;
}

int Segmentation::distinct_count() const {
    std::unordered_set<Label> seen(labels_.begin(), labels_.end());
    return static_cast<int>(seen.size());
}

}  // namespace sphsp
