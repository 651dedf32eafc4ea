#include "hdes/multi_index.hpp"

#include <numeric>
#include <sstream>

#include "hdes/error.hpp"

namespace hdes {

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts)) {
    for (int c : counts_) {
        if (c < 0) throw ContractError("MultiIndex: derivative counts must be non-negative");
    }
}

MultiIndex MultiIndex::zero(std::size_t variables) { return MultiIndex(std::vector<int>(variables, 0)); }

MultiIndex MultiIndex::along(std::size_t variables, std::size_t axis, int order) {
    if (axis >= variables) throw ContractError("MultiIndex::along: axis out of range");
    std::vector<int> counts(variables, 0);
    counts[axis] = order;
    return MultiIndex(std::move(counts));
}

int MultiIndex::total() const noexcept { return std::accumulate(counts_.begin(), counts_.end(), 0); }

int MultiIndex::distinct() const noexcept {
    int h = 0;
    for (int c : counts_) h += c > 0 ? 1 : 0;
    return h;
}

std::string MultiIndex::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(counts_[i]);
    }
    return out;
}

MultiIndex MultiIndex::from_string(const std::string& text) {
    std::vector<int> counts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            counts.push_back(std::stoi(item, &used));
            if (used != item.size()) throw ContractError("");
        } catch (const std::exception&) {
            throw ContractError("MultiIndex: malformed key '" + text + "'");
        }
    }
    if (counts.empty()) throw ContractError("MultiIndex: empty key");
    return MultiIndex(std::move(counts));
}

}  // namespace hdes
