#pragma once
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sbmlp::features {

// Length-m bit vector stored as a sorted set of active indices (0-based).
class BooleanVector {
public:
    BooleanVector() = default;
    explicit BooleanVector(std::size_t length) : length_(length) {}
    BooleanVector(std::size_t length, std::vector<std::uint32_t> active)
        : length_(length), active_(std::move(active)) {
        std::sort(active_.begin(), active_.end());
        active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
        if (!active_.empty() && active_.back() >= length_)
            throw std::invalid_argument("BooleanVector: index out of range");
    }

    std::size_t length() const { return length_; }
    std::size_t sparsity() const { return active_.size(); }
    const std::vector<std::uint32_t>& active() const { return active_; }

    bool get(std::size_t k) const {
        return std::binary_search(active_.begin(), active_.end(), static_cast<std::uint32_t>(k));
    }

    std::vector<double> to_dense() const {
        std::vector<double> v(length_, 0.0);
        for (auto k : active_) v[k] = 1.0;
        return v;
    }

    bool operator==(const BooleanVector&) const = default;

private:
    std::size_t length_ = 0;
    std::vector<std::uint32_t> active_;
};

} // namespace sbmlp::features
