#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aefuse/errors.hpp"

namespace aefuse {

// Single-channel image, row-major doubles. Intensities are nominally in
// [0,1]; filtering intermediates (band-pass levels, detail layers) may leave
// that range, so the range is enforced at I/O and fusion boundaries, not here.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0)
        : width_(width), height_(height) {
        if (width <= 0 || height <= 0)
            throw DimensionMismatch("image dimensions must be positive");
        data_.assign(static_cast<size_t>(width) * height, fill);
    }
    GrayImage(int width, int height, std::vector<double> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width <= 0 || height <= 0 ||
            data_.size() != static_cast<size_t>(width) * height)
            throw DimensionMismatch("pixel buffer does not match dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& at(int y, int x) { return data_[static_cast<size_t>(y) * width_ + x]; }
    double at(int y, int x) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double* row(int y) { return data_.data() + static_cast<size_t>(y) * width_; }
    const double* row(int y) const { return data_.data() + static_cast<size_t>(y) * width_; }

    std::vector<double>& pixels() { return data_; }
    const std::vector<double>& pixels() const { return data_; }

    bool same_shape(const GrayImage& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

enum class Task { MultiExposure, InfraredVisible, MultiFocus, Medical, Cvs, Unknown };

const char* task_name(Task t);
Task parse_task(const std::string& token);  // case-insensitive; "" -> Unknown

// Two registered source images plus the task they came from.
struct ImagePair {
    std::string id;
    GrayImage a;
    GrayImage b;
    Task task = Task::Unknown;

    ImagePair() = default;
    ImagePair(std::string id_, GrayImage a_, GrayImage b_, Task task_)
        : id(std::move(id_)), a(std::move(a_)), b(std::move(b_)), task(task_) {
        if (!a.same_shape(b))
            throw DimensionMismatch("pair '" + id + "': source dimensions differ");
    }
};

// Coarse-to-fine chain; level k+1 has ceil(dim/2) of level k.
using Pyramid = std::vector<GrayImage>;

}  // namespace aefuse
