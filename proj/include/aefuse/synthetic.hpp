#pragma once

#include <cstdint>
#include <string>

#include "aefuse/image.hpp"

namespace aefuse {

// Procedural grayscale scene: smooth ramp, Gaussian blobs, a checkerboard
// patch, and low-pass noise, normalized into [0.05, 0.95].
GrayImage make_scene(int width, int height, uint64_t seed);

// Clean scene for fitting natural-scene statistics.
GrayImage make_pristine(int width, int height, uint64_t seed);

// Two degraded views of one scene; the degradation pattern follows the task
// (exposure split, focus split, modality split, ...).
ImagePair make_task_pair(const std::string& id, Task task, int width, int height, uint64_t seed);

// Replaces a fraction of pixels with 0 or 1.
GrayImage salt_pepper(const GrayImage& img, double density, uint64_t seed);

}  // namespace aefuse
