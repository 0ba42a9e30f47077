#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aefuse/image.hpp"

namespace aefuse {

// One row of the dataset manifest; relative paths are resolved against the
// manifest's own directory. path_ref may be empty.
struct ManifestEntry {
    std::string pair_id;
    std::filesystem::path path_a;
    std::filesystem::path path_b;
    std::filesystem::path path_ref;
    Task task = Task::Unknown;

    bool has_ref() const { return !path_ref.empty(); }
};

// CSV with header pair_id,path_a,path_b,path_ref,task. Duplicate ids,
// unreadable paths, and unknown tasks are rejected up front.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& file);

ImagePair load_pair(const ManifestEntry& entry);

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::filesystem::path& file);

}  // namespace aefuse
