#include "aefuse/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "aefuse/pgm.hpp"

namespace aefuse {
namespace {

constexpr const char* kHeader = "pair_id,path_a,path_b,path_ref,task";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

bool valid_pair_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoFailure("manifest: cannot open '" + file.string() + "'");
    const std::filesystem::path base = file.parent_path();

    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kHeader)
        throw ManifestError("manifest: '" + file.string() + "' must start with header '" +
                            kHeader + "'");

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    std::vector<ManifestEntry> entries;
    std::set<std::string> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto f = split_csv(line);
        const std::string where = file.string() + ":" + std::to_string(lineno);
        if (f.size() != 5)
            throw ManifestError("manifest: " + where + ": expected 5 fields, got " +
                                std::to_string(f.size()));
        if (!valid_pair_id(f[0]))
            throw ManifestError("manifest: " + where + ": bad pair_id '" + f[0] + "'");
        if (!seen.insert(f[0]).second)
            throw ManifestError("manifest: " + where + ": duplicate pair_id '" + f[0] + "'");
        if (f[1].empty() || f[2].empty())
            throw ManifestError("manifest: " + where + ": path_a and path_b are required");

        ManifestEntry e;
        e.pair_id = f[0];
        e.path_a = resolve(f[1]);
        e.path_b = resolve(f[2]);
        if (!f[3].empty()) e.path_ref = resolve(f[3]);
        try {
            e.task = parse_task(f[4]);
        } catch (const ManifestError&) {
            throw ManifestError("manifest: " + where + ": unknown task '" + f[4] + "'");
        }

        for (const std::filesystem::path* p : {&e.path_a, &e.path_b, &e.path_ref}) {
            if (p->empty()) continue;
            if (!std::filesystem::exists(*p))
                throw ManifestError("manifest: " + where + ": missing file '" + p->string() +
                                    "'");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

ImagePair load_pair(const ManifestEntry& entry) {
    return ImagePair(entry.pair_id, load_pgm(entry.path_a), load_pgm(entry.path_b), entry.task);
}

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw IoFailure("manifest: cannot create '" + file.string() + "'");
    const std::filesystem::path base = file.parent_path();
    auto rel = [&](const std::filesystem::path& p) {
        if (p.empty()) return std::string();
        std::error_code ec;
        const std::filesystem::path r = std::filesystem::relative(p, base, ec);
        return ec ? p.string() : r.string();
    };
    out << kHeader << "\n";
    for (const ManifestEntry& e : entries)
        out << e.pair_id << "," << rel(e.path_a) << "," << rel(e.path_b) << ","
            << rel(e.path_ref) << "," << task_name(e.task) << "\n";
    out.flush();
    if (!out) throw IoFailure("manifest: write failure on '" + file.string() + "'");
}

}  // namespace aefuse
