#include "aefuse/image.hpp"

#include <algorithm>
#include <cctype>

namespace aefuse {

const char* task_name(Task t) {
    switch (t) {
        case Task::MultiExposure: return "multiexposure";
        case Task::InfraredVisible: return "infraredvisible";
        case Task::MultiFocus: return "multifocus";
        case Task::Medical: return "medical";
        case Task::Cvs: return "cvs";
        case Task::Unknown: return "unknown";
    }
    return "unknown";
}

Task parse_task(const std::string& token) {
    std::string t;
    t.reserve(token.size());
    for (char c : token)
        if (c != '_' && c != '-') t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t.empty() || t == "unknown") return Task::Unknown;
    if (t == "multiexposure") return Task::MultiExposure;
    if (t == "infraredvisible") return Task::InfraredVisible;
    if (t == "multifocus") return Task::MultiFocus;
    if (t == "medical") return Task::Medical;
    if (t == "cvs") return Task::Cvs;
    throw ManifestError("unknown task token '" + token + "'");
}

}  // namespace aefuse
