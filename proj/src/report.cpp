#include "flatcert/report.hpp"

#include <cctype>
#include <sstream>

namespace flatcert {

const char* status_name(CheckBlock::Status s) {
    switch (s) {
        case CheckBlock::Status::Pass: return "pass";
        case CheckBlock::Status::Fail: return "fail";
        case CheckBlock::Status::Excluded: return "excluded";
    }
    return "?";
}

std::string CheckReport::overall() const {
    bool any_excluded = false;
    for (const auto& b : blocks) {
        if (!b.mandatory) continue;
        if (b.status == CheckBlock::Status::Fail) return "CRITERION FAILED";
        if (b.status == CheckBlock::Status::Excluded) any_excluded = true;
    }
    return any_excluded ? "INCONCLUSIVE" : "CRITERION SATISFIED";
}

nlohmann::ordered_json CheckReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["spec_hash"] = spec_hash;
    j["seed"] = seed;
    j["samples"] = samples;
    j["tolerance"] = tolerance;
    j["scale"] = scale;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& b : blocks) {
        nlohmann::ordered_json jb;
        jb["name"] = b.name;
        jb["mandatory"] = b.mandatory;
        jb["status"] = status_name(b.status);
        jb["verdict"] = b.verdict;
        jb["data"] = b.data;
        arr.push_back(std::move(jb));
    }
    j["blocks"] = std::move(arr);
    j["overall"] = overall();
    return j;
}

std::string CheckReport::render_table() const {
    std::ostringstream out;
    out << "flatcert " << kToolVersion << "  (seed " << seed << ", samples " << samples
        << ", tol " << tolerance << ")\n";
    for (const auto& b : blocks) {
        std::string status = status_name(b.status);
        for (auto& c : status) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        out << "  " << b.name;
        for (std::size_t i = b.name.size(); i < 26; ++i) out << ' ';
        out << (b.mandatory ? "          " : "  (info)  ") << status;
        if (!b.verdict.empty()) out << "  " << b.verdict;
        out << "\n";
    }
    out << "overall: " << overall() << "\n";
    return out.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace flatcert
