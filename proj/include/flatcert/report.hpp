#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace flatcert {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct CheckBlock {
    enum class Status { Pass, Fail, Excluded };

    std::string name;
    Status status = Status::Fail;
    bool mandatory = true;
    nlohmann::ordered_json data = nlohmann::ordered_json::object();
    std::string verdict;
};

const char* status_name(CheckBlock::Status s);

struct CheckReport {
    std::string spec_hash;
    std::uint64_t seed = 0;
    int samples = 0;
    double tolerance = 0.0;
    double scale = 1.0;
    std::vector<CheckBlock> blocks;

    // CRITERION SATISFIED | CRITERION FAILED | INCONCLUSIVE, a pure function
    // of the mandatory block outcomes.
    std::string overall() const;

    nlohmann::ordered_json to_json() const;
    std::string render_table() const;
};

// FNV-1a 64-bit over the raw spec text, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace flatcert
