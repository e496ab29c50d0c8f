#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hybrid {

using DocId = std::uint64_t;

/// Score-descending list of (doc, score); ties broken by ascending doc id.
struct RankedList {
    std::vector<std::pair<DocId, double>> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    /// Canonical ordering used everywhere: higher score first, lower id on ties.
    static bool better(const std::pair<DocId, double>& a,
                       const std::pair<DocId, double>& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    }

    void sort_and_truncate(std::size_t k) {
        std::sort(entries.begin(), entries.end(), better);
        if (entries.size() > k) entries.resize(k);
    }
};

enum class Role { User, Assistant, ToolCall, ToolOutput, System, Planning };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::ToolCall: return "tool_call";
        case Role::ToolOutput: return "tool_output";
        case Role::System: return "system";
        case Role::Planning: return "planning";
    }
    return "user";
}

inline Role role_from_name(const std::string& s) {
    if (s == "assistant") return Role::Assistant;
    if (s == "tool_call") return Role::ToolCall;
    if (s == "tool_output") return Role::ToolOutput;
    if (s == "system") return Role::System;
    if (s == "planning") return Role::Planning;
    return Role::User;
}

struct MemoryRecord {
    DocId id = 0;
    std::string text;
    std::vector<float> embedding;  // empty when absent
    Role role = Role::User;
    std::string session;
    std::string agent;
    std::string tool_type;  // empty when absent
    std::int64_t ts_ms = 0;
    double weight = 0.0;  // importance, in [0,1]
};

}  // namespace hybrid
