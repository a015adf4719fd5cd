#pragma once

#include <string>

#include <json.hpp>

namespace breather::cli {

/// Minimal structural JSON-schema check: type, required, properties, items,
/// enum. Enough to pin the shape of the emitted artifacts.
inline bool validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                            std::string* error, const std::string& path = "$") {
    const auto fail = [&](const std::string& msg) {
        if (error) *error = path + ": " + msg;
        return false;
    };

    if (schema.contains("type")) {
        const std::string t = schema["type"].get<std::string>();
        if (t == "object" && !value.is_object()) return fail("expected object");
        if (t == "array" && !value.is_array()) return fail("expected array");
        if (t == "string" && !value.is_string()) return fail("expected string");
        if (t == "boolean" && !value.is_boolean()) return fail("expected boolean");
        if (t == "number" && !value.is_number()) return fail("expected number");
        if (t == "integer" && !value.is_number_integer()) return fail("expected integer");
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& e : schema["enum"])
            if (e == value) ok = true;
        if (!ok) return fail("value not in enum");
    }
    if (schema.contains("required")) {
        for (const auto& req : schema["required"]) {
            const std::string name = req.get<std::string>();
            if (!value.contains(name)) return fail("missing required member '" + name + "'");
        }
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [name, sub] : schema["properties"].items()) {
            if (!value.contains(name)) continue;
            if (!validate_schema(value.at(name), sub, error, path + "." + name)) return false;
        }
    }
    if (schema.contains("items") && value.is_array()) {
        std::size_t i = 0;
        for (const auto& item : value) {
            if (!validate_schema(item, schema["items"], error,
                                 path + "[" + std::to_string(i) + "]"))
                return false;
            ++i;
        }
    }
    return true;
}

} // namespace breather::cli
