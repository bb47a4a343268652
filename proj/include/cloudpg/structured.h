#pragma once

// Helpers shared by the document loaders. Every input file (ontology,
// mappings, code facts, inventories, workflows, manifests) is YAML; it is
// converted into a JSON value once and validated from there.

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cloudpg {

using json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);

// Plain scalars become bool/integer when they spell one; quoted scalars stay
// strings. Throws Error{Schema} on malformed YAML.
json parse_yaml(std::string_view text, std::string_view context = "document");

std::string emit_yaml(const json& value);

namespace doc {

void require_object(const json& value, std::string_view context);
void require_array(const json& value, std::string_view context);

// Strict mode: any key outside `allowed` is a schema error naming the key.
void only_keys(const json& object, std::initializer_list<std::string_view> allowed,
               std::string_view context);

std::string string_field(const json& object, std::string_view key, std::string_view context);
std::optional<std::string> optional_string(const json& object, std::string_view key,
                                           std::string_view context);
std::optional<bool> optional_bool(const json& object, std::string_view key,
                                  std::string_view context);
std::vector<std::string> string_list(const json& object, std::string_view key,
                                     std::string_view context);
const json& required(const json& object, std::string_view key, std::string_view context);
// Missing key and explicit null both yield an empty array.
const json& array_field(const json& object, std::string_view key, std::string_view context);

}  // namespace doc
}  // namespace cloudpg
