#include "cloudpg/structured.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cloudpg/error.h"

namespace cloudpg {

namespace {

json scalar_to_json(const YAML::Node& node) {
    const std::string& text = node.Scalar();
    // "!" marks a quoted (non-plain) scalar.
    if (node.Tag() == "!") return text;
    if (text == "true" || text == "True" || text == "TRUE") return true;
    if (text == "false" || text == "False" || text == "FALSE") return false;
    if (text == "null" || text == "~" || text.empty()) return nullptr;
    std::int64_t number = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, number);
    if (ec == std::errc() && ptr == last && first != last) return number;
    return text;
}

json to_json(const YAML::Node& node) {
    switch (node.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined:
            return nullptr;
        case YAML::NodeType::Scalar:
            return scalar_to_json(node);
        case YAML::NodeType::Sequence: {
            json out = json::array();
            for (const auto& item : node) out.push_back(to_json(item));
            return out;
        }
        case YAML::NodeType::Map: {
            json out = json::object();
            for (const auto& entry : node) {
                out[entry.first.as<std::string>()] = to_json(entry.second);
            }
            return out;
        }
    }
    return nullptr;
}

void emit(YAML::Emitter& out, const json& value) {
    if (value.is_object()) {
        out << YAML::BeginMap;
        for (const auto& [key, item] : value.items()) {
            out << YAML::Key << key << YAML::Value;
            emit(out, item);
        }
        out << YAML::EndMap;
    } else if (value.is_array()) {
        out << YAML::BeginSeq;
        for (const auto& item : value) emit(out, item);
        out << YAML::EndSeq;
    } else if (value.is_boolean()) {
        out << (value.get<bool>() ? "true" : "false");
    } else if (value.is_number_integer()) {
        out << value.get<std::int64_t>();
    } else if (value.is_string()) {
        out << YAML::DoubleQuoted << value.get<std::string>();
    } else {
        out << YAML::Null;
    }
}

std::string describe(std::string_view context, std::string_view key) {
    std::string out(context);
    out += ".";
    out += key;
    return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, path.string(), "cannot open file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json parse_yaml(std::string_view text, std::string_view context) {
    try {
        return to_json(YAML::Load(std::string(text)));
    } catch (const YAML::Exception& ex) {
        throw Error(ErrorCode::Schema, std::string(context),
                    std::string(context) + ": malformed YAML: " + ex.what());
    }
}

std::string emit_yaml(const json& value) {
    YAML::Emitter out;
    emit(out, value);
    std::string text = out.c_str();
    text += "\n";
    return text;
}

namespace doc {

void require_object(const json& value, std::string_view context) {
    if (!value.is_object()) {
        throw Error(ErrorCode::Schema, std::string(context),
                    std::string(context) + ": expected a mapping");
    }
}

void require_array(const json& value, std::string_view context) {
    if (!value.is_array()) {
        throw Error(ErrorCode::Schema, std::string(context),
                    std::string(context) + ": expected a list");
    }
}

void only_keys(const json& object, std::initializer_list<std::string_view> allowed,
               std::string_view context) {
    require_object(object, context);
    for (const auto& [key, item] : object.items()) {
        bool known = false;
        for (auto name : allowed) known = known || name == key;
        if (!known) {
            throw Error(ErrorCode::Schema, key,
                        std::string(context) + ": unknown key '" + key + "'");
        }
    }
}

std::string string_field(const json& object, std::string_view key, std::string_view context) {
    auto value = optional_string(object, key, context);
    if (!value) {
        throw Error(ErrorCode::Schema, std::string(key),
                    describe(context, key) + ": required string missing");
    }
    return *value;
}

std::optional<std::string> optional_string(const json& object, std::string_view key,
                                           std::string_view context) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    // Plain YAML scalars such as `9080` or `true` may be meant as strings.
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    if (it->is_boolean()) return std::string(it->get<bool>() ? "true" : "false");
    throw Error(ErrorCode::Schema, std::string(key),
                describe(context, key) + ": expected a string");
}

std::optional<bool> optional_bool(const json& object, std::string_view key,
                                  std::string_view context) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) {
        throw Error(ErrorCode::Schema, std::string(key),
                    describe(context, key) + ": expected a boolean");
    }
    return it->get<bool>();
}

std::vector<std::string> string_list(const json& object, std::string_view key,
                                     std::string_view context) {
    std::vector<std::string> out;
    const json& items = array_field(object, key, context);
    for (const auto& item : items) {
        if (!item.is_string()) {
            throw Error(ErrorCode::Schema, std::string(key),
                        describe(context, key) + ": expected a list of strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

const json& required(const json& object, std::string_view key, std::string_view context) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        throw Error(ErrorCode::Schema, std::string(key), describe(context, key) + ": required");
    }
    return *it;
}

const json& array_field(const json& object, std::string_view key, std::string_view context) {
    static const json empty = json::array();
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) return empty;
    require_array(*it, describe(context, key));
    return *it;
}

}  // namespace doc
}  // namespace cloudpg
