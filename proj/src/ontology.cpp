#include "cloudpg/ontology.h"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "cloudpg/error.h"

namespace cloudpg {

namespace {

std::string mapping_key(std::string_view provider, std::string_view type) {
    std::string key(provider);
    key += '\n';
    key += type;
    return key;
}

ClassKind parse_kind(const std::string& text, const std::string& owner) {
    if (text == "resource") return ClassKind::Resource;
    if (text == "framework") return ClassKind::Framework;
    if (text == "functionality") return ClassKind::Functionality;
    if (text == "security-feature") return ClassKind::SecurityFeature;
    throw Error(ErrorCode::Schema, owner, "class " + owner + ": unknown kind '" + text + "'");
}

ScalarKind parse_scalar_kind(const std::string& text, const std::string& owner) {
    if (text == "string") return ScalarKind::String;
    if (text == "boolean") return ScalarKind::Boolean;
    if (text == "integer") return ScalarKind::Integer;
    throw Error(ErrorCode::Schema, owner,
                "data property of " + owner + ": unknown type '" + text + "'");
}

void read_mapping_block(const json& block, std::vector<InstanceMapping>& out) {
    doc::only_keys(block, {"provider", "types"}, "mapping");
    const std::string provider = doc::string_field(block, "provider", "mapping");
    const std::string context = "mapping[" + provider + "]";
    for (const auto& type : doc::array_field(block, "types", context)) {
        doc::only_keys(type, {"provider_type", "ontology_class"}, context + ".types");
        out.push_back({provider, doc::string_field(type, "provider_type", context),
                       doc::string_field(type, "ontology_class", context)});
    }
}

}  // namespace

const char* to_string(ClassKind kind) {
    switch (kind) {
        case ClassKind::Resource: return "resource";
        case ClassKind::Framework: return "framework";
        case ClassKind::Functionality: return "functionality";
        case ClassKind::SecurityFeature: return "security-feature";
    }
    return "resource";
}

const char* to_string(ScalarKind kind) {
    switch (kind) {
        case ScalarKind::String: return "string";
        case ScalarKind::Boolean: return "boolean";
        case ScalarKind::Integer: return "integer";
    }
    return "string";
}

Ontology Ontology::build(std::vector<OntologyClass> classes, std::vector<InstanceMapping> mappings) {
    Ontology out;
    out.classes_ = std::move(classes);
    out.mappings_ = std::move(mappings);

    for (std::size_t i = 0; i < out.classes_.size(); ++i) {
        const auto& name = out.classes_[i].name;
        if (!out.index_.emplace(name, i).second) {
            throw Error(ErrorCode::DuplicateClass, name, "duplicate class name: " + name);
        }
    }

    for (const auto& cls : out.classes_) {
        if (cls.parent) {
            auto it = out.index_.find(*cls.parent);
            if (it == out.index_.end()) {
                throw Error(ErrorCode::UnresolvedReference, *cls.parent,
                            "class " + cls.name + ": unknown parent " + *cls.parent);
            }
            const auto& parent = out.classes_[it->second];
            if (parent.kind != cls.kind) {
                throw Error(ErrorCode::Schema, cls.name,
                            "class " + cls.name + " (" + to_string(cls.kind) +
                                ") has parent of a different kind: " + parent.name);
            }
        }
        for (const auto& offered : cls.offers) {
            auto it = out.index_.find(offered);
            if (it == out.index_.end()) {
                throw Error(ErrorCode::UnresolvedReference, offered,
                            "class " + cls.name + ": offers unknown class " + offered);
            }
            const auto kind = out.classes_[it->second].kind;
            if (kind != ClassKind::Functionality && kind != ClassKind::SecurityFeature) {
                throw Error(ErrorCode::Schema, offered,
                            "class " + cls.name + ": offers " + offered +
                                ", which is neither a functionality nor a security feature");
            }
        }
    }

    out.chains_.resize(out.classes_.size());
    for (std::size_t i = 0; i < out.classes_.size(); ++i) {
        auto& chain = out.chains_[i];
        std::size_t current = i;
        while (true) {
            if (std::find(chain.begin(), chain.end(), current) != chain.end()) {
                throw Error(ErrorCode::InheritanceCycle, out.classes_[current].name,
                            "inheritance cycle through class " + out.classes_[current].name);
            }
            chain.push_back(current);
            const auto& parent = out.classes_[current].parent;
            if (!parent) break;
            current = out.index_.at(*parent);
        }
    }

    for (std::size_t i = 0; i < out.mappings_.size(); ++i) {
        const auto& mapping = out.mappings_[i];
        auto it = out.index_.find(mapping.ontology_class);
        if (it == out.index_.end()) {
            throw Error(ErrorCode::UnresolvedReference, mapping.ontology_class,
                        "mapping " + mapping.provider + "/" + mapping.provider_type +
                            ": unknown class " + mapping.ontology_class);
        }
        if (out.classes_[it->second].kind != ClassKind::Resource) {
            throw Error(ErrorCode::Schema, mapping.ontology_class,
                        "mapping " + mapping.provider + "/" + mapping.provider_type +
                            ": " + mapping.ontology_class + " is not a resource class");
        }
        if (!out.mapping_index_.emplace(mapping_key(mapping.provider, mapping.provider_type), i)
                 .second) {
            throw Error(ErrorCode::DuplicateMapping, mapping.provider_type,
                        "duplicate mapping for " + mapping.provider + "/" +
                            mapping.provider_type);
        }
    }
    return out;
}

std::size_t Ontology::index_of(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) {
        throw Error(ErrorCode::UnknownClass, std::string(name),
                    "unknown ontology class: " + std::string(name));
    }
    return it->second;
}

bool Ontology::has_class(std::string_view name) const {
    return index_.find(std::string(name)) != index_.end();
}

const OntologyClass& Ontology::get(std::string_view name) const {
    return classes_[index_of(name)];
}

bool Ontology::is_subclass(std::string_view child, std::string_view ancestor) const {
    const auto target = index_of(ancestor);
    const auto& chain = chains_[index_of(child)];
    return std::find(chain.begin(), chain.end(), target) != chain.end();
}

std::string Ontology::resolve_instance_class(std::string_view provider,
                                             std::string_view provider_type) const {
    auto it = mapping_index_.find(mapping_key(provider, provider_type));
    if (it == mapping_index_.end()) {
        throw Error(ErrorCode::UnknownMapping, std::string(provider_type),
                    "no ontology mapping for provider '" + std::string(provider) +
                        "' type '" + std::string(provider_type) + "'");
    }
    return mappings_[it->second].ontology_class;
}

std::vector<std::string> Ontology::offered_features(std::string_view name) const {
    const auto& chain = chains_[index_of(name)];
    std::vector<std::string> out;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        for (const auto& offered : classes_[*it].offers) {
            if (std::find(out.begin(), out.end(), offered) == out.end()) out.push_back(offered);
        }
    }
    return out;
}

std::vector<std::string> Ontology::lineage(std::string_view name) const {
    std::vector<std::string> out;
    for (auto idx : chains_[index_of(name)]) out.push_back(classes_[idx].name);
    return out;
}

const DataProperty* Ontology::find_data_property(std::string_view class_name,
                                                 std::string_view property) const {
    for (auto idx : chains_[index_of(class_name)]) {
        for (const auto& prop : classes_[idx].data_properties) {
            if (prop.name == property) return &prop;
        }
    }
    return nullptr;
}

Ontology ontology_from_json(const json& document, std::span<const json> mapping_documents) {
    doc::only_keys(document, {"classes", "mappings"}, "ontology");
    std::vector<OntologyClass> classes;
    for (const auto& entry : doc::array_field(document, "classes", "ontology")) {
        doc::only_keys(entry, {"name", "parent", "kind", "data_properties", "offers"}, "class");
        OntologyClass cls;
        cls.name = doc::string_field(entry, "name", "class");
        const std::string context = "class " + cls.name;
        cls.parent = doc::optional_string(entry, "parent", context);
        cls.kind = parse_kind(doc::string_field(entry, "kind", context), cls.name);
        for (const auto& prop : doc::array_field(entry, "data_properties", context)) {
            doc::only_keys(prop, {"name", "type"}, context + ".data_properties");
            cls.data_properties.push_back(
                {doc::string_field(prop, "name", context),
                 parse_scalar_kind(doc::string_field(prop, "type", context), cls.name)});
        }
        cls.offers = doc::string_list(entry, "offers", context);
        classes.push_back(std::move(cls));
    }

    std::vector<InstanceMapping> mappings;
    for (const auto& block : doc::array_field(document, "mappings", "ontology")) {
        read_mapping_block(block, mappings);
    }
    for (const auto& block : mapping_documents) read_mapping_block(block, mappings);
    return Ontology::build(std::move(classes), std::move(mappings));
}

Ontology load_ontology(std::string_view ontology_doc, std::span<const std::string> mapping_docs) {
    std::vector<json> parsed;
    parsed.reserve(mapping_docs.size());
    for (const auto& text : mapping_docs) parsed.push_back(parse_yaml(text, "mapping document"));
    return ontology_from_json(parse_yaml(ontology_doc, "ontology document"), parsed);
}

json ontology_to_json(const Ontology& ontology) {
    json classes = json::array();
    for (const auto& cls : ontology.classes()) {
        json entry = {{"name", cls.name}, {"kind", to_string(cls.kind)}};
        if (cls.parent) entry["parent"] = *cls.parent;
        if (!cls.data_properties.empty()) {
            json props = json::array();
            for (const auto& prop : cls.data_properties) {
                props.push_back({{"name", prop.name}, {"type", to_string(prop.kind)}});
            }
            entry["data_properties"] = std::move(props);
        }
        if (!cls.offers.empty()) entry["offers"] = cls.offers;
        classes.push_back(std::move(entry));
    }

    // Group per provider, keeping first-seen provider order.
    std::vector<std::string> providers;
    std::map<std::string, json> types;
    for (const auto& mapping : ontology.mappings()) {
        if (!types.count(mapping.provider)) {
            providers.push_back(mapping.provider);
            types[mapping.provider] = json::array();
        }
        types[mapping.provider].push_back(
            {{"provider_type", mapping.provider_type}, {"ontology_class", mapping.ontology_class}});
    }
    json mappings = json::array();
    for (const auto& provider : providers) {
        mappings.push_back({{"provider", provider}, {"types", types[provider]}});
    }

    json out = {{"classes", std::move(classes)}};
    if (!mappings.empty()) out["mappings"] = std::move(mappings);
    return out;
}

std::string serialize_ontology(const Ontology& ontology) {
    return emit_yaml(ontology_to_json(ontology));
}

}  // namespace cloudpg
