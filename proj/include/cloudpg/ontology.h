#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cloudpg/structured.h"

namespace cloudpg {

enum class ClassKind { Resource, Framework, Functionality, SecurityFeature };
enum class ScalarKind { String, Boolean, Integer };

const char* to_string(ClassKind kind);
const char* to_string(ScalarKind kind);

struct DataProperty {
    std::string name;
    ScalarKind kind = ScalarKind::String;
};

struct OntologyClass {
    std::string name;
    std::optional<std::string> parent;
    ClassKind kind = ClassKind::Resource;
    std::vector<DataProperty> data_properties;
    std::vector<std::string> offers;
};

// Binds a provider-specific resource type (e.g. "AWS::EC2::Volume") to an
// abstract resource class.
struct InstanceMapping {
    std::string provider;
    std::string provider_type;
    std::string ontology_class;
};

// Immutable after construction; every query method is const and safe to call
// from several threads.
class Ontology {
public:
    Ontology() = default;

    // Validates closure, single-parent acyclicity, kind rules and mapping
    // uniqueness; throws Error naming the offending identifier.
    static Ontology build(std::vector<OntologyClass> classes, std::vector<InstanceMapping> mappings);

    bool has_class(std::string_view name) const;
    const OntologyClass& get(std::string_view name) const;

    // Reflexive: is_subclass(X, X) holds.
    bool is_subclass(std::string_view child, std::string_view ancestor) const;

    std::string resolve_instance_class(std::string_view provider,
                                       std::string_view provider_type) const;

    // Union of `offers` over the class and its ancestors, root first.
    std::vector<std::string> offered_features(std::string_view name) const;

    // Self first, root last.
    std::vector<std::string> lineage(std::string_view name) const;

    // Declared on the class or inherited.
    const DataProperty* find_data_property(std::string_view class_name,
                                           std::string_view property) const;

    const std::vector<OntologyClass>& classes() const { return classes_; }
    const std::vector<InstanceMapping>& mappings() const { return mappings_; }

private:
    std::size_t index_of(std::string_view name) const;

    std::vector<OntologyClass> classes_;
    std::vector<InstanceMapping> mappings_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> chains_;  // self .. root
    std::unordered_map<std::string, std::size_t> mapping_index_;  // provider + '\n' + type
};

Ontology load_ontology(std::string_view ontology_doc, std::span<const std::string> mapping_docs);

// Same shape as the ontology document: `classes` plus `mappings` grouped per
// provider. Feeding the result back into load_ontology reproduces the value.
json ontology_to_json(const Ontology& ontology);
Ontology ontology_from_json(const json& document, std::span<const json> mapping_documents = {});
std::string serialize_ontology(const Ontology& ontology);

}  // namespace cloudpg
