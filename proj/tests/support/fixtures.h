#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "cloudpg/ontology.h"
#include "cloudpg/pipeline.h"
#include "cloudpg/structured.h"

namespace cloudpg::testing {

inline std::filesystem::path data_dir() { return CLOUDPG_DATA_DIR; }

inline std::filesystem::path bookinfo_manifest() { return data_dir() / "testbeds/bookinfo/manifest.yaml"; }
inline std::filesystem::path clean_manifest() { return data_dir() / "testbeds/bookinfo-clean/manifest.yaml"; }

inline std::string listing(int k) {
    return read_text_file(data_dir() / ("queries/listing" + std::to_string(k) + ".cypher"));
}

inline std::shared_ptr<const Ontology> bundled_ontology() {
    static const auto ontology = [] {
        std::vector<std::string> mappings;
        for (const char* f : {"aws.yaml", "azure.yaml", "k8s.yaml"}) {
            mappings.push_back(read_text_file(data_dir() / "ontology" / f));
        }
        return std::make_shared<const Ontology>(
            load_ontology(read_text_file(data_dir() / "ontology/core.yaml"), mappings));
    }();
    return ontology;
}

inline const BuildResult& bookinfo_build() {
    static const BuildResult result = build_graph(load_manifest(bookinfo_manifest()));
    return result;
}

}  // namespace cloudpg::testing
