#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pathrel {

struct RelationInstance {
    std::string w1, w2;
    std::int64_t label = 0;  // index into the declared label set

    bool operator==(const RelationInstance&) const = default;
};

// One split of a relation dataset. Labels are the declared set shared by all
// splits; instances are validated against it at load time.
struct RelationDataset {
    std::string name;
    std::vector<std::string> labels;
    std::string split;  // train | val | test
    std::vector<RelationInstance> instances;

    std::int64_t label_index(const std::string& label) const;
};

// TSV `w1<TAB>w2<TAB>relation`. Lemmas are lowercased to match corpus keys.
// Unknown labels and duplicate (w1, w2) pairs are fatal, naming the line.
RelationDataset load_split(const std::string& path, const std::vector<std::string>& labels,
                           const std::string& split, const std::string& name);

struct DatasetSplits {
    std::vector<std::string> labels;
    RelationDataset train, val, test;
};

// Directory layout: relations.txt (one label per line) plus train.tsv,
// val.tsv, test.tsv.
DatasetSplits load_dataset_dir(const std::string& dir, const std::string& name = "");

}  // namespace pathrel
